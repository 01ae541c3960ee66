//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Three operations: integrate a background, solve the 2D perturbation
//! problem, and audit the stream admissible set. Each has a plain Rust
//! entry point (tested natively) and a thin `wasm_bindgen` wrapper.

use eplab::analysis::{convexity_audit_stream, AuditOptions};
use eplab::basis::cubic_bump_coefficients;
use eplab::elliptic::{picard_solve, BoundaryData, Formulation, NozzleGrid, PicardConfig, Problem};
use eplab::{integrate_background, BackgroundOptions, BackgroundProfile, Basis1D, DopingProfile, LabError, PressureLaw};
use wasm_bindgen::prelude::*;

/// Nozzle of length 1 and width 1 with constant doping `w` and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub gamma: f64,
    pub flux: f64,
    pub rho0: f64,
    pub e0: f64,
    pub w: f64,
    pub b: f64,
}

impl Setup {
    fn doping(&self) -> Result<DopingProfile, LabError> {
        DopingProfile::new(Basis1D::constant(self.w, 1.0), Basis1D::constant(self.b, 1.0), 1.0)
    }

    fn background(&self, n: usize) -> Result<BackgroundProfile, LabError> {
        let opts = BackgroundOptions { substeps: 16, ..Default::default() };
        integrate_background(&PressureLaw::polytropic(self.gamma)?, &self.doping()?, self.flux, self.rho0, self.e0, 1.0, n, opts)
    }
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct BackgroundView {
    x: Vec<f64>,
    rho: Vec<f64>,
    u: Vec<f64>,
    e: Vec<f64>,
    phi: Vec<f64>,
    mach: Vec<f64>,
}

#[wasm_bindgen]
impl BackgroundView {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn rho(&self) -> Vec<f64> {
        self.rho.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn u(&self) -> Vec<f64> {
        self.u.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn e(&self) -> Vec<f64> {
        self.e.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn phi(&self) -> Vec<f64> {
        self.phi.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mach(&self) -> Vec<f64> {
        self.mach.clone()
    }
}

pub fn background(setup: Setup, n: usize) -> Result<BackgroundView, LabError> {
    let bg = setup.background(n)?;
    Ok(BackgroundView {
        mach: bg.mach_profile(),
        x: bg.x,
        rho: bg.rho,
        u: bg.u,
        e: bg.e,
        phi: bg.phi,
    })
}

/// Converged 2D state; fields are row-major with `x1` outer.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct SolveView {
    nx: usize,
    ny: usize,
    mach: Vec<f64>,
    rho: Vec<f64>,
    history: Vec<f64>,
    converged: bool,
    margin: f64,
}

#[wasm_bindgen]
impl SolveView {
    #[wasm_bindgen(getter)]
    pub fn nx(&self) -> usize {
        self.nx
    }
    #[wasm_bindgen(getter)]
    pub fn ny(&self) -> usize {
        self.ny
    }
    #[wasm_bindgen(getter)]
    pub fn mach(&self) -> Vec<f64> {
        self.mach.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn rho(&self) -> Vec<f64> {
        self.rho.clone()
    }
    /// Max-norm update per Picard iteration.
    #[wasm_bindgen(getter)]
    pub fn history(&self) -> Vec<f64> {
        self.history.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }
    /// Smallest subsonic (or lambda) margin over the nodes.
    #[wasm_bindgen(getter)]
    pub fn margin(&self) -> f64 {
        self.margin
    }
}

/// Solves with inflow perturbation `eps (x2 (1 - x2))^3` scaled to unit peak.
pub fn solve(setup: Setup, stream: bool, eps: f64, nx: usize, ny: usize) -> Result<SolveView, LabError> {
    let formulation = if stream { Formulation::Stream } else { Formulation::Potential };
    let bump = Basis1D::from_poly(cubic_bump_coefficients(1.0), 1.0);
    let unit = bump.scaled(1.0 / bump.eval(0.5));
    let boundary = BoundaryData { g0: unit.scaled(eps), h0: unit.scaled(0.5 * eps), vl: Basis1D::zero(1.0) };
    let problem = Problem::new(formulation, NozzleGrid::new(1.0, 1.0, nx, ny)?, setup.background(nx)?, setup.doping()?, boundary)?;
    let (state, report) = picard_solve(&problem, &PicardConfig::default())?;
    Ok(SolveView {
        nx,
        ny,
        mach: state.mach.values,
        rho: state.rho.values,
        history: report.residual_history,
        converged: report.converged,
        margin: state.margin_min,
    })
}

/// `[pairs, violations, min margin along paths]` of the lambda-set audit.
pub fn audit(gamma: f64, lambda: f64, n_pairs: usize, seed: u64) -> Result<Vec<f64>, LabError> {
    let r = convexity_audit_stream(gamma, lambda, &AuditOptions::stream(n_pairs, 11, seed))?;
    Ok(vec![r.pairs as f64, r.violations as f64, r.min_margin_along_paths])
}

fn js(e: LabError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = background)]
pub fn background_js(gamma: f64, flux: f64, rho0: f64, e0: f64, w: f64, b: f64, n: usize) -> Result<BackgroundView, JsError> {
    background(Setup { gamma, flux, rho0, e0, w, b }, n).map_err(js)
}

#[wasm_bindgen(js_name = solve)]
#[allow(clippy::too_many_arguments)]
pub fn solve_js(
    gamma: f64,
    flux: f64,
    rho0: f64,
    e0: f64,
    w: f64,
    b: f64,
    stream: bool,
    eps: f64,
    nx: usize,
    ny: usize,
) -> Result<SolveView, JsError> {
    solve(Setup { gamma, flux, rho0, e0, w, b }, stream, eps, nx, ny).map_err(js)
}

#[wasm_bindgen(js_name = auditStream)]
pub fn audit_js(gamma: f64, lambda: f64, n_pairs: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    audit(gamma, lambda, n_pairs, seed).map_err(js)
}
