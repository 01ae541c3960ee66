#![allow(dead_code)]

use eplab::basis::cubic_bump_coefficients;
use eplab::elliptic::{
    assemble_linear_system, solve_linear, BoundaryData, Discretization, Formulation, NozzleGrid, Problem, Remainders,
    Sources, Thermo,
};
use eplab::{integrate_background, BackgroundOptions, BackgroundProfile, Basis1D, DopingProfile, FieldCase, PressureLaw};

pub const LENGTH: f64 = 1.0;
pub const WIDTH: f64 = 1.0;

/// Constant subsonic background (`b = w rho0`, `E0 = 0`).
pub fn uniform_problem(formulation: Formulation, gamma: f64, w: f64, nx: usize, ny: usize, bd: BoundaryData) -> Problem {
    let law = PressureLaw::polytropic(gamma).unwrap();
    let doping = DopingProfile::constant(w, w, LENGTH).unwrap();
    let opts = BackgroundOptions { substeps: 16, ..Default::default() };
    let bg = integrate_background(&law, &doping, 0.5, 1.0, 0.0, LENGTH, nx, opts).unwrap();
    let grid = NozzleGrid::new(LENGTH, WIDTH, nx, ny).unwrap();
    Problem::new(formulation, grid, bg, doping, bd).unwrap()
}

/// Non-constant doping and a background that varies along the nozzle.
pub fn varying_problem(formulation: Formulation, case: FieldCase, gamma: f64, nx: usize, ny: usize, bd: BoundaryData) -> Problem {
    let law = PressureLaw::polytropic(gamma).unwrap();
    let sign = match case {
        FieldCase::Electric => 1.0,
        FieldCase::Gravitational => -1.0,
    };
    let w = Basis1D::new(vec![sign, 0.0], vec![0.05 * sign], LENGTH).unwrap();
    let b = Basis1D::from_poly(vec![sign * 0.9], LENGTH);
    let doping = DopingProfile::with_case(w, b, LENGTH, case).unwrap();
    let opts = BackgroundOptions { substeps: 16, ..Default::default() };
    let bg = integrate_background(&law, &doping, 0.5, 1.0, 0.05, LENGTH, nx, opts).unwrap();
    let grid = NozzleGrid::new(LENGTH, WIDTH, nx, ny).unwrap();
    Problem::new(formulation, grid, bg, doping, bd).unwrap()
}

/// Boundary data satisfying the corner conditions of both cases, scaled by `eps`.
pub fn bump_data(eps: f64) -> BoundaryData {
    let bump = Basis1D::from_poly(cubic_bump_coefficients(WIDTH), WIDTH);
    let peak = bump.eval(0.5 * WIDTH);
    let unit = bump.scaled(1.0 / peak);
    BoundaryData {
        g0: unit.scaled(eps),
        h0: unit.scaled(0.5 * eps),
        vl: unit.scaled(-0.3 * eps),
    }
}

/// Solves the linear problem with zero remainders and sources `src`;
/// returns the full variable vector.
pub fn linear_solve(disc: &Discretization, src: &Sources) -> Vec<f64> {
    let sys = assemble_linear_system(disc, &Remainders::zeros(disc), src);
    let y = solve_linear(&sys).unwrap();
    let mut x = disc.initial_vector(src);
    disc.scatter(&y, &mut x);
    x
}

/// Manufactured solution on a background with `rho(x1) = 1 + 0.2 x1`.
pub struct Manufactured {
    pub formulation: Formulation,
    pub thermo: Thermo,
    pub flux: f64,
    pub amplitude: f64,
    pub law: PressureLaw,
    pub w: Basis1D,
}

impl Manufactured {
    pub fn new(formulation: Formulation, amplitude: f64) -> Self {
        let (gamma, wsign) = match formulation {
            Formulation::Potential => (1.4, 1.0),
            Formulation::Stream => (3.0, -1.0),
        };
        let law = PressureLaw::polytropic(gamma).unwrap();
        let flux = 0.5;
        let bg = Self::background_arrays(&law, flux, 4);
        let thermo = Thermo::for_problem(formulation, &bg).unwrap();
        Self {
            formulation,
            thermo,
            flux,
            amplitude,
            law,
            w: Basis1D::new(vec![wsign, 0.1 * wsign], vec![], LENGTH).unwrap(),
        }
    }

    pub fn rho_bar(x1: f64) -> f64 {
        1.0 + 0.2 * x1
    }

    fn background_arrays(law: &PressureLaw, flux: f64, nx: usize) -> BackgroundProfile {
        let x: Vec<f64> = (0..=nx).map(|i| LENGTH * i as f64 / nx as f64).collect();
        let rho: Vec<f64> = x.iter().map(|&s| Self::rho_bar(s)).collect();
        // Bernoulli with K0 = 0 fixes Phi.
        let phi: Vec<f64> = rho.iter().map(|&r| law.enthalpy(r).unwrap() + 0.5 * (flux / r).powi(2)).collect();
        let e = vec![0.0; x.len()];
        // int_0^x J / (1 + 0.2 s) ds
        let vp = x.iter().map(|&s| flux / 0.2 * (1.0 + 0.2 * s).ln()).collect();
        BackgroundProfile::from_arrays(law.clone(), flux, x, rho, e, phi, vp).unwrap()
    }

    fn bg_state(&self, x1: f64) -> (f64, [f64; 2]) {
        let r = Self::rho_bar(x1);
        let q = match self.formulation {
            Formulation::Potential => [self.flux / r, 0.0],
            Formulation::Stream => [0.0, self.flux],
        };
        (self.thermo.bernoulli_potential(r, q).unwrap(), q)
    }

    /// `(U*, grad U*)`.
    pub fn u(&self, x1: f64, x2: f64) -> (f64, [f64; 2]) {
        let a = self.amplitude;
        let (k1, k2) = (std::f64::consts::PI / LENGTH, std::f64::consts::PI / WIDTH);
        match self.formulation {
            Formulation::Potential => {
                let p = 1.0 + 0.5 * x1 * x1;
                (a * p * (k2 * x2).cos(), [a * x1 * (k2 * x2).cos(), -a * p * k2 * (k2 * x2).sin()])
            }
            Formulation::Stream => {
                let p = 1.0 + x2 * x2;
                (a * (k1 * x1).cos() * p, [-a * k1 * (k1 * x1).sin() * p, a * (k1 * x1).cos() * 2.0 * x2])
            }
        }
    }

    /// `(V*, grad V*, Laplacian V*)`.
    pub fn v(&self, x1: f64, x2: f64) -> (f64, [f64; 2], f64) {
        let a = self.amplitude;
        let k2 = std::f64::consts::PI / WIDTH;
        let p = 0.5 + x1 + 0.5 * x1 * x1;
        let c = (k2 * x2).cos();
        (
            a * p * c,
            [a * (1.0 + x1) * c, -a * p * k2 * (k2 * x2).sin()],
            a * c - a * p * k2 * k2 * c,
        )
    }

    /// Continuous linear flux `M grad U* + c V*`.
    pub fn flux(&self, x1: f64, x2: f64) -> [f64; 2] {
        let (z, q) = self.bg_state(x1);
        let jac = self.thermo.jacobians(z, q).unwrap();
        let (_, gu) = self.u(x1, x2);
        let (v, _, _) = self.v(x1, x2);
        [
            jac.dq_a[0][0] * gu[0] + jac.dq_a[0][1] * gu[1] + jac.dz_a[0] * v,
            jac.dq_a[1][0] * gu[0] + jac.dq_a[1][1] * gu[1] + jac.dz_a[1] * v,
        ]
    }

    /// Divergence of the flux by fourth-order central differences.
    pub fn flux_divergence(&self, x1: f64, x2: f64) -> f64 {
        let h = 1e-3;
        let d = |f: &dyn Fn(f64) -> f64, x: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
        d(&|s| self.flux(s, x2)[0], x1) + d(&|s| self.flux(x1, s)[1], x2)
    }

    pub fn field_residual(&self, x1: f64, x2: f64) -> f64 {
        let (z, q) = self.bg_state(x1);
        let jac = self.thermo.jacobians(z, q).unwrap();
        let (_, gu) = self.u(x1, x2);
        let (v, _, lap) = self.v(x1, x2);
        self.formulation.sign() / self.w.eval(x1) * lap - jac.dz_b * v - jac.dq_b[0] * gu[0] - jac.dq_b[1] * gu[1]
    }

    pub fn problem(&self, nx: usize, ny: usize) -> Problem {
        let bg = Self::background_arrays(&self.law, self.flux, nx);
        let case = if self.w.eval(0.0) > 0.0 { FieldCase::Electric } else { FieldCase::Gravitational };
        let doping = DopingProfile::with_case(self.w.clone(), self.w.clone(), LENGTH, case).unwrap();
        let grid = NozzleGrid::new(LENGTH, WIDTH, nx, ny).unwrap();
        Problem::new(self.formulation, grid, bg, doping, BoundaryData::zero(WIDTH)).unwrap()
    }

    pub fn sources(&self, disc: &Discretization) -> Sources {
        let g = disc.grid;
        let mut s = Sources::zeros(disc);
        for i in 0..=g.nx {
            for j in 0..=g.ny {
                let (x1, x2) = (g.x1(i), g.x2(j));
                let n = g.node(i, j);
                s.volume_u[n] = self.flux_divergence(x1, x2);
                s.volume_v[n] = self.field_residual(x1, x2);
                let ux = if disc.is_dirichlet(2 * n) { self.u(x1, x2).0 } else { 0.0 };
                s.dirichlet[2 * n] = ux;
                s.dirichlet[2 * n + 1] = if disc.is_dirichlet(2 * n + 1) { self.v(x1, x2).0 } else { 0.0 };
            }
        }
        for j in 0..=g.ny {
            s.inlet_flux[j] = self.flux(0.0, g.x2(j))[0];
            s.outlet_neumann[j] = self.v(LENGTH, g.x2(j)).1[0];
        }
        s
    }

    /// Max nodal error of the discrete solution on an `nx x ny` grid.
    pub fn error(&self, nx: usize, ny: usize) -> f64 {
        let problem = self.problem(nx, ny);
        let disc = Discretization::new(&problem).unwrap();
        let src = self.sources(&disc);
        let x = linear_solve(&disc, &src);
        let g = disc.grid;
        let mut err = 0.0f64;
        for i in 0..=g.nx {
            for j in 0..=g.ny {
                let n = g.node(i, j);
                let (x1, x2) = (g.x1(i), g.x2(j));
                err = err.max((x[2 * n] - self.u(x1, x2).0).abs());
                err = err.max((x[2 * n + 1] - self.v(x1, x2).0).abs());
            }
        }
        err
    }
}
