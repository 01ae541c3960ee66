//! Picard (contraction) iteration, the Newton cross-check and the
//! reconstructed solution state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assembly::{uvar, vvar, Discretization, Sources};
use super::grid::{Field2D, NozzleGrid};
use super::linalg::{solve_refined, BandedLu};
use super::{Formulation, Problem};
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    /// Stop when the max-norm update falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Relaxation factor in `(0, 1]`.
    pub damping: f64,
    /// Consecutive growing updates that count as divergence.
    pub divergence_window: usize,
    pub linear_tol: f64,
    /// Reject boundary data that violate the corner compatibility conditions.
    pub check_compatibility: bool,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
            damping: 1.0,
            divergence_window: 5,
            linear_tol: 1e-10,
            check_compatibility: true,
        }
    }
}

impl PicardConfig {
    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(LabError::InvalidInput(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(LabError::InvalidInput("tol must be positive and max_iter at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    /// Max-norm update of each iteration.
    pub residual_history: Vec<f64>,
    /// Quotients of successive updates.
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Max-norm residual of the discrete nonlinear equations at the final iterate.
    pub final_residual: f64,
}

impl IterationReport {
    fn new() -> Self {
        Self {
            residual_history: Vec::new(),
            contraction_ratios: Vec::new(),
            converged: false,
            iterations: 0,
            final_residual: f64::NAN,
        }
    }

    fn push(&mut self, update: f64) {
        if let Some(&prev) = self.residual_history.last() {
            self.contraction_ratios.push(if prev > 0.0 { update / prev } else { 0.0 });
        }
        self.residual_history.push(update);
        self.iterations += 1;
    }

    /// Median of the contraction ratios whose numerator is above round-off.
    pub fn contraction_estimate(&self) -> Option<f64> {
        let floor = 1e4 * f64::EPSILON;
        let mut r: Vec<f64> = self
            .contraction_ratios
            .iter()
            .zip(self.residual_history.iter().skip(1))
            .filter(|&(_, &u)| u > floor)
            .map(|(&q, _)| q)
            .collect();
        if r.is_empty() {
            return None;
        }
        r.sort_by(f64::total_cmp);
        let m = r.len() / 2;
        Some(if r.len() % 2 == 1 { r[m] } else { 0.5 * (r[m - 1] + r[m]) })
    }
}

/// Starting perturbation of an iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialGuess {
    /// Zero perturbation (the background).
    Background,
    /// A smooth mode of the given amplitude in both unknowns.
    SmoothMode { amplitude: f64 },
    /// Uniform noise in `[-amplitude, amplitude]` at every free unknown.
    Noise { amplitude: f64, seed: u64 },
}

impl InitialGuess {
    fn vector(&self, disc: &Discretization, src: &Sources) -> Vec<f64> {
        let mut x = disc.initial_vector(src);
        let g = &disc.grid;
        match *self {
            InitialGuess::Background => {}
            InitialGuess::SmoothMode { amplitude } => {
                for i in 0..=g.nx {
                    for j in 0..=g.ny {
                        let n = g.node(i, j);
                        let s1 = (std::f64::consts::FRAC_PI_2 * g.x1(i) / g.length).sin();
                        let c2 = (std::f64::consts::PI * g.x2(j) / g.width).cos();
                        let su = match disc.formulation {
                            Formulation::Potential => (std::f64::consts::FRAC_PI_2 * g.x1(i) / g.length).cos(),
                            Formulation::Stream => s1 * (std::f64::consts::PI * g.x2(j) / g.width).sin(),
                        };
                        if !disc.is_dirichlet(uvar(n)) {
                            x[uvar(n)] = amplitude * su * c2;
                        }
                        if !disc.is_dirichlet(vvar(n)) {
                            x[vvar(n)] = amplitude * s1 * c2;
                        }
                    }
                }
            }
            InitialGuess::Noise { amplitude, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for &k in &disc.free {
                    x[k] = amplitude * rng.random_range(-1.0..=1.0);
                }
            }
        }
        x
    }
}

/// Reconstructed two-dimensional state.
#[derive(Debug, Clone)]
pub struct SolutionState {
    pub formulation: Formulation,
    pub grid: NozzleGrid,
    /// Velocity potential `phi` or stream function `psi`.
    pub primary: Field2D,
    /// Electric or gravitational potential.
    pub big_phi: Field2D,
    pub rho: Field2D,
    pub u1: Field2D,
    pub u2: Field2D,
    pub mach: Field2D,
    /// Subsonic margin (potential) or lambda margin (stream) per node.
    pub margin: Field2D,
    pub margin_min: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Smallest and largest eigenvalue of the flux Jacobian over the nodes.
    pub lambda0: f64,
    pub big_lambda0: f64,
    pub admissible: bool,
    /// Perturbations of the primary field and of `Phi`.
    pub u_hat: Field2D,
    pub v_hat: Field2D,
}

impl SolutionState {
    pub(crate) fn build(disc: &Discretization, x: &[f64]) -> Result<Self> {
        let g = disc.grid;
        let z = || Field2D::zeros(&g);
        let (mut primary, mut big_phi, mut rho, mut u1, mut u2, mut mach, mut margin, mut u_hat, mut v_hat) =
            (z(), z(), z(), z(), z(), z(), z(), z(), z());
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=g.nx {
            for j in 0..=g.ny {
                let n = g.node(i, j);
                let at = |e: LabError| e.at(g.x1(i), g.x2(j));
                let (zz, q) = disc.node_state(x, i, j);
                let r = disc.thermo.density(zz, q).map_err(at)?;
                let m = disc.thermo.margin(zz, q).map_err(at)?;
                let (a, b) = disc.thermo.jacobians(zz, q).map_err(at)?.dq_a_eigenvalues();
                lo = lo.min(a);
                hi = hi.max(b);
                let u = match disc.formulation {
                    Formulation::Potential => q,
                    Formulation::Stream => [q[1] / r, -q[0] / r],
                };
                let c = disc.thermo.sound_speed_sq(r).sqrt();
                primary.set(i, j, disc.primary_bg[n] + x[uvar(n)]);
                big_phi.set(i, j, zz);
                rho.set(i, j, r);
                u1.set(i, j, u[0]);
                u2.set(i, j, u[1]);
                mach.set(i, j, (u[0] * u[0] + u[1] * u[1]).sqrt() / c);
                margin.set(i, j, m);
                u_hat.set(i, j, x[uvar(n)]);
                v_hat.set(i, j, x[vvar(n)]);
            }
        }
        let margin_min = margin.min();
        Ok(Self {
            formulation: disc.formulation,
            grid: g,
            primary,
            big_phi,
            rho_min: rho.min(),
            rho_max: rho.max(),
            rho,
            u1,
            u2,
            mach,
            margin,
            margin_min,
            lambda0: lo,
            big_lambda0: hi,
            admissible: margin_min > 0.0,
            u_hat,
            v_hat,
        })
    }

    /// Mass flux through the cross-section at column `i` (trapezoid rule).
    pub fn mass_flux(&self, i: usize) -> f64 {
        let g = &self.grid;
        (0..=g.ny)
            .map(|j| {
                let w = if j == 0 || j == g.ny { 0.5 } else { 1.0 };
                w * self.rho.get(i, j) * self.u1.get(i, j)
            })
            .sum::<f64>()
            * g.hy
    }
}

fn max_free(disc: &Discretization, v: &[f64]) -> f64 {
    disc.free.iter().map(|&k| v[k].abs()).fold(0.0, f64::max)
}

fn prepare(problem: &Problem, config: &PicardConfig) -> Result<(Discretization, Sources)> {
    config.validate()?;
    if config.check_compatibility {
        problem.boundary.check_compatibility(problem.doping.case, problem.grid.width)?;
    }
    let disc = Discretization::new(problem)?;
    let src = Sources::from_boundary(&disc, &problem.boundary);
    Ok((disc, src))
}

/// Picard iteration from the background.
pub fn picard_solve(problem: &Problem, config: &PicardConfig) -> Result<(SolutionState, IterationReport)> {
    picard_solve_from(problem, config, &InitialGuess::Background)
}

pub fn picard_solve_from(
    problem: &Problem,
    config: &PicardConfig,
    guess: &InitialGuess,
) -> Result<(SolutionState, IterationReport)> {
    let (disc, src) = prepare(problem, config)?;
    let x0 = guess.vector(&disc, &src);
    picard_iterate(&disc, &src, config, x0)
}

pub(crate) fn picard_iterate(
    disc: &Discretization,
    src: &Sources,
    config: &PicardConfig,
    mut x: Vec<f64>,
) -> Result<(SolutionState, IterationReport)> {
    let op = disc.background_operator();
    let lu = BandedLu::factor(&op.a)?;
    let mut report = IterationReport::new();
    let mut growing = 0;
    for _ in 0..config.max_iter {
        let rem = disc.remainders(&x)?;
        let b = op.reduce_rhs(disc, &disc.rhs(&rem, src), &x);
        let y = solve_refined(&op.a, &lu, &b, config.linear_tol)?;
        let mut update = 0.0f64;
        for (&k, &yk) in disc.free.iter().zip(&y) {
            let d = config.damping * (yk - x[k]);
            update = update.max(d.abs());
            x[k] += d;
        }
        let prev = report.residual_history.last().copied();
        report.push(update);
        if !update.is_finite() {
            return Err(LabError::Divergence {
                iterations: report.iterations,
                last_update: update,
            });
        }
        if update <= config.tol {
            report.converged = true;
            break;
        }
        growing = match prev {
            Some(p) if update > p => growing + 1,
            _ => 0,
        };
        if growing >= config.divergence_window {
            return Err(LabError::Divergence {
                iterations: report.iterations,
                last_update: update,
            });
        }
    }
    report.final_residual = max_free(disc, &disc.nonlinear_residual(&x, src)?);
    Ok((SolutionState::build(disc, &x)?, report))
}

/// Newton iteration on the discrete nonlinear residual. Not the default
/// solver; used to cross-check Picard.
pub fn newton_solve(
    problem: &Problem,
    config: &PicardConfig,
    guess: &InitialGuess,
) -> Result<(SolutionState, IterationReport)> {
    let (disc, src) = prepare(problem, config)?;
    let mut x = guess.vector(&disc, &src);
    let mut report = IterationReport::new();
    let mut growing = 0;
    for _ in 0..config.max_iter {
        let r = disc.nonlinear_residual(&x, &src)?;
        let (xj, yj, nj) = disc.state_jacobians(&x)?;
        let op = disc.split(disc.operator_triplets(&xj, &yj, &nj));
        let lu = BandedLu::factor(&op.a)?;
        let rhs: Vec<f64> = disc.free.iter().map(|&k| -r[k]).collect();
        let dx = solve_refined(&op.a, &lu, &rhs, config.linear_tol)?;
        let mut update = 0.0f64;
        for (&k, &d) in disc.free.iter().zip(&dx) {
            let d = config.damping * d;
            update = update.max(d.abs());
            x[k] += d;
        }
        let prev = report.residual_history.last().copied();
        report.push(update);
        if !update.is_finite() {
            return Err(LabError::Divergence {
                iterations: report.iterations,
                last_update: update,
            });
        }
        if update <= config.tol {
            report.converged = true;
            break;
        }
        growing = match prev {
            Some(p) if update > p => growing + 1,
            _ => 0,
        };
        if growing >= config.divergence_window {
            return Err(LabError::Divergence {
                iterations: report.iterations,
                last_update: update,
            });
        }
    }
    report.final_residual = max_free(&disc, &disc.nonlinear_residual(&x, &src)?);
    Ok((SolutionState::build(&disc, &x)?, report))
}
