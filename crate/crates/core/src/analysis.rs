//! Numerical checks of the uniqueness arguments: convexity of the
//! admissible sets, the discrete energy identity between two solutions,
//! and multistart agreement of the solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::{
    picard_solve_from, Discretization, Formulation, InitialGuess, IterationReport, PicardConfig, Problem,
    SolutionState, Thermo,
};
use crate::error::{LabError, Result};
use crate::gas_model::PressureLaw;
use crate::potential::{self, PotentialPoint};
use crate::quadrature::gauss_legendre_unit;
use crate::stream::{self, StreamPoint};

const AUDIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub n_pairs: usize,
    /// Samples per segment, endpoints included.
    pub n_t: usize,
    pub seed: u64,
    /// Bernoulli constant of the audited set (`K0` or `k0`).
    pub bernoulli_constant: f64,
}

impl AuditOptions {
    pub fn potential(n_pairs: usize, n_t: usize, seed: u64) -> Self {
        Self {
            n_pairs,
            n_t,
            seed,
            bernoulli_constant: 0.0,
        }
    }

    pub fn stream(n_pairs: usize, n_t: usize, seed: u64) -> Self {
        Self {
            n_pairs,
            n_t,
            seed,
            bernoulli_constant: 1.0,
        }
    }
}

/// A pair of admissible endpoints and the worst point between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSample {
    pub z0: f64,
    pub q0: [f64; 2],
    pub z1: f64,
    pub q1: [f64; 2],
    pub t: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub pairs: usize,
    /// Draws rejected because an endpoint was outside the set.
    pub rejected: usize,
    pub violations: usize,
    pub min_margin_along_paths: f64,
    /// Largest second difference of the margin along a path (potential audit).
    pub max_second_difference: f64,
    pub first_violation: Option<SegmentSample>,
}

impl ConvexityReport {
    fn new() -> Self {
        Self {
            pairs: 0,
            rejected: 0,
            violations: 0,
            min_margin_along_paths: f64::INFINITY,
            max_second_difference: f64::NEG_INFINITY,
            first_violation: None,
        }
    }

    fn record(&mut self, sample: SegmentSample, violated: bool) {
        if violated {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(sample);
            }
        }
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    (1.0 - t) * a + t * b
}

fn lerp2(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [lerp(a[0], b[0], t), lerp(a[1], b[1], t)]
}

fn random_q(rng: &mut ChaCha8Rng, radius: f64) -> [f64; 2] {
    // Uniform in the disc.
    let r = radius * rng.random::<f64>().sqrt();
    let th = rng.random_range(0.0..std::f64::consts::TAU);
    [r * th.cos(), r * th.sin()]
}

fn check_samples(n_t: usize) -> Result<()> {
    if n_t < 3 {
        return Err(LabError::InvalidInput("need at least 3 samples per segment".into()));
    }
    Ok(())
}

/// Audits convexity of `{(z, q) : p'(rho(z, q)) - |q|^2 >= delta}` on random
/// segments. Checks the margin, the lower density bound and concavity of the
/// margin along each segment.
pub fn convexity_audit_potential(law: &PressureLaw, delta: f64, opts: &AuditOptions) -> Result<ConvexityReport> {
    if !(delta > 0.0) {
        return Err(LabError::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    check_samples(opts.n_t)?;
    for k in 0..=60 {
        let rho = 10f64.powf(-3.0 + 0.1 * k as f64);
        let r = law.uniqueness_condition_residual(rho)?;
        if r > 1e-6 {
            return Err(LabError::Precondition(format!(
                "pressure law violates the convexity hypothesis: d/drho(rho p''/p') = {r:e} > 0 at rho = {rho:e}"
            )));
        }
    }
    let k0 = opts.bernoulli_constant;
    let zmax = 1.0 + k0.abs();
    let rho_top = law.enthalpy_inverse(zmax + k0)?;
    let qmax = 2.0 * law.dp(rho_top).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let margin = |z: f64, q: [f64; 2]| -> Option<(f64, f64)> {
        let pt = PotentialPoint::new(z, q, k0);
        let rho = potential::density(law, &pt).ok()?;
        Some((law.dp(rho) - pt.q2(), rho))
    };
    let draw = |rng: &mut ChaCha8Rng, rejected: &mut usize| loop {
        let z = rng.random_range(-zmax..=zmax);
        let q = random_q(rng, qmax);
        match margin(z, q) {
            Some((m, rho)) if m >= delta => return (z, q, rho),
            _ => *rejected += 1,
        }
    };
    let mut report = ConvexityReport::new();
    let mut s = vec![0.0; opts.n_t];
    for _ in 0..opts.n_pairs {
        let (z0, q0, r0) = draw(&mut rng, &mut report.rejected);
        let (z1, q1, r1) = draw(&mut rng, &mut report.rejected);
        report.pairs += 1;
        let mut worst = SegmentSample { z0, q0, z1, q1, t: 0.0, margin: f64::INFINITY };
        let mut violated = false;
        for (k, sk) in s.iter_mut().enumerate() {
            let t = k as f64 / (opts.n_t - 1) as f64;
            let (m, rho) = margin(lerp(z0, z1, t), lerp2(q0, q1, t)).unwrap_or((f64::NEG_INFINITY, 0.0));
            *sk = m;
            if m < worst.margin {
                worst.margin = m;
                worst.t = t;
            }
            if m < delta - AUDIT_TOL || rho < r0.min(r1) - AUDIT_TOL {
                violated = true;
            }
        }
        for k in 1..opts.n_t - 1 {
            let d2 = s[k - 1] - 2.0 * s[k] + s[k + 1];
            report.max_second_difference = report.max_second_difference.max(d2);
            if d2 > AUDIT_TOL {
                violated = true;
            }
        }
        report.min_margin_along_paths = report.min_margin_along_paths.min(worst.margin);
        report.record(worst, violated);
    }
    Ok(report)
}

/// Audits convexity of `{(z, q) : k0 + z - Bf(rho_s(q), q) >= lambda}`.
///
/// Structured pairs `q1 = -kappa q0` on the boundary of the set come first;
/// for `gamma < 3` they expose the non-convexity along lines through small
/// `|q|`. Random pairs from a box follow.
pub fn convexity_audit_stream(gamma: f64, lambda: f64, opts: &AuditOptions) -> Result<ConvexityReport> {
    if !(gamma > 1.0) {
        return Err(LabError::Unsupported(format!("the lambda-set needs gamma > 1, got {gamma}")));
    }
    if !(lambda > 0.0) {
        return Err(LabError::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    check_samples(opts.n_t)?;
    let k0 = opts.bernoulli_constant;
    let c = stream::sonic_constant(gamma);
    let alpha = 2.0 * (gamma - 1.0) / (gamma + 1.0);
    let g = |z: f64, q: [f64; 2]| {
        stream::lambda_margin(&StreamPoint::new(z, q, k0, gamma)).expect("gamma > 1 checked")
    };
    let zmax = 1.0 + k0.abs();
    let qmax = 2.0 * ((k0 + zmax) / c).powf(1.0 / alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = ConvexityReport::new();

    let audit = |report: &mut ConvexityReport, z0: f64, q0: [f64; 2], z1: f64, q1: [f64; 2]| {
        report.pairs += 1;
        let mut worst = SegmentSample { z0, q0, z1, q1, t: 0.0, margin: f64::INFINITY };
        for k in 0..opts.n_t {
            let t = k as f64 / (opts.n_t - 1) as f64;
            let m = g(lerp(z0, z1, t), lerp2(q0, q1, t));
            if m < worst.margin {
                worst.margin = m;
                worst.t = t;
            }
        }
        report.min_margin_along_paths = report.min_margin_along_paths.min(worst.margin);
        report.record(worst, worst.margin < lambda - AUDIT_TOL);
    };

    let structured = opts.n_pairs.min(64);
    let kappas = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9];
    for k in 0..structured {
        let kappa = kappas[k % kappas.len()];
        let th = rng.random_range(0.0..std::f64::consts::TAU);
        let a = 0.5 * qmax * rng.random_range(0.05..1.0);
        let q0 = [a * th.cos(), a * th.sin()];
        let q1 = [-kappa * q0[0], -kappa * q0[1]];
        // Put both endpoints on the boundary g = lambda.
        let on_edge = |q: [f64; 2]| lambda - k0 + c * (q[0] * q[0] + q[1] * q[1]).powf(alpha / 2.0);
        audit(&mut report, on_edge(q0), q0, on_edge(q1), q1);
    }
    while report.pairs < opts.n_pairs {
        let mut draw = || loop {
            let z = rng.random_range(-zmax..=zmax);
            let q = random_q(&mut rng, qmax);
            if g(z, q) >= lambda {
                return (z, q);
            }
            report.rejected += 1;
        };
        let (z0, q0) = draw();
        let (z1, q1) = draw();
        audit(&mut report, z0, q0, z1, q1);
    }
    Ok(report)
}

/// Terms of the discrete energy identity for the difference of two solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentity {
    /// Quadrature of `grad d.M grad d + (s/w)|grad D|^2 + d_z B D^2` with
    /// segment-averaged coefficients (`d`, `D` the differences of the
    /// primary field and of `Phi`).
    pub coercive: f64,
    /// Quadrature of the `w'` term `s (w'/w^2) D d1 D`.
    pub cross: f64,
    /// `coercive - cross`; vanishes up to discretization error.
    pub residual: f64,
}

fn node_q(state: &SolutionState, i: usize, j: usize) -> [f64; 2] {
    let (u1, u2) = (state.u1.get(i, j), state.u2.get(i, j));
    match state.formulation {
        Formulation::Potential => [u1, u2],
        Formulation::Stream => {
            let r = state.rho.get(i, j);
            [-r * u2, r * u1]
        }
    }
}

fn check_pair(problem: &Problem, a: &SolutionState, b: &SolutionState) -> Result<()> {
    if a.grid != b.grid || a.grid != problem.grid {
        return Err(LabError::InvalidInput("solutions live on different grids".into()));
    }
    if a.formulation != b.formulation || a.formulation != problem.formulation {
        return Err(LabError::InvalidInput("solutions use different formulations".into()));
    }
    if !(a.admissible && b.admissible) {
        return Err(LabError::Precondition("both solutions must be admissible".into()));
    }
    Ok(())
}

fn segment_admissible(thermo: &Thermo, a: &SolutionState, b: &SolutionState) -> Result<()> {
    let g = a.grid;
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        for i in 0..=g.nx {
            for j in 0..=g.ny {
                let z = lerp(a.big_phi.get(i, j), b.big_phi.get(i, j), t);
                let q = lerp2(node_q(a, i, j), node_q(b, i, j), t);
                let margin = thermo.margin(z, q).unwrap_or(f64::NEG_INFINITY);
                if !(margin > 0.0) {
                    return Err(LabError::SegmentInadmissible { t, x1: g.x1(i), x2: g.x2(j), margin });
                }
            }
        }
    }
    Ok(())
}

fn energy_terms(problem: &Problem, thermo: &Thermo, a: &SolutionState, b: &SolutionState) -> Result<(f64, f64)> {
    let g = a.grid;
    let s = problem.formulation.sign();
    let (tn, tw) = gauss_legendre_unit(11);
    let (mut coercive, mut cross) = (0.0, 0.0);
    for i in 0..g.nx {
        let xc = (i as f64 + 0.5) * g.hx;
        let w = problem.doping.w.eval(xc);
        let wp = problem.doping.w.derivative(xc, 1);
        for j in 0..g.ny {
            let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
            let avg = |f: &dyn Fn(usize, usize) -> f64| 0.25 * corners.iter().map(|&(ii, jj)| f(ii, jj)).sum::<f64>();
            let grad = |f: &dyn Fn(usize, usize) -> f64| {
                [
                    0.5 * ((f(i + 1, j) - f(i, j)) + (f(i + 1, j + 1) - f(i, j + 1))) / g.hx,
                    0.5 * ((f(i, j + 1) - f(i, j)) + (f(i + 1, j + 1) - f(i + 1, j))) / g.hy,
                ]
            };
            let za = avg(&|ii, jj| a.big_phi.get(ii, jj));
            let zb = avg(&|ii, jj| b.big_phi.get(ii, jj));
            let qa = [avg(&|ii, jj| node_q(a, ii, jj)[0]), avg(&|ii, jj| node_q(a, ii, jj)[1])];
            let qb = [avg(&|ii, jj| node_q(b, ii, jj)[0]), avg(&|ii, jj| node_q(b, ii, jj)[1])];
            let dd = grad(&|ii, jj| b.primary.get(ii, jj) - a.primary.get(ii, jj));
            let dphi = |ii: usize, jj: usize| b.big_phi.get(ii, jj) - a.big_phi.get(ii, jj);
            let dv = avg(&dphi);
            let gv = grad(&dphi);
            let mut form = 0.0;
            let mut dzb = 0.0;
            for (&t, &wt) in tn.iter().zip(&tw) {
                let jac = thermo
                    .jacobians(lerp(za, zb, t), lerp2(qa, qb, t))
                    .map_err(|e| LabError::Inadmissible { x1: xc, x2: (j as f64 + 0.5) * g.hy, source: Box::new(e) })?;
                form += wt * jac.quadratic_form(dd);
                dzb += wt * jac.dz_b;
            }
            let area = g.hx * g.hy;
            coercive += area * (form + s / w * (gv[0] * gv[0] + gv[1] * gv[1]) + dzb * dv * dv);
            cross += area * s * wp / (w * w) * dv * gv[0];
        }
    }
    Ok((coercive, cross))
}

/// Energy identity between two solutions of the same problem. Symmetric in
/// its arguments and exactly zero when they coincide.
pub fn energy_identity(problem: &Problem, a: &SolutionState, b: &SolutionState) -> Result<EnergyIdentity> {
    check_pair(problem, a, b)?;
    let thermo = Thermo::for_problem(problem.formulation, &problem.background)?;
    segment_admissible(&thermo, a, b)?;
    let (c_ab, x_ab) = energy_terms(problem, &thermo, a, b)?;
    let (c_ba, x_ba) = energy_terms(problem, &thermo, b, a)?;
    let coercive = 0.5 * (c_ab + c_ba);
    let cross = 0.5 * (x_ab + x_ba);
    Ok(EnergyIdentity { coercive, cross, residual: coercive - cross })
}

/// The coercive side of [`energy_identity`].
pub fn energy_identity_residual(problem: &Problem, a: &SolutionState, b: &SolutionState) -> Result<f64> {
    Ok(energy_identity(problem, a, b)?.coercive)
}

#[derive(Debug, Clone)]
pub struct StartOutcome {
    pub guess: InitialGuess,
    pub result: Result<(SolutionState, IterationReport)>,
}

impl StartOutcome {
    /// The solution if the run converged to an admissible state.
    pub fn converged(&self) -> Option<&SolutionState> {
        match &self.result {
            Ok((s, r)) if r.converged && s.admissible => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDistance {
    pub a: usize,
    pub b: usize,
    /// Max-norm distance of the primary field and of `Phi`.
    pub distance: f64,
    /// Coercive energy of the difference, if it could be evaluated.
    pub energy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MultistartReport {
    pub outcomes: Vec<StartOutcome>,
    pub pairs: Vec<PairDistance>,
}

impl MultistartReport {
    pub fn max_distance(&self) -> Option<f64> {
        self.pairs.iter().map(|p| p.distance).reduce(f64::max)
    }

    pub fn max_energy(&self) -> Option<f64> {
        self.pairs.iter().filter_map(|p| p.energy).map(f64::abs).reduce(f64::max)
    }
}

/// Runs the Picard solver from each guess and compares the converged results.
pub fn multistart_uniqueness(
    problem: &Problem,
    config: &PicardConfig,
    guesses: &[InitialGuess],
) -> Result<MultistartReport> {
    if guesses.is_empty() {
        return Err(LabError::InvalidInput("multistart needs at least one initial guess".into()));
    }
    Discretization::new(problem)?;
    let outcomes: Vec<StartOutcome> = guesses
        .iter()
        .map(|g| StartOutcome {
            guess: *g,
            result: picard_solve_from(problem, config, g),
        })
        .collect();
    let mut pairs = Vec::new();
    for a in 0..outcomes.len() {
        for b in a + 1..outcomes.len() {
            if let (Some(sa), Some(sb)) = (outcomes[a].converged(), outcomes[b].converged()) {
                let distance = sa.primary.max_abs_diff(&sb.primary).max(sa.big_phi.max_abs_diff(&sb.big_phi));
                let energy = energy_identity_residual(problem, sa, sb).ok();
                pairs.push(PairDistance { a, b, distance, energy });
            }
        }
    }
    Ok(MultistartReport { outcomes, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_audit_finds_no_violation() {
        let law = PressureLaw::polytropic(1.4).unwrap();
        let r = convexity_audit_potential(&law, 0.1, &AuditOptions::potential(500, 11, 1)).unwrap();
        assert_eq!(r.pairs, 500);
        assert_eq!(r.violations, 0);
        assert!(r.min_margin_along_paths >= 0.1 - 1e-9);
        assert!(r.max_second_difference <= 1e-9);
    }

    #[test]
    fn stream_audit_needs_gamma_three() {
        let ok = convexity_audit_stream(3.0, 0.1, &AuditOptions::stream(300, 11, 2)).unwrap();
        assert_eq!(ok.violations, 0);
        let bad = convexity_audit_stream(2.0, 0.1, &AuditOptions::stream(300, 11, 2)).unwrap();
        assert!(bad.violations >= 1);
        let v = bad.first_violation.unwrap();
        assert!(v.margin < 0.1);
        assert!(v.t > 0.0 && v.t < 1.0);
    }

    #[test]
    fn stream_audit_rejects_isothermal() {
        assert!(matches!(
            convexity_audit_stream(1.0, 0.1, &AuditOptions::stream(10, 11, 0)),
            Err(LabError::Unsupported(_))
        ));
    }

    #[test]
    fn audits_are_seeded() {
        let law = PressureLaw::polytropic(2.0).unwrap();
        let o = AuditOptions::potential(50, 5, 9);
        assert_eq!(convexity_audit_potential(&law, 0.2, &o).unwrap(), convexity_audit_potential(&law, 0.2, &o).unwrap());
    }

    #[test]
    fn concave_density_law_fails_precondition() {
        // rho p''/p' = rho^2 grows, violating the hypothesis.
        let law = PressureLaw::custom(
            |r: f64| (0.5 * r * r).exp_m1(),
            |r: f64| r * (0.5 * r * r).exp(),
            |r: f64| (1.0 + r * r) * (0.5 * r * r).exp(),
        );
        let err = convexity_audit_potential(&law, 0.1, &AuditOptions::potential(10, 11, 0)).unwrap_err();
        assert!(matches!(err, LabError::Precondition(_)));
    }

    #[test]
    fn antipodal_midpoint_beats_endpoints() {
        let (gamma, k0) = (3.0, 1.0);
        let q0 = [0.8, -0.3];
        let g = |z: f64, q: [f64; 2]| stream::lambda_margin(&StreamPoint::new(z, q, k0, gamma)).unwrap();
        let mid = g(0.2, [0.0, 0.0]);
        assert!(mid > g(0.2, q0) && mid > g(0.2, [-q0[0], -q0[1]]));
    }

    #[test]
    fn collinear_potential_path_is_flat_in_second_difference() {
        // With q fixed the margin is p'(rho(z)) - |q|^2, and for polytropic
        // laws p'(rho) is affine in the enthalpy.
        let law = PressureLaw::polytropic(1.4).unwrap();
        let q = [0.3, 0.1];
        let s = |z: f64| {
            let pt = PotentialPoint::new(z, q, 0.0);
            law.dp(potential::density(&law, &pt).unwrap()) - pt.q2()
        };
        let (z0, h) = (0.2, 0.1);
        let d2 = s(z0) - 2.0 * s(z0 + h) + s(z0 + 2.0 * h);
        assert!(d2.abs() < 1e-12, "{d2}");
    }
}
