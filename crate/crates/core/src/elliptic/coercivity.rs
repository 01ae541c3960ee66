//! Discrete check of the energy estimate behind the linear solvability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assembly::{uvar, vvar, Discretization};
use super::Problem;
use crate::coefficients::Jacobians;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityReport {
    /// `(B1 + B2) / reference - 1` for each accepted trial field.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    /// Smallest flux-Jacobian eigenvalue over the quadrature points.
    pub lambda0: f64,
    /// `min |w|`.
    pub mu: f64,
}

/// Cell-centre quadrature of the bilinear form and of the reference norm.
pub(crate) struct CellQuadrature<'a> {
    disc: &'a Discretization,
    jac: Vec<Jacobians>,
    w: Vec<f64>,
    wprime: Vec<f64>,
    pub lambda0: f64,
}

impl<'a> CellQuadrature<'a> {
    pub(crate) fn new(problem: &Problem, disc: &'a Discretization) -> Self {
        let g = &disc.grid;
        let mut jac = Vec::with_capacity(g.nx);
        let mut lambda0 = f64::INFINITY;
        for i in 0..g.nx {
            let mut m = disc.node_bg[i].jac;
            m.scaled_add(&disc.node_bg[i + 1].jac, 1.0);
            let mut avg = Jacobians::zero();
            avg.scaled_add(&m, 0.5);
            lambda0 = lambda0.min(avg.dq_a_eigenvalues().0);
            jac.push(avg);
        }
        let xc = |i: usize| (i as f64 + 0.5) * g.hx;
        Self {
            disc,
            jac,
            w: (0..g.nx).map(|i| problem.doping.w.eval(xc(i))).collect(),
            wprime: (0..g.nx).map(|i| problem.doping.w.derivative(xc(i), 1)).collect(),
            lambda0,
        }
    }

    /// `(B1 + B2, |grad U|^2, |grad V|^2)` integrated over the nozzle.
    pub(crate) fn forms(&self, x: &[f64]) -> (f64, f64, f64) {
        let d = self.disc;
        let g = &d.grid;
        let s = d.sign;
        let (mut b, mut gu2, mut gv2) = (0.0, 0.0, 0.0);
        for i in 0..g.nx {
            let m = &self.jac[i];
            let (w, wp) = (self.w[i], self.wprime[i]);
            for j in 0..g.ny {
                let n = [g.node(i, j), g.node(i + 1, j), g.node(i, j + 1), g.node(i + 1, j + 1)];
                let cell = |k: fn(usize) -> usize| {
                    let v = [x[k(n[0])], x[k(n[1])], x[k(n[2])], x[k(n[3])]];
                    let mean = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                    let d1 = 0.5 * ((v[1] - v[0]) + (v[3] - v[2])) / g.hx;
                    let d2 = 0.5 * ((v[2] - v[0]) + (v[3] - v[1])) / g.hy;
                    (mean, [d1, d2])
                };
                let (_, gu) = cell(uvar);
                let (v, gv) = cell(vvar);
                let area = g.hx * g.hy;
                let gv_sq = gv[0] * gv[0] + gv[1] * gv[1];
                let e_gu = m.dq_b[0] * gu[0] + m.dq_b[1] * gu[1];
                let c_gu = m.dz_a[0] * gu[0] + m.dz_a[1] * gu[1];
                let integrand = m.quadratic_form(gu) + v * c_gu + s / w * gv_sq + (m.dz_b * v + e_gu) * v
                    - s * wp / (w * w) * v * gv[0];
                b += area * integrand;
                gu2 += area * (gu[0] * gu[0] + gu[1] * gu[1]);
                gv2 += area * gv_sq;
            }
        }
        (b, gu2, gv2)
    }
}

/// Random smooth trial fields with homogeneous essential boundary values.
pub(crate) fn trial_field(disc: &Discretization, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let g = &disc.grid;
    let mut x = vec![0.0; disc.n_vars()];
    for &k in &disc.free {
        x[k] = rng.random_range(-1.0..=1.0);
    }
    let passes = rng.random_range(0..=12);
    for _ in 0..passes {
        let prev = x.clone();
        for i in 0..=g.nx {
            for j in 0..=g.ny {
                let n = g.node(i, j);
                for k in [uvar(n), vvar(n)] {
                    if disc.is_dirichlet(k) {
                        continue;
                    }
                    let c = k % 2;
                    let mut sum = prev[k];
                    let mut cnt = 1.0;
                    let nb = [
                        (i > 0).then(|| g.node(i - 1, j)),
                        (i < g.nx).then(|| g.node(i + 1, j)),
                        (j > 0).then(|| g.node(i, j - 1)),
                        (j < g.ny).then(|| g.node(i, j + 1)),
                    ];
                    for m in nb.into_iter().flatten() {
                        sum += prev[2 * m + c];
                        cnt += 1.0;
                    }
                    x[k] = sum / cnt;
                }
            }
        }
    }
    x
}

/// Minimum over `n_samples` random trial fields of
/// `(B1 + B2) / (lambda0 |grad U|^2 + |grad V|^2 / (2 mu)) - 1`.
pub fn coercivity_probe(problem: &Problem, n_samples: usize, seed: u64) -> Result<CoercivityReport> {
    let disc = Discretization::new(problem)?;
    let quad = CellQuadrature::new(problem, &disc);
    let mu = problem.doping.mu.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut margins = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let x = trial_field(&disc, &mut rng);
        if let Some(m) = margin_of(&quad, mu, &x) {
            margins.push(m);
        }
    }
    Ok(CoercivityReport {
        min_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
        margins,
        lambda0: quad.lambda0,
        mu,
    })
}

pub(crate) fn margin_of(quad: &CellQuadrature<'_>, mu: f64, x: &[f64]) -> Option<f64> {
    let (b, gu2, gv2) = quad.forms(x);
    let reference = quad.lambda0 * gu2 + gv2 / (2.0 * mu);
    (reference > 0.0).then(|| b / reference - 1.0)
}
