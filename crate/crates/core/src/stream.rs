//! Stream-function formulation for `p = rho^gamma`, `gamma > 1`:
//! Bernoulli function `Bf(rho, q) = |q|^2/(2 rho^2) + gamma rho^(gamma-1)/(gamma-1)`,
//! flux `A = q / rho_sub`, source `B = -rho_sub`.

use crate::coefficients::Jacobians;
use crate::error::{LabError, Result};
use crate::roots::bracketed_newton;

/// Default floor for `gamma rho^(gamma+1) - |q|^2` in [`stream_jacobians`].
pub const DEFAULT_DEGENERACY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamPoint {
    pub z: f64,
    /// Momentum `grad psi`.
    pub q: [f64; 2],
    pub k0: f64,
    pub gamma: f64,
}

impl StreamPoint {
    pub fn new(z: f64, q: [f64; 2], k0: f64, gamma: f64) -> Self {
        Self { z, q, k0, gamma }
    }

    pub fn q2(&self) -> f64 {
        self.q[0] * self.q[0] + self.q[1] * self.q[1]
    }

    fn require_gamma(&self) -> Result<()> {
        if self.gamma > 1.0 && self.gamma.is_finite() {
            Ok(())
        } else {
            Err(LabError::Unsupported(format!(
                "stream formulation needs gamma > 1, got {}",
                self.gamma
            )))
        }
    }
}

/// `Bf(rho, q)` for `|q|^2 = q2`.
pub fn bernoulli(gamma: f64, rho: f64, q2: f64) -> f64 {
    0.5 * q2 / (rho * rho) + gamma / (gamma - 1.0) * rho.powf(gamma - 1.0)
}

/// `rho_s = (|q|^2/gamma)^(1/(gamma+1))`.
pub fn sonic_density(pt: &StreamPoint) -> f64 {
    (pt.q2() / pt.gamma).powf(1.0 / (pt.gamma + 1.0))
}

/// Constant `C(gamma)` with `Bf(rho_s(q), q) = C |q|^(2(gamma-1)/(gamma+1))`.
pub fn sonic_constant(gamma: f64) -> f64 {
    let g = gamma;
    0.5 * (1.0 / g).powf(-2.0 / (g + 1.0)) + g / (g - 1.0) * (1.0 / g).powf((g - 1.0) / (g + 1.0))
}

pub fn sonic_bernoulli(pt: &StreamPoint) -> Result<f64> {
    pt.require_gamma()?;
    let g = pt.gamma;
    Ok(sonic_constant(g) * pt.q2().powf((g - 1.0) / (g + 1.0)))
}

/// `k0 + z - Bf(rho_s(q), q)`; membership in the lambda-set iff `>= lambda`.
pub fn lambda_margin(pt: &StreamPoint) -> Result<f64> {
    Ok(pt.k0 + pt.z - sonic_bernoulli(pt)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRoots {
    pub sub: f64,
    /// Absent when `q = 0` (the supersonic branch collapses to vacuum).
    pub sup: Option<f64>,
}

/// Both roots of `Bf(rho, q) = k0 + z`.
pub fn solve_density_roots(pt: &StreamPoint) -> Result<DensityRoots> {
    let margin = lambda_margin(pt)?;
    if !(margin > 0.0) {
        return Err(LabError::NoSubsonicRoot { margin });
    }
    let g = pt.gamma;
    let target = pt.k0 + pt.z;
    let q2 = pt.q2();
    let closed = ((g - 1.0) * target / g).powf(1.0 / (g - 1.0));
    if q2 == 0.0 {
        return Ok(DensityRoots { sub: closed, sup: None });
    }
    let rs = sonic_density(pt);
    let f = |rho: f64| {
        let v = bernoulli(g, rho, q2) - target;
        let d = (g * rho.powf(g + 1.0) - q2) / (rho * rho * rho);
        (v, d)
    };
    let width = 1e-3 * rs;
    let sub = bracketed_newton(f, rs, closed.max(rs), width, 1e-15).ok_or(LabError::NoSubsonicRoot { margin })?;
    let lo = pt.q2().sqrt() / (2.0 * target).sqrt();
    let sup = bracketed_newton(f, lo.min(rs), rs, width, 1e-15);
    Ok(DensityRoots { sub, sup })
}

/// Subsonic density `rho_sub(q, z)`.
pub fn density(pt: &StreamPoint) -> Result<f64> {
    Ok(solve_density_roots(pt)?.sub)
}

/// `(A, B) = (q / rho_sub, -rho_sub)`.
pub fn flux_and_source(pt: &StreamPoint) -> Result<([f64; 2], f64)> {
    let rho = density(pt)?;
    Ok(([pt.q[0] / rho, pt.q[1] / rho], -rho))
}

pub fn stream_jacobians(pt: &StreamPoint, floor: f64) -> Result<Jacobians> {
    let rho = density(pt)?;
    jacobians_at(pt.gamma, rho, pt.q, floor)
}

pub(crate) fn jacobians_at(gamma: f64, rho: f64, q: [f64; 2], floor: f64) -> Result<Jacobians> {
    let q2 = q[0] * q[0] + q[1] * q[1];
    let den = gamma * rho.powf(gamma + 1.0) - q2;
    if !(den > floor) {
        return Err(LabError::SonicDegeneracy { denominator: den });
    }
    let mut dq_a = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { 1.0 } else { 0.0 };
            dq_a[i][j] = (delta + q[i] * q[j] / den) / rho;
        }
    }
    // d rho/dq = -q rho/den, d rho/dz = rho^3/den.
    let dz_a = [-q[0] * rho / den, -q[1] * rho / den];
    Ok(Jacobians {
        dq_a,
        dz_a,
        dq_b: [-dz_a[0], -dz_a[1]],
        dz_b: -rho * rho * rho / den,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sonic_density_examples() {
        assert_eq!(sonic_density(&StreamPoint::new(0.0, [0.0, 0.0], 1.0, 3.0)), 0.0);
        let q = [3f64.sqrt(), 0.0];
        assert!((sonic_density(&StreamPoint::new(0.0, q, 1.0, 3.0)) - 1.0).abs() < 1e-15);
        let q = [1.0, 1.0];
        assert!((sonic_density(&StreamPoint::new(0.0, q, 1.0, 2.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sonic_bernoulli_examples() {
        assert!((sonic_constant(3.0) - 3f64.sqrt()).abs() < 1e-15);
        let pt = StreamPoint::new(0.0, [3f64.sqrt(), 0.0], 0.0, 3.0);
        assert!((sonic_bernoulli(&pt).unwrap() - 3.0).abs() < 1e-14);
        assert!((bernoulli(3.0, 1.0, 3.0) - 3.0).abs() < 1e-15);
        assert_eq!(sonic_bernoulli(&StreamPoint::new(0.0, [0.0, 0.0], 0.0, 3.0)).unwrap(), 0.0);
        let pt = StreamPoint::new(0.0, [0.0, 2.0], 0.0, 3.0);
        assert!((sonic_bernoulli(&pt).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-14);
        assert!(matches!(
            sonic_bernoulli(&StreamPoint::new(0.0, [1.0, 0.0], 0.0, 1.0)),
            Err(LabError::Unsupported(_))
        ));
    }

    #[test]
    fn lambda_margin_examples() {
        let pt = StreamPoint::new(0.1, [0.0, 0.0], 0.4, 3.0);
        assert!((lambda_margin(&pt).unwrap() - 0.5).abs() < 1e-15);
        let pt = StreamPoint::new(0.0, [3f64.sqrt(), 0.0], 3.75, 3.0);
        assert!((lambda_margin(&pt).unwrap() - 0.75).abs() < 1e-14);
        let pt = StreamPoint::new(0.0, [3f64.sqrt(), 0.0], 2.0, 3.0);
        assert!(lambda_margin(&pt).unwrap() < 0.0);
    }

    #[test]
    fn root_examples() {
        let pt = StreamPoint::new(0.0, [3f64.sqrt(), 0.0], 3.75, 3.0);
        let r = solve_density_roots(&pt).unwrap();
        assert!((r.sub - 2f64.sqrt()).abs() < 1e-12);
        assert!((r.sup.unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let r = solve_density_roots(&StreamPoint::new(0.5, [0.0, 0.0], 1.0, 3.0)).unwrap();
        assert!((r.sub - 1.0).abs() < 1e-15);
        assert!(r.sup.is_none());
        let pt = StreamPoint::new(0.0, [3f64.sqrt(), 0.0], 2.0, 3.0);
        assert!(matches!(solve_density_roots(&pt), Err(LabError::NoSubsonicRoot { .. })));
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for gamma in [2.0, 3.0] {
            let mut n = 0;
            while n < 200 {
                let pt = StreamPoint::new(rng.random_range(-0.5..0.5), [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], 1.0, gamma);
                if lambda_margin(&pt).unwrap() < 0.1 {
                    continue;
                }
                n += 1;
                let j = stream_jacobians(&pt, DEFAULT_DEGENERACY_FLOOR).unwrap();
                let fd = |dz: f64, dq: [f64; 2]| {
                    let mut p = pt;
                    let mut m = pt;
                    p.z += dz;
                    m.z -= dz;
                    for k in 0..2 {
                        p.q[k] += dq[k];
                        m.q[k] -= dq[k];
                    }
                    let (ap, bp) = flux_and_source(&p).unwrap();
                    let (am, bm) = flux_and_source(&m).unwrap();
                    ([(ap[0] - am[0]) / (2.0 * h), (ap[1] - am[1]) / (2.0 * h)], (bp - bm) / (2.0 * h))
                };
                let (a, b) = fd(h, [0.0, 0.0]);
                assert!((a[0] - j.dz_a[0]).abs() < 1e-6 && (a[1] - j.dz_a[1]).abs() < 1e-6);
                assert!((b - j.dz_b).abs() < 1e-6);
                for k in 0..2 {
                    let mut e = [0.0, 0.0];
                    e[k] = h;
                    let (a, b) = fd(0.0, e);
                    assert!((a[0] - j.dq_a[0][k]).abs() < 1e-6 && (a[1] - j.dq_a[1][k]).abs() < 1e-6);
                    assert!((b - j.dq_b[k]).abs() < 1e-6);
                }
                assert!(j.dz_b < 0.0);
            }
        }
    }

    #[test]
    fn background_coefficients() {
        // Background state: q = (0, J), z chosen so rho_sub = rho_bar.
        let (gamma, rho_bar, flux, k0) = (3.0, 1.2, 0.6, 1.0);
        let u = flux / rho_bar;
        let z = bernoulli(gamma, rho_bar, flux * flux) - k0;
        let pt = StreamPoint::new(z, [0.0, flux], k0, gamma);
        assert!((density(&pt).unwrap() - rho_bar).abs() < 1e-13);
        let j = stream_jacobians(&pt, DEFAULT_DEGENERACY_FLOOR).unwrap();
        let c = gamma * rho_bar.powf(gamma - 1.0);
        assert!((rho_bar * j.dq_a[0][0] - 1.0).abs() < 1e-12);
        assert!((rho_bar * j.dq_a[1][1] - c / (c - u * u)).abs() < 1e-12);
        assert_eq!(j.dq_a[0][1], 0.0);
        // q1 = 0 kills the first component of dA/dz.
        assert_eq!(j.dz_a[0], 0.0);
        assert_eq!(j.identity_defect(), 0.0);
    }

    #[test]
    fn zero_momentum_gives_scaled_identity() {
        let pt = StreamPoint::new(0.0, [0.0, 0.0], 1.5, 3.0);
        let j = stream_jacobians(&pt, DEFAULT_DEGENERACY_FLOOR).unwrap();
        let rho = density(&pt).unwrap();
        assert_eq!(j.dq_a, [[1.0 / rho, 0.0], [0.0, 1.0 / rho]]);
    }

    proptest! {
        #[test]
        fn roots_are_ordered(gamma in 1.5f64..5.0, qx in -2.0f64..2.0, qy in -2.0f64..2.0, z in 0.0f64..3.0) {
            let pt = StreamPoint::new(z, [qx, qy], 1.0, gamma);
            let m = lambda_margin(&pt).unwrap();
            prop_assume!(m > 1e-6 && pt.q2() > 1e-8);
            let r = solve_density_roots(&pt).unwrap();
            let rs = sonic_density(&pt);
            let sup = r.sup.unwrap();
            prop_assert!(sup < rs && rs < r.sub);
            let target = pt.k0 + pt.z;
            prop_assert!((bernoulli(gamma, r.sub, pt.q2()) - target).abs() <= 1e-12 * target.max(1.0));
            prop_assert!((bernoulli(gamma, sup, pt.q2()) - target).abs() <= 1e-12 * target.max(1.0));
            prop_assert!(gamma * r.sub.powf(gamma + 1.0) - pt.q2() > 0.0);
        }
    }
}
