//! Potential formulation: `rho(z, q) = i^{-1}(K0 + z - |q|^2/2)`,
//! flux `A = rho q`, source `B = rho`.

use crate::coefficients::Jacobians;
use crate::error::Result;
use crate::gas_model::PressureLaw;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialPoint {
    /// Electrostatic potential value.
    pub z: f64,
    /// Velocity `grad phi`.
    pub q: [f64; 2],
    /// Bernoulli constant.
    pub k0: f64,
}

impl PotentialPoint {
    pub fn new(z: f64, q: [f64; 2], k0: f64) -> Self {
        Self { z, q, k0 }
    }

    pub fn q2(&self) -> f64 {
        self.q[0] * self.q[0] + self.q[1] * self.q[1]
    }
}

pub fn density(law: &PressureLaw, pt: &PotentialPoint) -> Result<f64> {
    law.enthalpy_inverse(pt.k0 + pt.z - 0.5 * pt.q2())
}

/// `(A, B) = (rho q, rho)`.
pub fn flux_and_source(law: &PressureLaw, pt: &PotentialPoint) -> Result<([f64; 2], f64)> {
    let rho = density(law, pt)?;
    Ok(([rho * pt.q[0], rho * pt.q[1]], rho))
}

pub fn jacobians(law: &PressureLaw, pt: &PotentialPoint) -> Result<Jacobians> {
    let rho = density(law, pt)?;
    Ok(jacobians_at(law.dp(rho), rho, pt.q))
}

pub(crate) fn jacobians_at(dp: f64, rho: f64, q: [f64; 2]) -> Jacobians {
    let r = rho / dp;
    let mut dq_a = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { 1.0 } else { 0.0 };
            dq_a[i][j] = (delta - q[i] * q[j] / dp) * rho;
        }
    }
    let dz_a = [r * q[0], r * q[1]];
    Jacobians {
        dq_a,
        dz_a,
        dq_b: [-dz_a[0], -dz_a[1]],
        dz_b: r,
    }
}

/// `p'(rho(z, q)) - |q|^2`; the point lies in the `delta`-subsonic set iff
/// this is at least `delta`.
pub fn subsonic_margin(law: &PressureLaw, pt: &PotentialPoint) -> Result<f64> {
    let rho = density(law, pt)?;
    Ok(law.dp(rho) - pt.q2())
}
