//! Derivatives of the flux `A(z, q)` and source `B(z, q)` shared by both
//! formulations.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobians {
    /// `dq_a[i][j] = dA_i/dq_j`.
    pub dq_a: [[f64; 2]; 2],
    pub dz_a: [f64; 2],
    pub dq_b: [f64; 2],
    pub dz_b: f64,
}

impl Jacobians {
    /// `max_i |dA_i/dz + dB/dq_i|`; zero by construction in both formulations.
    pub fn identity_defect(&self) -> f64 {
        (self.dz_a[0] + self.dq_b[0]).abs().max((self.dz_a[1] + self.dq_b[1]).abs())
    }

    /// Eigenvalues of the symmetric part of `dq_a`, ascending.
    pub fn dq_a_eigenvalues(&self) -> (f64, f64) {
        sym_eigenvalues(self.dq_a)
    }

    pub fn quadratic_form(&self, xi: [f64; 2]) -> f64 {
        let m = self.dq_a;
        xi[0] * (m[0][0] * xi[0] + m[0][1] * xi[1]) + xi[1] * (m[1][0] * xi[0] + m[1][1] * xi[1])
    }

    pub(crate) fn scaled_add(&mut self, other: &Jacobians, w: f64) {
        for i in 0..2 {
            for j in 0..2 {
                self.dq_a[i][j] += w * other.dq_a[i][j];
            }
            self.dz_a[i] += w * other.dz_a[i];
            self.dq_b[i] += w * other.dq_b[i];
        }
        self.dz_b += w * other.dz_b;
    }

    pub(crate) fn zero() -> Self {
        Self {
            dq_a: [[0.0; 2]; 2],
            dz_a: [0.0; 2],
            dq_b: [0.0; 2],
            dz_b: 0.0,
        }
    }
}

/// Eigenvalues of the symmetric part of a 2x2 matrix, ascending.
pub fn sym_eigenvalues(m: [[f64; 2]; 2]) -> (f64, f64) {
    let a = m[0][0];
    let d = m[1][1];
    let b = 0.5 * (m[0][1] + m[1][0]);
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean - r, mean + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_known_matrices() {
        assert_eq!(sym_eigenvalues([[2.0, 0.0], [0.0, 3.0]]), (2.0, 3.0));
        let (l0, l1) = sym_eigenvalues([[2.0, 1.0], [1.0, 2.0]]);
        assert!((l0 - 1.0).abs() < 1e-15 && (l1 - 3.0).abs() < 1e-15);
    }
}
