use crate::background::FieldCase;
use crate::basis::Basis1D;
use crate::error::{LabError, Result};

const COMPAT_TOL: f64 = 1e-10;

/// Boundary perturbations, all functions of `x2` on `[0, ell]`:
/// inflow mass flux `g0`, inlet potential `h0`, outlet field `vL`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub g0: Basis1D,
    pub h0: Basis1D,
    pub vl: Basis1D,
}

impl BoundaryData {
    pub fn zero(width: f64) -> Self {
        Self {
            g0: Basis1D::zero(width),
            h0: Basis1D::zero(width),
            vl: Basis1D::zero(width),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            g0: self.g0.scaled(factor),
            h0: self.h0.scaled(factor),
            vl: self.vl.scaled(factor),
        }
    }

    /// `int_0^x2 g0`.
    pub fn g0_integral(&self, x2: f64) -> f64 {
        self.g0.integral_from_zero(x2)
    }

    /// Corner compatibility. The electric case needs `h0' = 0` at both ends
    /// of the cross-section; the gravitational case needs `g0`, `h0`, `vL`
    /// and their first two derivatives to vanish there.
    pub fn check_compatibility(&self, case: FieldCase, width: f64) -> Result<()> {
        let ends = [0.0, width];
        match case {
            FieldCase::Electric => {
                for x in ends {
                    let d = self.h0.derivative(x, 1);
                    if d.abs() > COMPAT_TOL {
                        return Err(LabError::Precondition(format!(
                            "electric case requires h0'(x2) = 0 at the walls; h0'({x}) = {d:e}"
                        )));
                    }
                }
            }
            FieldCase::Gravitational => {
                for (name, f) in [("g0", &self.g0), ("h0", &self.h0), ("vL", &self.vl)] {
                    for x in ends {
                        for k in 0..3 {
                            let d = f.derivative(x, k);
                            if d.abs() > COMPAT_TOL {
                                return Err(LabError::Precondition(format!(
                                    "gravitational case requires {name} and its first two derivatives \
                                     to vanish at the walls; derivative {k} at x2 = {x} is {d:e}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::cubic_bump_coefficients;

    #[test]
    fn compatibility_checks() {
        let ell = 1.0;
        let ok = BoundaryData {
            g0: Basis1D::parse("poly:0.01", ell).unwrap(),
            h0: Basis1D::parse("cos:0.01", ell).unwrap(),
            vl: Basis1D::parse("poly:0.02,0.1", ell).unwrap(),
        };
        ok.check_compatibility(FieldCase::Electric, ell).unwrap();
        assert!(ok.check_compatibility(FieldCase::Gravitational, ell).is_err());
        let bad = BoundaryData {
            h0: Basis1D::parse("poly:0,1", ell).unwrap(),
            ..ok.clone()
        };
        assert!(matches!(bad.check_compatibility(FieldCase::Electric, ell), Err(LabError::Precondition(_))));
        let bump = Basis1D::from_poly(cubic_bump_coefficients(ell), ell);
        let grav = BoundaryData {
            g0: bump.scaled(0.1),
            h0: bump.scaled(-0.2),
            vl: bump.scaled(0.3),
        };
        grav.check_compatibility(FieldCase::Gravitational, ell).unwrap();
    }
}
