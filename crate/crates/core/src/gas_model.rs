//! Barotropic pressure laws and the enthalpy `i(rho) = int_1^rho p'(s)/s ds`.

use std::fmt;
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::quadrature::adaptive_simpson;
use crate::roots::bracketed_newton;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied law given by evaluators for `p`, `p'` and `p''`.
///
/// The law is expected to be twice continuously differentiable on `(0, inf)`
/// with `p' > 0` and `p'' >= 0`; [`PressureLaw::check_invariants`] samples this.
#[derive(Clone)]
pub struct CustomLaw {
    pub p: ScalarFn,
    pub dp: ScalarFn,
    pub ddp: ScalarFn,
    /// Absolute tolerance of the enthalpy quadrature.
    pub quad_tol: f64,
    /// Relative tolerance of the enthalpy inversion.
    pub inv_tol: f64,
}

#[derive(Clone)]
pub enum PressureLaw {
    /// `p = rho^gamma`, `gamma >= 1`.
    Polytropic { gamma: f64 },
    Custom(CustomLaw),
}

impl fmt::Debug for PressureLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PressureLaw::Polytropic { gamma } => write!(f, "Polytropic {{ gamma: {gamma} }}"),
            PressureLaw::Custom(_) => write!(f, "Custom"),
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(LabError::Domain(format!("density must be positive and finite, got {rho}")))
    }
}

impl PressureLaw {
    pub fn polytropic(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(LabError::InvalidInput(format!(
                "adiabatic exponent must satisfy gamma >= 1, got {gamma}"
            )));
        }
        Ok(PressureLaw::Polytropic { gamma })
    }

    pub fn custom<P, D, DD>(p: P, dp: D, ddp: DD) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        DD: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        PressureLaw::Custom(CustomLaw {
            p: Arc::new(p),
            dp: Arc::new(dp),
            ddp: Arc::new(ddp),
            quad_tol: 1e-13,
            inv_tol: 1e-14,
        })
    }

    /// The exponent of a polytropic law.
    pub fn gamma(&self) -> Option<f64> {
        match self {
            PressureLaw::Polytropic { gamma } => Some(*gamma),
            PressureLaw::Custom(_) => None,
        }
    }

    pub fn p(&self, rho: f64) -> f64 {
        match self {
            PressureLaw::Polytropic { gamma } => rho.powf(*gamma),
            PressureLaw::Custom(c) => (c.p)(rho),
        }
    }

    pub fn dp(&self, rho: f64) -> f64 {
        match self {
            PressureLaw::Polytropic { gamma } => gamma * rho.powf(gamma - 1.0),
            PressureLaw::Custom(c) => (c.dp)(rho),
        }
    }

    pub fn ddp(&self, rho: f64) -> f64 {
        match self {
            PressureLaw::Polytropic { gamma } => {
                if *gamma == 1.0 {
                    0.0
                } else {
                    gamma * (gamma - 1.0) * rho.powf(gamma - 2.0)
                }
            }
            PressureLaw::Custom(c) => (c.ddp)(rho),
        }
    }

    /// `lim_{rho -> 0+} i(rho)`, or `None` when the enthalpy is unbounded below.
    ///
    /// Custom laws report `None` here; their inversion detects vacuum by
    /// failing to bracket the root.
    pub fn vacuum_limit(&self) -> Option<f64> {
        match self {
            PressureLaw::Polytropic { gamma } if *gamma > 1.0 => Some(-gamma / (gamma - 1.0)),
            _ => None,
        }
    }

    pub fn enthalpy(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(match self {
            PressureLaw::Polytropic { gamma } => {
                if *gamma == 1.0 {
                    rho.ln()
                } else {
                    gamma / (gamma - 1.0) * ((gamma - 1.0) * rho.ln()).exp_m1()
                }
            }
            PressureLaw::Custom(c) => {
                // ds/s = d(ln s): integrate p'(e^t) over [0, ln rho].
                let dp = &c.dp;
                adaptive_simpson(&|t: f64| dp(t.exp()), 0.0, rho.ln(), c.quad_tol)
            }
        })
    }

    /// `i'(rho) = p'(rho)/rho`.
    pub fn enthalpy_derivative(&self, rho: f64) -> f64 {
        self.dp(rho) / rho
    }

    pub fn enthalpy_inverse(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(LabError::Domain(format!("enthalpy value must be finite, got {s}")));
        }
        match self {
            PressureLaw::Polytropic { gamma } => {
                if *gamma == 1.0 {
                    let rho = s.exp();
                    if rho > 0.0 {
                        return Ok(rho);
                    }
                    return Err(LabError::Vacuum {
                        enthalpy: s,
                        limit: f64::NEG_INFINITY,
                    });
                }
                let g1 = gamma - 1.0;
                let limit = -gamma / g1;
                let arg = s * g1 / gamma;
                if s <= limit || arg <= -1.0 {
                    return Err(LabError::Vacuum { enthalpy: s, limit });
                }
                let rho = (arg.ln_1p() / g1).exp();
                if rho > 0.0 && rho.is_finite() {
                    Ok(rho)
                } else {
                    Err(LabError::Vacuum { enthalpy: s, limit })
                }
            }
            PressureLaw::Custom(c) => self.custom_inverse(c, s),
        }
    }

    fn custom_inverse(&self, c: &CustomLaw, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(1.0);
        }
        let i = |rho: f64| self.enthalpy(rho).unwrap_or(f64::NAN);
        let (mut lo, mut hi) = (1.0, 1.0);
        if s > 0.0 {
            while i(hi) < s {
                lo = hi;
                hi *= 2.0;
                if !hi.is_finite() || hi > 1e300 {
                    return Err(LabError::Domain(format!(
                        "enthalpy value {s} exceeds the range of the pressure law"
                    )));
                }
            }
        } else {
            loop {
                let v = i(lo);
                if v <= s {
                    break;
                }
                hi = lo;
                lo *= 0.5;
                if lo < 1e-300 {
                    return Err(LabError::Vacuum {
                        enthalpy: s,
                        limit: v,
                    });
                }
            }
        }
        let f = |rho: f64| (i(rho) - s, self.enthalpy_derivative(rho));
        bracketed_newton(f, lo, hi, 1e-3 * lo, c.inv_tol).ok_or_else(|| {
            LabError::Domain(format!("enthalpy inversion failed to bracket s = {s}"))
        })
    }

    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(self.dp(rho).sqrt())
    }

    /// `d/drho (rho p''/p')`; non-positive values satisfy the convexity
    /// hypothesis used for uniqueness.
    pub fn uniqueness_condition_residual(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        match self {
            // rho p''/p' = gamma - 1 is constant.
            PressureLaw::Polytropic { .. } => Ok(0.0),
            PressureLaw::Custom(_) => {
                let g = |r: f64| r * self.ddp(r) / self.dp(r);
                let h = 1e-6 * rho;
                Ok((g(rho + h) - g(rho - h)) / (2.0 * h))
            }
        }
    }

    /// Samples the law on a log grid in `[1e-6, 1e6]` and checks `p(0+) = 0`,
    /// growth to infinity, `p' > 0` and `p'' >= 0`.
    pub fn check_invariants(&self) -> Result<()> {
        let n = 121;
        let mut prev = f64::NEG_INFINITY;
        for k in 0..n {
            let rho = 10f64.powf(-6.0 + 12.0 * k as f64 / (n - 1) as f64);
            let (p, dp, ddp) = (self.p(rho), self.dp(rho), self.ddp(rho));
            if !(dp > 0.0) {
                return Err(LabError::InvalidInput(format!("p'({rho:e}) = {dp:e} is not positive")));
            }
            if ddp < -1e-12 * dp.abs().max(1.0) {
                return Err(LabError::InvalidInput(format!("p''({rho:e}) = {ddp:e} is negative")));
            }
            if !(p > prev) {
                return Err(LabError::InvalidInput(format!("p is not increasing at rho = {rho:e}")));
            }
            prev = p;
        }
        let tiny = self.p(1e-12).abs();
        let huge = self.p(1e12);
        if tiny > 1e-6 || huge < 1e6 {
            return Err(LabError::InvalidInput(
                "pressure law must vanish at 0 and grow without bound".into(),
            ));
        }
        Ok(())
    }
}
