//! Scalar functions of one variable written in a fixed basis: a polynomial
//! part plus cosine modes `cos(k*pi*x/period)`, `k >= 1`.
//!
//! All boundary data and coefficient profiles go through this type so that a
//! run is fully described by a finite list of numbers.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Basis1D {
    /// `poly[k]` multiplies `x^k`.
    pub poly: Vec<f64>,
    /// `cos[k-1]` multiplies `cos(k*pi*x/period)`.
    pub cos: Vec<f64>,
    pub period: f64,
}

impl Basis1D {
    pub fn zero(period: f64) -> Self {
        Self {
            poly: Vec::new(),
            cos: Vec::new(),
            period,
        }
    }

    pub fn constant(value: f64, period: f64) -> Self {
        Self {
            poly: vec![value],
            cos: Vec::new(),
            period,
        }
    }

    pub fn new(poly: Vec<f64>, cos: Vec<f64>, period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(LabError::InvalidInput(format!(
                "basis period must be positive, got {period}"
            )));
        }
        if poly.iter().chain(cos.iter()).any(|c| !c.is_finite()) {
            return Err(LabError::InvalidInput("non-finite basis coefficient".into()));
        }
        Ok(Self { poly, cos, period })
    }

    pub fn is_zero(&self) -> bool {
        self.poly.iter().chain(self.cos.iter()).all(|&c| c == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            poly: self.poly.iter().map(|c| c * factor).collect(),
            cos: self.cos.iter().map(|c| c * factor).collect(),
            period: self.period,
        }
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = period;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// `order`-th derivative at `x`.
    pub fn derivative(&self, x: f64, order: u32) -> f64 {
        let mut acc = 0.0;
        // Horner on the differentiated polynomial.
        let n = self.poly.len();
        if (order as usize) < n {
            for k in (order as usize..n).rev() {
                let mut c = self.poly[k];
                for m in 0..order as usize {
                    c *= (k - m) as f64;
                }
                acc = acc * x + c;
            }
        }
        for (idx, &c) in self.cos.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let omega = (idx + 1) as f64 * PI / self.period;
            let phase = omega * x;
            let scale = omega.powi(order as i32);
            let trig = match order % 4 {
                0 => phase.cos(),
                1 => -phase.sin(),
                2 => -phase.cos(),
                _ => phase.sin(),
            };
            acc += c * scale * trig;
        }
        acc
    }

    /// `int_0^x f(t) dt`, exact.
    pub fn integral_from_zero(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.poly.iter().enumerate().rev() {
            acc = acc * x + c / (k + 1) as f64;
        }
        acc *= x;
        for (idx, &c) in self.cos.iter().enumerate() {
            let omega = (idx + 1) as f64 * PI / self.period;
            acc += c * (omega * x).sin() / omega;
        }
        acc
    }

    /// Expands `prod (x - r)^m` style polynomials; used for compatible data.
    pub fn from_poly(poly: Vec<f64>, period: f64) -> Self {
        Self {
            poly,
            cos: Vec::new(),
            period,
        }
    }

    /// Parses `poly:a0,a1,... cos:c1,c2,...` (either part optional; `0` or an
    /// empty string means the zero function).
    pub fn parse(text: &str, period: f64) -> Result<Self> {
        let mut poly = Vec::new();
        let mut cos = Vec::new();
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "0" {
            return Basis1D::new(poly, cos, period);
        }
        for token in trimmed.split_whitespace() {
            let (kind, list) = token.split_once(':').ok_or_else(|| {
                LabError::InvalidInput(format!(
                    "expression term `{token}` must look like poly:a0,a1 or cos:c1,c2"
                ))
            })?;
            let values = list
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        LabError::InvalidInput(format!("bad number `{s}` in `{token}`"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match kind {
                "poly" => poly = values,
                "cos" => cos = values,
                other => {
                    return Err(LabError::InvalidInput(format!(
                        "unknown basis `{other}` (expected poly or cos)"
                    )))
                }
            }
        }
        Basis1D::new(poly, cos, period)
    }
}

impl fmt::Display for Basis1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| {
            v.iter()
                .map(|c| format!("{c:?}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        match (self.poly.is_empty(), self.cos.is_empty()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "poly:{}", join(&self.poly)),
            (true, false) => write!(f, "cos:{}", join(&self.cos)),
            (false, false) => write!(f, "poly:{} cos:{}", join(&self.poly), join(&self.cos)),
        }
    }
}

/// Coefficients of `(x (period - x))^3`, which vanishes with its first two
/// derivatives at both ends of `[0, period]`.
pub fn cubic_bump_coefficients(period: f64) -> Vec<f64> {
    // (x(l-x))^3 = x^3 (l-x)^3 = x^3 (l^3 - 3l^2 x + 3l x^2 - x^3)
    let l = period;
    vec![0.0, 0.0, 0.0, l * l * l, -3.0 * l * l, 3.0 * l, -1.0]
}
