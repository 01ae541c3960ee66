//! One-dimensional background flow: fixed-step RK4 on
//! `rho' = rho E / (p'(rho) - J^2/rho^2)`, `E' = w rho - b`, `Phi' = E`,
//! `phi' = J/rho`.

use crate::basis::Basis1D;
use crate::error::{LabError, Result};
use crate::gas_model::PressureLaw;

/// Sign of the coupling weight `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldCase {
    /// `w > 0`: self-consistent electric field.
    Electric,
    /// `w < 0`: self-gravitating flow.
    Gravitational,
}

impl FieldCase {
    pub fn name(self) -> &'static str {
        match self {
            FieldCase::Electric => "electric",
            FieldCase::Gravitational => "gravitational",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DopingProfile {
    pub w: Basis1D,
    pub b: Basis1D,
    pub case: FieldCase,
    /// `min w` in the electric case, `max w` in the gravitational case.
    pub mu: f64,
    /// Sampled `sup |w'|` on `[0, L]`.
    pub wprime_sup: f64,
    pub length: f64,
}

const DOPING_SAMPLES: usize = 4001;

impl DopingProfile {
    /// Builds the profile and infers the case from the sign of `w`.
    pub fn new(w: Basis1D, b: Basis1D, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(LabError::InvalidInput(format!("nozzle length must be positive, got {length}")));
        }
        let (mut wmin, mut wmax, mut dsup) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for k in 0..DOPING_SAMPLES {
            let x = length * k as f64 / (DOPING_SAMPLES - 1) as f64;
            let v = w.eval(x);
            wmin = wmin.min(v);
            wmax = wmax.max(v);
            dsup = dsup.max(w.derivative(x, 1).abs());
        }
        let (case, mu) = if wmin > 0.0 {
            (FieldCase::Electric, wmin)
        } else if wmax < 0.0 {
            (FieldCase::Gravitational, wmax)
        } else {
            return Err(LabError::InvalidInput(format!(
                "w must be sign-definite on [0, L]: case 1 (electric) needs min w > 0, \
                 case 2 (gravitational) needs max w < 0; sampled range is [{wmin}, {wmax}]"
            )));
        };
        Ok(Self {
            w,
            b,
            case,
            mu,
            wprime_sup: dsup,
            length,
        })
    }

    /// As [`DopingProfile::new`] but fails if the sign of `w` does not match `case`.
    pub fn with_case(w: Basis1D, b: Basis1D, length: f64, case: FieldCase) -> Result<Self> {
        let d = Self::new(w, b, length)?;
        if d.case != case {
            let which = match case {
                FieldCase::Electric => "case 1 (electric) requires min w > 0",
                FieldCase::Gravitational => "case 2 (gravitational) requires max w < 0",
            };
            return Err(LabError::InvalidInput(format!("{which}, but w has the opposite sign")));
        }
        Ok(d)
    }

    /// `w = const`, `b = const`.
    pub fn constant(w: f64, b: f64, length: f64) -> Result<Self> {
        Self::new(Basis1D::constant(w, length), Basis1D::constant(b, length), length)
    }
}

/// Integration knobs for [`integrate_background`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundOptions {
    /// `Phi(0)`; only differences of the potential enter the equations.
    pub phi0: f64,
    /// RK4 steps per output interval.
    pub substeps: usize,
    /// Smallest admissible `p'(rho) - J^2/rho^2`.
    pub sonic_floor: f64,
}

impl Default for BackgroundOptions {
    fn default() -> Self {
        Self {
            phi0: 0.0,
            substeps: 1,
            sonic_floor: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BackgroundProfile {
    pub law: PressureLaw,
    pub length: f64,
    pub flux: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    /// `E = Phi'`.
    pub e: Vec<f64>,
    /// Electrostatic potential `Phi`.
    pub phi: Vec<f64>,
    pub u: Vec<f64>,
    /// Velocity potential `int_0^x u`.
    pub vel_potential: Vec<f64>,
    /// `u(0)^2/2 + i(rho(0)) - Phi(0)`.
    pub k0_potential: f64,
    /// `u(0)^2/2 + gamma rho(0)^(gamma-1)/(gamma-1) - Phi(0)`; polytropic `gamma > 1` only.
    pub k0_stream: Option<f64>,
    /// `min (p'(rho) - u^2)` over the nodes.
    pub subsonic_margin: f64,
}

fn check_denominator(law: &PressureLaw, j: f64, rho: f64, x: f64, floor: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(LabError::Vacuum {
            enthalpy: f64::NAN,
            limit: law.vacuum_limit().unwrap_or(f64::NEG_INFINITY),
        });
    }
    let d = law.dp(rho) - j * j / (rho * rho);
    if !(d >= floor) {
        return Err(LabError::SonicBreakdown { x1: x, margin: d });
    }
    Ok(d)
}

/// Integrates the background on `nsteps` equal intervals of `[0, L]`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_background(
    law: &PressureLaw,
    doping: &DopingProfile,
    flux: f64,
    rho0: f64,
    e0: f64,
    length: f64,
    nsteps: usize,
    opts: BackgroundOptions,
) -> Result<BackgroundProfile> {
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(LabError::Domain(format!("rho0 must be positive, got {rho0}")));
    }
    if !(flux.is_finite() && flux >= 0.0) {
        return Err(LabError::InvalidInput(format!("mass flux J must be non-negative, got {flux}")));
    }
    if nsteps == 0 || opts.substeps == 0 {
        return Err(LabError::InvalidInput("step counts must be positive".into()));
    }
    if !(length > 0.0) {
        return Err(LabError::InvalidInput(format!("nozzle length must be positive, got {length}")));
    }
    let floor = opts.sonic_floor;
    check_denominator(law, flux, rho0, 0.0, floor)?;

    let rhs = |x: f64, s: [f64; 4]| -> Result<[f64; 4]> {
        let d = check_denominator(law, flux, s[0], x, floor)?;
        Ok([
            s[0] * s[1] / d,
            doping.w.eval(x) * s[0] - doping.b.eval(x),
            s[1],
            flux / s[0],
        ])
    };

    let n = nsteps * opts.substeps;
    let h = length / n as f64;
    let mut state = [rho0, e0, opts.phi0, 0.0];
    let mut out = vec![state];
    for k in 0..n {
        let x = k as f64 * h;
        let k1 = rhs(x, state)?;
        let k2 = rhs(x + 0.5 * h, add(state, k1, 0.5 * h))?;
        let k3 = rhs(x + 0.5 * h, add(state, k2, 0.5 * h))?;
        let k4 = rhs(x + h, add(state, k3, h))?;
        for c in 0..4 {
            state[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        check_denominator(law, flux, state[0], x + h, floor)?;
        if (k + 1) % opts.substeps == 0 {
            out.push(state);
        }
    }

    let x: Vec<f64> = (0..=nsteps).map(|i| length * i as f64 / nsteps as f64).collect();
    let rho: Vec<f64> = out.iter().map(|s| s[0]).collect();
    let e = out.iter().map(|s| s[1]).collect();
    let phi = out.iter().map(|s| s[2]).collect();
    let vel_potential = out.iter().map(|s| s[3]).collect();
    BackgroundProfile::assemble(law.clone(), length, flux, x, rho, e, phi, vel_potential)
}

fn add(s: [f64; 4], k: [f64; 4], h: f64) -> [f64; 4] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2], s[3] + h * k[3]]
}

impl BackgroundProfile {
    /// Wraps externally computed arrays (all of equal length, uniform `x`).
    #[allow(clippy::too_many_arguments)]
    pub fn from_arrays(
        law: PressureLaw,
        flux: f64,
        x: Vec<f64>,
        rho: Vec<f64>,
        e: Vec<f64>,
        phi: Vec<f64>,
        vel_potential: Vec<f64>,
    ) -> Result<Self> {
        let n = x.len();
        if n < 2 || [rho.len(), e.len(), phi.len(), vel_potential.len()].iter().any(|&m| m != n) {
            return Err(LabError::InvalidInput("background arrays must share a length >= 2".into()));
        }
        if rho.iter().any(|&r| !(r > 0.0)) {
            return Err(LabError::InvalidInput("background density must be positive".into()));
        }
        let length = x[n - 1] - x[0];
        Self::assemble(law, length, flux, x, rho, e, phi, vel_potential)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        law: PressureLaw,
        length: f64,
        flux: f64,
        x: Vec<f64>,
        rho: Vec<f64>,
        e: Vec<f64>,
        phi: Vec<f64>,
        vel_potential: Vec<f64>,
    ) -> Result<Self> {
        let u: Vec<f64> = rho.iter().map(|r| flux / r).collect();
        let k0_potential = 0.5 * u[0] * u[0] + law.enthalpy(rho[0])? - phi[0];
        let k0_stream = match law.gamma() {
            Some(g) if g > 1.0 => Some(0.5 * u[0] * u[0] + g * rho[0].powf(g - 1.0) / (g - 1.0) - phi[0]),
            _ => None,
        };
        let subsonic_margin = rho
            .iter()
            .zip(&u)
            .map(|(&r, &v)| law.dp(r) - v * v)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            law,
            length,
            flux,
            x,
            rho,
            e,
            phi,
            u,
            vel_potential,
            k0_potential,
            k0_stream,
            subsonic_margin,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn mach_profile(&self) -> Vec<f64> {
        self.rho
            .iter()
            .zip(&self.u)
            .map(|(&r, &v)| v / self.law.dp(r).sqrt())
            .collect()
    }

    /// `u^2/2 + i(rho) - Phi` at each node; constant for an exact solution.
    pub fn bernoulli_values(&self) -> Result<Vec<f64>> {
        (0..self.len())
            .map(|k| Ok(0.5 * self.u[k] * self.u[k] + self.law.enthalpy(self.rho[k])? - self.phi[k]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(g: f64) -> PressureLaw {
        PressureLaw::polytropic(g).unwrap()
    }

    #[test]
    fn equilibrium_is_bitwise_constant() {
        let doping = DopingProfile::constant(1.3, 1.3 * 0.8, 1.0).unwrap();
        let bg = integrate_background(&law(2.0), &doping, 0.5, 0.8, 0.0, 1.0, 100, BackgroundOptions::default())
            .unwrap();
        assert!(bg.rho.iter().all(|&r| r == 0.8));
        assert!(bg.e.iter().all(|&e| e == 0.0));
        assert!(bg.phi.iter().all(|&p| p == 0.0));
        let u0 = bg.u[0];
        assert!(bg.u.iter().all(|&u| u == u0));
    }

    #[test]
    fn supersonic_start_breaks_down_at_inlet() {
        let doping = DopingProfile::constant(1.0, 0.0, 1.0).unwrap();
        let err = integrate_background(&law(2.0), &doping, 10.0, 1.0, 0.0, 1.0, 10, BackgroundOptions::default())
            .unwrap_err();
        match err {
            LabError::SonicBreakdown { x1, margin } => {
                assert_eq!(x1, 0.0);
                assert!((margin - (2.0 - 100.0)).abs() < 1e-12);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn flux_and_potential_consistency() {
        let doping = DopingProfile::constant(1.0, 0.0, 1.0).unwrap();
        let opts = BackgroundOptions {
            substeps: 8,
            ..Default::default()
        };
        let bg = integrate_background(&law(2.0), &doping, 0.5, 1.0, 0.1, 1.0, 50, opts).unwrap();
        for k in 0..bg.len() {
            assert!((bg.rho[k] * bg.u[k] - 0.5).abs() < 1e-12);
        }
        assert!(bg.subsonic_margin > 0.0);
        // Phi differences reproduce E (trapezoid, second order).
        let h = 1.0 / 50.0;
        for k in 0..50 {
            let d = (bg.phi[k + 1] - bg.phi[k]) / h;
            assert!((d - 0.5 * (bg.e[k] + bg.e[k + 1])).abs() < 1e-3);
        }
        let bern = bg.bernoulli_values().unwrap();
        for v in &bern {
            assert!((v - bg.k0_potential).abs() < 1e-10);
        }
        assert!((bg.k0_stream.unwrap() - bg.k0_potential - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let doping = DopingProfile::constant(1.0, 0.0, 1.0).unwrap();
        let run = |n: usize| {
            integrate_background(&law(2.0), &doping, 0.5, 1.0, 0.1, 1.0, n, BackgroundOptions::default()).unwrap()
        };
        let end = |p: &BackgroundProfile| (*p.rho.last().unwrap(), *p.e.last().unwrap());
        let reference = end(&run(10 * 64));
        let (r1, e1) = end(&run(10));
        let (r2, e2) = end(&run(20));
        let err1 = (r1 - reference.0).abs().max((e1 - reference.1).abs());
        let err2 = (r2 - reference.0).abs().max((e2 - reference.1).abs());
        let ratio = err1 / err2;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn mach_examples() {
        let x = vec![0.0, 0.5, 1.0];
        let bg = BackgroundProfile::from_arrays(law(2.0), 0.5, x.clone(), vec![1.0; 3], vec![0.0; 3], vec![0.0; 3], vec![0.0, 0.25, 0.5])
            .unwrap();
        for m in bg.mach_profile() {
            assert!((m - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        }
        let bg = BackgroundProfile::from_arrays(law(2.0), 1e-12, x, vec![1.0; 3], vec![0.0; 3], vec![0.0; 3], vec![0.0; 3])
            .unwrap();
        assert!(bg.mach_profile().iter().all(|&m| m < 1e-11));
    }

    #[test]
    fn doping_case_detection() {
        let l = 1.0;
        let w = Basis1D::parse("poly:1,-0.2", l).unwrap();
        let d = DopingProfile::new(w, Basis1D::zero(l), l).unwrap();
        assert_eq!(d.case, FieldCase::Electric);
        assert!((d.mu - 0.8).abs() < 1e-12);
        assert!((d.wprime_sup - 0.2).abs() < 1e-8);
        let w = Basis1D::parse("poly:-1,0.5", l).unwrap();
        let d = DopingProfile::new(w, Basis1D::zero(l), l).unwrap();
        assert_eq!(d.case, FieldCase::Gravitational);
        assert!((d.mu + 0.5).abs() < 1e-12);
        let w = Basis1D::parse("poly:-1,2", l).unwrap();
        let err = DopingProfile::new(w, Basis1D::zero(l), l).unwrap_err().to_string();
        assert!(err.contains("case 1") && err.contains("case 2"));
        let w = Basis1D::parse("poly:1", l).unwrap();
        assert!(DopingProfile::with_case(w, Basis1D::zero(l), l, FieldCase::Gravitational).is_err());
    }
}
