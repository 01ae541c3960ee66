//! Finite-volume discretization of the perturbation equations about the
//! one-dimensional background, with Picard and Newton solvers.
//!
//! Unknowns are the perturbations `U` (of `phi` or `psi`) and `V` (of `Phi`)
//! at the `(nx + 1) x (ny + 1)` grid nodes. Each node owns a control volume
//! (halved on the boundary); the `U` equation balances face fluxes of the
//! flux `A` and the `V` equation is a five-point Poisson balance.

pub mod assembly;
pub mod boundary;
pub mod coercivity;
pub mod grid;
pub mod linalg;
pub mod picard;
pub mod remainders;

use crate::background::{BackgroundProfile, DopingProfile};
use crate::coefficients::Jacobians;
use crate::error::{LabError, Result};
use crate::gas_model::PressureLaw;
use crate::potential::{self, PotentialPoint};
use crate::stream::{self, StreamPoint};

pub use assembly::{assemble_linear_system, solve_linear, Discretization, LinearOperator, LinearSystem, Sources};
pub use boundary::BoundaryData;
pub use coercivity::{coercivity_probe, CoercivityReport};
pub use grid::{Field2D, NozzleGrid};
pub use picard::{
    newton_solve, picard_solve, picard_solve_from, InitialGuess, IterationReport, PicardConfig, SolutionState,
};
pub use remainders::{remainder_at, taylor_remainders, Remainders};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Unknowns `(phi, Phi)` with `u = grad phi`.
    Potential,
    /// Unknowns `(psi, Phi)` with `rho u = (d2 psi, -d1 psi)`.
    Stream,
}

impl Formulation {
    /// Sign in front of `(1/w) Laplacian` in the field equation.
    pub fn sign(self) -> f64 {
        match self {
            Formulation::Potential => 1.0,
            Formulation::Stream => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Potential => "potential",
            Formulation::Stream => "stream",
        }
    }
}

/// Constitutive relations `(z, q) -> (A, B)` of one formulation.
#[derive(Debug, Clone)]
pub enum Thermo {
    Potential { law: PressureLaw, k0: f64 },
    Stream { gamma: f64, k0: f64, floor: f64 },
}

impl Thermo {
    pub fn for_problem(formulation: Formulation, background: &BackgroundProfile) -> Result<Self> {
        match formulation {
            Formulation::Potential => Ok(Thermo::Potential {
                law: background.law.clone(),
                k0: background.k0_potential,
            }),
            Formulation::Stream => {
                let gamma = background.law.gamma().filter(|&g| g > 1.0).ok_or_else(|| {
                    LabError::Unsupported("stream formulation needs a polytropic law with gamma > 1".into())
                })?;
                Ok(Thermo::Stream {
                    gamma,
                    k0: background.k0_stream.expect("polytropic gamma > 1 has k0"),
                    floor: stream::DEFAULT_DEGENERACY_FLOOR,
                })
            }
        }
    }

    pub fn density(&self, z: f64, q: [f64; 2]) -> Result<f64> {
        match self {
            Thermo::Potential { law, k0 } => potential::density(law, &PotentialPoint::new(z, q, *k0)),
            Thermo::Stream { gamma, k0, .. } => stream::density(&StreamPoint::new(z, q, *k0, *gamma)),
        }
    }

    pub fn flux_source(&self, z: f64, q: [f64; 2]) -> Result<([f64; 2], f64)> {
        match self {
            Thermo::Potential { law, k0 } => potential::flux_and_source(law, &PotentialPoint::new(z, q, *k0)),
            Thermo::Stream { gamma, k0, .. } => stream::flux_and_source(&StreamPoint::new(z, q, *k0, *gamma)),
        }
    }

    pub fn jacobians(&self, z: f64, q: [f64; 2]) -> Result<Jacobians> {
        match self {
            Thermo::Potential { law, k0 } => potential::jacobians(law, &PotentialPoint::new(z, q, *k0)),
            Thermo::Stream { gamma, k0, floor } => {
                stream::stream_jacobians(&StreamPoint::new(z, q, *k0, *gamma), *floor)
            }
        }
    }

    /// Subsonic margin (potential) or lambda margin (stream).
    pub fn margin(&self, z: f64, q: [f64; 2]) -> Result<f64> {
        match self {
            Thermo::Potential { law, k0 } => potential::subsonic_margin(law, &PotentialPoint::new(z, q, *k0)),
            Thermo::Stream { gamma, k0, .. } => stream::lambda_margin(&StreamPoint::new(z, q, *k0, *gamma)),
        }
    }

    /// `p'(rho)`.
    pub fn sound_speed_sq(&self, rho: f64) -> f64 {
        match self {
            Thermo::Potential { law, .. } => law.dp(rho),
            Thermo::Stream { gamma, .. } => gamma * rho.powf(gamma - 1.0),
        }
    }

    /// Potential value `z` at which the background state with density `rho`
    /// and gradient `q` satisfies the Bernoulli relation exactly.
    pub fn bernoulli_potential(&self, rho: f64, q: [f64; 2]) -> Result<f64> {
        let q2 = q[0] * q[0] + q[1] * q[1];
        match self {
            Thermo::Potential { law, k0 } => Ok(law.enthalpy(rho)? + 0.5 * q2 - k0),
            Thermo::Stream { gamma, k0, .. } => Ok(stream::bernoulli(*gamma, rho, q2) - k0),
        }
    }
}

/// Everything that defines one nozzle problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub formulation: Formulation,
    pub grid: NozzleGrid,
    pub background: BackgroundProfile,
    pub doping: DopingProfile,
    pub boundary: BoundaryData,
}

impl Problem {
    pub fn new(
        formulation: Formulation,
        grid: NozzleGrid,
        background: BackgroundProfile,
        doping: DopingProfile,
        boundary: BoundaryData,
    ) -> Result<Self> {
        if background.len() != grid.nx + 1 {
            return Err(LabError::InvalidInput(format!(
                "background has {} nodes but the grid needs nx + 1 = {}",
                background.len(),
                grid.nx + 1
            )));
        }
        if (background.length - grid.length).abs() > 1e-12 * grid.length {
            return Err(LabError::InvalidInput("background and grid lengths differ".into()));
        }
        Ok(Self {
            formulation,
            grid,
            background,
            doping,
            boundary,
        })
    }
}
