use thiserror::Error;

/// Errors raised by the lab. Variants are grouped into families (see
/// [`LabError::family`]) so front ends can map them onto exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("vacuum: enthalpy value {enthalpy} is at or below the vacuum limit {limit}")]
    Vacuum { enthalpy: f64, limit: f64 },

    #[error("sonic breakdown at x1 = {x1}: p'(rho) - J^2/rho^2 = {margin:e}")]
    SonicBreakdown { x1: f64, margin: f64 },

    #[error("no subsonic root: lambda margin {margin:e} is not positive")]
    NoSubsonicRoot { margin: f64 },

    #[error("sonic degeneracy: gamma*rho^(gamma+1) - |q|^2 = {denominator:e}")]
    SonicDegeneracy { denominator: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inadmissible state at (x1, x2) = ({x1}, {x2}): {source}")]
    Inadmissible {
        x1: f64,
        x2: f64,
        #[source]
        source: Box<LabError>,
    },

    #[error("segment leaves the admissible set at t = {t}, (x1, x2) = ({x1}, {x2}): margin {margin:e}")]
    SegmentInadmissible { t: f64, x1: f64, x2: f64, margin: f64 },
    #[error("assembly failed at (x1, x2) = ({x1}, {x2}): {reason}")]
    Assembly { x1: f64, x2: f64, reason: String },

    #[error("linear solver breakdown: {0}")]
    LinearSolver(String),

    #[error("iteration diverged after {iterations} iterations (last update {last_update:e})")]
    Divergence { iterations: usize, last_update: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Coarse grouping of [`LabError`] variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFamily {
    Input,
    Admissibility,
    Sonic,
    Solver,
    Divergence,
}

impl LabError {
    pub fn family(&self) -> ErrorFamily {
        match self {
            LabError::Domain(_)
            | LabError::InvalidInput(_)
            | LabError::Precondition(_)
            | LabError::Unsupported(_) => ErrorFamily::Input,
            LabError::Vacuum { .. } | LabError::NoSubsonicRoot { .. } | LabError::SegmentInadmissible { .. } => {
                ErrorFamily::Admissibility
            }
            LabError::Inadmissible { source, .. } => source.family(),
            LabError::SonicBreakdown { .. } | LabError::SonicDegeneracy { .. } => ErrorFamily::Sonic,
            LabError::Assembly { .. } | LabError::LinearSolver(_) => ErrorFamily::Solver,
            LabError::Divergence { .. } => ErrorFamily::Divergence,
        }
    }

    pub(crate) fn at(self, x1: f64, x2: f64) -> LabError {
        match self {
            e @ LabError::Inadmissible { .. } => e,
            e => LabError::Inadmissible {
                x1,
                x2,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
