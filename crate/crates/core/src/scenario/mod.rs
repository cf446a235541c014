//! Scenario configuration, the built-in registry and reproducible runs.

pub mod builtin;
pub mod config;
pub mod curves;
pub mod fields;
pub mod output;
mod run;

pub use builtin::{builtin, BUILTINS};
pub use config::{Kind, Params, ScenarioConfig};
pub use output::{Artifact, Format, Manifest, Table};
pub use run::{run, RunOptions, RunOutput};

use thiserror::Error;

use crate::curve::CurveError;
use crate::interaction::InteractionError;
use crate::particles::ParticleError;
use crate::singularity::SingularityError;
use crate::smooth_flow::FlowError;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("admissibility violated: {0}")]
    Violation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn config(path: &str, message: impl Into<String>) -> Self {
        RunError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } => 2,
            RunError::Numerical(_) => 3,
            RunError::Violation(_) => 4,
            RunError::Io(_) => 1,
        }
    }
}

impl From<CurveError> for RunError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::NegativeAmbientDensity { .. } => RunError::Violation(e.to_string()),
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

impl From<InteractionError> for RunError {
    fn from(e: InteractionError) -> Self {
        match e {
            InteractionError::Curve(c) => c.into(),
            InteractionError::NewtonFailed { .. } => RunError::Numerical(e.to_string()),
            InteractionError::Invalid(m) => RunError::config("params", m),
            _ => RunError::Violation(e.to_string()),
        }
    }
}

impl From<FlowError> for RunError {
    fn from(e: FlowError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<SingularityError> for RunError {
    fn from(e: SingularityError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<ParticleError> for RunError {
    fn from(e: ParticleError) -> Self {
        RunError::config("params.system", e.to_string())
    }
}
