use thiserror::Error;

use crate::netmodel::Flow;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid instance at {location}: {message}")]
    Invalid { location: String, message: String },

    #[error("infeasible flow: {0}")]
    Infeasible(String),

    #[error("unknown {kind} `{id}`")]
    Lookup { kind: &'static str, id: String },

    #[error("invalid parameter {name}: {message}")]
    Parameter { name: &'static str, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("latency class error: {0}")]
    LatencyClass(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("non-monotone cost on edge `{edge}` (class {class}) near f = {at}")]
    NonMonotone { edge: String, class: usize, at: f64 },

    #[error(
        "solver did not converge after {} iterations (gap {:e})",
        .0.iterations,
        .0.gap
    )]
    Convergence(Box<ConvergenceFailure>),

    #[error("degenerate instance: {0}")]
    Degenerate(String),
}

/// Best iterate of a solve that ran out of iterations.
#[derive(Debug, Clone)]
pub struct ConvergenceFailure {
    pub iterations: usize,
    pub gap: f64,
    pub gap_trace: Vec<f64>,
    pub best_flow: Flow,
    pub best_class_flows: Vec<Flow>,
}

impl Error {
    pub(crate) fn invalid(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parameter(name: &'static str, message: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            message: message.into(),
        }
    }
}
