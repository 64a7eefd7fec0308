//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain type was constructed with values violating its invariants.
    #[error("invalid {field}: {message}")]
    InvalidInput { field: &'static str, message: String },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: residual error {residual:.3e} after {panels} panels (tolerance {tolerance:.3e})")]
    QuadratureNonConvergent {
        residual: f64,
        tolerance: f64,
        panels: usize,
    },

    /// The pump profile vanishes on every slit-pair midpoint; the state
    /// coefficients cannot be normalized.
    #[error("degenerate pump: profile vanishes on all slit-pair midpoints")]
    DegeneratePump,

    /// Mixture weights must be non-negative and sum to one.
    #[error("mixture weights sum to {sum} (must be 1 within {tolerance})")]
    WeightSum { sum: f64, tolerance: f64 },

    #[error("weights and states differ in length: {weights} vs {states}")]
    WeightStateMismatch { weights: usize, states: usize },

    /// A state vector with (numerically) zero norm cannot be normalized.
    #[error("state vector has zero norm")]
    ZeroNormState,

    /// Detector-slit plan produces a singular or degenerate transform.
    #[error("degenerate slit plan: {0}")]
    DegeneratePlan(String),

    /// Mixing angle makes the closed-form inversion singular.
    #[error("ill-conditioned plan: |sin 2θ| = {sin_two_theta:.3e} is too small to invert")]
    IllConditionedPlan { sin_two_theta: f64 },

    /// A counts record with zero total cannot be normalized.
    #[error("insufficient data: total count is zero for setting {setting}")]
    ZeroTotalCounts { setting: String },

    /// Reconstruction requires all nine settings.
    #[error("missing measurement settings: {}", .0.join(", "))]
    MissingSettings(Vec<String>),

    /// Inputs to `assemble` are inconsistent beyond repair.
    #[error("inconsistent reconstruction input: trace {trace} deviates from 1 by more than {tolerance}")]
    InconsistentTrace { trace: f64, tolerance: f64 },

    /// Fidelity requires positive-semidefinite inputs.
    #[error("non-physical state (minimum eigenvalue {min_eigenvalue:.3e}); apply project_physical first")]
    NonPhysicalState { min_eigenvalue: f64 },

    /// A simulated probability distribution left the physical range.
    #[error("cannot simulate counts: outcome probability {probability:.3e} is negative beyond tolerance")]
    NegativeProbability { probability: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// Malformed data file (wrong schema, bad labels, shape mismatch).
    #[error("malformed data: {0}")]
    MalformedData(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            message: message.into(),
        }
    }
}
