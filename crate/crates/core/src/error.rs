use thiserror::Error;

/// Failures raised by the fingertip, linkage and optimizer models.
///
/// The variant name leads every message so that callers (the CLI in
/// particular) can surface a stable identifier on the diagnostic stream.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("InvalidSection: {0}")]
    InvalidSection(String),

    #[error("DegenerateSection: modulus-weighted area is zero, neutral axis undefined")]
    DegenerateSection,

    #[error("InvalidScenario: {0}")]
    InvalidScenario(String),

    #[error("CurvatureMismatch: concave radius {r_env} m must exceed pulp radius {r_pulp} m")]
    CurvatureMismatch { r_pulp: f64, r_env: f64 },

    #[error("NonConvergence: {what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("InvalidGrid: {0}")]
    InvalidGrid(String),

    #[error("ModelInconsistency: {0}")]
    ModelInconsistency(String),

    #[error("InvalidGeometry: {0}")]
    InvalidGeometry(String),

    #[error("NoClosure: partial loop length {distance} m outside [{min}, {max}] m")]
    NoClosure { distance: f64, min: f64, max: f64 },

    #[error("DegenerateClosure: closing links are tangent (branches coincide)")]
    DegenerateClosure,

    #[error("Singularity: |sin(phi2 - phi3)| = {0:e} below tolerance")]
    Singularity(f64),

    #[error("EmptyWorkspace: no feasible configuration over the sampled input grid")]
    EmptyWorkspace,

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

impl ModelError {
    /// Stable variant identifier, e.g. `"CurvatureMismatch"`.
    pub fn name(&self) -> &'static str {
        match self {
            ModelError::InvalidSection(_) => "InvalidSection",
            ModelError::DegenerateSection => "DegenerateSection",
            ModelError::InvalidScenario(_) => "InvalidScenario",
            ModelError::CurvatureMismatch { .. } => "CurvatureMismatch",
            ModelError::NonConvergence { .. } => "NonConvergence",
            ModelError::InvalidGrid(_) => "InvalidGrid",
            ModelError::ModelInconsistency(_) => "ModelInconsistency",
            ModelError::InvalidGeometry(_) => "InvalidGeometry",
            ModelError::NoClosure { .. } => "NoClosure",
            ModelError::DegenerateClosure => "DegenerateClosure",
            ModelError::Singularity(_) => "Singularity",
            ModelError::EmptyWorkspace => "EmptyWorkspace",
            ModelError::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

pub type Result<T> = std::result::Result<T, ModelError>;
