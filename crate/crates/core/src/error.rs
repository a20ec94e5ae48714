use thiserror::Error;

pub type Result<T, E = ZcError> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants fall into two families: domain/validation problems with the
/// input (see [`ZcError::is_numerical`]) and numerical failures of an
/// otherwise valid computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZcError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid waveform: {0}")]
    InvalidWave(String),

    #[error("waveform has zero norm")]
    ZeroNorm,

    #[error("slope discontinuity at x = {x} where psi = 0; no finite strength exists")]
    CuspAtNode { x: f64 },

    #[error("periodic boundary cannot be satisfied: {0}")]
    PeriodicInfeasible(String),

    #[error("wave has a node inside the well at x = {x}")]
    NodeInInterior { x: f64 },

    #[error("well is not tuned to a zero-curvature state (residual {residual:e})")]
    NotTuned { residual: f64 },

    #[error("spike at x = {position} is not on a grid node; {}", match .suggestion {
        Some(n) => format!("smallest compatible n_interior is {n}"),
        None => "no compatible grid size found".to_string(),
    })]
    SpikeOffGrid {
        position: f64,
        suggestion: Option<usize>,
    },

    #[error("root bracketing scan exhausted below E = {ceiling}")]
    BracketExhausted { ceiling: f64 },

    #[error("eigensolver failed: {0}")]
    EigenNonConvergence(String),

    #[error("quadrature did not converge (achieved error bound {bound:e})")]
    QuadratureNonConvergence { bound: f64 },
}

impl ZcError {
    /// Short stable identifier, used by the CLI in error messages.
    pub fn code(&self) -> &'static str {
        match self {
            ZcError::Domain(_) => "Domain",
            ZcError::InvalidWave(_) => "InvalidWave",
            ZcError::ZeroNorm => "ZeroNorm",
            ZcError::CuspAtNode { .. } => "CuspAtNode",
            ZcError::PeriodicInfeasible(_) => "PeriodicInfeasible",
            ZcError::NodeInInterior { .. } => "NodeInInterior",
            ZcError::NotTuned { .. } => "NotTuned",
            ZcError::SpikeOffGrid { .. } => "SpikeOffGrid",
            ZcError::BracketExhausted { .. } => "BracketExhausted",
            ZcError::EigenNonConvergence(_) => "EigenNonConvergence",
            ZcError::QuadratureNonConvergence { .. } => "QuadratureNonConvergence",
        }
    }

    /// True for failures of a numerical procedure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            ZcError::BracketExhausted { .. }
                | ZcError::EigenNonConvergence(_)
                | ZcError::QuadratureNonConvergence { .. }
        )
    }
}
