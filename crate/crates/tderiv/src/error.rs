//! Library errors. Input problems (bad dims, parse failures, violated
//! preconditions) are kept strictly separate from theorem violations: the
//! latter mean a certified instance failed a check that the theory says
//! cannot fail, and they carry a serializable reproduction bundle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Everything needed to replay a theorem violation offline: the nest, the
/// coefficient field, the seed/trial that produced the maps, and the maps
/// themselves in wire form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationBundle {
    pub context: String,
    pub nest: Vec<usize>,
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<serde_json::Value>,
    pub detail: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid nest: {0}")]
    InvalidNest(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix entry at row {row}, col {col} lies outside the algebra")]
    Membership { row: usize, col: usize },

    #[error("operands belong to different algebras")]
    AlgebraMismatch,

    #[error("pair {index} is not a zero-product pair")]
    NotZeroProduct { index: usize },

    #[error("displacement identity fails at basis unit {unit}")]
    DisplacementMismatch { unit: usize },

    #[error("not a ternary derivation: product identity fails at unit pair ({i}, {j})")]
    NotTernary { i: usize, j: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("theorem violation: {}", .0.detail)]
    TheoremViolation(Box<ViolationBundle>),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::TheoremViolation(_) => 3,
            _ => 2,
        }
    }

    pub fn violation(bundle: ViolationBundle) -> Self {
        Error::TheoremViolation(Box::new(bundle))
    }
}
