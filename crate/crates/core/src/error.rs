use thiserror::Error;

use crate::C64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site labels start at 1, got {0}")]
    ZeroSite(u64),

    #[error("argument must lie in the one-particle space, found vacuum amplitude {0}")]
    VacuumComponent(C64),

    #[error("gamma must lie in [0, 1], got {0}")]
    GammaOutOfRange(f64),

    #[error("invalid trace-class operator: {0}")]
    InvalidTraceClass(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid phi state: {0}")]
    InvalidPhi(String),

    #[error("moment of an empty word")]
    EmptyWord,

    #[error(
        "e_# is not an eigenvector of T (defect {defect:e}); \
         no conditional expectation onto the tail algebra preserves psi_T"
    )]
    NotExpected { defect: f64 },

    #[error("e_# is an eigenvector of T; psi_T is expected and admits no counterexample")]
    Expected,

    #[error("vacuum weight of T is 1; every F_phi preserves psi_T")]
    VacuumSaturated,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
