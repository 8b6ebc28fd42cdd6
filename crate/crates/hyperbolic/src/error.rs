use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("({p},{q},{r}) is not hyperbolic: 1/{p} + 1/{q} + 1/{r} >= 1")]
    NotHyperbolic { p: u32, q: u32, r: u32 },
    #[error("invalid triangle spec: {0}")]
    InvalidSpec(String),
    #[error(
        "ambiguous identification at word {word}: nearest vertex is {distance:e} away (dedup_tol {tol:e}); \
         use a smaller radius or a tighter tolerance"
    )]
    DedupAmbiguity { word: String, distance: f64, tol: f64 },
    #[error("word {0} leaves the ball")]
    OutsideBall(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Core(#[from] cgt_core::Error),
}
