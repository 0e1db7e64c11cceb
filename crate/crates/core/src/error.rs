use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Matrix or vector dimensions do not fit together.
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("cell `{0}`: weight must be positive")]
    NonPositiveWeight(String),
    #[error("duplicate cell id `{0}`")]
    DuplicateCell(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    /// A numerical precondition failed beyond its tolerance.
    #[error("{what}: residual {residual:e} exceeds {threshold:e}")]
    Tolerance {
        what: String,
        residual: f64,
        threshold: f64,
    },
    #[error("seed basis is rank deficient (rank {rank} < {dim})")]
    RankDeficientSeed { rank: usize, dim: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Two objects live over different profiles, cell sets or dimensions.
    #[error("incompatible: {0}")]
    Incompatible(String),
}
