use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge {edge} has non-positive length {length}")]
    NonPositiveLength { edge: usize, length: f64 },

    #[error("graph is not connected")]
    DisconnectedGraph,

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("inconsistent input arity: {0}")]
    ArityMismatch(String),

    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),

    #[error("bad fixture parameters: {0}")]
    ParamMismatch(String),

    #[error("spectral point too close to a pole of the M-matrix (mu distance {distance:.3e})")]
    PoleProximity { distance: f64 },

    #[error("infinite coupling at vertex {vertex} not admissible here")]
    InfiniteCoupling { vertex: usize },

    #[error("denominator magnitude {0:.3e} below threshold")]
    DivisionNearZero(f64),

    #[error("all-zero matching matrix; rank tolerance is meaningless")]
    RankTolDegenerate,

    #[error("mesh of {0} points per unit length is too coarse (minimum 16)")]
    MeshTooCoarse(usize),

    #[error("function evaluation budget exceeded during spectrum scan")]
    BudgetExceeded,

    #[error("multiset sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("graph mixes delta and delta-prime vertices; homogeneous type required")]
    MixedTypes,

    #[error("search space too large: {0} vertices (limit 8)")]
    SearchSpaceTooLarge(usize),

    #[error("graphs differ in {0}; same underlying marked graph required")]
    GraphMismatch(String),

    #[error("invalid graph file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
