use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QmutError {
    #[error("denominator {required} does not divide ambient order {ambient}")]
    IncompatibleAmbient { ambient: u32, required: u32 },
    #[error("invalid angle label {num}/{den}")]
    InvalidLabel { num: i64, den: i64 },
    #[error("vertex {vertex} out of range for rank {rank}")]
    VertexOutOfRange { vertex: usize, rank: usize },
    #[error("empty vertex set")]
    EmptyVertexSet,
    #[error("rank {rank} exceeds the canonical-form bound {bound}")]
    RankTooLarge { rank: usize, bound: usize },
    #[error("matrix is not skew-symmetric with zero diagonal")]
    NotSkewSymmetric,
    #[error("Gram matrix must be symmetric with diagonal entries 2")]
    NotGram,
    #[error("expected rank {expected}, got {got}")]
    WrongRank { expected: usize, got: usize },
    #[error("arrow {i}->{j} has a weight that is not of the form 2cos(pi m/d)")]
    NotLabelValued { i: usize, j: usize },
    #[error("standard form violates its family conditions: {0}")]
    ConditionViolation(String),
    #[error("odd-denominator families have no vanishing arrows")]
    OddFamily,
    #[error("quiver has none of the shapes with a direct initial realization")]
    NoRealizationShape,
    #[error("realization is not compatible with the quiver at ({i}, {j})")]
    Incompatible { i: usize, j: usize },
    #[error("operation requires a finite mutation class")]
    NotFinite,
    #[error("search budget of {0} quivers exhausted")]
    BudgetExhausted(usize),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T, E = QmutError> = std::result::Result<T, E>;
