use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected: vertex `{0}` is unreachable from the first vertex")]
    DisconnectedGraph(String),

    #[error("cycle indices span a sublattice of Z^{dimension} (rank {rank}, nonunit divisor {divisor})")]
    IndexImageDeficient {
        dimension: usize,
        rank: usize,
        divisor: i64,
    },

    #[error("malformed edge: {0}")]
    MalformedEdge(String),

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("walk length {n} exceeds the enumeration cap {cap}")]
    LengthCapExceeded { n: usize, cap: usize },

    #[error("no matching cycle of length <= {cap}")]
    NotFoundWithinCap { cap: usize },

    #[error("cycle does not belong to the basis graph: {0}")]
    BasisMismatch(String),

    #[error("symbolic power exceeded the budget of {budget} monomial operations")]
    BudgetExceeded { budget: u64 },

    #[error("trace has imaginary residue {residual:e}")]
    NonRealTrace { residual: f64 },

    #[error("fiber matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("Fourier bound requires a nonzero index")]
    ZeroIndexRequested,

    #[error("p={p} and q={q} are not coprime (q must be positive)")]
    NotCoprime { p: i64, q: i64 },

    #[error("inequality violated: {0}")]
    InequalityViolated(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DisconnectedGraph(_)
                | Error::IndexImageDeficient { .. }
                | Error::MalformedEdge(_)
                | Error::MalformedGraph(_)
                | Error::NotCoprime { .. }
                | Error::InvalidArgument(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}
