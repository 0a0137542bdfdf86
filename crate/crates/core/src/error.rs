use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid packing: {0}")]
    InvalidPacking(String),

    #[error("copies {first} and {second} share edge ({}, {})", edge.0, edge.1)]
    EdgeClash {
        first: usize,
        second: usize,
        edge: (usize, usize),
    },

    /// A size guard refused to run an exhaustive routine.
    #[error("{guard} guard exceeded: {actual} > {limit}")]
    Guard {
        guard: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate weights: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn guard(guard: &'static str, limit: usize, actual: usize) -> Self {
        Error::Guard {
            guard,
            limit,
            actual,
        }
    }
}
