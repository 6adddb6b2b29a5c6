use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layer subset: {0}")]
    InvalidSubset(String),
    #[error("unknown motif: {0}")]
    UnknownMotif(String),
    #[error("invalid motif: {0}")]
    InvalidMotif(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("infeasible model: {0}")]
    Infeasible(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate pool: {0}")]
    DegeneratePool(String),
    #[error("insufficient replicates: need at least 100, got {0}")]
    InsufficientReplicates(usize),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
