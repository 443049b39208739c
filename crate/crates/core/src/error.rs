use thiserror::Error;

/// Errors produced by basis construction, operator assembly, propagation and
/// scenario handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("site {site} out of range 1..={length}")]
    SiteOutOfRange { site: usize, length: usize },

    #[error("empty sector: no configuration of {length} sites with 2S={two_s} has 2Sz_tot={two_sz_total}")]
    EmptySector {
        length: usize,
        two_s: u32,
        two_sz_total: i64,
    },

    #[error("capacity exceeded: {what} is {requested}, limit {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("basis mismatch: operands live on different bases")]
    BasisMismatch,

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
