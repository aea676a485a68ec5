use thiserror::Error;

/// Errors surfaced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported lattice dimension {0} (supported: 1, 2)")]
    InvalidDimension(usize),

    #[error("{sites} sites cannot tile a {dimension}-dimensional lattice (need a perfect square for d = 2)")]
    BadSiteCount { sites: usize, dimension: usize },

    #[error("site index {site} out of range for {sites} sites")]
    InvalidSite { site: usize, sites: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("incompatible Fock bases (site count, cap, or sector differ)")]
    BasisMismatch,

    #[error("number sector {sector} out of range [0, {max}]")]
    SectorOutOfRange { sector: usize, max: usize },

    #[error("basis dimension {dim} exceeds the hard cap {cap}")]
    BasisTooLarge { dim: usize, cap: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("eigensolver failed to converge within {0} iterations")]
    NonConvergence(usize),

    #[error("expectation value carries imaginary part {0:.3e} beyond tolerance")]
    ImaginaryResidue(f64),

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    #[error("time grid must be uniform and strictly increasing")]
    BadTimeGrid,

    #[error("transform window tau = {tau} exceeds the trace end time {end}")]
    TauBeyondTrace { tau: f64, end: f64 },

    #[error("phase-diagram grids do not match: {0}")]
    GridMismatch(String),

    #[error("division by zero in cavity parameter map: {0}")]
    CavityDegenerate(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed data file {path}: {reason}")]
    Parse { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
