use thiserror::Error;

/// Errors raised by the group, ball, solver and verifier layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group spec `{0}`: {1}")]
    InvalidFamily(String, String),

    #[error("family mismatch: {0} vs {1}")]
    FamilyMismatch(String, String),

    #[error("cannot parse element `{0}`: {1}")]
    ParseElement(String, String),

    #[error("invalid step distribution: {0}")]
    InvalidSteps(String),

    #[error("support is not strongly connected: inverse of generator `{0}` not found within depth {1}")]
    NotStronglyConnected(String, usize),

    #[error("ball size cap of {cap} vertices exceeded while building radius {radius_reached}")]
    SizeCap { cap: usize, radius_reached: usize },

    #[error("vertex `{0}` is not interior to the ball")]
    NotInterior(String),

    #[error("vertex `{0}` is not on the boundary of the ball")]
    NotBoundary(String),

    #[error("exact solve rejected: {interior} interior vertices exceeds threshold {threshold}")]
    ExactTooLarge { interior: usize, threshold: usize },

    #[error("singular system at pivot {0}")]
    Singular(usize),

    #[error("zero exit probability {0}")]
    ZeroExit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("set inclusion violated: {0}")]
    NotNested(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
