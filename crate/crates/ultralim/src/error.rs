use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point not in space: {0}")]
    PointNotInSpace(String),
    #[error("point not in domain: {0}")]
    NotInDomain(String),
    #[error("point not in branch image: {0}")]
    NotInImage(String),
    #[error("infinite return time for {0}")]
    InfiniteReturnTime(String),
    #[error("zero word not in domain")]
    ZeroWordNotInDomain,
    #[error("word length below two")]
    LengthBelowTwo,
    #[error("malformed sequence: {0}")]
    MalformedSequence(String),
    #[error("unsupported system: {0}")]
    UnsupportedSystem(String),
    #[error("rho too large: {0}")]
    RhoTooLarge(String),
    #[error("depth too small: {0}")]
    DepthTooSmall(String),
    #[error("ball escapes branch image: {0}")]
    BallEscapesImage(String),
    #[error("orbit leaves domain at step {0}")]
    OrbitLeavesDomain(usize),
    #[error("invalid pseudo-orbit: {0}")]
    InvalidPseudoOrbit(String),
    #[error("invalid backward path: {0}")]
    InvalidBackwardPath(String),
    #[error("not a limit word for this system: {0}")]
    NotALimitWord(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
