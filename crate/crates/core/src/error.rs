use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KhError {
    #[error("unknown circle {0}")]
    UnknownCircle(u32),
    #[error("circle {0} given twice")]
    RepeatedCircle(u32),
    #[error("circle id {0} already in use")]
    CircleIdCollision(u32),
    #[error("odd number of boundary points: {0}")]
    OddBoundary(usize),
    #[error("malformed tangle: {0}")]
    Malformed(String),
    #[error("diagram is not planar: {0}")]
    NonPlanar(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("inner disks present")]
    InnerDisks,
    #[error("differential does not square to zero at {0}")]
    NotAComplex(String),
    #[error("bidegree mismatch: {0}")]
    Bidegree(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("step not applicable: {0}")]
    NotApplicable(String),
    #[error("movie steps do not compose: {0}")]
    NotComposable(String),
    #[error("not a module map: {0}")]
    NotModuleMap(String),
    #[error("not a neck: {0}")]
    NotANeck(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown selector {0}")]
    UnknownSelector(String),
}

pub type Result<T> = std::result::Result<T, KhError>;
