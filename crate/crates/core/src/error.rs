use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: loop arrow {vertex} -> {vertex} (digraphs have no loops)")]
    LoopArrow { line: usize, vertex: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a digraph morphism: arrow {tail} -> {head} maps to {image_tail} -> {image_head}")]
    NotAMorphism { tail: String, head: String, image_tail: String, image_head: String },

    #[error("step {index} of the homotopy is not a digraph morphism")]
    HomotopyStep { index: usize },

    #[error("boundary of boundary is nonzero in degree {degree} at basis element {label}")]
    BoundarySquare { degree: usize, label: String },

    #[error("chain map does not commute with boundaries in degree {degree}")]
    NotAChainMap { degree: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("digraph is not connected")]
    Disconnected,

    #[error("invalid group voltage: {0}")]
    Voltage(String),

    #[error("invalid group data: {0}")]
    Group(String),

    #[error("generating set does not generate the group")]
    NotGenerating,

    #[error("inconsistent fiber action along paths {first} and {second}")]
    InconsistentAction { first: String, second: String },

    #[error("not an l-covering: {0}")]
    NotCovering(String),

    #[error("lifting failed: {0}")]
    Lift(String),

    #[error("hypotheses violated: {0}")]
    Hypotheses(String),

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("not an inclusion of induced subdigraphs at step {0}")]
    NotInclusion(usize),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
