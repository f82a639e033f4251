use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("group is not transitive")]
    Intransitive,

    #[error("element outside the group: {0}")]
    NotInGroup(String),

    #[error("partition is not invariant under the group: {0}")]
    NotInvariant(String),

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("{what}: more than {cap} elements")]
    CapExceeded { what: String, cap: usize },

    #[error("degree {degree} exceeds the search cap {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },

    /// A theorem hypothesis fails for the given input; the construction does not apply.
    #[error("hypothesis violated: {hypothesis} ({theorem})")]
    Hypothesis { hypothesis: String, theorem: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The constructed data violates an axiom it is required to satisfy.
    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("vertex {0} lies on the boundary of the ball")]
    BoundaryVertex(String),
}

impl Error {
    pub fn cap(what: impl Into<String>, cap: usize) -> Self {
        Error::CapExceeded {
            what: what.into(),
            cap,
        }
    }

    pub fn hypothesis(hypothesis: impl Into<String>, theorem: impl Into<String>) -> Self {
        Error::Hypothesis {
            hypothesis: hypothesis.into(),
            theorem: theorem.into(),
        }
    }
}
