use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for digraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("loop at vertex {0} is not allowed in a strict digraph")]
    Loop(usize),

    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(usize, usize),

    #[error("arc ({0}, {1}) is not present in the digraph")]
    MissingArc(usize, usize),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("splice failed: {0}")]
    Splice(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("lemma violation: {0}")]
    LemmaViolation(String),

    #[error("move inapplicable: {0}")]
    MoveInapplicable(String),

    #[error("construction impossible: {0}")]
    ConstructionImpossible(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
