use crate::geom::Vec3;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed text.
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    /// Well-formed text describing an invalid object.
    #[error("invalid {what}: {msg}")]
    Semantic { what: String, msg: String },

    #[error("fold error in net {net}: {msg}")]
    Fold { net: String, msg: String },

    #[error("no rigid motion places {piece}: {msg}")]
    NoSolution { piece: String, anchor: Option<String>, msg: String },

    #[error("placement of {piece} is ambiguous: {msg}")]
    Ambiguous { piece: String, msg: String },

    #[error("cannot glue: points {a} and {b} do not coincide")]
    NonCoincident { a: Box<Vec3>, b: Box<Vec3> },

    #[error("cannot glue: edge {a} - {b} would bound {faces} faces")]
    NonSurface { a: Box<Vec3>, b: Box<Vec3>, faces: usize },

    #[error("step {step}: {source}")]
    Step {
        step: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown piece {0}")]
    UnknownPiece(String),

    #[error("not a surface: {0}")]
    NotSurface(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("resolution: {0}")]
    Resolution(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn semantic(what: &str, msg: impl Into<String>) -> Self {
        Error::Semantic { what: what.to_string(), msg: msg.into() }
    }

    pub(crate) fn at_step(self, step: &str) -> Self {
        Error::Step { step: step.to_string(), source: Box::new(self) }
    }

    /// Strips step wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for errors caused by unparseable input rather than invalid geometry.
    pub fn is_syntax(&self) -> bool {
        matches!(self.root(), Error::Syntax { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
