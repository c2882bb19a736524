use thiserror::Error;

use crate::ops::OperatorId;
use crate::syntax::Language;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{language} syntax error at line {line}, column {column}")]
    Syntax {
        language: Language,
        line: usize,
        column: usize,
    },
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator {op} is not supported for {language}")]
    UnsupportedOperator { op: OperatorId, language: Language },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("malformed synonym lexicon at line {line}: {reason}")]
    Lexicon { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
