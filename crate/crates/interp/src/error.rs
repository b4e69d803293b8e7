use reftc_lang::Pos;
use thiserror::Error;

pub type Result<T, E = InterpError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InterpError {
    /// A name the model has no entry for.
    #[error("model incomplete: {0}")]
    ModelIncomplete(String),
    /// The phrase does not fit the model, which only happens for input the
    /// checker has not accepted.
    #[error("unchecked input: {0}")]
    Unchecked(String),
    #[error(transparent)]
    Core(#[from] reftc_core::Error),
}

/// A signature whose denotations do not form a model.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{msg}")]
pub struct ModelError {
    pub pos: Pos,
    pub msg: String,
}

impl ModelError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> ModelError {
        ModelError { pos, msg: msg.into() }
    }
}
