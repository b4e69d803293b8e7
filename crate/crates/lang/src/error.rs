use std::fmt;

use crate::syntax::Pos;

pub type Result<T, E = LangError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Scope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangError {
    pub kind: ErrorKind,
    pub pos: Pos,
    pub msg: String,
}

impl LangError {
    pub fn syntax(pos: Pos, msg: impl Into<String>) -> LangError {
        LangError { kind: ErrorKind::Syntax, pos, msg: msg.into() }
    }

    pub fn scope(pos: Pos, msg: impl Into<String>) -> LangError {
        LangError { kind: ErrorKind::Scope, pos, msg: msg.into() }
    }

    pub fn code(&self) -> &'static str {
        match self.kind {
            ErrorKind::Syntax => "E-SYNTAX",
            ErrorKind::Scope => "E-SCOPE",
        }
    }
}

impl fmt::Display for LangError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for LangError {}
