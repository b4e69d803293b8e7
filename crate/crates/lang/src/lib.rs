//! Surface language: syntax tree, reader, parser, printer, substitution and
//! the refinement-erasure map.

pub mod error;
pub mod ops;
pub mod parse;
pub mod print;
pub mod sexp;
pub mod syntax;

pub use error::{ErrorKind, LangError};
pub use ops::{alpha_eq, Erase, Syntax};
pub use parse::{parse_program, Scope};
pub use syntax::*;
