//! Interpretation of the surface language in the finite model: literal type
//! denotations, pointwise evaluation and semantic verification.

pub mod denote;
pub mod error;
pub mod eval;
pub mod model;
pub mod verify;

pub use denote::FAMILY_LIMIT;
pub use error::{InterpError, ModelError, Result};
pub use eval::{env_values, extend, lookup, KLEENE_LIMIT};
pub use model::{BaseDen, ConstDen, ModelEnv, PredDen};
pub use verify::{Certificate, ErasureMismatch, MuRefusal, Outcome, Witness};
