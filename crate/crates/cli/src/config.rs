use std::path::PathBuf;

use reftc_checker::Layer;
use reftc_core::effect::{LiftingKind, MonadKind, PredLifting};
use reftc_lang::Program;

/// Process exit codes, shared by every command.
pub mod exit {
    pub const OK: i32 = 0;
    /// Unreadable input, bad flags.
    pub const USAGE: i32 = 1;
    /// Ill-formed or ill-typed program, including refused recursion.
    pub const TYPE: i32 = 2;
    /// Syntax or scope error.
    pub const PARSE: i32 = 3;
    /// The model in the file is rejected.
    pub const MODEL: i32 = 4;
    /// Semantic verification or a law suite failed.
    pub const VERIFY: i32 = 5;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Verify,
    Dump,
    Laws,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub paths: Vec<PathBuf>,
    pub monad: Option<MonadKind>,
    pub lifting: Option<LiftingKind>,
    pub layer: Layer,
    pub bound: usize,
    pub format: Format,
    /// Print full derivation trees for `check`.
    pub derivations: bool,
    /// Law suite for `laws`; `None` runs all of them.
    pub suite: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        RunConfig {
            command,
            paths: Vec::new(),
            monad: None,
            lifting: None,
            layer: Layer::Refinement,
            bound: 2,
            format: Format::Text,
            derivations: false,
            suite: None,
        }
    }

    pub fn with_model(mut self, monad: MonadKind, lifting: LiftingKind) -> RunConfig {
        self.monad = Some(monad);
        self.lifting = Some(lifting);
        self
    }

    /// Flags win over the file's `(monad M L)` form; the fallback is the maybe
    /// monad with the partial-correctness lifting.
    pub fn model_for(&self, prog: &Program) -> Result<(MonadKind, LiftingKind), String> {
        let form = prog.monad_form();
        let file_monad = match form {
            Some((m, _)) => Some(MonadKind::parse(m).ok_or_else(|| format!("unknown monad `{m}`"))?),
            None => None,
        };
        let monad = self.monad.or(file_monad).unwrap_or(MonadKind::Maybe);
        let lifting = match (self.lifting, form) {
            (Some(l), _) => l,
            (None, Some((m, l))) if self.monad.is_none() || self.monad == MonadKind::parse(m) => {
                LiftingKind::parse(l).ok_or_else(|| format!("unknown lifting `{l}`"))?
            }
            _ => monad.default_lifting(),
        };
        PredLifting::new(monad, lifting).map_err(|e| e.to_string())?;
        Ok((monad, lifting))
    }
}
