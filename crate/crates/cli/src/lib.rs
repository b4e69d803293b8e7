//! Command-line front end: `check`, `verify`, `dump` and `laws`.

pub mod commands;
pub mod config;
pub mod diag;

pub use commands::{check_source, dump_source, load, render_witness, run, run_laws, verify_source, FileReport, Session};
pub use config::{exit, Command, Format, RunConfig};
pub use diag::{Diagnostic, Severity};
