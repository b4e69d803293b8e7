use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reftc::{exit, run, Command, Format, RunConfig};
use reftc_checker::Layer;
use reftc_core::effect::{LiftingKind, MonadKind};

#[derive(Parser)]
#[command(name = "reftc", version, about = "Dependent refinement type checker over finite models")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Type check programs.
    Check(FileArgs),
    /// Check programs in the refinement layer and verify soundness in the model.
    Verify(FileArgs),
    /// Print the denotations of every definition.
    Dump(FileArgs),
    /// Run a categorical law suite exhaustively.
    Laws {
        /// ccompc, coprod, monad, eq3, conway, em or all
        #[arg(default_value = "all")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct FileArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = LayerArg::Refinement)]
    layer: LayerArg,
    /// Print full derivation trees.
    #[arg(long)]
    derivation: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    monad: Option<MonadArg>,
    #[arg(long, value_enum)]
    lifting: Option<LiftingArg>,
    /// Largest carrier enumerated by law suites.
    #[arg(long, default_value_t = 2)]
    bound: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayerArg {
    Underlying,
    Refinement,
}

#[derive(Clone, Copy, ValueEnum)]
enum MonadArg {
    None,
    Maybe,
    Powerset,
}

#[derive(Clone, Copy, ValueEnum)]
enum LiftingArg {
    Partial,
    Total,
    May,
    Must,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

fn config(cli: Cli) -> RunConfig {
    let (command, files, layer, derivations, common, suite) = match cli.command {
        Cmd::Check(a) => (Command::Check, a.files, a.layer, a.derivation, a.common, None),
        Cmd::Verify(a) => (Command::Verify, a.files, a.layer, a.derivation, a.common, None),
        Cmd::Dump(a) => (Command::Dump, a.files, a.layer, a.derivation, a.common, None),
        Cmd::Laws { suite, common } => (Command::Laws, Vec::new(), LayerArg::Refinement, false, common, Some(suite)),
    };
    let mut cfg = RunConfig::new(command);
    cfg.paths = files;
    cfg.layer = match layer {
        LayerArg::Underlying => Layer::Underlying,
        LayerArg::Refinement => Layer::Refinement,
    };
    cfg.derivations = derivations;
    cfg.suite = suite;
    cfg.bound = common.bound;
    cfg.format = match common.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    cfg.monad = common.monad.map(|m| match m {
        MonadArg::None => MonadKind::Identity,
        MonadArg::Maybe => MonadKind::Maybe,
        MonadArg::Powerset => MonadKind::Powerset,
    });
    cfg.lifting = common.lifting.map(|l| match l {
        LiftingArg::Partial => LiftingKind::Partial,
        LiftingArg::Total => LiftingKind::Total,
        LiftingArg::May => LiftingKind::May,
        LiftingArg::Must => LiftingKind::Must,
    });
    cfg
}

fn main() -> ExitCode {
    let cfg = config(Cli::parse());
    let (code, diags) = run(&cfg);
    for d in &diags {
        match cfg.format {
            Format::Text => println!("{}", d.text()),
            Format::Json => println!("{}", d.json()),
        }
    }
    if code != exit::OK {
        eprintln!("reftc: exit {code}");
    }
    ExitCode::from(code as u8)
}
