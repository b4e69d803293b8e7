//! The four commands, each producing findings and an exit code per file.

use std::path::Path;

use reftc_checker::{check_program, check_signature, render_env, CheckError, Layer, ProgramReport, Signature};
use reftc_core::laws::{run_suite, Suite};
use reftc_core::Atom;
use reftc_interp::{Certificate, ModelEnv, Outcome};
use reftc_lang::print;
use reftc_lang::{parse_program, Context, Item, Pos, Program, Type};
use serde_json::json;

use crate::config::{exit, RunConfig};
use crate::diag::Diagnostic;

/// A program together with its signature and model.
pub struct Session {
    pub program: Program,
    pub sig: Signature,
    pub model: ModelEnv,
}

/// Findings for one input and the exit code they imply.
#[derive(Clone, Debug, Default)]
pub struct FileReport {
    pub exit: i32,
    pub diagnostics: Vec<Diagnostic>,
    pub check: Option<ProgramReport>,
    /// Certificates of `verify`, by definition name.
    pub certificates: Vec<(String, Certificate)>,
}

impl FileReport {
    fn fail(exit: i32, d: Diagnostic) -> FileReport {
        FileReport { exit, diagnostics: vec![d], ..FileReport::default() }
    }

    fn raise(&mut self, code: i32) {
        self.exit = self.exit.max(code);
    }
}

/// Parses `src`, loads its model and checks the signature.
pub fn load(file: &str, src: &str, cfg: &RunConfig, layer: Layer) -> Result<Session, FileReport> {
    let program = parse_program(src)
        .map_err(|e| FileReport::fail(exit::PARSE, Diagnostic::error(file, e.pos, e.code(), e.msg.clone())))?;
    let (monad, lifting) = cfg
        .model_for(&program)
        .map_err(|m| FileReport::fail(exit::USAGE, Diagnostic::error(file, Pos::default(), "E-CONFIG", m)))?;
    let model = ModelEnv::load(&program, monad, lifting)
        .map_err(|e| FileReport::fail(exit::MODEL, Diagnostic::error(file, e.pos, "E-MODEL", e.msg.clone())))?;
    let sig = Signature::of_program(&program);
    check_signature(&program, &sig, &model, layer).map_err(|e| FileReport::fail(exit::TYPE, check_diag(file, &e)))?;
    model
        .validate_constants()
        .map_err(|e| FileReport::fail(exit::MODEL, Diagnostic::error(file, e.pos, "E-MODEL", e.msg.clone())))?;
    Ok(Session { program, sig, model })
}

fn check_diag(file: &str, e: &CheckError) -> Diagnostic {
    Diagnostic::error(file, e.pos, e.code, e.msg.clone())
}

fn rules_used(d: &reftc_checker::Derivation) -> String {
    let mut rules: Vec<&str> = d.nodes().iter().map(|n| n.rule).collect();
    rules.sort_unstable();
    rules.dedup();
    rules.join(", ")
}

fn run_checker(file: &str, s: &Session, layer: Layer, derivations: bool, out: &mut FileReport) -> bool {
    let report = check_program(&s.program, &s.sig, &s.model, layer);
    for item in &report.items {
        match &item.outcome {
            Ok(d) => {
                out.diagnostics.push(
                    Diagnostic::info(file, item.pos, "OK", format!("{} is derivable in the {layer} layer", item.name))
                        .with_data(json!({ "rules": rules_used(d) })),
                );
                out.diagnostics.push(Diagnostic::note(file, item.pos, "RULES", rules_used(d)));
                if derivations {
                    for line in d.render().lines() {
                        out.diagnostics.push(Diagnostic::note(file, item.pos, "DERIV", line));
                    }
                }
            }
            Err(e) => {
                out.diagnostics.push(check_diag(file, e));
                out.raise(exit::TYPE);
            }
        }
    }
    let ok = report.ok();
    out.check = Some(report);
    ok
}

pub fn check_source(file: &str, src: &str, cfg: &RunConfig) -> FileReport {
    let s = match load(file, src, cfg, cfg.layer) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let mut out = FileReport::default();
    run_checker(file, &s, cfg.layer, cfg.derivations, &mut out);
    out
}

/// `x=0 -> 1`; a closed definition shows just its value.
pub fn render_witness(ctx: &Context, env: &Atom, value: &Atom) -> String {
    if ctx.is_empty() {
        format!("{value}")
    } else {
        format!("{} -> {value}", render_env(&print::context_names(ctx), env))
    }
}

pub fn verify_source(file: &str, src: &str, cfg: &RunConfig) -> FileReport {
    let s = match load(file, src, cfg, Layer::Refinement) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let mut out = FileReport::default();
    if !run_checker(file, &s, Layer::Refinement, false, &mut out) {
        return out;
    }
    out.diagnostics.retain(|d| d.severity == crate::diag::Severity::Error);
    for d in &s.program.decls {
        let Item::Def { name, ctx, ty, term } = &d.item else { continue };
        match s.model.check_erasure(ctx, ty) {
            Ok(None) => {}
            Ok(Some(m)) => {
                out.diagnostics.push(Diagnostic::error(file, d.pos, "E-ERASURE", format!("{name}: {}", m.detail)));
                out.raise(exit::VERIFY);
            }
            Err(e) => {
                out.diagnostics.push(Diagnostic::error(file, d.pos, "E-INTERP", format!("{name}: {e}")));
                out.raise(exit::VERIFY);
                continue;
            }
        }
        let cert = match s.model.verify(ctx, ty, term) {
            Ok(c) => c,
            Err(e) => {
                out.diagnostics.push(Diagnostic::error(file, d.pos, "E-INTERP", format!("{name}: {e}")));
                out.raise(exit::VERIFY);
                continue;
            }
        };
        match &cert.outcome {
            Outcome::Pass => out.diagnostics.push(
                Diagnostic::info(
                    file,
                    d.pos,
                    "PASS",
                    format!("{name}: sound at all {} environments of the context", cert.checked),
                )
                .with_data(json!({ "environments": cert.checked })),
            ),
            Outcome::Fail { env, value, reason } => {
                out.diagnostics.push(Diagnostic::error(
                    file,
                    d.pos,
                    "FAIL",
                    format!("{name}: {reason} at {}", render_witness(ctx, env, value)),
                ));
                out.raise(exit::VERIFY);
            }
        }
        for w in &cert.witnesses {
            out.diagnostics.push(
                Diagnostic::note(file, d.pos, "WITNESS", format!("{name}: {}", render_witness(ctx, &w.env, &w.value)))
                    .with_data(json!({ "env": w.env.to_string(), "value": w.value.to_string(), "holds": w.holds })),
            );
        }
        out.certificates.push((name.clone(), cert));
    }
    out
}

fn dump_type(file: &str, pos: Pos, s: &Session, name: &str, ctx: &Context, ty: &Type, out: &mut FileReport) {
    let names = print::context_names(ctx);
    let r = (|| -> reftc_interp::Result<()> {
        let carrier = s.model.ctx_carrier(ctx)?;
        let (_, p) = s.model.ctx_refined(ctx)?;
        let elems: Vec<String> = carrier.iter().map(|a| a.to_string()).collect();
        let members: Vec<String> = p.members().map(|a| a.to_string()).collect();
        out.diagnostics.push(
            Diagnostic::note(file, pos, "CARRIER", format!("{name}: context [{}]", elems.join(", ")))
                .with_data(json!({ "elements": elems })),
        );
        out.diagnostics.push(
            Diagnostic::note(file, pos, "PRED", format!("{name}: context predicate [{}]", members.join(", ")))
                .with_data(json!({ "members": members })),
        );
        let fam = s.model.type_family(&carrier, &reftc_lang::Erase::erase(ty))?;
        let obj = s.model.type_refined(&carrier, &p, ty)?;
        for env in carrier.iter() {
            let fibre: Vec<String> = fam.fibre(env).expect("base").iter().map(|a| a.to_string()).collect();
            let refined: Vec<String> = fam
                .fibre(env)
                .expect("base")
                .iter()
                .filter(|a| obj.q().contains(&Atom::pair(env.clone(), (*a).clone())))
                .map(|a| a.to_string())
                .collect();
            out.diagnostics.push(
                Diagnostic::note(
                    file,
                    pos,
                    "FAMILY",
                    format!(
                        "{name}: {} at {} has [{}], refined [{}]",
                        print::ty(ty, &names),
                        render_env(&names, env),
                        fibre.join(", "),
                        refined.join(", ")
                    ),
                )
                .with_data(json!({ "env": env.to_string(), "fibre": fibre, "refined": refined })),
            );
        }
        Ok(())
    })();
    if let Err(e) = r {
        out.diagnostics.push(Diagnostic::error(file, pos, "E-INTERP", format!("{name}: {e}")));
        out.raise(exit::VERIFY);
    }
}

pub fn dump_source(file: &str, src: &str, cfg: &RunConfig) -> FileReport {
    let s = match load(file, src, cfg, Layer::Refinement) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let mut out = FileReport::default();
    for (name, b) in s.model.base_types() {
        for (k, i) in b.family.base().iter().enumerate() {
            let elems: Vec<String> = b.family.fibre_at(k).iter().map(|a| a.to_string()).collect();
            out.diagnostics.push(Diagnostic::note(
                file,
                Pos::default(),
                "BASE",
                format!("{name} at {}: [{}]", i.snd().unwrap_or(i), elems.join(", ")),
            ));
        }
    }
    for d in &s.program.decls {
        match &d.item {
            Item::Def { name, ctx, ty, term } => {
                dump_type(file, d.pos, &s, name, ctx, ty, &mut out);
                let r = (|| -> reftc_interp::Result<Vec<(Atom, Atom)>> {
                    let carrier = s.model.ctx_carrier(ctx)?;
                    let fam = s.model.type_family(&carrier, &reftc_lang::Erase::erase(ty))?;
                    let sec = s.model.section(&carrier, &fam, term)?;
                    Ok(sec.graph().map(|(g, e)| (g.clone(), e.snd().cloned().unwrap_or(Atom::Unit))).collect())
                })();
                match r {
                    Ok(pairs) => {
                        for (g, v) in pairs {
                            out.diagnostics.push(
                                Diagnostic::note(
                                    file,
                                    d.pos,
                                    "SECTION",
                                    format!("{name}: {}", render_witness(ctx, &g, &v)),
                                )
                                .with_data(json!({ "env": g.to_string(), "value": v.to_string() })),
                            );
                        }
                    }
                    Err(e) => {
                        out.diagnostics.push(Diagnostic::error(file, d.pos, "E-INTERP", format!("{name}: {e}")));
                        out.raise(exit::VERIFY);
                    }
                }
            }
            Item::Check { name, ctx, lhs, .. } => dump_type(file, d.pos, &s, name, ctx, lhs, &mut out),
            _ => {}
        }
    }
    out
}

pub fn run_laws(cfg: &RunConfig) -> FileReport {
    let suites: Vec<Suite> = match &cfg.suite {
        None => Suite::ALL.to_vec(),
        Some(s) if s == "all" => Suite::ALL.to_vec(),
        Some(s) => match Suite::parse(s) {
            Some(x) => vec![x],
            None => {
                return FileReport::fail(
                    exit::USAGE,
                    Diagnostic::error("laws", Pos::default(), "E-CONFIG", format!("unknown suite `{s}`")),
                )
            }
        },
    };
    let mut out = FileReport::default();
    for suite in suites {
        let report = match run_suite(suite, cfg.bound) {
            Ok(r) => r,
            Err(e) => {
                out.diagnostics.push(Diagnostic::error("laws", Pos::default(), "E-LAW", format!("{suite}: {e}")));
                out.raise(exit::VERIFY);
                continue;
            }
        };
        for o in &report.outcomes {
            let msg = format!("{suite}/{}: {} instances, {} failures", o.law, o.instances, o.failures);
            let d = if o.passed() {
                Diagnostic::info("laws", Pos::default(), "LAW", msg)
            } else {
                out.raise(exit::VERIFY);
                Diagnostic::error("laws", Pos::default(), "LAW", msg)
            };
            out.diagnostics.push(d.with_data(json!({
                "suite": suite.name(),
                "bound": cfg.bound,
                "law": o.law,
                "instances": o.instances,
                "failures": o.failures,
            })));
            for ex in &o.examples {
                out.diagnostics.push(Diagnostic::note("laws", Pos::default(), "COUNTEREXAMPLE", ex.clone()));
            }
        }
    }
    out
}

/// Runs a file command on one path, reading it from disk.
pub fn run_path(path: &Path, cfg: &RunConfig) -> FileReport {
    let file = path.display().to_string();
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return FileReport::fail(exit::USAGE, Diagnostic::error(&file, Pos::default(), "E-IO", e.to_string())),
    };
    match cfg.command {
        crate::config::Command::Check => check_source(&file, &src, cfg),
        crate::config::Command::Verify => verify_source(&file, &src, cfg),
        crate::config::Command::Dump => dump_source(&file, &src, cfg),
        crate::config::Command::Laws => run_laws(cfg),
    }
}

/// Runs the configured command over all inputs; the exit code is the largest
/// one produced.
pub fn run(cfg: &RunConfig) -> (i32, Vec<Diagnostic>) {
    if cfg.command == crate::config::Command::Laws {
        let r = run_laws(cfg);
        return (r.exit, r.diagnostics);
    }
    if cfg.paths.is_empty() {
        return (exit::USAGE, vec![Diagnostic::error("-", Pos::default(), "E-CONFIG", "no input files")]);
    }
    let mut code = exit::OK;
    let mut diags = Vec::new();
    for p in &cfg.paths {
        let r = run_path(p, cfg);
        code = code.max(r.exit);
        diags.extend(r.diagnostics);
    }
    (code, diags)
}
