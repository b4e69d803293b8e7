//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use reftc::commands::run_path;
use reftc::{load, verify_source, Command, RunConfig, Session};
use reftc_checker::{check_program, Checker, Derivation, Judgement, Layer, SubtypeRecord};
use reftc_core::effect::{LiftingKind, MonadKind};
use reftc_core::laws::{run_suite, Suite};
use reftc_core::Atom;
use reftc_lang::{Context, Item, Pos, Type};

type Verdict = Result<String, String>;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn rt_files(dir: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(corpus().join(dir))
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "rt"))
        .collect();
    out.sort();
    out
}

fn session(path: &Path) -> Session {
    let src = std::fs::read_to_string(path).unwrap();
    load(&path.display().to_string(), &src, &RunConfig::new(Command::Check), Layer::Refinement)
        .unwrap_or_else(|r| panic!("{} does not load: {:?}", path.display(), r.diagnostics))
}

/// `; expect: exit N CODE` from the head of a negative program.
fn expectation(path: &Path) -> (i32, String) {
    let src = std::fs::read_to_string(path).unwrap();
    let line = src.lines().find_map(|l| l.strip_prefix("; expect: ")).expect("expect header");
    let mut it = line.split_whitespace();
    assert_eq!(it.next(), Some("exit"));
    (it.next().unwrap().parse().unwrap(), it.next().unwrap().to_string())
}

const FORMERS: &[&str] = &[
    "var", "const", "unit", "pair", "thunk", "inl", "inr", "return", "to", "force", "lambda", "app", "match", "case",
    "mu",
];

fn soundness_harness() -> Verdict {
    let start = Instant::now();
    let cfg = RunConfig::new(Command::Verify);
    let pos = rt_files("pos");
    let neg = rt_files("neg");
    let mut rules = BTreeSet::new();
    let mut liftings = BTreeSet::new();
    for p in &pos {
        let r = run_path(p, &cfg);
        if r.exit != 0 {
            return Err(format!("{} exits {}: {:?}", p.display(), r.exit, r.diagnostics.first()));
        }
        let defs = session(p).program.decls.iter().filter(|d| matches!(d.item, Item::Def { .. })).count();
        if r.certificates.len() != defs || !r.certificates.iter().all(|(_, c)| c.outcome.passed()) {
            return Err(format!("{}: not every definition is certified", p.display()));
        }
        for item in &r.check.as_ref().unwrap().items {
            for node in item.outcome.as_ref().unwrap().nodes() {
                rules.insert(node.rule);
            }
        }
        let s = session(p);
        liftings.insert(s.model.lifting.kind.name());
    }
    let missing: Vec<_> = FORMERS.iter().filter(|f| !rules.contains(*f)).collect();
    if !missing.is_empty() {
        return Err(format!("term formers not covered: {missing:?}"));
    }
    for needed in ["wf-refine", "var-self", "sub-refine", "wf-sum"] {
        if !rules.contains(needed) {
            return Err(format!("rule {needed} not covered"));
        }
    }
    for l in ["partial", "total", "may", "must"] {
        if !liftings.contains(l) {
            return Err(format!("lifting {l} not covered"));
        }
    }
    for p in &neg {
        let (code, diag) = expectation(p);
        let r = run_path(p, &cfg);
        if r.exit != code || !r.diagnostics.iter().any(|d| d.code == diag) {
            return Err(format!("{} exits {} (expected {code} {diag})", p.display(), r.exit));
        }
    }
    let took = start.elapsed();
    if pos.len() < 20 || neg.len() < 8 {
        return Err(format!("corpus too small: {} positive, {} negative", pos.len(), neg.len()));
    }
    if took > Duration::from_secs(10) {
        return Err(format!("took {took:.2?}"));
    }
    Ok(format!("{} positive certified, {} negative rejected as documented, {took:.2?}", pos.len(), neg.len()))
}

fn motivating_example() -> Verdict {
    let path = corpus().join("pos/succ.rt");
    let src = std::fs::read_to_string(&path).unwrap();
    let r = verify_source("succ.rt", &src, &RunConfig::new(Command::Verify));
    let (_, cert) = r.certificates.iter().find(|(n, _)| n == "succ-nonneg").ok_or("no certificate")?;
    let got: BTreeSet<(Atom, Atom)> =
        cert.witnesses.iter().map(|w| (w.env.snd().unwrap().clone(), w.value.clone())).collect();
    // successor on int5 wraps: x + 1 taken mod 5 into -2..=2
    let want: BTreeSet<(Atom, Atom)> =
        (0..=2i64).map(|x| (Atom::Int(x), Atom::Int((x + 3).rem_euclid(5) - 2))).collect();
    if got != want {
        return Err(format!("witness graph {got:?}, expected {want:?}"));
    }
    let golden = std::fs::read_to_string(corpus().join("golden/succ.witness")).unwrap();
    let printed: Vec<&str> =
        r.diagnostics.iter().filter(|d| d.code == "WITNESS").map(|d| d.message.as_str()).collect();
    if printed != golden.lines().collect::<Vec<_>>() {
        return Err(format!("printed witnesses {printed:?} differ from the golden file"));
    }
    Ok(format!("witness {{{}}} matches golden file", printed.join("; ")))
}

fn law_suites() -> Verdict {
    let start = Instant::now();
    let mut runs: Vec<(Suite, usize)> = Suite::ALL.iter().map(|s| (*s, 2)).collect();
    runs.push((Suite::Ccompc, 3));
    runs.push((Suite::Conway, 3));
    let mut instances = 0;
    for (suite, bound) in runs {
        let report = run_suite(suite, bound).map_err(|e| format!("{suite} at {bound}: {e}"))?;
        for o in &report.outcomes {
            if o.failures > 0 {
                return Err(format!("{suite}/{} at bound {bound}: {} failures, e.g. {:?}", o.law, o.failures, o.examples));
            }
            if o.instances == 0 {
                return Err(format!("{suite}/{} at bound {bound}: no instances", o.law));
            }
            instances += o.instances;
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(60) {
        return Err(format!("took {took:.2?}"));
    }
    Ok(format!("{instances} instances, 0 counterexamples, {took:.2?}"))
}

/// `(Γ, T)` pairs a judgement talks about.
fn typed_parts(j: &Judgement) -> Vec<(Context, Type)> {
    match j {
        Judgement::VType(g, a) | Judgement::Value(g, _, a) => vec![(g.clone(), Type::Value(a.clone()))],
        Judgement::CType(g, c) | Judgement::Comp(g, _, c) => vec![(g.clone(), Type::Comp(c.clone()))],
        Judgement::VSub(g, a, b) => vec![(g.clone(), Type::Value(a.clone())), (g.clone(), Type::Value(b.clone()))],
        Judgement::CSub(g, c, d) => vec![(g.clone(), Type::Comp(c.clone())), (g.clone(), Type::Comp(d.clone()))],
        _ => Vec::new(),
    }
}

fn erasure_metatheory() -> Verdict {
    let (mut derivable, mut commuting) = (0, 0);
    for p in rt_files("pos") {
        let s = session(&p);
        let report = check_program(&s.program, &s.sig, &s.model, Layer::Refinement);
        for item in &report.items {
            let d: &Derivation = item.outcome.as_ref().map_err(|e| format!("{}: {e}", p.display()))?;
            if item.erased.is_none() {
                return Err(format!("{}: {} has no erased derivation", p.display(), item.name));
            }
            let mut seen: Vec<Judgement> = Vec::new();
            let mut parts: Vec<(Context, Type)> = Vec::new();
            for node in d.nodes() {
                let erased = node.judgement.erase();
                if seen.contains(&erased) {
                    continue;
                }
                let mut ck = Checker::new(&s.sig, &s.model, Layer::Underlying);
                ck.check_judgement(&erased, Pos::default())
                    .map_err(|e| format!("{}: erasure of [{}] {} fails: {e}", p.display(), node.rule, node.judgement))?;
                seen.push(erased);
                derivable += 1;
                for part in typed_parts(&node.judgement) {
                    if !parts.contains(&part) {
                        parts.push(part);
                    }
                }
            }
            for (g, t) in &parts {
                let m = s.model.check_erasure(g, t).map_err(|e| format!("{}: {e}", p.display()))?;
                if let Some(m) = m {
                    return Err(format!("{}: {}", p.display(), m.detail));
                }
                commuting += 1;
            }
        }
    }
    Ok(format!("{derivable} erased judgements derivable, {commuting} interpretations commute with erasure"))
}

fn subtypes_hold(ck: &mut Checker, g: &Context, a: &Type, b: &Type) -> bool {
    match (a, b) {
        (Type::Value(a), Type::Value(b)) => ck.subtype(g, a, b, Pos::default()).is_ok(),
        (Type::Comp(c), Type::Comp(d)) => ck.subtype_comp(g, c, d, Pos::default()).is_ok(),
        _ => false,
    }
}

fn subtyping_soundness() -> Verdict {
    let (mut records, mut triples) = (0, 0);
    for p in rt_files("pos") {
        let s = session(&p);
        let report = check_program(&s.program, &s.sig, &s.model, Layer::Refinement);
        let mut uniq: Vec<SubtypeRecord> = Vec::new();
        for r in report.subtypes {
            if !uniq.contains(&r) {
                uniq.push(r);
            }
        }
        for r in &uniq {
            let cex = s.model.semantic_subtype_counterexample(&r.ctx, &r.lhs, &r.rhs).map_err(|e| e.to_string())?;
            if let Some(c) = cex {
                return Err(format!("{}: derived subtyping fails semantically at {c}", p.display()));
            }
            records += 1;
        }
        // reflexivity and transitivity over the types seen in each context
        let mut groups: Vec<(Context, Vec<Type>)> = Vec::new();
        for r in &uniq {
            let k = match groups.iter().position(|(g, _)| *g == r.ctx) {
                Some(k) => k,
                None => {
                    groups.push((r.ctx.clone(), Vec::new()));
                    groups.len() - 1
                }
            };
            for t in [&r.lhs, &r.rhs] {
                if !groups[k].1.contains(t) {
                    groups[k].1.push(t.clone());
                }
            }
        }
        let mut ck = Checker::new(&s.sig, &s.model, Layer::Refinement);
        for (g, tys) in &groups {
            let n = tys.len();
            let mut rel = vec![vec![false; n]; n];
            for i in 0..n {
                for j in 0..n {
                    rel[i][j] = subtypes_hold(&mut ck, g, &tys[i], &tys[j]);
                }
                if !rel[i][i] {
                    return Err(format!("{}: subtyping is not reflexive", p.display()));
                }
            }
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if rel[i][j] && rel[j][k] {
                            if !rel[i][k] {
                                return Err(format!("{}: subtyping is not transitive", p.display()));
                            }
                            triples += 1;
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if rel[i][j]
                        && s.model.semantic_subtype_counterexample(g, &tys[i], &tys[j]).map_err(|e| e.to_string())?.is_some()
                    {
                        return Err(format!("{}: derivable subtyping fails semantically", p.display()));
                    }
                }
            }
        }
    }
    Ok(format!("{records} derived subtypings sound, {triples} transitive chains closed"))
}

fn recursion_contrast() -> Verdict {
    let path = corpus().join("pos/mu-diverge.rt");
    let run = |l: LiftingKind| {
        let mut cfg = RunConfig::new(Command::Verify).with_model(MonadKind::Maybe, l);
        cfg.paths.push(path.clone());
        run_path(&path, &cfg)
    };
    let partial = run(LiftingKind::Partial);
    let total = run(LiftingKind::Total);
    let passed = partial.exit == 0 && partial.certificates.iter().all(|(_, c)| c.outcome.passed());
    if !passed {
        return Err(format!("partial lifting: exit {}", partial.exit));
    }
    if total.exit == 0 {
        return Err("total lifting accepts the divergent term".into());
    }
    let why = total.diagnostics.iter().find(|d| d.severity == reftc::Severity::Error).map(|d| d.code.clone());
    Ok(format!("partial: PASS; total: rejected with exit {} {}", total.exit, why.unwrap_or_default()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 6] = [
        ("soundness harness over the corpus", soundness_harness),
        ("successor example witness", motivating_example),
        ("categorical law suites", law_suites),
        ("erasure metatheory", erasure_metatheory),
        ("subtyping soundness", subtyping_soundness),
        ("recursion under partial and total liftings", recursion_contrast),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".to_string()))
        });
        match verdict {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
