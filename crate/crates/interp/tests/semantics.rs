use std::collections::BTreeSet;

use proptest::prelude::*;
use reftc_core::effect::{LiftingKind, MonadKind};
use reftc_core::Atom;
use reftc_interp::{ModelEnv, MuRefusal};
use reftc_lang::parse::{parse_comp, parse_ctype, parse_formula, parse_vtype};
use reftc_lang::{parse_program, CType, Comp, Context, Formula, Name, Scope, Term, Type, VType};

const INT: &[i64] = &[-2, -1, 0, 1, 2];

fn wrap(n: i64) -> i64 {
    (n + 2).rem_euclid(5) - 2
}

fn relation(rel: impl Fn(i64, i64) -> bool) -> String {
    let mut out = Vec::new();
    for &a in INT {
        for &b in INT {
            if rel(a, b) {
                out.push(format!("(pair {a} {b})"));
            }
        }
    }
    out.join(" ")
}

fn signature() -> String {
    let succ: Vec<String> = INT.iter().map(|a| format!("({a} (ret {}))", wrap(a + 1))).collect();
    format!(
        "(basetype int arg (unit) carrier (-2 -1 0 1 2))
         (basetype bit arg (unit) carrier (0 1))
         (basetype nat arg (unit) carrier (0 1 2))
         (basetype fin arg (base nat) carrier ((0 ()) (1 (0)) (2 (0 1))))
         (pred ge0 arg (base int) denotes (0 1 2))
         (pred ge1 arg (base int) denotes (1 2))
         (pred nz arg (base bit) denotes (1))
         (pred le arg (sigma (p (base int)) (base int)) denotes ({}))
         (pred succ-of arg (sigma (p (base int)) (base int)) denotes ({}))
         (const succ type (U (pi (a (base int)) (F (ref v (base int) (succ-of (pair a v (p (base int) (base int)))))))) denotes (fun {}))",
        relation(|a, b| a <= b),
        relation(|a, b| b == wrap(a + 1)),
        succ.join(" ")
    )
}

struct Fixture {
    scope: Scope,
    model: ModelEnv,
}

fn fixture_with(src: &str, monad: MonadKind, lifting: LiftingKind) -> Fixture {
    let prog = parse_program(src).unwrap();
    let model = ModelEnv::load(&prog, monad, lifting).unwrap();
    model.validate_constants().unwrap();
    Fixture { scope: Scope::of_program(&prog), model }
}

fn fixture() -> Fixture {
    fixture_with(&signature(), MonadKind::Maybe, LiftingKind::Partial)
}

impl Fixture {
    fn ctx(&self, entries: &[(&str, &str)]) -> Context {
        let mut scope = self.scope.clone();
        let mut out = Vec::new();
        for (x, a) in entries {
            out.push((Name::new(x), parse_vtype(a, &scope).unwrap()));
            scope.vars.push(x.to_string());
        }
        out
    }

    fn inner(&self, ctx: &Context, extra: &[&str]) -> Scope {
        let mut scope = self.scope.clone();
        scope.vars.extend(ctx.iter().map(|(x, _)| x.as_str().to_string()));
        scope.vars.extend(extra.iter().map(|s| s.to_string()));
        scope
    }

    fn vtype(&self, ctx: &Context, src: &str) -> VType {
        parse_vtype(src, &self.inner(ctx, &[])).unwrap()
    }

    fn ctype(&self, ctx: &Context, src: &str) -> CType {
        parse_ctype(src, &self.inner(ctx, &[])).unwrap()
    }

    fn comp(&self, ctx: &Context, extra: &[&str], src: &str) -> Comp {
        parse_comp(src, &self.inner(ctx, extra)).unwrap()
    }

    fn formula(&self, ctx: &Context, extra: &[&str], src: &str) -> Formula {
        parse_formula(src, &self.inner(ctx, extra)).unwrap()
    }
}

fn env(vals: &[i64]) -> Atom {
    vals.iter().fold(Atom::Unit, |e, v| Atom::pair(e, Atom::Int(*v)))
}

#[test]
fn pointwise_fibres_agree_with_families() {
    let fx = fixture();
    let ctx = fx.ctx(&[("n", "(base nat)"), ("i", "(base fin n)")]);
    let carrier = fx.model.ctx_carrier(&ctx).unwrap();
    // one environment per (n, i) with i < n
    assert_eq!(carrier.len(), 3);
    for src in [
        "(base fin n)",
        "(sigma (m (base nat)) (base fin m))",
        "(U (F (base fin n)))",
        "(U (pi (k (base fin n)) (F (base nat))))",
        "(sum (base fin n) (unit))",
    ] {
        let a = fx.vtype(&ctx, src);
        let fam = fx.model.vfamily(&carrier, &a).unwrap();
        for g in carrier.iter() {
            assert_eq!(fam.fibre(g).unwrap(), &fx.model.fibre_v(g, &a).unwrap(), "{src} at {g}");
        }
    }
}

#[test]
fn indexed_base_fibres() {
    let fx = fixture();
    let ctx = fx.ctx(&[("n", "(base nat)")]);
    let rows = fx.model.describe_family(&ctx, &fx.vtype(&ctx, "(base fin n)")).unwrap();
    for (g, elems) in rows {
        let n = match g.snd().unwrap() {
            Atom::Int(n) => *n,
            other => panic!("{other}"),
        };
        assert_eq!(elems, (0..n).map(Atom::Int).collect::<Vec<_>>());
    }
}

#[test]
fn formulas_match_their_reading() {
    let fx = fixture();
    let ctx = fx.ctx(&[("x", "(base int)"), ("y", "(base int)")]);
    let carrier = fx.model.ctx_carrier(&ctx).unwrap();
    let cases: Vec<(&str, Box<dyn Fn(i64, i64) -> bool>)> = vec![
        ("(top)", Box::new(|_, _| true)),
        ("(eq (base int) x y)", Box::new(|x, y| x == y)),
        ("(le (pair x y (p (base int) (base int))))", Box::new(|x, y| x <= y)),
        ("(and (ge0 x) (ge1 y))", Box::new(|x, y| x >= 0 && y >= 1)),
        ("(implies (ge0 x) (le (pair x y (p (base int) (base int)))))", Box::new(|x, y| x < 0 || x <= y)),
        ("(forall (z (base int)) (le (pair z x (p (base int) (base int)))))", Box::new(|x, _| x == 2)),
    ];
    for (src, oracle) in cases {
        let p = fx.model.formula(&carrier, &fx.formula(&ctx, &[], src)).unwrap();
        let got: BTreeSet<Atom> = p.members().cloned().collect();
        let want: BTreeSet<Atom> =
            INT.iter().flat_map(|&x| INT.iter().map(move |&y| (x, y))).filter(|&(x, y)| oracle(x, y)).map(|(x, y)| env(&[x, y])).collect();
        assert_eq!(got, want, "{src}");
    }
}

#[test]
fn wraparound_breaks_the_successor_implication() {
    let fx = fixture();
    let ctx = fx.ctx(&[("x", "(ref v (base int) (ge0 v))")]);
    let a = fx.vtype(&ctx, "(base int)");
    let hyp = Formula::And(
        Box::new(fx.formula(&ctx, &["v"], "(ge0 x)")),
        Box::new(fx.formula(&ctx, &["v"], "(succ-of (pair x v (p (base int) (base int))))")),
    );
    let goal = fx.formula(&ctx, &["v"], "(ge1 v)");
    let cex = fx.model.entailment_counterexample(&ctx, &a, &hyp, &goal).unwrap();
    // only x = 2 has a successor below 1
    assert_eq!(cex, Some(env(&[2, -2])));
}

#[test]
fn successor_certificate_is_the_pointwise_graph() {
    let fx = fixture();
    let ctx = fx.ctx(&[("x", "(ref v (base int) (ge0 v))")]);
    let ty = Type::Comp(fx.ctype(&ctx, "(F (ref v (base int) (succ-of (pair x v (p (base int) (base int))))))"));
    let m = fx.comp(
        &ctx,
        &[],
        "(app (force (pi (a (base int)) (F (ref v (base int) (succ-of (pair a v (p (base int) (base int))))))) succ) x \
         (a (base int)) (F (ref v (base int) (succ-of (pair a v (p (base int) (base int)))))))",
    );
    let cert = fx.model.verify(&ctx, &ty, &Term::Comp(m)).unwrap();
    assert!(cert.outcome.passed());
    let got: Vec<(Atom, Atom)> = cert.witnesses.iter().map(|w| (w.env.clone(), w.value.clone())).collect();
    let want: Vec<(Atom, Atom)> = (0..=2).map(|x| (env(&[x]), Atom::just(Atom::Int(wrap(x + 1))))).collect();
    assert_eq!(got, want);
}

#[test]
fn unit_value_has_a_trivial_certificate() {
    let fx = fixture();
    let ty = Type::Value(fx.vtype(&Vec::new(), "(ref v (unit) (top))"));
    let v = reftc_lang::parse::parse_value("(unit-val)", &fx.scope).unwrap();
    let cert = fx.model.verify(&Vec::new(), &ty, &Term::Value(v)).unwrap();
    assert!(cert.outcome.passed());
    assert_eq!(cert.checked, 1);
    assert_eq!(cert.witnesses[0].value, Atom::Unit);
}

#[test]
fn constant_violating_its_refinement_is_rejected() {
    let src = format!("{}\n(const bad type (ref v (base int) (ge0 v)) denotes -1)", signature());
    let prog = parse_program(&src).unwrap();
    let model = ModelEnv::load(&prog, MonadKind::Maybe, LiftingKind::Partial).unwrap();
    let err = model.validate_constants().unwrap_err();
    assert!(err.msg.contains("bad") && err.msg.contains("violates"), "{}", err.msg);
}

#[test]
fn erasure_commutes_with_interpretation() {
    let fx = fixture();
    let ctx = fx.ctx(&[("b", "(ref v (base bit) (nz v))")]);
    for src in [
        "(ref v (unit) (nz b))",
        "(pi (a (ref v (base bit) (nz v))) (F (base bit)))",
        "(sigma (a (ref v (base bit) (nz v))) (ref v (base bit) (eq (base bit) v a)))",
        "(U (F (sum (ref v (base bit) (nz v)) (unit))))",
    ] {
        let scope = fx.inner(&ctx, &[]);
        let t = match parse_vtype(src, &scope) {
            Ok(a) => Type::Value(a),
            Err(_) => Type::Comp(parse_ctype(src, &scope).unwrap()),
        };
        assert_eq!(fx.model.check_erasure(&ctx, &t).unwrap(), None, "{src}");
    }
    // the refinement is forgotten: same carrier, smaller predicate
    let a = fx.vtype(&ctx, "(ref v (base bit) (nz v))");
    let (carrier, p) = fx.model.ctx_refined(&ctx).unwrap();
    let obj = fx.model.vrefined(&carrier, &p, &a).unwrap();
    assert_eq!(obj.family(), &fx.model.vfamily(&carrier, &fx.vtype(&ctx, "(base bit)")).unwrap());
    assert_eq!(obj.q().count(), 1);
}

#[test]
fn semantic_subtyping_finds_the_first_violation() {
    let fx = fixture();
    let nat = Type::Value(fx.vtype(&Vec::new(), "(ref v (base int) (ge0 v))"));
    let int = Type::Value(fx.vtype(&Vec::new(), "(base int)"));
    assert_eq!(fx.model.semantic_subtype_counterexample(&Vec::new(), &nat, &int).unwrap(), None);
    let cex = fx.model.semantic_subtype_counterexample(&Vec::new(), &int, &nat).unwrap();
    assert_eq!(cex, Some(Atom::pair(Atom::Unit, Atom::Int(-2))));
}

fn divergence(fx: &Fixture) -> Option<MuRefusal> {
    let c = fx.ctype(&Vec::new(), "(F (unit))");
    let body = fx.comp(&Vec::new(), &["x"], "(force (F (unit)) x)");
    fx.model.mu_gate(&Vec::new(), &c, &body).unwrap()
}

#[test]
fn recursion_gate_depends_on_the_lifting() {
    let partial = fixture();
    assert_eq!(divergence(&partial), None);
    let total = fixture_with(&signature(), MonadKind::Maybe, LiftingKind::Total);
    assert!(matches!(divergence(&total), Some(MuRefusal::NotPointed { .. })));
    let none = fixture_with("(basetype int arg (unit) carrier (0))", MonadKind::Identity, LiftingKind::Trivial);
    assert!(matches!(divergence(&none), Some(MuRefusal::Unpointed(_))));
}

proptest! {
    #[test]
    fn declared_predicates_denote_their_members(members in prop::collection::btree_set(prop::sample::select(INT), 0..=5)) {
        let listed: Vec<String> = members.iter().map(|n| n.to_string()).collect();
        let src = format!("(basetype int arg (unit) carrier (-2 -1 0 1 2))\n(pred q arg (base int) denotes ({}))", listed.join(" "));
        let fx = fixture_with(&src, MonadKind::Maybe, LiftingKind::Partial);
        let ctx = fx.ctx(&[("x", "(base int)")]);
        let carrier = fx.model.ctx_carrier(&ctx).unwrap();
        let p = fx.model.formula(&carrier, &fx.formula(&ctx, &[], "(q x)")).unwrap();
        let got: BTreeSet<Atom> = p.members().cloned().collect();
        let want: BTreeSet<Atom> = members.iter().map(|&n| env(&[n])).collect();
        prop_assert_eq!(got, want);
    }
}
