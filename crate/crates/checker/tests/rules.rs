use proptest::prelude::*;
use reftc_checker::{check_program, Checker, Layer, ProgramReport, Signature, E_SUBTYPE, E_TYPE};
use reftc_core::effect::{LiftingKind, MonadKind};
use reftc_interp::ModelEnv;
use reftc_lang::parse::{parse_comp, parse_formula, parse_value, parse_vtype};
use reftc_lang::{parse_program, Context, Name, Pos, Program, Scope, Term, Type};

const SIG: &str = "
(basetype int arg (unit) carrier (-2 -1 0 1 2))
(pred ge0 arg (base int) denotes (0 1 2))
(pred ge1 arg (base int) denotes (1 2))
(pred succ-of arg (sigma (p (base int)) (base int))
  denotes ((pair -2 -1) (pair -1 0) (pair 0 1) (pair 1 2) (pair 2 -2)))
(pred sat-succ-of arg (sigma (p (base int)) (base int))
  denotes ((pair -2 -1) (pair -1 0) (pair 0 1) (pair 1 2) (pair 2 2)))
(const two type (base int) denotes 2)
(const deux type (base int) denotes 2)
(const one type (base int) denotes 1)
(const zero type (base int) denotes 0)
";

struct Env {
    prog: Program,
    sig: Signature,
    model: ModelEnv,
}

fn env_with(extra: &str, lifting: LiftingKind) -> Env {
    let prog = parse_program(&format!("{SIG}\n{extra}")).unwrap();
    let model = ModelEnv::load(&prog, MonadKind::Maybe, lifting).unwrap();
    Env { sig: Signature::of_program(&prog), prog, model }
}

fn env() -> Env {
    env_with("", LiftingKind::Partial)
}

impl Env {
    fn report(&self, layer: Layer) -> ProgramReport {
        check_program(&self.prog, &self.sig, &self.model, layer)
    }

    fn scope(&self, ctx: &Context) -> Scope {
        let mut s = Scope::of_program(&self.prog);
        s.vars.extend(ctx.iter().map(|(x, _)| x.as_str().to_string()));
        s
    }

    fn ctx(&self, entries: &[(&str, &str)]) -> Context {
        let mut out: Context = Vec::new();
        for (x, a) in entries {
            let t = parse_vtype(a, &self.scope(&out)).unwrap();
            out.push((Name::new(x), t));
        }
        out
    }
}

fn item_rules(r: &ProgramReport, name: &str) -> Vec<&'static str> {
    let item = r.items.iter().find(|i| i.name == name).unwrap();
    let d = item.outcome.as_ref().unwrap_or_else(|e| panic!("{name}: {e}"));
    d.nodes().iter().map(|n| n.rule).collect()
}

#[test]
fn variable_of_unit_type() {
    let e = env_with("(def v ((x (unit))) (unit) x)", LiftingKind::Partial);
    let r = e.report(Layer::Underlying);
    assert!(r.ok());
    assert!(item_rules(&r, "v").contains(&"var"));
}

#[test]
fn returning_unit() {
    let e = env_with("(def r () (F (unit)) (return (unit-val)))", LiftingKind::Partial);
    for layer in [Layer::Underlying, Layer::Refinement] {
        let r = e.report(layer);
        let rules = item_rules(&r, "r");
        assert!(rules.contains(&"return") && rules.contains(&"unit"));
    }
}

#[test]
fn forcing_a_non_thunk_fails() {
    let e = env_with("(def f ((x (base int))) (F (base int)) (force (F (base int)) x))", LiftingKind::Partial);
    let err = e.report(Layer::Underlying).first_error().cloned().unwrap();
    assert_eq!(err.code, E_TYPE);
    assert!(err.msg.contains("thunk"), "{}", err.msg);
}

#[test]
fn unit_value_has_the_trivial_refinement() {
    let e = env_with("(def s () (ref v (unit) (top)) (unit-val))", LiftingKind::Partial);
    assert!(e.report(Layer::Refinement).ok());
}

#[test]
fn base_variables_are_selfified() {
    let e = env_with(
        "(def s ((x (ref v (base int) (ge0 v)))) (ref v (base int) (eq (base int) v x)) x)",
        LiftingKind::Partial,
    );
    let r = e.report(Layer::Refinement);
    assert!(item_rules(&r, "s").contains(&"var-self"));
    // the underlying layer has no selfification
    assert!(!item_rules(&e.report(Layer::Underlying), "s").contains(&"var-self"));
}

#[test]
fn conditional_branches_see_their_assumption() {
    let sum = "(sum (ref v (unit) (ge0 x)) (ref v (unit) (top)))";
    let prog = format!(
        "(const origin type (ref v (base int) (ge0 v)) denotes 0)
         (const test type (U (pi (a (base int)) (F (sum (ref v (unit) (ge0 a)) (ref v (unit) (top))))))
           denotes (fun (-2 (ret (inr (unit)))) (-1 (ret (inr (unit)))) (0 (ret (inl (unit)))) (1 (ret (inl (unit)))) (2 (ret (inl (unit))))))
         (def clamp ((x (base int))) (F (ref v (base int) (ge0 v)))
           (to (app (force (pi (a (base int)) (F (sum (ref v (unit) (ge0 a)) (ref v (unit) (top))))) test) x
                    (a (base int)) (F (sum (ref v (unit) (ge0 a)) (ref v (unit) (top)))))
               (s {sum}) (F (ref v (base int) (ge0 v)))
               (case s (z (F (ref v (base int) (ge0 v))))
                 ((yes (ref v (unit) (ge0 x))) (return x))
                 ((no (ref v (unit) (top))) (return origin)))))"
    );
    let e = env_with(&prog, LiftingKind::Total);
    let r = e.report(Layer::Refinement);
    let rules = item_rules(&r, "clamp");
    assert!(rules.contains(&"case"));
    assert!(rules.iter().filter(|r| **r == "sub-refine").count() >= 2);
    // without the assumption the first branch is rejected
    let bad = prog.replace("((yes (ref v (unit) (ge0 x))) (return x))", "((yes (ref v (unit) (top))) (return x))");
    let e = env_with(&bad.replace(&format!("(s {sum})"), "(s (sum (ref v (unit) (top)) (ref v (unit) (top))))"), LiftingKind::Total);
    assert_eq!(e.report(Layer::Refinement).first_error().unwrap().code, E_SUBTYPE);
}

#[test]
fn subtyping_examples() {
    let e = env();
    let mut ck = Checker::new(&e.sig, &e.model, Layer::Refinement);
    let empty: Context = Vec::new();
    let sc = e.scope(&empty);
    let t = |s: &str| parse_vtype(s, &sc).unwrap();
    let p0 = Pos::default();
    for a in ["(base int)", "(ref v (base int) (ge0 v))", "(U (pi (a (base int)) (F (unit))))"] {
        assert!(ck.subtype(&empty, &t(a), &t(a), p0).is_ok(), "{a}");
    }
    assert!(ck.subtype(&empty, &t("(ref v (unit) (ge0 two))"), &t("(ref v (unit) (top))"), p0).is_ok());
    // contravariance in the argument
    let wide = t("(U (pi (a (ref v (base int) (top))) (F (ref v (base int) (eq (base int) v a)))))");
    let narrow = t("(U (pi (a (ref v (base int) (ge0 v))) (F (ref v (base int) (eq (base int) v a)))))");
    assert!(ck.subtype(&empty, &wide, &narrow, p0).is_ok());
    let err = ck.subtype(&empty, &narrow, &wide, p0).unwrap_err();
    assert_eq!(err.code, E_SUBTYPE);
}

#[test]
fn implication_examples() {
    let e = env();
    let ck = Checker::new(&e.sig, &e.model, Layer::Refinement);
    let p0 = Pos::default();
    let ctx = e.ctx(&[("x", "(ref v (base int) (ge0 v))")]);
    let mut inner = e.scope(&ctx);
    inner.vars.push("v".into());
    let f = |s: &str| parse_formula(s, &inner).unwrap();
    let int = parse_vtype("(base int)", &e.scope(&ctx)).unwrap();
    assert_eq!(ck.implication(&ctx, &int, &f("(ge1 v)"), &f("(ge1 v)"), p0).unwrap(), None);
    assert_eq!(ck.implication(&ctx, &int, &f("(ge1 v)"), &f("(top)"), p0).unwrap(), None);
    // x >= 0 and v = x + 1 does not give v >= 1 on the wrapping carrier...
    let succ = f("(succ-of (pair x v (p (base int) (base int))))");
    let cex = ck.implication(&ctx, &int, &succ, &f("(ge1 v)"), p0).unwrap();
    assert_eq!(cex.map(|a| a.to_string()), Some("(((), 2), -2)".to_string()));
    // ...but does with a saturating successor
    let sat = f("(sat-succ-of (pair x v (p (base int) (base int))))");
    assert_eq!(ck.implication(&ctx, &int, &sat, &f("(ge1 v)"), p0).unwrap(), None);
}

#[test]
fn definitional_equality_examples() {
    let e = env_with("(def unused () (unit) (unit-val))", LiftingKind::Partial);
    let ck = Checker::new(&e.sig, &e.model, Layer::Underlying);
    let p0 = Pos::default();
    let ctx = e.ctx(&[("x", "(unit)"), ("n", "(base int)")]);
    let sc = e.scope(&ctx);
    let v = |s: &str| parse_value(s, &sc).unwrap();
    let unit = parse_vtype("(unit)", &sc).unwrap();
    let int = parse_vtype("(base int)", &sc).unwrap();
    // every value of unit type is the unit value
    assert!(ck.defeq_value(&ctx, &v("x"), &v("(unit-val)"), &unit, p0).unwrap());
    // distinct constants with the same denotation
    assert!(ck.defeq_value(&ctx, &v("two"), &v("deux"), &int, p0).unwrap());
    assert!(!ck.defeq_value(&ctx, &v("two"), &v("one"), &int, p0).unwrap());
    assert!(!ck.defeq_value(&ctx, &v("n"), &v("zero"), &int, p0).unwrap());
    // force (thunk M) = M
    let m = parse_comp("(return n)", &sc).unwrap();
    let forced = parse_comp("(force (F (base int)) (thunk (return n)))", &sc).unwrap();
    let fint = Type::Comp(reftc_lang::parse::parse_ctype("(F (base int))", &sc).unwrap());
    assert!(ck.defeq_term(&ctx, &Term::Comp(forced), &Term::Comp(m), &fint, p0).unwrap());
}

#[test]
fn erased_items_are_checked_first() {
    let e = env_with("(def s ((x (ref v (base int) (ge0 v)))) (F (ref v (base int) (ge0 v))) (return x))", LiftingKind::Partial);
    let r = e.report(Layer::Refinement);
    let item = &r.items[0];
    assert!(item.outcome.is_ok());
    let erased = item.erased.as_ref().unwrap();
    assert_eq!(erased.judgement, item.outcome.as_ref().unwrap().judgement.erase());
}

const CONSTS: &[&str] = &["two", "deux", "one", "zero"];

proptest! {
    #[test]
    fn defeq_is_an_equivalence(i in 0..4usize, j in 0..4usize, k in 0..4usize) {
        let e = env();
        let ck = Checker::new(&e.sig, &e.model, Layer::Underlying);
        let empty: Context = Vec::new();
        let sc = e.scope(&empty);
        let int = parse_vtype("(base int)", &sc).unwrap();
        let p0 = Pos::default();
        let eq = |a: usize, b: usize| {
            let (va, vb) = (parse_value(CONSTS[a], &sc).unwrap(), parse_value(CONSTS[b], &sc).unwrap());
            ck.defeq_value(&empty, &va, &vb, &int, p0).unwrap()
        };
        prop_assert!(eq(i, i));
        prop_assert_eq!(eq(i, j), eq(j, i));
        if eq(i, j) && eq(j, k) {
            prop_assert!(eq(i, k));
        }
    }
}
