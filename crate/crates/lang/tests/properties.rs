//! Substitution, erasure and printing on generated phrases.

use proptest::prelude::*;
use reftc_lang::parse::{parse_comp, parse_formula, parse_vtype};
use reftc_lang::print;
use reftc_lang::{parse_program, CType, Comp, CompKind, Erase, Formula, Name, Scope, Syntax, VType, Value, ValueKind};

const FREE: usize = 4;

/// Builds phrases from a byte tape; an exhausted tape yields the smallest choices.
struct Tape<'a> {
    bytes: &'a [u8],
    at: usize,
    names: &'a [&'a str],
}

impl Tape<'_> {
    fn pick(&mut self, n: u8) -> u8 {
        let b = self.bytes.get(self.at).copied().unwrap_or(0);
        self.at += 1;
        b % n
    }

    fn name(&mut self) -> Name {
        let k = self.pick(self.names.len() as u8) as usize;
        Name::new(self.names[k])
    }

    fn base(&mut self, fuel: u32) -> VType {
        match self.pick(3) {
            0 => VType::Unit,
            1 => VType::Base { name: "b".into(), arg: Value::new(ValueKind::Star) },
            _ => VType::Base { name: "b".into(), arg: self.value(fuel.saturating_sub(1)) },
        }
    }

    fn vtype(&mut self, fuel: u32) -> VType {
        if fuel == 0 {
            return self.base(0);
        }
        let f = fuel - 1;
        match self.pick(6) {
            0 => self.base(f),
            1 => VType::Sigma { x: self.name(), a: Box::new(self.vtype(f)), b: Box::new(self.vtype(f)) },
            2 => VType::U(Box::new(self.ctype(f))),
            3 => VType::Sum(Box::new(self.vtype(f)), Box::new(self.vtype(f))),
            _ => VType::Refine { v: self.name(), base: Box::new(self.base(f)), p: Box::new(self.formula(f)) },
        }
    }

    fn ctype(&mut self, fuel: u32) -> CType {
        let f = fuel.saturating_sub(1);
        match (fuel, self.pick(2)) {
            (0, _) | (_, 0) => CType::F(Box::new(self.vtype(f))),
            _ => CType::Pi { x: self.name(), a: Box::new(self.vtype(f)), c: Box::new(self.ctype(f)) },
        }
    }

    fn var(&mut self) -> Value {
        let idx = self.pick(FREE as u8) as usize;
        Value::var(idx, "?")
    }

    fn value(&mut self, fuel: u32) -> Value {
        let f = fuel.saturating_sub(1);
        let kind = match if fuel == 0 { self.pick(3) } else { self.pick(7) } {
            0 => return self.var(),
            1 => ValueKind::Const("c".into()),
            2 => ValueKind::Star,
            3 => ValueKind::Pair {
                fst: Box::new(self.value(f)),
                snd: Box::new(self.value(f)),
                x: self.name(),
                a: Box::new(self.vtype(f)),
                b: Box::new(self.vtype(f)),
            },
            4 => ValueKind::Thunk(Box::new(self.comp(f))),
            5 => ValueKind::Inl { a: Box::new(self.vtype(f)), b: Box::new(self.vtype(f)), v: Box::new(self.value(f)) },
            _ => ValueKind::Inr { a: Box::new(self.vtype(f)), b: Box::new(self.vtype(f)), v: Box::new(self.value(f)) },
        };
        Value::new(kind)
    }

    fn comp(&mut self, fuel: u32) -> Comp {
        let f = fuel.saturating_sub(1);
        let kind = match if fuel == 0 { 0 } else { self.pick(8) } {
            0 => CompKind::Return(Box::new(self.value(f))),
            1 => CompKind::To {
                m: Box::new(self.comp(f)),
                x: self.name(),
                a: Box::new(self.vtype(f)),
                c: Box::new(self.ctype(f)),
                n: Box::new(self.comp(f)),
            },
            2 => CompKind::Force { c: Box::new(self.ctype(f)), v: Box::new(self.value(f)) },
            3 => CompKind::Lam { x: self.name(), a: Box::new(self.vtype(f)), m: Box::new(self.comp(f)) },
            4 => CompKind::App {
                m: Box::new(self.comp(f)),
                v: Box::new(self.value(f)),
                x: self.name(),
                a: Box::new(self.vtype(f)),
                c: Box::new(self.ctype(f)),
            },
            5 => CompKind::Match {
                v: Box::new(self.value(f)),
                x: self.name(),
                a: Box::new(self.vtype(f)),
                y: self.name(),
                b: Box::new(self.vtype(f)),
                z: self.name(),
                c: Box::new(self.ctype(f)),
                m: Box::new(self.comp(f)),
            },
            6 => CompKind::Case {
                v: Box::new(self.value(f)),
                z: self.name(),
                c: Box::new(self.ctype(f)),
                x: self.name(),
                a: Box::new(self.vtype(f)),
                m: Box::new(self.comp(f)),
                y: self.name(),
                b: Box::new(self.vtype(f)),
                n: Box::new(self.comp(f)),
            },
            _ => CompKind::Mu { x: self.name(), c: Box::new(self.ctype(f)), m: Box::new(self.comp(f)) },
        };
        Comp { pos: Default::default(), kind }
    }

    fn formula(&mut self, fuel: u32) -> Formula {
        let f = fuel.saturating_sub(1);
        match if fuel == 0 { self.pick(2) * 5 } else { self.pick(6) } {
            0 => Formula::Top,
            1 => Formula::And(Box::new(self.formula(f)), Box::new(self.formula(f))),
            2 => Formula::Implies(Box::new(self.formula(f)), Box::new(self.formula(f))),
            3 => Formula::Forall { x: self.name(), a: Box::new(self.vtype(f)), p: Box::new(self.formula(f)) },
            4 => Formula::Eq { a: Box::new(self.vtype(f)), l: Box::new(self.value(f)), r: Box::new(self.value(f)) },
            _ => Formula::Atom { pred: "p".into(), arg: Box::new(self.value(f)) },
        }
    }
}

const NAMES: &[&str] = &["x", "y", "x"];
const OTHER: &[&str] = &["u", "w", "f1"];

fn comp_from(bytes: &[u8], names: &[&str]) -> Comp {
    Tape { bytes, at: 0, names }.comp(4)
}

fn scope() -> Scope {
    Scope {
        bases: vec!["b".into()],
        consts: vec!["c".into()],
        preds: vec!["p".into()],
        vars: free_names(),
    }
}

fn free_names() -> Vec<String> {
    (0..FREE).map(|k| format!("f{k}")).collect()
}

fn tape() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 0..160)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn erase_is_idempotent(bytes in tape()) {
        let m = comp_from(&bytes, NAMES);
        prop_assert_eq!(m.erase().erase(), m.erase());
        let a = Tape { bytes: &bytes, at: 0, names: NAMES }.vtype(4);
        prop_assert!(reftc_lang::ops::is_underlying(&a.erase()));
        prop_assert_eq!(a.erase().erase(), a.erase());
    }

    #[test]
    fn erase_commutes_with_subst(bytes in tape(), vbytes in tape(), j in 0..FREE) {
        let m = comp_from(&bytes, NAMES);
        let v = Tape { bytes: &vbytes, at: 0, names: NAMES }.value(2);
        prop_assert_eq!(m.subst(j, &v).erase(), m.erase().subst(j, &v.erase()));
    }

    #[test]
    fn subst_respects_alpha(bytes in tape(), vbytes in tape(), j in 0..FREE) {
        let m = comp_from(&bytes, NAMES);
        let renamed = comp_from(&bytes, OTHER);
        prop_assert_eq!(&m, &renamed);
        let v = Tape { bytes: &vbytes, at: 0, names: NAMES }.value(2);
        let w = Tape { bytes: &vbytes, at: 0, names: OTHER }.value(2);
        let (l, r) = (m.subst(j, &v), renamed.subst(j, &w));
        prop_assert_eq!(&l, &r);
        // the printed forms differ only in binder names and re-read to the same tree
        let names = free_names();
        let sc = scope();
        prop_assert_eq!(parse_comp(&print::comp(&r, &names), &sc).unwrap(), l);
    }

    #[test]
    fn weakening_then_instantiating_is_identity(bytes in tape(), vbytes in tape()) {
        let m = comp_from(&bytes, NAMES);
        let v = Tape { bytes: &vbytes, at: 0, names: NAMES }.value(2);
        prop_assert_eq!(m.weaken(1).instantiate(&v), m.clone());
        prop_assert!(!m.weaken(1).mentions(0));
    }

    #[test]
    fn print_then_parse_round_trips(bytes in tape()) {
        let sc = scope();
        let names = free_names();
        let m = comp_from(&bytes, NAMES);
        let text = print::comp(&m, &names);
        prop_assert_eq!(parse_comp(&text, &sc).unwrap(), m, "{}", text);
        let a = Tape { bytes: &bytes, at: 0, names: NAMES }.vtype(4);
        prop_assert_eq!(parse_vtype(&print::vtype(&a, &names), &sc).unwrap(), a);
        let p = Tape { bytes: &bytes, at: 0, names: NAMES }.formula(4);
        prop_assert_eq!(parse_formula(&print::formula(&p, &names), &sc).unwrap(), p);
    }
}

#[test]
fn corpus_programs_round_trip() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut seen = 0;
    for dir in ["pos", "neg"] {
        for entry in std::fs::read_dir(root.join(dir)).unwrap() {
            let path = entry.unwrap().path();
            let Ok(prog) = parse_program(&std::fs::read_to_string(&path).unwrap()) else { continue };
            let text = print::program(&prog);
            let again = parse_program(&text).unwrap_or_else(|e| panic!("{}: {e:?}\n{text}", path.display()));
            assert_eq!(again, prog, "{}", path.display());
            seen += 1;
        }
    }
    assert!(seen >= 28);
}
