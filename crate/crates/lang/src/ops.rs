//! Shifting, capture-avoiding substitution, erasure and alpha-equivalence.
//!
//! Because variables are indices, substitution never needs to rename
//! binders; names only matter again when printing.

use crate::syntax::*;

type VarFn<'a> = dyn FnMut(usize, usize, &Name, Pos) -> Value + 'a;

/// Syntax with de Bruijn variables.
pub trait Syntax: Sized {
    /// Rebuilds the phrase, replacing each variable occurrence by
    /// `f(depth, idx, name, pos)` where `depth` counts the binders crossed.
    fn map_vars(&self, depth: usize, f: &mut VarFn<'_>) -> Self;

    /// Adds `d` to every variable at or above `cutoff`.
    fn shift(&self, d: isize, cutoff: usize) -> Self {
        self.map_vars(0, &mut |depth, idx, name, pos| {
            let idx = if idx >= cutoff + depth { (idx as isize + d) as usize } else { idx };
            Value::at(pos, ValueKind::Var { idx, name: name.clone() })
        })
    }

    /// Weakening by `d` fresh outer variables.
    fn weaken(&self, d: usize) -> Self {
        self.shift(d as isize, 0)
    }

    /// `t[v/x]` where `x` is the variable with index `j` and `v` lives in the
    /// context with `x` removed (so `x` disappears from the result).
    fn subst(&self, j: usize, v: &Value) -> Self {
        self.map_vars(0, &mut |depth, idx, name, pos| {
            if idx == j + depth {
                v.shift(depth as isize, 0)
            } else if idx > j + depth {
                Value::at(pos, ValueKind::Var { idx: idx - 1, name: name.clone() })
            } else {
                Value::at(pos, ValueKind::Var { idx, name: name.clone() })
            }
        })
    }

    /// `t[v/x]` for the innermost variable `x`.
    fn instantiate(&self, v: &Value) -> Self {
        self.subst(0, v)
    }

    /// Whether the variable with index `j` occurs.
    fn mentions(&self, j: usize) -> bool {
        let mut hit = false;
        self.map_vars(0, &mut |depth, idx, name, pos| {
            hit |= idx == j + depth;
            Value::at(pos, ValueKind::Var { idx, name: name.clone() })
        });
        hit
    }
}

impl Syntax for VType {
    fn map_vars(&self, d: usize, f: &mut VarFn<'_>) -> VType {
        match self {
            VType::Unit => VType::Unit,
            VType::Base { name, arg } => VType::Base { name: name.clone(), arg: arg.map_vars(d, f) },
            VType::Sigma { x, a, b } => VType::Sigma {
                x: x.clone(),
                a: Box::new(a.map_vars(d, f)),
                b: Box::new(b.map_vars(d + 1, f)),
            },
            VType::U(c) => VType::U(Box::new(c.map_vars(d, f))),
            VType::Sum(a, b) => VType::Sum(Box::new(a.map_vars(d, f)), Box::new(b.map_vars(d, f))),
            VType::Refine { v, base, p } => VType::Refine {
                v: v.clone(),
                base: Box::new(base.map_vars(d, f)),
                p: Box::new(p.map_vars(d + 1, f)),
            },
        }
    }
}

impl Syntax for CType {
    fn map_vars(&self, d: usize, f: &mut VarFn<'_>) -> CType {
        match self {
            CType::F(a) => CType::F(Box::new(a.map_vars(d, f))),
            CType::Pi { x, a, c } => CType::Pi {
                x: x.clone(),
                a: Box::new(a.map_vars(d, f)),
                c: Box::new(c.map_vars(d + 1, f)),
            },
        }
    }
}

impl Syntax for Type {
    fn map_vars(&self, d: usize, f: &mut VarFn<'_>) -> Type {
        match self {
            Type::Value(a) => Type::Value(a.map_vars(d, f)),
            Type::Comp(c) => Type::Comp(c.map_vars(d, f)),
        }
    }
}

impl Syntax for Value {
    fn map_vars(&self, d: usize, f: &mut VarFn<'_>) -> Value {
        let kind = match &self.kind {
            ValueKind::Var { idx, name } => return f(d, *idx, name, self.pos),
            ValueKind::Const(c) => ValueKind::Const(c.clone()),
            ValueKind::Star => ValueKind::Star,
            ValueKind::Pair { fst, snd, x, a, b } => ValueKind::Pair {
                fst: Box::new(fst.map_vars(d, f)),
                snd: Box::new(snd.map_vars(d, f)),
                x: x.clone(),
                a: Box::new(a.map_vars(d, f)),
                b: Box::new(b.map_vars(d + 1, f)),
            },
            ValueKind::Thunk(m) => ValueKind::Thunk(Box::new(m.map_vars(d, f))),
            ValueKind::Inl { a, b, v } => ValueKind::Inl {
                a: Box::new(a.map_vars(d, f)),
                b: Box::new(b.map_vars(d, f)),
                v: Box::new(v.map_vars(d, f)),
            },
            ValueKind::Inr { a, b, v } => ValueKind::Inr {
                a: Box::new(a.map_vars(d, f)),
                b: Box::new(b.map_vars(d, f)),
                v: Box::new(v.map_vars(d, f)),
            },
        };
        Value::at(self.pos, kind)
    }
}

impl Syntax for Comp {
    fn map_vars(&self, d: usize, f: &mut VarFn<'_>) -> Comp {
        let kind = match &self.kind {
            CompKind::Return(v) => CompKind::Return(Box::new(v.map_vars(d, f))),
            CompKind::To { m, x, a, c, n } => CompKind::To {
                m: Box::new(m.map_vars(d, f)),
                x: x.clone(),
                a: Box::new(a.map_vars(d, f)),
                c: Box::new(c.map_vars(d, f)),
                n: Box::new(n.map_vars(d + 1, f)),
            },
            CompKind::Force { c, v } => {
                CompKind::Force { c: Box::new(c.map_vars(d, f)), v: Box::new(v.map_vars(d, f)) }
            }
            CompKind::Lam { x, a, m } => CompKind::Lam {
                x: x.clone(),
                a: Box::new(a.map_vars(d, f)),
                m: Box::new(m.map_vars(d + 1, f)),
            },
            CompKind::App { m, v, x, a, c } => CompKind::App {
                m: Box::new(m.map_vars(d, f)),
                v: Box::new(v.map_vars(d, f)),
                x: x.clone(),
                a: Box::new(a.map_vars(d, f)),
                c: Box::new(c.map_vars(d + 1, f)),
            },
            CompKind::Match { v, x, a, y, b, z, c, m } => CompKind::Match {
                v: Box::new(v.map_vars(d, f)),
                x: x.clone(),
                a: Box::new(a.map_vars(d, f)),
                y: y.clone(),
                b: Box::new(b.map_vars(d + 1, f)),
                z: z.clone(),
                c: Box::new(c.map_vars(d + 1, f)),
                m: Box::new(m.map_vars(d + 2, f)),
            },
            CompKind::Case { v, z, c, x, a, m, y, b, n } => CompKind::Case {
                v: Box::new(v.map_vars(d, f)),
                z: z.clone(),
                c: Box::new(c.map_vars(d + 1, f)),
                x: x.clone(),
                a: Box::new(a.map_vars(d, f)),
                m: Box::new(m.map_vars(d + 1, f)),
                y: y.clone(),
                b: Box::new(b.map_vars(d, f)),
                n: Box::new(n.map_vars(d + 1, f)),
            },
            CompKind::Mu { x, c, m } => CompKind::Mu {
                x: x.clone(),
                c: Box::new(c.map_vars(d, f)),
                m: Box::new(m.map_vars(d + 1, f)),
            },
        };
        Comp::at(self.pos, kind)
    }
}

impl Syntax for Term {
    fn map_vars(&self, d: usize, f: &mut VarFn<'_>) -> Term {
        match self {
            Term::Value(v) => Term::Value(v.map_vars(d, f)),
            Term::Comp(m) => Term::Comp(m.map_vars(d, f)),
        }
    }
}

impl Syntax for Formula {
    fn map_vars(&self, d: usize, f: &mut VarFn<'_>) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::And(l, r) => Formula::And(Box::new(l.map_vars(d, f)), Box::new(r.map_vars(d, f))),
            Formula::Implies(l, r) => Formula::Implies(Box::new(l.map_vars(d, f)), Box::new(r.map_vars(d, f))),
            Formula::Forall { x, a, p } => Formula::Forall {
                x: x.clone(),
                a: Box::new(a.map_vars(d, f)),
                p: Box::new(p.map_vars(d + 1, f)),
            },
            Formula::Eq { a, l, r } => Formula::Eq {
                a: Box::new(a.map_vars(d, f)),
                l: Box::new(l.map_vars(d, f)),
                r: Box::new(r.map_vars(d, f)),
            },
            Formula::Atom { pred, arg } => Formula::Atom { pred: pred.clone(), arg: Box::new(arg.map_vars(d, f)) },
        }
    }
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq<T: PartialEq>(a: &T, b: &T) -> bool {
    // names and positions are excluded from equality on every syntax type
    a == b
}

/// The refinement-erasure map `|−|` on phrases of both layers. Annotations
/// inside terms are erased too.
pub trait Erase {
    fn erase(&self) -> Self;
}

impl Erase for VType {
    fn erase(&self) -> VType {
        match self {
            VType::Unit => VType::Unit,
            VType::Base { name, arg } => VType::Base { name: name.clone(), arg: arg.erase() },
            VType::Sigma { x, a, b } => VType::Sigma { x: x.clone(), a: Box::new(a.erase()), b: Box::new(b.erase()) },
            VType::U(c) => VType::U(Box::new(c.erase())),
            VType::Sum(a, b) => VType::Sum(Box::new(a.erase()), Box::new(b.erase())),
            VType::Refine { base, .. } => base.erase(),
        }
    }
}

impl Erase for CType {
    fn erase(&self) -> CType {
        match self {
            CType::F(a) => CType::F(Box::new(a.erase())),
            CType::Pi { x, a, c } => CType::Pi { x: x.clone(), a: Box::new(a.erase()), c: Box::new(c.erase()) },
        }
    }
}

impl Erase for Type {
    fn erase(&self) -> Type {
        match self {
            Type::Value(a) => Type::Value(a.erase()),
            Type::Comp(c) => Type::Comp(c.erase()),
        }
    }
}

impl Erase for Value {
    fn erase(&self) -> Value {
        let kind = match &self.kind {
            k @ (ValueKind::Var { .. } | ValueKind::Const(_) | ValueKind::Star) => k.clone(),
            ValueKind::Pair { fst, snd, x, a, b } => ValueKind::Pair {
                fst: Box::new(fst.erase()),
                snd: Box::new(snd.erase()),
                x: x.clone(),
                a: Box::new(a.erase()),
                b: Box::new(b.erase()),
            },
            ValueKind::Thunk(m) => ValueKind::Thunk(Box::new(m.erase())),
            ValueKind::Inl { a, b, v } => {
                ValueKind::Inl { a: Box::new(a.erase()), b: Box::new(b.erase()), v: Box::new(v.erase()) }
            }
            ValueKind::Inr { a, b, v } => {
                ValueKind::Inr { a: Box::new(a.erase()), b: Box::new(b.erase()), v: Box::new(v.erase()) }
            }
        };
        Value::at(self.pos, kind)
    }
}

impl Erase for Comp {
    fn erase(&self) -> Comp {
        let kind = match &self.kind {
            CompKind::Return(v) => CompKind::Return(Box::new(v.erase())),
            CompKind::To { m, x, a, c, n } => CompKind::To {
                m: Box::new(m.erase()),
                x: x.clone(),
                a: Box::new(a.erase()),
                c: Box::new(c.erase()),
                n: Box::new(n.erase()),
            },
            CompKind::Force { c, v } => CompKind::Force { c: Box::new(c.erase()), v: Box::new(v.erase()) },
            CompKind::Lam { x, a, m } => CompKind::Lam { x: x.clone(), a: Box::new(a.erase()), m: Box::new(m.erase()) },
            CompKind::App { m, v, x, a, c } => CompKind::App {
                m: Box::new(m.erase()),
                v: Box::new(v.erase()),
                x: x.clone(),
                a: Box::new(a.erase()),
                c: Box::new(c.erase()),
            },
            CompKind::Match { v, x, a, y, b, z, c, m } => CompKind::Match {
                v: Box::new(v.erase()),
                x: x.clone(),
                a: Box::new(a.erase()),
                y: y.clone(),
                b: Box::new(b.erase()),
                z: z.clone(),
                c: Box::new(c.erase()),
                m: Box::new(m.erase()),
            },
            CompKind::Case { v, z, c, x, a, m, y, b, n } => CompKind::Case {
                v: Box::new(v.erase()),
                z: z.clone(),
                c: Box::new(c.erase()),
                x: x.clone(),
                a: Box::new(a.erase()),
                m: Box::new(m.erase()),
                y: y.clone(),
                b: Box::new(b.erase()),
                n: Box::new(n.erase()),
            },
            CompKind::Mu { x, c, m } => CompKind::Mu { x: x.clone(), c: Box::new(c.erase()), m: Box::new(m.erase()) },
        };
        Comp::at(self.pos, kind)
    }
}

impl Erase for Term {
    fn erase(&self) -> Term {
        match self {
            Term::Value(v) => Term::Value(v.erase()),
            Term::Comp(m) => Term::Comp(m.erase()),
        }
    }
}

impl Erase for Context {
    /// `|Γ, x:A| = |Γ|, x:|A|`
    fn erase(&self) -> Context {
        self.iter().map(|(x, a)| (x.clone(), a.erase())).collect()
    }
}

/// Whether a type contains no refinement anywhere.
pub fn is_underlying(t: &VType) -> bool {
    t.erase() == *t && !has_refine_v(t)
}

fn has_refine_v(t: &VType) -> bool {
    match t {
        VType::Unit | VType::Base { .. } => false,
        VType::Sigma { a, b, .. } => has_refine_v(a) || has_refine_v(b),
        VType::U(c) => has_refine_c(c),
        VType::Sum(a, b) => has_refine_v(a) || has_refine_v(b),
        VType::Refine { .. } => true,
    }
}

fn has_refine_c(c: &CType) -> bool {
    match c {
        CType::F(a) => has_refine_v(a),
        CType::Pi { a, c, .. } => has_refine_v(a) || has_refine_c(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_comp, parse_value, parse_vtype, Scope};

    fn scope(vars: &[&str]) -> Scope {
        Scope {
            bases: vec!["int".into()],
            consts: vec!["c".into(), "d".into()],
            preds: vec!["pos".into()],
            vars: vars.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn substituting_the_variable_itself() {
        let s = scope(&["x"]);
        let v = parse_value("c", &scope(&[])).unwrap();
        assert_eq!(parse_value("x", &s).unwrap().instantiate(&v), v);
    }

    #[test]
    fn shadowing_binder_is_untouched() {
        let s = scope(&["x"]);
        let lam = parse_comp("(lambda (x (unit)) (return x))", &s).unwrap();
        assert_eq!(lam.instantiate(&Value::konst("c")), parse_comp("(lambda (x (unit)) (return x))", &scope(&[])).unwrap());
    }

    #[test]
    fn sigma_substitutes_both_components() {
        let s = scope(&["y"]);
        let t = parse_vtype("(sigma (x (base int y)) (base int y))", &s).unwrap();
        let got = t.instantiate(&Value::konst("c"));
        let want = parse_vtype("(sigma (x (base int c)) (base int c))", &scope(&[])).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λy. x)[y/x] must not capture the free y
        let s = scope(&["y", "x"]);
        let lam = parse_comp("(lambda (y (unit)) (return x))", &s).unwrap();
        let got = lam.instantiate(&Value::var(0, "y"));
        let CompKind::Lam { m, .. } = &got.kind else { panic!() };
        assert_eq!(m.kind, CompKind::Return(Box::new(Value::var(1, "y"))));
        let printed = crate::print::comp(&got, &["y".to_string()]);
        assert_eq!(printed, "(lambda (y' (unit)) (return y))");
    }

    #[test]
    fn alpha_equivalence() {
        let a = parse_comp("(lambda (x (unit)) (lambda (y (unit)) (return x)))", &scope(&[])).unwrap();
        let b = parse_comp("(lambda (y (unit)) (lambda (x (unit)) (return y)))", &scope(&[])).unwrap();
        let c = parse_comp("(lambda (y (unit)) (lambda (x (unit)) (return x)))", &scope(&[])).unwrap();
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
        assert!(!alpha_eq(&Value::konst("c"), &Value::konst("d")));
    }

    #[test]
    fn erasure_examples() {
        let s = scope(&[]);
        let t = parse_vtype("(ref v (unit) (top))", &s).unwrap();
        assert_eq!(t.erase(), VType::Unit);
        let t = parse_vtype("(sigma (x (ref v (base int) (pos v))) (U (F (ref v (unit) (pos x)))))", &s).unwrap();
        let want = parse_vtype("(sigma (x (base int)) (U (F (unit))))", &s).unwrap();
        assert_eq!(t.erase(), want);
        assert!(is_underlying(&want));
        assert!(!is_underlying(&t));
    }
}
