//! Printer producing the concrete syntax accepted by [`crate::parse`].
//!
//! Binder names are kept when possible; a binder whose name is already in
//! scope is primed so that the output re-parses to the same tree.

use std::fmt::Write;

use crate::syntax::*;

struct Printer {
    names: Vec<String>,
    out: String,
}

impl Printer {
    fn new(vars: &[String]) -> Printer {
        Printer { names: vars.to_vec(), out: String::new() }
    }

    fn bind(&self, n: &Name) -> String {
        let mut s = n.as_str().to_string();
        while self.names.contains(&s) {
            s.push('\'');
        }
        s
    }

    fn under(&mut self, names: &[String], f: impl FnOnce(&mut Self)) {
        self.names.extend(names.iter().cloned());
        f(self);
        self.names.truncate(self.names.len() - names.len());
    }

    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn var(&mut self, idx: usize, name: &Name) {
        let s = match self.names.len().checked_sub(idx + 1) {
            Some(k) => self.names[k].clone(),
            None => name.as_str().to_string(),
        };
        self.push(&s);
    }

    /// Prints `(x A)` and returns the name chosen for `x`.
    fn binder(&mut self, x: &Name, a: &VType) -> String {
        let s = self.bind(x);
        write!(self.out, "({s} ").unwrap();
        self.vtype(a);
        self.push(")");
        s
    }

    fn vtype(&mut self, t: &VType) {
        match t {
            VType::Unit => self.push("(unit)"),
            VType::Base { name, arg } => {
                write!(self.out, "(base {name}").unwrap();
                if arg.kind != ValueKind::Star {
                    self.push(" ");
                    self.value(arg);
                }
                self.push(")");
            }
            VType::Sigma { x, a, b } => {
                self.push("(sigma ");
                let s = self.binder(x, a);
                self.push(" ");
                self.under(&[s], |p| p.vtype(b));
                self.push(")");
            }
            VType::U(c) => {
                self.push("(U ");
                self.ctype(c);
                self.push(")");
            }
            VType::Sum(a, b) => {
                self.push("(sum ");
                self.vtype(a);
                self.push(" ");
                self.vtype(b);
                self.push(")");
            }
            VType::Refine { v, base, p } => {
                let s = self.bind(v);
                write!(self.out, "(ref {s} ").unwrap();
                self.vtype(base);
                self.push(" ");
                self.under(&[s], |pr| pr.formula(p));
                self.push(")");
            }
        }
    }

    fn ctype(&mut self, c: &CType) {
        match c {
            CType::F(a) => {
                self.push("(F ");
                self.vtype(a);
                self.push(")");
            }
            CType::Pi { x, a, c } => {
                self.push("(pi ");
                let s = self.binder(x, a);
                self.push(" ");
                self.under(&[s], |p| p.ctype(c));
                self.push(")");
            }
        }
    }

    fn ty(&mut self, t: &Type) {
        match t {
            Type::Value(a) => self.vtype(a),
            Type::Comp(c) => self.ctype(c),
        }
    }

    fn injection(&mut self, tag: &str, a: &VType, b: &VType, v: &Value) {
        write!(self.out, "({tag} ").unwrap();
        self.vtype(a);
        self.push(" ");
        self.vtype(b);
        self.push(" ");
        self.value(v);
        self.push(")");
    }

    fn value(&mut self, v: &Value) {
        match &v.kind {
            ValueKind::Var { idx, name } => self.var(*idx, name),
            ValueKind::Const(c) => self.push(c),
            ValueKind::Star => self.push("(unit-val)"),
            ValueKind::Pair { fst, snd, x, a, b } => {
                self.push("(pair ");
                self.value(fst);
                self.push(" ");
                self.value(snd);
                let s = self.bind(x);
                write!(self.out, " ({s} ").unwrap();
                self.vtype(a);
                self.push(" ");
                self.under(&[s], |p| p.vtype(b));
                self.push("))");
            }
            ValueKind::Thunk(m) => {
                self.push("(thunk ");
                self.comp(m);
                self.push(")");
            }
            ValueKind::Inl { a, b, v } => self.injection("inl", a, b, v),
            ValueKind::Inr { a, b, v } => self.injection("inr", a, b, v),
        }
    }

    fn comp(&mut self, m: &Comp) {
        match &m.kind {
            CompKind::Return(v) => {
                self.push("(return ");
                self.value(v);
                self.push(")");
            }
            CompKind::To { m, x, a, c, n } => {
                self.push("(to ");
                self.comp(m);
                self.push(" ");
                let s = self.binder(x, a);
                self.push(" ");
                self.ctype(c);
                self.push(" ");
                self.under(&[s], |p| p.comp(n));
                self.push(")");
            }
            CompKind::Force { c, v } => {
                self.push("(force ");
                self.ctype(c);
                self.push(" ");
                self.value(v);
                self.push(")");
            }
            CompKind::Lam { x, a, m } => {
                self.push("(lambda ");
                let s = self.binder(x, a);
                self.push(" ");
                self.under(&[s], |p| p.comp(m));
                self.push(")");
            }
            CompKind::App { m, v, x, a, c } => {
                self.push("(app ");
                self.comp(m);
                self.push(" ");
                self.value(v);
                self.push(" ");
                let s = self.binder(x, a);
                self.push(" ");
                self.under(&[s], |p| p.ctype(c));
                self.push(")");
            }
            CompKind::Match { v, x, a, y, b, z, c, m } => {
                self.push("(match ");
                self.value(v);
                self.push(" ");
                let sx = self.binder(x, a);
                self.push(" ");
                let mut sy = String::new();
                self.under(&[sx.clone()], |p| sy = p.binder(y, b));
                let sz = self.bind(z);
                write!(self.out, " ({sz} ").unwrap();
                self.under(&[sz], |p| p.ctype(c));
                self.push(") ");
                self.under(&[sx, sy], |p| p.comp(m));
                self.push(")");
            }
            CompKind::Case { v, z, c, x, a, m, y, b, n } => {
                self.push("(case ");
                self.value(v);
                let sz = self.bind(z);
                write!(self.out, " ({sz} ").unwrap();
                self.under(&[sz], |p| p.ctype(c));
                self.push(") (");
                let sx = self.binder(x, a);
                self.push(" ");
                self.under(&[sx], |p| p.comp(m));
                self.push(") (");
                let sy = self.binder(y, b);
                self.push(" ");
                self.under(&[sy], |p| p.comp(n));
                self.push("))");
            }
            CompKind::Mu { x, c, m } => {
                self.push("(mu ");
                let s = self.bind(x);
                write!(self.out, "({s} (U ").unwrap();
                self.ctype(c);
                self.push(")) ");
                self.under(&[s], |p| p.comp(m));
                self.push(")");
            }
        }
    }

    fn formula(&mut self, p: &Formula) {
        match p {
            Formula::Top => self.push("(top)"),
            Formula::And(l, r) | Formula::Implies(l, r) => {
                self.push(if matches!(p, Formula::And(..)) { "(and " } else { "(implies " });
                self.formula(l);
                self.push(" ");
                self.formula(r);
                self.push(")");
            }
            Formula::Forall { x, a, p } => {
                self.push("(forall ");
                let s = self.binder(x, a);
                self.push(" ");
                self.under(&[s], |pr| pr.formula(p));
                self.push(")");
            }
            Formula::Eq { a, l, r } => {
                self.push("(eq ");
                self.vtype(a);
                self.push(" ");
                self.value(l);
                self.push(" ");
                self.value(r);
                self.push(")");
            }
            Formula::Atom { pred, arg } => {
                write!(self.out, "({pred} ").unwrap();
                self.value(arg);
                self.push(")");
            }
        }
    }

    /// Prints a context and leaves its variables in scope.
    fn context(&mut self, ctx: &Context) {
        self.push("(");
        for (k, (x, a)) in ctx.iter().enumerate() {
            if k > 0 {
                self.push(" ");
            }
            let s = self.binder(x, a);
            self.names.push(s);
        }
        self.push(")");
    }

    fn decl(&mut self, d: &Decl) {
        match &d.item {
            Item::BaseType { name, arg, carrier } => {
                write!(self.out, "(basetype {name} arg ").unwrap();
                self.vtype(arg);
                self.push(" carrier (");
                match carrier {
                    CarrierSpec::Flat(atoms) => self.push(&dens(atoms)),
                    CarrierSpec::Indexed(entries) => {
                        let parts: Vec<String> =
                            entries.iter().map(|(k, atoms)| format!("({} ({}))", den(k), dens(atoms))).collect();
                        self.push(&parts.join(" "));
                    }
                }
                self.push("))");
            }
            Item::Const { name, ty, den: d } => {
                write!(self.out, "(const {name} type ").unwrap();
                self.vtype(ty);
                write!(self.out, " denotes {})", den(d)).unwrap();
            }
            Item::Pred { name, arg, den: set } => {
                write!(self.out, "(pred {name} arg ").unwrap();
                self.vtype(arg);
                write!(self.out, " denotes ({}))", dens(set)).unwrap();
            }
            Item::Def { name, ctx, ty, term } => {
                write!(self.out, "(def {name} ").unwrap();
                self.context(ctx);
                self.push(" ");
                self.ty(ty);
                self.push(" ");
                match term {
                    Term::Value(v) => self.value(v),
                    Term::Comp(m) => self.comp(m),
                }
                self.push(")");
                self.names.clear();
            }
            Item::Check { name, ctx, lhs, rhs } => {
                write!(self.out, "(check {name} ").unwrap();
                self.context(ctx);
                self.push(" ");
                self.ty(lhs);
                self.push(" ");
                self.ty(rhs);
                self.push(")");
                self.names.clear();
            }
            Item::Monad { monad, lifting } => write!(self.out, "(monad {monad} {lifting})").unwrap(),
        }
    }
}

fn dens(ds: &[Den]) -> String {
    ds.iter().map(den).collect::<Vec<_>>().join(" ")
}

/// Prints an atom of the model language.
pub fn den(d: &Den) -> String {
    match d {
        Den::Int(n) => n.to_string(),
        Den::Sym(s) => s.clone(),
        Den::Unit => "(unit)".into(),
        Den::Star => "star".into(),
        Den::Pair(a, b) => format!("(pair {} {})", den(a), den(b)),
        Den::Inl(a) => format!("(inl {})", den(a)),
        Den::Inr(a) => format!("(inr {})", den(a)),
        Den::Just(a) => format!("(just {})", den(a)),
        Den::Set(xs) if xs.is_empty() => "(set)".into(),
        Den::Set(xs) => format!("(set {})", dens(xs)),
        Den::Fun(g) => {
            let parts: Vec<String> = g.iter().map(|(a, b)| format!("({} {})", den(a), den(b))).collect();
            if parts.is_empty() {
                "(fun)".into()
            } else {
                format!("(fun {})", parts.join(" "))
            }
        }
        Den::Ret(a) => format!("(ret {})", den(a)),
        Den::Bot => "(bot)".into(),
    }
}

/// Names of the variables of `ctx`, outermost first, as used for printing
/// phrases scoped over it.
pub fn context_names(ctx: &Context) -> Vec<String> {
    let mut p = Printer::new(&[]);
    for (x, _) in ctx {
        let s = p.bind(x);
        p.names.push(s);
    }
    p.names
}

pub fn vtype(t: &VType, vars: &[String]) -> String {
    let mut p = Printer::new(vars);
    p.vtype(t);
    p.out
}

pub fn ctype(c: &CType, vars: &[String]) -> String {
    let mut p = Printer::new(vars);
    p.ctype(c);
    p.out
}

pub fn ty(t: &Type, vars: &[String]) -> String {
    let mut p = Printer::new(vars);
    p.ty(t);
    p.out
}

pub fn value(v: &Value, vars: &[String]) -> String {
    let mut p = Printer::new(vars);
    p.value(v);
    p.out
}

pub fn comp(m: &Comp, vars: &[String]) -> String {
    let mut p = Printer::new(vars);
    p.comp(m);
    p.out
}

pub fn term(t: &Term, vars: &[String]) -> String {
    match t {
        Term::Value(v) => value(v, vars),
        Term::Comp(m) => comp(m, vars),
    }
}

pub fn formula(f: &Formula, vars: &[String]) -> String {
    let mut p = Printer::new(vars);
    p.formula(f);
    p.out
}

/// Prints `x₁:A₁, …` in surface syntax.
pub fn context(ctx: &Context) -> String {
    let mut p = Printer::new(&[]);
    p.context(ctx);
    p.out
}

pub fn decl(d: &Decl) -> String {
    let mut p = Printer::new(&[]);
    p.decl(d);
    p.out
}

/// One declaration per line.
pub fn program(prog: &Program) -> String {
    let mut out = String::new();
    for d in &prog.decls {
        out.push_str(&decl(d));
        out.push('\n');
    }
    out
}
