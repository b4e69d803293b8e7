//! Parser from S-expressions to the de Bruijn syntax tree.

use std::collections::HashSet;

use crate::error::{LangError, Result};
use crate::sexp::{read_all, Sexp};
use crate::syntax::*;

const RESERVED: &[&str] = &[
    "unit", "base", "sigma", "U", "sum", "ref", "F", "pi", "unit-val", "pair", "thunk", "inl", "inr",
    "return", "to", "force", "lambda", "app", "match", "case", "mu", "top", "and", "implies", "forall",
    "eq", "basetype", "const", "pred", "def", "check", "monad", "star",
];

#[derive(Default)]
struct Parser {
    bases: HashSet<String>,
    consts: HashSet<String>,
    preds: HashSet<String>,
    scope: Vec<String>,
}

fn syntax(s: &Sexp, msg: impl Into<String>) -> LangError {
    LangError::syntax(s.pos(), msg)
}

fn items(s: &Sexp, n: usize, shape: &str) -> Result<Vec<Sexp>> {
    match s.list() {
        Some(l) if l.len() == n => Ok(l.to_vec()),
        _ => Err(syntax(s, format!("expected {shape}"))),
    }
}

fn symbol(s: &Sexp) -> Result<String> {
    s.atom().map(str::to_string).ok_or_else(|| syntax(s, "expected a symbol"))
}

fn keyword(s: &Sexp, kw: &str) -> Result<()> {
    if s.atom() == Some(kw) {
        Ok(())
    } else {
        Err(syntax(s, format!("expected `{kw}`")))
    }
}

impl Parser {
    fn fresh_name(&self, s: &Sexp) -> Result<String> {
        let n = symbol(s)?;
        if n.parse::<i64>().is_ok() || RESERVED.contains(&n.as_str()) {
            return Err(syntax(s, format!("`{n}` cannot be used as a name")));
        }
        Ok(n)
    }

    fn binder_name(&self, s: &Sexp) -> Result<Name> {
        let n = self.fresh_name(s)?;
        if self.consts.contains(&n) {
            return Err(LangError::scope(s.pos(), format!("binder `{n}` shadows a constant")));
        }
        Ok(Name::new(&n))
    }

    fn under<T>(&mut self, names: &[&Name], f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        for n in names {
            self.scope.push(n.as_str().to_string());
        }
        let r = f(self);
        self.scope.truncate(self.scope.len() - names.len());
        r
    }

    /// `(x A)`
    fn binder(&mut self, s: &Sexp) -> Result<(Name, VType)> {
        let l = items(s, 2, "a binder `(name type)`")?;
        Ok((self.binder_name(&l[0])?, self.vtype(&l[1])?))
    }

    fn vtype(&mut self, s: &Sexp) -> Result<VType> {
        let l = s.list().ok_or_else(|| syntax(s, "expected a value type"))?;
        match s.head() {
            Some("unit") if l.len() == 1 => Ok(VType::Unit),
            Some("base") if l.len() == 2 || l.len() == 3 => {
                let name = symbol(&l[1])?;
                if !self.bases.contains(&name) {
                    return Err(LangError::scope(l[1].pos(), format!("unknown base type `{name}`")));
                }
                let arg = if l.len() == 3 { self.value(&l[2])? } else { Value::at(s.pos(), ValueKind::Star) };
                Ok(VType::Base { name, arg })
            }
            Some("sigma") if l.len() == 3 => {
                let (x, a) = self.binder(&l[1])?;
                let b = self.under(&[&x], |p| p.vtype(&l[2]))?;
                Ok(VType::Sigma { x, a: Box::new(a), b: Box::new(b) })
            }
            Some("U") if l.len() == 2 => Ok(VType::U(Box::new(self.ctype(&l[1])?))),
            Some("sum") if l.len() == 3 => Ok(VType::Sum(Box::new(self.vtype(&l[1])?), Box::new(self.vtype(&l[2])?))),
            Some("ref") if l.len() == 4 => {
                let v = self.binder_name(&l[1])?;
                let base = self.vtype(&l[2])?;
                if !matches!(base, VType::Unit | VType::Base { .. }) {
                    return Err(syntax(&l[2], "refinements apply to `(unit)` or a base type"));
                }
                let p = self.under(&[&v], |p| p.formula(&l[3]))?;
                Ok(VType::Refine { v, base: Box::new(base), p: Box::new(p) })
            }
            _ => Err(syntax(s, "malformed value type")),
        }
    }

    fn ctype(&mut self, s: &Sexp) -> Result<CType> {
        let l = s.list().ok_or_else(|| syntax(s, "expected a computation type"))?;
        match s.head() {
            Some("F") if l.len() == 2 => Ok(CType::F(Box::new(self.vtype(&l[1])?))),
            Some("pi") if l.len() == 3 => {
                let (x, a) = self.binder(&l[1])?;
                let c = self.under(&[&x], |p| p.ctype(&l[2]))?;
                Ok(CType::Pi { x, a: Box::new(a), c: Box::new(c) })
            }
            _ => Err(syntax(s, "malformed computation type")),
        }
    }

    fn ty(&mut self, s: &Sexp) -> Result<Type> {
        match s.head() {
            Some("F") | Some("pi") => Ok(Type::Comp(self.ctype(s)?)),
            _ => Ok(Type::Value(self.vtype(s)?)),
        }
    }

    fn value(&mut self, s: &Sexp) -> Result<Value> {
        let pos = s.pos();
        if let Some(name) = s.atom() {
            if let Some(k) = self.scope.iter().rev().position(|n| n == name) {
                return Ok(Value::at(pos, ValueKind::Var { idx: k, name: Name::new(name) }));
            }
            if self.consts.contains(name) {
                return Ok(Value::at(pos, ValueKind::Const(name.to_string())));
            }
            return Err(LangError::scope(pos, format!("unbound variable `{name}`")));
        }
        let l = s.list().expect("not an atom");
        let kind = match s.head() {
            Some("unit-val") if l.len() == 1 => ValueKind::Star,
            Some("pair") if l.len() == 4 => {
                let fst = self.value(&l[1])?;
                let snd = self.value(&l[2])?;
                let ann = items(&l[3], 3, "an annotation `(x A B)`")?;
                let x = self.binder_name(&ann[0])?;
                let a = self.vtype(&ann[1])?;
                let b = self.under(&[&x], |p| p.vtype(&ann[2]))?;
                ValueKind::Pair { fst: Box::new(fst), snd: Box::new(snd), x, a: Box::new(a), b: Box::new(b) }
            }
            Some("thunk") if l.len() == 2 => ValueKind::Thunk(Box::new(self.comp(&l[1])?)),
            Some(tag @ ("inl" | "inr")) if l.len() == 4 => {
                let a = Box::new(self.vtype(&l[1])?);
                let b = Box::new(self.vtype(&l[2])?);
                let v = Box::new(self.value(&l[3])?);
                if tag == "inl" {
                    ValueKind::Inl { a, b, v }
                } else {
                    ValueKind::Inr { a, b, v }
                }
            }
            _ => return Err(syntax(s, "malformed value")),
        };
        Ok(Value::at(pos, kind))
    }

    fn comp(&mut self, s: &Sexp) -> Result<Comp> {
        let pos = s.pos();
        let l = s.list().ok_or_else(|| syntax(s, "expected a computation"))?;
        let kind = match s.head() {
            Some("return") if l.len() == 2 => CompKind::Return(Box::new(self.value(&l[1])?)),
            Some("to") if l.len() == 5 => {
                let m = self.comp(&l[1])?;
                let (x, a) = self.binder(&l[2])?;
                let c = self.ctype(&l[3])?;
                let n = self.under(&[&x], |p| p.comp(&l[4]))?;
                CompKind::To { m: Box::new(m), x, a: Box::new(a), c: Box::new(c), n: Box::new(n) }
            }
            Some("force") if l.len() == 3 => {
                CompKind::Force { c: Box::new(self.ctype(&l[1])?), v: Box::new(self.value(&l[2])?) }
            }
            Some("lambda") if l.len() == 3 => {
                let (x, a) = self.binder(&l[1])?;
                let m = self.under(&[&x], |p| p.comp(&l[2]))?;
                CompKind::Lam { x, a: Box::new(a), m: Box::new(m) }
            }
            Some("app") if l.len() == 5 => {
                let m = self.comp(&l[1])?;
                let v = self.value(&l[2])?;
                let (x, a) = self.binder(&l[3])?;
                let c = self.under(&[&x], |p| p.ctype(&l[4]))?;
                CompKind::App { m: Box::new(m), v: Box::new(v), x, a: Box::new(a), c: Box::new(c) }
            }
            Some("match") if l.len() == 6 => {
                let v = self.value(&l[1])?;
                let (x, a) = self.binder(&l[2])?;
                let (y, b) = self.under(&[&x], |p| p.binder(&l[3]))?;
                let (z, c) = {
                    let zl = items(&l[4], 2, "a motive `(z C)`")?;
                    let z = self.binder_name(&zl[0])?;
                    let c = self.under(&[&z], |p| p.ctype(&zl[1]))?;
                    (z, c)
                };
                let m = self.under(&[&x, &y], |p| p.comp(&l[5]))?;
                CompKind::Match {
                    v: Box::new(v),
                    x,
                    a: Box::new(a),
                    y,
                    b: Box::new(b),
                    z,
                    c: Box::new(c),
                    m: Box::new(m),
                }
            }
            Some("case") if l.len() == 5 => {
                let v = self.value(&l[1])?;
                let zl = items(&l[2], 2, "a motive `(z C)`")?;
                let z = self.binder_name(&zl[0])?;
                let c = self.under(&[&z], |p| p.ctype(&zl[1]))?;
                let left = items(&l[3], 2, "a branch `((x A) M)`")?;
                let (x, a) = self.binder(&left[0])?;
                let m = self.under(&[&x], |p| p.comp(&left[1]))?;
                let right = items(&l[4], 2, "a branch `((y B) N)`")?;
                let (y, b) = self.binder(&right[0])?;
                let n = self.under(&[&y], |p| p.comp(&right[1]))?;
                CompKind::Case {
                    v: Box::new(v),
                    z,
                    c: Box::new(c),
                    x,
                    a: Box::new(a),
                    m: Box::new(m),
                    y,
                    b: Box::new(b),
                    n: Box::new(n),
                }
            }
            Some("mu") if l.len() == 3 => {
                let (x, ty) = self.binder(&l[1])?;
                let VType::U(c) = ty else {
                    return Err(syntax(&l[1], "the recursion variable must have a thunk type `(U C)`"));
                };
                let m = self.under(&[&x], |p| p.comp(&l[2]))?;
                CompKind::Mu { x, c, m: Box::new(m) }
            }
            _ => return Err(syntax(s, "malformed computation")),
        };
        Ok(Comp::at(pos, kind))
    }

    fn formula(&mut self, s: &Sexp) -> Result<Formula> {
        let l = s.list().ok_or_else(|| syntax(s, "expected a formula"))?;
        match s.head() {
            Some("top") if l.len() == 1 => Ok(Formula::Top),
            Some("and") if l.len() == 3 => Ok(Formula::And(Box::new(self.formula(&l[1])?), Box::new(self.formula(&l[2])?))),
            Some("implies") if l.len() == 3 => {
                Ok(Formula::Implies(Box::new(self.formula(&l[1])?), Box::new(self.formula(&l[2])?)))
            }
            Some("forall") if l.len() == 3 => {
                let (x, a) = self.binder(&l[1])?;
                let p = self.under(&[&x], |p| p.formula(&l[2]))?;
                Ok(Formula::Forall { x, a: Box::new(a), p: Box::new(p) })
            }
            Some("eq") if l.len() == 4 => Ok(Formula::Eq {
                a: Box::new(self.vtype(&l[1])?),
                l: Box::new(self.value(&l[2])?),
                r: Box::new(self.value(&l[3])?),
            }),
            Some(name) if l.len() == 2 && !RESERVED.contains(&name) => {
                if !self.preds.contains(name) {
                    return Err(LangError::scope(l[0].pos(), format!("unknown predicate `{name}`")));
                }
                Ok(Formula::Atom { pred: name.to_string(), arg: Box::new(self.value(&l[1])?) })
            }
            _ => Err(syntax(s, "malformed formula")),
        }
    }

    fn context(&mut self, s: &Sexp) -> Result<Context> {
        let l = s.list().ok_or_else(|| syntax(s, "expected a context `((x A) ...)`"))?;
        let mut ctx: Context = Vec::new();
        for b in l {
            let (x, a) = self.binder(b)?;
            if ctx.iter().any(|(y, _)| y.as_str() == x.as_str()) {
                return Err(LangError::scope(b.pos(), format!("variable `{x}` is declared twice")));
            }
            self.scope.push(x.as_str().to_string());
            ctx.push((x, a));
        }
        Ok(ctx)
    }

    fn decl(&mut self, s: &Sexp) -> Result<Decl> {
        let pos = s.pos();
        let item = match s.head() {
            Some("basetype") => {
                let l = items(s, 6, "`(basetype NAME arg TYPE carrier (...))`")?;
                let name = self.fresh_name(&l[1])?;
                keyword(&l[2], "arg")?;
                let arg = self.vtype(&l[3])?;
                keyword(&l[4], "carrier")?;
                let entries = l[5].list().ok_or_else(|| syntax(&l[5], "expected a carrier list"))?;
                let carrier = if arg == VType::Unit {
                    CarrierSpec::Flat(entries.iter().map(den).collect::<Result<_>>()?)
                } else {
                    CarrierSpec::Indexed(
                        entries
                            .iter()
                            .map(|e| {
                                let kv = items(e, 2, "an entry `(ARG (atoms ...))`")?;
                                let atoms = kv[1].list().ok_or_else(|| syntax(&kv[1], "expected an atom list"))?;
                                Ok((den(&kv[0])?, atoms.iter().map(den).collect::<Result<_>>()?))
                            })
                            .collect::<Result<_>>()?,
                    )
                };
                self.bases.insert(name.clone());
                Item::BaseType { name, arg, carrier }
            }
            Some("const") => {
                let l = items(s, 6, "`(const NAME type TYPE denotes DEN)`")?;
                let name = self.fresh_name(&l[1])?;
                keyword(&l[2], "type")?;
                let ty = self.vtype(&l[3])?;
                keyword(&l[4], "denotes")?;
                let d = den(&l[5])?;
                self.consts.insert(name.clone());
                Item::Const { name, ty, den: d }
            }
            Some("pred") => {
                let l = items(s, 6, "`(pred NAME arg TYPE denotes (...))`")?;
                let name = self.fresh_name(&l[1])?;
                keyword(&l[2], "arg")?;
                let arg = self.vtype(&l[3])?;
                keyword(&l[4], "denotes")?;
                let set = l[5].list().ok_or_else(|| syntax(&l[5], "expected a list of atoms"))?;
                let d = set.iter().map(den).collect::<Result<_>>()?;
                self.preds.insert(name.clone());
                Item::Pred { name, arg, den: d }
            }
            Some("def") => {
                let l = items(s, 5, "`(def NAME CONTEXT TYPE TERM)`")?;
                let name = self.fresh_name(&l[1])?;
                let ctx = self.context(&l[2])?;
                let r = (|| {
                    let ty = self.ty(&l[3])?;
                    let term = match ty {
                        Type::Value(_) => Term::Value(self.value(&l[4])?),
                        Type::Comp(_) => Term::Comp(self.comp(&l[4])?),
                    };
                    Ok(Item::Def { name, ctx: ctx.clone(), ty, term })
                })();
                self.scope.clear();
                r?
            }
            Some("check") => {
                let l = items(s, 5, "`(check NAME CONTEXT A B)`")?;
                let name = self.fresh_name(&l[1])?;
                let ctx = self.context(&l[2])?;
                let r = (|| {
                    let lhs = self.ty(&l[3])?;
                    let rhs = self.ty(&l[4])?;
                    if matches!(lhs, Type::Value(_)) != matches!(rhs, Type::Value(_)) {
                        return Err(syntax(&l[4], "both sides of a subtyping check must be of the same kind"));
                    }
                    Ok(Item::Check { name, ctx: ctx.clone(), lhs, rhs })
                })();
                self.scope.clear();
                r?
            }
            Some("monad") => {
                let l = items(s, 3, "`(monad MONAD LIFTING)`")?;
                Item::Monad { monad: symbol(&l[1])?, lifting: symbol(&l[2])? }
            }
            _ => return Err(syntax(s, "unknown top-level form")),
        };
        Ok(Decl { pos, item })
    }
}

fn den(s: &Sexp) -> Result<Den> {
    if let Some(a) = s.atom() {
        return Ok(match a.parse::<i64>() {
            Ok(n) => Den::Int(n),
            Err(_) if a == "star" => Den::Star,
            Err(_) => Den::Sym(a.to_string()),
        });
    }
    let l = s.list().expect("not an atom");
    let arg = |k: usize| den(&l[k]).map(Box::new);
    Ok(match (s.head(), l.len()) {
        (Some("unit"), 1) => Den::Unit,
        (Some("bot"), 1) => Den::Bot,
        (Some("pair"), 3) => Den::Pair(arg(1)?, arg(2)?),
        (Some("inl"), 2) => Den::Inl(arg(1)?),
        (Some("inr"), 2) => Den::Inr(arg(1)?),
        (Some("just"), 2) => Den::Just(arg(1)?),
        (Some("ret"), 2) => Den::Ret(arg(1)?),
        (Some("set"), _) => Den::Set(l[1..].iter().map(den).collect::<Result<_>>()?),
        (Some("fun"), _) => Den::Fun(
            l[1..]
                .iter()
                .map(|e| {
                    let kv = items(e, 2, "a graph entry `(ARG RESULT)`")?;
                    Ok((den(&kv[0])?, den(&kv[1])?))
                })
                .collect::<Result<_>>()?,
        ),
        _ => return Err(syntax(s, "malformed atom")),
    })
}

/// Parses a whole program.
pub fn parse_program(src: &str) -> Result<Program> {
    let mut p = Parser::default();
    let decls = read_all(src)?.iter().map(|s| p.decl(s)).collect::<Result<_>>()?;
    Ok(Program { decls })
}

/// Scope used to parse a standalone phrase: base types, constants and
/// predicates that may be referenced, and variables in scope (outermost first).
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub bases: Vec<String>,
    pub consts: Vec<String>,
    pub preds: Vec<String>,
    pub vars: Vec<String>,
}

impl Scope {
    /// Everything declared by `prog`.
    pub fn of_program(prog: &Program) -> Scope {
        let mut s = Scope::default();
        for d in &prog.decls {
            match &d.item {
                Item::BaseType { name, .. } => s.bases.push(name.clone()),
                Item::Const { name, .. } => s.consts.push(name.clone()),
                Item::Pred { name, .. } => s.preds.push(name.clone()),
                _ => {}
            }
        }
        s
    }

    fn parser(&self) -> Parser {
        Parser {
            bases: self.bases.iter().cloned().collect(),
            consts: self.consts.iter().cloned().collect(),
            preds: self.preds.iter().cloned().collect(),
            scope: self.vars.clone(),
        }
    }
}

fn one(src: &str) -> Result<Sexp> {
    let mut forms = read_all(src)?;
    match forms.len() {
        1 => Ok(forms.remove(0)),
        _ => Err(LangError::syntax(Pos { line: 1, col: 1 }, "expected exactly one form")),
    }
}

pub fn parse_vtype(src: &str, scope: &Scope) -> Result<VType> {
    scope.parser().vtype(&one(src)?)
}

pub fn parse_ctype(src: &str, scope: &Scope) -> Result<CType> {
    scope.parser().ctype(&one(src)?)
}

pub fn parse_value(src: &str, scope: &Scope) -> Result<Value> {
    scope.parser().value(&one(src)?)
}

pub fn parse_comp(src: &str, scope: &Scope) -> Result<Comp> {
    scope.parser().comp(&one(src)?)
}

pub fn parse_formula(src: &str, scope: &Scope) -> Result<Formula> {
    scope.parser().formula(&one(src)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;

    fn int_scope() -> Scope {
        Scope { bases: vec!["int".into()], ..Scope::default() }
    }

    #[test]
    fn unit_type() {
        assert_eq!(parse_vtype("(unit)", &Scope::default()).unwrap(), VType::Unit);
    }

    #[test]
    fn refinement_over_base() {
        let t = parse_vtype("(ref v (base int (unit-val)) (top))", &int_scope()).unwrap();
        assert_eq!(t, VType::refine("v", VType::base("int"), Formula::Top));
    }

    #[test]
    fn sequencing_node() {
        let s = Scope { vars: vec!["x".into()], ..Scope::default() };
        let m = parse_comp("(to (return x) (y (unit)) (F (unit)) (return y))", &s).unwrap();
        let CompKind::To { m, n, .. } = m.kind else { panic!("not a sequencing node") };
        assert_eq!(m.kind, CompKind::Return(Box::new(Value::var(0, "x"))));
        assert_eq!(n.kind, CompKind::Return(Box::new(Value::var(0, "y"))));
    }

    #[test]
    fn binders_resolve_to_indices() {
        let m = parse_comp("(lambda (x (unit)) (lambda (y (unit)) (return x)))", &Scope::default()).unwrap();
        let CompKind::Lam { m, .. } = m.kind else { panic!() };
        let CompKind::Lam { m, .. } = m.kind else { panic!() };
        assert_eq!(m.kind, CompKind::Return(Box::new(Value::var(1, "x"))));
    }

    #[test]
    fn scope_errors() {
        let e = parse_value("x", &Scope::default()).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Scope);
        let e = parse_vtype("(base nat)", &Scope::default()).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Scope);
        let e = parse_program("(def d ((x (unit)) (x (unit))) (unit) x)").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Scope);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_program("(def d ()\n  (unit) (bogus))").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        assert_eq!((e.pos.line, e.pos.col), (2, 10));
    }

    #[test]
    fn atoms() {
        let p = parse_program("(const c type (unit) denotes (fun (0 (ret (pair 1 star))) (1 (bot))))").unwrap();
        let Item::Const { den, .. } = &p.decls[0].item else { panic!() };
        assert_eq!(
            den,
            &Den::Fun(vec![
                (Den::Int(0), Den::Ret(Box::new(Den::Pair(Box::new(Den::Int(1)), Box::new(Den::Star))))),
                (Den::Int(1), Den::Bot),
            ])
        );
    }
}
