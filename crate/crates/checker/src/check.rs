//! Algorithmic checking for both layers.
//!
//! Every term former carries enough annotations to synthesize its type, so
//! checking a term against a type is synthesis followed by one comparison:
//! definitional type equality in the underlying layer, subtyping in the
//! refinement layer. Variables of base type are selfified in the refinement
//! layer. Definitional equality of values is decided by comparing their
//! denotations in the loaded model.

use std::collections::BTreeMap;
use std::fmt;

use reftc_core::Atom;
use reftc_interp::{env_values, ModelEnv, MuRefusal};
use reftc_lang::ops::is_underlying;
use reftc_lang::print;
use reftc_lang::{
    CType, Comp, CompKind, Context, Erase, Formula, Item, Name, Pos, Program, Syntax, Term, Type, VType, Value,
    ValueKind,
};

use crate::judgement::{Derivation, Judgement};

pub const E_WF: &str = "E-WF";
pub const E_TYPE: &str = "E-TYPE";
pub const E_SUBTYPE: &str = "E-SUBTYPE";
pub const E_MU: &str = "E-MU";
pub const E_INTERP: &str = "E-INTERP";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckError {
    pub code: &'static str,
    pub pos: Pos,
    pub msg: String,
}

impl CheckError {
    fn new(code: &'static str, pos: Pos, msg: impl Into<String>) -> CheckError {
        CheckError { code, pos, msg: msg.into() }
    }
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.code, self.msg)
    }
}

impl std::error::Error for CheckError {}

pub type Check<T> = Result<T, CheckError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layer {
    Underlying,
    Refinement,
}

impl Layer {
    pub fn name(self) -> &'static str {
        match self {
            Layer::Underlying => "underlying",
            Layer::Refinement => "refinement",
        }
    }

    pub fn parse(s: &str) -> Option<Layer> {
        match s {
            "underlying" => Some(Layer::Underlying),
            "refinement" | "refined" => Some(Layer::Refinement),
            _ => None,
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Declared types of base type constructors, constants and predicates.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    pub bases: BTreeMap<String, VType>,
    pub consts: BTreeMap<String, VType>,
    pub preds: BTreeMap<String, VType>,
}

impl Signature {
    pub fn of_program(prog: &Program) -> Signature {
        let mut sig = Signature::default();
        for d in &prog.decls {
            match &d.item {
                Item::BaseType { name, arg, .. } => {
                    sig.bases.insert(name.clone(), arg.clone());
                }
                Item::Const { name, ty, .. } => {
                    sig.consts.insert(name.clone(), ty.clone());
                }
                Item::Pred { name, arg, .. } => {
                    sig.preds.insert(name.clone(), arg.clone());
                }
                _ => {}
            }
        }
        sig
    }
}

/// A subtyping judgement the checker derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtypeRecord {
    pub ctx: Context,
    pub lhs: Type,
    pub rhs: Type,
}

fn push(ctx: &Context, x: &Name, a: &VType) -> Context {
    let mut out = ctx.clone();
    out.push((x.clone(), a.clone()));
    out
}

/// `⟪Γ⟫`: the conjunction of the refinements of `Γ`, as a formula over `|Γ|`.
pub fn collected(ctx: &Context) -> Formula {
    let n = ctx.len();
    let mut out = Formula::Top;
    for (i, (_, a)) in ctx.iter().enumerate() {
        if let VType::Refine { p, .. } = a {
            let p = p.weaken(n - 1 - i);
            out = match out {
                Formula::Top => p,
                prev => Formula::And(Box::new(prev), Box::new(p)),
            };
        }
    }
    out
}

/// Renders an environment of `names` as `x=0, y=1`.
pub fn render_env(names: &[String], env: &Atom) -> String {
    let values = env_values(env);
    if values.is_empty() {
        return "the empty environment".into();
    }
    names
        .iter()
        .zip(values.iter())
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// The base and predicate of a type read as a refinement: bare `1` and
/// `b(V)` are `⊤`-refinements.
fn as_refinement(a: &VType) -> Option<(&VType, Formula)> {
    match a {
        VType::Unit | VType::Base { .. } => Some((a, Formula::Top)),
        VType::Refine { base, p, .. } => Some((base, (**p).clone())),
        _ => None,
    }
}

pub struct Checker<'a> {
    sig: &'a Signature,
    model: &'a ModelEnv,
    layer: Layer,
    log: Vec<SubtypeRecord>,
}

impl<'a> Checker<'a> {
    pub fn new(sig: &'a Signature, model: &'a ModelEnv, layer: Layer) -> Checker<'a> {
        Checker { sig, model, layer, log: Vec::new() }
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    /// Subtyping judgements derived so far.
    pub fn subtype_log(&self) -> &[SubtypeRecord] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<SubtypeRecord> {
        std::mem::take(&mut self.log)
    }

    fn under(&self) -> Checker<'a> {
        Checker::new(self.sig, self.model, Layer::Underlying)
    }

    fn interp<T>(&self, pos: Pos, r: reftc_interp::Result<T>) -> Check<T> {
        r.map_err(|e| CheckError::new(E_INTERP, pos, e.to_string()))
    }

    fn show_v(ctx: &Context, a: &VType) -> String {
        print::vtype(a, &print::context_names(ctx))
    }

    fn show_c(ctx: &Context, c: &CType) -> String {
        print::ctype(c, &print::context_names(ctx))
    }

    // ---- well-formedness ----

    pub fn wf_ctx(&mut self, ctx: &Context, pos: Pos) -> Check<Derivation> {
        let mut d = Derivation::leaf("ctx-empty", Judgement::Ctx(Vec::new()));
        for k in 0..ctx.len() {
            let prefix = ctx[..k].to_vec();
            let da = self.wf_vtype(&prefix, &ctx[k].1, pos)?;
            d = Derivation::new("ctx-ext", Judgement::Ctx(ctx[..=k].to_vec()), vec![d, da]);
        }
        Ok(d)
    }

    pub fn wf_vtype(&mut self, ctx: &Context, a: &VType, pos: Pos) -> Check<Derivation> {
        let j = Judgement::VType(ctx.clone(), a.clone());
        Ok(match a {
            VType::Unit => Derivation::leaf("wf-unit", j),
            VType::Base { name, arg } => {
                let arg_ty = self
                    .sig
                    .bases
                    .get(name)
                    .ok_or_else(|| CheckError::new(E_WF, pos, format!("unknown base type `{name}`")))?
                    .clone();
                let d = self.under().check_value(&ctx.erase(), arg, &arg_ty)?;
                Derivation::new("wf-base", j, vec![d])
            }
            VType::Sigma { x, a: a1, b } => {
                let da = self.wf_vtype(ctx, a1, pos)?;
                let db = self.wf_vtype(&push(ctx, x, a1), b, pos)?;
                Derivation::new("wf-sigma", j, vec![da, db])
            }
            VType::U(c) => {
                let d = self.wf_ctype(ctx, c, pos)?;
                Derivation::new("wf-U", j, vec![d])
            }
            VType::Sum(l, r) => {
                let dl = self.wf_vtype(ctx, l, pos)?;
                let dr = self.wf_vtype(ctx, r, pos)?;
                Derivation::new("wf-sum", j, vec![dl, dr])
            }
            VType::Refine { v, base, p } => {
                if self.layer == Layer::Underlying {
                    return Err(CheckError::new(
                        E_WF,
                        pos,
                        format!("refinement type {} in the underlying layer", Self::show_v(ctx, a)),
                    ));
                }
                if !matches!(**base, VType::Unit | VType::Base { .. }) {
                    return Err(CheckError::new(E_WF, pos, "only the unit type and base types can be refined"));
                }
                let d = self.wf_vtype(ctx, base, pos)?;
                self.wf_formula(&push(&ctx.erase(), v, &base.erase()), p, pos)?;
                Derivation::new("wf-refine", j, vec![d])
            }
        })
    }

    pub fn wf_ctype(&mut self, ctx: &Context, c: &CType, pos: Pos) -> Check<Derivation> {
        let j = Judgement::CType(ctx.clone(), c.clone());
        Ok(match c {
            CType::F(a) => {
                let d = self.wf_vtype(ctx, a, pos)?;
                Derivation::new("wf-F", j, vec![d])
            }
            CType::Pi { x, a, c: body } => {
                let da = self.wf_vtype(ctx, a, pos)?;
                let dc = self.wf_ctype(&push(ctx, x, a), body, pos)?;
                Derivation::new("wf-pi", j, vec![da, dc])
            }
        })
    }

    pub fn wf_type(&mut self, ctx: &Context, t: &Type, pos: Pos) -> Check<Derivation> {
        match t {
            Type::Value(a) => self.wf_vtype(ctx, a, pos),
            Type::Comp(c) => self.wf_ctype(ctx, c, pos),
        }
    }

    /// Formulas live over the erased context; their terms are checked in the
    /// underlying layer.
    pub fn wf_formula(&mut self, ctx: &Context, p: &Formula, pos: Pos) -> Check<()> {
        let mut u = self.under();
        match p {
            Formula::Top => Ok(()),
            Formula::And(l, r) | Formula::Implies(l, r) => {
                self.wf_formula(ctx, l, pos)?;
                self.wf_formula(ctx, r, pos)
            }
            Formula::Forall { x, a, p } => {
                let a = a.erase();
                u.wf_vtype(ctx, &a, pos)?;
                self.wf_formula(&push(ctx, x, &a), p, pos)
            }
            Formula::Eq { a, l, r } => {
                let a = a.erase();
                u.wf_vtype(ctx, &a, pos)?;
                u.check_value(ctx, l, &a)?;
                u.check_value(ctx, r, &a)?;
                Ok(())
            }
            Formula::Atom { pred, arg } => {
                let arg_ty = self
                    .sig
                    .preds
                    .get(pred)
                    .ok_or_else(|| CheckError::new(E_WF, pos, format!("unknown predicate `{pred}`")))?
                    .clone();
                u.check_value(ctx, arg, &arg_ty)?;
                Ok(())
            }
        }
    }

    // ---- values ----

    pub fn synth_value(&mut self, ctx: &Context, v: &Value) -> Check<(VType, Derivation)> {
        let pos = v.pos;
        let (a, rule, premises) = match &v.kind {
            ValueKind::Var { idx, name } => {
                let n = ctx.len();
                if *idx >= n {
                    return Err(CheckError::new(E_WF, pos, format!("variable `{name}` is not in scope")));
                }
                let a = ctx[n - 1 - idx].1.weaken(idx + 1);
                let base = match &a {
                    VType::Base { .. } => Some(a.clone()),
                    VType::Refine { base, .. } if matches!(**base, VType::Base { .. }) => Some((**base).clone()),
                    _ => None,
                };
                match base {
                    Some(b) if self.layer == Layer::Refinement => {
                        // {v : b(V) | v = x}
                        let p = Formula::Eq {
                            a: Box::new(b.weaken(1)),
                            l: Box::new(Value::var(0, "v")),
                            r: Box::new(Value::at(pos, ValueKind::Var { idx: idx + 1, name: name.clone() })),
                        };
                        let selfified = VType::Refine { v: Name::new("v"), base: Box::new(b), p: Box::new(p) };
                        (selfified, "var-self", Vec::new())
                    }
                    _ => (a, "var", Vec::new()),
                }
            }
            ValueKind::Const(c) => {
                let ty = self
                    .sig
                    .consts
                    .get(c)
                    .ok_or_else(|| CheckError::new(E_WF, pos, format!("unknown constant `{c}`")))?;
                let ty = match self.layer {
                    Layer::Underlying => ty.erase(),
                    Layer::Refinement => ty.clone(),
                };
                (ty, "const", Vec::new())
            }
            ValueKind::Star => (VType::Unit, "unit", Vec::new()),
            ValueKind::Pair { fst, snd, x, a, b } => {
                let sigma = VType::Sigma { x: x.clone(), a: a.clone(), b: b.clone() };
                let dw = self.wf_vtype(ctx, &sigma, pos)?;
                let d1 = self.check_value(ctx, fst, a)?;
                let d2 = self.check_value(ctx, snd, &b.instantiate(fst))?;
                (sigma, "pair", vec![dw, d1, d2])
            }
            ValueKind::Thunk(m) => {
                let (c, d) = self.synth_comp(ctx, m)?;
                (VType::U(Box::new(c)), "thunk", vec![d])
            }
            ValueKind::Inl { a, b, v: inner } | ValueKind::Inr { a, b, v: inner } => {
                let sum = VType::Sum(a.clone(), b.clone());
                let dw = self.wf_vtype(ctx, &sum, pos)?;
                let left = matches!(v.kind, ValueKind::Inl { .. });
                let d = self.check_value(ctx, inner, if left { a } else { b })?;
                (sum, if left { "inl" } else { "inr" }, vec![dw, d])
            }
        };
        let d = Derivation::new(rule, Judgement::Value(ctx.clone(), v.clone(), a.clone()), premises);
        Ok((a, d))
    }

    pub fn check_value(&mut self, ctx: &Context, v: &Value, a: &VType) -> Check<Derivation> {
        let (s, d) = self.synth_value(ctx, v)?;
        if s == *a {
            return Ok(d);
        }
        let j = Judgement::Value(ctx.clone(), v.clone(), a.clone());
        let e = self.compare(ctx, &Type::Value(s), &Type::Value(a.clone()), v.pos)?;
        Ok(Derivation::new(self.conversion_rule(), j, vec![d, e]))
    }

    fn conversion_rule(&self) -> &'static str {
        match self.layer {
            Layer::Underlying => "conv",
            Layer::Refinement => "sub",
        }
    }

    /// Type equality in the underlying layer, subtyping in the refinement layer.
    fn compare(&mut self, ctx: &Context, found: &Type, expected: &Type, pos: Pos) -> Check<Derivation> {
        match self.layer {
            Layer::Underlying => {
                if self.type_eq(ctx, found, expected, pos)? {
                    Ok(Derivation::leaf("ty-eq", Judgement::TypeEq(ctx.clone(), found.clone(), expected.clone())))
                } else {
                    let names = print::context_names(ctx);
                    Err(CheckError::new(
                        E_TYPE,
                        pos,
                        format!("expected type {}, found {}", print::ty(expected, &names), print::ty(found, &names)),
                    ))
                }
            }
            Layer::Refinement => match (found, expected) {
                (Type::Value(a), Type::Value(b)) => self.subtype(ctx, a, b, pos),
                (Type::Comp(c), Type::Comp(d)) => self.subtype_comp(ctx, c, d, pos),
                _ => Err(CheckError::new(E_TYPE, pos, "value type compared with a computation type")),
            },
        }
    }

    // ---- computations ----

    pub fn synth_comp(&mut self, ctx: &Context, m: &Comp) -> Check<(CType, Derivation)> {
        let pos = m.pos;
        let (c, rule, premises): (CType, &'static str, Vec<Derivation>) = match &m.kind {
            CompKind::Return(v) => {
                let (a, d) = self.synth_value(ctx, v)?;
                (CType::F(Box::new(a)), "return", vec![d])
            }
            CompKind::To { m: first, x, a, c, n } => {
                let da = self.wf_vtype(ctx, a, pos)?;
                let dc = self.wf_ctype(ctx, c, pos)?;
                let dm = self.check_comp(ctx, first, &CType::F(a.clone()))?;
                let dn = self.check_comp(&push(ctx, x, a), n, &c.weaken(1))?;
                ((**c).clone(), "to", vec![da, dc, dm, dn])
            }
            CompKind::Force { c, v } => {
                let dc = self.wf_ctype(ctx, c, pos)?;
                let (found, _) = self.synth_value(ctx, v)?;
                if !matches!(found, VType::U(_)) {
                    return Err(CheckError::new(
                        E_TYPE,
                        v.pos,
                        format!(
                            "`force` needs a thunk of type (U {}), but the value has type {}",
                            Self::show_c(ctx, c),
                            Self::show_v(ctx, &found)
                        ),
                    ));
                }
                let dv = self.check_value(ctx, v, &VType::U(c.clone()))?;
                ((**c).clone(), "force", vec![dc, dv])
            }
            CompKind::Lam { x, a, m: body } => {
                let da = self.wf_vtype(ctx, a, pos)?;
                let (c, d) = self.synth_comp(&push(ctx, x, a), body)?;
                (CType::Pi { x: x.clone(), a: a.clone(), c: Box::new(c) }, "lambda", vec![da, d])
            }
            CompKind::App { m: f, v, x, a, c } => {
                let pi = CType::Pi { x: x.clone(), a: a.clone(), c: c.clone() };
                let dw = self.wf_ctype(ctx, &pi, pos)?;
                let dm = self.check_comp(ctx, f, &pi)?;
                let dv = self.check_value(ctx, v, a)?;
                (c.instantiate(v), "app", vec![dw, dm, dv])
            }
            CompKind::Match { v, x, a, y, b, z, c, m: body } => {
                let sigma = VType::Sigma { x: x.clone(), a: a.clone(), b: b.clone() };
                let dw = self.wf_vtype(ctx, &sigma, pos)?;
                let dc = self.wf_ctype(&push(ctx, z, &sigma), c, pos)?;
                let dv = self.check_value(ctx, v, &sigma)?;
                let inner = push(&push(ctx, x, a), y, b);
                let pair = Value::new(ValueKind::Pair {
                    fst: Box::new(Value::var(1, x.as_str())),
                    snd: Box::new(Value::var(0, y.as_str())),
                    x: x.clone(),
                    a: Box::new(a.weaken(2)),
                    b: Box::new(b.shift(2, 1)),
                });
                let dm = self.check_comp(&inner, body, &c.shift(2, 1).instantiate(&pair))?;
                (c.instantiate(v), "match", vec![dw, dc, dv, dm])
            }
            CompKind::Case { v, z, c, x, a, m: left, y, b, n: right } => {
                let sum = VType::Sum(a.clone(), b.clone());
                let dw = self.wf_vtype(ctx, &sum, pos)?;
                let dc = self.wf_ctype(&push(ctx, z, &sum), c, pos)?;
                let dv = self.check_value(ctx, v, &sum)?;
                let inj = |left: bool, name: &Name| {
                    let (a, b, v) = (Box::new(a.weaken(1)), Box::new(b.weaken(1)), Box::new(Value::var(0, name.as_str())));
                    Value::new(if left { ValueKind::Inl { a, b, v } } else { ValueKind::Inr { a, b, v } })
                };
                let dl = self.check_comp(&push(ctx, x, a), left, &c.shift(1, 1).instantiate(&inj(true, x)))?;
                let dr = self.check_comp(&push(ctx, y, b), right, &c.shift(1, 1).instantiate(&inj(false, y)))?;
                (c.instantiate(v), "case", vec![dw, dc, dv, dl, dr])
            }
            CompKind::Mu { x, c, m: body } => {
                let dc = self.wf_ctype(ctx, c, pos)?;
                let dm = self.check_comp(&push(ctx, x, &VType::U(c.clone())), body, &c.weaken(1))?;
                let refusal = self.model.mu_gate(ctx, c, body);
                if let Some(r) = self.interp(pos, refusal)? {
                    return Err(CheckError::new(E_MU, pos, Self::mu_message(ctx, &r)));
                }
                ((**c).clone(), "mu", vec![dc, dm])
            }
        };
        let d = Derivation::new(rule, Judgement::Comp(ctx.clone(), m.clone(), c.clone()), premises);
        Ok((c, d))
    }

    fn mu_message(ctx: &Context, r: &MuRefusal) -> String {
        let names = print::context_names(ctx);
        match r {
            MuRefusal::NotPointed { env, bottom } => format!(
                "recursion is unsound here: the least computation {bottom} is outside the type at {}",
                render_env(&names, env)
            ),
            MuRefusal::Escapes { env, value } => format!(
                "recursion is unsound here: the least fixed point {value} escapes the type at {}",
                render_env(&names, env)
            ),
            other => format!("recursion is unsound here: {other}"),
        }
    }

    pub fn check_comp(&mut self, ctx: &Context, m: &Comp, c: &CType) -> Check<Derivation> {
        let (s, d) = self.synth_comp(ctx, m)?;
        if s == *c {
            return Ok(d);
        }
        let j = Judgement::Comp(ctx.clone(), m.clone(), c.clone());
        let e = self.compare(ctx, &Type::Comp(s), &Type::Comp(c.clone()), m.pos)?;
        Ok(Derivation::new(self.conversion_rule(), j, vec![d, e]))
    }

    pub fn check_term(&mut self, ctx: &Context, t: &Term, ty: &Type) -> Check<Derivation> {
        match (t, ty) {
            (Term::Value(v), Type::Value(a)) => self.check_value(ctx, v, a),
            (Term::Comp(m), Type::Comp(c)) => self.check_comp(ctx, m, c),
            (Term::Value(_), Type::Comp(_)) => {
                Err(CheckError::new(E_TYPE, t.pos(), "a value cannot have a computation type"))
            }
            (Term::Comp(_), Type::Value(_)) => {
                Err(CheckError::new(E_TYPE, t.pos(), "a computation cannot have a value type"))
            }
        }
    }

    /// `Γ ⊢ t : T` for a definition, including well-formedness of `Γ` and `T`.
    pub fn check_def(&mut self, ctx: &Context, ty: &Type, t: &Term, pos: Pos) -> Check<Derivation> {
        let dg = self.wf_ctx(ctx, pos)?;
        let dt = self.wf_type(ctx, ty, pos)?;
        let d = self.check_term(ctx, t, ty)?;
        let j = d.judgement.clone();
        Ok(Derivation::new("def", j, vec![dg, dt, d]))
    }

    /// `Γ ⊢ A <: B` (or `A ≡ B` in the underlying layer) for a `check` item.
    pub fn check_assertion(&mut self, ctx: &Context, lhs: &Type, rhs: &Type, pos: Pos) -> Check<Derivation> {
        self.wf_ctx(ctx, pos)?;
        self.wf_type(ctx, lhs, pos)?;
        self.wf_type(ctx, rhs, pos)?;
        if matches!((lhs, rhs), (Type::Value(_), Type::Comp(_)) | (Type::Comp(_), Type::Value(_))) {
            return Err(CheckError::new(E_TYPE, pos, "value type compared with a computation type"));
        }
        self.compare(ctx, lhs, rhs, pos)
    }

    /// Derives an arbitrary judgement in this checker's layer.
    pub fn check_judgement(&mut self, j: &Judgement, pos: Pos) -> Check<Derivation> {
        let decided = |ok: bool, rule: &'static str| {
            if ok {
                Ok(Derivation::leaf(rule, j.clone()))
            } else {
                Err(CheckError::new(E_TYPE, pos, format!("not derivable: {j}")))
            }
        };
        match j {
            Judgement::Ctx(g) => self.wf_ctx(g, pos),
            Judgement::VType(g, a) => self.wf_vtype(g, a, pos),
            Judgement::CType(g, c) => self.wf_ctype(g, c, pos),
            Judgement::Value(g, v, a) => self.check_value(g, v, a),
            Judgement::Comp(g, m, c) => self.check_comp(g, m, c),
            Judgement::TypeEq(g, a, b) => decided(self.type_eq(g, a, b, pos)?, "ty-eq"),
            Judgement::ValueEq(g, v, w, a) => decided(self.defeq_value(g, v, w, a, pos)?, "val-eq"),
            Judgement::CtxSub(g, h) => self.ctx_subtype(g, h, pos),
            Judgement::VSub(g, a, b) => self.subtype(g, a, b, pos),
            Judgement::CSub(g, c, d) => self.subtype_comp(g, c, d, pos),
        }
    }

    // ---- subtyping ----

    pub fn subtype(&mut self, ctx: &Context, a: &VType, b: &VType, pos: Pos) -> Check<Derivation> {
        let j = Judgement::VSub(ctx.clone(), a.clone(), b.clone());
        let d = if a == b {
            Derivation::leaf("sub-refl", j)
        } else {
            match (a, b) {
                (VType::Sigma { x, a: a1, b: b1 }, VType::Sigma { a: a2, b: b2, .. }) => {
                    let da = self.subtype(ctx, a1, a2, pos)?;
                    let db = self.subtype(&push(ctx, x, a1), b1, b2, pos)?;
                    Derivation::new("sub-sigma", j, vec![da, db])
                }
                (VType::U(c1), VType::U(c2)) => {
                    let d = self.subtype_comp(ctx, c1, c2, pos)?;
                    Derivation::new("sub-U", j, vec![d])
                }
                (VType::Sum(a1, b1), VType::Sum(a2, b2)) => {
                    let da = self.subtype(ctx, a1, a2, pos)?;
                    let db = self.subtype(ctx, b1, b2, pos)?;
                    Derivation::new("sub-sum", j, vec![da, db])
                }
                _ => match (as_refinement(a), as_refinement(b)) {
                    (Some((ba, p)), Some((bb, q))) => {
                        if !self.base_eq(ctx, ba, bb, pos)? {
                            return Err(self.mismatch(ctx, a, b, pos));
                        }
                        if let Some(cex) = self.implication(ctx, ba, &p, &q, pos)? {
                            let mut names = print::context_names(ctx);
                            names.push("v".into());
                            return Err(CheckError::new(
                                E_SUBTYPE,
                                pos,
                                format!(
                                    "{} is not a subtype of {}: the implication fails at {}",
                                    Self::show_v(ctx, a),
                                    Self::show_v(ctx, b),
                                    render_env(&names, &cex)
                                ),
                            ));
                        }
                        Derivation::leaf("sub-refine", j)
                    }
                    _ => return Err(self.mismatch(ctx, a, b, pos)),
                },
            }
        };
        self.log.push(SubtypeRecord { ctx: ctx.clone(), lhs: Type::Value(a.clone()), rhs: Type::Value(b.clone()) });
        Ok(d)
    }

    pub fn subtype_comp(&mut self, ctx: &Context, c: &CType, d: &CType, pos: Pos) -> Check<Derivation> {
        let j = Judgement::CSub(ctx.clone(), c.clone(), d.clone());
        let out = if c == d {
            Derivation::leaf("sub-refl", j)
        } else {
            match (c, d) {
                (CType::F(a), CType::F(b)) => {
                    let s = self.subtype(ctx, a, b, pos)?;
                    Derivation::new("sub-F", j, vec![s])
                }
                (CType::Pi { a: a1, c: c1, .. }, CType::Pi { x, a: a2, c: c2 }) => {
                    let da = self.subtype(ctx, a2, a1, pos)?;
                    let dc = self.subtype_comp(&push(ctx, x, a2), c1, c2, pos)?;
                    Derivation::new("sub-pi", j, vec![da, dc])
                }
                _ => {
                    return Err(CheckError::new(
                        E_TYPE,
                        pos,
                        format!("expected type {}, found {}", Self::show_c(ctx, d), Self::show_c(ctx, c)),
                    ))
                }
            }
        };
        self.log.push(SubtypeRecord { ctx: ctx.clone(), lhs: Type::Comp(c.clone()), rhs: Type::Comp(d.clone()) });
        Ok(out)
    }

    /// `Γ₁ <: Γ₂`, entrywise under the left context.
    pub fn ctx_subtype(&mut self, g1: &Context, g2: &Context, pos: Pos) -> Check<Derivation> {
        if g1.len() != g2.len() {
            return Err(CheckError::new(E_TYPE, pos, "contexts of different lengths"));
        }
        let mut premises = Vec::new();
        for k in 0..g1.len() {
            premises.push(self.subtype(&g1[..k].to_vec(), &g1[k].1, &g2[k].1, pos)?);
        }
        Ok(Derivation::new("sub-ctx", Judgement::CtxSub(g1.clone(), g2.clone()), premises))
    }

    fn mismatch(&self, ctx: &Context, found: &VType, expected: &VType, pos: Pos) -> CheckError {
        CheckError::new(
            E_TYPE,
            pos,
            format!("expected type {}, found {}", Self::show_v(ctx, expected), Self::show_v(ctx, found)),
        )
    }

    fn base_eq(&mut self, ctx: &Context, a: &VType, b: &VType, pos: Pos) -> Check<bool> {
        match (a, b) {
            (VType::Unit, VType::Unit) => Ok(true),
            (VType::Base { name: n1, arg: v1 }, VType::Base { name: n2, arg: v2 }) => {
                if n1 != n2 {
                    return Ok(false);
                }
                let arg_ty = self.sig.bases.get(n1).cloned().unwrap_or(VType::Unit);
                self.defeq_value(&ctx.erase(), v1, v2, &arg_ty, pos)
            }
            _ => Ok(false),
        }
    }

    /// `Γ; v:A_u | p ⊢ q`, decided as `⟦|Γ|, v:A_u ⊢ ⟪Γ⟫ ∧ p⟧ ≤ ⟦|Γ|, v:A_u ⊢ q⟧`.
    /// Returns the first environment where the inclusion fails.
    pub fn implication(&self, ctx: &Context, base: &VType, p: &Formula, q: &Formula, pos: Pos) -> Check<Option<Atom>> {
        if *q == Formula::Top || p == q {
            return Ok(None);
        }
        let hyp = match (collected(ctx), p) {
            (Formula::Top, p) => p.clone(),
            (g, Formula::Top) => g.weaken(1),
            (g, p) => Formula::And(Box::new(g.weaken(1)), Box::new(p.clone())),
        };
        self.interp(pos, self.model.entailment_counterexample(ctx, base, &hyp, q))
    }

    // ---- definitional equality ----

    /// `Γ ⊢ V ≡ W : A`: syntactic equality up to renaming, else equality of
    /// denotations.
    pub fn defeq_value(&self, ctx: &Context, v: &Value, w: &Value, a: &VType, pos: Pos) -> Check<bool> {
        if v == w {
            return Ok(true);
        }
        self.interp(pos, self.model.values_equal(ctx, a, v, w))
    }

    pub fn defeq_term(&self, ctx: &Context, t: &Term, u: &Term, ty: &Type, pos: Pos) -> Check<bool> {
        if t == u {
            return Ok(true);
        }
        self.interp(pos, self.model.terms_equal(ctx, ty, t, u))
    }

    /// `Γ ⊢ A ≡ B`: structural, with base type indices compared by `defeq_value`.
    pub fn type_eq(&mut self, ctx: &Context, a: &Type, b: &Type, pos: Pos) -> Check<bool> {
        match (a, b) {
            (Type::Value(a), Type::Value(b)) => self.vtype_eq(ctx, a, b, pos),
            (Type::Comp(c), Type::Comp(d)) => self.ctype_eq(ctx, c, d, pos),
            _ => Ok(false),
        }
    }

    fn vtype_eq(&mut self, ctx: &Context, a: &VType, b: &VType, pos: Pos) -> Check<bool> {
        if a == b {
            return Ok(true);
        }
        Ok(match (a, b) {
            (VType::Base { .. }, VType::Base { .. }) => self.base_eq(ctx, a, b, pos)?,
            (VType::Sigma { x, a: a1, b: b1 }, VType::Sigma { a: a2, b: b2, .. }) => {
                self.vtype_eq(ctx, a1, a2, pos)? && self.vtype_eq(&push(ctx, x, a1), b1, b2, pos)?
            }
            (VType::U(c), VType::U(d)) => self.ctype_eq(ctx, c, d, pos)?,
            (VType::Sum(a1, b1), VType::Sum(a2, b2)) => {
                self.vtype_eq(ctx, a1, a2, pos)? && self.vtype_eq(ctx, b1, b2, pos)?
            }
            (VType::Refine { .. }, _) | (_, VType::Refine { .. }) => {
                let (ea, eb) = (a.erase(), b.erase());
                (ea != *a || eb != *b) && self.vtype_eq(ctx, &ea, &eb, pos)?
            }
            _ => false,
        })
    }

    fn ctype_eq(&mut self, ctx: &Context, c: &CType, d: &CType, pos: Pos) -> Check<bool> {
        if c == d {
            return Ok(true);
        }
        Ok(match (c, d) {
            (CType::F(a), CType::F(b)) => self.vtype_eq(ctx, a, b, pos)?,
            (CType::Pi { x, a: a1, c: c1 }, CType::Pi { a: a2, c: c2, .. }) => {
                self.vtype_eq(ctx, a1, a2, pos)? && self.ctype_eq(&push(ctx, x, a1), c1, c2, pos)?
            }
            _ => false,
        })
    }
}

/// Checks the declared types of the signature: base and predicate arguments
/// must be closed underlying types and constant types closed types of the
/// given layer.
pub fn check_signature(prog: &Program, sig: &Signature, model: &ModelEnv, layer: Layer) -> Check<()> {
    let mut ck = Checker::new(sig, model, layer);
    for d in &prog.decls {
        match &d.item {
            Item::BaseType { name, arg, .. } | Item::Pred { name, arg, .. } => {
                if !is_underlying(arg) {
                    return Err(CheckError::new(E_WF, d.pos, format!("the argument type of `{name}` must not be refined")));
                }
                ck.under().wf_vtype(&Vec::new(), arg, d.pos)?;
            }
            Item::Const { ty, .. } => {
                let ty = match layer {
                    Layer::Underlying => ty.erase(),
                    Layer::Refinement => ty.clone(),
                };
                ck.wf_vtype(&Vec::new(), &ty, d.pos)?;
            }
            _ => {}
        }
    }
    Ok(())
}
