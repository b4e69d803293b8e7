//! Abstract syntax for both layers of the type system.
//!
//! Variables are de Bruijn indices (0 is the innermost binder). Binder names
//! and source positions are carried for printing and diagnostics only: they
//! never take part in equality or hashing, so the derived `PartialEq` on every
//! syntax type is alpha-equivalence.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// A surface name attached to a binder or variable occurrence.
#[derive(Clone)]
pub struct Name(pub Arc<str>);

impl Name {
    pub fn new(s: &str) -> Name {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Name {
    fn eq(&self, _: &Name) -> bool {
        true
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// 1-based line and column of the first character of a form.
#[derive(Clone, Copy, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

impl Hash for Pos {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Value types. `Refine` only occurs in the refinement layer and its base is
/// always `Unit` or `Base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VType {
    Unit,
    Base { name: String, arg: Value },
    Sigma { x: Name, a: Box<VType>, b: Box<VType> },
    U(Box<CType>),
    Sum(Box<VType>, Box<VType>),
    Refine { v: Name, base: Box<VType>, p: Box<Formula> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CType {
    F(Box<VType>),
    Pi { x: Name, a: Box<VType>, c: Box<CType> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Value {
    pub pos: Pos,
    pub kind: ValueKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValueKind {
    Var { idx: usize, name: Name },
    Const(String),
    Star,
    /// `⟨V, W⟩_{(x:A).B}`
    Pair { fst: Box<Value>, snd: Box<Value>, x: Name, a: Box<VType>, b: Box<VType> },
    Thunk(Box<Comp>),
    Inl { a: Box<VType>, b: Box<VType>, v: Box<Value> },
    Inr { a: Box<VType>, b: Box<VType>, v: Box<Value> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Comp {
    pub pos: Pos,
    pub kind: CompKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CompKind {
    Return(Box<Value>),
    /// `M to x:A in_C N`; `N` is under `x`, `C` is not.
    To { m: Box<Comp>, x: Name, a: Box<VType>, c: Box<CType>, n: Box<Comp> },
    Force { c: Box<CType>, v: Box<Value> },
    Lam { x: Name, a: Box<VType>, m: Box<Comp> },
    /// `M(V)_{(x:A).C}`; `C` is under `x`.
    App { m: Box<Comp>, v: Box<Value>, x: Name, a: Box<VType>, c: Box<CType> },
    /// `pm V as (x:A, y:B) in_{z.C} M`; `B` is under `x`, `C` under `z`, `M` under `x, y`.
    Match {
        v: Box<Value>,
        x: Name,
        a: Box<VType>,
        y: Name,
        b: Box<VType>,
        z: Name,
        c: Box<CType>,
        m: Box<Comp>,
    },
    /// `case V of_{z.C} (inl (x:A) ↦ M, inr (y:B) ↦ N)`.
    Case {
        v: Box<Value>,
        z: Name,
        c: Box<CType>,
        x: Name,
        a: Box<VType>,
        m: Box<Comp>,
        y: Name,
        b: Box<VType>,
        n: Box<Comp>,
    },
    /// `μx:UC. M`; the binder's type is stored as `C`.
    Mu { x: Name, c: Box<CType>, m: Box<Comp> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall { x: Name, a: Box<VType>, p: Box<Formula> },
    Eq { a: Box<VType>, l: Box<Value>, r: Box<Value> },
    Atom { pred: String, arg: Box<Value> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Value(VType),
    Comp(CType),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Value(Value),
    Comp(Comp),
}

impl Term {
    pub fn pos(&self) -> Pos {
        match self {
            Term::Value(v) => v.pos,
            Term::Comp(m) => m.pos,
        }
    }
}

/// A context `x₁:A₁, …, xₙ:Aₙ`, outermost first. Each type is scoped over
/// the entries before it.
pub type Context = Vec<(Name, VType)>;

/// Atoms written in model declarations. `Ret` and `Bot` are resolved against
/// the monad chosen when the model is loaded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Den {
    Int(i64),
    Sym(String),
    Unit,
    Star,
    Pair(Box<Den>, Box<Den>),
    Inl(Box<Den>),
    Inr(Box<Den>),
    Just(Box<Den>),
    Set(Vec<Den>),
    Fun(Vec<(Den, Den)>),
    Ret(Box<Den>),
    Bot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CarrierSpec {
    /// Carrier of a base type over the unit argument.
    Flat(Vec<Den>),
    /// One carrier per argument value.
    Indexed(Vec<(Den, Vec<Den>)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    BaseType { name: String, arg: VType, carrier: CarrierSpec },
    Const { name: String, ty: VType, den: Den },
    Pred { name: String, arg: VType, den: Vec<Den> },
    Def { name: String, ctx: Context, ty: Type, term: Term },
    /// A subtyping assertion `Γ ⊢ A <: B`.
    Check { name: String, ctx: Context, lhs: Type, rhs: Type },
    Monad { monad: String, lifting: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub pos: Pos,
    pub item: Item,
}

impl Decl {
    pub fn name(&self) -> Option<&str> {
        match &self.item {
            Item::BaseType { name, .. }
            | Item::Const { name, .. }
            | Item::Pred { name, .. }
            | Item::Def { name, .. }
            | Item::Check { name, .. } => Some(name),
            Item::Monad { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<Decl>,
}

impl Program {
    pub fn monad_form(&self) -> Option<(&str, &str)> {
        self.decls.iter().find_map(|d| match &d.item {
            Item::Monad { monad, lifting } => Some((monad.as_str(), lifting.as_str())),
            _ => None,
        })
    }
}

impl Value {
    pub fn new(kind: ValueKind) -> Value {
        Value { pos: Pos::default(), kind }
    }

    pub fn at(pos: Pos, kind: ValueKind) -> Value {
        Value { pos, kind }
    }

    pub fn var(idx: usize, name: &str) -> Value {
        Value::new(ValueKind::Var { idx, name: Name::new(name) })
    }

    pub fn star() -> Value {
        Value::new(ValueKind::Star)
    }

    pub fn konst(name: &str) -> Value {
        Value::new(ValueKind::Const(name.to_string()))
    }
}

impl Comp {
    pub fn new(kind: CompKind) -> Comp {
        Comp { pos: Pos::default(), kind }
    }

    pub fn at(pos: Pos, kind: CompKind) -> Comp {
        Comp { pos, kind }
    }
}

impl VType {
    pub fn base(name: &str) -> VType {
        VType::Base { name: name.to_string(), arg: Value::star() }
    }

    pub fn refine(v: &str, base: VType, p: Formula) -> VType {
        VType::Refine { v: Name::new(v), base: Box::new(base), p: Box::new(p) }
    }

    pub fn is_refined(&self) -> bool {
        matches!(self, VType::Refine { .. })
    }
}
