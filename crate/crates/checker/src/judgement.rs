//! Judgement forms and derivation trees.

use std::fmt;

use reftc_lang::print;
use reftc_lang::{CType, Comp, Context, Erase, Type, VType, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Judgement {
    /// `⊢ Γ`
    Ctx(Context),
    /// `Γ ⊢ A`
    VType(Context, VType),
    /// `Γ ⊢ C`
    CType(Context, CType),
    /// `Γ ⊢ V : A`
    Value(Context, Value, VType),
    /// `Γ ⊢ M : C`
    Comp(Context, Comp, CType),
    /// `Γ ⊢ A ≡ B`
    TypeEq(Context, Type, Type),
    /// `Γ ⊢ V ≡ W : A`
    ValueEq(Context, Value, Value, VType),
    /// `Γ₁ <: Γ₂`
    CtxSub(Context, Context),
    /// `Γ ⊢ A <: B`
    VSub(Context, VType, VType),
    /// `Γ ⊢ C <: D`
    CSub(Context, CType, CType),
}

impl Judgement {
    pub fn context(&self) -> &Context {
        match self {
            Judgement::Ctx(g)
            | Judgement::VType(g, _)
            | Judgement::CType(g, _)
            | Judgement::Value(g, _, _)
            | Judgement::Comp(g, _, _)
            | Judgement::TypeEq(g, _, _)
            | Judgement::ValueEq(g, _, _, _)
            | Judgement::CtxSub(g, _)
            | Judgement::VSub(g, _, _)
            | Judgement::CSub(g, _, _) => g,
        }
    }

    /// The judgement with every refinement dropped.
    pub fn erase(&self) -> Judgement {
        match self {
            Judgement::Ctx(g) => Judgement::Ctx(g.erase()),
            Judgement::VType(g, a) => Judgement::VType(g.erase(), a.erase()),
            Judgement::CType(g, c) => Judgement::CType(g.erase(), c.erase()),
            Judgement::Value(g, v, a) => Judgement::Value(g.erase(), v.erase(), a.erase()),
            Judgement::Comp(g, m, c) => Judgement::Comp(g.erase(), m.erase(), c.erase()),
            Judgement::TypeEq(g, a, b) => Judgement::TypeEq(g.erase(), a.erase(), b.erase()),
            Judgement::ValueEq(g, v, w, a) => Judgement::ValueEq(g.erase(), v.erase(), w.erase(), a.erase()),
            Judgement::CtxSub(g, h) => Judgement::CtxSub(g.erase(), h.erase()),
            Judgement::VSub(g, a, b) => Judgement::VSub(g.erase(), a.erase(), b.erase()),
            Judgement::CSub(g, c, d) => Judgement::CSub(g.erase(), c.erase(), d.erase()),
        }
    }
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.context();
        let names = print::context_names(g);
        let ctx = print::context(g);
        match self {
            Judgement::Ctx(_) => write!(f, "⊢ {ctx}"),
            Judgement::VType(_, a) => write!(f, "{ctx} ⊢ {}", print::vtype(a, &names)),
            Judgement::CType(_, c) => write!(f, "{ctx} ⊢ {}", print::ctype(c, &names)),
            Judgement::Value(_, v, a) => {
                write!(f, "{ctx} ⊢ {} : {}", print::value(v, &names), print::vtype(a, &names))
            }
            Judgement::Comp(_, m, c) => {
                write!(f, "{ctx} ⊢ {} : {}", print::comp(m, &names), print::ctype(c, &names))
            }
            Judgement::TypeEq(_, a, b) => write!(f, "{ctx} ⊢ {} ≡ {}", print::ty(a, &names), print::ty(b, &names)),
            Judgement::ValueEq(_, v, w, a) => write!(
                f,
                "{ctx} ⊢ {} ≡ {} : {}",
                print::value(v, &names),
                print::value(w, &names),
                print::vtype(a, &names)
            ),
            Judgement::CtxSub(_, h) => write!(f, "{ctx} <: {}", print::context(h)),
            Judgement::VSub(_, a, b) => {
                write!(f, "{ctx} ⊢ {} <: {}", print::vtype(a, &names), print::vtype(b, &names))
            }
            Judgement::CSub(_, c, d) => {
                write!(f, "{ctx} ⊢ {} <: {}", print::ctype(c, &names), print::ctype(d, &names))
            }
        }
    }
}

/// A derivation tree; `rule` names the last rule applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: &'static str,
    pub judgement: Judgement,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn new(rule: &'static str, judgement: Judgement, premises: Vec<Derivation>) -> Derivation {
        Derivation { rule, judgement, premises }
    }

    pub fn leaf(rule: &'static str, judgement: Judgement) -> Derivation {
        Derivation::new(rule, judgement, Vec::new())
    }

    /// Every node, breadth first.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = vec![self];
        let mut k = 0;
        while k < out.len() {
            let node = out[k];
            out.extend(node.premises.iter());
            k += 1;
        }
        out
    }

    pub fn uses(&self, rule: &str) -> bool {
        self.nodes().iter().any(|d| d.rule == rule)
    }

    pub fn size(&self) -> usize {
        self.nodes().len()
    }

    /// Indented rendering, one judgement per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        out.push_str(&format!("{:width$}[{}] {}\n", "", self.rule, self.judgement, width = depth * 2));
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }
}
