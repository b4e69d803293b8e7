//! Denotations of contexts, types and formulas in both layers, assembled from
//! the kernel's structural operations.

use reftc_core::effect::FibredMonad;
use reftc_core::kernel::{comprehend, fam_coprod, pi, reindex, section_from_fn, sigma};
use reftc_core::pred::{equality_carrier, equality_pred, forall_along, pull};
use reftc_core::refined::{coprod_refined, pi_refined, sigma_refined};
use reftc_core::{Atom, Carrier, Family, FinMap, Pred, RefinedObj};
use reftc_lang::{CType, Context, Erase, Formula, Term, Type, VType, Value};

use crate::error::{InterpError, Result};
use crate::eval::extend;
use crate::model::ModelEnv;

/// Largest total size of a family of dependent products over a context.
pub const FAMILY_LIMIT: usize = 1 << 21;

impl ModelEnv {
    /// `⟦|Γ|⟧`: the carrier of environments of the erased context.
    pub fn ctx_carrier(&self, ctx: &Context) -> Result<Carrier> {
        let mut carrier = Carrier::unit();
        for (_, a) in ctx {
            carrier = comprehend(&self.vfamily(&carrier, &a.erase())?).total;
        }
        Ok(carrier)
    }

    /// Every prefix carrier `⟦|Γ_{<k}|⟧` together with the family of the k-th entry.
    pub fn ctx_families(&self, ctx: &Context) -> Result<Vec<(Carrier, Family)>> {
        let mut carrier = Carrier::unit();
        let mut out = Vec::new();
        for (_, a) in ctx {
            let fam = self.vfamily(&carrier, &a.erase())?;
            let next = comprehend(&fam).total;
            out.push((carrier, fam));
            carrier = next;
        }
        Ok(out)
    }

    /// `⟦Γ⟧` in the refinement layer: the carrier `q⟦Γ⟧` and the predicate on it.
    pub fn ctx_refined(&self, ctx: &Context) -> Result<(Carrier, Pred)> {
        let mut carrier = Carrier::unit();
        let mut p = Pred::top(&carrier);
        for (_, a) in ctx {
            let obj = self.vrefined(&carrier, &p, a)?;
            carrier = comprehend(obj.family()).total;
            p = obj.q().clone();
        }
        Ok((carrier, p))
    }

    /// `⟦Γ; A⟧` for an underlying value type, as a family over `ctx`.
    pub fn vfamily(&self, ctx: &Carrier, a: &VType) -> Result<Family> {
        let key = (ctx.clone(), Type::Value(a.clone()));
        if let Some(f) = self.families.lock().expect("family cache").get(&key) {
            return Ok(f.clone());
        }
        let fam = match a {
            VType::Unit => Family::unit(ctx),
            VType::Base { name, arg } => {
                let b = self.base(name)?;
                // (s⟦V⟧)* {!̄}* ⟦b⟧
                let u = self.arg_map(ctx, &b.arg_family, arg)?;
                reindex(&u, &b.family)?
            }
            VType::Sigma { a, b, .. } => {
                let x = self.vfamily(ctx, a)?;
                let y = self.vfamily(&comprehend(&x).total, b)?;
                sigma(&x, &y)?.family
            }
            VType::U(c) => self.cfamily(ctx, c)?,
            VType::Sum(a, b) => fam_coprod(&self.vfamily(ctx, a)?, &self.vfamily(ctx, b)?)?.family,
            VType::Refine { base, .. } => self.vfamily(ctx, base)?,
        };
        self.families.lock().expect("family cache").insert(key, fam.clone());
        Ok(fam)
    }

    /// The carrier family of `⟦Γ; C⟧` over `ctx`.
    pub fn cfamily(&self, ctx: &Carrier, c: &CType) -> Result<Family> {
        let key = (ctx.clone(), Type::Comp(c.clone()));
        if let Some(f) = self.families.lock().expect("family cache").get(&key) {
            return Ok(f.clone());
        }
        let fam = match c {
            CType::F(a) => FibredMonad::new(self.monad()).on_family(&self.vfamily(ctx, a)?)?,
            CType::Pi { a, c, .. } => {
                let x = self.vfamily(ctx, a)?;
                let y = self.cfamily(&comprehend(&x).total, c)?;
                let mut total = 0usize;
                for (env, dom) in ctx.iter().zip(x.fibres()) {
                    let mut n = 1usize;
                    for a in dom.iter() {
                        let cod = y.fibre(&extend(env, a.clone())).map_or(0, Carrier::len);
                        n = n.saturating_mul(cod);
                    }
                    total = total.saturating_add(n);
                }
                if total > FAMILY_LIMIT {
                    return Err(reftc_core::Error::Unsupported(format!(
                        "a family of dependent products with {total} elements (limit {FAMILY_LIMIT})"
                    ))
                    .into());
                }
                pi(&x, &y)?
            }
        };
        self.families.lock().expect("family cache").insert(key, fam.clone());
        Ok(fam)
    }

    pub fn type_family(&self, ctx: &Carrier, t: &Type) -> Result<Family> {
        match t {
            Type::Value(a) => self.vfamily(ctx, a),
            Type::Comp(c) => self.cfamily(ctx, c),
        }
    }

    /// `{!̄} ∘ s⟦V⟧ : ctx → {⟦⋄; A⟧}`, sending `γ` to `((), V(γ))`.
    fn arg_map(&self, ctx: &Carrier, closed: &Family, v: &Value) -> Result<FinMap> {
        let total = comprehend(closed).total;
        let weakened = reindex(&FinMap::to_unit(ctx), closed)?;
        let s = section_from_fn(&weakened, |g| self.eval_value(g, v).map_err(core_err))?;
        let bang = FinMap::try_from_fn(s.cod(), &total, |e| Ok(Atom::pair(Atom::Unit, e.snd().expect("pair").clone())))?;
        Ok(bang.after(&s)?)
    }

    /// `⟦Γ; A⟧` in the refinement layer over the context `(ctx, p)`.
    pub fn vrefined(&self, ctx: &Carrier, p: &Pred, a: &VType) -> Result<RefinedObj> {
        if p.over() != ctx {
            return Err(InterpError::Unchecked("context predicate over the wrong carrier".into()));
        }
        Ok(match a {
            VType::Unit | VType::Base { .. } => RefinedObj::full(&self.vfamily(ctx, a)?, p)?,
            VType::Refine { base, p: phi, .. } => {
                let x = self.vfamily(ctx, base)?;
                let comp = comprehend(&x);
                let q = pull(&comp.proj, p)?.meet(&self.formula(&comp.total, phi)?)?;
                RefinedObj::new(&x, p, &q)?
            }
            VType::Sigma { a, b, .. } => {
                let o = self.vrefined(ctx, p, a)?;
                let inner = self.vrefined(&comprehend(o.family()).total, o.q(), b)?;
                sigma_refined(&o, &inner)?
            }
            VType::U(c) => self.crefined(ctx, p, c)?,
            VType::Sum(a, b) => coprod_refined(&self.vrefined(ctx, p, a)?, &self.vrefined(ctx, p, b)?)?,
        })
    }

    /// `⟦Γ; C⟧` in the refinement layer: the refined carrier, with `Ḟ` given by
    /// the lifted monad and `Π` by the refined product.
    pub fn crefined(&self, ctx: &Carrier, p: &Pred, c: &CType) -> Result<RefinedObj> {
        Ok(match c {
            CType::F(a) => self.lifted.apply(&self.vrefined(ctx, p, a)?)?,
            CType::Pi { a, c, .. } => {
                let o = self.vrefined(ctx, p, a)?;
                let inner = self.crefined(&comprehend(o.family()).total, o.q(), c)?;
                pi_refined(&o, &inner)?
            }
        })
    }

    pub fn type_refined(&self, ctx: &Carrier, p: &Pred, t: &Type) -> Result<RefinedObj> {
        match t {
            Type::Value(a) => self.vrefined(ctx, p, a),
            Type::Comp(c) => self.crefined(ctx, p, c),
        }
    }

    /// `⟦Γ ⊢ p⟧` as a predicate over the environments `ctx` of `Γ`.
    pub fn formula(&self, ctx: &Carrier, p: &Formula) -> Result<Pred> {
        Ok(match p {
            Formula::Top => Pred::top(ctx),
            Formula::And(l, r) => self.formula(ctx, l)?.meet(&self.formula(ctx, r)?)?,
            Formula::Implies(l, r) => self.formula(ctx, l)?.implies(&self.formula(ctx, r)?)?,
            Formula::Forall { a, p, .. } => {
                let comp = comprehend(&self.vfamily(ctx, &a.erase())?);
                forall_along(&comp.proj, &self.formula(&comp.total, p)?)?
            }
            Formula::Eq { a, l, r } => {
                // ⟨s⟦V⟧, s⟦W⟧⟩* Eq(⊤)
                let x = self.vfamily(ctx, &a.erase())?;
                let cod = equality_carrier(&x)?;
                let u = FinMap::try_from_fn(ctx, &cod, |g| {
                    let lv = self.eval_value(g, l).map_err(core_err)?;
                    let rv = self.eval_value(g, r).map_err(core_err)?;
                    Ok(Atom::pair(Atom::pair(g.clone(), lv), rv))
                })?;
                pull(&u, &equality_pred(&x)?)?
            }
            Formula::Atom { pred, arg } => {
                let a = self.predicate(pred)?;
                let u = self.arg_map(ctx, &a.arg_family, arg)?;
                pull(&u, &a.pred)?
            }
        })
    }

    /// The section `s⟦|Γ|; t⟧ : ⟦|Γ|⟧ → {⟦|Γ|; T⟧}` of an underlying term.
    pub fn section(&self, ctx: &Carrier, fam: &Family, t: &Term) -> Result<FinMap> {
        if fam.base() != ctx {
            return Err(InterpError::Unchecked("type family over the wrong context".into()));
        }
        Ok(section_from_fn(fam, |g| self.eval_term(g, t).map_err(core_err))?)
    }

    /// Whether two terms denote the same section at type `ty` over `|Γ|`.
    pub fn terms_equal(&self, ctx: &Context, ty: &Type, t: &Term, u: &Term) -> Result<bool> {
        let carrier = self.ctx_carrier(ctx)?;
        let fam = self.type_family(&carrier, &ty.erase())?;
        Ok(self.section(&carrier, &fam, t)? == self.section(&carrier, &fam, u)?)
    }

    pub fn values_equal(&self, ctx: &Context, a: &VType, v: &Value, w: &Value) -> Result<bool> {
        self.terms_equal(ctx, &Type::Value(a.clone()), &Term::Value(v.clone()), &Term::Value(w.clone()))
    }

    /// The first environment of `|Γ|, v:A` satisfying `hyp` but not `goal`, if any.
    pub fn entailment_counterexample(
        &self,
        ctx: &Context,
        a: &VType,
        hyp: &Formula,
        goal: &Formula,
    ) -> Result<Option<Atom>> {
        let carrier = self.ctx_carrier(ctx)?;
        let ext = comprehend(&self.vfamily(&carrier, &a.erase())?).total;
        let h = self.formula(&ext, hyp)?;
        let g = self.formula(&ext, goal)?;
        Ok(h.first_violation(&g)?.cloned())
    }

    /// Adds a binding to an environment.
    pub fn extend_env(&self, env: &Atom, a: Atom) -> Atom {
        extend(env, a)
    }
}

pub(crate) fn core_err(e: InterpError) -> reftc_core::Error {
    match e {
        InterpError::Core(e) => e,
        other => reftc_core::Error::Unsupported(other.to_string()),
    }
}
