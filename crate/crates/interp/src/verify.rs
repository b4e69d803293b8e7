//! Semantic verification of checked definitions: soundness of the
//! interpretation at every environment satisfying the context, agreement of
//! the two layers under erasure, and the side condition for recursion.

use reftc_core::fixpoint::{conway, conway_lift_witness, PointedPoset, PosetFamily};
use reftc_core::kernel::comprehend;
use reftc_core::refined::semantic_subtype;
use reftc_core::{Atom, Carrier, FamMor, Pred};
use reftc_lang::{CType, Comp, Context, Erase, Term, Type, VType};

use crate::denote::core_err;
use crate::error::{InterpError, Result};
use crate::eval::extend;
use crate::model::ModelEnv;

/// Fibres up to this size get a full order table in the recursion check.
pub const ORDER_TABLE_LIMIT: usize = 512;

/// What happened at one environment of the context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub env: Atom,
    pub value: Atom,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail { env: Atom, value: Atom, reason: String },
}

impl Outcome {
    pub fn passed(&self) -> bool {
        matches!(self, Outcome::Pass)
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    /// Number of environments in `⟦Γ⟧` that satisfy the context predicate.
    pub checked: usize,
    pub witnesses: Vec<Witness>,
    pub outcome: Outcome,
}

/// Disagreement between `|⟦Γ; A⟧|` and `⟦|Γ|; |A|⟧`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasureMismatch {
    /// `None` for the result type, otherwise the offending context entry.
    pub entry: Option<usize>,
    pub detail: String,
}

/// Why recursion at a type was refused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MuRefusal {
    /// The least element of the carrier at `env` violates the refinement.
    NotPointed { env: Atom, bottom: Atom },
    /// The step function is not monotone.
    NotMonotone(String),
    /// The least fixed point at `env` escapes the refinement.
    Escapes { env: Atom, value: Atom },
    /// The monad has no least computation.
    Unpointed(String),
}

impl std::fmt::Display for MuRefusal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MuRefusal::NotPointed { env, bottom } => {
                write!(f, "the least computation {bottom} violates the refinement at environment {env}")
            }
            MuRefusal::NotMonotone(w) => write!(f, "the recursion step is not monotone: {w}"),
            MuRefusal::Escapes { env, value } => {
                write!(f, "the least fixed point {value} violates the refinement at environment {env}")
            }
            MuRefusal::Unpointed(m) => write!(f, "{m}"),
        }
    }
}

impl ModelEnv {
    /// Evaluates `term` at every environment of `Γ` satisfying its predicate and
    /// checks the result lies in the refined interpretation of `ty`. For
    /// computation types `FA` the lifting is also checked directly, with the
    /// result mapped into `{⟦Γ; A⟧}`.
    pub fn verify(&self, ctx: &Context, ty: &Type, term: &Term) -> Result<Certificate> {
        let (carrier, p) = self.ctx_refined(ctx)?;
        let obj = self.type_refined(&carrier, &p, ty)?;
        let fam = obj.family();
        let value_q = match ty {
            Type::Comp(CType::F(a)) => Some(self.vrefined(&carrier, &p, a)?.q().clone()),
            _ => None,
        };
        let mut witnesses = Vec::new();
        let mut outcome = Outcome::Pass;
        for env in p.members() {
            let value = self.eval_term(env, term)?;
            let mut reason = None;
            if !fam.fibre(env).is_some_and(|f| f.contains(&value)) {
                reason = Some("the value is not an element of the underlying type".to_string());
            } else if !obj.q().contains(&Atom::pair(env.clone(), value.clone())) {
                reason = Some("the value violates the refinement".to_string());
            } else if let Some(q) = &value_q {
                let tagged = self.monad().fmap_atom(&value, |x| Ok(Atom::pair(env.clone(), x.clone())))?;
                if !self.lifting.holds(&tagged, |a| Ok(q.contains(a)))? {
                    reason = Some(format!("the {} lifting of the result predicate fails", self.lifting.kind));
                }
            }
            witnesses.push(Witness { env: env.clone(), value: value.clone(), holds: reason.is_none() });
            if let (Some(r), Outcome::Pass) = (reason, &outcome) {
                outcome = Outcome::Fail { env: env.clone(), value, reason: r };
            }
        }
        Ok(Certificate { checked: witnesses.len(), witnesses, outcome })
    }

    /// Checks that erasing refinements commutes with interpretation on every
    /// entry of `Γ` and on `ty`.
    pub fn check_erasure(&self, ctx: &Context, ty: &Type) -> Result<Option<ErasureMismatch>> {
        let mut carrier = Carrier::unit();
        let mut p = Pred::top(&carrier);
        for (k, (_, a)) in ctx.iter().enumerate() {
            let refined = self.vrefined(&carrier, &p, a)?;
            let under = self.vfamily(&carrier, &a.erase())?;
            if refined.family() != &under {
                return Ok(Some(ErasureMismatch {
                    entry: Some(k),
                    detail: format!("entry {k} denotes different families in the two layers"),
                }));
            }
            carrier = comprehend(&under).total;
            p = refined.q().clone();
        }
        if carrier != self.ctx_carrier(ctx)? {
            return Ok(Some(ErasureMismatch { entry: None, detail: "the context carriers differ".into() }));
        }
        let refined = self.type_refined(&carrier, &p, ty)?;
        let under = self.type_family(&carrier, &ty.erase())?;
        if refined.family() != &under {
            return Ok(Some(ErasureMismatch {
                entry: None,
                detail: "the type denotes different families in the two layers".into(),
            }));
        }
        Ok(None)
    }

    /// `⟦Γ; A⟧ ≤ ⟦Γ; B⟧` over the environments satisfying `Γ`: the first
    /// `(γ, a)` in `A` but not in `B`, if any.
    pub fn semantic_subtype_counterexample(&self, ctx: &Context, a: &Type, b: &Type) -> Result<Option<Atom>> {
        let (carrier, p) = self.ctx_refined(ctx)?;
        let oa = self.type_refined(&carrier, &p, a)?;
        let ob = self.type_refined(&carrier, &p, b)?;
        if semantic_subtype(&oa, &ob) {
            return Ok(None);
        }
        Ok(oa.q().first_violation(ob.q())?.cloned())
    }

    /// The side condition for `μx:UC. M` in context `Γ`: the refined carrier of
    /// `C` is pointed at every environment satisfying `Γ`, and the fibrewise
    /// least fixed point of `M` stays inside it.
    pub fn mu_gate(&self, ctx: &Context, c: &CType, body: &Comp) -> Result<Option<MuRefusal>> {
        if self.monad().bottom().is_none() {
            return Ok(Some(MuRefusal::Unpointed(format!(
                "recursion needs a pointed monad; the {} monad is not",
                self.monad()
            ))));
        }
        let (carrier, p) = self.ctx_refined(ctx)?;
        let obj = self.crefined(&carrier, &p, c)?;
        for env in p.members() {
            let bottom = self.bottom(env, c)?;
            if !obj.q().contains(&Atom::pair(env.clone(), bottom.clone())) {
                return Ok(Some(MuRefusal::NotPointed { env: env.clone(), bottom }));
            }
        }
        let fam = obj.family();
        if fam.fibres().iter().all(|f| f.len() <= ORDER_TABLE_LIMIT) {
            let posets =
                PosetFamily::from_family(fam, |env, fib| PointedPoset::new(fib, |l, r| self.leq(env, c, l, r)))?;
            let step = FamMor::vertical_from_fn(fam, fam, |env, x| {
                self.eval_comp(&extend(env, x.clone()), body).map_err(core_err)
            })?;
            let fix = match conway(&posets, &step) {
                Ok(fix) => fix,
                Err(reftc_core::Error::NotMonotone { witness }) => return Ok(Some(MuRefusal::NotMonotone(witness))),
                Err(e) => return Err(InterpError::Core(e)),
            };
            return Ok(conway_lift_witness(&obj, &fix)?.map(|env| {
                let value = fix.apply(&env, &Atom::Unit).cloned().unwrap_or(Atom::Unit);
                MuRefusal::Escapes { env, value }
            }));
        }
        // Large fibres: iterate from the bottom at each environment, which
        // checks monotonicity along the Kleene chain only.
        for env in p.members() {
            let value = match self.fix(env, c, |x| self.eval_comp(&extend(env, x.clone()), body)) {
                Ok(v) => v,
                Err(InterpError::Core(reftc_core::Error::NotMonotone { witness })) => {
                    return Ok(Some(MuRefusal::NotMonotone(witness)))
                }
                Err(e) => return Err(e),
            };
            if !obj.q().contains(&Atom::pair(env.clone(), value.clone())) {
                return Ok(Some(MuRefusal::Escapes { env: env.clone(), value }));
            }
        }
        Ok(None)
    }

    /// Fibre sizes of `⟦|Γ|; |A|⟧`, one line per environment.
    pub fn describe_family(&self, ctx: &Context, a: &VType) -> Result<Vec<(Atom, Vec<Atom>)>> {
        let carrier = self.ctx_carrier(ctx)?;
        let fam = self.vfamily(&carrier, &a.erase())?;
        Ok(carrier.iter().map(|env| (env.clone(), fam.fibre(env).expect("base").elems().to_vec())).collect())
    }
}
