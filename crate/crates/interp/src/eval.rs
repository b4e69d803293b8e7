//! Pointwise evaluation of terms at a single environment.
//!
//! An environment for `x₁:A₁, …, xₙ:Aₙ` is the nested pair
//! `((…((), a₁)…), aₙ)`, i.e. an element of the comprehension built for the
//! context. Fibres of types at an environment are computed pointwise here;
//! [`crate::denote`] builds the same fibres as whole families.

use reftc_core::kernel::dependent_functions;
use reftc_core::{Atom, Carrier};
use reftc_lang::{CType, Comp, CompKind, Term, VType, Value, ValueKind};

use crate::denote::core_err;
use crate::error::{InterpError, Result};
use crate::model::ModelEnv;

/// Upper bound on Kleene iterations for one fixed point.
pub const KLEENE_LIMIT: usize = 1 << 16;

pub fn extend(env: &Atom, a: Atom) -> Atom {
    Atom::pair(env.clone(), a)
}

/// The value of variable `idx` in `env`.
pub fn lookup(env: &Atom, idx: usize) -> Result<&Atom> {
    let mut e = env;
    for _ in 0..idx {
        e = e.fst().ok_or_else(|| InterpError::Unchecked(format!("variable {idx} is out of scope")))?;
    }
    e.snd().ok_or_else(|| InterpError::Unchecked(format!("variable {idx} is out of scope")))
}

/// The values bound in `env`, outermost first.
pub fn env_values(env: &Atom) -> Vec<Atom> {
    let mut out = Vec::new();
    let mut e = env;
    while let Some((rest, a)) = e.as_pair() {
        out.push(a.clone());
        e = rest;
    }
    out.reverse();
    out
}

fn unchecked(msg: String) -> InterpError {
    InterpError::Unchecked(msg)
}

impl ModelEnv {
    /// `⟦Γ; A⟧` at one environment.
    pub fn fibre_v(&self, env: &Atom, a: &VType) -> Result<Carrier> {
        Ok(match a {
            VType::Unit => Carrier::unit(),
            VType::Base { name, arg } => {
                let b = self.base(name)?;
                let key = Atom::pair(Atom::Unit, self.eval_value(env, arg)?);
                b.family
                    .fibre(&key)
                    .cloned()
                    .ok_or_else(|| unchecked(format!("{} is not an argument of `{name}`", key.snd().unwrap())))?
            }
            VType::Sigma { a, b, .. } => {
                let mut elems = Vec::new();
                for x in self.fibre_v(env, a)?.iter() {
                    for y in self.fibre_v(&extend(env, x.clone()), b)?.iter() {
                        elems.push(Atom::pair(x.clone(), y.clone()));
                    }
                }
                Carrier::new(elems)
            }
            VType::U(c) => self.fibre_c(env, c)?,
            VType::Sum(a, b) => {
                let l = self.fibre_v(env, a)?;
                let r = self.fibre_v(env, b)?;
                Carrier::new(l.iter().map(|x| Atom::inl(x.clone())).chain(r.iter().map(|y| Atom::inr(y.clone()))))
            }
            VType::Refine { base, .. } => self.fibre_v(env, base)?,
        })
    }

    /// The carrier of `⟦Γ; C⟧` at one environment.
    pub fn fibre_c(&self, env: &Atom, c: &CType) -> Result<Carrier> {
        match c {
            CType::F(a) => Ok(self.monad().on_carrier(&self.fibre_v(env, a)?)?),
            CType::Pi { a, c, .. } => {
                let dom = self.fibre_v(env, a)?;
                let mut err = None;
                let out = dependent_functions(&dom, |x| match self.fibre_c(&extend(env, x.clone()), c) {
                    Ok(fib) => fib,
                    Err(e) => {
                        err.get_or_insert(e);
                        Carrier::empty()
                    }
                })?;
                match err {
                    Some(e) => Err(e),
                    None => Ok(out),
                }
            }
        }
    }

    pub fn eval_value(&self, env: &Atom, v: &Value) -> Result<Atom> {
        Ok(match &v.kind {
            ValueKind::Var { idx, .. } => lookup(env, *idx)?.clone(),
            ValueKind::Const(c) => self.constant(c)?.atom.clone(),
            ValueKind::Star => Atom::Unit,
            ValueKind::Pair { fst, snd, .. } => Atom::pair(self.eval_value(env, fst)?, self.eval_value(env, snd)?),
            ValueKind::Thunk(m) => self.eval_comp(env, m)?,
            ValueKind::Inl { v, .. } => Atom::inl(self.eval_value(env, v)?),
            ValueKind::Inr { v, .. } => Atom::inr(self.eval_value(env, v)?),
        })
    }

    pub fn eval_comp(&self, env: &Atom, m: &Comp) -> Result<Atom> {
        let monad = self.monad();
        match &m.kind {
            CompKind::Return(v) => Ok(monad.unit_atom(self.eval_value(env, v)?)),
            CompKind::To { m, c, n, .. } => {
                // Kleisli extension through the algebra structure of C
                let t = self.eval_comp(env, m)?;
                let tc = monad.fmap_atom(&t, |x| self.eval_comp(&extend(env, x.clone()), n).map_err(core_err))?;
                self.algebra(env, c, &tc)
            }
            CompKind::Force { v, .. } => self.eval_value(env, v),
            CompKind::Lam { a, m, .. } => {
                let dom = self.fibre_v(env, a)?;
                let graph = dom
                    .iter()
                    .map(|x| Ok((x.clone(), self.eval_comp(&extend(env, x.clone()), m)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Atom::fun(graph))
            }
            CompKind::App { m, v, .. } => {
                let f = self.eval_comp(env, m)?;
                let x = self.eval_value(env, v)?;
                f.apply(&x).cloned().ok_or_else(|| unchecked(format!("{x} is outside the domain of {f}")))
            }
            CompKind::Match { v, m, .. } => {
                let p = self.eval_value(env, v)?;
                let (a, b) = p.as_pair().ok_or_else(|| unchecked(format!("{p} is not a pair")))?;
                self.eval_comp(&extend(&extend(env, a.clone()), b.clone()), m)
            }
            CompKind::Case { v, m, n, .. } => match self.eval_value(env, v)? {
                Atom::Inl(a) => self.eval_comp(&extend(env, (*a).clone()), m),
                Atom::Inr(b) => self.eval_comp(&extend(env, (*b).clone()), n),
                other => Err(unchecked(format!("{other} is not an injection"))),
            },
            CompKind::Mu { c, m, .. } => self.fix(env, c, |x| self.eval_comp(&extend(env, x.clone()), m)),
        }
    }

    pub fn eval_term(&self, env: &Atom, t: &Term) -> Result<Atom> {
        match t {
            Term::Value(v) => self.eval_value(env, v),
            Term::Comp(m) => self.eval_comp(env, m),
        }
    }

    /// The Eilenberg–Moore structure `T⟦C⟧ → ⟦C⟧` at one environment: `μ` for
    /// `FA`, and the pointwise product structure for `Πx:A.C`.
    pub fn algebra(&self, env: &Atom, c: &CType, t: &Atom) -> Result<Atom> {
        match c {
            CType::F(_) => Ok(self.monad().mult_atom(t)?),
            CType::Pi { a, c, .. } => {
                let dom = self.fibre_v(env, a)?;
                let em = reftc_core::effect::em_model(self.monad());
                Ok(em.pi_structure_atom(&dom, t, |x, tx| {
                    self.algebra(&extend(env, x.clone()), c, tx).map_err(core_err)
                })?)
            }
        }
    }

    /// Least element of the carrier of `C` at `env`.
    pub fn bottom(&self, env: &Atom, c: &CType) -> Result<Atom> {
        match c {
            CType::F(_) => self.monad().bottom().ok_or_else(|| {
                unchecked(format!("recursion needs a pointed monad; the {} monad is not", self.monad()))
            }),
            CType::Pi { a, c, .. } => {
                let dom = self.fibre_v(env, a)?;
                let graph = dom
                    .iter()
                    .map(|x| Ok((x.clone(), self.bottom(&extend(env, x.clone()), c)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Atom::fun(graph))
            }
        }
    }

    /// The recursion order on the carrier of `C` at `env`.
    pub fn leq(&self, env: &Atom, c: &CType, l: &Atom, r: &Atom) -> bool {
        match c {
            CType::F(_) => self.monad().leq(l, r),
            CType::Pi { c, .. } => match (l.graph(), r.graph()) {
                (Some(gl), Some(gr)) if gl.len() == gr.len() => gl
                    .iter()
                    .zip(gr.iter())
                    .all(|((x, fl), (y, fr))| x == y && self.leq(&extend(env, x.clone()), c, fl, fr)),
                _ => false,
            },
        }
    }

    /// Kleene iteration of `step` from the bottom of `C` at `env`.
    pub fn fix(&self, env: &Atom, c: &CType, mut step: impl FnMut(&Atom) -> Result<Atom>) -> Result<Atom> {
        let bottom = self.bottom(env, c)?;
        let mut failure = None;
        let out = reftc_core::fixpoint::kleene(
            bottom,
            KLEENE_LIMIT,
            |l, r| self.leq(env, c, l, r),
            |x| {
                step(x).map_err(|e| {
                    let msg = e.to_string();
                    failure.get_or_insert(e);
                    reftc_core::Error::Unsupported(msg)
                })
            },
        );
        match (out, failure) {
            (_, Some(e)) => Err(e),
            (r, None) => Ok(r?),
        }
    }
}
