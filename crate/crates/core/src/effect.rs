//! Monads on finite sets, the fibred monads they induce on families, the oplax
//! morphism θ, predicate liftings and the lifted monad `S` on refined objects.
//!
//! Most operations exist in two forms: a pointwise one acting on single atoms
//! (used by the interpreter, which never materialises `T{X}`) and a
//! carrier-level one producing [`FinMap`]s and [`FamMor`]s for law checking.

use std::fmt;

use crate::atom::Atom;
use crate::enumerate;
use crate::error::{Error, Result};
use crate::kernel::{comprehend, reindex, Carrier, FamMor, Family, FinMap, PI_LIMIT};
use crate::pred::{pull, Pred};
use crate::refined::{cart_lift, project_u, RefinedMor, RefinedObj};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonadKind {
    Identity,
    Maybe,
    Powerset,
}

pub fn identity_monad() -> MonadKind {
    MonadKind::Identity
}

pub fn maybe_monad() -> MonadKind {
    MonadKind::Maybe
}

pub fn powerset_monad() -> MonadKind {
    MonadKind::Powerset
}

fn malformed(t: &Atom, m: MonadKind) -> Error {
    Error::NotMember {
        atom: t.clone(),
        what: format!("a {} computation", m.name()),
    }
}

impl MonadKind {
    pub const ALL: [MonadKind; 3] = [MonadKind::Identity, MonadKind::Maybe, MonadKind::Powerset];

    pub fn name(self) -> &'static str {
        match self {
            MonadKind::Identity => "none",
            MonadKind::Maybe => "maybe",
            MonadKind::Powerset => "powerset",
        }
    }

    pub fn parse(s: &str) -> Option<MonadKind> {
        match s {
            "none" | "identity" => Some(MonadKind::Identity),
            "maybe" => Some(MonadKind::Maybe),
            "powerset" => Some(MonadKind::Powerset),
            _ => None,
        }
    }

    pub fn on_carrier(self, c: &Carrier) -> Result<Carrier> {
        match self {
            MonadKind::Identity => Ok(c.clone()),
            MonadKind::Maybe => Ok(Carrier::new(
                c.iter().map(|a| Atom::just(a.clone())).chain([Atom::Star]),
            )),
            MonadKind::Powerset => {
                if c.len() >= 20 || (1usize << c.len()) > PI_LIMIT {
                    return Err(Error::Unsupported(format!(
                        "powerset of a carrier with {} elements",
                        c.len()
                    )));
                }
                Ok(Carrier::new((0u32..(1 << c.len())).map(|mask| {
                    Atom::set(
                        c.iter()
                            .enumerate()
                            .filter(|(k, _)| mask >> k & 1 == 1)
                            .map(|(_, a)| a.clone()),
                    )
                })))
            }
        }
    }

    /// Elements of `T c` built from at most two elements of `c`.
    pub fn small_elements(self, c: &Carrier) -> Vec<Atom> {
        match self {
            MonadKind::Identity => c.iter().cloned().collect(),
            MonadKind::Maybe => c.iter().map(|a| Atom::just(a.clone())).chain([Atom::Star]).collect(),
            MonadKind::Powerset => {
                let mut out = vec![Atom::set([])];
                for (k, a) in c.iter().enumerate() {
                    for b in c.iter().skip(k) {
                        out.push(Atom::set([a.clone(), b.clone()]));
                    }
                }
                out
            }
        }
    }

    pub fn unit_atom(self, x: Atom) -> Atom {
        match self {
            MonadKind::Identity => x,
            MonadKind::Maybe => Atom::just(x),
            MonadKind::Powerset => Atom::set([x]),
        }
    }

    pub fn fmap_atom(self, t: &Atom, mut f: impl FnMut(&Atom) -> Result<Atom>) -> Result<Atom> {
        match (self, t) {
            (MonadKind::Identity, _) => f(t),
            (MonadKind::Maybe, Atom::Star) => Ok(Atom::Star),
            (MonadKind::Maybe, Atom::Just(x)) => Ok(Atom::just(f(x)?)),
            (MonadKind::Powerset, Atom::Set(xs)) => {
                Ok(Atom::set(xs.iter().map(f).collect::<Result<Vec<_>>>()?))
            }
            _ => Err(malformed(t, self)),
        }
    }

    pub fn mult_atom(self, tt: &Atom) -> Result<Atom> {
        match (self, tt) {
            (MonadKind::Identity, _) => Ok(tt.clone()),
            (MonadKind::Maybe, Atom::Star) => Ok(Atom::Star),
            (MonadKind::Maybe, Atom::Just(t)) => match &**t {
                Atom::Star | Atom::Just(_) => Ok((**t).clone()),
                _ => Err(malformed(t, self)),
            },
            (MonadKind::Powerset, Atom::Set(ts)) => {
                let mut out = Vec::new();
                for t in ts.iter() {
                    out.extend(t.set_elems().ok_or_else(|| malformed(t, self))?.iter().cloned());
                }
                Ok(Atom::set(out))
            }
            _ => Err(malformed(tt, self)),
        }
    }

    /// Kleisli extension.
    pub fn bind_atom(self, t: &Atom, f: impl FnMut(&Atom) -> Result<Atom>) -> Result<Atom> {
        self.mult_atom(&self.fmap_atom(t, f)?)
    }

    /// The values a computation may return.
    pub fn support(self, t: &Atom) -> Result<Vec<Atom>> {
        match (self, t) {
            (MonadKind::Identity, _) => Ok(vec![t.clone()]),
            (MonadKind::Maybe, Atom::Star) => Ok(vec![]),
            (MonadKind::Maybe, Atom::Just(x)) => Ok(vec![(**x).clone()]),
            (MonadKind::Powerset, Atom::Set(xs)) => Ok(xs.to_vec()),
            _ => Err(malformed(t, self)),
        }
    }

    pub fn on_map(self, f: &FinMap) -> Result<FinMap> {
        let dom = self.on_carrier(f.dom())?;
        let cod = self.on_carrier(f.cod())?;
        FinMap::try_from_fn(&dom, &cod, |t| {
            self.fmap_atom(t, |x| Ok(f.apply(x).expect("total").clone()))
        })
    }

    pub fn unit(self, c: &Carrier) -> Result<FinMap> {
        FinMap::from_fn(c, &self.on_carrier(c)?, |x| self.unit_atom(x.clone()))
    }

    pub fn mult(self, c: &Carrier) -> Result<FinMap> {
        let tc = self.on_carrier(c)?;
        let ttc = self.on_carrier(&tc)?;
        FinMap::try_from_fn(&ttc, &tc, |tt| self.mult_atom(tt))
    }

    /// The least element used for recursion, if the computation carriers are pointed.
    pub fn bottom(self) -> Option<Atom> {
        match self {
            MonadKind::Identity => None,
            MonadKind::Maybe => Some(Atom::Star),
            MonadKind::Powerset => Some(Atom::set([])),
        }
    }

    /// The order on computations used for recursion.
    pub fn leq(self, a: &Atom, b: &Atom) -> bool {
        match (self, a, b) {
            (MonadKind::Identity, _, _) => a == b,
            (MonadKind::Maybe, Atom::Star, _) => true,
            (MonadKind::Maybe, _, _) => a == b,
            (MonadKind::Powerset, Atom::Set(xs), Atom::Set(ys)) => {
                xs.iter().all(|x| ys.binary_search(x).is_ok())
            }
            _ => false,
        }
    }

    pub fn liftings(self) -> &'static [LiftingKind] {
        match self {
            MonadKind::Identity => &[LiftingKind::Trivial],
            MonadKind::Maybe => &[LiftingKind::Partial, LiftingKind::Total],
            MonadKind::Powerset => &[LiftingKind::May, LiftingKind::Must],
        }
    }

    pub fn default_lifting(self) -> LiftingKind {
        self.liftings()[0]
    }
}

impl fmt::Display for MonadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The fibred monad `T̂(I, X) = (I, T ∘ X)` on families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FibredMonad {
    pub monad: MonadKind,
}

/// The oplax monad morphism `θ : {T̂ −} → T{−}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Oplax {
    pub monad: MonadKind,
}

pub fn induce_fibred(monad: MonadKind) -> (FibredMonad, Oplax) {
    (FibredMonad { monad }, Oplax { monad })
}

impl FibredMonad {
    pub fn new(monad: MonadKind) -> FibredMonad {
        FibredMonad { monad }
    }

    pub fn on_family(&self, x: &Family) -> Result<Family> {
        Family::try_from_fn(x.base(), |i| self.monad.on_carrier(x.fibre(i).expect("base")))
    }

    /// `T̂f`, acting fibrewise over the same base map.
    pub fn on_mor(&self, f: &FamMor) -> Result<FamMor> {
        let src = self.on_family(f.src())?;
        let dst = self.on_family(f.dst())?;
        let maps = (0..src.base().len())
            .map(|k| self.monad.on_map(f.fibre_map(k)))
            .collect::<Result<Vec<_>>>()?;
        FamMor::new(&src, &dst, f.base_map().clone(), maps)
    }

    pub fn unit(&self, x: &Family) -> Result<FamMor> {
        let tx = self.on_family(x)?;
        FamMor::vertical_from_fn(x, &tx, |_, a| Ok(self.monad.unit_atom(a.clone())))
    }

    pub fn mult(&self, x: &Family) -> Result<FamMor> {
        let tx = self.on_family(x)?;
        let ttx = self.on_family(&tx)?;
        FamMor::vertical_from_fn(&ttx, &tx, |_, tt| self.monad.mult_atom(tt))
    }

    /// Strict commutation with reindexing: `T̂(u*X) = u*(T̂X)`.
    pub fn commutes_with_reindex(&self, u: &FinMap, x: &Family) -> Result<bool> {
        Ok(self.on_family(&reindex(u, x)?)? == reindex(u, &self.on_family(x)?)?)
    }
}

impl Oplax {
    /// `θ(i, t) = T(x ↦ (i, x))(t)`.
    pub fn apply(&self, i: &Atom, t: &Atom) -> Result<Atom> {
        self.monad.fmap_atom(t, |x| Ok(Atom::pair(i.clone(), x.clone())))
    }

    /// `θ` applied to an element `(i, t)` of `{T̂X}`.
    pub fn apply_pair(&self, it: &Atom) -> Result<Atom> {
        let (i, t) = it.as_pair().ok_or_else(|| malformed(it, self.monad))?;
        self.apply(i, t)
    }

    /// The component `θ_X : {T̂X} → T{X}` as a finite map.
    pub fn component(&self, x: &Family) -> Result<FinMap> {
        let fm = FibredMonad::new(self.monad);
        let src = comprehend(&fm.on_family(x)?).total;
        let dst = self.monad.on_carrier(&comprehend(x).total)?;
        FinMap::try_from_fn(&src, &dst, |it| self.apply_pair(it))
    }

    /// `θ ∘ {η̂} = η_{X}`, checked pointwise.
    pub fn unit_square(&self, x: &Family) -> Result<bool> {
        let comp = comprehend(x);
        for e in comp.total.iter() {
            let (i, a) = e.as_pair().expect("pair");
            let lhs = self.apply(i, &self.monad.unit_atom(a.clone()))?;
            if lhs != self.monad.unit_atom(e.clone()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `θ ∘ {μ̂} = μ ∘ Tθ ∘ θ_{T̂X}`, checked pointwise.
    pub fn mult_square(&self, x: &Family) -> Result<bool> {
        let fm = FibredMonad::new(self.monad);
        let ttx = fm.on_family(&fm.on_family(x)?)?;
        for (k, i) in ttx.base().iter().enumerate() {
            for tt in ttx.fibre_at(k).iter() {
                let lhs = self.apply(i, &self.monad.mult_atom(tt)?)?;
                let inner = self.apply(i, tt)?;
                let rhs = self.monad.mult_atom(&self.monad.fmap_atom(&inner, |it| self.apply_pair(it))?)?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiftingKind {
    /// The only lifting used with the identity monad: `ṪP = P`.
    Trivial,
    /// `P + {⋆}`.
    Partial,
    /// `P ⊆ I + {⋆}`.
    Total,
    /// Some possible result satisfies `P`.
    May,
    /// Every possible result satisfies `P`.
    Must,
}

impl LiftingKind {
    pub fn name(self) -> &'static str {
        match self {
            LiftingKind::Trivial => "trivial",
            LiftingKind::Partial => "partial",
            LiftingKind::Total => "total",
            LiftingKind::May => "may",
            LiftingKind::Must => "must",
        }
    }

    pub fn parse(s: &str) -> Option<LiftingKind> {
        match s {
            "trivial" => Some(LiftingKind::Trivial),
            "partial" => Some(LiftingKind::Partial),
            "total" => Some(LiftingKind::Total),
            "may" => Some(LiftingKind::May),
            "must" => Some(LiftingKind::Must),
            _ => None,
        }
    }
}

impl fmt::Display for LiftingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A predicate lifting `Ṫ` of a monad along `Sub(FinSet) → FinSet`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PredLifting {
    pub monad: MonadKind,
    pub kind: LiftingKind,
}

impl PredLifting {
    pub fn new(monad: MonadKind, kind: LiftingKind) -> Result<PredLifting> {
        if !monad.liftings().contains(&kind) {
            return Err(Error::Unsupported(format!(
                "the {kind} lifting is not defined for the {monad} monad"
            )));
        }
        Ok(PredLifting { monad, kind })
    }

    /// Membership of a computation in `Ṫ{x | p(x)}`.
    pub fn holds(&self, t: &Atom, mut p: impl FnMut(&Atom) -> Result<bool>) -> Result<bool> {
        match (self.kind, t) {
            (LiftingKind::Trivial, _) => p(t),
            (LiftingKind::Partial, Atom::Star) => Ok(true),
            (LiftingKind::Total, Atom::Star) => Ok(false),
            (LiftingKind::Partial | LiftingKind::Total, Atom::Just(x)) => p(x),
            (LiftingKind::May, Atom::Set(xs)) => {
                for x in xs.iter() {
                    if p(x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            (LiftingKind::Must, Atom::Set(xs)) => {
                for x in xs.iter() {
                    if !p(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(malformed(t, self.monad)),
        }
    }

    /// `ṪP` over `T(P.over)`.
    pub fn lift(&self, p: &Pred) -> Result<Pred> {
        let tc = self.monad.on_carrier(p.over())?;
        Pred::try_from_fn(&tc, |t| self.holds(t, |x| Ok(p.contains(x))))
    }

    /// `Ṫ(u*P) = (Tu)*(ṪP)`.
    pub fn is_fibred_at(&self, u: &FinMap, p: &Pred) -> Result<bool> {
        Ok(self.lift(&pull(u, p)?)? == pull(&self.monad.on_map(u)?, &self.lift(p)?)?)
    }

    /// `θ*ṪQ` over `{T̂X}`, computed pointwise.
    pub fn theta_pull(&self, x: &Family, q: &Pred) -> Result<Pred> {
        let theta = Oplax { monad: self.monad };
        let fm = FibredMonad::new(self.monad);
        let tot = comprehend(&fm.on_family(x)?).total;
        Pred::try_from_fn(&tot, |it| {
            let img = theta.apply_pair(it)?;
            self.holds(&img, |e| Ok(q.contains(e)))
        })
    }
}

impl fmt::Display for PredLifting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.monad, self.kind)
    }
}

pub fn liftings_for(monad: MonadKind) -> Vec<PredLifting> {
    monad
        .liftings()
        .iter()
        .map(|&kind| PredLifting { monad, kind })
        .collect()
}

/// Both sides of `π*P ∧ θ*ṪQ ≤ θ*Ṫ(π*P ∧ Q)`.
pub fn eq3_sides(lifting: &PredLifting, x: &Family, p: &Pred, q: &Pred) -> Result<(Pred, Pred)> {
    let comp = comprehend(x);
    if p.over() != x.base() || q.over() != &comp.total {
        return Err(Error::BaseMismatch("Eq. (3) instance with misaligned predicates".into()));
    }
    let fm = FibredMonad::new(lifting.monad);
    let tx = fm.on_family(x)?;
    let lhs = pull(&comprehend(&tx).proj, p)?.meet(&lifting.theta_pull(x, q)?)?;
    let pq = pull(&comp.proj, p)?.meet(q)?;
    let rhs = lifting.theta_pull(x, &pq)?;
    Ok((lhs, rhs))
}

pub fn check_eq3(lifting: &PredLifting, x: &Family, p: &Pred, q: &Pred) -> Result<bool> {
    let (lhs, rhs) = eq3_sides(lifting, x, p, q)?;
    lhs.leq(&rhs)
}

/// Exhaustive Eq. (3) check over all families with carriers `≤ bound`;
/// returns the first counterexample.
pub fn eq3_counterexample(lifting: &PredLifting, bound: usize) -> Result<Option<String>> {
    for x in enumerate::families(bound) {
        let tot = comprehend(&x).total;
        for p in enumerate::preds(x.base()) {
            for q in enumerate::preds(&tot) {
                if !check_eq3(lifting, &x, &p, &q)? {
                    return Ok(Some(format!("X = {x:?}, P = {p:?}, Q = {q:?}")));
                }
            }
        }
    }
    Ok(None)
}

/// Bound at which shipped liftings are gated by [`LiftedMonad::new`].
pub const REGISTRATION_BOUND: usize = 2;

/// The fibred monad `S(X, P, Q) = (T̂X, P, π*P ∧ θ*ṪQ)` on refined objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LiftedMonad {
    pub lifting: PredLifting,
}

impl LiftedMonad {
    /// Registers a lifting after checking Eq. (3) exhaustively at small scale.
    pub fn new(lifting: PredLifting) -> Result<LiftedMonad> {
        if let Some(cx) = eq3_counterexample(&lifting, REGISTRATION_BOUND)? {
            return Err(Error::LiftingUnsound { counterexample: cx });
        }
        Ok(LiftedMonad { lifting })
    }

    pub fn fibred(&self) -> FibredMonad {
        FibredMonad::new(self.lifting.monad)
    }

    pub fn apply(&self, o: &RefinedObj) -> Result<RefinedObj> {
        let tx = self.fibred().on_family(o.family())?;
        let q = pull(&comprehend(&tx).proj, o.p())?.meet(&self.lifting.theta_pull(o.family(), o.q())?)?;
        RefinedObj::new(&tx, o.p(), &q)
    }

    pub fn on_mor(&self, f: &RefinedMor) -> Result<RefinedMor> {
        let g = self.fibred().on_mor(f.underlying())?;
        RefinedMor::new(&self.apply(f.src())?, &self.apply(f.dst())?, &g)
    }

    pub fn unit(&self, o: &RefinedObj) -> Result<RefinedMor> {
        RefinedMor::new(o, &self.apply(o)?, &self.fibred().unit(o.family())?)
    }

    pub fn mult(&self, o: &RefinedObj) -> Result<RefinedMor> {
        let so = self.apply(o)?;
        RefinedMor::new(&self.apply(&so)?, &so, &self.fibred().mult(o.family())?)
    }

    /// `S` commutes with the cartesian lifting of `P' ≤ u*P`.
    pub fn is_fibred_at(&self, u: &FinMap, p2: &Pred, o: &RefinedObj) -> Result<bool> {
        let (lifted, _) = cart_lift(u, p2, o)?;
        let (lifted_s, _) = cart_lift(u, p2, &self.apply(o)?)?;
        Ok(self.apply(&lifted)? == lifted_s)
    }

    /// Membership in the refinement of `S^k o` at `(i, t)`, computed without
    /// building `S^k o`.
    pub fn member_iterated(&self, o: &RefinedObj, k: usize, i: &Atom, t: &Atom) -> Result<bool> {
        if k == 0 {
            return Ok(o.q().contains(&Atom::pair(i.clone(), t.clone())));
        }
        if !o.p().contains(i) {
            return Ok(false);
        }
        self.lifting.holds(t, |s| self.member_iterated(o, k - 1, i, s))
    }

    /// Unit and associativity laws, as equalities of refined morphisms.
    ///
    /// When `S³o` is too large to build, associativity and predicate
    /// preservation of both sides are checked pointwise on every element of
    /// `T³X_i` with at most two members at the outer level.
    pub fn laws_hold(&self, o: &RefinedObj) -> Result<bool> {
        let so = self.apply(o)?;
        let id = RefinedMor::identity(&so);
        let left = self.mult(o)?.after(&self.unit(&so)?)?;
        let right = self.mult(o)?.after(&self.on_mor(&self.unit(o)?)?)?;
        if left != id || right != id {
            return Ok(false);
        }
        let m = self.lifting.monad;
        let tt = self.fibred().on_family(project_u(&so))?;
        let widest = tt.fibres().iter().map(Carrier::len).max().unwrap_or(0);
        if m != MonadKind::Powerset || widest <= 8 {
            let assoc_l = self.mult(o)?.after(&self.on_mor(&self.mult(o)?)?)?;
            let assoc_r = self.mult(o)?.after(&self.mult(&so)?)?;
            return Ok(assoc_l == assoc_r);
        }
        for (k, i) in tt.base().iter().enumerate() {
            for t in m.small_elements(tt.fibre_at(k)) {
                let inner = m.mult_atom(&t)?;
                let outer = m.fmap_atom(&t, |s| m.mult_atom(s))?;
                if m.mult_atom(&inner)? != m.mult_atom(&outer)? {
                    return Ok(false);
                }
                if self.member_iterated(o, 3, i, &t)?
                    && !(self.member_iterated(o, 2, i, &inner)? && self.member_iterated(o, 2, i, &outer)?)
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// An Eilenberg–Moore algebra `(X, a : T̂X → X)` in the family fibration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmAlgebra {
    pub carrier: Family,
    pub structure: FamMor,
}

impl EmAlgebra {
    pub fn new(carrier: &Family, structure: &FamMor) -> Result<EmAlgebra> {
        if !structure.is_vertical() || structure.dst() != carrier {
            return Err(Error::NotVertical);
        }
        Ok(EmAlgebra {
            carrier: carrier.clone(),
            structure: structure.clone(),
        })
    }

    /// `a ∘ η̂ = id` and `a ∘ μ̂ = a ∘ T̂a`.
    pub fn laws_hold(&self, fm: &FibredMonad) -> Result<bool> {
        let a = &self.structure;
        let m = fm.monad;
        let widest = a.src().fibres().iter().map(Carrier::len).max().unwrap_or(0);
        if m == MonadKind::Powerset && widest > 8 {
            return algebra_laws_pointwise(m, &self.carrier, |i, t| {
                a.apply(i, t).cloned().ok_or_else(|| Error::NotMember {
                    atom: t.clone(),
                    what: "the algebra's domain".into(),
                })
            });
        }
        let unit_law = a.after(&fm.unit(&self.carrier)?)? == FamMor::identity(&self.carrier);
        let assoc = a.after(&fm.mult(&self.carrier)?)? == a.after(&fm.on_mor(a)?)?;
        Ok(unit_law && assoc)
    }
}

/// Algebra laws for a structure map given pointwise. The unit law is checked
/// on every element; associativity on every element of `T T A_i` built from
/// at most two elements at each level.
pub fn algebra_laws_pointwise(
    m: MonadKind,
    carrier: &Family,
    a: impl Fn(&Atom, &Atom) -> Result<Atom>,
) -> Result<bool> {
    for (k, i) in carrier.base().iter().enumerate() {
        let ai = carrier.fibre_at(k);
        for x in ai.iter() {
            if a(i, &m.unit_atom(x.clone()))? != *x {
                return Ok(false);
            }
        }
        let inner = Carrier::new(m.small_elements(ai));
        for tt in m.small_elements(&inner) {
            let lhs = a(i, &m.mult_atom(&tt)?)?;
            let rhs = a(i, &m.fmap_atom(&tt, |t| a(i, t))?)?;
            if lhs != rhs || !ai.contains(&lhs) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The Eilenberg–Moore adjunction `F ⊣ U` of a fibred monad.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmModel {
    pub fibred: FibredMonad,
}

pub fn em_model(monad: MonadKind) -> EmModel {
    EmModel {
        fibred: FibredMonad::new(monad),
    }
}

impl EmModel {
    pub fn free(&self, x: &Family) -> Result<EmAlgebra> {
        EmAlgebra::new(&self.fibred.on_family(x)?, &self.fibred.mult(x)?)
    }

    pub fn forget(&self, alg: &EmAlgebra) -> Family {
        alg.carrier.clone()
    }

    pub fn unit(&self, x: &Family) -> Result<FamMor> {
        self.fibred.unit(x)
    }

    /// The counit at an algebra, as a morphism `U F U A → U A`.
    pub fn counit(&self, alg: &EmAlgebra) -> FamMor {
        alg.structure.clone()
    }

    /// `ε_{FX} ∘ F η_X = id` and `U ε_A ∘ η_{UA} = id`.
    pub fn triangles_hold(&self, x: &Family, alg: &EmAlgebra) -> Result<bool> {
        let fx = self.free(x)?;
        let first = self.counit(&fx).after(&self.fibred.on_mor(&self.unit(x)?)?)?;
        let second = self.counit(alg).after(&self.unit(&alg.carrier)?)?;
        Ok(first == FamMor::identity(&fx.carrier) && second == FamMor::identity(&alg.carrier))
    }

    /// The counit is an algebra morphism `F U A → A`.
    pub fn counit_is_homomorphism(&self, alg: &EmAlgebra) -> Result<bool> {
        let a = &alg.structure;
        let m = self.fibred.monad;
        let widest = a.src().fibres().iter().map(Carrier::len).max().unwrap_or(0);
        if m == MonadKind::Powerset && widest > 8 {
            for (k, i) in alg.carrier.base().iter().enumerate() {
                let inner = Carrier::new(m.small_elements(alg.carrier.fibre_at(k)));
                for tt in m.small_elements(&inner) {
                    let ap = |t: &Atom| {
                        a.apply(i, t).cloned().ok_or_else(|| Error::NotMember {
                            atom: t.clone(),
                            what: "the algebra's domain".into(),
                        })
                    };
                    if ap(&m.mult_atom(&tt)?)? != ap(&m.fmap_atom(&tt, ap)?)? {
                        return Ok(false);
                    }
                }
            }
            return Ok(true);
        }
        let fua = self.free(&alg.carrier)?;
        Ok(a.after(&fua.structure)? == a.after(&self.fibred.on_mor(a)?)?)
    }

    /// Pointwise structure of the product algebra `Π_X B`:
    /// `t ↦ (x ↦ b_{(i,x)}(T(ev_x)(t)))`.
    pub fn pi_structure_atom(
        &self,
        dom: &Carrier,
        t: &Atom,
        mut b: impl FnMut(&Atom, &Atom) -> Result<Atom>,
    ) -> Result<Atom> {
        let m = self.fibred.monad;
        let graph = dom
            .iter()
            .map(|x| {
                let tx = m.fmap_atom(t, |f| {
                    f.apply(x).cloned().ok_or_else(|| Error::NotMember {
                        atom: x.clone(),
                        what: "the function's domain".into(),
                    })
                })?;
                Ok((x.clone(), b(x, &tx)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Atom::fun(graph))
    }

    /// Algebra laws of `Π_X B` checked pointwise, without building `T̂ Π_X B`.
    pub fn pi_algebra_laws_pointwise(&self, x: &Family, alg: &EmAlgebra) -> Result<bool> {
        let carrier = crate::kernel::pi(x, &alg.carrier)?;
        algebra_laws_pointwise(self.fibred.monad, &carrier, |i, t| {
            let dom = x.fibre(i).expect("base");
            self.pi_structure_atom(dom, t, |a, ta| {
                let key = Atom::pair(i.clone(), a.clone());
                alg.structure.apply(&key, ta).cloned().ok_or_else(|| Error::NotMember {
                    atom: ta.clone(),
                    what: "the algebra's carrier".into(),
                })
            })
        })
    }

    /// The product `Π_X B` of an algebra `B` over `{X}`.
    pub fn pi_algebra(&self, x: &Family, alg: &EmAlgebra) -> Result<EmAlgebra> {
        let carrier = crate::kernel::pi(x, &alg.carrier)?;
        let tc = self.fibred.on_family(&carrier)?;
        let structure = FamMor::vertical_from_fn(&tc, &carrier, |i, t| {
            let dom = x.fibre(i).expect("base");
            self.pi_structure_atom(dom, t, |a, ta| {
                let key = Atom::pair(i.clone(), a.clone());
                alg.structure.apply(&key, ta).cloned().ok_or_else(|| Error::NotMember {
                    atom: ta.clone(),
                    what: "the algebra's carrier".into(),
                })
            })
        })?;
        EmAlgebra::new(&carrier, &structure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::total;

    fn i(n: i64) -> Atom {
        Atom::int(n)
    }

    #[test]
    fn maybe_carrier() {
        let c = Carrier::range(2);
        let m = maybe_monad().on_carrier(&c).unwrap();
        assert_eq!(m.elems(), &[Atom::just(i(0)), Atom::just(i(1)), Atom::Star]);
        assert_eq!(powerset_monad().on_carrier(&c).unwrap().len(), 4);
        let one = Carrier::range(1);
        for mk in MonadKind::ALL {
            let u = mk.unit(&mk.on_carrier(&one).unwrap()).unwrap();
            let m = mk.mult(&one).unwrap();
            assert!(m.after(&u).unwrap().is_identity());
        }
    }

    #[test]
    fn theta_examples() {
        let th = Oplax { monad: MonadKind::Maybe };
        assert_eq!(th.apply(&Atom::sym("a"), &Atom::Star).unwrap(), Atom::Star);
        assert_eq!(
            th.apply(&Atom::sym("a"), &Atom::just(i(0))).unwrap(),
            Atom::just(Atom::pair(Atom::sym("a"), i(0)))
        );
        let th = Oplax { monad: MonadKind::Powerset };
        assert_eq!(
            th.apply(&i(7), &Atom::set([i(0), i(1)])).unwrap(),
            Atom::set([Atom::pair(i(7), i(0)), Atom::pair(i(7), i(1))])
        );
        let x = Family::new(&Carrier::range(2), vec![Carrier::range(1), Carrier::range(2)]).unwrap();
        let th = Oplax { monad: MonadKind::Identity };
        assert!(th.component(&x).unwrap().is_identity());
    }

    #[test]
    fn lifting_examples() {
        let c = Carrier::range(2);
        let p = Pred::new(&c, [i(1)]).unwrap();
        let partial = PredLifting::new(maybe_monad(), LiftingKind::Partial).unwrap();
        let total_l = PredLifting::new(maybe_monad(), LiftingKind::Total).unwrap();
        let must = PredLifting::new(powerset_monad(), LiftingKind::Must).unwrap();
        let got: Vec<Atom> = partial.lift(&p).unwrap().members().cloned().collect();
        assert_eq!(got, vec![Atom::just(i(1)), Atom::Star]);
        let got: Vec<Atom> = total_l.lift(&p).unwrap().members().cloned().collect();
        assert_eq!(got, vec![Atom::just(i(1))]);
        let got: Vec<Atom> = must.lift(&p).unwrap().members().cloned().collect();
        assert_eq!(got, vec![Atom::set([]), Atom::set([i(1)])]);
        assert!(PredLifting::new(maybe_monad(), LiftingKind::Must).is_err());
    }

    #[test]
    fn lifted_monad_examples() {
        let base = Carrier::new([Atom::sym("i")]);
        let x = Family::new(&base, vec![Carrier::range(1)]).unwrap();
        let o = RefinedObj::new(&x, &Pred::top(&base), &Pred::bottom(&total(&x))).unwrap();
        let s = LiftedMonad::new(PredLifting::new(maybe_monad(), LiftingKind::Partial).unwrap()).unwrap();
        let got: Vec<Atom> = s.apply(&o).unwrap().q().members().cloned().collect();
        assert_eq!(got, vec![Atom::pair(Atom::sym("i"), Atom::Star)]);
        let s = LiftedMonad::new(PredLifting::new(maybe_monad(), LiftingKind::Total).unwrap()).unwrap();
        assert!(s.apply(&o).unwrap().q().is_bottom());
    }

    #[test]
    fn free_algebra_laws() {
        let x = Family::new(&Carrier::unit(), vec![Carrier::range(1)]).unwrap();
        for mk in MonadKind::ALL {
            let em = em_model(mk);
            let fx = em.free(&x).unwrap();
            assert!(fx.laws_hold(&em.fibred).unwrap());
            assert!(em.triangles_hold(&x, &fx).unwrap());
            assert_eq!(em.forget(&fx), em.fibred.on_family(&x).unwrap());
        }
    }
}
