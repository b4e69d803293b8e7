//! Refined objects `(X, P, Q)`: a family, a predicate on its base and a
//! predicate on its comprehension bounded by `π*P`.

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::kernel::{
    cartesian, comprehend, comprehend_mor, epsilon, fam_coprod, pi, reindex, sigma, sigma_swap,
    Carrier, FamMor, Family, FinMap,
};
use crate::pred::{exists_along, forall_along, pull, Pred};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RefinedObj {
    x: Family,
    p: Pred,
    q: Pred,
}

impl RefinedObj {
    /// Checks `Q ≤ π_X*P`, reporting the first offending element.
    pub fn new(x: &Family, p: &Pred, q: &Pred) -> Result<RefinedObj> {
        if p.over() != x.base() {
            return Err(Error::BaseMismatch("P is not over the family's base".into()));
        }
        let comp = comprehend(x);
        if q.over() != &comp.total {
            return Err(Error::BaseMismatch("Q is not over the comprehension".into()));
        }
        let bound = pull(&comp.proj, p)?;
        if let Some(w) = q.first_violation(&bound)? {
            return Err(Error::NotRefined { witness: w.clone() });
        }
        Ok(RefinedObj {
            x: x.clone(),
            p: p.clone(),
            q: q.clone(),
        })
    }

    /// The largest refinement `(X, P, π*P)`.
    pub fn full(x: &Family, p: &Pred) -> Result<RefinedObj> {
        let q = pull(&comprehend(x).proj, p)?;
        RefinedObj::new(x, p, &q)
    }

    pub fn family(&self) -> &Family {
        &self.x
    }

    pub fn p(&self) -> &Pred {
        &self.p
    }

    pub fn q(&self) -> &Pred {
        &self.q
    }
}

/// `mk_refined`.
pub fn mk_refined(x: &Family, p: &Pred, q: &Pred) -> Result<RefinedObj> {
    RefinedObj::new(x, p, q)
}

/// A morphism `(f, g, h)`; the predicate components are checked inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedMor {
    src: RefinedObj,
    dst: RefinedObj,
    f: FamMor,
}

impl RefinedMor {
    pub fn new(src: &RefinedObj, dst: &RefinedObj, f: &FamMor) -> Result<RefinedMor> {
        if f.src() != &src.x || f.dst() != &dst.x {
            return Err(Error::BaseMismatch("refined morphism has the wrong underlying type".into()));
        }
        if let Some(w) = src.p.first_violation(&pull(f.base_map(), &dst.p)?)? {
            return Err(Error::NotPredicatePreserving(format!("base element {w}")));
        }
        let cf = comprehend_mor(f)?;
        if let Some(w) = src.q.first_violation(&pull(&cf, &dst.q)?)? {
            return Err(Error::NotPredicatePreserving(format!("comprehension element {w}")));
        }
        Ok(RefinedMor {
            src: src.clone(),
            dst: dst.clone(),
            f: f.clone(),
        })
    }

    pub fn identity(o: &RefinedObj) -> RefinedMor {
        RefinedMor {
            src: o.clone(),
            dst: o.clone(),
            f: FamMor::identity(&o.x),
        }
    }

    pub fn src(&self) -> &RefinedObj {
        &self.src
    }

    pub fn dst(&self) -> &RefinedObj {
        &self.dst
    }

    pub fn underlying(&self) -> &FamMor {
        &self.f
    }

    pub fn after(&self, first: &RefinedMor) -> Result<RefinedMor> {
        RefinedMor::new(&first.src, &self.dst, &self.f.after(&first.f)?)
    }
}

/// The cartesian lifting of `P' ≤ u*P` at `(X, P, Q)`:
/// `(u*X, P', π*P' ∧ {ū}*Q)` together with the morphism to `(X, P, Q)`.
pub fn cart_lift(u: &FinMap, p2: &Pred, obj: &RefinedObj) -> Result<(RefinedObj, RefinedMor)> {
    if p2.over() != u.dom() {
        return Err(Error::BaseMismatch("P' is not over the domain of u".into()));
    }
    let pulled_p = pull(u, &obj.p)?;
    if let Some(w) = p2.first_violation(&pulled_p)? {
        return Err(Error::NotPredicatePreserving(format!("{w} ∈ P' but u({w}) ∉ P")));
    }
    let bar = cartesian(u, &obj.x)?;
    let x2 = bar.src().clone();
    let q2 = pull(&comprehend(&x2).proj, p2)?.meet(&pull(&comprehend_mor(&bar)?, &obj.q)?)?;
    let lifted = RefinedObj::new(&x2, p2, &q2)?;
    let mor = RefinedMor::new(&lifted, obj, &bar)?;
    Ok((lifted, mor))
}

/// Factors `k : O → (X, P, Q)` over `u ∘ v` through the cartesian lifting over `u`.
pub fn factor_through(lift: &RefinedMor, k: &RefinedMor, v: &FinMap) -> Result<RefinedMor> {
    let u = lift.f.base_map();
    if u.after(v)? != *k.f.base_map() {
        return Err(Error::BaseMismatch("base map does not factor".into()));
    }
    let maps = (0..v.dom().len()).map(|j| k.f.fibre_map(j).clone()).collect();
    let f = FamMor::new(k.f.src(), lift.f.src(), v.clone(), maps)?;
    RefinedMor::new(&k.src, &lift.src, &f)
}

/// `1 P = (1 I, P, π*P)`.
pub fn unit_refined(p: &Pred) -> RefinedObj {
    RefinedObj::full(&Family::unit(p.over()), p).expect("unit refinement is well formed")
}

/// `{(X, P, Q)} = Q`.
pub fn comprehend_refined(o: &RefinedObj) -> Pred {
    o.q.clone()
}

fn sharing(o: &RefinedObj, inner: &RefinedObj) -> Result<()> {
    if inner.p != o.q {
        return Err(Error::SharingMismatch(
            "the inner object's base predicate must be the outer comprehension".into(),
        ));
    }
    Ok(())
}

/// `Σ_{(X,P,Q)} (Y, Q, R) = (Σ_X Y, P, (κ⁻¹)*R)`.
pub fn sigma_refined(o: &RefinedObj, inner: &RefinedObj) -> Result<RefinedObj> {
    sharing(o, inner)?;
    let s = sigma(&o.x, &inner.x)?;
    let kinv = s.kappa.inverse().expect("κ is a bijection");
    let q = pull(&kinv, &inner.q)?;
    RefinedObj::new(&s.family, &o.p, &q)
}

/// `Π_{(X,P,Q)} (Y, Q, R) = (Π_X Y, P, π*P ∧ ∀ σ*(π*Q ⇒ {ε}*R))`.
pub fn pi_refined(o: &RefinedObj, inner: &RefinedObj) -> Result<RefinedObj> {
    sharing(o, inner)?;
    let x = &o.x;
    let y = &inner.x;
    let prod = pi(x, y)?;
    let pi_proj = comprehend(&prod).proj;
    // over {π_X*Π}: π*Q ⇒ {ε}*R
    let x_over_pi = reindex(&comprehend(x).proj, &prod)?;
    let guard = pull(&comprehend(&x_over_pi).proj, &o.q)?;
    let post = pull(&comprehend_mor(&epsilon(x, y)?)?, &inner.q)?;
    let body = guard.implies(&post)?;
    // transport to {π_Π*X} and quantify over the argument
    let swap = sigma_swap(&prod, x)?;
    let moved = pull(&swap, &body)?;
    let arg_fam = reindex(&pi_proj, x)?;
    let all = forall_along(&comprehend(&arg_fam).proj, &moved)?;
    let q = pull(&pi_proj, &o.p)?.meet(&all)?;
    RefinedObj::new(&prod, &o.p, &q)
}

/// `(X, P, Q) + (Y, P, R) = (X + Y, P, ∃_{ι1} Q ∨ ∃_{ι2} R)`.
pub fn coprod_refined(a: &RefinedObj, b: &RefinedObj) -> Result<RefinedObj> {
    if a.x.base() != b.x.base() {
        return Err(Error::BaseMismatch("coproduct of refined objects over different bases".into()));
    }
    if a.p != b.p {
        return Err(Error::SharingMismatch("coproduct summands must share P".into()));
    }
    let co = fam_coprod(&a.x, &b.x)?;
    let l = exists_along(&comprehend_mor(&co.inl)?, &a.q)?;
    let r = exists_along(&comprehend_mor(&co.inr)?, &b.q)?;
    RefinedObj::new(&co.family, &a.p, &l.join(&r)?)
}

/// `(X,P,Q) <: (X',P',Q')` iff `X = X'`, `P = P'` and `Q ≤ Q'`.
pub fn semantic_subtype(a: &RefinedObj, b: &RefinedObj) -> bool {
    a.x == b.x && a.p == b.p && a.q.leq(&b.q).unwrap_or(false)
}

pub fn project_u(o: &RefinedObj) -> &Family {
    &o.x
}

pub fn project_r(o: &RefinedObj) -> &Pred {
    &o.p
}

/// The fibre `Q_i ⊆ X(i)` of a refinement at a base element.
pub fn fibre_of(o: &RefinedObj, i: &Atom) -> Option<Carrier> {
    let fib = o.x.fibre(i)?;
    Some(Carrier::new(
        fib.iter()
            .filter(|x| o.q.contains(&Atom::pair(i.clone(), (*x).clone())))
            .cloned(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::total;

    fn s(x: &str) -> Atom {
        Atom::sym(x)
    }

    fn i(n: i64) -> Atom {
        Atom::int(n)
    }

    fn one_point() -> Carrier {
        Carrier::new([s("a")])
    }

    #[test]
    fn mk_refined_examples() {
        let x = Family::new(&one_point(), vec![Carrier::new([i(0)])]).unwrap();
        let tot = total(&x);
        assert!(RefinedObj::new(&x, &Pred::bottom(&one_point()), &Pred::bottom(&tot)).is_ok());
        assert!(RefinedObj::full(&x, &Pred::top(&one_point())).is_ok());
        let err = RefinedObj::new(&x, &Pred::bottom(&one_point()), &Pred::top(&tot)).unwrap_err();
        assert_eq!(err, Error::NotRefined { witness: Atom::pair(s("a"), i(0)) });
    }

    #[test]
    fn cart_lift_identity_and_bottom() {
        let x = Family::new(&one_point(), vec![Carrier::new([i(0), i(1)])]).unwrap();
        let tot = total(&x);
        let o = RefinedObj::new(&x, &Pred::top(&one_point()), &Pred::new(&tot, [Atom::pair(s("a"), i(1))]).unwrap())
            .unwrap();
        let id = FinMap::identity(&one_point());
        let (l, _) = cart_lift(&id, o.p(), &o).unwrap();
        assert_eq!(l, o);
        let (l, _) = cart_lift(&id, &Pred::bottom(&one_point()), &o).unwrap();
        assert!(l.q().is_bottom());
    }

    #[test]
    fn pi_refined_vacuous_guard() {
        let x = Family::new(&one_point(), vec![Carrier::new([i(0), i(1)])]).unwrap();
        let top = Pred::top(&one_point());
        let o = RefinedObj::new(&x, &top, &Pred::bottom(&total(&x))).unwrap();
        let y = Family::constant(&total(&x), &Carrier::new([i(0), i(1)]));
        let inner = RefinedObj::new(&y, o.q(), &Pred::bottom(&total(&y))).unwrap();
        let r = pi_refined(&o, &inner).unwrap();
        assert!(r.q().is_top());
    }

    #[test]
    fn pi_refined_identity_postcondition() {
        let base = Carrier::unit();
        let x = Family::new(&base, vec![Carrier::new([i(0), i(1)])]).unwrap();
        let top = Pred::top(&base);
        let q = Pred::new(&total(&x), [Atom::pair(Atom::Unit, i(0))]).unwrap();
        let o = RefinedObj::new(&x, &top, &q).unwrap();
        let y = Family::constant(&total(&x), &Carrier::new([i(0), i(1)]));
        let r_pred = Pred::from_fn(&total(&y), |e| {
            let (ix, out) = e.as_pair().unwrap();
            q.contains(ix) && ix.snd() == Some(out)
        });
        let inner = RefinedObj::new(&y, &q, &r_pred).unwrap();
        let r = pi_refined(&o, &inner).unwrap();
        let accepted: Vec<&Atom> = r.q().members().collect();
        assert_eq!(accepted.len(), 2);
        for e in accepted {
            assert_eq!(e.snd().unwrap().apply(&i(0)), Some(&i(0)));
        }
    }

    #[test]
    fn coprod_refined_examples() {
        let x = Family::new(&one_point(), vec![Carrier::new([i(0)])]).unwrap();
        let top = Pred::top(&one_point());
        let empty = RefinedObj::new(&x, &top, &Pred::bottom(&total(&x))).unwrap();
        assert!(coprod_refined(&empty, &empty).unwrap().q().is_bottom());
        let full = RefinedObj::full(&x, &top).unwrap();
        let r = coprod_refined(&full, &empty).unwrap();
        let members: Vec<Atom> = r.q().members().cloned().collect();
        assert_eq!(members, vec![Atom::pair(s("a"), Atom::inl(i(0)))]);
        let other = RefinedObj::full(&x, &Pred::bottom(&one_point())).unwrap();
        assert!(matches!(coprod_refined(&full, &other), Err(Error::SharingMismatch(_))));
    }

    #[test]
    fn subtyping_examples() {
        let x = Family::new(&one_point(), vec![Carrier::new([i(0)])]).unwrap();
        let top = Pred::top(&one_point());
        let full = RefinedObj::full(&x, &top).unwrap();
        let empty = RefinedObj::new(&x, &top, &Pred::bottom(&total(&x))).unwrap();
        assert!(semantic_subtype(&full, &full));
        assert!(semantic_subtype(&empty, &full));
        assert!(!semantic_subtype(&full, &empty));
        let x2 = Family::new(&one_point(), vec![Carrier::new([i(1)])]).unwrap();
        let other = RefinedObj::new(&x2, &top, &Pred::bottom(&total(&x2))).unwrap();
        assert!(!semantic_subtype(&empty, &other));
    }

    #[test]
    fn unit_and_sigma_projection() {
        let p = Pred::top(&one_point());
        let u = unit_refined(&p);
        assert_eq!(project_u(&u), &Family::unit(&one_point()));
        assert!(u.q().is_top());
        let x = Family::new(&one_point(), vec![Carrier::new([i(0), i(1)])]).unwrap();
        let o = RefinedObj::full(&x, &p).unwrap();
        let y = Family::constant(&total(&x), &Carrier::new([i(5)]));
        let inner = RefinedObj::full(&y, o.q()).unwrap();
        let sg = sigma_refined(&o, &inner).unwrap();
        assert_eq!(project_r(&sg), &p);
        assert!(sg.q().is_top());
        let empty_unit = unit_refined(&Pred::top(&Carrier::empty()));
        assert!(empty_unit.q().over().is_empty());
    }
}
