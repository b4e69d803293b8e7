//! The subobject fibration `Sub(FinSet) → FinSet`.
//!
//! Predicates are subsets of a carrier, stored as membership bits aligned with
//! the carrier's canonical enumeration. Every fibre is a boolean algebra.

use std::fmt;
use std::sync::Arc;

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::kernel::{comprehend, diagonal, reindex, Carrier, Family, FinMap};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pred {
    over: Carrier,
    bits: Arc<[bool]>,
}

impl Pred {
    pub fn new(over: &Carrier, members: impl IntoIterator<Item = Atom>) -> Result<Pred> {
        let mut bits = vec![false; over.len()];
        for a in members {
            let k = over.index_of(&a).ok_or_else(|| Error::NotMember {
                atom: a.clone(),
                what: "the predicate's carrier".into(),
            })?;
            bits[k] = true;
        }
        Ok(Pred::from_bits(over, bits))
    }

    pub fn from_fn(over: &Carrier, mut f: impl FnMut(&Atom) -> bool) -> Pred {
        let bits = over.iter().map(&mut f).collect::<Vec<_>>();
        Pred::from_bits(over, bits)
    }

    pub fn try_from_fn(over: &Carrier, mut f: impl FnMut(&Atom) -> Result<bool>) -> Result<Pred> {
        let bits = over.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(Pred::from_bits(over, bits))
    }

    pub fn from_bits(over: &Carrier, bits: Vec<bool>) -> Pred {
        assert_eq!(bits.len(), over.len(), "predicate bits misaligned with carrier");
        Pred {
            over: over.clone(),
            bits: bits.into(),
        }
    }

    pub fn top(over: &Carrier) -> Pred {
        Pred::from_bits(over, vec![true; over.len()])
    }

    pub fn bottom(over: &Carrier) -> Pred {
        Pred::from_bits(over, vec![false; over.len()])
    }

    pub fn over(&self) -> &Carrier {
        &self.over
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.over.index_of(a).is_some_and(|k| self.bits[k])
    }

    pub fn contains_at(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn members(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.over.iter().zip(self.bits.iter()).filter(|(_, &b)| b).map(|(a, _)| a)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_top(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn is_bottom(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    fn same_carrier(&self, other: &Pred) -> Result<()> {
        if self.over != other.over {
            return Err(Error::BaseMismatch("predicates over different carriers".into()));
        }
        Ok(())
    }

    fn zip(&self, other: &Pred, f: impl Fn(bool, bool) -> bool) -> Result<Pred> {
        self.same_carrier(other)?;
        let bits = self.bits.iter().zip(other.bits.iter()).map(|(&a, &b)| f(a, b)).collect();
        Ok(Pred::from_bits(&self.over, bits))
    }

    pub fn meet(&self, other: &Pred) -> Result<Pred> {
        self.zip(other, |a, b| a && b)
    }

    pub fn join(&self, other: &Pred) -> Result<Pred> {
        self.zip(other, |a, b| a || b)
    }

    pub fn implies(&self, other: &Pred) -> Result<Pred> {
        self.zip(other, |a, b| !a || b)
    }

    pub fn not(&self) -> Pred {
        Pred::from_bits(&self.over, self.bits.iter().map(|&b| !b).collect())
    }

    /// The fibre order `self ⊆ other`.
    pub fn leq(&self, other: &Pred) -> Result<bool> {
        self.same_carrier(other)?;
        Ok(self.bits.iter().zip(other.bits.iter()).all(|(&a, &b)| !a || b))
    }

    /// Some element in `self` but not in `other`.
    pub fn first_violation(&self, other: &Pred) -> Result<Option<&Atom>> {
        self.same_carrier(other)?;
        Ok(self
            .bits
            .iter()
            .zip(other.bits.iter())
            .position(|(&a, &b)| a && !b)
            .map(|k| &self.over.elems()[k]))
    }
}

impl fmt::Debug for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.members().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Preimage `u*P`.
pub fn pull(u: &FinMap, p: &Pred) -> Result<Pred> {
    if u.cod() != p.over() {
        return Err(Error::BaseMismatch("pullback along a map into another carrier".into()));
    }
    let bits = (0..u.dom().len()).map(|k| p.bits[u.image_index(k)]).collect();
    Ok(Pred::from_bits(u.dom(), bits))
}

/// Right adjoint to [`pull`]: `{j | ∀i. u(i) = j ⇒ i ∈ Q}`.
pub fn forall_along(u: &FinMap, q: &Pred) -> Result<Pred> {
    if u.dom() != q.over() {
        return Err(Error::BaseMismatch("∀ along a map from another carrier".into()));
    }
    let mut bits = vec![true; u.cod().len()];
    for k in 0..u.dom().len() {
        if !q.bits[k] {
            bits[u.image_index(k)] = false;
        }
    }
    Ok(Pred::from_bits(u.cod(), bits))
}

/// Left adjoint to [`pull`]: `{j | ∃i. u(i) = j ∧ i ∈ Q}`.
pub fn exists_along(u: &FinMap, q: &Pred) -> Result<Pred> {
    if u.dom() != q.over() {
        return Err(Error::BaseMismatch("∃ along a map from another carrier".into()));
    }
    let mut bits = vec![false; u.cod().len()];
    for k in 0..u.dom().len() {
        if q.bits[k] {
            bits[u.image_index(k)] = true;
        }
    }
    Ok(Pred::from_bits(u.cod(), bits))
}

/// `Eq_X(P) = ∃_{δ_X} P` for `P` over `{X}`.
pub fn eq_along_diagonal(x: &Family, p: &Pred) -> Result<Pred> {
    exists_along(&diagonal(x)?, p)
}

/// `Eq_X(⊤)`: the predicate `{((i,x),x') | x = x'}` over `{π_X*X}`.
pub fn equality_pred(x: &Family) -> Result<Pred> {
    let total = comprehend(x).total;
    eq_along_diagonal(x, &Pred::top(&total))
}

/// Carrier of `{π_X*X}`, on which [`equality_pred`] lives.
pub fn equality_carrier(x: &Family) -> Result<Carrier> {
    Ok(comprehend(&reindex(&comprehend(x).proj, x)?).total)
}

/// `u × u`.
pub fn square_map(u: &FinMap) -> Result<FinMap> {
    let dom = u.dom().square();
    let cod = u.cod().square();
    FinMap::from_fn(&dom, &cod, |e| {
        let (a, b) = e.as_pair().expect("pair");
        Atom::pair(
            u.apply(a).expect("total").clone(),
            u.apply(b).expect("total").clone(),
        )
    })
}

/// An endorelation, obtained from [`Pred`] by change of base along `X ↦ X × X`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rel {
    over: Carrier,
    pred: Pred,
}

impl Rel {
    pub fn new(over: &Carrier, pairs: impl IntoIterator<Item = (Atom, Atom)>) -> Result<Rel> {
        let sq = over.square();
        let pred = Pred::new(&sq, pairs.into_iter().map(|(a, b)| Atom::pair(a, b)))?;
        Ok(Rel { over: over.clone(), pred })
    }

    pub fn from_pred(over: &Carrier, pred: Pred) -> Result<Rel> {
        if pred.over() != &over.square() {
            return Err(Error::BaseMismatch("relation predicate is not over the square".into()));
        }
        Ok(Rel { over: over.clone(), pred })
    }

    pub fn top(over: &Carrier) -> Rel {
        Rel { over: over.clone(), pred: Pred::top(&over.square()) }
    }

    pub fn bottom(over: &Carrier) -> Rel {
        Rel { over: over.clone(), pred: Pred::bottom(&over.square()) }
    }

    pub fn diagonal(over: &Carrier) -> Rel {
        let sq = over.square();
        Rel {
            over: over.clone(),
            pred: Pred::from_fn(&sq, |e| e.fst() == e.snd()),
        }
    }

    pub fn over(&self) -> &Carrier {
        &self.over
    }

    pub fn as_pred(&self) -> &Pred {
        &self.pred
    }

    pub fn related(&self, a: &Atom, b: &Atom) -> bool {
        self.pred.contains(&Atom::pair(a.clone(), b.clone()))
    }

    pub fn meet(&self, other: &Rel) -> Result<Rel> {
        Rel::from_pred(&self.over, self.pred.meet(&other.pred)?)
    }

    pub fn join(&self, other: &Rel) -> Result<Rel> {
        Rel::from_pred(&self.over, self.pred.join(&other.pred)?)
    }

    pub fn implies(&self, other: &Rel) -> Result<Rel> {
        Rel::from_pred(&self.over, self.pred.implies(&other.pred)?)
    }

    pub fn leq(&self, other: &Rel) -> Result<bool> {
        self.pred.leq(&other.pred)
    }

    /// Reindexing: preimage under `u × u`.
    pub fn pull(u: &FinMap, r: &Rel) -> Result<Rel> {
        Rel::from_pred(u.dom(), pull(&square_map(u)?, &r.pred)?)
    }

    pub fn forall_along(u: &FinMap, r: &Rel) -> Result<Rel> {
        Rel::from_pred(u.cod(), forall_along(&square_map(u)?, &r.pred)?)
    }

    pub fn exists_along(u: &FinMap, r: &Rel) -> Result<Rel> {
        Rel::from_pred(u.cod(), exists_along(&square_map(u)?, &r.pred)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(xs: &[i64]) -> Carrier {
        Carrier::new(xs.iter().map(|&n| Atom::int(n)))
    }

    fn p(over: &Carrier, xs: &[i64]) -> Pred {
        Pred::new(over, xs.iter().map(|&n| Atom::int(n))).unwrap()
    }

    fn s(x: &str) -> Atom {
        Atom::sym(x)
    }

    #[test]
    fn pull_examples() {
        let cd = Carrier::new([s("c"), s("d")]);
        let ab = Carrier::new([s("a"), s("b")]);
        let u = FinMap::from_fn(&ab, &cd, |_| s("c")).unwrap();
        let q = Pred::new(&cd, [s("c")]).unwrap();
        assert_eq!(pull(&u, &q).unwrap(), Pred::top(&ab));
        assert_eq!(pull(&FinMap::identity(&cd), &q).unwrap(), q);
        assert!(pull(&u, &Pred::top(&cd)).unwrap().is_top());
    }

    #[test]
    fn heyting_examples() {
        let c3 = c(&[0, 1, 2]);
        assert_eq!(p(&c3, &[0, 1]).implies(&p(&c3, &[1])).unwrap(), p(&c3, &[1, 2]));
        let q = p(&c3, &[2]);
        assert!(q.implies(&q).unwrap().is_top());
        assert_eq!(Pred::top(&c3).meet(&q).unwrap(), q);
        assert!(matches!(q.meet(&Pred::top(&c(&[0]))), Err(Error::BaseMismatch(_))));
    }

    #[test]
    fn quantifier_examples() {
        let ab = Carrier::new([s("a"), s("b")]);
        let cc = Carrier::new([s("c")]);
        let u = FinMap::from_fn(&ab, &cc, |_| s("c")).unwrap();
        let q = Pred::new(&ab, [s("a")]).unwrap();
        assert!(forall_along(&u, &q).unwrap().is_bottom());
        assert!(exists_along(&u, &q).unwrap().is_top());

        // empty fibre over e
        let ce = Carrier::new([s("c"), s("e")]);
        let v = FinMap::from_fn(&ab, &ce, |_| s("c")).unwrap();
        assert!(forall_along(&v, &q).unwrap().contains(&s("e")));
        assert!(!exists_along(&v, &q).unwrap().contains(&s("e")));
    }

    #[test]
    fn equality_examples() {
        let base = Carrier::new([s("a")]);
        let x = Family::new(&base, vec![c(&[0, 1])]).unwrap();
        let eq = equality_pred(&x).unwrap();
        assert_eq!(eq.over().len(), 4);
        let members: Vec<Atom> = eq.members().cloned().collect();
        assert_eq!(
            members,
            vec![
                Atom::pair(Atom::pair(s("a"), Atom::int(0)), Atom::int(0)),
                Atom::pair(Atom::pair(s("a"), Atom::int(1)), Atom::int(1)),
            ]
        );
        assert!(pull(&diagonal(&x).unwrap(), &eq).unwrap().is_top());
    }

    #[test]
    fn relation_backend() {
        let c2 = c(&[0, 1]);
        let d = Rel::diagonal(&c2);
        assert!(d.related(&Atom::int(0), &Atom::int(0)));
        assert!(!d.related(&Atom::int(0), &Atom::int(1)));
        let u = FinMap::to_unit(&c2);
        let pulled = Rel::pull(&u, &Rel::diagonal(&Carrier::unit())).unwrap();
        assert_eq!(pulled, Rel::top(&c2));
        // diagonal relation agrees with the equality predicate of the constant family
        let x = Family::constant(&Carrier::unit(), &c2);
        let eq = equality_pred(&x).unwrap();
        for a in c2.iter() {
            for b in c2.iter() {
                let key = Atom::pair(Atom::pair(Atom::Unit, a.clone()), b.clone());
                assert_eq!(eq.contains(&key), d.related(a, b));
            }
        }
    }
}
