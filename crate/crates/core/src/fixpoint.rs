//! Finite pointed posets, Kleene least fixed points and the fibrewise
//! Conway operator on families of pointed posets.

use std::sync::Arc;

use crate::atom::Atom;
use crate::effect::MonadKind;
use crate::error::{Error, Result};
use crate::kernel::{
    comprehend, diagonal, phi, phi_inv, pi, reindex, reindex_mor, Carrier, FamMor, Family, FinMap,
};
use crate::refined::{RefinedMor, RefinedObj};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointedPoset {
    carrier: Carrier,
    leq: Arc<[bool]>,
    bottom: usize,
}

impl std::fmt::Debug for PointedPoset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PointedPoset({}, bottom {})", self.carrier, self.bottom())
    }
}

impl PointedPoset {
    /// Checks the order axioms and finds the least element.
    pub fn new(carrier: &Carrier, mut leq: impl FnMut(&Atom, &Atom) -> bool) -> Result<PointedPoset> {
        let n = carrier.len();
        let elems = carrier.elems();
        let mut m = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                m[a * n + b] = leq(&elems[a], &elems[b]);
            }
        }
        for a in 0..n {
            if !m[a * n + a] {
                return Err(Error::NotPoset(format!("{} is not below itself", elems[a])));
            }
            for b in 0..n {
                if a != b && m[a * n + b] && m[b * n + a] {
                    return Err(Error::NotPoset(format!("{} and {} are equivalent", elems[a], elems[b])));
                }
                for c in 0..n {
                    if m[a * n + b] && m[b * n + c] && !m[a * n + c] {
                        return Err(Error::NotPoset(format!(
                            "{} ≤ {} ≤ {} but not {} ≤ {}",
                            elems[a], elems[b], elems[c], elems[a], elems[c]
                        )));
                    }
                }
            }
        }
        let bottom = (0..n)
            .find(|&a| (0..n).all(|b| m[a * n + b]))
            .ok_or_else(|| Error::NotPoset(format!("{carrier} has no least element")))?;
        Ok(PointedPoset {
            carrier: carrier.clone(),
            leq: m.into(),
            bottom,
        })
    }

    /// The flat order with `bottom` below everything else.
    pub fn flat(carrier: &Carrier, bottom: &Atom) -> Result<PointedPoset> {
        if !carrier.contains(bottom) {
            return Err(Error::NotMember {
                atom: bottom.clone(),
                what: "the poset".into(),
            });
        }
        PointedPoset::new(carrier, |a, b| a == b || a == bottom)
    }

    /// A total order following the canonical enumeration.
    pub fn chain(carrier: &Carrier) -> Result<PointedPoset> {
        PointedPoset::new(carrier, |a, b| a <= b)
    }

    /// Computation carriers of a monad, ordered for recursion.
    pub fn of_monad(monad: MonadKind, carrier: &Carrier) -> Result<PointedPoset> {
        if monad.bottom().is_none() {
            return Err(Error::NotPoset(format!(
                "computations of the {monad} monad have no least element"
            )));
        }
        PointedPoset::new(carrier, |a, b| monad.leq(a, b))
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn bottom(&self) -> &Atom {
        &self.carrier.elems()[self.bottom]
    }

    pub fn leq_at(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.carrier.len() + b]
    }

    pub fn leq(&self, a: &Atom, b: &Atom) -> bool {
        match (self.carrier.index_of(a), self.carrier.index_of(b)) {
            (Some(x), Some(y)) => self.leq_at(x, y),
            _ => false,
        }
    }

    /// Checks monotonicity of a map between posets.
    pub fn monotone_into(&self, f: &FinMap, cod: &PointedPoset) -> Result<()> {
        let n = self.carrier.len();
        for a in 0..n {
            for b in 0..n {
                if self.leq_at(a, b) && !cod.leq_at(f.image_index(a), f.image_index(b)) {
                    let e = self.carrier.elems();
                    return Err(Error::NotMonotone {
                        witness: format!("{} ≤ {} but their images are unordered", e[a], e[b]),
                    });
                }
            }
        }
        Ok(())
    }
}

/// A monotone endomap of a pointed poset.
#[derive(Clone, Debug)]
pub struct MonoEndo {
    poset: PointedPoset,
    map: FinMap,
}

impl MonoEndo {
    pub fn new(poset: &PointedPoset, map: &FinMap) -> Result<MonoEndo> {
        if map.dom() != poset.carrier() || map.cod() != poset.carrier() {
            return Err(Error::BaseMismatch("endomap is not on the poset's carrier".into()));
        }
        poset.monotone_into(map, poset)?;
        Ok(MonoEndo {
            poset: poset.clone(),
            map: map.clone(),
        })
    }

    pub fn poset(&self) -> &PointedPoset {
        &self.poset
    }

    pub fn map(&self) -> &FinMap {
        &self.map
    }
}

/// Kleene iteration from the bottom.
pub fn lfp(f: &MonoEndo) -> Atom {
    let mut k = f.poset.bottom;
    loop {
        let next = f.map.image_index(k);
        if next == k {
            return f.poset.carrier.elems()[k].clone();
        }
        k = next;
    }
}

/// Kleene iteration for a step function given pointwise; fails if the chain
/// does not stabilise within `limit` steps or ever decreases.
pub fn kleene(
    bottom: Atom,
    limit: usize,
    leq: impl Fn(&Atom, &Atom) -> bool,
    mut step: impl FnMut(&Atom) -> Result<Atom>,
) -> Result<Atom> {
    let mut x = bottom;
    for _ in 0..=limit {
        let next = step(&x)?;
        if next == x {
            return Ok(x);
        }
        if !leq(&x, &next) {
            return Err(Error::NotMonotone {
                witness: format!("iteration moved from {x} to the incomparable {next}"),
            });
        }
        x = next;
    }
    Err(Error::NotMonotone {
        witness: format!("no fixed point reached after {limit} steps"),
    })
}

/// A family of pointed posets, i.e. an object of the domain `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetFamily {
    base: Carrier,
    fibres: Arc<[PointedPoset]>,
}

impl PosetFamily {
    pub fn new(base: &Carrier, fibres: Vec<PointedPoset>) -> Result<PosetFamily> {
        if fibres.len() != base.len() {
            return Err(Error::BaseMismatch("one poset per base element required".into()));
        }
        Ok(PosetFamily {
            base: base.clone(),
            fibres: fibres.into(),
        })
    }

    /// Orders every fibre of `x` with `order`, failing if some fibre is not pointed.
    pub fn from_family(
        x: &Family,
        mut order: impl FnMut(&Atom, &Carrier) -> Result<PointedPoset>,
    ) -> Result<PosetFamily> {
        let fibres = x
            .base()
            .iter()
            .enumerate()
            .map(|(k, i)| order(i, x.fibre_at(k)))
            .collect::<Result<Vec<_>>>()?;
        PosetFamily::new(x.base(), fibres)
    }

    pub fn base(&self) -> &Carrier {
        &self.base
    }

    pub fn fibre_at(&self, k: usize) -> &PointedPoset {
        &self.fibres[k]
    }

    pub fn family(&self) -> Family {
        Family::new(&self.base, self.fibres.iter().map(|p| p.carrier.clone()).collect())
            .expect("aligned")
    }

    pub fn reindex(&self, u: &FinMap) -> Result<PosetFamily> {
        if u.cod() != &self.base {
            return Err(Error::BaseMismatch("reindexing a poset family along a foreign map".into()));
        }
        PosetFamily::new(
            u.dom(),
            (0..u.dom().len()).map(|k| self.fibres[u.image_index(k)].clone()).collect(),
        )
    }

    /// Checks that a vertical morphism into `cod` is monotone in every fibre.
    pub fn monotone_into(&self, f: &FamMor, cod: &PosetFamily) -> Result<()> {
        if !f.is_vertical() || f.src() != &self.family() || f.dst() != &cod.family() {
            return Err(Error::BaseMismatch("morphism does not match the poset families".into()));
        }
        for k in 0..self.base.len() {
            self.fibres[k]
                .monotone_into(f.fibre_map(k), &cod.fibres[k])
                .map_err(|e| match e {
                    Error::NotMonotone { witness } => Error::NotMonotone {
                        witness: format!("in the fibre over {}: {witness}", self.base.elems()[k]),
                    },
                    other => other,
                })?;
        }
        Ok(())
    }
}

/// The operator `(−)^‡`: fibrewise least fixed points, as a vertical `1 I → X`.
pub fn conway(fam: &PosetFamily, f: &FamMor) -> Result<FamMor> {
    fam.monotone_into(f, fam)?;
    let x = fam.family();
    let unit = Family::unit(&fam.base);
    FamMor::vertical_from_fn(&unit, &x, |i, _| {
        let k = fam.base.index_of(i).expect("base");
        let endo = MonoEndo::new(&fam.fibres[k], f.fibre_map(k))?;
        Ok(lfp(&endo))
    })
}

/// Pointwise order on dependent functions into pointed fibres.
pub fn pi_poset_family(x: &Family, y: &PosetFamily) -> Result<PosetFamily> {
    let prod = pi(x, &y.family())?;
    PosetFamily::from_family(&prod, |i, fib| {
        PointedPoset::new(fib, |f, g| {
            x.fibre(i).expect("base").iter().all(|a| {
                let k = y.base.index_of(&Atom::pair(i.clone(), a.clone())).expect("total");
                y.fibres[k].leq(f.apply(a).expect("total"), g.apply(a).expect("total"))
            })
        })
    })
}

/// Transports the order along a vertical isomorphism `X → Y`.
pub fn transport(iso: &FamMor, fam: &PosetFamily) -> Result<PosetFamily> {
    if !iso.is_vertical() || iso.src() != &fam.family() {
        return Err(Error::NotVertical);
    }
    let y = iso.dst().clone();
    let fibres = (0..fam.base.len())
        .map(|k| {
            let inv = iso
                .fibre_map(k)
                .inverse()
                .ok_or_else(|| Error::NotPoset("transport along a non-isomorphism".into()))?;
            PointedPoset::new(y.fibre_at(k), |a, b| {
                fam.fibres[k].leq(inv.apply(a).expect("total"), inv.apply(b).expect("total"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PosetFamily::new(&fam.base, fibres)
}

/// Outcome of evaluating one Conway law instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub law: &'static str,
    pub holds: bool,
    pub detail: String,
}

/// Naturality: `u*(f^‡) = (u*f)^‡`.
pub fn check_naturality(fam: &PosetFamily, f: &FamMor, u: &FinMap) -> Result<LawCheck> {
    let lhs = reindex_mor(u, &conway(fam, f)?)?;
    let rhs = conway(&fam.reindex(u)?, &reindex_mor(u, f)?)?;
    Ok(LawCheck {
        law: "naturality",
        holds: lhs == rhs,
        detail: format!("{lhs:?} vs {rhs:?}"),
    })
}

/// Dinaturality: `(g ∘ f)^‡ = g ∘ (f ∘ g)^‡`.
pub fn check_dinaturality(
    xf: &PosetFamily,
    yf: &PosetFamily,
    f: &FamMor,
    g: &FamMor,
) -> Result<LawCheck> {
    xf.monotone_into(f, yf)?;
    yf.monotone_into(g, xf)?;
    let lhs = conway(xf, &g.after(f)?)?;
    let rhs = g.after(&conway(yf, &f.after(g)?)?)?;
    Ok(LawCheck {
        law: "dinaturality",
        holds: lhs == rhs,
        detail: format!("{lhs:?} vs {rhs:?}"),
    })
}

/// Diagonal property: `(φ(f^‡))^‡ = (φ(δ_X*(φ⁻¹ f)))^‡` for a vertical
/// endomorphism `f` of `π_X*X`.
pub fn check_diagonal(fam: &PosetFamily, f: &FamMor) -> Result<LawCheck> {
    let x = fam.family();
    let proj = comprehend(&x).proj;
    let pulled = fam.reindex(&proj)?;
    let pulled_x = reindex(&proj, &x)?;
    // left: fix the inner variable first, then the outer one
    let inner = conway(&pulled, f)?;
    let outer = phi(&x, &x, &inner)?;
    let lhs = conway(fam, &outer)?;
    // right: restrict to the diagonal
    let curried = phi_inv(&pulled_x, f)?;
    let restricted = reindex_mor(&diagonal(&x)?, &curried)?;
    let diag = phi(&x, &x, &restricted)?;
    let rhs = conway(fam, &diag)?;
    Ok(LawCheck {
        law: "diagonal",
        holds: lhs == rhs,
        detail: format!("{lhs:?} vs {rhs:?}"),
    })
}

/// Whether `φ(f)` is monotone in its parameter, i.e. `f` is jointly
/// monotone as a map `X(i) × X(i) → X(i)`.
pub fn jointly_monotone(fam: &PosetFamily, f: &FamMor) -> bool {
    let x = fam.family();
    for (k, i) in x.base().iter().enumerate() {
        let p = &fam.fibres[k];
        let elems = p.carrier.elems();
        for a in elems {
            for a2 in elems {
                if !p.leq(a, a2) {
                    continue;
                }
                for b in elems {
                    for b2 in elems {
                        if !p.leq(b, b2) {
                            continue;
                        }
                        let fa = f.apply(&Atom::pair(i.clone(), a.clone()), b);
                        let fb = f.apply(&Atom::pair(i.clone(), a2.clone()), b2);
                        match (fa, fb) {
                            (Some(s), Some(t)) if p.leq(s, t) => {}
                            _ => return false,
                        }
                    }
                }
            }
        }
    }
    true
}

/// Whether `{f^‡}` restricted to `P` lands in `Q`: the side condition under
/// which the fibrewise operator lifts to refined objects.
pub fn conway_lift_check(o: &RefinedObj, fam: &PosetFamily, f: &RefinedMor) -> Result<bool> {
    if fam.family() != *o.family() || f.src() != o || f.dst() != o {
        return Err(Error::BaseMismatch("recursion body is not an endomorphism of the object".into()));
    }
    let fix = conway(fam, f.underlying())?;
    Ok(conway_lift_witness(o, &fix)?.is_none())
}

/// The first `i ∈ P` with `(i, lfp f_i) ∉ Q`, if any.
pub fn conway_lift_witness(o: &RefinedObj, fix: &FamMor) -> Result<Option<Atom>> {
    for i in o.p().members() {
        let v = fix.apply(i, &Atom::Unit).ok_or_else(|| Error::NotMember {
            atom: i.clone(),
            what: "the fixed point's base".into(),
        })?;
        if !o.q().contains(&Atom::pair(i.clone(), v.clone())) {
            return Ok(Some(i.clone()));
        }
    }
    Ok(None)
}

/// The domain `K` contains `UFX` for the monads with pointed computation carriers.
pub fn k_contains_free(monad: MonadKind, x: &Family) -> Result<bool> {
    let fm = crate::effect::FibredMonad::new(monad);
    let tx = fm.on_family(x)?;
    Ok(PosetFamily::from_family(&tx, |_, c| PointedPoset::of_monad(monad, c)).is_ok())
}
