//! The family fibration `Fam(FinSet) → FinSet` as a split closed
//! comprehension category.
//!
//! Objects over a carrier `I` are [`Family`] values assigning a finite carrier
//! to every element of `I`. Reindexing is strict (`reindex(id) = id` on the
//! nose), comprehension is the disjoint union of fibres, and Σ/Π are computed
//! fibrewise with canonical encodings (pairs for Σ, sorted graphs for Π), so
//! equality of every construction is decided by structural comparison.

use std::fmt;
use std::sync::Arc;

use crate::atom::Atom;
use crate::error::{Error, Result};

/// Largest dependent-function space [`pi`] is willing to enumerate.
pub const PI_LIMIT: usize = 1 << 20;

#[derive(Clone)]
pub struct Carrier(Arc<CarrierInner>);

struct CarrierInner {
    elems: Vec<Atom>,
    name: Option<String>,
}

impl Carrier {
    pub fn new(elems: impl IntoIterator<Item = Atom>) -> Carrier {
        let mut elems: Vec<Atom> = elems.into_iter().collect();
        elems.sort();
        elems.dedup();
        Carrier(Arc::new(CarrierInner { elems, name: None }))
    }

    pub fn named(name: &str, elems: impl IntoIterator<Item = Atom>) -> Carrier {
        let c = Carrier::new(elems);
        Carrier(Arc::new(CarrierInner {
            elems: c.0.elems.clone(),
            name: Some(name.to_string()),
        }))
    }

    pub fn empty() -> Carrier {
        Carrier::new([])
    }

    /// The terminal carrier `{()}`.
    pub fn unit() -> Carrier {
        Carrier::new([Atom::Unit])
    }

    /// `{0, 1, ..., n-1}`.
    pub fn range(n: usize) -> Carrier {
        Carrier::new((0..n as i64).map(Atom::Int))
    }

    pub fn elems(&self) -> &[Atom] {
        &self.0.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Atom> {
        self.0.elems.iter()
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    pub fn name(&self) -> Option<&str> {
        self.0.name.as_deref()
    }

    pub fn index_of(&self, a: &Atom) -> Option<usize> {
        self.0.elems.binary_search(a).ok()
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.index_of(a).is_some()
    }

    fn require(&self, a: &Atom, what: &str) -> Result<usize> {
        self.index_of(a).ok_or_else(|| Error::NotMember {
            atom: a.clone(),
            what: what.to_string(),
        })
    }

    /// Cartesian square, used by the endorelation backend.
    pub fn square(&self) -> Carrier {
        Carrier::new(
            self.iter()
                .flat_map(|a| self.iter().map(move |b| Atom::pair(a.clone(), b.clone()))),
        )
    }
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Carrier) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.elems == other.0.elems
    }
}

impl Eq for Carrier {}

impl std::hash::Hash for Carrier {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.elems.hash(state)
    }
}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// A total function between carriers, stored as image indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinMap {
    dom: Carrier,
    cod: Carrier,
    images: Arc<[usize]>,
}

impl FinMap {
    pub fn try_from_fn(
        dom: &Carrier,
        cod: &Carrier,
        mut f: impl FnMut(&Atom) -> Result<Atom>,
    ) -> Result<FinMap> {
        let images = dom
            .iter()
            .map(|a| {
                let b = f(a)?;
                cod.require(&b, "the codomain")
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FinMap {
            dom: dom.clone(),
            cod: cod.clone(),
            images: images.into(),
        })
    }

    pub fn from_fn(dom: &Carrier, cod: &Carrier, mut f: impl FnMut(&Atom) -> Atom) -> Result<FinMap> {
        FinMap::try_from_fn(dom, cod, |a| Ok(f(a)))
    }

    /// Builds a map from explicit `(argument, image)` pairs.
    pub fn from_pairs(
        dom: &Carrier,
        cod: &Carrier,
        pairs: impl IntoIterator<Item = (Atom, Atom)>,
    ) -> Result<FinMap> {
        let mut images = vec![usize::MAX; dom.len()];
        for (a, b) in pairs {
            let i = dom.require(&a, "the domain")?;
            images[i] = cod.require(&b, "the codomain")?;
        }
        if let Some(i) = images.iter().position(|&j| j == usize::MAX) {
            return Err(Error::BaseMismatch(format!(
                "map is not total: no image for {}",
                dom.elems()[i]
            )));
        }
        Ok(FinMap {
            dom: dom.clone(),
            cod: cod.clone(),
            images: images.into(),
        })
    }

    pub(crate) fn from_indices(dom: &Carrier, cod: &Carrier, images: Vec<usize>) -> FinMap {
        debug_assert_eq!(images.len(), dom.len());
        debug_assert!(images.iter().all(|&j| j < cod.len()));
        FinMap {
            dom: dom.clone(),
            cod: cod.clone(),
            images: images.into(),
        }
    }

    pub fn identity(c: &Carrier) -> FinMap {
        FinMap::from_indices(c, c, (0..c.len()).collect())
    }

    /// The unique map `!` into the terminal carrier.
    pub fn to_unit(c: &Carrier) -> FinMap {
        FinMap::from_indices(c, &Carrier::unit(), vec![0; c.len()])
    }

    pub fn dom(&self) -> &Carrier {
        &self.dom
    }

    pub fn cod(&self) -> &Carrier {
        &self.cod
    }

    pub fn apply(&self, a: &Atom) -> Option<&Atom> {
        self.dom.index_of(a).map(|i| self.image_at(i))
    }

    pub fn image_index(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn image_at(&self, i: usize) -> &Atom {
        &self.cod.elems()[self.images[i]]
    }

    pub fn graph(&self) -> impl Iterator<Item = (&Atom, &Atom)> + '_ {
        self.dom.iter().zip(self.images.iter().map(|&j| &self.cod.elems()[j]))
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FinMap) -> Result<FinMap> {
        if first.cod != self.dom {
            return Err(Error::BaseMismatch(
                "composite: codomain of the first map is not the domain of the second".into(),
            ));
        }
        Ok(FinMap::from_indices(
            &first.dom,
            &self.cod,
            first.images.iter().map(|&j| self.images[j]).collect(),
        ))
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.images.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.len() == self.cod.len() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<FinMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.dom.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Some(FinMap::from_indices(&self.cod, &self.dom, inv))
    }
}

impl fmt::Debug for FinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.graph().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a} |-> {b}")?;
        }
        write!(f, "}}")
    }
}

/// An object of `Fam(FinSet)`: a carrier of indices and a carrier per index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    base: Carrier,
    fibres: Arc<[Carrier]>,
}

impl Family {
    pub fn new(base: &Carrier, fibres: Vec<Carrier>) -> Result<Family> {
        if fibres.len() != base.len() {
            return Err(Error::BaseMismatch(format!(
                "family over {} elements given {} fibres",
                base.len(),
                fibres.len()
            )));
        }
        Ok(Family {
            base: base.clone(),
            fibres: fibres.into(),
        })
    }

    pub fn from_fn(base: &Carrier, f: impl FnMut(&Atom) -> Carrier) -> Family {
        Family {
            base: base.clone(),
            fibres: base.iter().map(f).collect::<Vec<_>>().into(),
        }
    }

    pub fn try_from_fn(base: &Carrier, f: impl FnMut(&Atom) -> Result<Carrier>) -> Result<Family> {
        Ok(Family {
            base: base.clone(),
            fibres: base.iter().map(f).collect::<Result<Vec<_>>>()?.into(),
        })
    }

    /// The fibred terminal object `1 I`.
    pub fn unit(base: &Carrier) -> Family {
        Family::constant(base, &Carrier::unit())
    }

    pub fn constant(base: &Carrier, fibre: &Carrier) -> Family {
        Family::from_fn(base, |_| fibre.clone())
    }

    pub fn base(&self) -> &Carrier {
        &self.base
    }

    pub fn fibre(&self, i: &Atom) -> Option<&Carrier> {
        self.base.index_of(i).map(|k| &self.fibres[k])
    }

    pub fn fibre_at(&self, k: usize) -> &Carrier {
        &self.fibres[k]
    }

    pub fn fibres(&self) -> &[Carrier] {
        &self.fibres
    }

    pub fn is_unit(&self) -> bool {
        self.fibres.iter().all(|c| *c == Carrier::unit())
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family{{")?;
        for (k, i) in self.base.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}: {}", self.fibres[k])?;
        }
        write!(f, "}}")
    }
}

/// A morphism of families `f : X → Y` lying over `base_map : pX → pY`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FamMor {
    src: Family,
    dst: Family,
    base_map: FinMap,
    fibre_maps: Arc<[FinMap]>,
}

impl FamMor {
    pub fn new(src: &Family, dst: &Family, base_map: FinMap, fibre_maps: Vec<FinMap>) -> Result<FamMor> {
        if base_map.dom() != src.base() || base_map.cod() != dst.base() {
            return Err(Error::BaseMismatch("base map does not match the families".into()));
        }
        if fibre_maps.len() != src.base().len() {
            return Err(Error::BaseMismatch("one fibre map per base element required".into()));
        }
        for (k, m) in fibre_maps.iter().enumerate() {
            let target = dst.fibre_at(base_map.image_index(k));
            if m.dom() != src.fibre_at(k) || m.cod() != target {
                return Err(Error::BaseMismatch(format!(
                    "fibre map at {} is ill-typed",
                    src.base().elems()[k]
                )));
            }
        }
        Ok(FamMor {
            src: src.clone(),
            dst: dst.clone(),
            base_map,
            fibre_maps: fibre_maps.into(),
        })
    }

    /// A vertical morphism given by fibrewise functions on atoms.
    pub fn vertical_from_fn(
        src: &Family,
        dst: &Family,
        mut f: impl FnMut(&Atom, &Atom) -> Result<Atom>,
    ) -> Result<FamMor> {
        if src.base() != dst.base() {
            return Err(Error::BaseMismatch("vertical morphism between different bases".into()));
        }
        let maps = src
            .base()
            .iter()
            .enumerate()
            .map(|(k, i)| FinMap::try_from_fn(src.fibre_at(k), dst.fibre_at(k), |x| f(i, x)))
            .collect::<Result<Vec<_>>>()?;
        FamMor::new(src, dst, FinMap::identity(src.base()), maps)
    }

    pub fn identity(x: &Family) -> FamMor {
        FamMor {
            src: x.clone(),
            dst: x.clone(),
            base_map: FinMap::identity(x.base()),
            fibre_maps: x.fibres().iter().map(FinMap::identity).collect::<Vec<_>>().into(),
        }
    }

    pub fn src(&self) -> &Family {
        &self.src
    }

    pub fn dst(&self) -> &Family {
        &self.dst
    }

    pub fn base_map(&self) -> &FinMap {
        &self.base_map
    }

    pub fn fibre_map(&self, k: usize) -> &FinMap {
        &self.fibre_maps[k]
    }

    pub fn is_vertical(&self) -> bool {
        self.base_map.is_identity()
    }

    /// Applies the morphism to `x ∈ X(i)`, returning the image in `Y(u(i))`.
    pub fn apply(&self, i: &Atom, x: &Atom) -> Option<&Atom> {
        let k = self.src.base().index_of(i)?;
        self.fibre_maps[k].apply(x)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FamMor) -> Result<FamMor> {
        if first.dst != self.src {
            return Err(Error::BaseMismatch("composite of non-composable family morphisms".into()));
        }
        let base_map = self.base_map.after(&first.base_map)?;
        let maps = (0..first.src.base().len())
            .map(|k| self.fibre_maps[first.base_map.image_index(k)].after(&first.fibre_maps[k]))
            .collect::<Result<Vec<_>>>()?;
        FamMor::new(&first.src, &self.dst, base_map, maps)
    }
}

impl fmt::Debug for FamMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FamMor{{base: {:?}, fibres: [", self.base_map)?;
        for (k, m) in self.fibre_maps.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m:?}")?;
        }
        write!(f, "]}}")
    }
}

/// `{X}` together with its projection `π_X : {X} → pX`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comprehension {
    pub total: Carrier,
    pub proj: FinMap,
}

pub fn comprehend(x: &Family) -> Comprehension {
    let total = Carrier::new(
        x.base()
            .iter()
            .zip(x.fibres().iter())
            .flat_map(|(i, fib)| fib.iter().map(move |a| Atom::pair(i.clone(), a.clone()))),
    );
    let mut images = Vec::with_capacity(total.len());
    for (k, fib) in x.fibres().iter().enumerate() {
        images.extend(std::iter::repeat(k).take(fib.len()));
    }
    let proj = FinMap::from_indices(&total, x.base(), images);
    Comprehension { total, proj }
}

/// The total carrier `{X}`.
pub fn total(x: &Family) -> Carrier {
    comprehend(x).total
}

/// The comprehension functor on morphisms: `{f} : {X} → {Y}`.
pub fn comprehend_mor(f: &FamMor) -> Result<FinMap> {
    let src = total(f.src());
    let dst = total(f.dst());
    FinMap::try_from_fn(&src, &dst, |e| {
        let (i, x) = e.as_pair().expect("comprehension elements are pairs");
        let j = f.base_map().apply(i).expect("base map is total").clone();
        let y = f.apply(i, x).expect("fibre map is total").clone();
        Ok(Atom::pair(j, y))
    })
}

/// Strict reindexing: `(u*X)(j) = X(u(j))`.
pub fn reindex(u: &FinMap, x: &Family) -> Result<Family> {
    if u.cod() != x.base() {
        return Err(Error::BaseMismatch("reindexing map does not land in the family's base".into()));
    }
    Ok(Family {
        base: u.dom().clone(),
        fibres: (0..u.dom().len())
            .map(|k| x.fibre_at(u.image_index(k)).clone())
            .collect::<Vec<_>>()
            .into(),
    })
}

/// The cartesian morphism `ū : u*X → X` over `u`.
pub fn cartesian(u: &FinMap, x: &Family) -> Result<FamMor> {
    let pulled = reindex(u, x)?;
    let maps = pulled.fibres().iter().map(FinMap::identity).collect();
    FamMor::new(&pulled, x, u.clone(), maps)
}

/// Reindexing of a vertical morphism: `(u*f)_j = f_{u(j)}`.
pub fn reindex_mor(u: &FinMap, f: &FamMor) -> Result<FamMor> {
    if !f.is_vertical() {
        return Err(Error::NotVertical);
    }
    let src = reindex(u, f.src())?;
    let dst = reindex(u, f.dst())?;
    let maps = (0..u.dom().len()).map(|k| f.fibre_map(u.image_index(k)).clone()).collect();
    FamMor::new(&src, &dst, FinMap::identity(u.dom()), maps)
}

/// The bijection `s` from vertical morphisms `1 I → X` to sections of `π_X`.
pub fn section_of(v: &FamMor) -> Result<FinMap> {
    if !v.is_vertical() {
        return Err(Error::NotVertical);
    }
    if !v.src().is_unit() {
        return Err(Error::BaseMismatch("section source must be the unit family".into()));
    }
    let comp = comprehend(v.dst());
    FinMap::try_from_fn(v.src().base(), &comp.total, |i| {
        let x = v.apply(i, &Atom::Unit).expect("total").clone();
        Ok(Atom::pair(i.clone(), x))
    })
}

/// Inverse of [`section_of`].
pub fn unsection_of(x: &Family, s: &FinMap) -> Result<FamMor> {
    let comp = comprehend(x);
    if s.dom() != x.base() || s.cod() != &comp.total {
        return Err(Error::BaseMismatch("section has the wrong type".into()));
    }
    if !comp.proj.after(s)?.is_identity() {
        return Err(Error::NotVertical);
    }
    let unit = Family::unit(x.base());
    FamMor::vertical_from_fn(&unit, x, |i, _| {
        Ok(s.apply(i).and_then(Atom::snd).expect("section value").clone())
    })
}

/// Builds a section of `π_X` from a function picking an element of each fibre.
pub fn section_from_fn(x: &Family, mut f: impl FnMut(&Atom) -> Result<Atom>) -> Result<FinMap> {
    let comp = comprehend(x);
    FinMap::try_from_fn(x.base(), &comp.total, |i| Ok(Atom::pair(i.clone(), f(i)?)))
}

/// Dependent sum with the strongness witness κ.
#[derive(Clone, Debug)]
pub struct SigmaObj {
    pub family: Family,
    /// `κ : {Y} → {Σ_X Y}`, `((i, x), y) ↦ (i, (x, y))`.
    pub kappa: FinMap,
}

pub fn sigma(x: &Family, y: &Family) -> Result<SigmaObj> {
    let comp = comprehend(x);
    if y.base() != &comp.total {
        return Err(Error::BaseMismatch("Σ: inner family is not over the comprehension".into()));
    }
    let family = Family::from_fn(x.base(), |i| {
        let fib = x.fibre(i).expect("base element");
        Carrier::new(fib.iter().flat_map(|a| {
            let key = Atom::pair(i.clone(), a.clone());
            y.fibre(&key)
                .expect("comprehension element")
                .iter()
                .map(move |b| Atom::pair(a.clone(), b.clone()))
                .collect::<Vec<_>>()
        }))
    });
    let src = total(y);
    let dst = total(&family);
    let kappa = FinMap::from_fn(&src, &dst, |e| {
        let (ix, b) = e.as_pair().expect("pair");
        let (i, a) = ix.as_pair().expect("pair");
        Atom::pair(i.clone(), Atom::pair(a.clone(), b.clone()))
    })?;
    Ok(SigmaObj { family, kappa })
}

/// Enumerates all dependent functions `x ↦ f(x) ∈ fibre(x)` as sorted graphs.
pub fn dependent_functions(dom: &Carrier, mut fibre: impl FnMut(&Atom) -> Carrier) -> Result<Carrier> {
    let targets: Vec<Carrier> = dom.iter().map(&mut fibre).collect();
    let mut count: usize = 1;
    for t in &targets {
        count = count.saturating_mul(t.len());
        if count > PI_LIMIT {
            return Err(Error::Unsupported(format!(
                "dependent product with more than {PI_LIMIT} elements"
            )));
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut idx = vec![0usize; targets.len()];
    if targets.iter().any(|t| t.is_empty()) {
        return Ok(Carrier::empty());
    }
    loop {
        out.push(Atom::fun(
            dom.iter()
                .zip(idx.iter())
                .zip(targets.iter())
                .map(|((a, &k), t)| (a.clone(), t.elems()[k].clone())),
        ));
        // odometer increment, last position fastest
        let mut pos = targets.len();
        loop {
            if pos == 0 {
                return Ok(Carrier::new(out));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < targets[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Dependent product `Π_X Y` over `pX`.
pub fn pi(x: &Family, y: &Family) -> Result<Family> {
    let comp = comprehend(x);
    if y.base() != &comp.total {
        return Err(Error::BaseMismatch("Π: inner family is not over the comprehension".into()));
    }
    Family::try_from_fn(x.base(), |i| {
        let fib = x.fibre(i).expect("base element");
        dependent_functions(fib, |a| {
            y.fibre(&Atom::pair(i.clone(), a.clone())).expect("comprehension element").clone()
        })
    })
}

/// The counit `ε : π_X*(Π_X Y) → Y`, vertical over `{X}`.
pub fn epsilon(x: &Family, y: &Family) -> Result<FamMor> {
    let p = pi(x, y)?;
    let proj = comprehend(x).proj;
    let pulled = reindex(&proj, &p)?;
    FamMor::vertical_from_fn(&pulled, y, |ix, f| {
        let a = ix.snd().expect("pair");
        f.apply(a).cloned().ok_or_else(|| Error::NotMember {
            atom: a.clone(),
            what: "the function's domain".into(),
        })
    })
}

/// Currying: a vertical `1{X} → Y` becomes a vertical `1 I → Π_X Y`.
pub fn curry(x: &Family, y: &Family, body: &FamMor) -> Result<FamMor> {
    if !body.is_vertical() || body.dst() != y || !body.src().is_unit() {
        return Err(Error::NotVertical);
    }
    let p = pi(x, y)?;
    let unit = Family::unit(x.base());
    FamMor::vertical_from_fn(&unit, &p, |i, _| {
        let fib = x.fibre(i).expect("base element");
        Ok(Atom::fun(fib.iter().map(|a| {
            let ix = Atom::pair(i.clone(), a.clone());
            (a.clone(), body.apply(&ix, &Atom::Unit).expect("total").clone())
        })))
    })
}

/// Inverse of [`curry`].
pub fn uncurry(_x: &Family, y: &Family, f: &FamMor) -> Result<FamMor> {
    if !f.is_vertical() || !f.src().is_unit() {
        return Err(Error::NotVertical);
    }
    let unit = Family::unit(y.base());
    FamMor::vertical_from_fn(&unit, y, |ix, _| {
        let (i, a) = ix.as_pair().expect("pair");
        let g = f.apply(i, &Atom::Unit).expect("total");
        g.apply(a).cloned().ok_or_else(|| Error::NotMember {
            atom: a.clone(),
            what: "the function's domain".into(),
        })
    })
}

/// `φ : E_{X}(1{X}, π_X*Y) ≅ E_I(X, Y)`.
pub fn phi(x: &Family, y: &Family, s: &FamMor) -> Result<FamMor> {
    if x.base() != y.base() {
        return Err(Error::BaseMismatch("φ: families over different bases".into()));
    }
    if !s.is_vertical() || !s.src().is_unit() {
        return Err(Error::NotVertical);
    }
    let expected = reindex(&comprehend(x).proj, y)?;
    if s.dst() != &expected {
        return Err(Error::BaseMismatch("φ: section does not land in π_X*Y".into()));
    }
    FamMor::vertical_from_fn(x, y, |i, a| {
        Ok(s.apply(&Atom::pair(i.clone(), a.clone()), &Atom::Unit).expect("total").clone())
    })
}

/// Inverse of [`phi`].
pub fn phi_inv(x: &Family, f: &FamMor) -> Result<FamMor> {
    if !f.is_vertical() || f.src() != x {
        return Err(Error::NotVertical);
    }
    let proj = comprehend(x).proj;
    let target = reindex(&proj, f.dst())?;
    let unit = Family::unit(&proj.dom().clone());
    FamMor::vertical_from_fn(&unit, &target, |ix, _| {
        let (i, a) = ix.as_pair().expect("pair");
        Ok(f.apply(i, a).expect("total").clone())
    })
}

/// Fibrewise tagged union with its injections.
#[derive(Clone, Debug)]
pub struct Coproduct {
    pub family: Family,
    pub inl: FamMor,
    pub inr: FamMor,
}

pub fn fam_coprod(x: &Family, y: &Family) -> Result<Coproduct> {
    if x.base() != y.base() {
        return Err(Error::BaseMismatch("coproduct of families over different bases".into()));
    }
    let family = Family::from_fn(x.base(), |i| {
        let l = x.fibre(i).expect("base").iter().map(|a| Atom::inl(a.clone()));
        let r = y.fibre(i).expect("base").iter().map(|b| Atom::inr(b.clone()));
        Carrier::new(l.chain(r))
    });
    let inl = FamMor::vertical_from_fn(x, &family, |_, a| Ok(Atom::inl(a.clone())))?;
    let inr = FamMor::vertical_from_fn(y, &family, |_, b| Ok(Atom::inr(b.clone())))?;
    Ok(Coproduct { family, inl, inr })
}

/// Case analysis `[f, g] : X + Y → Z`.
pub fn cotuple(co: &Coproduct, f: &FamMor, g: &FamMor) -> Result<FamMor> {
    if f.src() != co.inl.src() || g.src() != co.inr.src() || f.dst() != g.dst() {
        return Err(Error::BaseMismatch("cotuple: ill-typed components".into()));
    }
    if !f.is_vertical() || !g.is_vertical() {
        return Err(Error::NotVertical);
    }
    FamMor::vertical_from_fn(&co.family, f.dst(), |i, t| match t {
        Atom::Inl(a) => Ok(f.apply(i, a).expect("total").clone()),
        Atom::Inr(b) => Ok(g.apply(i, b).expect("total").clone()),
        other => Err(Error::NotMember {
            atom: other.clone(),
            what: "a coproduct".into(),
        }),
    })
}

/// `f + g : X + Y → X' + Y'` for morphisms over the same base map.
pub fn coprod_mor(src: &Coproduct, dst: &Coproduct, f: &FamMor, g: &FamMor) -> Result<FamMor> {
    if f.base_map() != g.base_map() {
        return Err(Error::BaseMismatch("f + g requires a common base map".into()));
    }
    let maps = (0..src.family.base().len())
        .map(|k| {
            let target = dst.family.fibre_at(f.base_map().image_index(k));
            FinMap::try_from_fn(src.family.fibre_at(k), target, |t| match t {
                Atom::Inl(a) => Ok(Atom::inl(f.fibre_map(k).apply(a).expect("total").clone())),
                Atom::Inr(b) => Ok(Atom::inr(g.fibre_map(k).apply(b).expect("total").clone())),
                other => Err(Error::NotMember {
                    atom: other.clone(),
                    what: "a coproduct".into(),
                }),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FamMor::new(&src.family, &dst.family, f.base_map().clone(), maps)
}

/// Decides whether the commuting square
///
/// ```text
///   A --top--> B
///   |          |
///  left      right
///   v          v
///   C --bot--> D
/// ```
///
/// is a pullback in finite sets.
pub fn is_pullback(top: &FinMap, left: &FinMap, right: &FinMap, bottom: &FinMap) -> bool {
    if top.dom() != left.dom() || top.cod() != right.dom() || left.cod() != bottom.dom() {
        return false;
    }
    if right.cod() != bottom.cod() {
        return false;
    }
    for k in 0..top.dom().len() {
        if right.image_index(top.image_index(k)) != bottom.image_index(left.image_index(k)) {
            return false;
        }
    }
    // A → B ×_D C must be a bijection
    let mut hits = std::collections::BTreeMap::new();
    for k in 0..top.dom().len() {
        let key = (top.image_index(k), left.image_index(k));
        if hits.insert(key, k).is_some() {
            return false;
        }
    }
    let mut expected = 0usize;
    for b in 0..right.dom().len() {
        for c in 0..bottom.dom().len() {
            if right.image_index(b) == bottom.image_index(c) {
                expected += 1;
                if !hits.contains_key(&(b, c)) {
                    return false;
                }
            }
        }
    }
    expected == hits.len()
}

/// The strongness condition on fibred coproducts: for cartesian `f : X → X'`
/// and `g : Y → Y'` over `u`, both comprehension squares of the injections are
/// pullbacks.
pub fn coprod_squares_are_pullbacks(u: &FinMap, x2: &Family, y2: &Family) -> Result<bool> {
    let f = cartesian(u, x2)?;
    let g = cartesian(u, y2)?;
    let co1 = fam_coprod(f.src(), g.src())?;
    let co2 = fam_coprod(x2, y2)?;
    let fg = coprod_mor(&co1, &co2, &f, &g)?;
    let cfg = comprehend_mor(&fg)?;
    let left_ok = is_pullback(
        &comprehend_mor(&co1.inl)?,
        &comprehend_mor(&f)?,
        &cfg,
        &comprehend_mor(&co2.inl)?,
    );
    let right_ok = is_pullback(
        &comprehend_mor(&co1.inr)?,
        &comprehend_mor(&g)?,
        &cfg,
        &comprehend_mor(&co2.inr)?,
    );
    Ok(left_ok && right_ok)
}

/// The symmetry `σ_{X,Y} : {π_X*Y} → {π_Y*X}`, `((i,x),y) ↦ ((i,y),x)`.
pub fn sigma_swap(x: &Family, y: &Family) -> Result<FinMap> {
    if x.base() != y.base() {
        return Err(Error::BaseMismatch("σ: families over different bases".into()));
    }
    let src = total(&reindex(&comprehend(x).proj, y)?);
    let dst = total(&reindex(&comprehend(y).proj, x)?);
    FinMap::from_fn(&src, &dst, |e| {
        let (ix, b) = e.as_pair().expect("pair");
        let (i, a) = ix.as_pair().expect("pair");
        Atom::pair(Atom::pair(i.clone(), b.clone()), a.clone())
    })
}

/// The diagonal `δ_X : {X} → {π_X*X}`, `(i,x) ↦ ((i,x),x)`.
pub fn diagonal(x: &Family) -> Result<FinMap> {
    let comp = comprehend(x);
    let dst = total(&reindex(&comp.proj, x)?);
    FinMap::from_fn(&comp.total, &dst, |e| {
        let a = e.snd().expect("pair").clone();
        Atom::pair(e.clone(), a)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(n: i64) -> Atom {
        Atom::int(n)
    }

    fn c(xs: &[i64]) -> Carrier {
        Carrier::new(xs.iter().map(|&n| Atom::int(n)))
    }

    fn sym(s: &str) -> Atom {
        Atom::sym(s)
    }

    fn cs(xs: &[&str]) -> Carrier {
        Carrier::new(xs.iter().map(|s| Atom::sym(s)))
    }

    #[test]
    fn reindex_identity_is_identity() {
        let base = cs(&["a"]);
        let x = Family::new(&base, vec![c(&[0, 1])]).unwrap();
        assert_eq!(reindex(&FinMap::identity(&base), &x).unwrap(), x);
    }

    #[test]
    fn reindex_constant_map() {
        let x = Family::new(&cs(&["c"]), vec![c(&[0])]).unwrap();
        let u = FinMap::from_fn(&cs(&["a", "b"]), &cs(&["c"]), |_| sym("c")).unwrap();
        let r = reindex(&u, &x).unwrap();
        assert_eq!(r.fibres(), &[c(&[0]), c(&[0])]);
    }

    #[test]
    fn reindex_picks_target_fibre() {
        let x = Family::new(&cs(&["c", "d"]), vec![c(&[0]), c(&[1, 2])]).unwrap();
        let u = FinMap::from_fn(&cs(&["a"]), &cs(&["c", "d"]), |_| sym("d")).unwrap();
        let r = reindex(&u, &x).unwrap();
        assert_eq!(r.fibre(&sym("a")), Some(&c(&[1, 2])));
    }

    #[test]
    fn reindex_rejects_mismatched_base() {
        let x = Family::new(&cs(&["c"]), vec![c(&[0])]).unwrap();
        let u = FinMap::identity(&cs(&["a"]));
        assert!(matches!(reindex(&u, &x), Err(Error::BaseMismatch(_))));
    }

    #[test]
    fn comprehension_is_disjoint_union() {
        let x = Family::new(&cs(&["a", "b"]), vec![c(&[0, 1]), c(&[2])]).unwrap();
        let comp = comprehend(&x);
        assert_eq!(
            comp.total.elems(),
            &[
                Atom::pair(sym("a"), i(0)),
                Atom::pair(sym("a"), i(1)),
                Atom::pair(sym("b"), i(2))
            ]
        );
        assert_eq!(comp.proj.apply(&Atom::pair(sym("b"), i(2))), Some(&sym("b")));

        let y = Family::new(&cs(&["a", "b"]), vec![c(&[0]), c(&[])]).unwrap();
        assert_eq!(comprehend(&y).total.len(), 1);
        assert!(comprehend(&Family::new(&Carrier::empty(), vec![]).unwrap()).total.is_empty());
    }

    #[test]
    fn section_of_singleton_and_choice() {
        let base = cs(&["a"]);
        let x = Family::new(&base, vec![c(&[0])]).unwrap();
        let v = FamMor::vertical_from_fn(&Family::unit(&base), &x, |_, _| Ok(i(0))).unwrap();
        assert_eq!(section_of(&v).unwrap().apply(&sym("a")), Some(&Atom::pair(sym("a"), i(0))));

        let x = Family::new(&base, vec![c(&[0, 1])]).unwrap();
        let v = FamMor::vertical_from_fn(&Family::unit(&base), &x, |_, _| Ok(i(1))).unwrap();
        let s = section_of(&v).unwrap();
        assert_eq!(s.apply(&sym("a")), Some(&Atom::pair(sym("a"), i(1))));
        assert_eq!(unsection_of(&x, &s).unwrap(), v);
    }

    #[test]
    fn section_of_rejects_non_vertical() {
        let x = Family::new(&cs(&["a", "b"]), vec![c(&[0]), c(&[0])]).unwrap();
        let swap = FinMap::from_fn(x.base(), x.base(), |e| {
            if *e == sym("a") { sym("b") } else { sym("a") }
        })
        .unwrap();
        let unit = Family::unit(x.base());
        let maps = (0..2)
            .map(|_| FinMap::from_fn(&Carrier::unit(), &c(&[0]), |_| i(0)).unwrap())
            .collect();
        let v = FamMor::new(&unit, &x, swap, maps).unwrap();
        assert_eq!(section_of(&v), Err(Error::NotVertical));
    }

    #[test]
    fn sigma_examples() {
        let base = cs(&["a"]);
        let x = Family::new(&base, vec![c(&[0])]).unwrap();
        let y = Family::from_fn(&total(&x), |_| c(&[5, 6]));
        let s = sigma(&x, &y).unwrap();
        assert_eq!(
            s.family.fibre(&sym("a")).unwrap().elems(),
            &[Atom::pair(i(0), i(5)), Atom::pair(i(0), i(6))]
        );
        assert!(s.kappa.is_bijective());

        let x = Family::new(&base, vec![c(&[0, 1])]).unwrap();
        let y = Family::from_fn(&total(&x), |e| {
            if e.snd() == Some(&i(0)) { cs(&["u"]) } else { cs(&["u", "v"]) }
        });
        assert_eq!(sigma(&x, &y).unwrap().family.fibre(&sym("a")).unwrap().len(), 3);

        let y = Family::from_fn(&total(&x), |_| Carrier::empty());
        assert!(sigma(&x, &y).unwrap().family.fibres().iter().all(Carrier::is_empty));
    }

    #[test]
    fn pi_examples() {
        let base = cs(&["a"]);
        let x = Family::new(&base, vec![c(&[])]).unwrap();
        let y = Family::from_fn(&total(&x), |_| c(&[0]));
        assert_eq!(pi(&x, &y).unwrap().fibre(&sym("a")).unwrap().len(), 1);

        let x = Family::new(&base, vec![c(&[0, 1])]).unwrap();
        let y = Family::from_fn(&total(&x), |_| cs(&["c"]));
        assert_eq!(pi(&x, &y).unwrap().fibre(&sym("a")).unwrap().len(), 1);

        let y = Family::from_fn(&total(&x), |e| {
            if e.snd() == Some(&i(0)) { cs(&["p"]) } else { cs(&["p", "q"]) }
        });
        assert_eq!(pi(&x, &y).unwrap().fibre(&sym("a")).unwrap().len(), 2);
    }

    #[test]
    fn pi_with_empty_target_is_empty() {
        let x = Family::new(&cs(&["a"]), vec![c(&[0])]).unwrap();
        let y = Family::from_fn(&total(&x), |_| Carrier::empty());
        assert!(pi(&x, &y).unwrap().fibre_at(0).is_empty());
    }

    #[test]
    fn coproduct_tags_disjointly() {
        let base = cs(&["a"]);
        let x = Family::new(&base, vec![c(&[0])]).unwrap();
        let co = fam_coprod(&x, &x).unwrap();
        assert_eq!(co.family.fibre_at(0).elems(), &[Atom::inl(i(0)), Atom::inr(i(0))]);
        let empty = Family::new(&base, vec![c(&[])]).unwrap();
        let co = fam_coprod(&x, &empty).unwrap();
        assert!(comprehend_mor(&co.inl).unwrap().is_bijective());
    }

    #[test]
    fn struct_isos_equations() {
        let base = cs(&["a"]);
        let x = Family::new(&base, vec![c(&[0, 1])]).unwrap();
        let y = Family::new(&base, vec![c(&[7])]).unwrap();
        let s = sigma_swap(&x, &y).unwrap();
        let back = sigma_swap(&y, &x).unwrap();
        assert!(back.after(&s).unwrap().is_identity());
        let d = diagonal(&x).unwrap();
        let xx = reindex(&comprehend(&x).proj, &x).unwrap();
        assert!(comprehend(&xx).proj.after(&d).unwrap().is_identity());
        let cart = comprehend_mor(&cartesian(&comprehend(&x).proj, &x).unwrap()).unwrap();
        assert!(cart.after(&d).unwrap().is_identity());
    }

    #[test]
    fn pullback_detection() {
        let one = Carrier::unit();
        let two = c(&[0, 1]);
        let bang = FinMap::to_unit(&two);
        // product square 2×2 → 2, 2 over 1 is a pullback
        let sq = two.square();
        let p1 = FinMap::from_fn(&sq, &two, |e| e.fst().unwrap().clone()).unwrap();
        let p2 = FinMap::from_fn(&sq, &two, |e| e.snd().unwrap().clone()).unwrap();
        assert!(is_pullback(&p1, &p2, &bang, &bang));
        // the diagonal is not
        let d = FinMap::identity(&two);
        assert!(!is_pullback(&d, &d, &bang, &bang));
        let _ = one;
    }
}
