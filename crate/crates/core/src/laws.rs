//! Exhaustive law checking over small instances.
//!
//! A suite run at bound `b` enumerates every base carrier and every fibre of
//! size at most `b`. Where an instance quantifies over a family indexed by a
//! comprehension `{X}`, that comprehension is also capped (see
//! [`comprehension_cap`]) so that the enumeration stays finite and fast.

use std::fmt;

use rayon::prelude::*;

use crate::atom::Atom;
use crate::effect::{
    em_model, eq3_counterexample, liftings_for, EmAlgebra, FibredMonad, LiftedMonad, MonadKind,
    Oplax, PredLifting,
};
use crate::enumerate::{carriers, families_over, maps, preds, sections, vertical_maps};
use crate::error::Result;
use crate::fixpoint::{
    check_diagonal, check_dinaturality, check_naturality, conway, jointly_monotone, k_contains_free,
    pi_poset_family, transport, PointedPoset, PosetFamily,
};
use crate::kernel::{
    cartesian, comprehend, comprehend_mor, coprod_squares_are_pullbacks, cotuple, curry,
    diagonal, fam_coprod, phi, phi_inv, pi, reindex, section_of, sigma, sigma_swap, total,
    uncurry, unsection_of, Carrier, FamMor, Family, FinMap,
};
use crate::pred::{exists_along, forall_along, pull, Pred, Rel};
use crate::refined::{
    cart_lift, coprod_refined, factor_through, pi_refined, project_u, sigma_refined, unit_refined,
    RefinedMor, RefinedObj,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Ccompc,
    Coprod,
    Monad,
    Eq3,
    Conway,
    Em,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Ccompc,
        Suite::Coprod,
        Suite::Monad,
        Suite::Eq3,
        Suite::Conway,
        Suite::Em,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ccompc => "ccompc",
            Suite::Coprod => "coprod",
            Suite::Monad => "monad",
            Suite::Eq3 => "eq3",
            Suite::Conway => "conway",
            Suite::Em => "em",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of one law over all enumerated instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawOutcome {
    pub law: String,
    pub instances: usize,
    pub failures: usize,
    /// Up to three counterexamples.
    pub examples: Vec<String>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub suite: Suite,
    pub bound: usize,
    pub outcomes: Vec<LawOutcome>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(LawOutcome::passed)
    }

    pub fn instances(&self) -> usize {
        self.outcomes.iter().map(|o| o.instances).sum()
    }
}

/// Largest comprehension over which families are enumerated at bound `b`.
pub fn comprehension_cap(bound: usize) -> usize {
    bound.max(1) * 2
}

/// Runs `check` on every instance in parallel, collecting failures.
fn tally<T: Sync>(
    law: &str,
    instances: &[T],
    check: impl Fn(&T) -> Result<Option<String>> + Sync,
) -> LawOutcome {
    let results: Vec<Option<String>> = instances
        .par_iter()
        .map(|t| match check(t) {
            Ok(r) => r,
            Err(e) => Some(format!("error: {e}")),
        })
        .collect();
    let failed: Vec<String> = results.into_iter().flatten().collect();
    LawOutcome {
        law: law.to_string(),
        instances: instances.len(),
        failures: failed.len(),
        examples: failed.into_iter().take(3).collect(),
    }
}

fn fail_unless(ok: bool, detail: impl FnOnce() -> String) -> Option<String> {
    if ok {
        None
    } else {
        Some(detail())
    }
}

pub fn run_suite(suite: Suite, bound: usize) -> Result<LawReport> {
    let outcomes = match suite {
        Suite::Ccompc => ccompc(bound)?,
        Suite::Coprod => coprod(bound)?,
        Suite::Monad => monad(bound)?,
        Suite::Eq3 => eq3(bound)?,
        Suite::Conway => conway_suite(bound)?,
        Suite::Em => em(bound)?,
    };
    Ok(LawReport { suite, bound, outcomes })
}

/// Families over `base` with fibres `≤ bound` and comprehension `≤ cap`.
fn capped_families(base: &Carrier, bound: usize, cap: usize) -> Vec<Family> {
    families_over(base, bound)
        .into_iter()
        .filter(|x| x.fibres().iter().map(Carrier::len).sum::<usize>() <= cap)
        .collect()
}

fn all_families(bound: usize) -> Vec<Family> {
    carriers(bound).iter().flat_map(|b| families_over(b, bound)).collect()
}

/// Pairs `(X, Y)` with `Y` over `{X}`, both comprehensions capped.
fn dependent_pairs(bound: usize, cap: usize) -> Vec<(Family, Family)> {
    let mut out = Vec::new();
    for base in carriers(bound) {
        for x in capped_families(&base, bound, cap) {
            for y in capped_families(&total(&x), bound, cap) {
                out.push((x.clone(), y));
            }
        }
    }
    out
}

/// All predicates below `bound_pred`.
fn preds_below(bound_pred: &Pred) -> Vec<Pred> {
    let members: Vec<usize> = (0..bound_pred.over().len()).filter(|&k| bound_pred.contains_at(k)).collect();
    (0u32..(1 << members.len()))
        .map(|mask| {
            let mut bits = vec![false; bound_pred.over().len()];
            for (j, &k) in members.iter().enumerate() {
                bits[k] = mask >> j & 1 == 1;
            }
            Pred::from_bits(bound_pred.over(), bits)
        })
        .collect()
}

/// All refined objects on `x`.
fn refined_on(x: &Family) -> Vec<RefinedObj> {
    let comp = comprehend(x);
    let mut out = Vec::new();
    for p in preds(x.base()) {
        let bound_q = pull(&comp.proj, &p).expect("aligned");
        for q in preds_below(&bound_q) {
            out.push(RefinedObj::new(x, &p, &q).expect("bounded"));
        }
    }
    out
}

/// All `(Y, Q, R)` over a given `Q`.
fn inner_refined(y: &Family, q: &Pred) -> Vec<RefinedObj> {
    let bound_r = pull(&comprehend(y).proj, q).expect("aligned");
    preds_below(&bound_r)
        .into_iter()
        .map(|r| RefinedObj::new(y, q, &r).expect("bounded"))
        .collect()
}

/// Extensional Π refinement: `f` at `i` is accepted iff `i ∈ P` and every
/// argument in `Q` is sent into `R`.
fn pi_oracle(o: &RefinedObj, inner: &RefinedObj, i: &Atom, f: &Atom) -> bool {
    o.p().contains(i)
        && o.family().fibre(i).expect("base").iter().all(|x| {
            let ix = Atom::pair(i.clone(), x.clone());
            !o.q().contains(&ix)
                || inner
                    .q()
                    .contains(&Atom::pair(ix.clone(), f.apply(x).expect("total").clone()))
        })
}

fn ccompc(bound: usize) -> Result<Vec<LawOutcome>> {
    let cap = comprehension_cap(bound);
    let mut out = Vec::new();
    let cs = carriers(bound);

    // split functoriality of reindexing
    let mut inst = Vec::new();
    for i in &cs {
        for x in families_over(i, bound) {
            for j in &cs {
                for u in maps(j, i) {
                    for k in &cs {
                        inst.push((x.clone(), u.clone(), k.clone()));
                    }
                }
            }
        }
    }
    out.push(tally("reindex identity", &all_families(bound), |x| {
        Ok(fail_unless(reindex(&FinMap::identity(x.base()), x)? == *x, || format!("{x:?}")))
    }));
    out.push(tally("reindex composition", &inst, |(x, u, k)| {
        for v in maps(k, u.dom()) {
            let lhs = reindex(&u.after(&v)?, x)?;
            let rhs = reindex(&v, &reindex(u, x)?)?;
            if lhs != rhs {
                return Ok(Some(format!("X = {x:?}, u = {u:?}, v = {v:?}")));
            }
        }
        Ok(None)
    }));

    // Beck-Chevalley for Σ and Π along cartesian squares
    let pairs = dependent_pairs(bound, cap);
    let mut bc = Vec::new();
    for (x, y) in &pairs {
        for j in &cs {
            for u in maps(j, x.base()) {
                bc.push((x.clone(), y.clone(), u));
            }
        }
    }
    out.push(tally("Beck-Chevalley for sigma", &bc, |(x, y, u)| {
        let bar = comprehend_mor(&cartesian(u, x)?)?;
        let lhs = reindex(u, &sigma(x, y)?.family)?;
        let rhs = sigma(&reindex(u, x)?, &reindex(&bar, y)?)?.family;
        Ok(fail_unless(lhs == rhs, || format!("X = {x:?}, Y = {y:?}, u = {u:?}")))
    }));
    out.push(tally("Beck-Chevalley for pi", &bc, |(x, y, u)| {
        let bar = comprehend_mor(&cartesian(u, x)?)?;
        let lhs = reindex(u, &pi(x, y)?)?;
        let rhs = pi(&reindex(u, x)?, &reindex(&bar, y)?)?;
        Ok(fail_unless(lhs == rhs, || format!("X = {x:?}, Y = {y:?}, u = {u:?}")))
    }));
    out.push(tally("kappa is a bijection", &pairs, |(x, y)| {
        let s = sigma(x, y)?;
        Ok(fail_unless(s.kappa.is_bijective(), || format!("X = {x:?}, Y = {y:?}")))
    }));

    // 1 ⊣ {−}
    let fams = all_families(bound);
    out.push(tally("section bijection round trips", &fams, |x| {
        for s in sections(x) {
            let v = unsection_of(x, &s)?;
            if section_of(&v)? != s || unsection_of(x, &section_of(&v)?)? != v {
                return Ok(Some(format!("X = {x:?}, s = {s:?}")));
            }
        }
        Ok(None)
    }));

    // φ, currying and the structural maps at bound ≤ 2
    let small = bound.min(2);
    let mut same_base = Vec::new();
    for base in carriers(small) {
        for x in families_over(&base, small) {
            for y in families_over(&base, small) {
                same_base.push((x.clone(), y));
            }
        }
    }
    out.push(tally("phi and its inverse are mutually inverse", &same_base, |(x, y)| {
        for f in vertical_maps(x, y)? {
            if phi(x, y, &phi_inv(x, &f)?)? != f {
                return Ok(Some(format!("X = {x:?}, Y = {y:?}, f = {f:?}")));
            }
        }
        let py = reindex(&comprehend(x).proj, y)?;
        for s in sections(&py) {
            let v = unsection_of(&py, &s)?;
            if phi_inv(x, &phi(x, y, &v)?)? != v {
                return Ok(Some(format!("X = {x:?}, Y = {y:?}, s = {s:?}")));
            }
        }
        Ok(None)
    }));
    out.push(tally("currying round trips", &dependent_pairs(small, comprehension_cap(small)), |(x, y)| {
        for s in sections(y) {
            let b = unsection_of(y, &s)?;
            if uncurry(x, y, &curry(x, y, &b)?)? != b {
                return Ok(Some(format!("X = {x:?}, Y = {y:?}, body = {b:?}")));
            }
        }
        Ok(None)
    }));
    out.push(tally("sigma swap is an involution", &same_base, |(x, y)| {
        let there = sigma_swap(x, y)?;
        let back = sigma_swap(y, x)?;
        Ok(fail_unless(back.after(&there)?.is_identity(), || format!("X = {x:?}, Y = {y:?}")))
    }));
    out.push(tally("diagonal equations", &fams, |x| {
        let d = diagonal(x)?;
        let proj = comprehend(x).proj;
        let xx = reindex(&proj, x)?;
        let first = comprehend(&xx).proj.after(&d)?;
        let second = comprehend_mor(&cartesian(&proj, x)?)?.after(&d)?;
        Ok(fail_unless(first.is_identity() && second.is_identity(), || format!("X = {x:?}")))
    }));

    // predicate fibration
    let mut pred_maps = Vec::new();
    for a in &cs {
        for b in &cs {
            for u in maps(a, b) {
                pred_maps.push(u);
            }
        }
    }
    out.push(tally("residuation", &cs, |c| {
        let ps = preds(c);
        for p in &ps {
            for q in &ps {
                for r in &ps {
                    if p.meet(q)?.leq(r)? != p.leq(&q.implies(r)?)? {
                        return Ok(Some(format!("{p:?}, {q:?}, {r:?}")));
                    }
                }
            }
        }
        Ok(None)
    }));
    out.push(tally("quantifier adjunctions and Frobenius", &pred_maps, |u| {
        for q in preds(u.dom()) {
            for p in preds(u.cod()) {
                let up = pull(u, &p)?;
                let ex = exists_along(u, &q)?;
                let all = forall_along(u, &q)?;
                if ex.leq(&p)? != q.leq(&up)? || up.leq(&q)? != p.leq(&all)? {
                    return Ok(Some(format!("adjunction: u = {u:?}, Q = {q:?}, P = {p:?}")));
                }
                if exists_along(u, &q.meet(&up)?)? != ex.meet(&p)? {
                    return Ok(Some(format!("Frobenius: u = {u:?}, Q = {q:?}, P = {p:?}")));
                }
            }
        }
        Ok(None)
    }));
    let mut squares = Vec::new();
    for u in &pred_maps {
        for k in &cs {
            for w in maps(k, u.cod()) {
                squares.push((u.clone(), w));
            }
        }
    }
    out.push(tally("Beck-Chevalley for quantifiers", &squares, |(u, w)| {
        // pullback J ×_I K with its projections
        let pb = Carrier::new(u.dom().iter().flat_map(|j| {
            w.dom()
                .iter()
                .filter(|k| u.apply(j) == w.apply(k))
                .map(|k| Atom::pair(j.clone(), k.clone()))
                .collect::<Vec<_>>()
        }));
        let p1 = FinMap::from_fn(&pb, u.dom(), |e| e.fst().expect("pair").clone())?;
        let p2 = FinMap::from_fn(&pb, w.dom(), |e| e.snd().expect("pair").clone())?;
        for q in preds(u.dom()) {
            let lhs_all = pull(w, &forall_along(u, &q)?)?;
            let rhs_all = forall_along(&p2, &pull(&p1, &q)?)?;
            let lhs_ex = pull(w, &exists_along(u, &q)?)?;
            let rhs_ex = exists_along(&p2, &pull(&p1, &q)?)?;
            if lhs_all != rhs_all || lhs_ex != rhs_ex {
                return Ok(Some(format!("u = {u:?}, w = {w:?}, Q = {q:?}")));
            }
        }
        Ok(None)
    }));
    let rel_cs = carriers(small);
    out.push(tally("endorelation Heyting laws", &rel_cs, |c| {
        let sq = c.square();
        let rels: Vec<Rel> = preds(&sq).into_iter().map(|p| Rel::from_pred(c, p).expect("square")).collect();
        for a in &rels {
            for b in &rels {
                for r in &rels {
                    if a.meet(b)?.leq(r)? != a.leq(&b.implies(r)?)? {
                        return Ok(Some(format!("{a:?}, {b:?}, {r:?}")));
                    }
                }
            }
        }
        Ok(None)
    }));

    // refined objects
    let refined_pairs = dependent_pairs(small, comprehension_cap(small));
    out.push(tally("pi refinement matches the extensional oracle", &refined_pairs, |(x, y)| {
        for o in refined_on(x) {
            for inner in inner_refined(y, o.q()) {
                let r = pi_refined(&o, &inner)?;
                for e in r.q().over().iter() {
                    let (i, f) = e.as_pair().expect("pair");
                    if r.q().contains(e) != pi_oracle(&o, &inner, i, f) {
                        return Ok(Some(format!(
                            "X = {x:?}, P = {:?}, Q = {:?}, R = {:?}, at {e}",
                            o.p(),
                            o.q(),
                            inner.q()
                        )));
                    }
                }
            }
        }
        Ok(None)
    }));
    out.push(tally("projection preserves unit, sigma and pi", &refined_pairs, |(x, y)| {
        for o in refined_on(x) {
            if *project_u(&unit_refined(o.p())) != Family::unit(x.base()) {
                return Ok(Some(format!("unit over {:?}", o.p())));
            }
            for inner in inner_refined(y, o.q()) {
                let s = sigma_refined(&o, &inner)?;
                let p = pi_refined(&o, &inner)?;
                if *project_u(&s) != sigma(x, y)?.family || *project_u(&p) != pi(x, y)? {
                    return Ok(Some(format!("X = {x:?}, Y = {y:?}")));
                }
                // strongness: comprehension of Σ is R transported along κ
                let kappa = sigma(x, y)?.kappa;
                if exists_along(&kappa, inner.q())? != *s.q() {
                    return Ok(Some(format!("strongness: X = {x:?}, Y = {y:?}")));
                }
            }
        }
        Ok(None)
    }));
    let mut lifts = Vec::new();
    for base in carriers(small) {
        for x in families_over(&base, small) {
            for j in carriers(small) {
                for u in maps(&j, &base) {
                    lifts.push((x.clone(), u));
                }
            }
        }
    }
    out.push(tally("cartesian liftings are split", &lifts, |(x, u)| {
        for o in refined_on(x) {
            let (same, _) = cart_lift(&FinMap::identity(x.base()), o.p(), &o)?;
            if same != o {
                return Ok(Some(format!("identity: {o:?}")));
            }
            let up = pull(u, o.p())?;
            for p1 in preds_below(&up) {
                let (l1, _) = cart_lift(u, &p1, &o)?;
                for k in carriers(small) {
                    for v in maps(&k, u.dom()) {
                        for p2 in preds_below(&pull(&v, &p1)?) {
                            let (two_step, _) = cart_lift(&v, &p2, &l1)?;
                            let (direct, _) = cart_lift(&u.after(&v)?, &p2, &o)?;
                            if two_step != direct {
                                return Ok(Some(format!("X = {x:?}, u = {u:?}, v = {v:?}")));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }));
    out.push(tally("cartesian liftings are cartesian", &lifts, |(x, u)| {
        for o in refined_on(x) {
            let up = pull(u, o.p())?;
            for p1 in preds_below(&up) {
                let (_, lift) = cart_lift(u, &p1, &o)?;
                for k in carriers(1) {
                    for v in maps(&k, u.dom()) {
                        let w = u.after(&v)?;
                        for z in families_over(&k, 1) {
                            for f in fam_mors_over(&z, x, &w)? {
                                for src in refined_on(&z) {
                                    let Ok(km) = RefinedMor::new(&src, &o, &f) else { continue };
                                    let factors = src.p().leq(&pull(&v, &p1)?)?;
                                    match factor_through(&lift, &km, &v) {
                                        Ok(h) if factors => {
                                            if lift.after(&h)? != km {
                                                return Ok(Some(format!("factor does not compose: {f:?}")));
                                            }
                                        }
                                        Ok(_) => return Ok(Some(format!("factor over a non-factoring base: {f:?}"))),
                                        Err(_) if factors => {
                                            return Ok(Some(format!("no factor for {f:?} over v = {v:?}")))
                                        }
                                        Err(_) => {}
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }));
    Ok(out)
}

/// All family morphisms `X → Y` over a fixed base map.
pub fn fam_mors_over(x: &Family, y: &Family, base_map: &FinMap) -> Result<Vec<FamMor>> {
    let per: Vec<Vec<FinMap>> = (0..x.base().len())
        .map(|k| maps(x.fibre_at(k), y.fibre_at(base_map.image_index(k))))
        .collect();
    if per.iter().any(Vec::is_empty) {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; per.len()];
    loop {
        let chosen = idx.iter().zip(&per).map(|(&k, ms)| ms[k].clone()).collect();
        out.push(FamMor::new(x, y, base_map.clone(), chosen)?);
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn coprod(bound: usize) -> Result<Vec<LawOutcome>> {
    let mut out = Vec::new();
    let mut triples = Vec::new();
    for base in carriers(bound) {
        for x in families_over(&base, bound) {
            for y in families_over(&base, bound) {
                triples.push((x.clone(), y));
            }
        }
    }
    out.push(tally("cotupling round trips", &triples, |(x, y)| {
        let co = fam_coprod(x, y)?;
        for z in families_over(x.base(), bound.min(2)) {
            for f in vertical_maps(x, &z)? {
                for g in vertical_maps(y, &z)? {
                    let h = cotuple(&co, &f, &g)?;
                    if h.after(&co.inl)? != f || h.after(&co.inr)? != g {
                        return Ok(Some(format!("X = {x:?}, Y = {y:?}, Z = {z:?}")));
                    }
                }
            }
        }
        Ok(None)
    }));
    let mut squares = Vec::new();
    for base in carriers(bound) {
        for x in families_over(&base, bound) {
            for y in families_over(&base, bound) {
                for j in carriers(bound) {
                    for u in maps(&j, &base) {
                        squares.push((u, x.clone(), y.clone()));
                    }
                }
            }
        }
    }
    out.push(tally("injection squares are pullbacks", &squares, |(u, x, y)| {
        Ok(fail_unless(coprod_squares_are_pullbacks(u, x, y)?, || {
            format!("u = {u:?}, X' = {x:?}, Y' = {y:?}")
        }))
    }));
    out.push(tally("refined coproduct formula", &triples, |(x, y)| {
        for p in preds(x.base()) {
            for l in refined_on(x).into_iter().filter(|o| *o.p() == p) {
                for r in refined_on(y).into_iter().filter(|o| *o.p() == p) {
                    let c = coprod_refined(&l, &r)?;
                    if *project_u(&c) != fam_coprod(x, y)?.family {
                        return Ok(Some(format!("projection: X = {x:?}, Y = {y:?}")));
                    }
                    for e in c.q().over().iter() {
                        let (i, t) = e.as_pair().expect("pair");
                        let expected = match t {
                            Atom::Inl(a) => l.q().contains(&Atom::pair(i.clone(), (**a).clone())),
                            Atom::Inr(b) => r.q().contains(&Atom::pair(i.clone(), (**b).clone())),
                            _ => false,
                        };
                        if c.q().contains(e) != expected {
                            return Ok(Some(format!("X = {x:?}, Y = {y:?}, at {e}")));
                        }
                    }
                }
            }
        }
        Ok(None)
    }));
    Ok(out)
}

fn all_liftings() -> Vec<PredLifting> {
    MonadKind::ALL.iter().flat_map(|&m| liftings_for(m)).collect()
}

fn monad(bound: usize) -> Result<Vec<LawOutcome>> {
    let mut out = Vec::new();
    let cs = carriers(bound);
    let monads: Vec<MonadKind> = MonadKind::ALL.to_vec();
    out.push(tally("monad laws", &monads, |&m| {
        for c in &cs {
            let tc = m.on_carrier(c)?;
            let unit_l = m.mult(c)?.after(&m.unit(&tc)?)?;
            let unit_r = m.mult(c)?.after(&m.on_map(&m.unit(c)?)?)?;
            if !unit_l.is_identity() || !unit_r.is_identity() {
                return Ok(Some(format!("{m}: unit law on {c}")));
            }
            let ttc = m.on_carrier(&tc)?;
            if ttc.len() <= 4 {
                let assoc_l = m.mult(c)?.after(&m.on_map(&m.mult(c)?)?)?;
                let assoc_r = m.mult(c)?.after(&m.mult(&tc)?)?;
                if assoc_l != assoc_r {
                    return Ok(Some(format!("{m}: associativity on {c}")));
                }
            } else {
                // T T T c is too large to build; check every element with at most two members
                for t in m.small_elements(&ttc) {
                    let lhs = m.mult_atom(&m.mult_atom(&t)?)?;
                    let rhs = m.mult_atom(&m.fmap_atom(&t, |s| m.mult_atom(s))?)?;
                    if lhs != rhs {
                        return Ok(Some(format!("{m}: associativity at {t}")));
                    }
                }
            }
        }
        Ok(None)
    }));
    let fams = all_families(bound);
    let mut fm_inst = Vec::new();
    for &m in &monads {
        for x in &fams {
            fm_inst.push((m, x.clone()));
        }
    }
    out.push(tally("fibred monad commutes with reindexing", &fm_inst, |(m, x)| {
        let fm = FibredMonad::new(*m);
        for j in &cs {
            for u in maps(j, x.base()) {
                if !fm.commutes_with_reindex(&u, x)? {
                    return Ok(Some(format!("{m}: X = {x:?}, u = {u:?}")));
                }
            }
        }
        Ok(None)
    }));
    out.push(tally("oplax unit and multiplication squares", &fm_inst, |(m, x)| {
        let th = Oplax { monad: *m };
        Ok(fail_unless(th.unit_square(x)? && th.mult_square(x)?, || format!("{m}: X = {x:?}")))
    }));
    let lifts = all_liftings();
    out.push(tally("predicate liftings are fibred", &lifts, |l| {
        for a in &cs {
            for b in &cs {
                for u in maps(a, b) {
                    for p in preds(b) {
                        if !l.is_fibred_at(&u, &p)? {
                            return Ok(Some(format!("{l}: u = {u:?}, P = {p:?}")));
                        }
                    }
                }
            }
        }
        Ok(None)
    }));
    let lifted = lifts.iter().map(|l| LiftedMonad::new(*l)).collect::<Result<Vec<_>>>()?;
    let mut s_inst = Vec::new();
    for s in &lifted {
        for x in &fams {
            s_inst.push((s, x.clone()));
        }
    }
    out.push(tally("lifted monad laws", &s_inst, |(s, x)| {
        let l = s.lifting;
        for o in refined_on(x) {
            if !s.laws_hold(&o)? {
                return Ok(Some(format!("{l}: {o:?}")));
            }
            // pointwise display of the lifted monad
            let so = s.apply(&o)?;
            for e in so.q().over().iter() {
                let (i, t) = e.as_pair().expect("pair");
                let expected = o.p().contains(i)
                    && l.holds(t, |a| Ok(o.q().contains(&Atom::pair(i.clone(), a.clone()))))?;
                if so.q().contains(e) != expected {
                    return Ok(Some(format!("{l}: fibre display at {e}")));
                }
            }
            if project_u(&so) != &s.fibred().on_family(x)? {
                return Ok(Some(format!("{l}: projection of S({o:?})")));
            }
        }
        Ok(None)
    }));
    out.push(tally("lifted monad is fibred", &s_inst, |(s, x)| {
        let l = s.lifting;
        for o in refined_on(x) {
            for j in &cs {
                for u in maps(j, x.base()) {
                    for p2 in preds_below(&pull(&u, o.p())?) {
                        if !s.is_fibred_at(&u, &p2, &o)? {
                            return Ok(Some(format!("{l}: {o:?}, u = {u:?}, P' = {p2:?}")));
                        }
                    }
                }
            }
        }
        Ok(None)
    }));
    Ok(out)
}

fn eq3(bound: usize) -> Result<Vec<LawOutcome>> {
    let lifts = all_liftings();
    let mut count = 0usize;
    for x in all_families(bound) {
        count += (1usize << x.base().len()) * (1usize << total(&x).len());
    }
    let results: Vec<(PredLifting, Result<Option<String>>)> = lifts
        .par_iter()
        .map(|l| (*l, eq3_counterexample(l, bound)))
        .collect();
    Ok(results
        .into_iter()
        .map(|(l, r)| {
            let (failures, examples) = match r {
                Ok(None) => (0, vec![]),
                Ok(Some(cx)) => (1, vec![cx]),
                Err(e) => (1, vec![format!("error: {e}")]),
            };
            LawOutcome {
                law: format!("Eq. (3) for {l}"),
                instances: count,
                failures,
                examples,
            }
        })
        .collect())
}

/// Pointed posets of every size `1..=n` up to isomorphism, on canonical carriers.
fn pointed_posets(n: usize) -> Vec<PointedPoset> {
    let mut out: Vec<PointedPoset> = Vec::new();
    for size in 1..=n {
        let c = Carrier::range(size);
        let candidates = [
            PointedPoset::chain(&c),
            PointedPoset::flat(&c, &Atom::int(0)),
        ];
        for p in candidates.into_iter().flatten() {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

fn poset_families(base: &Carrier, bound: usize) -> Vec<PosetFamily> {
    let shapes = pointed_posets(bound);
    let mut out = Vec::new();
    let mut idx = vec![0usize; base.len()];
    loop {
        out.push(PosetFamily::new(base, idx.iter().map(|&k| shapes[k].clone()).collect()).expect("aligned"));
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < shapes.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn monotone_vertical(xf: &PosetFamily, yf: &PosetFamily) -> Result<Vec<FamMor>> {
    Ok(vertical_maps(&xf.family(), &yf.family())?
        .into_iter()
        .filter(|f| xf.monotone_into(f, yf).is_ok())
        .collect())
}

fn conway_suite(bound: usize) -> Result<Vec<LawOutcome>> {
    let mut out = Vec::new();
    let mut fams = Vec::new();
    for base in carriers(bound) {
        fams.extend(poset_families(&base, bound));
    }
    out.push(tally("least fixed points", &fams, |fam| {
        for f in monotone_vertical(fam, fam)? {
            let fix = conway(fam, &f)?;
            for (k, i) in fam.base().iter().enumerate() {
                let v = fix.apply(i, &Atom::Unit).expect("total");
                let fk = f.fibre_map(k);
                if fk.apply(v) != Some(v) {
                    return Ok(Some(format!("not a fixed point at {i}")));
                }
                for w in fam.fibre_at(k).carrier().iter() {
                    if fk.apply(w) == Some(w) && !fam.fibre_at(k).leq(v, w) {
                        return Ok(Some(format!("not least at {i}")));
                    }
                }
            }
        }
        Ok(None)
    }));
    let mut nat = Vec::new();
    for fam in &fams {
        for j in carriers(bound) {
            for u in maps(&j, fam.base()) {
                nat.push((fam.clone(), u));
            }
        }
    }
    out.push(tally("naturality", &nat, |(fam, u)| {
        for f in monotone_vertical(fam, fam)? {
            let c = check_naturality(fam, &f, u)?;
            if !c.holds {
                return Ok(Some(c.detail));
            }
        }
        Ok(None)
    }));
    // laws quantifying over pairs of maps: comprehensions capped one above the bound
    let capped = |base: &Carrier| -> Vec<PosetFamily> {
        poset_families(base, bound)
            .into_iter()
            .filter(|f| f.family().fibres().iter().map(Carrier::len).sum::<usize>() <= bound + 1)
            .collect()
    };
    let mut pairs = Vec::new();
    for base in carriers(bound) {
        let fs = capped(&base);
        for a in &fs {
            for b in &fs {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    out.push(tally("dinaturality", &pairs, |(xf, yf)| {
        let fs = monotone_vertical(xf, yf)?;
        let gs = monotone_vertical(yf, xf)?;
        for f in &fs {
            for g in &gs {
                let c = check_dinaturality(xf, yf, f, g)?;
                if !c.holds {
                    return Ok(Some(c.detail));
                }
            }
        }
        Ok(None)
    }));
    let diag_fams: Vec<PosetFamily> = carriers(bound).iter().flat_map(|b| capped(b)).collect();
    out.push(tally("diagonal property", &diag_fams, |fam| {
        let x = fam.family();
        let proj = comprehend(&x).proj;
        let pulled = fam.reindex(&proj)?;
        for f in monotone_vertical(&pulled, &pulled)? {
            if !jointly_monotone(fam, &f) {
                continue;
            }
            let c = check_diagonal(fam, &f)?;
            if !c.holds {
                return Ok(Some(c.detail));
            }
        }
        Ok(None)
    }));
    let small = bound.min(2);
    let families = all_families(small);
    out.push(tally("domain contains free algebras", &families, |x| {
        for m in [MonadKind::Maybe, MonadKind::Powerset] {
            if !k_contains_free(m, x)? {
                return Ok(Some(format!("{m}: X = {x:?}")));
            }
        }
        Ok(None)
    }));
    let mut dep = Vec::new();
    for x in &families {
        for yf in poset_families(&total(x), small) {
            dep.push((x.clone(), yf));
        }
    }
    out.push(tally("domain closed under products and isomorphisms", &dep, |(x, yf)| {
        let prod = match pi_poset_family(x, yf) {
            Ok(p) => p,
            Err(e) => return Ok(Some(format!("product not pointed: {e}"))),
        };
        // reverse every fibre: an isomorphism onto a relabelled family
        let fam = prod.family();
        let relabel = Family::from_fn(fam.base(), |i| {
            Carrier::new(fam.fibre(i).expect("base").iter().map(|a| Atom::inl(a.clone())))
        });
        let iso = FamMor::vertical_from_fn(&fam, &relabel, |_, a| Ok(Atom::inl(a.clone())))?;
        match transport(&iso, &prod) {
            Ok(_) => Ok(None),
            Err(e) => Ok(Some(format!("isomorphic copy not pointed: {e}"))),
        }
    }));
    Ok(out)
}

fn em(bound: usize) -> Result<Vec<LawOutcome>> {
    let mut out = Vec::new();
    let fams = all_families(bound);
    let mut inst = Vec::new();
    for m in MonadKind::ALL {
        for x in &fams {
            inst.push((m, x.clone()));
        }
    }
    out.push(tally("free algebra laws and triangle identities", &inst, |(m, x)| {
        let em = em_model(*m);
        let fx = em.free(x)?;
        if !fx.laws_hold(&em.fibred)? {
            return Ok(Some(format!("{m}: free algebra on {x:?}")));
        }
        if em.forget(&fx) != em.fibred.on_family(x)? {
            return Ok(Some(format!("{m}: U F X on {x:?}")));
        }
        if !em.triangles_hold(x, &fx)? || !em.counit_is_homomorphism(&fx)? {
            return Ok(Some(format!("{m}: triangles on {x:?}")));
        }
        Ok(None)
    }));
    let small = bound.min(2);
    let mut dep = Vec::new();
    for m in MonadKind::ALL {
        for (x, y) in dependent_pairs(small, small) {
            dep.push((m, x, y));
        }
    }
    out.push(tally("product algebras", &dep, |(m, x, y)| {
        let em = em_model(*m);
        let fy = em.free(y)?;
        let prod_fibres = pi(x, &fy.carrier)?;
        let widest = prod_fibres.fibres().iter().map(Carrier::len).max().unwrap_or(0);
        if *m == MonadKind::Powerset && widest > 4 {
            return Ok(fail_unless(em.pi_algebra_laws_pointwise(x, &fy)?, || {
                format!("{m}: Π over {x:?} of F{y:?}")
            }));
        }
        let prod = em.pi_algebra(x, &fy)?;
        if !prod.laws_hold(&em.fibred)? {
            return Ok(Some(format!("{m}: Π over {x:?} of F{y:?}")));
        }
        let again = EmAlgebra::new(&prod.carrier, &prod.structure)?;
        Ok(fail_unless(em.triangles_hold(x, &again)? && em.counit_is_homomorphism(&again)?, || {
            format!("{m}: triangles at Π")
        }))
    }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_bound_one() {
        for s in Suite::ALL {
            let r = run_suite(s, 1).unwrap();
            for o in &r.outcomes {
                assert!(o.passed(), "{s} / {}: {:?}", o.law, o.examples);
            }
        }
    }
}
