//! Exhaustive enumeration of small instances for the law suites.

use crate::atom::Atom;
use crate::error::Result;
use crate::kernel::{comprehend, Carrier, FamMor, Family, FinMap};
use crate::pred::Pred;

/// `{0..n-1}` for every `n ≤ bound`.
pub fn carriers(bound: usize) -> Vec<Carrier> {
    (0..=bound).map(Carrier::range).collect()
}

/// All families over `base` whose fibres are canonical carriers of size `≤ bound`.
pub fn families_over(base: &Carrier, bound: usize) -> Vec<Family> {
    let shapes = carriers(bound);
    let mut out = Vec::new();
    let mut idx = vec![0usize; base.len()];
    loop {
        let fibres = idx.iter().map(|&k| shapes[k].clone()).collect();
        out.push(Family::new(base, fibres).expect("aligned"));
        if !odometer(&mut idx, shapes.len()) {
            return out;
        }
    }
}

/// All families over all bases of size `≤ bound`.
pub fn families(bound: usize) -> Vec<Family> {
    carriers(bound).iter().flat_map(|b| families_over(b, bound)).collect()
}

/// All functions `dom → cod`.
pub fn maps(dom: &Carrier, cod: &Carrier) -> Vec<FinMap> {
    if cod.is_empty() {
        return if dom.is_empty() { vec![FinMap::identity(dom)] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; dom.len()];
    loop {
        out.push(FinMap::from_indices(dom, cod, idx.clone()));
        if !odometer(&mut idx, cod.len()) {
            return out;
        }
    }
}

/// All subsets of `over`.
pub fn preds(over: &Carrier) -> Vec<Pred> {
    assert!(over.len() < 24, "too many predicates to enumerate");
    (0u32..(1u32 << over.len()))
        .map(|mask| Pred::from_bits(over, (0..over.len()).map(|k| mask >> k & 1 == 1).collect()))
        .collect()
}

/// All vertical morphisms between families over the same base.
pub fn vertical_maps(x: &Family, y: &Family) -> Result<Vec<FamMor>> {
    let per_fibre: Vec<Vec<FinMap>> = (0..x.base().len())
        .map(|k| maps(x.fibre_at(k), y.fibre_at(k)))
        .collect();
    if per_fibre.iter().any(Vec::is_empty) {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_fibre.len()];
    loop {
        let chosen = idx.iter().zip(&per_fibre).map(|(&k, ms)| ms[k].clone()).collect();
        out.push(FamMor::new(x, y, FinMap::identity(x.base()), chosen)?);
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_fibre[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// All sections of `π_X`.
pub fn sections(x: &Family) -> Vec<FinMap> {
    let comp = comprehend(x);
    let choices: Vec<Vec<usize>> = x
        .base()
        .iter()
        .map(|i| {
            x.fibre(i)
                .expect("base")
                .iter()
                .map(|a| comp.total.index_of(&Atom::pair(i.clone(), a.clone())).expect("total"))
                .collect()
        })
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return vec![];
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let images = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
        out.push(FinMap::from_indices(x.base(), &comp.total, images));
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn odometer(idx: &mut [usize], radix: usize) -> bool {
    for pos in (0..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < radix {
            return true;
        }
        idx[pos] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(maps(&Carrier::range(2), &Carrier::range(3)).len(), 9);
        assert_eq!(maps(&Carrier::empty(), &Carrier::empty()).len(), 1);
        assert_eq!(maps(&Carrier::range(1), &Carrier::empty()).len(), 0);
        assert_eq!(preds(&Carrier::range(3)).len(), 8);
        assert_eq!(families_over(&Carrier::range(2), 2).len(), 9);
        assert_eq!(families(1).len(), 1 + 2);
        let x = Family::new(&Carrier::range(2), vec![Carrier::range(2), Carrier::range(3)]).unwrap();
        assert_eq!(sections(&x).len(), 6);
        assert_eq!(vertical_maps(&x, &x).unwrap().len(), 4 * 27);
    }
}
