//! Exhaustive checks of closure under inference and noncontextuality on
//! explicit label sets. Used for rebit enumeration and as an independent
//! cross-check of the structured catalog.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::cnc::CncSet;
use crate::error::{Error, Result};
use crate::pauli::{beta_unchecked, PauliLabel};

/// Why a set failed the check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CncWitness {
    /// `a, b` commute and are in the set, but `a + b` is not.
    NotClosed { a: PauliLabel, b: PauliLabel },
    /// Commuting pairs whose constraints `γ(a)+γ(b)+γ(a+b) = β(a,b)` sum to `0 = 1`.
    Contextual { pairs: Vec<(PauliLabel, PauliLabel)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CncCheck {
    pub closed: bool,
    pub noncontextual: bool,
    pub witness: Option<CncWitness>,
}

impl CncCheck {
    pub fn is_cnc(&self) -> bool {
        self.closed && self.noncontextual
    }
}

/// Largest explicit set the exhaustive solver accepts.
pub const BRUTE_FORCE_MAX_ELEMENTS: usize = 64;

/// Row of the GF(2) system: variable mask, right-hand side, provenance.
struct Row {
    vars: u64,
    rhs: u8,
    origin: Vec<u64>,
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

/// Check Definitions of closure and noncontextuality by brute force.
pub fn brute_force_cnc_check(subset: &[PauliLabel]) -> Result<CncCheck> {
    let elems: Vec<PauliLabel> = subset.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if elems.len() > BRUTE_FORCE_MAX_ELEMENTS {
        return Err(Error::ResourceCap(format!(
            "brute-force check limited to {BRUTE_FORCE_MAX_ELEMENTS} elements, got {}",
            elems.len()
        )));
    }
    if let Some(n) = elems.first().map(|a| a.n()) {
        if let Some(bad) = elems.iter().find(|a| a.n() != n) {
            return Err(Error::DimensionMismatch { left: n, right: bad.n() });
        }
    }
    let index: HashMap<PauliLabel, usize> = elems.iter().enumerate().map(|(i, a)| (*a, i)).collect();

    let mut closed = true;
    let mut witness = None;
    let mut equations: Vec<(u64, u8, (PauliLabel, PauliLabel))> = Vec::new();
    for (i, a) in elems.iter().enumerate() {
        for b in &elems[i..] {
            if a.anticommutes(b) {
                continue;
            }
            let c = *a ^ *b;
            match index.get(&c) {
                Some(&k) => {
                    let vars = (1u64 << i) ^ (1u64 << index[b]) ^ (1u64 << k);
                    equations.push((vars, beta_unchecked(a, b), (*a, *b)));
                }
                None => {
                    if closed {
                        witness = Some(CncWitness::NotClosed { a: *a, b: *b });
                    }
                    closed = false;
                }
            }
        }
    }
    // γ(0) = 0
    if let Some(&k) = elems.first().and_then(|a| index.get(&PauliLabel::identity(a.n()))) {
        equations.push((1u64 << k, 0, (elems[k], elems[k])));
    }

    let words = equations.len().div_ceil(64).max(1);
    let mut pivots: Vec<Row> = Vec::new();
    let mut contextual_origin: Option<Vec<u64>> = None;
    for (e, &(vars, rhs, _)) in equations.iter().enumerate() {
        let mut origin = vec![0u64; words];
        origin[e / 64] |= 1 << (e % 64);
        let mut row = Row { vars, rhs, origin };
        for p in &pivots {
            let bit = 63 - p.vars.leading_zeros();
            if (row.vars >> bit) & 1 == 1 {
                row.vars ^= p.vars;
                row.rhs ^= p.rhs;
                xor_into(&mut row.origin, &p.origin);
            }
        }
        if row.vars == 0 {
            if row.rhs == 1 {
                contextual_origin = Some(row.origin);
                break;
            }
            continue;
        }
        let bit = 63 - row.vars.leading_zeros();
        for p in pivots.iter_mut() {
            if (p.vars >> bit) & 1 == 1 {
                p.vars ^= row.vars;
                p.rhs ^= row.rhs;
                xor_into(&mut p.origin, &row.origin);
            }
        }
        pivots.push(row);
    }
    let noncontextual = contextual_origin.is_none();
    if let Some(origin) = contextual_origin {
        if witness.is_none() {
            let pairs = equations
                .iter()
                .enumerate()
                .filter(|(e, _)| (origin[e / 64] >> (e % 64)) & 1 == 1)
                .map(|(_, eq)| eq.2)
                .collect();
            witness = Some(CncWitness::Contextual { pairs });
        }
    }
    Ok(CncCheck { closed, noncontextual, witness })
}

/// Closure under inference of an explicit set (repeatedly add commuting sums).
pub fn closure(subset: &[PauliLabel]) -> Vec<PauliLabel> {
    let mut set: BTreeSet<PauliLabel> = subset.iter().copied().collect();
    loop {
        let cur: Vec<PauliLabel> = set.iter().copied().collect();
        let mut grew = false;
        for (i, a) in cur.iter().enumerate() {
            for b in &cur[i..] {
                if !a.anticommutes(b) && set.insert(*a ^ *b) {
                    grew = true;
                }
            }
        }
        if !grew {
            return set.into_iter().collect();
        }
    }
}

/// Structured form of an explicit cnc set: `Ĩ` is the set of elements
/// commuting with everything, the remaining cosets give the representatives.
pub fn structure_of(n: usize, elems: &[PauliLabel]) -> Result<CncSet> {
    let center: Vec<PauliLabel> = elems
        .iter()
        .copied()
        .filter(|a| elems.iter().all(|b| !a.anticommutes(b)))
        .collect();
    let mut basis = super::cnc::ValuedBasis::default();
    for c in &center {
        basis.insert(super::cnc::Valued::new(*c, 0));
    }
    let gens: Vec<PauliLabel> = basis.rows().iter().map(|v| v.label).collect();
    let mut reps = BTreeSet::new();
    for a in elems {
        let (r, _) = super::cnc::reduce_plain(&gens, *a);
        if !r.is_identity() {
            reps.insert(r);
        }
    }
    let reps: Vec<PauliLabel> = reps.into_iter().collect();
    let set = CncSet::new(n, &gens, &reps)?;
    if set.size() != elems.len() {
        return Err(Error::InvalidCnc(format!(
            "explicit set of {} elements does not have coset structure (structured size {})",
            elems.len(),
            set.size()
        )));
    }
    Ok(set)
}

/// All cnc subsets of `universe ∪ {0}` (each containing 0), by exhaustive search.
pub fn all_cnc_subsets(n: usize, universe: &[PauliLabel]) -> Result<Vec<Vec<PauliLabel>>> {
    let nonzero: Vec<PauliLabel> = universe.iter().copied().filter(|a| !a.is_identity()).collect();
    if nonzero.len() > 20 {
        return Err(Error::ResourceCap(format!(
            "exhaustive subset search over {} labels",
            nonzero.len()
        )));
    }
    let zero = PauliLabel::identity(n);
    let mut out = Vec::new();
    for mask in 0u32..(1 << nonzero.len()) {
        let mut s = vec![zero];
        s.extend((0..nonzero.len()).filter(|i| (mask >> i) & 1 == 1).map(|i| nonzero[i]));
        if brute_force_cnc_check(&s)?.is_cnc() {
            s.sort();
            out.push(s);
        }
    }
    Ok(out)
}

/// Inclusion-maximal members of a family of sets (each sorted).
pub fn maximal_sets(family: &[Vec<PauliLabel>]) -> Vec<Vec<PauliLabel>> {
    let as_sets: Vec<BTreeSet<PauliLabel>> = family.iter().map(|s| s.iter().copied().collect()).collect();
    family
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            !as_sets
                .iter()
                .enumerate()
                .any(|(j, t)| j != *i && t.len() > as_sets[*i].len() && as_sets[*i].is_subset(t))
        })
        .map(|(_, s)| s.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    fn labels(v: &[&str]) -> Vec<PauliLabel> {
        v.iter().map(|s| p(s)).collect()
    }

    #[test]
    fn mermin_square_is_closed_but_contextual() {
        let sq = labels(&["II", "XI", "IX", "XX", "IZ", "ZI", "ZZ", "XZ", "ZX", "YY"]);
        let check = brute_force_cnc_check(&sq).unwrap();
        assert!(check.closed);
        assert!(!check.noncontextual);
        match check.witness {
            Some(CncWitness::Contextual { pairs }) => assert!(!pairs.is_empty()),
            other => panic!("expected contextual witness, got {other:?}"),
        }
    }

    #[test]
    fn isotropic_is_cnc() {
        let s = labels(&["II", "ZI", "IZ", "ZZ"]);
        assert!(brute_force_cnc_check(&s).unwrap().is_cnc());
    }

    #[test]
    fn missing_sum_is_not_closed() {
        let s = labels(&["II", "ZI", "IZ"]);
        let c = brute_force_cnc_check(&s).unwrap();
        assert!(!c.closed);
        assert!(matches!(c.witness, Some(CncWitness::NotClosed { .. })));
    }

    #[test]
    fn tensor_of_two_m2_sets_is_contextual_after_closure() {
        // Ω₀ ⊗ Ω₀ on two qubits: products of {I,X,Y,Z} on each factor.
        let one = labels(&["I", "X", "Y", "Z"]);
        let mut prod = Vec::new();
        for a in &one {
            for b in &one {
                prod.push(PauliLabel::new(2, a.x() | (b.x() << 1), a.z() | (b.z() << 1)).unwrap());
            }
        }
        let c = brute_force_cnc_check(&closure(&prod)).unwrap();
        assert!(c.closed);
        assert!(!c.noncontextual);
    }

    #[test]
    fn structure_roundtrip() {
        let s = CncSet::new(2, &[p("ZZ")], &[p("ZI"), p("XX"), p("YX")]).unwrap();
        let elems: Vec<PauliLabel> = s.elements().collect();
        assert_eq!(structure_of(2, &elems).unwrap(), s);
    }
}
