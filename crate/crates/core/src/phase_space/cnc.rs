use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{beta_unchecked, PauliLabel, MAX_QUBITS};

/// A closed noncontextual set `Ω = Ĩ ∪ (a_1 + Ĩ) ∪ … ∪ (a_ξ + Ĩ)`.
///
/// Stored in canonical form: the isotropic generators are in reduced row-echelon
/// order over the packed `(x, z)` bits (pivot = highest set bit, descending), and
/// each representative is the least member of its coset, sorted ascending. Two
/// presentations of the same set always canonicalize to equal values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CncSet {
    n: usize,
    gens: Vec<PauliLabel>,
    reps: Vec<PauliLabel>,
}

/// Where a label sits inside `Ω`: `a = a_k·[coset] + Σ_i gens_mask_i g_i`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Membership {
    pub coset: Option<usize>,
    pub gens_mask: u64,
}

/// A label together with its `γ` value, used while building presentations.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Valued {
    pub label: PauliLabel,
    pub value: u8,
}

impl Valued {
    pub fn new(label: PauliLabel, value: u8) -> Self {
        Self { label, value }
    }

    /// `γ(u + w) = γ(u) + γ(w) + β(u, w)` for commuting `u, w`.
    #[inline]
    pub fn combine(&self, other: &Valued) -> Valued {
        Valued {
            label: self.label ^ other.label,
            value: self.value ^ other.value ^ beta_unchecked(&self.label, &other.label),
        }
    }
}

#[inline]
fn pivot(v: u128) -> u32 {
    127 - v.leading_zeros()
}

/// Reduced row-echelon basis over GF(2) carrying `γ` values along.
#[derive(Clone, Debug, Default)]
pub(crate) struct ValuedBasis {
    rows: Vec<Valued>,
}

impl ValuedBasis {
    /// Reduce `v` by the basis; returns the residual and the mask of rows used.
    pub fn reduce(&self, v: Valued) -> (Valued, u64) {
        let mut cur = v;
        let mut used = 0u64;
        for (i, row) in self.rows.iter().enumerate() {
            let p = pivot(row.label.pack());
            if (cur.label.pack() >> p) & 1 == 1 {
                cur = cur.combine(row);
                used |= 1 << i;
            }
        }
        (cur, used)
    }

    /// Insert `v`; returns `false` if it is already in the span.
    pub fn insert(&mut self, v: Valued) -> bool {
        let (r, _) = self.reduce(v);
        if r.label.is_identity() {
            return false;
        }
        let p = pivot(r.label.pack());
        for row in self.rows.iter_mut() {
            if (row.label.pack() >> p) & 1 == 1 {
                *row = row.combine(&r);
            }
        }
        let pos = self
            .rows
            .iter()
            .position(|row| pivot(row.label.pack()) < p)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, r);
        true
    }

    pub fn rows(&self) -> &[Valued] {
        &self.rows
    }
}

/// Plain (valueless) reduction against canonical generators.
#[inline]
pub(crate) fn reduce_plain(gens: &[PauliLabel], a: PauliLabel) -> (PauliLabel, u64) {
    let mut v = a.pack();
    let mut used = 0u64;
    for (i, g) in gens.iter().enumerate() {
        let gp = g.pack();
        if (v >> pivot(gp)) & 1 == 1 {
            v ^= gp;
            used |= 1 << i;
        }
    }
    (PauliLabel::unpack(a.n(), v), used)
}

impl CncSet {
    /// Validate a presentation and bring it to canonical form.
    pub fn new(n: usize, isotropic_gens: &[PauliLabel], reps: &[PauliLabel]) -> Result<Self> {
        let g: Vec<Valued> = isotropic_gens.iter().map(|&l| Valued::new(l, 0)).collect();
        let r: Vec<Valued> = reps.iter().map(|&l| Valued::new(l, 0)).collect();
        let (set, _, _) = canonicalize(n, g, r)?;
        Ok(set)
    }

    /// The isotropic subspace spanned by `gens` (no representatives).
    pub fn isotropic(n: usize, gens: &[PauliLabel]) -> Result<Self> {
        Self::new(n, gens, &[])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn isotropic_gens(&self) -> &[PauliLabel] {
        &self.gens
    }

    pub fn reps(&self) -> &[PauliLabel] {
        &self.reps
    }

    /// `m = n - dim Ĩ`.
    pub fn m(&self) -> usize {
        self.n - self.gens.len()
    }

    pub fn xi(&self) -> usize {
        self.reps.len()
    }

    pub fn is_isotropic(&self) -> bool {
        self.reps.is_empty()
    }

    /// Maximal in the qubit sense: `ξ = 2m + 1` with `m >= 1`.
    pub fn is_maximal(&self) -> bool {
        self.m() >= 1 && self.xi() == 2 * self.m() + 1
    }

    /// True when every element is a real Pauli operator.
    pub fn is_real(&self) -> bool {
        self.gens.iter().chain(self.reps.iter()).all(|a| a.is_real())
            && self.elements().all(|a| a.is_real())
    }

    /// `|Ω| = (ξ + 1)·2^{n-m}`.
    pub fn size(&self) -> usize {
        (self.reps.len() + 1) << self.gens.len()
    }

    /// Number of value assignments, `2^{(n-m)+ξ}`.
    pub fn gamma_count(&self) -> u128 {
        1u128 << (self.gens.len() + self.reps.len())
    }

    /// Membership test by reduction against the canonical generators.
    pub fn contains(&self, a: &PauliLabel) -> Option<Membership> {
        if a.n() != self.n {
            return None;
        }
        let (r, mask) = reduce_plain(&self.gens, *a);
        if r.is_identity() {
            return Some(Membership { coset: None, gens_mask: mask });
        }
        self.reps
            .binary_search(&r)
            .ok()
            .map(|k| Membership { coset: Some(k), gens_mask: mask })
    }

    pub fn contains_label(&self, a: &PauliLabel) -> bool {
        self.contains(a).is_some()
    }

    /// All elements of `Ω`: first `Ĩ` (in mask order), then each coset in rep order.
    pub fn elements(&self) -> impl Iterator<Item = PauliLabel> + '_ {
        let k = self.gens.len();
        let iso: Vec<PauliLabel> = (0u64..1 << k)
            .map(|mask| {
                let mut v = PauliLabel::identity(self.n);
                for (i, g) in self.gens.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        v = v ^ *g;
                    }
                }
                v
            })
            .collect();
        let cosets = std::iter::once(None).chain(self.reps.iter().map(Some));
        cosets.flat_map(move |rep| {
            let iso = iso.clone();
            iso.into_iter().map(move |g| match rep {
                Some(r) => g ^ *r,
                None => g,
            })
        })
    }

    /// `Ω ⊆ other`.
    pub fn is_subset_of(&self, other: &CncSet) -> bool {
        self.n == other.n
            && self.gens.iter().all(|g| other.contains_label(g))
            && self.elements().all(|a| other.contains_label(&a))
    }

    pub(crate) fn from_canonical_parts(n: usize, gens: Vec<PauliLabel>, reps: Vec<PauliLabel>) -> Self {
        Self { n, gens, reps }
    }
}

impl fmt::Display for CncSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.gens.iter().map(|a| a.to_string()).collect();
        let r: Vec<String> = self.reps.iter().map(|a| a.to_string()).collect();
        write!(f, "<{}> + {{{}}}", g.join(","), r.join(","))
    }
}

/// Validate and canonicalize a valued presentation.
///
/// Returns the canonical set together with the values of `γ` on its canonical
/// generators and representatives (bit `i` of each mask).
pub(crate) fn canonicalize(n: usize, gens: Vec<Valued>, reps: Vec<Valued>) -> Result<(CncSet, u64, u128)> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    for v in gens.iter().chain(reps.iter()) {
        if v.label.n() != n {
            return Err(Error::DimensionMismatch { left: v.label.n(), right: n });
        }
    }
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            if a.label.anticommutes(&b.label) {
                return Err(Error::InvalidCnc(format!(
                    "isotropic generators {} and {} anticommute",
                    a.label, b.label
                )));
            }
        }
        for r in &reps {
            if a.label.anticommutes(&r.label) {
                return Err(Error::InvalidCnc(format!(
                    "representative {} anticommutes with isotropic generator {}",
                    r.label, a.label
                )));
            }
        }
    }
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            if !a.label.anticommutes(&b.label) {
                return Err(Error::InvalidCnc(format!(
                    "representatives {} and {} commute",
                    a.label, b.label
                )));
            }
        }
    }

    let mut basis = ValuedBasis::default();
    for g in &gens {
        if !basis.insert(*g) {
            return Err(Error::InvalidCnc(format!("isotropic generator {} is dependent", g.label)));
        }
    }
    let mut reduced: Vec<Valued> = Vec::with_capacity(reps.len());
    for r in &reps {
        let (res, _) = basis.reduce(*r);
        if res.label.is_identity() {
            return Err(Error::InvalidCnc(format!(
                "representative {} lies in the isotropic part",
                r.label
            )));
        }
        reduced.push(res);
    }
    // A single coset is itself isotropic.
    if reduced.len() == 1 {
        basis.insert(reduced[0]);
        reduced.clear();
    }
    reduced.sort_by_key(|v| v.label);
    let m = n - basis.rows().len();
    if reduced.len() > 2 * m + 1 {
        return Err(Error::InvalidCnc(format!(
            "{} representatives exceed 2m+1 = {}",
            reduced.len(),
            2 * m + 1
        )));
    }
    let iso_bits = basis
        .rows()
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, v)| acc | ((v.value as u64) << i));
    let rep_bits = reduced
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, v)| acc | ((v.value as u128) << i));
    let set = CncSet {
        n,
        gens: basis.rows().iter().map(|v| v.label).collect(),
        reps: reduced.iter().map(|v| v.label).collect(),
    };
    Ok((set, iso_bits, rep_bits))
}

/// Serializable presentation of a set (Pauli strings).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CncSetRecord {
    pub isotropic_gens: Vec<PauliLabel>,
    pub reps: Vec<PauliLabel>,
}

impl From<&CncSet> for CncSetRecord {
    fn from(s: &CncSet) -> Self {
        Self { isotropic_gens: s.gens.clone(), reps: s.reps.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    #[test]
    fn stabilizer_type_set() {
        let s = CncSet::new(2, &[p("ZI"), p("IZ")], &[]).unwrap();
        assert_eq!(s.m(), 0);
        assert_eq!(s.size(), 4);
        assert_eq!(s.elements().count(), 4);
    }

    #[test]
    fn eight_state_set() {
        let s = CncSet::new(1, &[], &[p("X"), p("Y"), p("Z")]).unwrap();
        assert_eq!((s.m(), s.xi()), (1, 3));
        let mut els: Vec<String> = s.elements().map(|a| a.to_string()).collect();
        els.sort();
        assert_eq!(els, vec!["I", "X", "Y", "Z"]);
        assert!(s.is_maximal());
    }

    #[test]
    fn commuting_reps_rejected() {
        let err = CncSet::new(2, &[], &[p("XI"), p("IX")]).unwrap_err();
        assert!(matches!(err, Error::InvalidCnc(_)));
        let err = CncSet::new(2, &[p("ZI"), p("ZI")], &[]).unwrap_err();
        assert!(matches!(err, Error::InvalidCnc(_)));
    }

    #[test]
    fn membership_decomposition() {
        let s = CncSet::new(1, &[], &[p("X"), p("Y"), p("Z")]).unwrap();
        let m = s.contains(&p("Y")).unwrap();
        assert_eq!(s.reps()[m.coset.unwrap()], p("Y"));
        assert_eq!(m.gens_mask, 0);

        let t = CncSet::new(2, &[p("ZI"), p("IZ")], &[]).unwrap();
        let m = t.contains(&p("ZZ")).unwrap();
        assert_eq!(m.coset, None);
        assert_eq!(m.gens_mask, 0b11);
        assert!(t.contains(&p("XI")).is_none());
    }

    #[test]
    fn canonical_form_is_presentation_independent() {
        let a = CncSet::new(2, &[p("ZZ")], &[p("XX"), p("YX"), p("ZI")]).unwrap();
        let b = CncSet::new(2, &[p("ZZ")], &[p("IZ"), p("XY"), p("YY")]).unwrap();
        assert_eq!(a, b);
        let c = CncSet::new(2, &[], &[p("ZI")]).unwrap();
        assert!(c.is_isotropic());
        assert_eq!(c, CncSet::isotropic(2, &[p("ZI")]).unwrap());
    }
}
