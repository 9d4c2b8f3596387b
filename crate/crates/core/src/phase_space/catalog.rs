//! Enumeration of the maximal phase space `V_M` (and the isotropic `m = 0`
//! layer) for small qubit counts, with a compact on-disk cache.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{Read, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::brute::{all_cnc_subsets, maximal_sets, structure_of};
use super::cnc::{reduce_plain, CncSet, Valued, ValuedBasis};
use super::point::{points_on, PhasePoint, PhasePointRecord};
use crate::error::{Error, Result};
use crate::pauli::PauliLabel;

/// Default cap on `n` for full qubit enumeration.
pub const DEFAULT_QUBIT_CAP: usize = 4;
/// Rebit mode searches subsets exhaustively and stops at two rebits.
pub const REBIT_CAP: usize = 2;

const CACHE_MAGIC: &[u8; 8] = b"CNCCAT\0\0";
const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Catalog {
    n: usize,
    m_set: Vec<usize>,
    rebit: bool,
    sets: Vec<Arc<CncSet>>,
    points: Vec<PhasePoint>,
    ranges: Vec<Range<usize>>,
    set_index: HashMap<Arc<CncSet>, usize>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CountRow {
    pub mode: String,
    pub m_set: String,
    pub sets: usize,
    pub points: usize,
}

impl Catalog {
    /// Build a catalog from a list of sets; points are every `γ` on every set.
    pub fn from_sets(n: usize, m_set: &[usize], rebit: bool, mut sets: Vec<CncSet>) -> Self {
        sets.sort();
        sets.dedup();
        let sets: Vec<Arc<CncSet>> = sets.into_iter().map(Arc::new).collect();
        let mut points = Vec::new();
        let mut ranges = Vec::with_capacity(sets.len());
        let mut set_index = HashMap::with_capacity(sets.len());
        for (i, s) in sets.iter().enumerate() {
            let start = points.len();
            points.extend(points_on(s));
            ranges.push(start..points.len());
            set_index.insert(s.clone(), i);
        }
        let mut m_set = m_set.to_vec();
        m_set.sort_unstable();
        m_set.dedup();
        Self { n, m_set, rebit, sets, points, ranges, set_index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_set(&self) -> &[usize] {
        &self.m_set
    }

    pub fn rebit(&self) -> bool {
        self.rebit
    }

    pub fn sets(&self) -> &[Arc<CncSet>] {
        &self.sets
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn set_position(&self, set: &CncSet) -> Option<usize> {
        self.set_index.get(set).copied()
    }

    /// Points belonging to set `i`.
    pub fn points_of(&self, i: usize) -> &[PhasePoint] {
        &self.points[self.ranges[i].clone()]
    }

    pub fn point_range(&self, i: usize) -> Range<usize> {
        self.ranges[i].clone()
    }

    /// Index of a point, if it is in the catalog.
    pub fn position(&self, p: &PhasePoint) -> Option<usize> {
        let i = self.set_position(&p.omega)?;
        self.points_of(i).iter().position(|q| q.gamma == p.gamma).map(|k| self.ranges[i].start + k)
    }

    /// Points restricted to a given `m`.
    pub fn filter_m(&self, m_set: &[usize]) -> Catalog {
        let sets = self
            .sets
            .iter()
            .filter(|s| m_set.contains(&self.class_m(s)))
            .map(|s| (**s).clone())
            .collect();
        Catalog::from_sets(self.n, m_set, self.rebit, sets)
    }

    /// Catalog class `m` of a set: for isotropic sets of full dimension this is 0.
    fn class_m(&self, s: &CncSet) -> usize {
        if s.is_isotropic() {
            0
        } else {
            s.m()
        }
    }

    pub fn count_row(&self) -> CountRow {
        CountRow {
            mode: if self.rebit { "rebit" } else { "qubit" }.to_string(),
            m_set: self.m_set.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
            sets: self.sets.len(),
            points: self.points.len(),
        }
    }

    /// Uniform list of catalog points lifting `p` to a maximal containing set:
    /// `A_Ω^γ = (1/|Γ̃|) Σ_{γ̃ ⊇ γ} A_{Ω̃}^{γ̃}`.
    pub fn lift_to_maximal(&self, p: &PhasePoint) -> Result<Vec<PhasePoint>> {
        if let Some(i) = self.set_position(&p.omega) {
            if self.points_of(i).iter().any(|q| q.gamma == p.gamma) {
                return Ok(vec![p.clone()]);
            }
        }
        let target = self
            .sets
            .iter()
            .position(|s| p.omega.is_subset_of(s))
            .ok_or_else(|| Error::Domain(format!("no catalog set contains {}", p.omega)))?;
        let checks: Vec<(PauliLabel, u8)> = p
            .valued_gens()
            .into_iter()
            .chain(p.valued_reps())
            .map(|v| (v.label, v.value))
            .collect();
        Ok(self
            .points_of(target)
            .iter()
            .filter(|q| checks.iter().all(|(l, v)| q.try_gamma(l) == Some(*v)))
            .cloned()
            .collect())
    }

    /// JSON export, one record per point.
    pub fn export_records(&self) -> Vec<PhasePointRecord> {
        self.points.iter().map(|p| p.to_record()).collect()
    }

    /// Binary cache: header, then per set its canonical generators and reps.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&[self.rebit as u8])?;
        w.write_all(&(self.m_set.len() as u32).to_le_bytes())?;
        for m in &self.m_set {
            w.write_all(&(*m as u32).to_le_bytes())?;
        }
        w.write_all(&(self.sets.len() as u64).to_le_bytes())?;
        for s in &self.sets {
            for list in [s.isotropic_gens(), s.reps()] {
                w.write_all(&(list.len() as u32).to_le_bytes())?;
                for a in list {
                    w.write_all(&a.x().to_le_bytes())?;
                    w.write_all(&a.z().to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        fn u32_of<R: Read>(r: &mut R) -> Result<u32> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            Ok(u32::from_le_bytes(b))
        }
        fn u64_of<R: Read>(r: &mut R) -> Result<u64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(u64::from_le_bytes(b))
        }
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Parse("not a catalog cache file".into()));
        }
        let version = u32_of(&mut r)?;
        if version != CACHE_VERSION {
            return Err(Error::Parse(format!("catalog cache version {version}, expected {CACHE_VERSION}")));
        }
        let n = u32_of(&mut r)? as usize;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let rebit = flag[0] == 1;
        let nm = u32_of(&mut r)? as usize;
        let m_set = (0..nm).map(|_| u32_of(&mut r).map(|m| m as usize)).collect::<Result<Vec<_>>>()?;
        let nsets = u64_of(&mut r)? as usize;
        let mut sets = Vec::with_capacity(nsets);
        for _ in 0..nsets {
            let mut lists = [Vec::new(), Vec::new()];
            for list in lists.iter_mut() {
                let len = u32_of(&mut r)? as usize;
                for _ in 0..len {
                    let x = u64_of(&mut r)?;
                    let z = u64_of(&mut r)?;
                    list.push(PauliLabel::new(n, x, z)?);
                }
            }
            sets.push(CncSet::new(n, &lists[0], &lists[1])?);
        }
        Ok(Catalog::from_sets(n, &m_set, rebit, sets))
    }
}

/// Enumerate the catalog for `n` qubits (or rebits) and the given `m` values.
///
/// Qubit mode uses the structural classification: for each isotropic subspace
/// of dimension `n - m`, every maximal pairwise-anticommuting `(2m+1)`-set in
/// its symplectic complement; `m = 0` means maximal isotropic subspaces.
/// Rebit mode searches all subsets of real labels.
pub fn enumerate_catalog(n: usize, m_set: &[usize], rebit: bool) -> Result<Catalog> {
    enumerate_catalog_with_cap(n, m_set, rebit, DEFAULT_QUBIT_CAP)
}

pub fn enumerate_catalog_with_cap(n: usize, m_set: &[usize], rebit: bool, cap: usize) -> Result<Catalog> {
    if n == 0 {
        return Err(Error::Domain("catalog needs at least one qubit".into()));
    }
    if let Some(&m) = m_set.iter().find(|&&m| m > n) {
        return Err(Error::Domain(format!("m = {m} exceeds n = {n}")));
    }
    if rebit {
        if n > REBIT_CAP {
            return Err(Error::ResourceCap(format!("rebit enumeration supports n <= {REBIT_CAP}, got {n}")));
        }
        return Ok(Catalog::from_sets(n, m_set, true, rebit_sets(n, m_set)?));
    }
    if n > cap {
        return Err(Error::ResourceCap(format!("qubit enumeration capped at n = {cap}, got {n}")));
    }
    let mut sets = Vec::new();
    for &m in m_set {
        sets.extend(qubit_sets(n, m));
    }
    Ok(Catalog::from_sets(n, m_set, false, sets))
}

/// Cached enumeration: reads `<dir>/catalog-...bin` if present, else builds and writes it.
pub fn load_or_enumerate(dir: Option<&Path>, n: usize, m_set: &[usize], rebit: bool) -> Result<Catalog> {
    let Some(dir) = dir else {
        return enumerate_catalog(n, m_set, rebit);
    };
    let path = cache_path(dir, n, m_set, rebit);
    if let Ok(f) = std::fs::File::open(&path) {
        if let Ok(cat) = Catalog::read_cache(std::io::BufReader::new(f)) {
            return Ok(cat);
        }
    }
    let cat = enumerate_catalog(n, m_set, rebit)?;
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    cat.write_cache(std::io::BufWriter::new(std::fs::File::create(&tmp)?))?;
    std::fs::rename(&tmp, &path)?;
    Ok(cat)
}

pub fn cache_path(dir: &Path, n: usize, m_set: &[usize], rebit: bool) -> PathBuf {
    let mut ms = m_set.to_vec();
    ms.sort_unstable();
    ms.dedup();
    let ms: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
    dir.join(format!(
        "catalog-v{CACHE_VERSION}-n{n}-m{}-{}.bin",
        ms.join("_"),
        if rebit { "rebit" } else { "qubit" }
    ))
}

/// All isotropic subspaces of dimension `k`, as canonical generator lists.
pub fn isotropic_subspaces(n: usize, k: usize) -> Vec<Vec<PauliLabel>> {
    let labels: Vec<PauliLabel> = PauliLabel::all(n).skip(1).collect();
    let mut level: Vec<Vec<PauliLabel>> = vec![Vec::new()];
    for _ in 0..k {
        let next: HashSet<Vec<PauliLabel>> = level
            .par_iter()
            .flat_map_iter(|gens| {
                labels
                    .iter()
                    .filter(|v| gens.iter().all(|g| !g.anticommutes(v)))
                    .filter_map(|v| {
                        let (r, _) = reduce_plain(gens, *v);
                        // Only extend by reduced coset members to limit duplicates.
                        if r != *v || r.is_identity() {
                            return None;
                        }
                        let mut basis = ValuedBasis::default();
                        for g in gens.iter().chain(std::iter::once(v)) {
                            basis.insert(Valued::new(*g, 0));
                        }
                        Some(basis.rows().iter().map(|x| x.label).collect::<Vec<_>>())
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut next: Vec<Vec<PauliLabel>> = next.into_iter().collect();
        next.sort();
        level = next;
    }
    level
}

/// Qubit sets of class `m` (`m = 0`: maximal isotropic; `m >= 1`: `ξ = 2m+1`).
fn qubit_sets(n: usize, m: usize) -> Vec<CncSet> {
    let subspaces = isotropic_subspaces(n, n - m);
    if m == 0 {
        return subspaces
            .into_iter()
            .map(|g| CncSet::from_canonical_parts(n, g, Vec::new()))
            .collect();
    }
    let labels: Vec<PauliLabel> = PauliLabel::all(n).skip(1).collect();
    subspaces
        .par_iter()
        .flat_map_iter(|gens| {
            let mut candidates: Vec<PauliLabel> = labels
                .iter()
                .copied()
                .filter(|v| gens.iter().all(|g| !g.anticommutes(v)))
                .filter(|v| {
                    let (r, _) = reduce_plain(gens, *v);
                    r == *v && !r.is_identity()
                })
                .collect();
            candidates.sort();
            let mut out = Vec::new();
            let mut stack = Vec::with_capacity(2 * m + 1);
            anticommuting_cliques(&candidates, 0, 2 * m + 1, &mut stack, &mut out);
            out.into_iter()
                .map(|reps| CncSet::from_canonical_parts(n, gens.clone(), reps))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Depth-first search for pairwise-anticommuting sets of exactly `size`
/// elements, extending only with later candidates (lexicographic pruning).
fn anticommuting_cliques(
    cand: &[PauliLabel],
    start: usize,
    size: usize,
    stack: &mut Vec<PauliLabel>,
    out: &mut Vec<Vec<PauliLabel>>,
) {
    if stack.len() == size {
        out.push(stack.clone());
        return;
    }
    let needed = size - stack.len();
    for i in start..cand.len() {
        if cand.len() - i < needed {
            break;
        }
        let c = cand[i];
        if stack.iter().all(|s| s.anticommutes(&c)) {
            stack.push(c);
            anticommuting_cliques(cand, i + 1, size, stack, out);
            stack.pop();
        }
    }
}

/// Rebit sets by exhaustive search over real labels.
///
/// `m = 0` selects real isotropic subspaces of full dimension `n`; `m >= 1`
/// selects inclusion-maximal real cnc sets whose isotropic part has
/// dimension `n - m`.
fn rebit_sets(n: usize, m_set: &[usize]) -> Result<Vec<CncSet>> {
    let real: Vec<PauliLabel> = PauliLabel::all(n).filter(|a| a.is_real()).collect();
    let family = all_cnc_subsets(n, &real)?;
    let mut out = BTreeSet::new();
    if m_set.contains(&0) {
        for s in &family {
            let set = structure_of(n, s)?;
            if set.is_isotropic() && set.isotropic_gens().len() == n {
                out.insert(set);
            }
        }
    }
    for s in maximal_sets(&family) {
        let set = structure_of(n, &s)?;
        if !set.is_isotropic() && m_set.contains(&set.m()) {
            out.insert(set);
        }
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_qubit_eight_states() {
        let c = enumerate_catalog(1, &[1], false).unwrap();
        assert_eq!(c.sets().len(), 1);
        assert_eq!(c.len(), 8);
    }

    #[test]
    fn isotropic_counts() {
        assert_eq!(isotropic_subspaces(2, 1).len(), 15);
        assert_eq!(isotropic_subspaces(2, 2).len(), 15);
        // Stabilizer groups on three qubits: 1080 states / 8 sign choices.
        assert_eq!(isotropic_subspaces(3, 3).len(), 135);
    }

    #[test]
    fn cache_roundtrip() {
        let c = enumerate_catalog(2, &[1, 2], false).unwrap();
        let mut buf = Vec::new();
        c.write_cache(&mut buf).unwrap();
        let d = Catalog::read_cache(&buf[..]).unwrap();
        assert_eq!(d.len(), c.len());
        assert_eq!(d.sets(), c.sets());
        assert!(Catalog::read_cache(&b"garbage!"[..]).is_err());
    }

    #[test]
    fn caps() {
        assert!(matches!(enumerate_catalog(5, &[1], false), Err(Error::ResourceCap(_))));
        assert!(matches!(enumerate_catalog(3, &[1], true), Err(Error::ResourceCap(_))));
    }
}
