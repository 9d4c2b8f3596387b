//! Weak simulation of Pauli-measurement programs on quasiprobability
//! representations, plus exact branch propagation for small cases.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedAliasIndex, Distribution};
use serde::{Deserialize, Serialize};

use crate::dynamics::{gamma_times_s_point, measure_update};
use crate::error::{Error, Result};
use crate::pauli::{PauliLabel, SignedPauli};
use crate::phase_space::{CncSet, PhasePoint, PhasePointRecord};

/// Threshold below which coefficients and probabilities count as zero.
pub const TOL_ZERO: f64 = 1e-10;

/// Default cap on live branch entries in [`exact_outcome_distribution`].
pub const DEFAULT_BRANCH_BUDGET: usize = 1 << 20;

/// Sparse signed distribution over phase points, `ρ = Σ W(α) A_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct WRep {
    n: usize,
    entries: BTreeMap<PhasePoint, f64>,
}

impl WRep {
    pub fn new(n: usize) -> Self {
        Self { n, entries: BTreeMap::new() }
    }

    pub fn point_mass(p: PhasePoint) -> Self {
        let n = p.n();
        let mut w = Self::new(n);
        w.entries.insert(p, 1.0);
        w
    }

    /// Sum duplicate points.
    pub fn from_entries<I: IntoIterator<Item = (PhasePoint, f64)>>(n: usize, it: I) -> Result<Self> {
        let mut w = Self::new(n);
        for (p, c) in it {
            w.add(p, c)?;
        }
        Ok(w)
    }

    pub fn add(&mut self, p: PhasePoint, c: f64) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch { left: p.n(), right: self.n });
        }
        *self.entries.entry(p).or_insert(0.0) += c;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<PhasePoint, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn one_norm(&self) -> f64 {
        self.entries.values().map(|c| c.abs()).sum()
    }

    pub fn is_positive(&self) -> bool {
        self.entries.values().all(|&c| c >= -TOL_ZERO)
    }

    /// Number of coefficients with `|c| > TOL_ZERO`.
    pub fn support_size(&self) -> usize {
        self.entries.values().filter(|c| c.abs() > TOL_ZERO).count()
    }

    /// Drop coefficients with `|c| ≤ tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self { n: self.n, entries: self.entries.iter().filter(|(_, c)| c.abs() > tol).map(|(p, c)| (p.clone(), *c)).collect() }
    }

    /// `Tr(ρ T_a) = Σ_α W(α) W̃_{T_a}(α)`.
    pub fn expectation(&self, a: &PauliLabel) -> f64 {
        self.entries.iter().map(|(p, c)| c * p.dual_value(a) as f64).sum()
    }

    pub fn to_record(&self) -> WRepRecord {
        WRepRecord {
            n: self.n,
            entries: self.entries.iter().map(|(p, c)| WRepEntry { point: p.to_record(), weight: *c }).collect(),
        }
    }

    pub fn from_record(rec: &WRepRecord) -> Result<Self> {
        Self::from_entries(
            rec.n,
            rec.entries.iter().map(|e| Ok((PhasePoint::from_record(rec.n, &e.point)?, e.weight))).collect::<Result<Vec<_>>>()?,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct WRepEntry {
    pub point: PhasePointRecord,
    pub weight: f64,
}

/// JSON form of a [`WRep`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct WRepRecord {
    pub n: usize,
    pub entries: Vec<WRepEntry>,
}

/// One program step: a fixed observable, or one chosen by the outcome history.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Measure(SignedPauli),
    /// Keys are outcome histories (`"01"`); `"*"` is a fallback.
    Adaptive(BTreeMap<String, SignedPauli>),
}

/// Ordered measurement sequence; a signed label `-T_a` reports flipped outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasurementProgram {
    pub steps: Vec<Step>,
}

impl MeasurementProgram {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    /// Non-adaptive program from label strings.
    pub fn fixed(labels: &[&str]) -> Result<Self> {
        Ok(Self { steps: labels.iter().map(|s| Ok(Step::Measure(s.parse()?))).collect::<Result<_>>()? })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Observable measured at `step` after outcomes `history`.
    pub fn label_for(&self, step: usize, history: &[u8]) -> Result<Option<SignedPauli>> {
        let Some(st) = self.steps.get(step) else {
            return Ok(None);
        };
        match st {
            Step::Measure(p) => Ok(Some(*p)),
            Step::Adaptive(map) => {
                let key: String = history.iter().map(|b| char::from(b'0' + b)).collect();
                map.get(&key)
                    .or_else(|| map.get("*"))
                    .copied()
                    .map(Some)
                    .ok_or_else(|| Error::Domain(format!("adaptive step {} has no entry for history '{key}'", step + 1)))
            }
        }
    }
}

/// Output of one sampled run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub outcomes: Vec<u8>,
    pub final_point: Option<PhasePoint>,
}

impl TrajectoryRecord {
    pub fn bits(&self) -> String {
        self.outcomes.iter().map(|b| char::from(b'0' + b)).collect()
    }
}

/// Alias table over a positive WRep, reusable across trajectories.
pub struct Sampler {
    points: Vec<PhasePoint>,
    alias: WeightedAliasIndex<f64>,
}

impl Sampler {
    pub fn new(w: &WRep) -> Result<Self> {
        if !w.is_positive() {
            return Err(Error::Precondition(
                "sampling needs a non-negative representation; use the decomposer (feasibility) to find one".into(),
            ));
        }
        let (points, weights): (Vec<PhasePoint>, Vec<f64>) =
            w.entries.iter().filter(|(_, c)| **c > 0.0).map(|(p, c)| (p.clone(), *c)).unzip();
        if points.is_empty() {
            return Err(Error::Precondition("empty representation".into()));
        }
        let alias = WeightedAliasIndex::new(weights).map_err(|e| Error::Precondition(format!("weights: {e}")))?;
        Ok(Self { points, alias })
    }

    /// Run the sampling algorithm once.
    pub fn run<R: Rng + ?Sized>(&self, prog: &MeasurementProgram, rng: &mut R) -> Result<(Vec<u8>, PhasePoint)> {
        let mut p = self.points[self.alias.sample(rng)].clone();
        let mut outcomes = Vec::with_capacity(prog.len());
        for step in 0..prog.len() {
            let sp = prog.label_for(step, &outcomes)?.expect("step in range");
            let a = sp.label;
            if a.n() != p.n() {
                return Err(Error::DimensionMismatch { left: a.n(), right: p.n() });
            }
            let t = match p.try_gamma(&a) {
                Some(v) => {
                    if rng.random::<bool>() {
                        p = p.shift_by(&a);
                    }
                    v
                }
                None => {
                    let t = rng.random::<bool>() as u8;
                    p = gamma_times_s_point(&p, &a, t)?;
                    t
                }
            };
            outcomes.push(t ^ sp.negative as u8);
        }
        Ok((outcomes, p))
    }
}

/// Seed of shot `index` in a run with base seed `base` (SplitMix64 mixing),
/// so each trajectory is reproducible on its own and independent of scheduling.
pub fn shot_seed(base: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(base ^ mix(index))
}

/// One trajectory from a fresh ChaCha8 stream seeded with `seed`.
pub fn sample_trajectory(w: &WRep, prog: &MeasurementProgram, seed: u64) -> Result<TrajectoryRecord> {
    let sampler = Sampler::new(w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (outcomes, p) = sampler.run(prog, &mut rng)?;
    Ok(TrajectoryRecord { seed, outcomes, final_point: Some(p) })
}

/// `p_a(s) = Σ W(α) (δ_{a∈Ω} δ_{s,γ(a)} + ½ δ_{a∉Ω})`.
pub fn born_probability(w: &WRep, a: &PauliLabel, s: u8) -> f64 {
    w.entries
        .iter()
        .map(|(p, c)| match p.try_gamma(a) {
            Some(v) if v == s & 1 => *c,
            Some(_) => 0.0,
            None => 0.5 * c,
        })
        .sum()
}

/// Unnormalized post-measurement representation `Σ W(α) P A_α P`.
fn project_wrep(w: &WRep, a: &PauliLabel, s: u8) -> Result<WRep> {
    let mut out = WRep::new(w.n);
    for (p, c) in &w.entries {
        let br = measure_update(p, a, s)?;
        if br.probability == 0.0 {
            continue;
        }
        for (q, wt) in br.successors {
            out.add(q, c * br.probability * wt)?;
        }
    }
    Ok(out)
}

/// Outcome probability and the normalized post-measurement representation.
pub fn propagate_wrep(w: &WRep, a: &PauliLabel, s: u8) -> Result<(f64, WRep)> {
    let prob = born_probability(w, a, s);
    if prob <= TOL_ZERO {
        return Err(Error::Domain(format!("outcome {s} of {a} has probability {prob:.3e}")));
    }
    let mut out = project_wrep(w, a, s)?;
    for c in out.entries.values_mut() {
        *c /= prob;
    }
    Ok((prob, out))
}

/// Exact joint outcome distribution by propagating all branches.
pub fn exact_outcome_distribution(w: &WRep, prog: &MeasurementProgram) -> Result<BTreeMap<String, f64>> {
    exact_outcome_distribution_with_budget(w, prog, DEFAULT_BRANCH_BUDGET)
}

pub fn exact_outcome_distribution_with_budget(
    w: &WRep,
    prog: &MeasurementProgram,
    budget: usize,
) -> Result<BTreeMap<String, f64>> {
    let mut level: BTreeMap<Vec<u8>, WRep> = BTreeMap::from([(Vec::new(), w.clone())]);
    for step in 0..prog.len() {
        let mut next: BTreeMap<Vec<u8>, WRep> = BTreeMap::new();
        let mut live = 0usize;
        for (hist, rep) in &level {
            let sp = prog.label_for(step, hist)?.expect("step in range");
            if sp.label.n() != w.n {
                return Err(Error::DimensionMismatch { left: sp.label.n(), right: w.n });
            }
            for t in 0..2u8 {
                let branch = project_wrep(rep, &sp.label, t)?;
                if branch.is_empty() {
                    continue;
                }
                live += branch.len();
                if live > budget {
                    return Err(Error::ResourceCap(format!("branch tree exceeds {budget} entries")));
                }
                let mut h = hist.clone();
                h.push(t ^ sp.negative as u8);
                next.insert(h, branch);
            }
        }
        level = next;
    }
    Ok(level
        .into_iter()
        .map(|(h, rep)| (h.iter().map(|b| char::from(b'0' + b)).collect(), rep.total()))
        .collect())
}

/// Context distribution `h_I(s) = |I∩Ω|/|I| · δ(s|_{I∩Ω} = γ|_{I∩Ω})`.
///
/// Keys are the value assignments `s` on `I`, given as points on `I`.
pub fn hvm_distribution(p: &PhasePoint, context: &CncSet) -> Result<BTreeMap<PhasePoint, f64>> {
    if !context.is_isotropic() {
        return Err(Error::Precondition(format!("context {context} is not isotropic")));
    }
    if context.n() != p.n() {
        return Err(Error::DimensionMismatch { left: context.n(), right: p.n() });
    }
    let k = context.isotropic_gens().len();
    if k > 16 {
        return Err(Error::ResourceCap(format!("context of dimension {k}")));
    }
    let ctx = Arc::new(context.clone());
    let shared: Vec<(PauliLabel, u8)> =
        context.elements().filter_map(|b| p.try_gamma(&b).map(|v| (b, v))).collect();
    let weight = shared.len() as f64 / context.size() as f64;
    let mut out = BTreeMap::new();
    for bits in 0u64..(1 << k) {
        let s = PhasePoint::new(ctx.clone(), crate::phase_space::ValueAssignment::new(bits, 0));
        if shared.iter().all(|(b, v)| s.try_gamma(b) == Some(*v)) {
            out.insert(s, weight);
        }
    }
    Ok(out)
}

/// Eight-state coefficients `Π_i (1 + (−1)^{γ_i} r_i)/2` on `Ω = {0, x, y, z}`.
pub fn eight_state_wrep(r: [f64; 3]) -> Result<WRep> {
    check_bloch(r)?;
    let labels: [PauliLabel; 3] = ["X".parse()?, "Y".parse()?, "Z".parse()?];
    let mut w = WRep::new(1);
    for bits in 0..8u8 {
        let g = [bits & 1, (bits >> 1) & 1, (bits >> 2) & 1];
        let c: f64 = (0..3).map(|i| (1.0 + if g[i] == 1 { -r[i] } else { r[i] }) / 2.0).product();
        if c != 0.0 {
            let reps: Vec<(PauliLabel, u8)> = (0..3).map(|i| (labels[i], g[i])).collect();
            w.add(PhasePoint::from_values(1, &[], &reps)?, c)?;
        }
    }
    Ok(w)
}

/// Expansion of a one-qubit state over the six stabilizer points,
/// `Σ_i |r_i| P_{sign r_i, i} + (1 − ‖r‖₁) I/2`; non-negative iff `‖r‖₁ ≤ 1`.
pub fn stabilizer_wrep_1q(r: [f64; 3]) -> Result<WRep> {
    check_bloch(r)?;
    let mut w = WRep::new(1);
    let l1: f64 = r.iter().map(|v| v.abs()).sum();
    for (i, l) in ["X", "Y", "Z"].iter().enumerate() {
        if r[i] != 0.0 {
            w.add(PhasePoint::from_values(1, &[(l.parse()?, (r[i] < 0.0) as u8)], &[])?, r[i].abs())?;
        }
    }
    if l1 != 1.0 {
        let z: PauliLabel = "Z".parse()?;
        w.add(PhasePoint::from_values(1, &[(z, 0)], &[])?, (1.0 - l1) / 2.0)?;
        w.add(PhasePoint::from_values(1, &[(z, 1)], &[])?, (1.0 - l1) / 2.0)?;
    }
    Ok(w.pruned(0.0))
}

fn check_bloch(r: [f64; 3]) -> Result<()> {
    let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm.is_nan() || norm > 1.0 + 1e-12 {
        return Err(Error::InvalidState(format!("Bloch vector {r:?} has length {norm} > 1")));
    }
    Ok(())
}

/// Representation of `ρ_1 ⊗ … ⊗ ρ_k ⊗ |stab⟩⟨stab|`.
///
/// The first qubit uses the Eight-state form; further qubits use
/// [`stabilizer_wrep_1q`] (non-negative only inside the octahedron) and the
/// stabilizer block is a point mass. Factors are joined with
/// [`PhasePoint::tensor`], which needs every later factor isotropic.
pub fn product_wrep(bloch: &[[f64; 3]], stab: Option<&PhasePoint>) -> Result<WRep> {
    let mut w: Option<WRep> = None;
    for (i, r) in bloch.iter().enumerate() {
        let f = if i == 0 { eight_state_wrep(*r)? } else { stabilizer_wrep_1q(*r)? };
        w = Some(match w {
            None => f,
            Some(acc) => tensor_wreps(&acc, &f)?,
        });
    }
    if let Some(s) = stab {
        let f = WRep::point_mass(s.clone());
        w = Some(match w {
            None => f,
            Some(acc) => tensor_wreps(&acc, &f)?,
        });
    }
    w.ok_or_else(|| Error::Parse("product_wrep needs at least one factor".into()))
}

/// `W_ρ ⊗ W_σ` with `W_σ` supported on isotropic points only.
pub fn tensor_wreps(w: &WRep, w0: &WRep) -> Result<WRep> {
    if let Some((p, _)) = w0.entries.iter().find(|(p, _)| !p.omega.is_isotropic()) {
        return Err(Error::Precondition(format!(
            "second factor must use only isotropic (m = 0 type) points; found {p}"
        )));
    }
    let mut out = WRep::new(w.n + w0.n);
    for (p, c) in &w.entries {
        for (q, d) in &w0.entries {
            out.add(p.tensor(q)?, c * d)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    fn zero_state() -> WRep {
        WRep::point_mass(PhasePoint::from_values(1, &[(p("Z"), 0)], &[]).unwrap())
    }

    #[test]
    fn born_on_zero() {
        let w = zero_state();
        assert_eq!(born_probability(&w, &p("Z"), 0), 1.0);
        assert_eq!(born_probability(&w, &p("X"), 1), 0.5);
    }

    #[test]
    fn repeated_x() {
        let prog = MeasurementProgram::fixed(&["X", "X"]).unwrap();
        let d = exact_outcome_distribution(&zero_state(), &prog).unwrap();
        assert_eq!(d.get("00"), Some(&0.5));
        assert_eq!(d.get("11"), Some(&0.5));
        assert!(d.get("01").copied().unwrap_or(0.0).abs() < 1e-15);
        let empty = exact_outcome_distribution(&zero_state(), &MeasurementProgram::default()).unwrap();
        assert_eq!(empty, BTreeMap::from([(String::new(), 1.0)]));
    }

    #[test]
    fn signed_measurement_flips() {
        let prog = MeasurementProgram::fixed(&["-Z"]).unwrap();
        let d = exact_outcome_distribution(&zero_state(), &prog).unwrap();
        assert_eq!(d.get("1"), Some(&1.0));
        let t = sample_trajectory(&zero_state(), &prog, 7).unwrap();
        assert_eq!(t.outcomes, vec![1]);
    }

    #[test]
    fn program_json() {
        let prog = MeasurementProgram::from_json(r#"[{"measure":"XZ"},{"adaptive":{"0":"ZZ","1":"-XX"}}]"#).unwrap();
        assert_eq!(prog.len(), 2);
        assert_eq!(prog.label_for(1, &[1]).unwrap().unwrap().to_string(), "-XX");
        assert!(prog.label_for(1, &[]).is_err());
        let back: MeasurementProgram = serde_json::from_str(&serde_json::to_string(&prog).unwrap()).unwrap();
        assert_eq!(back, prog);
    }

    #[test]
    fn negative_refused() {
        let mut w = zero_state();
        w.add(PhasePoint::from_values(1, &[(p("X"), 0)], &[]).unwrap(), -0.5).unwrap();
        assert!(matches!(Sampler::new(&w), Err(Error::Precondition(_))));
    }

    #[test]
    fn product_needs_isotropic_tail() {
        let e = eight_state_wrep([0.0; 3]).unwrap();
        assert!(tensor_wreps(&e, &e).is_err());
        assert_eq!(e.len(), 8);
        assert!((e.total() - 1.0).abs() < 1e-15);
    }
}
