use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cnc::{canonicalize, CncSet, Valued};
use crate::error::{Error, Result};
use crate::pauli::{beta_unchecked, PauliLabel};

/// Values of `γ` on the canonical generators (bit `i` of `iso`) and on the
/// canonical representatives (bit `k` of `reps`). Every other value follows
/// from `dγ = β` and `γ(0) = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ValueAssignment {
    pub iso: u64,
    pub reps: u128,
}

impl ValueAssignment {
    pub fn new(iso: u64, reps: u128) -> Self {
        Self { iso, reps }
    }

    #[inline]
    pub fn iso_bit(&self, i: usize) -> u8 {
        ((self.iso >> i) & 1) as u8
    }

    #[inline]
    pub fn rep_bit(&self, k: usize) -> u8 {
        ((self.reps >> k) & 1) as u8
    }

    /// Pointwise XOR; the difference of two assignments on the same set.
    pub fn xor(&self, other: &Self) -> Self {
        Self { iso: self.iso ^ other.iso, reps: self.reps ^ other.reps }
    }
}

/// A phase-space point `(Ω, γ)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PhasePoint {
    pub omega: Arc<CncSet>,
    pub gamma: ValueAssignment,
}

impl PhasePoint {
    pub fn new(omega: Arc<CncSet>, gamma: ValueAssignment) -> Self {
        Self { omega, gamma }
    }

    /// Build a point from explicit signed generators and representatives.
    /// Each entry pairs a label with its value `γ(label)`.
    pub fn from_values(n: usize, gens: &[(PauliLabel, u8)], reps: &[(PauliLabel, u8)]) -> Result<Self> {
        let g = gens.iter().map(|&(l, v)| Valued::new(l, v & 1)).collect();
        let r = reps.iter().map(|&(l, v)| Valued::new(l, v & 1)).collect();
        let (set, iso, reps) = canonicalize(n, g, r)?;
        Ok(Self { omega: Arc::new(set), gamma: ValueAssignment { iso, reps } })
    }

    /// Stabilizer-state point from signed stabilizer generators
    /// (`-ZZ` means the state is a `-1` eigenvector of `ZZ`).
    pub fn stabilizer(n: usize, gens: &[crate::pauli::SignedPauli]) -> Result<Self> {
        let g: Vec<(PauliLabel, u8)> = gens.iter().map(|s| (s.label, s.negative as u8)).collect();
        Self::from_values(n, &g, &[])
    }

    pub fn n(&self) -> usize {
        self.omega.n()
    }

    pub(crate) fn valued_gens(&self) -> Vec<Valued> {
        self.omega
            .isotropic_gens()
            .iter()
            .enumerate()
            .map(|(i, &l)| Valued::new(l, self.gamma.iso_bit(i)))
            .collect()
    }

    pub(crate) fn valued_reps(&self) -> Vec<Valued> {
        self.omega
            .reps()
            .iter()
            .enumerate()
            .map(|(k, &l)| Valued::new(l, self.gamma.rep_bit(k)))
            .collect()
    }

    /// `γ(a)` for `a ∈ Ω`, folding generator and representative values with
    /// `β` corrections along the decomposition of `a`.
    pub fn gamma_eval(&self, a: &PauliLabel) -> Result<u8> {
        self.try_gamma(a).ok_or_else(|| Error::NotMember(a.to_string()))
    }

    /// `γ(a)`, or `None` when `a ∉ Ω`.
    pub fn try_gamma(&self, a: &PauliLabel) -> Option<u8> {
        let mem = self.omega.contains(a)?;
        let gens = self.omega.isotropic_gens();
        let mut t = PauliLabel::identity(self.n());
        let mut val = 0u8;
        let mut mask = mem.gens_mask;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            val ^= self.gamma.iso_bit(i) ^ beta_unchecked(&t, &gens[i]);
            t = t ^ gens[i];
        }
        if let Some(k) = mem.coset {
            let rep = self.omega.reps()[k];
            val ^= self.gamma.rep_bit(k) ^ beta_unchecked(&rep, &t);
        }
        Some(val)
    }

    /// `(b, γ(b))` for every `b ∈ Ω`.
    pub fn signed_elements(&self) -> Vec<(PauliLabel, u8)> {
        self.omega
            .elements()
            .map(|b| {
                let v = self.try_gamma(&b).expect("element of its own set");
                (b, v)
            })
            .collect()
    }

    /// `γ + [a,·]`, applied to the stored values only.
    pub fn shift_by(&self, a: &PauliLabel) -> PhasePoint {
        let mut g = self.gamma;
        for (i, x) in self.omega.isotropic_gens().iter().enumerate() {
            if a.anticommutes(x) {
                g.iso ^= 1 << i;
            }
        }
        for (k, x) in self.omega.reps().iter().enumerate() {
            if a.anticommutes(x) {
                g.reps ^= 1 << k;
            }
        }
        PhasePoint { omega: self.omega.clone(), gamma: g }
    }

    /// Dual value `Tr(A_Ω^γ T_a)`: `(-1)^{γ(a)}` if `a ∈ Ω`, else 0.
    pub fn dual_value(&self, a: &PauliLabel) -> i8 {
        match self.try_gamma(a) {
            Some(0) => 1,
            Some(_) => -1,
            None => 0,
        }
    }

    /// The restriction of `γ` to a subset `sub ⊆ Ω`, as a point on `sub`.
    pub fn restrict_to(&self, sub: &CncSet) -> Result<PhasePoint> {
        let gens = sub
            .isotropic_gens()
            .iter()
            .map(|g| Ok((*g, self.gamma_eval(g)?)))
            .collect::<Result<Vec<_>>>()?;
        let reps = sub
            .reps()
            .iter()
            .map(|r| Ok((*r, self.gamma_eval(r)?)))
            .collect::<Result<Vec<_>>>()?;
        PhasePoint::from_values(sub.n(), &gens, &reps)
    }

    /// Signed expansion into isotropic points,
    /// `A_Ω^γ = Σ_k A_{I_k} - (ξ-1) A_Ĩ` with `I_k = ⟨a_k, Ĩ⟩`.
    pub fn stabilizer_mix(&self) -> Vec<(PhasePoint, f64)> {
        let xi = self.omega.xi();
        if xi == 0 {
            return vec![(self.clone(), 1.0)];
        }
        let gens = self.valued_gens();
        let mut out = Vec::with_capacity(xi + 1);
        for rep in self.valued_reps() {
            let mut g = gens.clone();
            g.push(rep);
            let (set, iso, reps) = canonicalize(self.n(), g, Vec::new()).expect("coset span is isotropic");
            out.push((PhasePoint { omega: Arc::new(set), gamma: ValueAssignment { iso, reps } }, 1.0));
        }
        let (set, iso, reps) = canonicalize(self.n(), gens, Vec::new()).expect("isotropic part");
        out.push((
            PhasePoint { omega: Arc::new(set), gamma: ValueAssignment { iso, reps } },
            -((xi - 1) as f64),
        ));
        out
    }

    /// Compose with an isotropic point on further qubits:
    /// `A_{Ω₁⊕Ĩ₂}^{γ₁+γ₂} = A_{Ω₁}^{γ₁} ⊗ A_{Ĩ₂}^{γ₂}`.
    pub fn tensor(&self, other: &PhasePoint) -> Result<PhasePoint> {
        if !other.omega.is_isotropic() {
            return Err(Error::Precondition(format!(
                "second tensor factor must be isotropic (m = 0 type), got {}",
                other.omega
            )));
        }
        let n1 = self.n();
        let n = n1 + other.n();
        let mut gens: Vec<(PauliLabel, u8)> = Vec::new();
        for v in self.valued_gens() {
            gens.push((v.label.embed(n, 0)?, v.value));
        }
        for v in other.valued_gens() {
            gens.push((v.label.embed(n, n1)?, v.value));
        }
        let reps = self
            .valued_reps()
            .into_iter()
            .map(|v| Ok((v.label.embed(n, 0)?, v.value)))
            .collect::<Result<Vec<_>>>()?;
        PhasePoint::from_values(n, &gens, &reps)
    }

    pub fn to_record(&self) -> PhasePointRecord {
        let mut gamma = BTreeMap::new();
        for v in self.valued_gens().into_iter().chain(self.valued_reps()) {
            gamma.insert(v.label.to_string(), v.value);
        }
        PhasePointRecord {
            isotropic_gens: self.omega.isotropic_gens().to_vec(),
            reps: self.omega.reps().to_vec(),
            gamma,
        }
    }

    pub fn from_record(n: usize, rec: &PhasePointRecord) -> Result<Self> {
        let lookup = |l: &PauliLabel| -> Result<u8> {
            rec.gamma
                .get(&l.to_string())
                .copied()
                .ok_or_else(|| Error::Parse(format!("missing gamma value for {l}")))
        };
        let gens = rec
            .isotropic_gens
            .iter()
            .map(|l| Ok((*l, lookup(l)?)))
            .collect::<Result<Vec<_>>>()?;
        let reps = rec.reps.iter().map(|l| Ok((*l, lookup(l)?))).collect::<Result<Vec<_>>>()?;
        Self::from_values(n, &gens, &reps)
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self
            .valued_gens()
            .iter()
            .map(|v| format!("{}{}", if v.value == 1 { "-" } else { "+" }, v.label))
            .collect();
        let reps: Vec<String> = self
            .valued_reps()
            .iter()
            .map(|v| format!("{}{}", if v.value == 1 { "-" } else { "+" }, v.label))
            .collect();
        write!(f, "<{}> + {{{}}}", gens.join(","), reps.join(","))
    }
}

/// JSON form of a point: generators, representatives and `γ` on both.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PhasePointRecord {
    pub isotropic_gens: Vec<PauliLabel>,
    pub reps: Vec<PauliLabel>,
    pub gamma: BTreeMap<String, u8>,
}

/// All value assignments on `Ω`: every bit pattern on the stored values.
pub fn gamma_set(omega: &CncSet) -> Vec<ValueAssignment> {
    let k = omega.isotropic_gens().len();
    let xi = omega.xi();
    let total = omega.gamma_count();
    (0..total)
        .map(|bits| ValueAssignment {
            iso: (bits & ((1u128 << k) - 1)) as u64,
            reps: (bits >> k) & ((1u128 << xi) - 1),
        })
        .collect()
}

/// All phase points on `Ω`.
pub fn points_on(omega: &Arc<CncSet>) -> Vec<PhasePoint> {
    gamma_set(omega).into_iter().map(|g| PhasePoint::new(omega.clone(), g)).collect()
}
