//! Phase-point updates under Pauli measurements and Clifford unitaries.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pauli::{PauliLabel, SignedPauli};
use crate::phase_space::{canonicalize, CncSet, PhasePoint, ValueAssignment, Valued};

/// Outcome weight and successor points for one measurement outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateBranch {
    pub probability: f64,
    pub successors: Vec<(PhasePoint, f64)>,
}

/// `Ω × a = Ω_a ∪ (a + Ω_a)` for `a ∉ Ω`, in canonical form.
pub fn omega_times_a(omega: &CncSet, a: &PauliLabel) -> Result<CncSet> {
    let p = PhasePoint::new(Arc::new(omega.clone()), ValueAssignment::default());
    Ok((*gamma_times_s_point(&p, a, 0)?.omega).clone())
}

/// `γ × s_a` on `Ω × a` for `a ∉ Ω`.
pub fn gamma_times_s(p: &PhasePoint, a: &PauliLabel, s: u8) -> Result<ValueAssignment> {
    Ok(gamma_times_s_point(p, a, s)?.gamma)
}

/// The successor point `(Ω × a, γ × s_a)`.
///
/// `Ω_a` keeps the generators commuting with `a` (anticommuting ones are
/// paired with one fixed anticommuting generator `g*`) and every coset, with
/// its representative shifted by `g*` when needed. Adding `a` with value
/// `s_a` to the isotropic part then yields `Ω × a`; values on `a + b` follow
/// from `γ(b) + s_a + β(a, b)` through the usual fold.
pub fn gamma_times_s_point(p: &PhasePoint, a: &PauliLabel, s: u8) -> Result<PhasePoint> {
    let n = p.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch { left: a.n(), right: n });
    }
    if p.omega.contains_label(a) {
        return Err(Error::Domain(format!("{a} lies in Ω; use the in-set update")));
    }
    let gens = p.valued_gens();
    let reps = p.valued_reps();
    let pivot = gens.iter().position(|g| g.label.anticommutes(a));
    let mut new_gens: Vec<Valued> = Vec::with_capacity(gens.len() + 1);
    let mut new_reps: Vec<Valued> = Vec::with_capacity(reps.len());
    match pivot {
        None => {
            new_gens.extend(gens.iter().copied());
            new_reps.extend(reps.iter().copied().filter(|r| !r.label.anticommutes(a)));
        }
        Some(k) => {
            let star = gens[k];
            for (i, g) in gens.iter().enumerate() {
                if i == k {
                    continue;
                }
                new_gens.push(if g.label.anticommutes(a) { g.combine(&star) } else { *g });
            }
            for r in &reps {
                new_reps.push(if r.label.anticommutes(a) { r.combine(&star) } else { *r });
            }
        }
    }
    new_gens.push(Valued::new(*a, s & 1));
    let (set, iso, reps) = canonicalize(n, new_gens, new_reps)?;
    Ok(PhasePoint::new(Arc::new(set), ValueAssignment { iso, reps }))
}

/// Effect of measuring `T_a` with outcome `s` on a single phase point.
///
/// `a ∈ Ω`: outcome `γ(a)` with certainty; successors `(Ω, γ)` and
/// `(Ω, γ + [a,·])` with weight ½ each. `a ∉ Ω`: either outcome with
/// probability ½, successor `(Ω × a, γ × s)`.
pub fn measure_update(p: &PhasePoint, a: &PauliLabel, s: u8) -> Result<UpdateBranch> {
    if a.n() != p.n() {
        return Err(Error::DimensionMismatch { left: a.n(), right: p.n() });
    }
    let s = s & 1;
    match p.try_gamma(a) {
        Some(v) => {
            if v != s {
                return Ok(UpdateBranch { probability: 0.0, successors: Vec::new() });
            }
            Ok(UpdateBranch { probability: 1.0, successors: vec![(p.clone(), 0.5), (p.shift_by(a), 0.5)] })
        }
        None => Ok(UpdateBranch { probability: 0.5, successors: vec![(gamma_times_s_point(p, a, s)?, 1.0)] }),
    }
}

/// Elementary Clifford gates; qubit indices are 0-based internally and
/// 1-based in text (`H 1`, `CX 1 2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    CX(usize, usize),
    CZ(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![q],
            Gate::CX(a, b) | Gate::CZ(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    /// `G P G†` for a signed Pauli.
    pub fn conjugate(&self, p: SignedPauli) -> SignedPauli {
        let n = p.label.n();
        let (mut x, mut z, mut neg) = (p.label.x(), p.label.z(), p.negative);
        let bit = |w: u64, q: usize| (w >> q) & 1 == 1;
        match *self {
            Gate::H(q) => {
                neg ^= bit(x, q) && bit(z, q);
                let (bx, bz) = (bit(x, q), bit(z, q));
                x = (x & !(1 << q)) | ((bz as u64) << q);
                z = (z & !(1 << q)) | ((bx as u64) << q);
            }
            Gate::S(q) => {
                neg ^= bit(x, q) && bit(z, q);
                z ^= x & (1 << q);
            }
            Gate::X(q) => neg ^= bit(z, q),
            Gate::Z(q) => neg ^= bit(x, q),
            Gate::Y(q) => neg ^= bit(x, q) ^ bit(z, q),
            Gate::CX(c, t) => {
                neg ^= bit(x, c) && bit(z, t) && !(bit(x, t) ^ bit(z, c));
                if bit(x, c) {
                    x ^= 1 << t;
                }
                if bit(z, t) {
                    z ^= 1 << c;
                }
            }
            Gate::CZ(a, b) => {
                let mut q = SignedPauli::new(PauliLabel::from_parts(n, x, z), neg);
                for g in [Gate::H(b), Gate::CX(a, b), Gate::H(b)] {
                    q = g.conjugate(q);
                }
                return q;
            }
            Gate::Swap(a, b) => {
                let swap = |w: u64| {
                    let (ba, bb) = ((w >> a) & 1, (w >> b) & 1);
                    (w & !(1 << a) & !(1 << b)) | (bb << a) | (ba << b)
                };
                x = swap(x);
                z = swap(z);
            }
        }
        SignedPauli::new(PauliLabel::from_parts(n, x, z), neg)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {}", q + 1),
            Gate::S(q) => write!(f, "S {}", q + 1),
            Gate::X(q) => write!(f, "X {}", q + 1),
            Gate::Y(q) => write!(f, "Y {}", q + 1),
            Gate::Z(q) => write!(f, "Z {}", q + 1),
            Gate::CX(a, b) => write!(f, "CX {} {}", a + 1, b + 1),
            Gate::CZ(a, b) => write!(f, "CZ {} {}", a + 1, b + 1),
            Gate::Swap(a, b) => write!(f, "SWAP {} {}", a + 1, b + 1),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let idx = |i: usize| -> Result<usize> {
            let t = toks.get(i).ok_or_else(|| Error::Parse(format!("missing qubit index in '{s}'")))?;
            let q: usize = t.parse().map_err(|_| Error::Parse(format!("bad qubit index '{t}'")))?;
            q.checked_sub(1).ok_or_else(|| Error::Parse("qubit indices are 1-based".into()))
        };
        let name = toks.first().ok_or_else(|| Error::Parse("empty gate line".into()))?.to_ascii_uppercase();
        let arity = match name.as_str() {
            "CX" | "CNOT" | "CZ" | "SWAP" => 2,
            _ => 1,
        };
        if toks.len() != arity + 1 {
            return Err(Error::Parse(format!("gate '{s}' expects {arity} qubit(s)")));
        }
        Ok(match name.as_str() {
            "H" => Gate::H(idx(1)?),
            "S" => Gate::S(idx(1)?),
            "X" => Gate::X(idx(1)?),
            "Y" => Gate::Y(idx(1)?),
            "Z" => Gate::Z(idx(1)?),
            "CX" | "CNOT" => Gate::CX(idx(1)?, idx(2)?),
            "CZ" => Gate::CZ(idx(1)?, idx(2)?),
            "SWAP" => Gate::Swap(idx(1)?, idx(2)?),
            other => return Err(Error::Parse(format!("unknown gate '{other}'"))),
        })
    }
}

/// Parse a gate list, one gate per line; blank lines and `#` comments are skipped.
pub fn parse_gates(text: &str) -> Result<Vec<Gate>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

/// Images `h X_j h†` and `h Z_j h†` of the single-qubit generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    x_images: Vec<SignedPauli>,
    z_images: Vec<SignedPauli>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let x_images = (0..n).map(|j| SignedPauli::new(PauliLabel::from_parts(n, 1 << j, 0), false)).collect();
        let z_images = (0..n).map(|j| SignedPauli::new(PauliLabel::from_parts(n, 0, 1 << j), false)).collect();
        Self { n, x_images, z_images }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, j: usize) -> SignedPauli {
        self.x_images[j]
    }

    pub fn z_image(&self, j: usize) -> SignedPauli {
        self.z_images[j]
    }

    /// Append a gate (applied after the current unitary).
    pub fn apply(&mut self, g: Gate) -> Result<()> {
        if let Some(q) = g.qubits().into_iter().find(|&q| q >= self.n) {
            return Err(Error::Domain(format!("gate {g:?} addresses qubit {} of {}", q + 1, self.n)));
        }
        let qs = g.qubits();
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Domain(format!("two-qubit gate {g} on a single qubit")));
        }
        for img in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            *img = g.conjugate(*img);
        }
        Ok(())
    }

    /// `h T_a h† = (-1)^{Φ_h(a)} T_{ha}`.
    pub fn conjugate(&self, a: &PauliLabel) -> SignedPauli {
        let mut acc = PauliLabel::identity(self.n);
        let mut phase = a.y_count() as u8 % 4;
        let mut mul = |img: &SignedPauli| {
            phase = (phase + 2 * img.negative as u8 + acc.product_phase(&img.label)) % 4;
            acc = acc ^ img.label;
        };
        for j in 0..self.n {
            if (a.x() >> j) & 1 == 1 {
                mul(&self.x_images[j]);
            }
        }
        for j in 0..self.n {
            if (a.z() >> j) & 1 == 1 {
                mul(&self.z_images[j]);
            }
        }
        debug_assert!(phase.is_multiple_of(2), "conjugation must preserve Hermiticity");
        SignedPauli::new(acc, phase == 2)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &CliffordTableau) -> CliffordTableau {
        let map = |img: &SignedPauli| {
            let c = next.conjugate(&img.label);
            SignedPauli::new(c.label, c.negative ^ img.negative)
        };
        CliffordTableau {
            n: self.n,
            x_images: self.x_images.iter().map(map).collect(),
            z_images: self.z_images.iter().map(map).collect(),
        }
    }

    /// The images preserve the symplectic form.
    pub fn is_symplectic(&self) -> bool {
        let imgs: Vec<(usize, PauliLabel)> = self
            .x_images
            .iter()
            .enumerate()
            .map(|(j, s)| (j, s.label))
            .chain(self.z_images.iter().enumerate().map(|(j, s)| (j + self.n, s.label)))
            .collect();
        imgs.iter().all(|(i, a)| {
            imgs.iter().all(|(k, b)| {
                let expected = (*i + self.n == *k) || (*k + self.n == *i);
                a.anticommutes(b) == expected
            })
        })
    }
}

pub fn clifford_from_gates(n: usize, gates: &[Gate]) -> Result<CliffordTableau> {
    let mut t = CliffordTableau::identity(n);
    for g in gates {
        t.apply(*g)?;
    }
    Ok(t)
}

/// `(hΩ, γ')` with `γ'(ha) = γ(a) + Φ_h(a)`, so that `A' = h A h†`.
pub fn clifford_act(h: &CliffordTableau, p: &PhasePoint) -> Result<PhasePoint> {
    if h.n() != p.n() {
        return Err(Error::DimensionMismatch { left: h.n(), right: p.n() });
    }
    let map = |v: Valued| {
        let img = h.conjugate(&v.label);
        Valued::new(img.label, v.value ^ img.negative as u8)
    };
    let gens = p.valued_gens().into_iter().map(map).collect();
    let reps = p.valued_reps().into_iter().map(map).collect();
    let (set, iso, reps) = canonicalize(p.n(), gens, reps)?;
    Ok(PhasePoint::new(Arc::new(set), ValueAssignment { iso, reps }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    #[test]
    fn omega_times_a_stabilizer_case() {
        let om = CncSet::isotropic(2, &[p("ZI"), p("IZ")]).unwrap();
        let out = omega_times_a(&om, &p("XI")).unwrap();
        assert_eq!(out, CncSet::isotropic(2, &[p("XI"), p("IZ")]).unwrap());
    }

    #[test]
    fn omega_times_a_rejects_members() {
        let om = CncSet::new(1, &[], &[p("X"), p("Y"), p("Z")]).unwrap();
        assert!(matches!(omega_times_a(&om, &p("Y")), Err(Error::Domain(_))));
    }

    #[test]
    fn mermin_type_a_update_by_outside_label() {
        // Rows ⟨XI, IX⟩ and ⟨ZZ, XX⟩... the type (a) set {ZZ} + {ZI, XX}.
        let om = CncSet::new(2, &[p("ZZ")], &[p("ZI"), p("XX")]).unwrap();
        let a = p("XI");
        assert!(!om.contains_label(&a));
        let out = omega_times_a(&om, &a).unwrap();
        // XI anticommutes with ZZ and ZI; survivors: XX (commutes) and ZI+ZZ = IZ... shifted.
        assert!(out.contains_label(&a));
        for b in out.elements() {
            assert!(crate::phase_space::brute_force_cnc_check(&out.elements().collect::<Vec<_>>())
                .unwrap()
                .is_cnc());
            let _ = b;
        }
    }

    #[test]
    fn value_on_a_is_outcome() {
        let pt = PhasePoint::from_values(2, &[(p("ZI"), 0), (p("IZ"), 0)], &[]).unwrap();
        for s in 0..2 {
            let q = gamma_times_s_point(&pt, &p("XI"), s).unwrap();
            assert_eq!(q.gamma_eval(&p("XI")).unwrap(), s);
            assert_eq!(q.gamma_eval(&p("IZ")).unwrap(), 0);
        }
    }

    #[test]
    fn eight_state_measure_z() {
        let pt = PhasePoint::from_values(1, &[], &[(p("X"), 0), (p("Y"), 1), (p("Z"), 0)]).unwrap();
        let b = measure_update(&pt, &p("Z"), 0).unwrap();
        assert_eq!(b.probability, 1.0);
        assert_eq!(b.successors.len(), 2);
        let flipped = &b.successors[1].0;
        assert_eq!(flipped.gamma_eval(&p("X")).unwrap(), 1);
        assert_eq!(flipped.gamma_eval(&p("Y")).unwrap(), 0);
        assert_eq!(flipped.gamma_eval(&p("Z")).unwrap(), 0);
        assert_eq!(measure_update(&pt, &p("Z"), 1).unwrap().probability, 0.0);
    }

    #[test]
    fn gate_parsing_and_tableaux() {
        let gates = parse_gates("H 1\n# comment\nCX 1 2\n\n").unwrap();
        assert_eq!(gates, vec![Gate::H(0), Gate::CX(0, 1)]);
        assert!(parse_gates("CX 1").is_err());
        assert!(clifford_from_gates(1, &[Gate::H(1)]).is_err());
        assert_eq!(clifford_from_gates(2, &[]).unwrap(), CliffordTableau::identity(2));

        let h = clifford_from_gates(1, &[Gate::H(0)]).unwrap();
        assert_eq!(h.x_image(0).to_string(), "+Z");
        assert_eq!(h.z_image(0).to_string(), "+X");

        let ss = clifford_from_gates(1, &[Gate::S(0), Gate::S(0)]).unwrap();
        assert_eq!(ss, clifford_from_gates(1, &[Gate::Z(0)]).unwrap());
        assert!(clifford_from_gates(3, &[Gate::H(0), Gate::CX(0, 2), Gate::S(1), Gate::CZ(1, 2)])
            .unwrap()
            .is_symplectic());
    }

    #[test]
    fn hadamards_on_stabilizer_point() {
        let pt = PhasePoint::from_values(2, &[(p("ZI"), 0), (p("IZ"), 0)], &[]).unwrap();
        let h = clifford_from_gates(2, &[Gate::H(0), Gate::H(1)]).unwrap();
        let out = clifford_act(&h, &pt).unwrap();
        assert_eq!(out, PhasePoint::from_values(2, &[(p("XI"), 0), (p("IX"), 0)], &[]).unwrap());
        assert_eq!(clifford_act(&CliffordTableau::identity(2), &pt).unwrap(), pt);
    }
}
