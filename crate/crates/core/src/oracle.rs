//! Dense-matrix reference implementation for small `n`.
//!
//! Deliberately naive: every operator is a full `2^n × 2^n` complex matrix.
//! Basis index bit `n-1-q` holds qubit `q` (qubit 1 is the most significant
//! bit), so `"XZ"` is `X ⊗ Z` in the usual Kronecker order.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::Gate;
use crate::error::{Error, Result};
use crate::pauli::{PauliLabel, SignedPauli};
use crate::phase_space::PhasePoint;
use crate::simulator::{MeasurementProgram, WRep};

/// Largest qubit count the oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 4;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

fn check_cap(n: usize) -> Result<()> {
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::ResourceCap(format!("dense oracle limited to {ORACLE_MAX_QUBITS} qubits, got {n}")));
    }
    Ok(())
}

/// Label bits (bit `q` = qubit `q`) to basis-index bits.
fn to_index_mask(n: usize, w: u64) -> usize {
    (0..n).filter(|q| (w >> q) & 1 == 1).fold(0, |acc, q| acc | (1 << (n - 1 - q)))
}

/// A `2^n × 2^n` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    mat: DMatrix<C>,
}

impl DenseOperator {
    pub fn new(n: usize, mat: DMatrix<C>) -> Result<Self> {
        check_cap(n)?;
        let d = 1 << n;
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Parse(format!("expected a {d}×{d} matrix, got {}×{}", mat.nrows(), mat.ncols())));
        }
        Ok(Self { n, mat })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_cap(n)?;
        Ok(Self { n, mat: DMatrix::zeros(1 << n, 1 << n) })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_cap(n)?;
        Ok(Self { n, mat: DMatrix::identity(1 << n, 1 << n) })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn from_ket(n: usize, psi: &[C]) -> Result<Self> {
        check_cap(n)?;
        if psi.len() != 1 << n {
            return Err(Error::Parse(format!("state vector of length {} for {n} qubits", psi.len())));
        }
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(psi.len(), psi.iter().map(|c| c / norm.sqrt()));
        Ok(Self { n, mat: &v * v.adjoint() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn trace(&self) -> C {
        self.mat.trace()
    }

    pub fn dagger(&self) -> Self {
        Self { n: self.n, mat: self.mat.adjoint() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { n: self.n, mat: &self.mat * &other.mat }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { n: self.n, mat: &self.mat + &other.mat }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { n: self.n, mat: &self.mat * C::new(c, 0.0) }
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        check_cap(self.n + other.n)?;
        Ok(Self { n: self.n + other.n, mat: self.mat.kronecker(&other.mat) })
    }

    /// Entrywise max-norm distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.mat - self.mat.adjoint()).iter().all(|c| c.norm() <= tol)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.mat + self.mat.adjoint()) * C::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Hermitian, unit trace, spectrum ≥ −tol.
    pub fn check_state(&self, tol: f64) -> Result<()> {
        if !self.is_hermitian(tol) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol.max(1e-9) || tr.im.abs() > tol.max(1e-9) {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let ev = self.eigenvalues();
        if ev.first().is_some_and(|&e| e < -tol) {
            return Err(Error::InvalidState(format!("negative eigenvalue; spectrum {ev:?}")));
        }
        Ok(())
    }

    /// `Tr(ρ T_a)`, real part.
    pub fn expectation(&self, a: &PauliLabel) -> f64 {
        let n = self.n;
        let xm = to_index_mask(n, a.x());
        let zm = to_index_mask(n, a.z());
        let ph = I.powu(a.y_count() % 4);
        // Tr(ρ T) = Σ_k ⟨k|ρ T|k⟩ = Σ_k ρ[k, k^xm] · T[k^xm, k].
        let mut acc = ZERO;
        for k in 0..self.dim() {
            let sign = if (zm & k).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            acc += self.mat[(k, k ^ xm)] * ph * sign;
        }
        acc.re
    }

    /// `Tr(ρ T_a)` for every label, indexed by [`PauliLabel::index`].
    pub fn expectation_vector(&self) -> Vec<f64> {
        PauliLabel::all(self.n).map(|a| self.expectation(&a)).collect()
    }

    /// `ρ = 2^{-n} Σ_a b_a T_a`.
    pub fn from_expectations(n: usize, values: &[f64]) -> Result<Self> {
        check_cap(n)?;
        if values.len() != 1 << (2 * n) {
            return Err(Error::Parse(format!("expected {} expectation values, got {}", 1 << (2 * n), values.len())));
        }
        let mut out = Self::zeros(n)?;
        for (a, &v) in PauliLabel::all(n).zip(values) {
            if v != 0.0 {
                out.mat += pauli_matrix(&a)?.mat * C::new(v / (1 << n) as f64, 0.0);
            }
        }
        Ok(out)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self { n: self.n, mat: &u.mat * &self.mat * u.mat.adjoint() }
    }

    /// `P_a(s) ρ P_a(s)`, unnormalized.
    pub fn project(&self, a: &PauliLabel, s: u8) -> Result<Self> {
        let p = projector(a, s)?;
        Ok(Self { n: self.n, mat: &p.mat * &self.mat * &p.mat })
    }
}

/// `T_a = i^{a_x·a_z} X(a_x) Z(a_z)`.
pub fn pauli_matrix(a: &PauliLabel) -> Result<DenseOperator> {
    let n = a.n();
    check_cap(n)?;
    let d = 1 << n;
    let xm = to_index_mask(n, a.x());
    let zm = to_index_mask(n, a.z());
    let ph = I.powu(a.y_count() % 4);
    let mut mat = DMatrix::zeros(d, d);
    for k in 0..d {
        let sign = if (zm & k).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        mat[(k ^ xm, k)] = ph * sign;
    }
    Ok(DenseOperator { n, mat })
}

/// `(−1)^{negative} T_a`.
pub fn signed_pauli_matrix(p: &SignedPauli) -> Result<DenseOperator> {
    let m = pauli_matrix(&p.label)?;
    Ok(if p.negative { m.scale(-1.0) } else { m })
}

/// `P_a(s) = (I + (−1)^s T_a) / 2`.
pub fn projector(a: &PauliLabel, s: u8) -> Result<DenseOperator> {
    let t = pauli_matrix(a)?;
    let sign = if s & 1 == 1 { -0.5 } else { 0.5 };
    Ok(DenseOperator::identity(a.n())?.scale(0.5).add(&t.scale(sign)))
}

/// `A_Ω^γ = 2^{-n} Σ_{b∈Ω} (−1)^{γ(b)} T_b`.
pub fn phase_point_matrix(p: &PhasePoint) -> Result<DenseOperator> {
    let n = p.n();
    check_cap(n)?;
    let mut out = DenseOperator::zeros(n)?;
    let w = 1.0 / (1 << n) as f64;
    for (b, g) in p.signed_elements() {
        let t = pauli_matrix(&b)?;
        out.mat += t.mat * C::new(if g == 1 { -w } else { w }, 0.0);
    }
    Ok(out)
}

/// `Σ_α W(α) A_α`.
pub fn wrep_matrix(w: &WRep) -> Result<DenseOperator> {
    let mut out = DenseOperator::zeros(w.n())?;
    for (p, &c) in w.entries() {
        out.mat += phase_point_matrix(p)?.mat * C::new(c, 0.0);
    }
    Ok(out)
}

/// Exact joint outcome distribution by projector chains; keys are outcome bit strings.
pub fn dense_sequence_distribution(rho: &DenseOperator, prog: &MeasurementProgram) -> Result<BTreeMap<String, f64>> {
    check_cap(rho.n())?;
    if prog.len() > 10 {
        return Err(Error::ResourceCap(format!("dense programs limited to 10 steps, got {}", prog.len())));
    }
    let mut branches: Vec<(Vec<u8>, DenseOperator)> = vec![(Vec::new(), rho.clone())];
    for step in 0..prog.len() {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (hist, r) in branches {
            let Some(sp) = prog.label_for(step, &hist)? else {
                continue;
            };
            if sp.label.n() != rho.n() {
                return Err(Error::DimensionMismatch { left: sp.label.n(), right: rho.n() });
            }
            for s in 0..2u8 {
                // Outcome s of −T_a is outcome s⊕1 of T_a.
                let post = r.project(&sp.label, s ^ sp.negative as u8)?;
                if post.trace().re > 1e-14 {
                    let mut h = hist.clone();
                    h.push(s);
                    next.push((h, post));
                }
            }
        }
        branches = next;
    }
    Ok(branches
        .into_iter()
        .map(|(h, r)| (h.iter().map(|b| char::from(b'0' + b)).collect(), r.trace().re))
        .collect())
}

/// Single-qubit density matrix from a Bloch vector.
pub fn bloch_state(r: [f64; 3]) -> Result<DenseOperator> {
    let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 + 1e-12 {
        return Err(Error::InvalidState(format!("Bloch vector of length {norm} > 1")));
    }
    let mut m = DenseOperator::identity(1)?.scale(0.5);
    for (c, l) in r.iter().zip(["X", "Y", "Z"]) {
        m = m.add(&pauli_matrix(&l.parse()?)?.scale(c / 2.0));
    }
    Ok(m)
}

/// `(|0⟩ + e^{−iφ}|1⟩)/√2`.
pub fn h_phi_state(phi: f64) -> DenseOperator {
    DenseOperator::from_ket(1, &[ONE, C::from_polar(1.0, -phi)]).expect("one qubit")
}

/// `|H⟩`: Bloch vector `(1, 1, 0)/√2`.
pub fn h_state() -> DenseOperator {
    h_phi_state(-PI / 4.0)
}

/// `|T⟩`: Bloch vector `(1, 1, 1)/√3`.
pub fn t_state() -> DenseOperator {
    let s = 1.0 / 3f64.sqrt();
    bloch_state([s, s, s]).expect("unit Bloch vector")
}

/// Three-qubit SIC fiducial `∝ (−1+2i, 1, 1, 1, 1, 1, 1, 1)`.
pub fn hoggar_state() -> DenseOperator {
    let mut v = vec![ONE; 8];
    v[0] = C::new(-1.0, 2.0);
    DenseOperator::from_ket(3, &v).expect("three qubits")
}

/// `I / 2^n`.
pub fn mixed_state(n: usize) -> Result<DenseOperator> {
    Ok(DenseOperator::identity(n)?.scale(1.0 / (1 << n) as f64))
}

/// `ρ(x, y) = I/4 + x(XX + ZZ − YY) + y(ZI + IZ)`; checked for positivity.
pub fn rho_xy(x: f64, y: f64) -> Result<DenseOperator> {
    let m = rho_xy_unchecked(x, y);
    m.check_state(1e-12)?;
    Ok(m)
}

/// `ρ(x, y)` without the positivity check (for scanning a grid).
pub fn rho_xy_unchecked(x: f64, y: f64) -> DenseOperator {
    let t = |s: &str| pauli_matrix(&s.parse().expect("label")).expect("two qubits");
    DenseOperator::identity(2)
        .expect("two qubits")
        .scale(0.25)
        .add(&t("XX").add(&t("ZZ")).add(&t("YY").scale(-1.0)).scale(x))
        .add(&t("ZI").add(&t("IZ")).scale(y))
}

/// Stabilizer state `Π_i (I + g_i)/2` for `n` independent commuting signed generators.
pub fn stabilizer_state(gens: &[SignedPauli]) -> Result<DenseOperator> {
    let n = gens.first().map(|g| g.label.n()).ok_or_else(|| Error::Parse("no stabilizer generators".into()))?;
    let mut m = DenseOperator::identity(n)?;
    for g in gens {
        let p = projector(&g.label, g.negative as u8)?;
        m = m.mul(&p);
    }
    let tr = m.trace().re;
    if tr < 0.5 {
        return Err(Error::InvalidState("stabilizer generators are inconsistent".into()));
    }
    Ok(m.scale(1.0 / tr))
}

/// Parse a named state.
///
/// Grammar: `base` or `base^k`, where `base` is one of `H`, `T`, `H(phi=φ)`
/// (also `H(φ)`), `hoggar`, `mixed`, `mixed(n=k)`, `rho(x=…,y=…)`,
/// `bloch(x,y,z)` or `stab:<signed generators, comma separated>`.
pub fn named_state(spec: &str) -> Result<DenseOperator> {
    let spec = spec.trim();
    let (base, power) = match spec.rsplit_once('^') {
        Some((b, k)) => {
            let k: usize = k.trim().parse().map_err(|_| Error::Parse(format!("bad tensor power in '{spec}'")))?;
            if k == 0 {
                return Err(Error::Parse("tensor power must be positive".into()));
            }
            (b.trim(), k)
        }
        _ => (spec, 1),
    };
    let one = named_base(base)?;
    let mut out = one.clone();
    for _ in 1..power {
        out = out.kron(&one)?;
    }
    Ok(out)
}

fn parse_args(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (i, part) in s.split(',').map(str::trim).filter(|p| !p.is_empty()).enumerate() {
        let (k, v) = match part.split_once('=') {
            Some((k, v)) => (k.trim().to_string(), v.trim()),
            None => (format!("#{i}"), part),
        };
        let v = parse_real(v)?;
        out.insert(k, v);
    }
    Ok(out)
}

/// A real number, also accepting `pi`, `k*pi`, `pi/k`, `k*pi/m`.
fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim().to_ascii_lowercase();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::Parse(format!("cannot parse number '{s}'"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim().to_string(), b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s.clone(), 1.0),
    };
    let coeff = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some("-") => -1.0,
        Some(c) => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(coeff * PI / den)
}

fn named_base(base: &str) -> Result<DenseOperator> {
    if let Some(gens) = base.strip_prefix("stab:") {
        let g = gens.split(',').map(|s| s.trim().parse::<SignedPauli>()).collect::<Result<Vec<_>>>()?;
        return stabilizer_state(&g);
    }
    let (name, args) = match base.split_once('(') {
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("unbalanced parentheses in '{base}'")))?;
            (name.trim().to_ascii_lowercase(), parse_args(inner)?)
        }
        None => (base.to_ascii_lowercase(), BTreeMap::new()),
    };
    let arg = |k: &str, pos: usize| args.get(k).or_else(|| args.get(&format!("#{pos}"))).copied();
    match name.as_str() {
        "h" if args.is_empty() => Ok(h_state()),
        "h" => Ok(h_phi_state(arg("phi", 0).ok_or_else(|| Error::Parse("H(...) needs phi".into()))?)),
        "t" => Ok(t_state()),
        "hoggar" => Ok(hoggar_state()),
        "mixed" => mixed_state(arg("n", 0).map_or(1, |v| v as usize)),
        "zero" => bloch_state([0.0, 0.0, 1.0]),
        "rho" => rho_xy(
            arg("x", 0).ok_or_else(|| Error::Parse("rho(...) needs x".into()))?,
            arg("y", 1).ok_or_else(|| Error::Parse("rho(...) needs y".into()))?,
        ),
        "bloch" => {
            let r = [0, 1, 2].map(|i| arg(["x", "y", "z"][i], i));
            match r {
                [Some(x), Some(y), Some(z)] => bloch_state([x, y, z]),
                _ => Err(Error::Parse("bloch(...) needs three components".into())),
            }
        }
        other => Err(Error::Parse(format!("unknown named state '{other}'"))),
    }
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C {
    C::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Hilbert–Schmidt random mixed state: `G G† / Tr(G G†)` for a square Ginibre `G`.
pub fn random_hs_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DenseOperator> {
    check_cap(n)?;
    let d = 1 << n;
    let g = DMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DenseOperator { n, mat: m / C::new(tr, 0.0) })
}

/// Fubini–Study random pure state: normalized complex Gaussian vector.
pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DenseOperator> {
    check_cap(n)?;
    let v: Vec<C> = (0..1 << n).map(|_| gaussian_complex(rng)).collect();
    DenseOperator::from_ket(n, &v)
}

/// Unitary of one gate on `n` qubits.
pub fn gate_unitary(g: &Gate, n: usize) -> Result<DenseOperator> {
    check_cap(n)?;
    let d = 1usize << n;
    let bit = |k: usize, q: usize| (k >> (n - 1 - q)) & 1;
    let flip = |k: usize, q: usize| k ^ (1 << (n - 1 - q));
    let check = |q: usize| {
        if q >= n {
            Err(Error::Domain(format!("qubit {} out of range", q + 1)))
        } else {
            Ok(())
        }
    };
    let mut mat = DMatrix::zeros(d, d);
    let r = 1.0 / 2f64.sqrt();
    match *g {
        Gate::H(q) => {
            check(q)?;
            for k in 0..d {
                let b = bit(k, q);
                mat[(k & !(1 << (n - 1 - q)), k)] += C::new(r, 0.0);
                mat[(k | (1 << (n - 1 - q)), k)] += C::new(if b == 1 { -r } else { r }, 0.0);
            }
        }
        Gate::S(q) => {
            check(q)?;
            for k in 0..d {
                mat[(k, k)] = if bit(k, q) == 1 { I } else { ONE };
            }
        }
        Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
            check(q)?;
            let l = match g {
                Gate::X(_) => 'X',
                Gate::Y(_) => 'Y',
                _ => 'Z',
            };
            return pauli_matrix(&PauliLabel::single(n, q, l)?);
        }
        Gate::CX(c, t) => {
            check(c)?;
            check(t)?;
            for k in 0..d {
                let j = if bit(k, c) == 1 { flip(k, t) } else { k };
                mat[(j, k)] = ONE;
            }
        }
        Gate::CZ(a, b) => {
            check(a)?;
            check(b)?;
            for k in 0..d {
                mat[(k, k)] = if bit(k, a) & bit(k, b) == 1 { -ONE } else { ONE };
            }
        }
        Gate::Swap(a, b) => {
            check(a)?;
            check(b)?;
            for k in 0..d {
                let j = if bit(k, a) != bit(k, b) { flip(flip(k, a), b) } else { k };
                mat[(j, k)] = ONE;
            }
        }
    }
    Ok(DenseOperator { n, mat })
}

/// Unitary of a gate sequence applied left to right.
pub fn circuit_unitary(n: usize, gates: &[Gate]) -> Result<DenseOperator> {
    let mut u = DenseOperator::identity(n)?;
    for g in gates {
        u = gate_unitary(g, n)?.mul(&u);
    }
    Ok(u)
}

/// Golden-file form: row-major `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GoldenMatrix {
    pub name: String,
    pub n: usize,
    pub data: Vec<[f64; 2]>,
}

impl GoldenMatrix {
    pub fn from_operator(name: &str, op: &DenseOperator) -> Self {
        let d = op.dim();
        let data = (0..d).flat_map(|r| (0..d).map(move |c| (r, c))).map(|(r, c)| [op.mat[(r, c)].re, op.mat[(r, c)].im]).collect();
        Self { name: name.to_string(), n: op.n, data }
    }

    pub fn to_operator(&self) -> Result<DenseOperator> {
        let d = 1usize << self.n;
        if self.data.len() != d * d {
            return Err(Error::Parse(format!("golden '{}' has {} entries, expected {}", self.name, self.data.len(), d * d)));
        }
        DenseOperator::new(self.n, DMatrix::from_row_iterator(d, d, self.data.iter().map(|[re, im]| C::new(*re, *im))))
    }
}

/// The frozen reference set regenerated by the `oracle` subcommand.
pub fn golden_suite() -> Result<Vec<GoldenMatrix>> {
    let mut out = Vec::new();
    for l in ["X", "Y", "Z", "XZ", "YY", "ZX", "XYZ"] {
        out.push(GoldenMatrix::from_operator(&format!("pauli_{l}"), &pauli_matrix(&l.parse()?)?));
    }
    let eight = PhasePoint::from_values(1, &[], &[("X".parse()?, 0), ("Y".parse()?, 0), ("Z".parse()?, 0)])?;
    out.push(GoldenMatrix::from_operator("phase_point_eight_state_000", &phase_point_matrix(&eight)?));
    let mermin_a = PhasePoint::from_values(2, &[("ZZ".parse()?, 0)], &[("ZI".parse()?, 1), ("XX".parse()?, 0)])?;
    out.push(GoldenMatrix::from_operator("phase_point_zz_zi_xx", &phase_point_matrix(&mermin_a)?));
    out.push(GoldenMatrix::from_operator("state_H", &h_state()));
    out.push(GoldenMatrix::from_operator("state_T", &t_state()));
    out.push(GoldenMatrix::from_operator("state_hoggar", &hoggar_state()));
    out.push(GoldenMatrix::from_operator("state_stab_XX_ZZ", &named_state("stab:+XX,+ZZ")?));
    out.push(GoldenMatrix::from_operator("projector_XZ_1", &projector(&"XZ".parse()?, 1)?));
    out.push(GoldenMatrix::from_operator("gate_CX_1_2", &gate_unitary(&Gate::CX(0, 1), 2)?));
    Ok(out)
}

/// Write every golden matrix as `<dir>/<name>.json`.
pub fn write_goldens(dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for g in golden_suite()? {
        let path = dir.join(format!("{}.json", g.name));
        std::fs::write(&path, serde_json::to_string_pretty(&g)?)?;
        names.push(g.name);
    }
    Ok(names)
}

pub fn read_golden(path: &Path) -> Result<GoldenMatrix> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    #[test]
    fn y_is_standard() {
        let y = pauli_matrix(&p("Y")).unwrap();
        assert_eq!(y.matrix()[(0, 1)], C::new(0.0, -1.0));
        assert_eq!(y.matrix()[(1, 0)], C::new(0.0, 1.0));
    }

    #[test]
    fn kron_order() {
        let xz = pauli_matrix(&p("XZ")).unwrap();
        let k = pauli_matrix(&p("X")).unwrap().kron(&pauli_matrix(&p("Z")).unwrap()).unwrap();
        assert!(xz.max_abs_diff(&k) < 1e-15);
    }

    #[test]
    fn h_of_pi_is_minus() {
        let m = h_phi_state(PI);
        assert!((m.expectation(&p("X")) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn named_parsing() {
        assert_eq!(named_state("H^2").unwrap().n(), 2);
        assert_eq!(named_state("mixed(n=3)").unwrap().n(), 3);
        assert!(named_state("rho(0,0)").unwrap().max_abs_diff(&mixed_state(2).unwrap()) < 1e-15);
        assert!(named_state("rho(x=0.5,y=0.5)").is_err());
        let h = named_state("H(phi=-pi/4)").unwrap();
        assert!(h.max_abs_diff(&h_state()) < 1e-12);
        assert!(named_state("stab:+ZZ,-XX").unwrap().check_state(1e-12).is_ok());
        assert!(named_state("nope").is_err());
    }

    #[test]
    fn cap() {
        assert!(matches!(DenseOperator::identity(5), Err(Error::ResourceCap(_))));
    }
}
