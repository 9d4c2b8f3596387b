//! Bit-level algebra of n-qubit Pauli labels.
//!
//! A label `a = (a_x, a_z)` stands for the Hermitian operator
//! `T_a = i^{a_x·a_z} X(a_x) Z(a_z)`, which is exactly the tensor product of
//! single-qubit `I, X, Y, Z` factors. Qubit `j` (0-based) lives in bit `j` of
//! both words; in text form qubit 1 is the leftmost character.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest qubit count a label can carry (bits live in one `u64` per half).
pub const MAX_QUBITS: usize = 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PauliLabel {
    n: u8,
    x: u64,
    z: u64,
}

#[inline]
fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliLabel {
    pub fn new(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        if (x | z) & !mask(n) != 0 {
            return Err(Error::Parse(format!("bits set beyond qubit {n}")));
        }
        Ok(Self { n: n as u8, x, z })
    }

    /// Caller guarantees `n <= MAX_QUBITS` and no stray bits.
    #[inline]
    pub(crate) fn from_parts(n: usize, x: u64, z: u64) -> Self {
        debug_assert!(n <= MAX_QUBITS && (x | z) & !mask(n) == 0);
        Self { n: n as u8, x, z }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts(n, 0, 0)
    }

    /// Single-qubit Pauli `p` (one of 'I','X','Y','Z') on qubit `q` (0-based).
    pub fn single(n: usize, q: usize, p: char) -> Result<Self> {
        if q >= n {
            return Err(Error::Parse(format!("qubit index {q} out of range for n = {n}")));
        }
        let (x, z) = match p.to_ascii_uppercase() {
            'I' => (0, 0),
            'X' => (1, 0),
            'Y' => (1, 1),
            'Z' => (0, 1),
            other => return Err(Error::Parse(format!("unknown Pauli '{other}'"))),
        };
        Self::new(n, x << q, z << q)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn x(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z(&self) -> u64 {
        self.z
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of `Y` factors; the exponent of `i` in the phase convention.
    #[inline]
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// True iff `T_a` has only real entries (even number of `Y` factors).
    #[inline]
    pub fn is_real(&self) -> bool {
        self.y_count().is_multiple_of(2)
    }

    /// `[a,b] = a_x·b_z + a_z·b_x mod 2`, unchecked.
    #[inline]
    pub fn anticommutes(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1 == 1
    }

    /// Exponent `k` (mod 4) with `T_a T_b = i^k T_{a+b}`; unchecked dimensions.
    #[inline]
    pub fn product_phase(&self, other: &Self) -> u8 {
        let pa = self.y_count() as i64;
        let pb = other.y_count() as i64;
        let pab = ((self.x ^ other.x) & (self.z ^ other.z)).count_ones() as i64;
        let cross = (self.z & other.x).count_ones() as i64;
        (pa + pb - pab + 2 * cross).rem_euclid(4) as u8
    }

    /// Embed into `n_total` qubits at qubit offset `offset`.
    pub fn embed(&self, n_total: usize, offset: usize) -> Result<Self> {
        if offset + self.n() > n_total {
            return Err(Error::DimensionMismatch { left: offset + self.n(), right: n_total });
        }
        Self::new(n_total, self.x << offset, self.z << offset)
    }

    /// Packed 128-bit form used by the GF(2) routines: x in the low word, z in the high word.
    #[inline]
    pub(crate) fn pack(&self) -> u128 {
        (self.x as u128) | ((self.z as u128) << 64)
    }

    #[inline]
    pub(crate) fn unpack(n: usize, v: u128) -> Self {
        Self::from_parts(n, v as u64, (v >> 64) as u64)
    }

    /// Dense index `x + 2^n z` into the `4^n` label list (identity at 0).
    pub fn index(&self) -> usize {
        debug_assert!(self.n() <= 31);
        (self.x as usize) | ((self.z as usize) << self.n())
    }

    pub fn from_index(n: usize, idx: usize) -> Self {
        let m = (1usize << n) - 1;
        Self::from_parts(n, (idx & m) as u64, ((idx >> n) & m) as u64)
    }

    /// All `4^n` labels in index order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliLabel> {
        (0..1usize << (2 * n)).map(move |i| Self::from_index(n, i))
    }

    pub fn char_at(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n(), right: other.n() });
        }
        Ok(())
    }
}

/// Symplectic product `[a,b]`; 0 iff `T_a` and `T_b` commute.
pub fn symplectic(a: &PauliLabel, b: &PauliLabel) -> Result<u8> {
    a.check_same(b)?;
    Ok(a.anticommutes(b) as u8)
}

/// `β(a,b)` with `T_a T_b = (-1)^β T_{a+b}` for commuting `a, b`.
pub fn beta(a: &PauliLabel, b: &PauliLabel) -> Result<u8> {
    a.check_same(b)?;
    if a.anticommutes(b) {
        return Err(Error::Anticommuting(a.to_string(), b.to_string()));
    }
    Ok(beta_unchecked(a, b))
}

/// `β` without the commutation check; only meaningful on commuting pairs.
#[inline]
pub(crate) fn beta_unchecked(a: &PauliLabel, b: &PauliLabel) -> u8 {
    let k = a.product_phase(b);
    debug_assert!(k.is_multiple_of(2), "beta on anticommuting pair");
    k >> 1
}

impl BitXor for PauliLabel {
    type Output = PauliLabel;

    #[inline]
    fn bitxor(self, rhs: Self) -> Self::Output {
        debug_assert_eq!(self.n, rhs.n);
        Self { n: self.n, x: self.x ^ rhs.x, z: self.z ^ rhs.z }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 {
            return f.write_str("");
        }
        for q in 0..self.n() {
            write!(f, "{}", self.char_at(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = s.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in s.chars().enumerate() {
            let (bx, bz) = match c.to_ascii_uppercase() {
                'I' | '_' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                other => return Err(Error::Parse(format!("unexpected character '{other}' in Pauli string"))),
            };
            x |= bx << q;
            z |= bz << q;
        }
        Ok(Self::from_parts(n, x, z))
    }
}

impl Serialize for PauliLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Pauli label with a sign bit: `(-1)^negative T_a`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SignedPauli {
    pub negative: bool,
    pub label: PauliLabel,
}

impl SignedPauli {
    pub fn new(label: PauliLabel, negative: bool) -> Self {
        Self { negative, label }
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { "-" } else { "+" }, self.label)
    }
}

impl FromStr for SignedPauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, rest) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        Ok(Self { negative, label: rest.parse()? })
    }
}

impl Serialize for SignedPauli {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignedPauli {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        let a = p("XZ");
        assert_eq!(a.n(), 2);
        assert_eq!(a.x(), 0b01);
        assert_eq!(a.z(), 0b10);
        assert_eq!(a.to_string(), "XZ");
        assert_eq!(p("iyZ").to_string(), "IYZ");
        assert!("XQ".parse::<PauliLabel>().is_err());
        let s: SignedPauli = "-ZZ".parse().unwrap();
        assert!(s.negative);
        assert_eq!(s.to_string(), "-ZZ");
    }

    #[test]
    fn symplectic_examples() {
        assert_eq!(symplectic(&p("X"), &p("Z")).unwrap(), 1);
        assert_eq!(symplectic(&p("XX"), &p("ZZ")).unwrap(), 0);
        for a in PauliLabel::all(2) {
            assert_eq!(symplectic(&a, &a).unwrap(), 0);
        }
        assert!(matches!(symplectic(&p("X"), &p("XZ")), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta(&p("XI"), &p("IZ")).unwrap(), 0);
        assert_eq!(beta(&p("XX"), &p("ZZ")).unwrap(), 1);
        for a in PauliLabel::all(2) {
            assert_eq!(beta(&a, &a).unwrap(), 0);
            assert_eq!(beta(&a, &PauliLabel::identity(2)).unwrap(), 0);
        }
        assert!(matches!(beta(&p("X"), &p("Z")), Err(Error::Anticommuting(..))));
    }

    #[test]
    fn real_labels() {
        assert!(!p("Y").is_real());
        assert!(p("YY").is_real());
        assert_eq!(PauliLabel::all(2).filter(|a| a.is_real()).count(), 10);
    }

    #[test]
    fn index_roundtrip() {
        for (i, a) in PauliLabel::all(3).enumerate() {
            assert_eq!(a.index(), i);
        }
        assert!(PauliLabel::from_index(2, 0).is_identity());
    }
}
