//! Self-check suites behind `cncsim verify`.

use std::time::Instant;

use serde::Serialize;

use crate::decomposer::{robustness, robustness_of_magic, ExpectationVector};
use crate::dynamics::measure_update;
use crate::error::Result;
use crate::oracle::{named_state, phase_point_matrix, DenseOperator};
use crate::pauli::{beta, PauliLabel};
use crate::phase_space::{enumerate_catalog, Catalog};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
    Lp,
}

impl std::str::FromStr for Level {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            "lp" => Ok(Level::Lp),
            other => Err(crate::error::Error::Parse(format!("unknown verification level '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn timed(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult { name: name.to_string(), passed, detail, seconds: t.elapsed().as_secs_f64() }
}

/// Symmetry, `β(a,b) = β(a,a+b)` and the cocycle identity, exhaustively for `n ≤ 2`.
pub fn check_beta_identities(n: usize) -> Result<(bool, String)> {
    let labels: Vec<PauliLabel> = PauliLabel::all(n).collect();
    let mut cases = 0usize;
    for a in &labels {
        for b in &labels {
            if a.anticommutes(b) {
                continue;
            }
            cases += 1;
            if beta(a, b)? != beta(b, a)? || beta(a, b)? != beta(a, &(*a ^ *b))? {
                return Ok((false, format!("two-point identity fails at ({a}, {b})")));
            }
            for c in &labels {
                let bc = *b ^ *c;
                let ab = *a ^ *b;
                if c.anticommutes(a) || c.anticommutes(b) {
                    continue;
                }
                let lhs = beta(a, b)? ^ beta(&ab, c)? ^ beta(b, c)? ^ beta(a, &bc)?;
                if lhs != 0 {
                    return Ok((false, format!("cocycle identity fails at ({a}, {b}, {c})")));
                }
            }
        }
    }
    Ok((true, format!("{cases} commuting pairs")))
}

/// Known point counts for n = 2 (qubits and rebits) plus the one-qubit Eight-state model.
pub fn check_catalog_counts() -> Result<(bool, String)> {
    let cases: [(usize, &[usize], bool, usize); 7] = [
        (2, &[0], false, 60),
        (2, &[1], false, 240),
        (2, &[1, 2], false, 432),
        (2, &[0], true, 24),
        (2, &[1], true, 72),
        (2, &[1, 2], true, 120),
        (1, &[1], false, 8),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (n, m, rebit, want) in cases {
        let got = enumerate_catalog(n, m, rebit)?.len();
        ok &= got == want;
        detail.push(format!("n={n} m={m:?}{} {got}/{want}", if rebit { " rebit" } else { "" }));
    }
    Ok((ok, detail.join("; ")))
}

/// Set types of the two-rebit catalog: `(type a, type b, type c)` as (sets, points).
pub fn mermin_structure() -> Result<[(usize, usize); 3]> {
    let cat = enumerate_catalog(2, &[0, 1, 2], true)?;
    let mut out = [(0, 0); 3];
    for (i, s) in cat.sets().iter().enumerate() {
        let k = match (s.is_isotropic(), s.m(), s.xi()) {
            (true, _, _) => 1,
            (false, 1, 2) => 0,
            (false, 2, 3) => 2,
            _ => continue,
        };
        out[k].0 += 1;
        out[k].1 += cat.points_of(i).len();
    }
    Ok(out)
}

/// `P_a(s) A P_a(s)` against the weighted successors, for every point, label and outcome.
pub fn check_measurement_oracle(catalog: &Catalog) -> Result<(usize, f64)> {
    let n = catalog.n();
    let labels: Vec<PauliLabel> = PauliLabel::all(n).collect();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for p in catalog.points() {
        let a_mat = phase_point_matrix(p)?;
        for a in &labels {
            for s in 0..2u8 {
                let lhs = a_mat.project(a, s)?;
                let br = measure_update(p, a, s)?;
                let mut rhs = DenseOperator::zeros(n)?;
                for (q, w) in &br.successors {
                    rhs = rhs.add(&phase_point_matrix(q)?.scale(br.probability * w));
                }
                worst = worst.max(lhs.max_abs_diff(&rhs));
                cases += 1;
            }
        }
    }
    Ok((cases, worst))
}

/// Reference robustness values: (state, n, ℜ, tol, ℜ_S, tol).
pub const ROBUSTNESS_TABLE: [(&str, usize, f64, f64, f64, f64); 5] = [
    ("H^2", 2, 1.0, 5e-3, 1.7472, 2e-3),
    ("T^2", 2, 1.0, 5e-3, 2.23205, 2e-3),
    ("H^3", 3, 1.283, 5e-3, 2.2189, 2e-3),
    ("T^3", 3, 1.385, 5e-3, 3.09807, 2e-3),
    ("hoggar", 3, 1.80, 5e-3, 3.8000, 2e-3),
];

pub fn run(level: Level) -> Report {
    let mut checks = vec![
        timed("beta identities (n<=2)", || {
            let (a, d1) = check_beta_identities(1)?;
            let (b, d2) = check_beta_identities(2)?;
            Ok((a && b, format!("n=1: {d1}; n=2: {d2}")))
        }),
        timed("catalog counts", check_catalog_counts),
        timed("two-rebit set types", || {
            let got = mermin_structure()?;
            Ok((got == [(9, 72), (6, 24), (6, 48)], format!("(sets, points) for a/b/c: {got:?}")))
        }),
    ];
    if level == Level::Full {
        checks.push(timed("measurement update vs dense projection (n=2)", || {
            let cat = enumerate_catalog(2, &[0, 1, 2], false)?;
            let (cases, worst) = check_measurement_oracle(&cat)?;
            Ok((worst <= 1e-10, format!("{cases} cases, max deviation {worst:.2e}")))
        }));
    }
    if level == Level::Lp {
        for (name, n, r, rtol, rs, rstol) in ROBUSTNESS_TABLE {
            checks.push(timed(&format!("robustness {name}"), || {
                let b = ExpectationVector::from_dense(&named_state(name)?)?;
                let m: Vec<usize> = (1..=n).collect();
                let got_r = robustness(&b, &enumerate_catalog(n, &m, false)?)?.objective;
                let got_rs = robustness_of_magic(&b)?.objective;
                let ok = (got_r - r).abs() <= rtol && (got_rs - rs).abs() <= rstol;
                Ok((ok, format!("R = {got_r:.5} (want {r}), R_S = {got_rs:.5} (want {rs})")))
            }));
        }
    }
    Report { level, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let r = run(Level::Fast);
        assert!(r.passed(), "{r:?}");
    }
}
