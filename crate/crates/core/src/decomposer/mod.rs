//! Linear programs over phase-space columns: positive representability,
//! phase-space robustness `ℜ`, robustness of magic `ℜ_S`, and composition.

pub mod lp;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use serde::Serialize;

pub use lp::{ColumnStore, LpProblem, LpSolution, LpSolver, LpStatus, RevisedSimplex};

use crate::error::{Error, Result};
use crate::oracle::DenseOperator;
use crate::pauli::PauliLabel;
use crate::phase_space::{enumerate_catalog, Catalog, PhasePoint};
use crate::simulator::{tensor_wreps, WRep, TOL_ZERO};

/// Equality tolerance for `Mq = b` and the sandwich bounds.
pub const TOL_EQ: f64 = 1e-7;

/// `b_a = Tr(ρ T_a)` for every label `a`, indexed by [`PauliLabel::index`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectationVector {
    n: usize,
    values: Vec<f64>,
}

impl ExpectationVector {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1usize << (2 * n) {
            return Err(Error::Parse(format!("expected {} values for n = {n}, got {}", 1usize << (2 * n), values.len())));
        }
        if (values[0] - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("identity component is {}, expected 1 (unnormalized state)", values[0])));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || v.abs() > 1.0 + 1e-9) {
            return Err(Error::InvalidState(format!("expectation {v} of {} outside [-1, 1]", PauliLabel::from_index(n, i))));
        }
        Ok(Self { n, values })
    }

    pub fn from_dense(rho: &DenseOperator) -> Result<Self> {
        Self::new(rho.n(), rho.expectation_vector())
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        DenseOperator::from_expectations(self.n, &self.values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, a: &PauliLabel) -> f64 {
        self.values[a.index()]
    }
}

/// Columns `M_{i,j} = Tr(A_{α_j} T_i)` of a catalog; `|Ω_j|` nonzeros each.
#[derive(Clone, Debug)]
pub struct Columns {
    n: usize,
    points: Vec<PhasePoint>,
    store: Arc<ColumnStore>,
}

impl Columns {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (PauliLabel, f64)> + '_ {
        self.store.column(j).map(move |(i, v)| (PauliLabel::from_index(self.n, i), v))
    }

    pub fn nnz(&self, j: usize) -> usize {
        self.store.column(j).count()
    }

    fn problem(&self, b: &ExpectationVector, mirrored: bool) -> LpProblem {
        LpProblem {
            n_rows: b.values.len(),
            columns: self.store.clone(),
            cost: vec![1.0; self.points.len()],
            rhs: b.values.clone(),
            mirrored,
        }
    }
}

/// Column accessor for the catalog's phase points.
pub fn build_columns(catalog: &Catalog) -> Columns {
    columns_for(catalog.n(), catalog.points().to_vec())
}

pub fn columns_for(n: usize, points: Vec<PhasePoint>) -> Columns {
    let mut store = ColumnStore::new();
    for p in &points {
        let mut col: Vec<(usize, f64)> =
            p.signed_elements().into_iter().map(|(b, g)| (b.index(), if g == 1 { -1.0 } else { 1.0 })).collect();
        col.sort_by_key(|e| e.0);
        store.push(col);
    }
    Columns { n, points, store: Arc::new(store) }
}

/// Outcome of an ℓ1 or feasibility LP.
#[derive(Clone, Debug)]
pub struct LpResult {
    pub objective: f64,
    pub solution: WRep,
    pub residual: f64,
    pub support_size: usize,
    pub status: LpStatus,
    pub iterations: usize,
    pub wall_time: f64,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// `max_i |(Mq)_i − b_i|`.
pub fn residual(w: &WRep, b: &ExpectationVector) -> f64 {
    let mut acc = vec![0.0; b.values.len()];
    for (p, c) in w.entries() {
        for (l, g) in p.signed_elements() {
            acc[l.index()] += if g == 1 { -c } else { *c };
        }
    }
    acc.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check_n(b: &ExpectationVector, cols: &Columns) -> Result<()> {
    if b.n != cols.n {
        return Err(Error::DimensionMismatch { left: b.n, right: cols.n });
    }
    Ok(())
}

fn assemble(cols: &Columns, sol: &LpSolution, b: &ExpectationVector, start: Instant) -> Result<LpResult> {
    let k = cols.len();
    let mut w = WRep::new(cols.n);
    for j in 0..sol.x.len() {
        let v = sol.x[j];
        if v > TOL_ZERO {
            let c = if j >= k { -v } else { v };
            w.add(cols.points[j % k].clone(), c)?;
        }
    }
    let w = w.pruned(TOL_ZERO);
    Ok(LpResult {
        objective: sol.objective,
        residual: residual(&w, b),
        support_size: w.support_size(),
        solution: w,
        status: sol.status,
        iterations: sol.iterations,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Minimal `‖q‖₁` subject to `Mq = b`, with a caller-chosen backend.
pub fn robustness_with(b: &ExpectationVector, cols: &Columns, solver: &dyn LpSolver) -> Result<LpResult> {
    check_n(b, cols)?;
    let start = Instant::now();
    let sol = solver.solve(&cols.problem(b, true), false)?;
    if sol.status == LpStatus::Infeasible {
        return Err(Error::Solver(format!("equality system infeasible (phase-1 residual {:.3e})", sol.infeasibility)));
    }
    assemble(cols, &sol, b, start)
}

/// Phase-space robustness `ℜ` over the catalog's points.
pub fn robustness(b: &ExpectationVector, catalog: &Catalog) -> Result<LpResult> {
    robustness_with(b, &build_columns(catalog), &RevisedSimplex::default())
}

static STABILIZER_COLUMNS: OnceLock<Mutex<HashMap<usize, Arc<Columns>>>> = OnceLock::new();

/// Columns of all stabilizer states (isotropic points of full dimension), memoized per `n`.
pub fn stabilizer_columns(n: usize) -> Result<Arc<Columns>> {
    let cache = STABILIZER_COLUMNS.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("column cache").get(&n) {
        return Ok(c.clone());
    }
    let cols = Arc::new(build_columns(&enumerate_catalog(n, &[0], false)?));
    cache.lock().expect("column cache").insert(n, cols.clone());
    Ok(cols)
}

/// Robustness of magic `ℜ_S`: the ℓ1 LP over stabilizer states only.
pub fn robustness_of_magic(b: &ExpectationVector) -> Result<LpResult> {
    robustness_with(b, &*stabilizer_columns(b.n)?, &RevisedSimplex::default())
}

/// A non-negative `W` with `MW = b`, or `None` when the state is not
/// positively representable on these columns.
pub fn feasibility_with(b: &ExpectationVector, cols: &Columns, solver: &dyn LpSolver) -> Result<Option<WRep>> {
    check_n(b, cols)?;
    let sol = solver.solve(&cols.problem(b, false), true)?;
    match sol.status {
        LpStatus::Infeasible => Ok(None),
        LpStatus::IterationLimit => Err(Error::Solver("iteration limit in phase 1".into())),
        LpStatus::Optimal => {
            let res = assemble(cols, &sol, b, Instant::now())?;
            if res.residual > TOL_EQ {
                return Err(Error::Solver(format!("phase-1 solution has residual {:.3e}", res.residual)));
            }
            Ok(Some(res.solution))
        }
    }
}

pub fn feasibility(b: &ExpectationVector, catalog: &Catalog) -> Result<Option<WRep>> {
    feasibility_with(b, &build_columns(catalog), &RevisedSimplex::default())
}

/// `W_ρ ⊗ W_σ`, where `W_σ` uses only isotropic points.
pub fn tensor_compose(w: &WRep, w0: &WRep) -> Result<WRep> {
    tensor_wreps(w, w0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub robustness: f64,
    pub robustness_of_magic: f64,
    pub bound_ok: bool,
}

/// Check `ℜ ≤ ℜ_S ≤ (4n+1) ℜ`.
pub fn sandwich_gap(b: &ExpectationVector, catalog: &Catalog) -> Result<SandwichReport> {
    let r = robustness(b, catalog)?;
    let rs = robustness_of_magic(b)?;
    let upper = (4 * b.n + 1) as f64 * r.objective;
    Ok(SandwichReport {
        robustness: r.objective,
        robustness_of_magic: rs.objective,
        bound_ok: r.objective <= rs.objective + TOL_EQ && rs.objective <= upper + TOL_EQ,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn one_qubit_states_are_feasible() {
        let cat = enumerate_catalog(1, &[1], false).unwrap();
        let b = ExpectationVector::from_dense(&oracle::t_state()).unwrap();
        let w = feasibility(&b, &cat).unwrap().expect("feasible");
        assert!(w.is_positive());
        assert!(residual(&w, &b) < 1e-9);
    }

    #[test]
    fn stabilizer_robustness_is_one() {
        let cat = enumerate_catalog(2, &[1, 2], false).unwrap();
        let b = ExpectationVector::from_dense(&oracle::named_state("stab:+XX,+ZZ").unwrap()).unwrap();
        let r = robustness(&b, &cat).unwrap();
        assert!((r.objective - 1.0).abs() < 1e-9);
        assert!((robustness_of_magic(&b).unwrap().objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn column_sizes() {
        let cols = build_columns(&enumerate_catalog(2, &[0, 1], false).unwrap());
        for (j, p) in cols.points().iter().enumerate() {
            let expected = if p.omega.is_isotropic() { 4 } else { 8 };
            assert_eq!(cols.nnz(j), expected);
            assert!(cols.column(j).any(|(l, v)| l.is_identity() && v == 1.0));
        }
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(ExpectationVector::new(1, vec![0.5, 0.0, 0.0, 0.0]).is_err());
    }
}
