//! Dense-inverse revised simplex for `min cᵀx, Ax = b, x ≥ 0` with sparse columns.

// Index loops over B⁻¹ rows and columns read better than iterator chains here.
#![allow(clippy::needless_range_loop)]

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Sparse columns in compressed form.
#[derive(Clone, Debug, Default)]
pub struct ColumnStore {
    ptr: Vec<usize>,
    rows: Vec<u32>,
    vals: Vec<f64>,
}

impl ColumnStore {
    pub fn new() -> Self {
        Self { ptr: vec![0], rows: Vec::new(), vals: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = (usize, f64)>>(&mut self, entries: I) {
        for (r, v) in entries {
            self.rows.push(r as u32);
            self.vals.push(v);
        }
        self.ptr.push(self.rows.len());
    }

    pub fn len(&self) -> usize {
        self.ptr.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nnz(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.ptr[j]..self.ptr[j + 1];
        self.rows[r.clone()].iter().map(|&i| i as usize).zip(self.vals[r].iter().copied())
    }
}

/// `min cᵀx` s.t. `Ax = b`, `x ≥ 0`. With `mirrored`, the variables are
/// `[x⁺, x⁻]` over columns `[A, −A]` with costs `[c, c]`, without storing `−A`.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub n_rows: usize,
    pub columns: Arc<ColumnStore>,
    pub cost: Vec<f64>,
    pub rhs: Vec<f64>,
    pub mirrored: bool,
}

impl LpProblem {
    pub fn n_vars(&self) -> usize {
        self.columns.len() * if self.mirrored { 2 } else { 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per variable (length `n_vars`).
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Phase-1 infeasibility `Σ artificials` at the end of phase 1.
    pub infeasibility: f64,
}

/// Pluggable LP backend.
pub trait LpSolver: Sync {
    /// Solve; with `feasibility_only` the objective is ignored and phase 2 skipped.
    fn solve(&self, problem: &LpProblem, feasibility_only: bool) -> Result<LpSolution>;
}

/// Deterministic revised simplex: Dantzig pricing with a Bland fallback
/// after a run of degenerate pivots, periodic refactorization of `B⁻¹`.
#[derive(Clone, Debug)]
pub struct RevisedSimplex {
    pub max_iterations: usize,
    pub refactor_every: usize,
    pub tol_pivot: f64,
    pub tol_optimal: f64,
    pub tol_feasible: f64,
    pub degenerate_before_bland: usize,
}

impl Default for RevisedSimplex {
    fn default() -> Self {
        Self {
            max_iterations: 200_000,
            refactor_every: 64,
            tol_pivot: 1e-9,
            tol_optimal: 1e-10,
            tol_feasible: 1e-8,
            degenerate_before_bland: 50,
        }
    }
}

struct State<'a> {
    p: &'a LpProblem,
    /// ±1 per kept row so that `b ≥ 0`.
    sign: Vec<f64>,
    /// Position among the kept rows, or `usize::MAX` for dropped ones.
    pos: Vec<usize>,
    m: usize,
    b: Vec<f64>,
    n_struct: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
}

impl<'a> State<'a> {
    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_struct
    }

    /// Entries of (transformed) variable column `j` in kept-row coordinates.
    fn for_column(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if self.is_artificial(j) {
            f(j - self.n_struct, 1.0);
            return;
        }
        let base = self.p.columns.len();
        let (c, neg) = if j >= base { (j - base, -1.0) } else { (j, 1.0) };
        for (r, v) in self.p.columns.column(c) {
            let k = self.pos[r];
            if k != usize::MAX {
                f(k, v * neg * self.sign[k]);
            }
        }
    }

    fn cost(&self, j: usize, phase1: bool) -> f64 {
        match (phase1, self.is_artificial(j)) {
            (true, true) => 1.0,
            (true, false) => 0.0,
            (false, true) => 0.0,
            (false, false) => self.p.cost[j % self.p.columns.len()],
        }
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut u = vec![0.0; m];
        self.for_column(j, |k, v| {
            for i in 0..m {
                u[i] += self.binv[i * m + k] * v;
            }
        });
        u
    }

    fn duals(&self, phase1: bool) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &bj) in self.basis.iter().enumerate() {
            let c = self.cost(bj, phase1);
            if c != 0.0 {
                for k in 0..m {
                    y[k] += c * self.binv[i * m + k];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase1: bool) -> f64 {
        let mut d = self.cost(j, phase1);
        self.for_column(j, |k, v| d -= y[k] * v);
        d
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut bmat = DMatrix::<f64>::zeros(m, m);
        for (i, &bj) in self.basis.iter().enumerate() {
            self.for_column(bj, |k, v| bmat[(k, i)] = v);
        }
        let inv = bmat.try_inverse().ok_or_else(|| Error::Solver("singular basis during refactorization".into()))?;
        for i in 0..m {
            for k in 0..m {
                self.binv[i * m + k] = inv[(i, k)];
            }
        }
        for i in 0..m {
            let v: f64 = (0..m).map(|k| self.binv[i * m + k] * self.b[k]).sum();
            self.xb[i] = if v.abs() < 1e-13 { 0.0 } else { v };
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, q: usize, u: &[f64]) {
        let m = self.m;
        let theta = self.xb[r] / u[r];
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * u[i];
            }
        }
        self.xb[r] = theta;
        let piv = u[r];
        let row_r: Vec<f64> = (0..m).map(|k| self.binv[r * m + k] / piv).collect();
        for i in 0..m {
            if i == r || u[i] == 0.0 {
                continue;
            }
            let f = u[i];
            for k in 0..m {
                self.binv[i * m + k] -= f * row_r[k];
            }
        }
        self.binv[r * m..(r + 1) * m].copy_from_slice(&row_r);
        self.in_basis[self.basis[r]] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
        self.iterations += 1;
    }

    /// Simplex loop; returns false on iteration limit.
    fn run(&mut self, cfg: &RevisedSimplex, phase1: bool) -> Result<bool> {
        let mut degenerate = 0usize;
        let mut since_refactor = 0usize;
        let total = self.n_struct + if phase1 { self.m } else { 0 };
        loop {
            if self.iterations >= cfg.max_iterations {
                return Ok(false);
            }
            if since_refactor >= cfg.refactor_every {
                self.refactor()?;
                since_refactor = 0;
            }
            let bland = degenerate >= cfg.degenerate_before_bland;
            let y = self.duals(phase1);
            let eligible = |j: usize| !self.in_basis[j] && !(phase1 && self.is_artificial(j));
            let entering = if bland {
                (0..total).find(|&j| eligible(j) && self.reduced_cost(j, &y, phase1) < -cfg.tol_optimal)
            } else {
                (0..total)
                    .into_par_iter()
                    .filter(|&j| eligible(j))
                    .map(|j| (self.reduced_cost(j, &y, phase1), j))
                    .filter(|(d, _)| *d < -cfg.tol_optimal)
                    .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                    .map(|(_, j)| j)
            };
            let Some(q) = entering else {
                return Ok(true);
            };
            let u = self.ftran(q);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let stuck_artificial = !phase1 && self.is_artificial(self.basis[i]) && u[i].abs() > cfg.tol_pivot;
                if !(u[i] > cfg.tol_pivot || stuck_artificial) {
                    continue;
                }
                let ratio = if stuck_artificial { 0.0 } else { self.xb[i].max(0.0) / u[i] };
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        if ratio < best - 1e-12 {
                            true
                        } else if ratio <= best + 1e-12 {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                u[i].abs() > u[r].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, theta)) = leave else {
                return Err(Error::Solver("unbounded direction; objective has no lower bound".into()));
            };
            if !phase1 && self.is_artificial(self.basis[r]) {
                // Artificials left basic after phase 1 sit at zero.
                self.xb[r] = 0.0;
            }
            degenerate = if theta <= 1e-12 { degenerate + 1 } else { 0 };
            self.pivot(r, q, &u);
            since_refactor += 1;
        }
    }
}

impl LpSolver for RevisedSimplex {
    fn solve(&self, p: &LpProblem, feasibility_only: bool) -> Result<LpSolution> {
        if p.rhs.len() != p.n_rows || p.cost.len() != p.columns.len() {
            return Err(Error::Solver("inconsistent problem dimensions".into()));
        }
        let mut used = vec![false; p.n_rows];
        for j in 0..p.columns.len() {
            for (r, v) in p.columns.column(j) {
                if v != 0.0 {
                    used[r] = true;
                }
            }
        }
        let n_vars = p.n_vars();
        for r in 0..p.n_rows {
            if !used[r] && p.rhs[r].abs() > self.tol_feasible {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: vec![0.0; n_vars],
                    objective: f64::NAN,
                    iterations: 0,
                    infeasibility: p.rhs[r].abs(),
                });
            }
        }
        let keep: Vec<usize> = (0..p.n_rows).filter(|&r| used[r]).collect();
        let m = keep.len();
        let mut pos = vec![usize::MAX; p.n_rows];
        for (k, &r) in keep.iter().enumerate() {
            pos[r] = k;
        }
        let sign: Vec<f64> = keep.iter().map(|&r| if p.rhs[r] < 0.0 { -1.0 } else { 1.0 }).collect();
        let b: Vec<f64> = keep.iter().zip(&sign).map(|(&r, s)| p.rhs[r] * s).collect();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut st = State {
            p,
            sign,
            pos,
            m,
            xb: b.clone(),
            b,
            n_struct: n_vars,
            basis: (n_vars..n_vars + m).collect(),
            in_basis: (0..n_vars + m).map(|j| j >= n_vars).collect(),
            binv,
            iterations: 0,
        };

        let finished = st.run(self, true)?;
        st.refactor()?;
        let infeas: f64 = (0..m).filter(|&i| st.is_artificial(st.basis[i])).map(|i| st.xb[i].max(0.0)).sum();
        if !finished {
            return Ok(st.solution(LpStatus::IterationLimit, infeas));
        }
        if infeas > self.tol_feasible {
            return Ok(st.solution(LpStatus::Infeasible, infeas));
        }
        // Pivot remaining zero-level artificials out where possible.
        for r in 0..m {
            if !st.is_artificial(st.basis[r]) {
                continue;
            }
            let row: Vec<f64> = st.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n_vars {
                if st.in_basis[j] {
                    continue;
                }
                let mut v = 0.0;
                st.for_column(j, |k, a| v += row[k] * a);
                if v.abs() > 1e-7 && best.is_none_or(|(_, bv)| v.abs() > bv.abs() + 1e-12) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                let u = st.ftran(j);
                st.xb[r] = 0.0;
                st.pivot(r, j, &u);
            }
        }
        st.refactor()?;
        if feasibility_only {
            return Ok(st.solution(LpStatus::Optimal, infeas));
        }
        let finished = st.run(self, false)?;
        st.refactor()?;
        Ok(st.solution(if finished { LpStatus::Optimal } else { LpStatus::IterationLimit }, infeas))
    }
}

impl State<'_> {
    fn solution(&self, status: LpStatus, infeasibility: f64) -> LpSolution {
        let mut x = vec![0.0; self.n_struct];
        for (i, &bj) in self.basis.iter().enumerate() {
            if !self.is_artificial(bj) {
                x[bj] = self.xb[i].max(0.0);
            }
        }
        let objective = x.iter().enumerate().map(|(j, v)| v * self.p.cost[j % self.p.columns.len()]).sum();
        LpSolution { status, x, objective, iterations: self.iterations, infeasibility }
    }
}
