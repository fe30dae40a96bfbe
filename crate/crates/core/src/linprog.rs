//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are stated as
//!
//! ```text
//! maximize    cᵀv
//! subject to  A v ≤ b
//!             E v = d
//!             v ≥ l            (l defaults to 0)
//! ```
//!
//! The solver works on `w = v − l ≥ 0`, adds slack, surplus and artificial
//! columns, and pivots on a dense tableau. Entering columns and leaving rows are
//! both chosen by lowest index, so identical inputs give bit-identical outputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub ineq_lhs: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    pub eq_lhs: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub lower: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub point: Vec<f64>,
    pub objective_value: f64,
}

impl LinearProgram {
    /// An unconstrained program over `objective.len()` non-negative variables.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            ineq_lhs: Vec::new(),
            ineq_rhs: Vec::new(),
            eq_lhs: Vec::new(),
            eq_rhs: Vec::new(),
            lower: vec![0.0; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// `row · v ≤ rhs`
    pub fn le(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.ineq_lhs.push(row);
        self.ineq_rhs.push(rhs);
        self
    }

    /// `row · v ≥ rhs`, stored as `−row · v ≤ −rhs`.
    pub fn ge(self, row: Vec<f64>, rhs: f64) -> Self {
        self.le(row.into_iter().map(|a| -a).collect(), -rhs)
    }

    /// `row · v = rhs`
    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq_lhs.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn with_lower_bounds(mut self, lower: Vec<f64>) -> Self {
        self.lower = lower;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let bad = |what: &str| Err(Error::DimensionMismatch(format!("linear program: {what}")));
        if self.lower.len() != n {
            return bad("lower-bound vector length differs from variable count");
        }
        if self.ineq_lhs.len() != self.ineq_rhs.len() || self.eq_lhs.len() != self.eq_rhs.len() {
            return bad("constraint and right-hand-side counts differ");
        }
        if self.ineq_lhs.iter().chain(&self.eq_lhs).any(|r| r.len() != n) {
            return bad("constraint row length differs from variable count");
        }
        let all_finite = self
            .objective
            .iter()
            .chain(&self.ineq_rhs)
            .chain(&self.eq_rhs)
            .chain(&self.lower)
            .chain(self.ineq_lhs.iter().flatten())
            .chain(self.eq_lhs.iter().flatten())
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter(
                "linear program has non-finite coefficients".into(),
            ));
        }
        Ok(())
    }

    /// Largest violation of any constraint at `point`.
    pub fn violation(&self, point: &[f64]) -> f64 {
        let dot = |row: &[f64]| row.iter().zip(point).map(|(a, b)| a * b).sum::<f64>();
        let ineq = self
            .ineq_lhs
            .iter()
            .zip(&self.ineq_rhs)
            .map(|(r, b)| (dot(r) - b).max(0.0));
        let eq = self
            .eq_lhs
            .iter()
            .zip(&self.eq_rhs)
            .map(|(r, d)| (dot(r) - d).abs());
        let bounds = point.iter().zip(&self.lower).map(|(v, l)| (l - v).max(0.0));
        ineq.chain(eq).chain(bounds).fold(0.0, f64::max)
    }

    pub fn objective_at(&self, point: &[f64]) -> f64 {
        self.objective.iter().zip(point).map(|(a, b)| a * b).sum()
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.validate()?;
        Tableau::build(self).solve(self)
    }
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_struct: usize,
    n_artificial_start: usize,
    n_cols: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let shift = |row: &[f64], rhs: f64| {
            rhs - row.iter().zip(&lp.lower).map(|(a, l)| a * l).sum::<f64>()
        };
        let m_ineq = lp.ineq_lhs.len();
        let ineq_rhs: Vec<f64> = lp
            .ineq_lhs
            .iter()
            .zip(&lp.ineq_rhs)
            .map(|(r, b)| shift(r, *b))
            .collect();
        let eq_rhs: Vec<f64> = lp
            .eq_lhs
            .iter()
            .zip(&lp.eq_rhs)
            .map(|(r, d)| shift(r, *d))
            .collect();
        let n_artificial =
            ineq_rhs.iter().filter(|b| **b < 0.0).count() + lp.eq_lhs.len();
        let art_start = n + m_ineq;
        let n_cols = art_start + n_artificial;

        let mut rows = Vec::with_capacity(m_ineq + lp.eq_lhs.len());
        let mut basis = Vec::with_capacity(rows.capacity());
        let mut next_art = art_start;
        for (k, (lhs, &rhs)) in lp.ineq_lhs.iter().zip(&ineq_rhs).enumerate() {
            let mut row = vec![0.0; n_cols + 1];
            let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
            for (dst, a) in row.iter_mut().zip(lhs) {
                *dst = sign * a;
            }
            row[n + k] = sign;
            row[n_cols] = sign * rhs;
            if rhs < 0.0 {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(n + k);
            }
            rows.push(row);
        }
        for (lhs, &rhs) in lp.eq_lhs.iter().zip(&eq_rhs) {
            let mut row = vec![0.0; n_cols + 1];
            let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
            for (dst, a) in row.iter_mut().zip(lhs) {
                *dst = sign * a;
            }
            row[n_cols] = sign * rhs;
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
            rows.push(row);
        }
        Self {
            rows,
            basis,
            n_struct: n,
            n_artificial_start: art_start,
            n_cols,
        }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [f64]) {
        let width = self.n_cols + 1;
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..width).filter(|&j| pivot_row[j] != 0.0).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for &j in &nz {
                row[j] -= f * pivot_row[j];
            }
            row[c] = 0.0;
        }
        let f = obj[c];
        if f != 0.0 {
            for &j in &nz {
                obj[j] -= f * pivot_row[j];
            }
            obj[c] = 0.0;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Reduced-cost row for maximizing `cost` in the current basis; its last
    /// entry holds the negated objective value.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj = cost.to_vec();
        obj.push(0.0);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(row) {
                    *o -= cb * v;
                }
            }
        }
        obj
    }

    /// Runs Bland-rule pivots until optimal. Returns false when unbounded.
    fn optimize(&mut self, obj: &mut [f64], allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| obj[j] > COST_TOL) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[enter];
                if a > PIVOT_TOL {
                    let ratio = row[self.n_cols] / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter, obj),
                None => return false,
            }
        }
    }

    fn solve(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        let n_art = self.n_cols - self.n_artificial_start;
        if n_art > 0 {
            let mut cost = vec![0.0; self.n_cols];
            cost[self.n_artificial_start..].iter_mut().for_each(|c| *c = -1.0);
            let mut obj = self.reduced_costs(&cost);
            self.optimize(&mut obj, self.n_cols);
            let scale = 1.0
                + lp
                    .ineq_rhs
                    .iter()
                    .chain(&lp.eq_rhs)
                    .fold(0.0f64, |a, b| a.max(b.abs()));
            let infeasibility: f64 = self
                .rows
                .iter()
                .zip(&self.basis)
                .filter(|(_, &b)| b >= self.n_artificial_start)
                .map(|(row, _)| row[self.n_cols])
                .sum();
            if infeasibility > FEAS_TOL * scale {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    point: Vec::new(),
                    objective_value: f64::NAN,
                });
            }
            self.evict_artificials(&mut obj);
        }

        let mut cost = vec![0.0; self.n_cols];
        cost[..self.n_struct].copy_from_slice(&lp.objective);
        let mut obj = self.reduced_costs(&cost);
        if !self.optimize(&mut obj, self.n_artificial_start) {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                point: Vec::new(),
                objective_value: f64::INFINITY,
            });
        }
        let mut point = lp.lower.clone();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n_struct {
                point[b] += row[self.n_cols].max(0.0);
            }
        }
        let objective_value = lp.objective_at(&point);
        Ok(LpSolution {
            status: LpStatus::Optimal,
            point,
            objective_value,
        })
    }

    /// Pivots zero-level artificial variables out of the basis and drops rows
    /// that turn out to be redundant.
    fn evict_artificials(&mut self, obj: &mut [f64]) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.n_artificial_start {
                let col = (0..self.n_artificial_start).find(|&j| self.rows[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(c) => self.pivot(r, c, obj),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }
}
