//! Independent oracles shared by integration tests.
#![allow(dead_code)]

use cliquenash::linprog::LinearProgram;
use cliquenash::BimatrixGame;
use itertools::Itertools;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_game(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BimatrixGame {
    let m_row = Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>());
    let m_col = Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>());
    BimatrixGame::new(m_row, m_col).unwrap()
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Optimal value of a bounded LP by enumerating every basic solution: all
/// equalities plus `n - #eq` tight inequalities or variable bounds. `None`
/// when no basic solution is feasible.
pub fn vertex_enumeration_optimum(lp: &LinearProgram) -> Option<f64> {
    let n = lp.objective.len();
    let mut rows: Vec<(Vec<f64>, f64)> = lp.ineq_lhs.iter().cloned().zip(lp.ineq_rhs.iter().copied()).collect();
    for (i, &l) in lp.lower.iter().enumerate() {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rows.push((e, l));
    }
    let free = n.checked_sub(lp.eq_lhs.len())?;
    let mut best: Option<f64> = None;
    for tight in (0..rows.len()).combinations(free) {
        let (mut a, mut b): (Vec<_>, Vec<_>) = lp.eq_lhs.iter().cloned().zip(lp.eq_rhs.iter().copied()).unzip();
        for &t in &tight {
            a.push(rows[t].0.clone());
            b.push(rows[t].1);
        }
        if let Some(x) = solve_square(a, b) {
            if lp.violation(&x) <= 1e-8 {
                let v = lp.objective_at(&x);
                best = Some(best.map_or(v, |b| b.max(v)));
            }
        }
    }
    best
}

/// Random bounded LP: 2 to 4 variables, a box `x_i ≤ 3`, up to four random
/// inequalities, sometimes an equality and shifted lower bounds.
pub fn random_bounded_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.random_range(2..=4);
    let coef = |rng: &mut ChaCha8Rng| (rng.random_range(-4..=4)) as f64 / 2.0;
    let objective = (0..n).map(|_| coef(rng)).collect();
    let mut lp = LinearProgram::maximize(objective);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        lp = lp.le(e, 3.0);
    }
    for _ in 0..rng.random_range(0..=4) {
        let row = (0..n).map(|_| coef(rng)).collect();
        let rhs = rng.random_range(-2.0..4.0);
        lp = if rng.random_bool(0.7) { lp.le(row, rhs) } else { lp.ge(row, rhs) };
    }
    if rng.random_bool(0.3) {
        let row = (0..n).map(|_| coef(rng)).collect();
        lp = lp.eq(row, rng.random_range(0.0..3.0));
    }
    if rng.random_bool(0.3) {
        lp = lp.with_lower_bounds((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    lp
}
