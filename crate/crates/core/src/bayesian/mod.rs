//! Two-player Bayesian games with finite type spaces and pure strategies.
//!
//! Payoffs are stored per type pair as `n_row × n_col` matrices, so games whose
//! payoffs do not depend on the types share a single matrix.

mod coloring;
mod gadget;
mod lift;
mod qp;

use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::TOL;
use crate::rng::{seeded, Stream};

pub use coloring::{edge_coloring, is_proper_edge_coloring};
pub use gadget::{
    build_coloring_hardness_game, coin_flip_deltas, coloring_profile, three_coloring, EPS_GADGET,
    VERTEX_STAKE,
};
pub use lift::{lift_uniform_bayes, pure_bayes_to_mixed};
pub use qp::{
    estimate_col_payoffs, estimate_row_payoffs, qp_pure_bne_uniform, qp_pure_bne_uniform_with,
    sample_count, BneAlgoTrace, QpOptions, SolvePath,
};

#[derive(Debug, Clone, PartialEq)]
pub struct BayesianGame {
    k_row: usize,
    k_col: usize,
    n_row: usize,
    n_col: usize,
    type_dist: Array2<f64>,
    /// Indexed by `t_row * k_col + t_col`.
    u_row: Vec<Arc<Array2<f64>>>,
    u_col: Vec<Arc<Array2<f64>>>,
    uniform: bool,
}

impl BayesianGame {
    /// Validates shapes, that `type_dist` is a probability table and that every
    /// payoff lies in `[0, 1]`.
    pub fn new(
        type_dist: Array2<f64>,
        u_row: Vec<Arc<Array2<f64>>>,
        u_col: Vec<Arc<Array2<f64>>>,
    ) -> Result<Self> {
        let (k_row, k_col) = type_dist.dim();
        if k_row == 0 || k_col == 0 {
            return Err(Error::DimensionMismatch("empty type space".into()));
        }
        if u_row.len() != k_row * k_col || u_col.len() != k_row * k_col {
            return Err(Error::DimensionMismatch(format!(
                "expected {} payoff matrices per player",
                k_row * k_col
            )));
        }
        if type_dist.iter().any(|p| !(0.0..=1.0 + TOL).contains(p) || p.is_nan()) {
            return Err(Error::InvalidProbability("type probability outside [0, 1]".into()));
        }
        let total = type_dist.sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbability(format!("type table sums to {total}")));
        }
        let (n_row, n_col) = u_row[0].dim();
        if n_row == 0 || n_col == 0 {
            return Err(Error::DimensionMismatch("empty action set".into()));
        }
        for m in u_row.iter().chain(&u_col) {
            if m.dim() != (n_row, n_col) {
                return Err(Error::DimensionMismatch("payoff matrices differ in shape".into()));
            }
            if let Some(((r, c), v)) = m
                .indexed_iter()
                .find(|(_, v)| !(0.0..=1.0).contains(*v) || v.is_nan())
            {
                return Err(Error::PayoffOutOfRange { row: r, col: c, value: *v });
            }
        }
        let target = 1.0 / (k_row * k_col) as f64;
        let uniform = type_dist.iter().all(|p| (p - target).abs() <= 1e-12);
        Ok(Self {
            k_row,
            k_col,
            n_row,
            n_col,
            type_dist,
            u_row,
            u_col,
            uniform,
        })
    }

    /// Uniform product type distribution with type-independent payoffs.
    pub fn type_invariant(k_row: usize, k_col: usize, m_row: Array2<f64>, m_col: Array2<f64>) -> Result<Self> {
        let dist = Array2::from_elem((k_row, k_col), 1.0 / (k_row * k_col).max(1) as f64);
        let (r, c) = (Arc::new(m_row), Arc::new(m_col));
        let pairs = k_row * k_col;
        Self::new(dist, vec![r; pairs], vec![c; pairs])
    }

    pub fn k_row(&self) -> usize {
        self.k_row
    }

    pub fn k_col(&self) -> usize {
        self.k_col
    }

    pub fn n_row(&self) -> usize {
        self.n_row
    }

    pub fn n_col(&self) -> usize {
        self.n_col
    }

    pub fn type_dist(&self) -> &Array2<f64> {
        &self.type_dist
    }

    /// True when types are drawn uniformly from `Θ_row × Θ_col`.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Row player's payoff matrix at type pair `(t_row, t_col)`.
    pub fn m_row(&self, t_row: usize, t_col: usize) -> &Array2<f64> {
        &self.u_row[t_row * self.k_col + t_col]
    }

    pub fn m_col(&self, t_row: usize, t_col: usize) -> &Array2<f64> {
        &self.u_col[t_row * self.k_col + t_col]
    }

    pub fn u_row(&self, a_row: usize, a_col: usize, t_row: usize, t_col: usize) -> f64 {
        self.m_row(t_row, t_col)[[a_row, a_col]]
    }

    pub fn u_col(&self, a_row: usize, a_col: usize, t_row: usize, t_col: usize) -> f64 {
        self.m_col(t_row, t_col)[[a_row, a_col]]
    }

    fn row_marginal(&self, t: usize) -> f64 {
        self.type_dist.row(t).sum()
    }

    fn col_marginal(&self, t: usize) -> f64 {
        self.type_dist.column(t).sum()
    }

    /// Expected payoff of each row action for row type `t` against `s_col`;
    /// `None` when `t` has zero probability.
    fn row_action_payoffs(&self, t: usize, s_col: &[usize]) -> Option<Vec<f64>> {
        let marginal = self.row_marginal(t);
        if marginal <= 0.0 {
            return None;
        }
        let mut out = vec![0.0; self.n_row];
        for (tc, &b) in s_col.iter().enumerate() {
            let w = self.type_dist[[t, tc]];
            if w > 0.0 {
                let m = self.m_row(t, tc);
                out.iter_mut().enumerate().for_each(|(a, o)| *o += w * m[[a, b]]);
            }
        }
        out.iter_mut().for_each(|o| *o /= marginal);
        Some(out)
    }

    fn col_action_payoffs(&self, t: usize, s_row: &[usize]) -> Option<Vec<f64>> {
        let marginal = self.col_marginal(t);
        if marginal <= 0.0 {
            return None;
        }
        let mut out = vec![0.0; self.n_col];
        for (tr, &a) in s_row.iter().enumerate() {
            let w = self.type_dist[[tr, t]];
            if w > 0.0 {
                let m = self.m_col(tr, t);
                out.iter_mut().enumerate().for_each(|(b, o)| *o += w * m[[a, b]]);
            }
        }
        out.iter_mut().for_each(|o| *o /= marginal);
        Some(out)
    }

    fn check(&self, p: &PureBayesProfile) -> Result<()> {
        if p.s_row.len() != self.k_row || p.s_col.len() != self.k_col {
            return Err(Error::DimensionMismatch(format!(
                "profile covers {}/{} types, game has {}/{}",
                p.s_row.len(),
                p.s_col.len(),
                self.k_row,
                self.k_col
            )));
        }
        if p.s_row.iter().any(|&a| a >= self.n_row) || p.s_col.iter().any(|&b| b >= self.n_col) {
            return Err(Error::DimensionMismatch("action out of range".into()));
        }
        Ok(())
    }
}

/// Pure strategies as type → action maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PureBayesProfile {
    pub s_row: Vec<usize>,
    pub s_col: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BneCertificate {
    pub p_row: Vec<f64>,
    pub p_col: Vec<f64>,
    pub regret_row: Vec<f64>,
    pub regret_col: Vec<f64>,
    pub max_regret: f64,
}

/// Per-type payoffs and regrets. Types with zero marginal probability get
/// payoff and regret 0.
pub fn bne_regret(game: &BayesianGame, profile: &PureBayesProfile) -> Result<BneCertificate> {
    game.check(profile)?;
    let mut p_row = vec![0.0; game.k_row];
    let mut regret_row = vec![0.0; game.k_row];
    for t in 0..game.k_row {
        if let Some(v) = game.row_action_payoffs(t, &profile.s_col) {
            p_row[t] = v[profile.s_row[t]];
            let best = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            regret_row[t] = (best - p_row[t]).max(0.0);
        }
    }
    let mut p_col = vec![0.0; game.k_col];
    let mut regret_col = vec![0.0; game.k_col];
    for t in 0..game.k_col {
        if let Some(v) = game.col_action_payoffs(t, &profile.s_row) {
            p_col[t] = v[profile.s_col[t]];
            let best = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            regret_col[t] = (best - p_col[t]).max(0.0);
        }
    }
    let max_regret = regret_row
        .iter()
        .chain(&regret_col)
        .copied()
        .fold(0.0, f64::max);
    Ok(BneCertificate {
        p_row,
        p_col,
        regret_row,
        regret_col,
        max_regret,
    })
}

pub fn is_eps_bne(game: &BayesianGame, profile: &PureBayesProfile, eps: f64) -> Result<bool> {
    if eps < 0.0 {
        return Err(Error::NegativeEpsilon(eps));
    }
    Ok(bne_regret(game, profile)?.max_regret <= eps + TOL)
}

/// Acceptance rule for a per-type regret.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegretBound {
    /// `regret ≤ ε` (with a 1e-9 tolerance), the convention of [`is_eps_bne`].
    AtMost(f64),
    /// `regret < ε` (by more than 1e-9): every deviation gains strictly less than ε.
    Below(f64),
}

impl RegretBound {
    pub fn eps(self) -> f64 {
        match self {
            RegretBound::AtMost(e) | RegretBound::Below(e) => e,
        }
    }

    pub fn admits(self, regret: f64) -> bool {
        match self {
            RegretBound::AtMost(e) => regret <= e + TOL,
            RegretBound::Below(e) => regret < e - TOL,
        }
    }
}

fn profile_count(n: usize, k: usize) -> Option<u128> {
    (n as u128).checked_pow(u32::try_from(k).ok()?)
}

/// Mixed-radix decoding with type 0 as the most significant digit.
fn decode(mut index: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = (index % n as u128) as usize;
        index /= n as u128;
    }
    out
}

/// Exhaustive search for the lexicographically first pure ε-BNE, ordering
/// profiles by `s_row` then `s_col` with type 0 most significant.
///
/// For each `s_row`, only column actions with regret at most ε are expanded, and
/// a row type is checked as soon as every column type it can meet is assigned.
/// `budget` caps the size of the full profile space.
pub fn brute_force_pure_bne(
    game: &BayesianGame,
    eps: f64,
    budget: u128,
) -> Result<Option<PureBayesProfile>> {
    brute_force_pure_bne_with(game, RegretBound::AtMost(eps), budget)
}

/// [`brute_force_pure_bne`] under an explicit acceptance rule.
pub fn brute_force_pure_bne_with(
    game: &BayesianGame,
    bound: RegretBound,
    budget: u128,
) -> Result<Option<PureBayesProfile>> {
    if bound.eps() < 0.0 {
        return Err(Error::NegativeEpsilon(bound.eps()));
    }
    let rows = profile_count(game.n_row, game.k_row);
    let cols = profile_count(game.n_col, game.k_col);
    let required = rows.zip(cols).and_then(|(r, c)| r.checked_mul(c)).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, cap: budget });
    }
    let rows = rows.expect("bounded by budget");

    // Row type t is decided once column type `ready[t]` is assigned.
    let ready: Vec<Option<usize>> = (0..game.k_row)
        .map(|t| (0..game.k_col).rev().find(|&tc| game.type_dist[[t, tc]] > 0.0))
        .collect();
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); game.k_col];
    for (t, r) in ready.iter().enumerate() {
        if let Some(tc) = r {
            due[*tc].push(t);
        }
    }

    let found = (0..rows).into_par_iter().find_map_first(|idx| {
        let s_row = decode(idx, game.n_row, game.k_row);
        let mut allowed = Vec::with_capacity(game.k_col);
        for t in 0..game.k_col {
            match game.col_action_payoffs(t, &s_row) {
                None => allowed.push((0..game.n_col).collect::<Vec<_>>()),
                Some(v) => {
                    let best = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let ok: Vec<usize> = (0..game.n_col).filter(|&b| bound.admits(best - v[b])).collect();
                    if ok.is_empty() {
                        return None;
                    }
                    allowed.push(ok);
                }
            }
        }
        let mut s_col = vec![0; game.k_col];
        search_cols(game, bound, &s_row, &allowed, &due, 0, &mut s_col).then_some(PureBayesProfile {
            s_row,
            s_col,
        })
    });
    Ok(found)
}

fn search_cols(
    game: &BayesianGame,
    bound: RegretBound,
    s_row: &[usize],
    allowed: &[Vec<usize>],
    due: &[Vec<usize>],
    tc: usize,
    s_col: &mut [usize],
) -> bool {
    if tc == game.k_col {
        return true;
    }
    for &b in &allowed[tc] {
        s_col[tc] = b;
        let rows_ok = due[tc].iter().all(|&t| {
            let v = game.row_action_payoffs(t, s_col).expect("due types have mass");
            let best = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            bound.admits(best - v[s_row[t]])
        });
        if rows_ok && search_cols(game, bound, s_row, allowed, due, tc + 1, s_col) {
            return true;
        }
    }
    false
}

/// Uniform-type game with one planted pure profile: non-planted payoffs are
/// drawn from `U[0, 0.8)`, and each planted action pays `margin` more than the
/// best other action against every opponent action and type pair.
pub fn planted_bne_game(
    k: usize,
    n: usize,
    margin: f64,
    seed: u64,
) -> Result<(BayesianGame, PureBayesProfile)> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParameter("k and n must be positive".into()));
    }
    if !(0.0..=0.2).contains(&margin) {
        return Err(Error::InvalidParameter(format!("margin {margin} must lie in [0, 0.2]")));
    }
    let mut rng = seeded(seed, Stream::Bayes);
    let planted = PureBayesProfile {
        s_row: (0..k).map(|_| rng.random_range(0..n)).collect(),
        s_col: (0..k).map(|_| rng.random_range(0..n)).collect(),
    };
    let mut u_row = Vec::with_capacity(k * k);
    let mut u_col = Vec::with_capacity(k * k);
    for tr in 0..k {
        for tc in 0..k {
            let mut mr = Array2::from_shape_simple_fn((n, n), || rng.random_range(0.0..0.8));
            let mut mc = Array2::from_shape_simple_fn((n, n), || rng.random_range(0.0..0.8));
            let a = planted.s_row[tr];
            for b in 0..n {
                let best = (0..n).filter(|&x| x != a).map(|x| mr[[x, b]]).fold(0.0, f64::max);
                mr[[a, b]] = (best + margin).min(1.0);
            }
            let b = planted.s_col[tc];
            for a in 0..n {
                let best = (0..n).filter(|&y| y != b).map(|y| mc[[a, y]]).fold(0.0, f64::max);
                mc[[a, b]] = (best + margin).min(1.0);
            }
            u_row.push(Arc::new(mr));
            u_col.push(Arc::new(mc));
        }
    }
    let dist = Array2::from_elem((k, k), 1.0 / (k * k) as f64);
    Ok((BayesianGame::new(dist, u_row, u_col)?, planted))
}

/// JSON layout: payoff tensors flattened in `(a_row, a_col, t_row, t_col)`
/// row-major order, `t_col` fastest.
#[derive(Serialize, Deserialize)]
struct BayesFile {
    k_row: usize,
    k_col: usize,
    n_row: usize,
    n_col: usize,
    type_dist: Vec<Vec<f64>>,
    u_row: Vec<f64>,
    u_col: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uniform: Option<bool>,
}

impl BayesianGame {
    fn flatten(&self, mats: &[Arc<Array2<f64>>]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_row * self.n_col * self.k_row * self.k_col);
        for a in 0..self.n_row {
            for b in 0..self.n_col {
                for m in mats {
                    out.push(m[[a, b]]);
                }
            }
        }
        out
    }
}

fn unflatten(flat: &[f64], f: &BayesFile) -> std::result::Result<Vec<Arc<Array2<f64>>>, String> {
    let pairs = f.k_row * f.k_col;
    if flat.len() != f.n_row * f.n_col * pairs {
        return Err(format!("payoff tensor has {} entries, expected {}", flat.len(), f.n_row * f.n_col * pairs));
    }
    Ok((0..pairs)
        .map(|p| Arc::new(Array2::from_shape_fn((f.n_row, f.n_col), |(a, b)| flat[(a * f.n_col + b) * pairs + p])))
        .collect())
}

impl Serialize for BayesianGame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BayesFile {
            k_row: self.k_row,
            k_col: self.k_col,
            n_row: self.n_row,
            n_col: self.n_col,
            type_dist: self.type_dist.outer_iter().map(|r| r.to_vec()).collect(),
            u_row: self.flatten(&self.u_row),
            u_col: self.flatten(&self.u_col),
            uniform: Some(self.uniform),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BayesianGame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = BayesFile::deserialize(d)?;
        if f.type_dist.len() != f.k_row || f.type_dist.iter().any(|r| r.len() != f.k_col) {
            return Err(D::Error::custom("type_dist shape does not match k_row x k_col"));
        }
        let dist = Array2::from_shape_vec((f.k_row, f.k_col), f.type_dist.concat())
            .map_err(D::Error::custom)?;
        let u_row = unflatten(&f.u_row, &f).map_err(D::Error::custom)?;
        let u_col = unflatten(&f.u_col, &f).map_err(D::Error::custom)?;
        let game = BayesianGame::new(dist, u_row, u_col).map_err(D::Error::custom)?;
        if f.uniform.is_some_and(|u| u != game.uniform) {
            return Err(D::Error::custom("uniform flag inconsistent with type_dist"));
        }
        Ok(game)
    }
}
