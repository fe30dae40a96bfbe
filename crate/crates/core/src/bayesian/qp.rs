//! Quasi-polynomial search for a pure ε-BNE under uniform types.
//!
//! With few types the search is exhaustive. Otherwise `m` opposing types are
//! sampled, their actions guessed, and each player's per-type payoffs estimated
//! from the sample. An LP then finds mixed per-type strategies supported on
//! near-best estimated actions whose induced payoffs stay within ε/4 of the
//! estimates, and pure strategies are obtained by sampling from it. Every
//! returned profile has been verified.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{brute_force_pure_bne, decode, is_eps_bne, profile_count, BayesianGame, PureBayesProfile};
use crate::error::{Error, Result};
use crate::linprog::{LinearProgram, LpStatus};
use crate::rng::{seeded, Stream};

/// Slack that turns the strict support condition `q > M − ε/8` into `≥`.
const STRICT_SLACK: f64 = 1e-12;

/// `m = ⌈40 ln(nk) / ε²⌉`.
pub fn sample_count(n: usize, k: usize, eps: f64) -> usize {
    (40.0 * ((n * k) as f64).ln() / (eps * eps)).ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpOptions {
    /// Use exhaustive search when the larger type count is at most this;
    /// `None` means `m`.
    pub brute_force_threshold: Option<usize>,
    pub brute_force_budget: u128,
    /// Pure roundings drawn from each feasible LP solution.
    pub roundings_per_lp: usize,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self {
            brute_force_threshold: None,
            brute_force_budget: 10_000_000_000,
            roundings_per_lp: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolvePath {
    BruteForce,
    Sampling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BneAlgoTrace {
    pub path: SolvePath,
    pub m: usize,
    pub log_base: String,
    pub brute_force_threshold: usize,
    /// Row types sampled to estimate the column player's payoffs, and the
    /// actions guessed for them.
    pub sampled_types_row: Vec<usize>,
    pub guessed_actions_row: Vec<usize>,
    pub sampled_types_col: Vec<usize>,
    pub guessed_actions_col: Vec<usize>,
    pub q_row: Vec<Vec<f64>>,
    pub q_col: Vec<Vec<f64>>,
    pub threshold_row: Vec<f64>,
    pub threshold_col: Vec<f64>,
    pub x_row: Vec<Vec<f64>>,
    pub x_col: Vec<Vec<f64>>,
    pub rounding_seed: u64,
    pub guesses_tried: usize,
    pub infeasible_lps: usize,
}

impl BneAlgoTrace {
    fn empty(path: SolvePath, m: usize, threshold: usize, seed: u64) -> Self {
        Self {
            path,
            m,
            log_base: "e".into(),
            brute_force_threshold: threshold,
            sampled_types_row: Vec::new(),
            guessed_actions_row: Vec::new(),
            sampled_types_col: Vec::new(),
            guessed_actions_col: Vec::new(),
            q_row: Vec::new(),
            q_col: Vec::new(),
            threshold_row: Vec::new(),
            threshold_col: Vec::new(),
            x_row: Vec::new(),
            x_col: Vec::new(),
            rounding_seed: seed,
            guesses_tried: 0,
            infeasible_lps: 0,
        }
    }
}

/// `q[i][j] = (1/m) Σ_r u_row(j, s_r, i, t_r)` over sampled column types `t_r`
/// played with actions `s_r`.
pub fn estimate_row_payoffs(game: &BayesianGame, col_types: &[usize], col_actions: &[usize]) -> Vec<Vec<f64>> {
    let m = col_types.len().max(1) as f64;
    (0..game.k_row())
        .map(|i| {
            (0..game.n_row())
                .map(|j| {
                    col_types
                        .iter()
                        .zip(col_actions)
                        .map(|(&t, &s)| game.u_row(j, s, i, t))
                        .sum::<f64>()
                        / m
                })
                .collect()
        })
        .collect()
}

pub fn estimate_col_payoffs(game: &BayesianGame, row_types: &[usize], row_actions: &[usize]) -> Vec<Vec<f64>> {
    let m = row_types.len().max(1) as f64;
    (0..game.k_col())
        .map(|y| {
            (0..game.n_col())
                .map(|z| {
                    row_types
                        .iter()
                        .zip(row_actions)
                        .map(|(&t, &s)| game.u_col(s, z, t, y))
                        .sum::<f64>()
                        / m
                })
                .collect()
        })
        .collect()
}

pub fn qp_pure_bne_uniform(
    game: &BayesianGame,
    eps: f64,
    seed: u64,
    guess_budget: usize,
) -> Result<(PureBayesProfile, BneAlgoTrace)> {
    qp_pure_bne_uniform_with(game, eps, seed, guess_budget, &QpOptions::default())
}

pub fn qp_pure_bne_uniform_with(
    game: &BayesianGame,
    eps: f64,
    seed: u64,
    guess_budget: usize,
    opts: &QpOptions,
) -> Result<(PureBayesProfile, BneAlgoTrace)> {
    if eps < 0.0 {
        return Err(Error::NegativeEpsilon(eps));
    }
    if eps == 0.0 {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if !game.is_uniform() {
        return Err(Error::InvalidParameter("type distribution is not uniform".into()));
    }
    let n = game.n_row().max(game.n_col());
    let k = game.k_row().max(game.k_col());
    let m = sample_count(n, k, eps);
    let threshold = opts.brute_force_threshold.unwrap_or(m);

    if k <= threshold {
        let trace = BneAlgoTrace::empty(SolvePath::BruteForce, m, threshold, seed);
        return match brute_force_pure_bne(game, eps, opts.brute_force_budget)? {
            Some(p) => Ok((p, trace)),
            None => Err(Error::BneSearchFailed("no pure eps-BNE exists".into())),
        };
    }

    let mut sampler = seeded(seed, Stream::Sampling);
    let types_col: Vec<usize> = (0..m).map(|_| sampler.random_range(0..game.k_col())).collect();
    let types_row: Vec<usize> = (0..m).map(|_| sampler.random_range(0..game.k_row())).collect();
    let distinct = |v: &[usize]| {
        let mut d = v.to_vec();
        d.sort_unstable();
        d.dedup();
        d
    };
    let (distinct_col, distinct_row) = (distinct(&types_col), distinct(&types_row));
    let guess_space = profile_count(game.n_col(), distinct_col.len())
        .zip(profile_count(game.n_row(), distinct_row.len()))
        .and_then(|(a, b)| a.checked_mul(b));
    let exhaustive = guess_space.filter(|&s| s <= guess_budget as u128);
    let attempts = exhaustive.map_or(guess_budget, |s| s as usize);

    let mut guesser = seeded(seed, Stream::Guess);
    let mut rounder = seeded(seed, Stream::Rounding);
    let mut trace = BneAlgoTrace::empty(SolvePath::Sampling, m, threshold, seed);
    trace.sampled_types_col = types_col.clone();
    trace.sampled_types_row = types_row.clone();

    for attempt in 0..attempts {
        let (guess_col, guess_row) = match exhaustive {
            Some(_) => {
                let row_space = profile_count(game.n_row(), distinct_row.len()).expect("bounded");
                let hi = attempt as u128 / row_space;
                let lo = attempt as u128 % row_space;
                (
                    decode(hi, game.n_col(), distinct_col.len()),
                    decode(lo, game.n_row(), distinct_row.len()),
                )
            }
            None => (
                (0..distinct_col.len()).map(|_| guesser.random_range(0..game.n_col())).collect(),
                (0..distinct_row.len()).map(|_| guesser.random_range(0..game.n_row())).collect(),
            ),
        };
        let lookup = |types: &[usize], keys: &[usize], guess: &[usize]| -> Vec<usize> {
            types
                .iter()
                .map(|t| guess[keys.binary_search(t).expect("sampled type")])
                .collect()
        };
        let actions_col = lookup(&types_col, &distinct_col, &guess_col);
        let actions_row = lookup(&types_row, &distinct_row, &guess_row);
        let q_row = estimate_row_payoffs(game, &types_col, &actions_col);
        let q_col = estimate_col_payoffs(game, &types_row, &actions_row);
        trace.guesses_tried = attempt + 1;

        let Some(lp) = solve_lp(game, eps, &q_row, &q_col)? else {
            trace.infeasible_lps += 1;
            continue;
        };
        for _ in 0..opts.roundings_per_lp.max(1) {
            let profile = PureBayesProfile {
                s_row: lp.x_row.iter().map(|d| sample_from(&mut rounder, d)).collect(),
                s_col: lp.x_col.iter().map(|d| sample_from(&mut rounder, d)).collect(),
            };
            if is_eps_bne(game, &profile, eps)? {
                trace.guessed_actions_col = actions_col;
                trace.guessed_actions_row = actions_row;
                trace.q_row = q_row;
                trace.q_col = q_col;
                trace.threshold_row = lp.threshold_row;
                trace.threshold_col = lp.threshold_col;
                trace.x_row = lp.x_row;
                trace.x_col = lp.x_col;
                return Ok((profile, trace));
            }
        }
    }
    if trace.infeasible_lps == trace.guesses_tried {
        Err(Error::BneSearchFailed(format!(
            "LP infeasible on all {} guesses",
            trace.guesses_tried
        )))
    } else {
        Err(Error::BneSearchFailed(format!(
            "guess budget of {guess_budget} exhausted without a verified profile"
        )))
    }
}

fn sample_from(rng: &mut ChaCha8Rng, dist: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

struct LpOutcome {
    threshold_row: Vec<f64>,
    threshold_col: Vec<f64>,
    x_row: Vec<Vec<f64>>,
    x_col: Vec<Vec<f64>>,
}

fn near_best(q: &[Vec<f64>], eps: f64) -> (Vec<f64>, Vec<Vec<usize>>) {
    let thresholds: Vec<f64> = q
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let support = q
        .iter()
        .zip(&thresholds)
        .map(|(row, &best)| {
            (0..row.len())
                .filter(|&j| row[j] >= best - eps / 8.0 + STRICT_SLACK)
                .collect()
        })
        .collect();
    (thresholds, support)
}

/// Feasibility LP; `None` when infeasible.
fn solve_lp(
    game: &BayesianGame,
    eps: f64,
    q_row: &[Vec<f64>],
    q_col: &[Vec<f64>],
) -> Result<Option<LpOutcome>> {
    let (threshold_row, supp_row) = near_best(q_row, eps);
    let (threshold_col, supp_col) = near_best(q_col, eps);
    let mut var_row = Vec::new();
    for (i, s) in supp_row.iter().enumerate() {
        var_row.extend(s.iter().map(|&j| (i, j)));
    }
    let mut var_col = Vec::new();
    for (y, s) in supp_col.iter().enumerate() {
        var_col.extend(s.iter().map(|&z| (y, z)));
    }
    let offset = var_row.len();
    let nvars = offset + var_col.len();
    let mut lp = LinearProgram::maximize(vec![0.0; nvars]);

    for i in 0..game.k_row() {
        let row = (0..nvars)
            .map(|v| if v < offset && var_row[v].0 == i { 1.0 } else { 0.0 })
            .collect();
        lp = lp.eq(row, 1.0);
    }
    for y in 0..game.k_col() {
        let row = (0..nvars)
            .map(|v| if v >= offset && var_col[v - offset].0 == y { 1.0 } else { 0.0 })
            .collect();
        lp = lp.eq(row, 1.0);
    }

    // Induced payoff of row type i, action j: (1/k_col) Σ X_col[y][z] u_row(j, z, i, y).
    let kc = game.k_col() as f64;
    for i in 0..game.k_row() {
        for j in 0..game.n_row() {
            let mut row = vec![0.0; nvars];
            for (v, &(y, z)) in var_col.iter().enumerate() {
                row[offset + v] = game.u_row(j, z, i, y) / kc;
            }
            let (lo, hi) = value_range(&supp_col, |y, z| game.u_row(j, z, i, y) / kc);
            lp = add_band(lp, row, lo, hi, q_row[i][j], eps / 4.0);
        }
    }
    let kr = game.k_row() as f64;
    for y in 0..game.k_col() {
        for z in 0..game.n_col() {
            let mut row = vec![0.0; nvars];
            for (v, &(i, j)) in var_row.iter().enumerate() {
                row[v] = game.u_col(j, z, i, y) / kr;
            }
            let (lo, hi) = value_range(&supp_row, |i, j| game.u_col(j, z, i, y) / kr);
            lp = add_band(lp, row, lo, hi, q_col[y][z], eps / 4.0);
        }
    }

    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let spread = |vars: &[(usize, usize)], values: &[f64], types: usize, actions: usize| {
        let mut x = vec![vec![0.0; actions]; types];
        for (&(t, a), &p) in vars.iter().zip(values) {
            x[t][a] = p.max(0.0);
        }
        for d in &mut x {
            let total: f64 = d.iter().sum();
            d.iter_mut().for_each(|p| *p /= total);
        }
        x
    };
    Ok(Some(LpOutcome {
        threshold_row,
        threshold_col,
        x_row: spread(&var_row, &sol.point[..offset], game.k_row(), game.n_row()),
        x_col: spread(&var_col, &sol.point[offset..], game.k_col(), game.n_col()),
    }))
}

/// Range of `Σ_t Σ_a X[t][a] w(t, a)` over per-type distributions on `support`.
fn value_range(support: &[Vec<usize>], w: impl Fn(usize, usize) -> f64) -> (f64, f64) {
    support.iter().enumerate().fold((0.0, 0.0), |(lo, hi), (t, s)| {
        let vals = s.iter().map(|&a| w(t, a));
        let min = vals.clone().fold(f64::INFINITY, f64::min);
        let max = vals.fold(f64::NEG_INFINITY, f64::max);
        (lo + min, hi + max)
    })
}

/// Adds `target − slack ≤ row · X ≤ target + slack`, skipping sides implied by
/// the range `[lo, hi]` of `row · X`.
fn add_band(lp: LinearProgram, row: Vec<f64>, lo: f64, hi: f64, target: f64, slack: f64) -> LinearProgram {
    let lp = if hi > target + slack { lp.le(row.clone(), target + slack) } else { lp };
    if lo < target - slack {
        lp.ge(row, target - slack)
    } else {
        lp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesian::planted_bne_game;
    use ndarray::Array2;

    #[test]
    fn sample_count_spot_value() {
        assert_eq!(sample_count(16, 16, 0.5), 888);
    }

    #[test]
    fn constant_game_succeeds_on_first_rounding() {
        let g = BayesianGame::type_invariant(5, 5, Array2::from_elem((3, 3), 0.4), Array2::from_elem((3, 3), 0.7))
            .unwrap();
        let opts = QpOptions { brute_force_threshold: Some(0), ..QpOptions::default() };
        let (p, trace) = qp_pure_bne_uniform_with(&g, 0.5, 1, 10, &opts).unwrap();
        assert!(is_eps_bne(&g, &p, 0.5).unwrap());
        assert_eq!(trace.path, SolvePath::Sampling);
        assert_eq!(trace.guesses_tried, 1);
        assert_eq!(trace.sampled_types_col.len(), trace.m);
        for d in trace.x_row.iter().chain(&trace.x_col) {
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn brute_force_path_returns_planted_profile() {
        let (g, planted) = planted_bne_game(4, 3, 0.2, 6).unwrap();
        let (p, trace) = qp_pure_bne_uniform(&g, 0.1, 0, 100).unwrap();
        assert_eq!(trace.path, SolvePath::BruteForce);
        assert_eq!(p, planted);
    }

    #[test]
    fn sampling_path_on_dominance_game() {
        let (g, _) = planted_bne_game(12, 3, 0.2, 2).unwrap();
        let opts = QpOptions { brute_force_threshold: Some(0), ..QpOptions::default() };
        let (p, trace) = qp_pure_bne_uniform_with(&g, 0.9, 3, 200, &opts).unwrap();
        assert!(is_eps_bne(&g, &p, 0.9).unwrap());
        assert_eq!(trace.path, SolvePath::Sampling);
        // support restriction: X vanishes wherever q is below M − ε/8
        for (x, (q, m)) in trace.x_row.iter().zip(trace.q_row.iter().zip(&trace.threshold_row)) {
            for (p, v) in x.iter().zip(q) {
                assert!(*p == 0.0 || *v > m - 0.9 / 8.0);
            }
        }
    }

    #[test]
    fn non_uniform_games_are_rejected() {
        let dist = ndarray::array![[0.7, 0.1], [0.1, 0.1]];
        let m = std::sync::Arc::new(Array2::from_elem((2, 2), 0.5));
        let g = BayesianGame::new(dist, vec![m.clone(); 4], vec![m; 4]).unwrap();
        assert!(qp_pure_bne_uniform(&g, 0.1, 0, 1).is_err());
    }

    #[test]
    fn estimator_is_accurate_with_true_opponent_strategy() {
        // Sampled estimates of row payoffs against the true column strategy.
        let (g, planted) = planted_bne_game(30, 2, 0.2, 11).unwrap();
        let eps = 0.9;
        let m = sample_count(2, 30, eps);
        let truth = estimate_row_payoffs(&g, &(0..30).collect::<Vec<_>>(), &planted.s_col);
        let mut good = 0;
        for trial in 0..100 {
            let mut rng = seeded(trial, Stream::Sampling);
            let types: Vec<usize> = (0..m).map(|_| rng.random_range(0..30)).collect();
            let actions: Vec<usize> = types.iter().map(|&t| planted.s_col[t]).collect();
            let q = estimate_row_payoffs(&g, &types, &actions);
            let ok = q.iter().flatten().zip(truth.iter().flatten()).all(|(a, b)| (a - b).abs() < eps / 8.0);
            good += usize::from(ok);
        }
        assert!(good >= 70, "{good} of 100 trials within eps/8");
    }
}
