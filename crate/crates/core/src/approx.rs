//! Approximate-equilibrium algorithms.
//!
//! * [`dmp_half_equilibrium`]: the best-response ½-equilibrium with row support
//!   at most two and a pure column strategy.
//! * [`optimal_value_half_equilibrium`]: one LP per pure strategy of either
//!   player; returns a ½-equilibrium whose value is at least that of every exact
//!   Nash equilibrium.
//! * [`small_support_search`]: exhaustive search over k-uniform profiles.
//! * [`enumerate_nash_support`]: exact support enumeration, used as a test oracle.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{argmax, unit, BimatrixGame, MixedProfile, TOL};
use crate::linprog::{LinearProgram, LpStatus};

/// Default cap on the number of profile pairs examined by exhaustive searches.
pub const DEFAULT_SEARCH_CAP: u128 = 20_000_000;

/// Probabilities below this are treated as zero by the support enumerator.
const ZERO_PROB: f64 = 1e-10;

pub fn dmp_half_equilibrium(game: &BimatrixGame, start_row: usize) -> Result<MixedProfile> {
    let e_i = unit(game.rows(), start_row)?;
    let j = game.col_best_response(&e_i);
    let e_j = unit(game.cols(), j)?;
    let k = game.row_best_response(&e_j);
    let mut x = vec![0.0; game.rows()];
    x[start_row] += 0.5;
    x[k] += 0.5;
    MixedProfile::new(x, e_j)
}

/// Which player is held at a pure strategy in an LP candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PureSide {
    Column(usize),
    Row(usize),
}

/// LP for a fixed pure column `j`: the row mixture maximizing value subject to
/// both players having regret at most ½.
fn half_lp_for_column(game: &BimatrixGame, j: usize) -> LinearProgram {
    let (mr, mc) = (game.m_row(), game.m_col());
    let rows = game.rows();
    let objective = (0..rows).map(|i| 0.5 * (mr[[i, j]] + mc[[i, j]])).collect();
    let mut lp = LinearProgram::maximize(objective).eq(vec![1.0; rows], 1.0);
    for jp in 0..game.cols() {
        if jp != j {
            lp = lp.le((0..rows).map(|i| mc[[i, jp]] - mc[[i, j]]).collect(), 0.5);
        }
    }
    let col_j: Vec<f64> = (0..rows).map(|i| mr[[i, j]]).collect();
    let best = col_j.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Only the best deviation binds: e_iᵀM_row e_j ≤ xᵀM_row e_j + ½ for all i.
    lp.ge(col_j, best - 0.5)
}

pub fn optimal_value_half_equilibrium(game: &BimatrixGame) -> Result<(MixedProfile, f64)> {
    let transposed = game.transpose();
    let sides: Vec<PureSide> = (0..game.cols())
        .map(PureSide::Column)
        .chain((0..game.rows()).map(PureSide::Row))
        .collect();
    let candidates: Vec<Option<(MixedProfile, f64)>> = sides
        .par_iter()
        .map(|side| -> Result<Option<(MixedProfile, f64)>> {
            let (lp, len) = match *side {
                PureSide::Column(j) => (half_lp_for_column(game, j), game.rows()),
                PureSide::Row(i) => (half_lp_for_column(&transposed, i), game.cols()),
            };
            let sol = lp.solve()?;
            if sol.status != LpStatus::Optimal {
                return Ok(None);
            }
            let mixed = clean_distribution(&sol.point[..len]);
            let profile = match *side {
                PureSide::Column(j) => MixedProfile::new(mixed, unit(game.cols(), j)?)?,
                PureSide::Row(i) => MixedProfile::new(unit(game.rows(), i)?, mixed)?,
            };
            let value = game.value(&profile)?;
            Ok(Some((profile, value)))
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(MixedProfile, f64)> = None;
    for cand in candidates.into_iter().flatten() {
        if best.as_ref().is_none_or(|(_, v)| cand.1 > *v) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::Internal("every half-equilibrium LP was infeasible".into()))
}

/// Clamps round-off negatives and renormalizes onto the simplex.
fn clean_distribution(v: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().map(|p| if *p < ZERO_PROB { 0.0 } else { *p }).collect();
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= s);
    out
}

/// Number of multisets of size `1..=k` drawn from `n` items.
fn multiset_count(n: usize, k: usize) -> u128 {
    (1..=k as u128)
        .map(|s| binomial(n as u128 + s - 1, s))
        .fold(0u128, |a, b| a.saturating_add(b))
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All distinct k-uniform strategies over `n` actions: uniform distributions
/// over multisets of size at most `k`, smallest multisets first.
pub fn k_uniform_strategies(n: usize, k: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for size in 1..=k {
        for multiset in (0..n).combinations_with_replacement(size) {
            let mut counts = vec![0usize; n];
            multiset.iter().for_each(|&i| counts[i] += 1);
            if counts.iter().fold(0, |g, &c| gcd(g, c)) != 1 {
                continue;
            }
            out.push(counts.iter().map(|&c| c as f64 / size as f64).collect());
        }
    }
    out
}

/// Exhaustive search over k-uniform profiles for an ε-equilibrium with value at
/// least `value_floor`. Returns `Ok(None)` when the searched class has none.
pub fn small_support_search(
    game: &BimatrixGame,
    eps: f64,
    k: usize,
    value_floor: Option<f64>,
    cap: u128,
) -> Result<Option<MixedProfile>> {
    if k == 0 {
        return Err(Error::InvalidParameter("support bound k must be at least 1".into()));
    }
    if eps < 0.0 {
        return Err(Error::NegativeEpsilon(eps));
    }
    let required = multiset_count(game.rows(), k).saturating_mul(multiset_count(game.cols(), k));
    if required > cap {
        return Err(Error::BudgetExceeded { required, cap });
    }
    let xs = k_uniform_strategies(game.rows(), k);
    let ys = k_uniform_strategies(game.cols(), k);
    let row_vecs: Vec<_> = ys.iter().map(|y| game.row_payoff_vector(y)).collect();
    let best_row: Vec<f64> = row_vecs
        .iter()
        .map(|v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let floor = value_floor.unwrap_or(f64::NEG_INFINITY);

    let hit = xs.par_iter().find_map_first(|x| {
        let col_vec = game.col_payoff_vector(x);
        let best_col = col_vec.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ys.iter().enumerate().find_map(|(yi, y)| {
            let pr: f64 = x.iter().zip(row_vecs[yi].iter()).map(|(a, b)| a * b).sum();
            let pc: f64 = col_vec.iter().zip(y).map(|(a, b)| a * b).sum();
            let ok = best_row[yi] - pr <= eps + TOL
                && best_col - pc <= eps + TOL
                && 0.5 * (pr + pc) >= floor - TOL;
            ok.then(|| (x.clone(), y.clone()))
        })
    });
    hit.map(|(x, y)| MixedProfile::new(x, y)).transpose()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Mixed strategy over `cols` (indexes into the opponent's matrix axis) that
/// makes every strategy in `rows` indifferent under `m(i, j)`.
fn indifferent_mix(
    rows: &[usize],
    cols: &[usize],
    payoff: impl Fn(usize, usize) -> f64,
    len: usize,
) -> Option<Vec<f64>> {
    let s = cols.len();
    let mut a = Vec::with_capacity(s + 1);
    let mut b = Vec::with_capacity(s + 1);
    for &i in rows {
        let mut row: Vec<f64> = cols.iter().map(|&j| payoff(i, j)).collect();
        row.push(-1.0);
        a.push(row);
        b.push(0.0);
    }
    let mut sum_row = vec![1.0; s];
    sum_row.push(0.0);
    a.push(sum_row);
    b.push(1.0);
    let sol = solve_square(a, b)?;
    if sol[..s].iter().any(|p| *p < -ZERO_PROB) {
        return None;
    }
    let mut full = vec![0.0; len];
    for (&j, &p) in cols.iter().zip(&sol[..s]) {
        full[j] = p;
    }
    Some(clean_distribution(&full))
}

/// All exact Nash equilibria with equal-size supports of size at most
/// `max_support`, found by solving the indifference system of every support pair.
pub fn enumerate_nash_support(
    game: &BimatrixGame,
    max_support: usize,
    cap: u128,
) -> Result<Vec<(MixedProfile, f64)>> {
    let (r, c) = (game.rows(), game.cols());
    let max_s = max_support.min(r).min(c);
    let required = (1..=max_s as u128)
        .map(|s| binomial(r as u128, s).saturating_mul(binomial(c as u128, s)))
        .fold(0u128, |a, b| a.saturating_add(b));
    if required > cap {
        return Err(Error::BudgetExceeded { required, cap });
    }
    let (mr, mc) = (game.m_row(), game.m_col());
    let mut found: Vec<(MixedProfile, f64)> = Vec::new();
    for s in 1..=max_s {
        for rows in (0..r).combinations(s) {
            for cols in (0..c).combinations(s) {
                let Some(y) = indifferent_mix(&rows, &cols, |i, j| mr[[i, j]], c) else {
                    continue;
                };
                let Some(x) = indifferent_mix(&cols, &rows, |j, i| mc[[i, j]], r) else {
                    continue;
                };
                let profile = MixedProfile::new(x, y)?;
                let cert = game.regret(&profile)?;
                if cert.max_regret() > 1e-8 {
                    continue;
                }
                let duplicate = found.iter().any(|(p, _)| {
                    p.x.iter().zip(&profile.x).all(|(a, b)| (a - b).abs() < 1e-9)
                        && p.y.iter().zip(&profile.y).all(|(a, b)| (a - b).abs() < 1e-9)
                });
                if !duplicate {
                    found.push((profile, cert.value));
                }
            }
        }
    }
    Ok(found)
}

/// Best value over a list of equilibria, if any.
pub fn best_value(equilibria: &[(MixedProfile, f64)]) -> Option<f64> {
    equilibria.get(argmax(equilibria.iter().map(|e| e.1))).map(|e| e.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pennies() -> BimatrixGame {
        BimatrixGame::from_rows(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap()
    }

    fn coordination() -> BimatrixGame {
        let m = vec![vec![1.0, 0.0], vec![0.0, 0.5]];
        BimatrixGame::from_rows(m.clone(), m).unwrap()
    }

    fn random_game(rng: &mut ChaCha8Rng, r: usize, c: usize) -> BimatrixGame {
        let mut draw = || Array2::from_shape_fn((r, c), |_| rng.random::<f64>());
        let a = draw();
        let b = draw();
        BimatrixGame::new(a, b).unwrap()
    }

    #[test]
    fn dmp_on_identity_coordination() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        let g = BimatrixGame::from_rows(m.clone(), m).unwrap();
        let p = dmp_half_equilibrium(&g, 0).unwrap();
        assert_eq!(p.x, vec![1.0, 0.0]);
        assert_eq!(p.y, vec![1.0, 0.0]);
        let cert = g.regret(&p).unwrap();
        assert_eq!((cert.regret_row, cert.regret_col), (0.0, 0.0));
    }

    #[test]
    fn dmp_on_matching_pennies() {
        let g = pennies();
        let p = dmp_half_equilibrium(&g, 0).unwrap();
        assert_eq!(p.y, vec![0.0, 1.0]);
        assert_eq!(p.x, vec![0.5, 0.5]);
        assert!(g.regret(&p).unwrap().max_regret() <= 0.5 + 1e-12);
        assert!(dmp_half_equilibrium(&g, 2).is_err());
    }

    #[test]
    fn optimal_half_on_coordination() {
        let (p, v) = optimal_value_half_equilibrium(&coordination()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(p.x, vec![1.0, 0.0]);
        assert_eq!(p.y, vec![1.0, 0.0]);
    }

    #[test]
    fn optimal_half_on_matching_pennies() {
        let (p, v) = optimal_value_half_equilibrium(&pennies()).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!(pennies().is_eps_equilibrium(&p, 0.5).unwrap());
    }

    #[test]
    fn small_support_examples() {
        let p = small_support_search(&pennies(), 0.0, 2, None, DEFAULT_SEARCH_CAP)
            .unwrap()
            .unwrap();
        assert_eq!(p.x, vec![0.5, 0.5]);
        assert_eq!(p.y, vec![0.5, 0.5]);

        let one = BimatrixGame::from_rows(vec![vec![1.0]], vec![vec![1.0]]).unwrap();
        let p = small_support_search(&one, 0.0, 1, None, DEFAULT_SEARCH_CAP)
            .unwrap()
            .unwrap();
        assert_eq!((p.x, p.y), (vec![1.0], vec![1.0]));

        assert!(small_support_search(&pennies(), 0.4, 1, None, DEFAULT_SEARCH_CAP)
            .unwrap()
            .is_none());
    }

    #[test]
    fn small_support_value_floor_and_budget() {
        let g = coordination();
        let p = small_support_search(&g, 0.0, 1, Some(0.9), DEFAULT_SEARCH_CAP)
            .unwrap()
            .unwrap();
        assert_eq!(p.x, vec![1.0, 0.0]);
        assert!(small_support_search(&g, 0.0, 1, Some(1.01), DEFAULT_SEARCH_CAP)
            .unwrap()
            .is_none());
        assert!(matches!(
            small_support_search(&g, 0.0, 3, None, 10),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(small_support_search(&g, 0.0, 0, None, 10).is_err());
    }

    #[test]
    fn k_uniform_class_is_deduplicated() {
        // sizes 1 and 2 over 2 actions: {0}, {1}, {0,1}
        assert_eq!(k_uniform_strategies(2, 2).len(), 3);
        // size 3 adds {0,0,1} and {0,1,1}
        assert_eq!(k_uniform_strategies(2, 3).len(), 5);
    }

    #[test]
    fn support_enumeration_examples() {
        let eqs = enumerate_nash_support(&pennies(), 2, DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!(eqs.len(), 1);
        assert!(eqs[0].0.x.iter().all(|p| (p - 0.5).abs() < 1e-12));

        let eqs = enumerate_nash_support(&coordination(), 2, DEFAULT_SEARCH_CAP).unwrap();
        let has = |i: usize, v: f64| {
            eqs.iter()
                .any(|(p, val)| p.x[i] == 1.0 && p.y[i] == 1.0 && (val - v).abs() < 1e-12)
        };
        assert!(has(0, 1.0) && has(1, 0.5));

        let zero = BimatrixGame::new(Array2::zeros((2, 3)), Array2::zeros((2, 3))).unwrap();
        let eqs = enumerate_nash_support(&zero, 1, DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!(eqs.len(), 6);
    }

    #[test]
    fn optimal_half_dominates_exact_equilibria_on_random_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let (r, c) = (rng.random_range(2..=4), rng.random_range(2..=4));
            let g = random_game(&mut rng, r, c);
            let (p, v) = optimal_value_half_equilibrium(&g).unwrap();
            assert!(g.regret(&p).unwrap().max_regret() <= 0.5 + 1e-9);
            let eqs = enumerate_nash_support(&g, 4, DEFAULT_SEARCH_CAP).unwrap();
            assert!(!eqs.is_empty());
            assert!(v >= best_value(&eqs).unwrap() - 1e-7);
            for (e, _) in &eqs {
                assert!(g.regret(e).unwrap().max_regret() <= 1e-8);
            }
        }
    }

    fn arb_game() -> impl Strategy<Value = BimatrixGame> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            (
                prop::collection::vec(0.0f64..=1.0, r * c),
                prop::collection::vec(0.0f64..=1.0, r * c),
            )
                .prop_map(move |(a, b)| {
                    BimatrixGame::new(
                        Array2::from_shape_vec((r, c), a).unwrap(),
                        Array2::from_shape_vec((r, c), b).unwrap(),
                    )
                    .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn dmp_is_half_equilibrium_for_every_start(g in arb_game()) {
            for i in 0..g.rows() {
                let p = dmp_half_equilibrium(&g, i).unwrap();
                prop_assert!(g.is_eps_equilibrium(&p, 0.5).unwrap());
                prop_assert!(p.support_x().len() <= 2);
                prop_assert_eq!(p.support_y().len(), 1);
            }
        }

        #[test]
        fn k3_search_always_finds_a_half_equilibrium(g in arb_game()) {
            let found = small_support_search(&g, 0.5, 3, None, DEFAULT_SEARCH_CAP).unwrap();
            prop_assert!(found.is_some());
        }
    }
}
