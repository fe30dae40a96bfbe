//! Bayesian game encoding 3-colourability of a 4-regular graph.
//!
//! Types are vertices. With probability 1/5 both players see the same vertex,
//! otherwise an ordered edge. Actions are `colour * 2 + coin` for colours
//! `0..3` and coins `0..2`. A satisfied pair (same colour on a vertex, different
//! colours on an edge) pays 1 to both; a violated pair is zero-sum-like in the
//! coins: the row player collects the stake when coins agree, the column player
//! when they differ. Stakes are 0.64 on vertices and `0.01 · 2^{c(e)}` on an
//! edge with colour `c(e) ∈ 1..=5` from a proper edge colouring.

use std::sync::Arc;

use ndarray::Array2;

use super::{edge_coloring, BayesianGame, PureBayesProfile};
use crate::error::{Error, Result};
use crate::graph::PlantedGraph;

/// Approximation level below which the gadget has no pure ε-BNE on
/// non-3-colourable graphs.
pub const EPS_GADGET: f64 = 0.004;
pub const VERTEX_STAKE: f64 = 0.64;

const ACTIONS: usize = 6;

fn violated_pair(stake: f64, satisfied: impl Fn(usize, usize) -> bool) -> (Array2<f64>, Array2<f64>) {
    let mut mr = Array2::zeros((ACTIONS, ACTIONS));
    let mut mc = Array2::zeros((ACTIONS, ACTIONS));
    for a in 0..ACTIONS {
        for b in 0..ACTIONS {
            if satisfied(a / 2, b / 2) {
                mr[[a, b]] = 1.0;
                mc[[a, b]] = 1.0;
            } else if a % 2 == b % 2 {
                mr[[a, b]] = stake;
            } else {
                mc[[a, b]] = stake;
            }
        }
    }
    (mr, mc)
}

pub fn build_coloring_hardness_game(graph: &PlantedGraph) -> Result<BayesianGame> {
    let n = graph.n();
    if let Some(v) = (0..n).find(|&v| graph.degree(v) != 4) {
        return Err(Error::NotFourRegular { vertex: v, degree: graph.degree(v) });
    }
    if n == 0 || !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let coloring = edge_coloring(graph);
    let ordered_pairs = 2 * coloring.len();

    let zero = Arc::new(Array2::zeros((ACTIONS, ACTIONS)));
    let (vr, vc) = violated_pair(VERTEX_STAKE, |a, b| a == b);
    let (vr, vc) = (Arc::new(vr), Arc::new(vc));
    let mut edge_mats = Vec::with_capacity(5);
    for c in 1..=5 {
        let (er, ec) = violated_pair(0.01 * f64::from(1u32 << c), |a, b| a != b);
        edge_mats.push((Arc::new(er), Arc::new(ec)));
    }

    let mut dist = Array2::zeros((n, n));
    let mut u_row = vec![zero.clone(); n * n];
    let mut u_col = vec![zero; n * n];
    for v in 0..n {
        dist[[v, v]] = 0.2 / n as f64;
        u_row[v * n + v] = vr.clone();
        u_col[v * n + v] = vc.clone();
    }
    for (&(u, v), &c) in &coloring {
        if c >= 5 {
            return Err(Error::Internal(format!("edge colouring used colour {c}")));
        }
        for (a, b) in [(u, v), (v, u)] {
            dist[[a, b]] = 0.8 / ordered_pairs as f64;
            u_row[a * n + b] = edge_mats[c].0.clone();
            u_col[a * n + b] = edge_mats[c].1.clone();
        }
    }
    BayesianGame::new(dist, u_row, u_col)
}

/// Both players play `(colour(v), 0)` at every vertex `v`.
pub fn coloring_profile(colors: &[usize]) -> Result<PureBayesProfile> {
    if colors.iter().any(|&c| c >= 3) {
        return Err(Error::InvalidParameter("colours must lie in 0..3".into()));
    }
    let s: Vec<usize> = colors.iter().map(|&c| 2 * c).collect();
    Ok(PureBayesProfile { s_row: s.clone(), s_col: s })
}

/// A proper vertex 3-colouring, found by backtracking in index order.
pub fn three_coloring(graph: &PlantedGraph) -> Option<Vec<usize>> {
    fn extend(graph: &PlantedGraph, colors: &mut Vec<usize>) -> bool {
        let v = colors.len();
        if v == graph.n() {
            return true;
        }
        for c in 0..3 {
            if (0..v).all(|u| !graph.adjacent(u, v) || colors[u] != c) {
                colors.push(c);
                if extend(graph, colors) {
                    return true;
                }
                colors.pop();
            }
        }
        false
    }
    let mut colors = Vec::with_capacity(graph.n());
    extend(graph, &mut colors).then_some(colors)
}

/// Per-type payoff change from flipping the coin coordinate of the played action.
pub fn coin_flip_deltas(game: &BayesianGame, profile: &PureBayesProfile) -> Result<(Vec<f64>, Vec<f64>)> {
    game.check(profile)?;
    if game.n_row() != ACTIONS || game.n_col() != ACTIONS {
        return Err(Error::DimensionMismatch("coin flips need the six-action gadget".into()));
    }
    let delta_row = (0..game.k_row())
        .map(|t| {
            game.row_action_payoffs(t, &profile.s_col)
                .map_or(0.0, |v| v[profile.s_row[t] ^ 1] - v[profile.s_row[t]])
        })
        .collect();
    let delta_col = (0..game.k_col())
        .map(|t| {
            game.col_action_payoffs(t, &profile.s_row)
                .map_or(0.0, |v| v[profile.s_col[t] ^ 1] - v[profile.s_col[t]])
        })
        .collect();
    Ok((delta_row, delta_col))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesian::{
        brute_force_pure_bne, brute_force_pure_bne_with, bne_regret, is_eps_bne, RegretBound,
    };
    use crate::graph::{complete_graph, octahedron, random_four_regular};
    use crate::rng::{seeded, Stream};
    use rand::Rng;

    #[test]
    fn stakes_and_distribution() {
        let g = build_coloring_hardness_game(&octahedron()).unwrap();
        assert!((g.type_dist().sum() - 1.0).abs() < 1e-12);
        for v in 0..6 {
            assert!((g.type_dist().row(v).sum() - 1.0 / 6.0).abs() < 1e-12);
            assert!((g.type_dist()[[v, v]] / g.type_dist().row(v).sum() - 0.2).abs() < 1e-12);
        }
        let mut stakes: Vec<f64> = (0..6)
            .flat_map(|u| (0..6).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && g.type_dist()[[u, v]] > 0.0)
            // colours equal, coins equal: the row player's stake
            .map(|(u, v)| g.u_row(0, 0, u, v))
            .collect();
        stakes.sort_by(f64::total_cmp);
        stakes.dedup();
        for s in &stakes {
            assert!([0.02, 0.04, 0.08, 0.16, 0.32].iter().any(|x| (x - s).abs() < 1e-12));
        }
        assert_eq!(g.u_row(0, 2, 3, 3), VERTEX_STAKE);
        assert_eq!(g.u_col(0, 3, 3, 3), VERTEX_STAKE);
        assert_eq!(g.u_row(0, 3, 3, 3), 0.0);
        assert_eq!(EPS_GADGET, 0.004);
    }

    #[test]
    fn proper_coloring_of_octahedron_is_exact_bne_with_payoff_one() {
        let g = build_coloring_hardness_game(&octahedron()).unwrap();
        let p = coloring_profile(&[0, 1, 2, 0, 1, 2]).unwrap();
        let cert = bne_regret(&g, &p).unwrap();
        assert!(cert.p_row.iter().chain(&cert.p_col).all(|&x| (x - 1.0).abs() < 1e-12));
        assert!(is_eps_bne(&g, &p, 0.0).unwrap());
    }

    #[test]
    fn three_coloring_checker() {
        let c = three_coloring(&octahedron()).unwrap();
        assert!(octahedron().edges().iter().all(|&(u, v)| c[u] != c[v]));
        assert_eq!(three_coloring(&complete_graph(5)), None);
        assert_eq!(three_coloring(&complete_graph(4)), None);
        assert!(three_coloring(&random_four_regular(9, 1).unwrap()).is_some());
        assert!(three_coloring(&random_four_regular(7, 1).unwrap()).is_none());
    }

    #[test]
    fn improper_attempt_on_k5_has_regret() {
        let g = build_coloring_hardness_game(&complete_graph(5)).unwrap();
        let p = coloring_profile(&[0, 1, 2, 0, 1]).unwrap();
        assert!(bne_regret(&g, &p).unwrap().max_regret >= EPS_GADGET);
    }

    #[test]
    fn k5_has_no_profile_with_regret_below_the_gadget_eps() {
        let g = build_coloring_hardness_game(&complete_graph(5)).unwrap();
        assert_eq!(brute_force_pure_bne_with(&g, RegretBound::Below(EPS_GADGET), u128::MAX).unwrap(), None);
        // Regrets are multiples of 0.004, so the closed bound is attained exactly.
        let p = brute_force_pure_bne(&g, EPS_GADGET, u128::MAX).unwrap().unwrap();
        assert!((bne_regret(&g, &p).unwrap().max_regret - EPS_GADGET).abs() < 1e-9);
    }

    #[test]
    fn octahedron_lex_first_exact_bne_pays_one() {
        let g = build_coloring_hardness_game(&octahedron()).unwrap();
        let p = brute_force_pure_bne(&g, 0.0, u128::MAX).unwrap().unwrap();
        let cert = bne_regret(&g, &p).unwrap();
        assert!(cert.p_row.iter().chain(&cert.p_col).all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn rejects_non_regular_or_disconnected() {
        assert!(matches!(
            build_coloring_hardness_game(&complete_graph(4)),
            Err(Error::NotFourRegular { .. })
        ));
        let two_k5: Vec<(usize, usize)> = (0..10)
            .flat_map(|u| (u + 1..10).map(move |v| (u, v)))
            .filter(|&(u, v)| (u < 5) == (v < 5))
            .collect();
        let g = PlantedGraph::from_edges(10, &two_k5).unwrap();
        assert_eq!(build_coloring_hardness_game(&g), Err(Error::Disconnected));
    }

    #[test]
    fn coin_deltas_cancel_and_are_quantized() {
        let graphs = [octahedron(), complete_graph(5), random_four_regular(11, 3).unwrap()];
        let mut rng = seeded(9, Stream::Profile);
        for graph in &graphs {
            let game = build_coloring_hardness_game(graph).unwrap();
            for _ in 0..100 {
                let p = PureBayesProfile {
                    s_row: (0..graph.n()).map(|_| rng.random_range(0..6)).collect(),
                    s_col: (0..graph.n()).map(|_| rng.random_range(0..6)).collect(),
                };
                let (dr, dc) = coin_flip_deltas(&game, &p).unwrap();
                let total: f64 = dr.iter().chain(&dc).sum();
                assert!(total.abs() < 1e-9);
                for d in dr.iter().chain(&dc) {
                    let q = d / EPS_GADGET;
                    assert!((q - q.round()).abs() * EPS_GADGET < 1e-9);
                }
            }
        }
    }
}
