use cliquenash::game::{tv_distance, unit, uniform_on};
use cliquenash::graph::sample_planted_clique;
use cliquenash::reductions::{
    build_hk_game, build_second_equilibrium_game, build_small_support_game, params_eps_hardness,
    params_small_support, params_value_hardness, ReductionArtifact,
};
use cliquenash::MixedProfile;
use proptest::prelude::*;

fn hk(n: usize, k: usize, n_big: usize, seed: u64) -> ReductionArtifact {
    let g = sample_planted_clique(n, k, seed).unwrap();
    build_hk_game(&g, &params_eps_hardness(0.07).unwrap().with_n_big(n_big), seed).unwrap()
}

#[test]
fn hk_blocks_match_their_definition() {
    let art = hk(20, 6, 30, 4);
    let (mr, mc) = (art.game.m_row(), art.game.m_col());
    let p = &art.params;
    let n = 20;
    for i in 0..art.layout.dim {
        for j in 0..art.layout.dim {
            match (i < n, j < n) {
                (true, true) => {
                    let a = if art.source.adjacent(i, j) { p.alpha } else { 0.0 };
                    assert_eq!((mr[[i, j]], mc[[i, j]]), (a, a));
                }
                (false, true) => {
                    assert!(mr[[i, j]] == 0.0 || mr[[i, j]] == 1.0);
                    assert_eq!(mc[[i, j]], 0.0);
                }
                (true, false) => {
                    assert_eq!(mr[[i, j]], 0.0);
                    assert_eq!(mc[[i, j]], mr[[j, i]]);
                }
                (false, false) => assert_eq!((mr[[i, j]], mc[[i, j]]), (p.gamma, p.gamma)),
            }
        }
    }
    assert!(art.layout.is_partition());
}

#[test]
fn clique_profile_has_conditional_value_alpha() {
    let art = hk(30, 8, 40, 9);
    let clique = art.source.planted().unwrap().to_vec();
    let x = uniform_on(art.layout.dim, &clique).unwrap();
    let p = MixedProfile::new(x.clone(), x).unwrap();
    let v = art.game.conditional_value(&p, &(0..30).collect::<Vec<_>>()).unwrap();
    assert_eq!(v, art.params.alpha);
}

#[test]
fn artifact_file_round_trip_rebuilds_the_game() {
    let art = hk(15, 5, 20, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("artifact.json");
    std::fs::write(&path, serde_json::to_string(&art).unwrap()).unwrap();
    let back: ReductionArtifact = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back.game, art.game);
    assert_eq!(back.layout, art.layout);
    assert_eq!(back.params, art.params);
}

#[test]
fn small_support_complement_and_copy_identities() {
    let g = sample_planted_clique(16, 5, 2).unwrap();
    let params = params_small_support(0.4).unwrap().with_blocks(7, 3);
    let art = build_small_support_game(&g, &params, 2).unwrap();
    let (mr, mc) = (art.game.m_row(), art.game.m_col());
    let aux = art.layout.auxiliary();
    assert_eq!(aux.len(), 21);
    for i in aux.clone() {
        for j in aux.clone() {
            assert_eq!(mr[[i, j]] + mc[[i, j]], 1.0);
        }
    }
    let first = art.layout.copy_blocks[0].clone();
    for block in &art.layout.copy_blocks {
        for (i, i0) in block.clone().zip(first.clone()) {
            for v in 0..16 {
                assert_eq!(mr[[i, v]], mr[[i0, v]]);
                assert_eq!(mc[[v, i]], mc[[v, i0]]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn appended_strategy_is_an_exact_pure_equilibrium(seed in 0u64..1000, lambda in 0.05f64..0.95) {
        let g = sample_planted_clique(12, 4, seed).unwrap();
        let p = params_value_hardness(0.1).unwrap().with_n_big(10);
        let art = build_second_equilibrium_game(&build_hk_game(&g, &p, seed).unwrap(), lambda).unwrap();
        let e = art.layout.extra_strategy.unwrap();
        let pure = MixedProfile::new(unit(art.layout.dim, e).unwrap(), unit(art.layout.dim, e).unwrap()).unwrap();
        let cert = art.game.regret(&pure).unwrap();
        prop_assert_eq!(cert.regret_row, 0.0);
        prop_assert_eq!(cert.regret_col, 0.0);
        let clique = uniform_on(art.layout.dim, g.planted().unwrap()).unwrap();
        prop_assert_eq!(tv_distance(&clique, &pure.x).unwrap(), 1.0);
    }

    #[test]
    fn layouts_partition_the_strategy_space(
        n in 4usize..20, n_big in 1usize..30, n1 in 1usize..8, n2 in 1usize..4, seed in 0u64..100,
    ) {
        let g = sample_planted_clique(n, 3, seed).unwrap();
        let hk = build_hk_game(&g, &params_eps_hardness(0.07).unwrap().with_n_big(n_big), seed).unwrap();
        prop_assert!(hk.layout.is_partition());
        prop_assert_eq!(hk.layout.dim, n + n_big);
        let ss = build_small_support_game(&g, &params_small_support(0.2).unwrap().with_blocks(n1, n2), seed).unwrap();
        prop_assert!(ss.layout.is_partition());
        prop_assert_eq!(ss.layout.copy_blocks.len(), n2);
        let se = build_second_equilibrium_game(&hk, 0.8).unwrap();
        prop_assert!(se.layout.is_partition());
    }

    #[test]
    fn payoffs_stay_in_unit_interval(seed in 0u64..200, eta in 0.01f64..0.49) {
        let g = sample_planted_clique(10, 3, seed).unwrap();
        let art = build_small_support_game(&g, &params_small_support(eta).unwrap().with_blocks(4, 2), seed).unwrap();
        prop_assert!(art.game.m_row().iter().chain(art.game.m_col()).all(|v| (0.0..=1.0).contains(v)));
    }
}
