mod common;

use cliquenash::linprog::LpStatus;
use common::{random_bounded_lp, rng, vertex_enumeration_optimum};

#[test]
fn simplex_matches_vertex_enumeration_on_random_lps() {
    let mut r = rng(2024);
    let (mut optimal, mut infeasible) = (0, 0);
    for i in 0..500 {
        let lp = random_bounded_lp(&mut r);
        let sol = lp.solve().unwrap();
        match vertex_enumeration_optimum(&lp) {
            Some(best) => {
                optimal += 1;
                assert_eq!(sol.status, LpStatus::Optimal, "lp {i}: {lp:?}");
                assert!((sol.objective_value - best).abs() <= 1e-6, "lp {i}: {} vs {best}", sol.objective_value);
                assert!(lp.violation(&sol.point) <= 1e-7, "lp {i}");
            }
            None => {
                infeasible += 1;
                assert_eq!(sol.status, LpStatus::Infeasible, "lp {i}: {lp:?}");
            }
        }
    }
    assert!(optimal > 300 && infeasible > 0, "{optimal} optimal, {infeasible} infeasible");
}

#[test]
fn free_improving_direction_is_unbounded() {
    let mut r = rng(7);
    for _ in 0..50 {
        let bounded = random_bounded_lp(&mut r);
        let feasible = vertex_enumeration_optimum(&bounded).is_some();
        let mut lp = bounded;
        lp.objective.push(1.0);
        lp.lower.push(0.0);
        lp.ineq_lhs.iter_mut().for_each(|row| row.push(0.0));
        lp.eq_lhs.iter_mut().for_each(|row| row.push(0.0));
        let expected = if feasible { LpStatus::Unbounded } else { LpStatus::Infeasible };
        assert_eq!(lp.solve().unwrap().status, expected);
    }
}
