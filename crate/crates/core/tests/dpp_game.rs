use std::sync::Arc;

use deadcore::game::{run_game, GameConfig};
use deadcore::solver::{ball_offsets, dpp_iterate, solve_p_harmonic, SolverConfig};
use deadcore::*;
use proptest::prelude::*;

fn cos_theta(x: &[f64]) -> f64 {
    let r = x[0].hypot(x[1]);
    if r > 0.0 {
        x[0] / r
    } else {
        1.0
    }
}

#[test]
fn dpp_approaches_fd_as_eps_shrinks() {
    let grid = Arc::new(GridDomain::ball(2, 1.0, 32, 9).unwrap());
    let h = grid.h();
    let cfg = SolverConfig::default();
    let data = BoundaryData::new(cos_theta);
    let fd = solve_p_harmonic(grid.clone(), &data, 4.0, &cfg).unwrap();
    let gaps: Vec<f64> = [8.0, 4.0, 2.0]
        .iter()
        .map(|&k| {
            let u = dpp_iterate(grid.clone(), &data, 4.0, k * h, &cfg).unwrap();
            assert!(u.report.converged);
            grid.interior_nodes().iter().map(|&n| (u.values[n] - fd.values[n]).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "gaps {gaps:?}");
    assert!(gaps[1] <= 0.05);
}

#[test]
fn dpp_maximum_principle() {
    let grid = Arc::new(GridDomain::ball(2, 1.0, 16, 3).unwrap());
    let u = dpp_iterate(grid.clone(), &BoundaryData::new(cos_theta), 6.0, 3.0 * grid.h(), &SolverConfig::default())
        .unwrap();
    assert!(u.values.iter().all(|v| v.abs() <= 1.0));
}

#[test]
fn linear_payoff_on_a_segment() {
    let grid = Arc::new(GridDomain::ball(1, 1.0, 32, 3).unwrap());
    let eps = 2.0 * grid.h();
    let data = BoundaryData::new(|x| x[0]);
    let u = dpp_iterate(grid.clone(), &data, 2.0, eps, &SolverConfig::default()).unwrap();
    let cfg = GameConfig { p: 2.0, eps, n_walks: 100_000, max_steps: None, seed: 3, payoff: data };
    let x0 = grid.coords(grid.nearest_node(&[0.3]))[0];
    let stats = run_game(&[x0], &u, &cfg).unwrap();
    assert!((stats.mean - x0).abs() <= 3.0 * stats.ci_half_width, "mean {} vs {x0}", stats.mean);
    assert!((stats.ci_half_width - 1.96 * stats.sd / (1e5f64).sqrt()).abs() < 1e-15);
    assert!(!stats.truncation_warning);
}

#[test]
fn tug_of_war_matches_the_dpp_value() {
    let grid = Arc::new(GridDomain::ball(2, 1.0, 16, 3).unwrap());
    let eps = 2.0 * grid.h();
    let data = BoundaryData::new(cos_theta);
    let u = dpp_iterate(grid.clone(), &data, 4.0, eps, &SolverConfig::default()).unwrap();
    let x0 = [0.25, 0.125];
    let value = u.values[grid.nearest_node(&x0)];
    let cfg = GameConfig { p: 4.0, eps, n_walks: 20_000, max_steps: None, seed: 11, payoff: data };
    let stats = run_game(&x0, &u, &cfg).unwrap();
    assert!(stats.agrees_with(value, 2.0));
    assert!((stats.mean - value).abs() <= 3.0 * stats.ci_half_width);
}

#[test]
fn truncation_is_flagged() {
    let grid = Arc::new(GridDomain::ball(2, 1.0, 16, 3).unwrap());
    let eps = 2.0 * grid.h();
    let data = BoundaryData::new(cos_theta);
    let u = dpp_iterate(grid.clone(), &data, 4.0, eps, &SolverConfig::default()).unwrap();
    let cfg = GameConfig { p: 4.0, eps, n_walks: 200, max_steps: Some(2), seed: 1, payoff: data };
    let stats = run_game(&[0.0, 0.0], &u, &cfg).unwrap();
    assert_eq!(stats.truncated, 200);
    assert!(stats.truncation_warning);
}

#[test]
fn game_rejects_bad_configs() {
    let grid = Arc::new(GridDomain::ball(2, 1.0, 16, 3).unwrap());
    let u = SolutionField::from_fn(grid.clone(), |_| 0.0);
    let base = GameConfig {
        p: 4.0,
        eps: 2.0 * grid.h(),
        n_walks: 10,
        max_steps: None,
        seed: 0,
        payoff: BoundaryData::constant(0.0),
    };
    assert!(run_game(&[0.0, 0.0], &u, &GameConfig { eps: grid.h(), ..base.clone() }).is_err());
    assert!(run_game(&[0.0, 0.0], &u, &GameConfig { n_walks: 0, ..base.clone() }).is_err());
    assert!(run_game(&[1.1, 0.0], &u, &base).is_err());
}

proptest! {
    #[test]
    fn game_weights_are_a_partition(p in 2.0f64..50.0, n in 1usize..4) {
        let w = compute_game_weights(&StructuralParams::new(n, p, 0.0, 0.0).unwrap()).unwrap();
        prop_assert!((w.alpha0 + w.beta0 - 1.0).abs() < 1e-15);
        prop_assert!(w.alpha0 >= 0.0 && w.beta0 > 0.0);
    }

    #[test]
    fn ball_offsets_are_point_symmetric(r in 2.0f64..7.0) {
        let off = ball_offsets(2, r, 1.0);
        for &(di, dj) in &off {
            prop_assert!(off.contains(&(-di, -dj)));
            prop_assert!(((di * di + dj * dj) as f64).sqrt() <= r * (1.0 + 1e-12));
        }
    }
}
