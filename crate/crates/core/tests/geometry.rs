use std::sync::Arc;

use deadcore::geometry::{
    check_nondegeneracy, distance_bounds, estimate_porosity, fit_gradient_decay, fit_growth_exponent,
    l2_hessian_average, measure_density, PositivitySet,
};
use deadcore::*;
use proptest::prelude::*;

const U_TOL: f64 = 1e-7;

fn params() -> StructuralParams {
    StructuralParams::new(2, 3.0, 1.0, 0.5).unwrap()
}

/// Planar profile `c(|x| − 1/4)_+^2` on a 256-cell box, core edge on nodes along the axes.
fn profile(scale: f64) -> (SolutionField, f64) {
    profile_on(256, scale)
}

fn profile_on(cells: usize, scale: f64) -> (SolutionField, f64) {
    let c = compute_cnd(&params(), 1.0).unwrap();
    let grid = Arc::new(GridDomain::box_2d(-1.0, 1.0, cells).unwrap());
    let u = SolutionField::from_fn(grid, move |x| scale * c * (x[0].hypot(x[1]) - 0.25).max(0.0).powi(2));
    (u, c)
}

fn radii(h: f64, from: f64) -> Vec<f64> {
    (0..7).map(|k| from * h * 2f64.powf(0.5 * k as f64)).collect()
}

#[test]
fn growth_of_the_sampled_profile() {
    // Strict balls see the sup one node short of r; from 32h on that bias stays below 2%.
    let (u, _) = profile_on(512, 1.0);
    let h = u.grid.h();
    let fit = fit_growth_exponent(&u, &[0.25, 0.0], &radii(h, 32.0), 2.0, U_TOL).unwrap();
    assert!(fit.rel_dev <= 0.02, "{}", fit.exponent);
}

#[test]
fn nondegeneracy_ratio_of_the_profile_is_one() {
    let (u, _) = profile(1.0);
    let h = u.grid.h();
    let rs: Vec<f64> = [4.0, 8.0, 16.0, 32.0].iter().map(|k| k * h).collect();
    let rep = check_nondegeneracy(&u, &[0.25, 0.0], &rs, &params(), 1.0, U_TOL).unwrap();
    assert!(rep.ratios.iter().all(|r| (r - 1.0).abs() < 1e-12), "{:?}", rep.ratios);
    let (v, _) = profile(2.0);
    let doubled = check_nondegeneracy(&v, &[0.25, 0.0], &rs, &params(), 1.0, U_TOL).unwrap();
    for (a, b) in rep.ratios.iter().zip(&doubled.ratios) {
        assert!((2.0 * a - b).abs() < 1e-12);
    }
}

#[test]
fn nondegeneracy_needs_the_closure_of_the_positivity_set() {
    let (u, _) = profile(1.0);
    assert!(matches!(
        check_nondegeneracy(&u, &[0.0, 0.0], &[0.05], &params(), 1.0, U_TOL),
        Err(Error::InsufficientSignal(_))
    ));
}

#[test]
fn gradient_decay_of_the_profile() {
    let (u, _) = profile(1.0);
    let fit = fit_gradient_decay(&u, &[0.25, 0.0], &radii(u.grid.h(), 16.0), &params(), U_TOL).unwrap();
    assert!(fit.rel_dev <= 0.03, "{}", fit.exponent);
    assert_eq!(fit.target, 1.0);
}

#[test]
fn gradient_and_l2_need_positive_gamma() {
    let (u, _) = profile(1.0);
    let flat = StructuralParams::new(2, 3.0, 0.0, 0.5).unwrap();
    let rs = radii(u.grid.h(), 16.0);
    assert!(matches!(fit_gradient_decay(&u, &[0.25, 0.0], &rs, &flat, U_TOL), Err(Error::NotApplicable(_))));
    assert!(matches!(l2_hessian_average(&u, &[0.25, 0.0], &rs, &flat, U_TOL), Err(Error::NotApplicable(_))));
}

#[test]
fn l2_with_zero_m_has_a_flat_target() {
    let (u, _) = profile(1.0);
    let prm = StructuralParams::new(2, 3.0, 1.0, 0.0).unwrap();
    let rep = l2_hessian_average(&u, &[0.25, 0.0], &radii(u.grid.h(), 16.0), &prm, U_TOL).unwrap();
    assert_eq!(rep.fit.target, 0.0);
    assert!(rep.slope_ok && rep.bound_holds);
}

#[test]
fn density_inside_and_on_the_boundary() {
    let (u, _) = profile(1.0);
    let h = u.grid.h();
    let deep = measure_density(&u, &[0.7, 0.0], &[4.0 * h, 8.0 * h], U_TOL).unwrap();
    assert!(deep.theta.iter().all(|&t| t == 1.0));
    let edge = measure_density(&u, &[0.25, 0.0], &[8.0 * h, 2.0], U_TOL).unwrap();
    assert_eq!(edge.skipped, vec![2.0]);
    assert!((edge.theta[0] - 0.5).abs() < 0.1);
}

#[test]
fn circular_free_boundary_is_porous() {
    let (u, _) = profile(1.0);
    let h = u.grid.h();
    let rep = estimate_porosity(&u, &[16.0 * h], U_TOL).unwrap();
    assert!(rep.min_delta[0] >= 0.25, "{:?}", rep.min_delta);
    assert!(rep.median_delta[0] <= 0.5);
}

#[test]
fn distance_bounds_of_the_profile() {
    let (u, c) = profile(1.0);
    let rep = distance_bounds(&u, &params(), U_TOL).unwrap();
    assert!(rep.c_star > 0.0 && rep.c_star <= rep.c_sharp);
    // Cell centers sit within h/√2 of the true edge, so only nodes far out see c exactly.
    assert!((rep.c_star - c).abs() <= 0.1 * c, "{rep:?} vs {c}");
    assert!(rep.c_sharp >= c);
    let (v, _) = profile(2.0);
    let twice = distance_bounds(&v, &params(), U_TOL).unwrap();
    assert!((twice.c_sharp - 2.0 * rep.c_sharp).abs() < 1e-12 * rep.c_sharp);
    assert!((twice.c_star - 2.0 * rep.c_star).abs() < 1e-12 * rep.c_star);
}

#[test]
fn fields_without_free_boundary() {
    let grid = Arc::new(GridDomain::box_2d(-1.0, 1.0, 32).unwrap());
    let positive = SolutionField::from_fn(grid.clone(), |x| 1.0 + x[0] * 0.1);
    assert_eq!(distance_bounds(&positive, &params(), U_TOL), Err(Error::NoFreeBoundary));
    assert_eq!(estimate_porosity(&positive, &[0.1], U_TOL), Err(Error::NoFreeBoundary));
    assert!(!PositivitySet::extract(&positive, U_TOL).has_free_boundary());
    let rs = radii(grid.h(), 4.0);
    assert!(matches!(fit_growth_exponent(&positive, &[0.0, 0.0], &rs, 2.0, U_TOL), Err(Error::InsufficientSignal(_))));
}

#[test]
fn positivity_partition_covers_the_interior() {
    let (u, _) = profile(1.0);
    let set = PositivitySet::extract(&u, U_TOL);
    let mut all: Vec<usize> = set.positive_nodes.iter().chain(&set.dead_core_nodes).copied().collect();
    all.sort_unstable();
    assert_eq!(all, u.grid.interior_nodes().to_vec());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn growth_fit_is_scale_invariant(t in 0.01f64..100.0) {
        let (u, _) = profile(1.0);
        let (v, _) = profile(t);
        let rs = radii(u.grid.h(), 8.0);
        let a = fit_growth_exponent(&u, &[0.25, 0.0], &rs, 2.0, U_TOL).unwrap();
        let b = fit_growth_exponent(&v, &[0.25, 0.0], &rs, 2.0, U_TOL * t).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() < 1e-9);
        prop_assert!((b.intercept - a.intercept - t.ln()).abs() < 1e-9);
    }
}
