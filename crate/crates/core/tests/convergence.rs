//! Refinement studies against exact slip flows on the unit-to-two annulus.

use slipflow::linear::StokesOptions;
use slipflow::navier_stokes::SolverConfig;
use slipflow::validation::{convergence_study, couette, hamel, CouetteParams, StudySolver};

const LEVELS: [(usize, usize); 3] = [(4, 16), (8, 32), (16, 64)];

fn order(o: Option<f64>) -> f64 {
    o.expect("order on refined level")
}

#[test]
fn couette_stokes_rates() {
    let exact = couette(&CouetteParams::default(), false).unwrap();
    let t = convergence_study(&exact, &LEVELS, &StudySolver::Stokes(StokesOptions::default())).unwrap();
    let last = t.last();
    assert!(order(last.order_l2_u) > 2.7, "{}", t.to_csv());
    assert!(order(last.order_h1_u) > 1.8, "{}", t.to_csv());
    // exact pressure is zero, so the discrete one only has to go to zero
    assert!(order(last.order_l2_p) > 1.7, "{}", t.to_csv());
}

#[test]
fn couette_convective_pressure_is_second_order() {
    let exact = couette(&CouetteParams::default(), true).unwrap();
    let t = convergence_study(&exact, &LEVELS, &StudySolver::NavierStokes(SolverConfig::default())).unwrap();
    let last = t.last();
    assert!(order(last.order_l2_u) > 2.7, "{}", t.to_csv());
    assert!((order(last.order_l2_p) - 2.0).abs() < 0.4, "{}", t.to_csv());
    assert!(last.residual.unwrap() < 1e-9);
}

#[test]
fn interpolation_rates() {
    let t = convergence_study(&hamel(0.5), &LEVELS, &StudySolver::Interpolate).unwrap();
    let last = t.last();
    assert!(order(last.order_l2_u) > 2.7, "{}", t.to_csv());
    assert!(order(last.order_h1_u) > 1.8, "{}", t.to_csv());
}

#[test]
fn hamel_pinned_branch() {
    let cfg = SolverConfig { circulation_pins: vec![(1, std::f64::consts::PI)], ..Default::default() };
    let t = convergence_study(&hamel(0.5), &LEVELS[..2], &StudySolver::NavierStokes(cfg)).unwrap();
    assert!(order(t.last().order_l2_u) > 2.5, "{}", t.to_csv());
}
