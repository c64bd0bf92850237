mod common;

use common::*;
use hodowave::laminar::linear_seed;
use hodowave::solver::{newton_solve, residual, validate_solution, Violation};
use hodowave::*;

#[test]
fn irrotational_branch_converges_quickly() {
    let b = branch(None, 128, 64, 0.01);
    let d = bifurcation(None, 64).depth();
    assert!(b.solutions.len() >= 3);
    assert!((b.last().amplitude() - 0.01 * d).abs() < 1e-9 * d);
    for s in &b.solutions[1..] {
        assert!(s.residual < 1e-10, "residual {}", s.residual);
        assert!(s.iterations <= 8, "iterations {}", s.iterations);
        assert!(validate_solution(s).is_valid());
    }
    let amps = b.amplitudes();
    assert!(amps.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn residual_of_solution_is_small_everywhere() {
    let s = wave(Some(-0.1), 64, 32, 0.01);
    let r = residual(&s.h, s.bernoulli_q, &s.gamma, &s.params).unwrap();
    assert!(r.max_abs() < 1e-10);
}

#[test]
fn speed_tends_to_bifurcation_speed_quadratically() {
    let bif = bifurcation(None, 64);
    let b = branch(None, 128, 64, 0.02);
    let c0 = 1.0 / bif.lambda;
    let pts: Vec<(f64, f64)> = b.solutions[1..]
        .iter()
        .map(|s| (s.amplitude(), derive_frame(s).speed - c0))
        .collect();
    // differences cancel the O(Δp²) offset of the discrete bifurcation speed;
    // a constant ratio means c - c0 has no linear term in a
    let ratios: Vec<f64> = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0.powi(2) - w[0].0.powi(2))).collect();
    let spread = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 0.05 * ratios[0].abs(), "ratios {ratios:?}");
    assert!(pts[0].1.abs() < 1e-3);
}

#[test]
fn grid_doubling_is_second_order() {
    let surface = |nq: usize, np: usize| {
        let s = wave(None, nq, np, 0.01);
        let f = derive_frame(&s);
        (f.depth, f.speed)
    };
    let (d1, c1) = surface(32, 16);
    let (d2, c2) = surface(64, 32);
    let (d3, c3) = surface(128, 64);
    let rd = (d1 - d2) / (d2 - d3);
    let rc = (c1 - c2) / (c2 - c3);
    assert!((3.0..=5.0).contains(&rd), "depth ratio {rd}");
    assert!((3.0..=5.0).contains(&rc), "speed ratio {rc}");
}

#[test]
fn seed_beyond_stagnation_is_rejected() {
    let bif = bifurcation(None, 32);
    let params = WaveParameters::new(G, P0, 64, 32).unwrap();
    // the linear surface slope λ(1 - ε coth λ) vanishes for ε = tanh λ ≈ 0.445
    assert!((bif.lambda.tanh() - 0.445).abs() < 1e-3);
    let (seed, q) = linear_seed(&bif, 0.5, params.grid());
    let err = newton_solve(&seed, q, 0.5, &gamma(None), &params, NewtonOptions::default()).unwrap_err();
    assert!(matches!(err, WaveError::StagnationInIterate { .. }), "{err}");
}

#[test]
fn corrupted_solutions_are_flagged() {
    let s = wave(None, 64, 32, 0.005);
    let g = s.grid();
    let mut even = s.clone();
    for i in [5, g.mirror(5)] {
        let v = even.h.at(i, 10);
        even.h.set(i, 10, v + 1e-3);
    }
    let val = validate_solution(&even);
    assert!(val.violations.iter().any(|v| matches!(v, Violation::Residual { .. })), "{val:?}");

    let mut odd = s.clone();
    let v = odd.h.at(5, 10);
    odd.h.set(5, 10, v + 1e-3);
    let val = validate_solution(&odd);
    assert!(val.violations.iter().any(|v| matches!(v, Violation::NotEven { .. })));
}
