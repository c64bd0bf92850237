#![allow(dead_code)]

use hodowave::laminar::{find_bifurcation, scan_for_bracket};
use hodowave::solver::{continue_branch, BranchState, ContinuationOptions};
use hodowave::*;

pub const G: f64 = 9.81;
pub const P0: f64 = -1.0;

pub fn gamma(g0: Option<f64>) -> VorticitySpec {
    match g0 {
        Some(v) => VorticitySpec::constant(v, P0).unwrap(),
        None => VorticitySpec::irrotational(P0).unwrap(),
    }
}

pub fn bifurcation(g0: Option<f64>, np: usize) -> Bifurcation {
    let (lo, hi) = scan_for_bracket(&gamma(g0), P0, G, 1, 0.3, 1.5, 24, np).unwrap();
    find_bifurcation(&gamma(g0), P0, G, 1, lo, hi, np).unwrap()
}

/// Branch to `frac`·d in steps of 0.005·d.
pub fn branch(g0: Option<f64>, nq: usize, np: usize, frac: f64) -> BranchState {
    let bif = bifurcation(g0, np);
    let d = bif.depth();
    let params = WaveParameters::new(G, P0, nq, np).unwrap();
    let opts = ContinuationOptions {
        a_max: frac * d,
        da: 0.005 * d,
        newton: NewtonOptions::default(),
    };
    continue_branch(&bif, &gamma(g0), &params, opts).unwrap()
}

pub fn wave(g0: Option<f64>, nq: usize, np: usize, frac: f64) -> WaveSolution {
    branch(g0, nq, np, frac).last().clone()
}

pub fn laminar(g0: Option<f64>, nq: usize, np: usize) -> WaveSolution {
    let bif = bifurcation(g0, np);
    let params = WaveParameters::new(G, P0, nq, np).unwrap();
    WaveSolution::laminar(&bif.profile, &gamma(g0), params).unwrap()
}
