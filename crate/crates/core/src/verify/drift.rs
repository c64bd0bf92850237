//! Mean drift D(p) = cτ(p) - 2π of particles on each streamline.

use std::f64::consts::PI;

use super::{CheckResult, Ctx, Location};
use crate::diff::integrate_half;
use crate::fields::PhysicalFrame;
use crate::kinematics::drift_profile;
use crate::solver::WaveSolution;

pub fn check_drift_suite(sol: &WaveSolution, frame: &PhysicalFrame) -> Vec<CheckResult> {
    suite(&Ctx::new(sol, frame))
}

pub(crate) fn suite(ctx: &Ctx) -> Vec<CheckResult> {
    let drift: Vec<f64> = drift_profile(ctx.sol, ctx.frame).iter().map(|l| l.drift).collect();
    vec![
        positive(ctx, &drift),
        bed(ctx, &drift),
        increasing(ctx, &drift),
        derivative_positive(ctx),
        holder(ctx),
    ]
}

fn positive(ctx: &Ctx, drift: &[f64]) -> CheckResult {
    let (id, desc) = ("drift_positive", "D(p) > 0 above the bed");
    if !ctx.sol.gamma.is_nonpositive_on_range() {
        return ctx.skipped(id, desc, "requires γ ≤ 0");
    }
    if ctx.trivial {
        return ctx.skipped(id, desc, "trivial wave");
    }
    let vals = (1..=ctx.grid.np)
        .map(|j| (drift[j], Location::p(ctx.grid.p(j))))
        .collect();
    ctx.inequality(id, desc, vals, true, ctx.tol_eq, true)
}

fn bed(ctx: &Ctx, drift: &[f64]) -> CheckResult {
    let mut r = ctx.inequality(
        "bed_drift_nonnegative",
        "D(p0) ≥ 0",
        vec![(drift[0], Location::p(ctx.grid.p0))],
        false,
        ctx.tol_eq,
        true,
    );
    r.notes.push(format!("D(p0) = {:.6e}", drift[0]));
    r
}

fn increasing(ctx: &Ctx, drift: &[f64]) -> CheckResult {
    let (id, desc) = ("drift_increasing", "D strictly increases in p");
    let gamma = &ctx.sol.gamma;
    let guaranteed = if gamma.is_zero() {
        if !ctx.slope_ok {
            return ctx.skipped(id, desc, "γ = 0 requires max |η'| ≤ 1/√3");
        }
        if ctx.trivial {
            return ctx.skipped(id, desc, "trivial wave");
        }
        true
    } else if gamma.is_negative_on_range() {
        ctx.small
    } else {
        return ctx.skipped(id, desc, "requires γ = 0 or γ < 0");
    };
    let vals = drift
        .windows(2)
        .enumerate()
        .map(|(j, w)| (w[1] - w[0], Location::p(ctx.grid.p(j + 1))))
        .collect();
    ctx.inequality(id, desc, vals, true, ctx.tol_eq, guaranteed)
}

/// D'(p) has the sign of ∫₀^π h_pp/h_p dq.
fn derivative_positive(ctx: &Ctx) -> CheckResult {
    let (id, desc) = ("drift_derivative_positive", "∫₀^π h_pp/h_p dq > 0 on every level");
    if !ctx.sol.gamma.is_negative_on_range() {
        return ctx.skipped(id, desc, "requires γ < 0");
    }
    let d = &ctx.frame.derivs;
    let vals = (0..=ctx.grid.np)
        .map(|j| {
            let f: Vec<f64> = (0..=ctx.k_max)
                .map(|k| ctx.half(&d.h_pp, k, j) / ctx.half(&d.h_p, k, j))
                .collect();
            (integrate_half(&f), Location::p(ctx.grid.p(j)))
        })
        .collect();
    ctx.inequality(id, desc, vals, true, ctx.tol_eq, ctx.small)
}

/// (∫₀^π 1/h_p)(∫₀^π h_p) ≥ π² by Cauchy-Schwarz.
fn holder(ctx: &Ctx) -> CheckResult {
    let d = &ctx.frame.derivs;
    let vals = (0..=ctx.grid.np)
        .map(|j| {
            let hp: Vec<f64> = (0..=ctx.k_max).map(|k| ctx.half(&d.h_p, k, j)).collect();
            let inv: Vec<f64> = hp.iter().map(|v| 1.0 / v).collect();
            let prod = integrate_half(&inv) * integrate_half(&hp);
            (prod - PI * PI, Location::p(ctx.grid.p(j)))
        })
        .collect();
    ctx.inequality(
        "holder_chain",
        "(∫₀^π 1/h_p dq)(∫₀^π h_p dq) ≥ π²",
        vals,
        false,
        ctx.tol_eq * PI * PI,
        true,
    )
}
