//! Signs and monotonicity of the velocity field and streamline slopes.

use super::{CheckResult, Ctx, Location};
use crate::fields::PhysicalFrame;
use crate::solver::WaveSolution;

/// Runs the suite on its own (validation is the caller's job).
pub fn check_monotonicity_suite(sol: &WaveSolution, frame: &PhysicalFrame) -> Vec<CheckResult> {
    suite(&Ctx::new(sol, frame))
}

pub(crate) fn suite(ctx: &Ctx) -> Vec<CheckResult> {
    vec![
        slope_negative(ctx),
        max_steepness(ctx),
        max_u(ctx),
        v_positive(ctx),
        max_v(ctx),
        surface_u(ctx),
        h_qp_negative(ctx),
        psi_xy_negative(ctx),
        max_u_location(ctx),
    ]
}

fn u(ctx: &Ctx, k: usize, j: usize) -> f64 {
    ctx.frame.speed - 1.0 / ctx.half(&ctx.frame.derivs.h_p, k, j)
}

fn v(ctx: &Ctx, k: usize, j: usize) -> f64 {
    let d = &ctx.frame.derivs;
    -ctx.half(&d.h_q, k, j) / ctx.half(&d.h_p, k, j)
}

/// Successive differences of a per-row quantity, located at the upper row.
fn increments(ctx: &Ctx, rows: &[f64]) -> Vec<(f64, Location)> {
    rows.windows(2)
        .enumerate()
        .map(|(j, w)| (w[1] - w[0], Location::p(ctx.grid.p(j + 1))))
        .collect()
}

fn row_max(ctx: &Ctx, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    (0..=ctx.grid.np)
        .map(|j| (0..=ctx.k_max).map(|k| f(k, j)).fold(f64::NEG_INFINITY, f64::max))
        .collect()
}

fn slope_negative(ctx: &Ctx) -> CheckResult {
    let mut vals = Vec::new();
    for j in 1..=ctx.grid.np {
        for k in 1..ctx.k_max {
            let hq = ctx.half(&ctx.frame.derivs.h_q, k, j);
            vals.push((-hq, Location::qp(ctx.q(k), ctx.grid.p(j))));
        }
    }
    ctx.inequality(
        "streamline_slope_negative",
        "h_q < 0 for 0 < q < π above the bed",
        vals,
        true,
        ctx.tol_eq,
        true,
    )
}

fn max_steepness(ctx: &Ctx) -> CheckResult {
    let s = row_max(ctx, |k, j| ctx.half(&ctx.frame.derivs.h_q, k, j).abs());
    ctx.inequality(
        "max_steepness_increasing",
        "max over q of |h_q| strictly increases in p",
        increments(ctx, &s),
        true,
        ctx.tol_eq,
        true,
    )
}

fn max_u(ctx: &Ctx) -> CheckResult {
    let (id, desc) = ("max_u_increasing", "max over x of u strictly increases along streamlines upwards");
    let gamma = &ctx.sol.gamma;
    if !(gamma.derivative_sign_on_range().nonnegative() && gamma.is_nonpositive_on_range()) {
        return ctx.skipped(id, desc, "requires γ' ≥ 0 and γ ≤ 0");
    }
    let m = row_max(ctx, |k, j| u(ctx, k, j));
    ctx.inequality(id, desc, increments(ctx, &m), true, ctx.tol_eq, true)
}

fn v_positive(ctx: &Ctx) -> CheckResult {
    let mut vals = Vec::new();
    for j in 1..=ctx.grid.np {
        for k in 1..ctx.k_max {
            vals.push((v(ctx, k, j), Location::qp(ctx.q(k), ctx.grid.p(j))));
        }
    }
    ctx.inequality(
        "vertical_velocity_positive",
        "v > 0 for 0 < x < π above the bed",
        vals,
        true,
        ctx.tol_eq,
        true,
    )
}

fn max_v(ctx: &Ctx) -> CheckResult {
    let (id, desc) = ("max_v_increasing", "max over x of |v| strictly increases in p");
    if !ctx.sol.gamma.derivative_sign_on_range().nonpositive() {
        return ctx.skipped(id, desc, "requires γ' ≤ 0");
    }
    let m = row_max(ctx, |k, j| v(ctx, k, j).abs());
    ctx.inequality(id, desc, increments(ctx, &m), true, ctx.tol_eq, true)
}

fn surface_u(ctx: &Ctx) -> CheckResult {
    let (id, desc) = ("surface_u_nonincreasing", "D_x u ≤ 0 along the surface on (0, π)");
    if !ctx.sol.gamma.is_nonpositive_on_range() {
        return ctx.skipped(id, desc, "requires γ ≤ 0");
    }
    let np = ctx.grid.np;
    let two_dq = 2.0 * ctx.grid.dq();
    let vals = (1..ctx.k_max)
        .map(|k| {
            let dudx = (u(ctx, k + 1, np) - u(ctx, k - 1, np)) / two_dq;
            (-dudx, Location::x(ctx.q(k)))
        })
        .collect();
    ctx.inequality(id, desc, vals, false, ctx.tol_eq, true)
}

fn h_qp_negative(ctx: &Ctx) -> CheckResult {
    let (id, desc) = ("h_qp_negative", "h_qp < 0 for 0 < q < π");
    if !ctx.sol.gamma.is_zero() {
        return ctx.skipped(id, desc, "requires γ = 0");
    }
    if !ctx.slope_ok {
        return ctx.skipped(id, desc, "requires max |η'| ≤ 1/√3");
    }
    let mut vals = Vec::new();
    // the nodes next to crest and trough sit within one cell of the zero set
    for j in 0..=ctx.grid.np {
        for k in 2..ctx.k_max - 1 {
            let v = ctx.half(&ctx.frame.derivs.h_qp, k, j);
            vals.push((-v, Location::qp(ctx.q(k), ctx.grid.p(j))));
        }
    }
    ctx.inequality(id, desc, vals, true, ctx.tol_eq, true)
}

fn psi_xy_negative(ctx: &Ctx) -> CheckResult {
    let (id, desc) = ("psi_xy_negative", "ψ_xy < 0 in the fluid for 0 < x < π");
    let gamma = &ctx.sol.gamma;
    let g0 = gamma.at_p(0.0);
    if !(g0 >= 0.0
        && gamma.derivative_sign_on_range().nonpositive()
        && gamma.second_derivative_sign_on_range().nonpositive())
    {
        return ctx.skipped(id, desc, "requires γ(0) ≥ 0, γ' ≤ 0 and γ'' ≤ 0");
    }
    let d = &ctx.frame.derivs;
    let mut vals = Vec::new();
    for j in 1..ctx.grid.np {
        for k in 1..ctx.k_max {
            let hp = ctx.half(&d.h_p, k, j);
            let psi_xy = (ctx.half(&d.h_qp, k, j) * hp - ctx.half(&d.h_q, k, j) * ctx.half(&d.h_pp, k, j))
                / hp.powi(3);
            vals.push((-psi_xy, Location::qp(ctx.q(k), ctx.grid.p(j))));
        }
    }
    ctx.inequality(id, desc, vals, true, ctx.tol_eq, ctx.small)
}

/// A surface maximum of the horizontal velocity lies at the crest, or at a
/// point where (c - u)γ(0) < g and g = -η''(c - u)². A maximum below the
/// surface leaves nothing to check.
fn max_u_location(ctx: &Ctx) -> CheckResult {
    let (id, desc) = ("max_u_location", "max u is at the crest or at a surface critical point");
    let np = ctx.grid.np;
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for j in (0..=np).rev() {
        for k in 0..=ctx.k_max {
            let val = u(ctx, k, j);
            if val > best.0 + ctx.tol_eq {
                best = (val, k, j);
            }
        }
    }
    let (umax, k, j) = best;
    let loc = Location::qp(ctx.q(k), ctx.grid.p(j));
    let g = ctx.sol.params.g;
    let (margin, note) = if k == 0 && j == np {
        (0.0, "maximum at the crest".to_string())
    } else if j == np {
        let rel = ctx.frame.speed - umax;
        let eta_xx = ctx.frame.eta_xx[ctx.grid.half_to_full(k)];
        let cond = g - rel * ctx.sol.gamma.at_p(0.0);
        let balance = (g + eta_xx * rel * rel).abs() / g;
        (
            cond.min(super::FORMULA_TOLERANCE - balance),
            format!("maximum on the surface off the crest, |g + η''(c-u)²|/g = {balance:.3e}"),
        )
    } else {
        (0.0, "maximum below the surface: no surface maximum to locate".to_string())
    };
    let mut r = ctx.inequality(id, desc, vec![(margin, loc)], false, ctx.tol_eq, true);
    r.notes.insert(0, note);
    r
}
