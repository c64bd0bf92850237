//! Integral and differential identities satisfied by h, plus global
//! conservation checks.

use std::f64::consts::PI;

use super::jets::{dp4, dpp4, dq, dqq, Jet2};
use super::{CheckResult, Ctx, Location, DIVERGENCE_TOLERANCE, MASS_FLUX_TOLERANCE};
use crate::diff::{integrate_half, integrate_q};
use crate::fields::PhysicalFrame;
use crate::kinematics::mass_flux;
use crate::solver::WaveSolution;

/// Operator residuals must stay below this multiple of (Δq² + Δp²) times
/// their largest term; Δ² is the order of the discretisation error in h.
pub const OPERATOR_CONSTANT: f64 = 1.0;
/// Smallest term scale; below it terms are round-off (a laminar flow makes
/// every term vanish).
pub const OPERATOR_FLOOR: f64 = 1e-6;

pub fn check_identity_suite(sol: &WaveSolution, frame: &PhysicalFrame) -> Vec<CheckResult> {
    suite(&Ctx::new(sol, frame))
}

pub(crate) fn suite(ctx: &Ctx) -> Vec<CheckResult> {
    let (lhs, divergence) = divergence_identity(ctx);
    let mut out = vec![
        divergence.clone(),
        divergence_monotone(ctx, &lhs, divergence.margin.unwrap_or(0.0)),
        cpi_bound(ctx),
    ];
    let jet = Jet2::of(ctx.sol.h.clone());
    out.extend(operators(ctx, &jet));
    out.push(mass_flux_check(ctx));
    out.push(stokes(ctx));
    out.push(mean_level(ctx));
    out
}

fn half_integral(ctx: &Ctx, f: impl Fn(usize) -> f64) -> f64 {
    let v: Vec<f64> = (0..=ctx.k_max).map(f).collect();
    integrate_half(&v)
}

/// ∫₀^π (1 + h_q²)/h_p dq = cπ + ∫₀^π [γ(-p)h + ∫_{p0}^p γ'(-s)h ds] dq.
fn divergence_identity(ctx: &Ctx) -> (Vec<f64>, CheckResult) {
    let d = &ctx.frame.derivs;
    let h = &ctx.sol.h;
    let gamma = &ctx.sol.gamma;
    let g = ctx.grid;
    let c = ctx.frame.speed;
    let mut lhs = Vec::with_capacity(g.np + 1);
    let mut vals = Vec::with_capacity(g.np + 1);
    // running trapezoid of γ'(-s)h(q, s) in s, per column
    let mut inner = vec![0.0; ctx.k_max + 1];
    let mut prev: Vec<f64> = (0..=ctx.k_max)
        .map(|k| gamma.derivative_at_p(g.p(0)) * ctx.half(h, k, 0))
        .collect();
    for j in 0..=g.np {
        let p = g.p(j);
        if j > 0 {
            for (k, acc) in inner.iter_mut().enumerate() {
                let cur = gamma.derivative_at_p(p) * ctx.half(h, k, j);
                *acc += 0.5 * g.dp() * (cur + prev[k]);
                prev[k] = cur;
            }
        }
        let l = half_integral(ctx, |k| {
            let hq = ctx.half(&d.h_q, k, j);
            (1.0 + hq * hq) / ctx.half(&d.h_p, k, j)
        });
        let r = c * PI + half_integral(ctx, |k| gamma.at_p(p) * ctx.half(h, k, j) + inner[k]);
        lhs.push(l);
        vals.push((l - r, Location::p(p)));
    }
    let check = ctx.residual(
        "divergence_identity",
        "∫₀^π (1+h_q²)/h_p dq against cπ plus the vorticity terms",
        vals,
        DIVERGENCE_TOLERANCE * c * PI,
    );
    (lhs, check)
}

fn divergence_monotone(ctx: &Ctx, lhs: &[f64], identity_residual: f64) -> CheckResult {
    let (id, desc) = (
        "divergence_integral_monotone",
        "∫₀^π (1+h_q²)/h_p dq is non-increasing in p",
    );
    if !ctx.sol.gamma.is_nonpositive_on_range() {
        return ctx.skipped(id, desc, "requires γ ≤ 0");
    }
    let vals = lhs
        .windows(2)
        .enumerate()
        .map(|(j, w)| (w[0] - w[1], Location::p(ctx.grid.p(j + 1))))
        .collect();
    ctx.inequality(id, desc, vals, false, 2.0 * identity_residual + ctx.tol_eq, true)
}

fn cpi_bound(ctx: &Ctx) -> CheckResult {
    let (id, desc) = ("cpi_bound", "∫₀^π 1/h_p dq < cπ above the bed");
    if !ctx.sol.gamma.is_nonpositive_on_range() {
        return ctx.skipped(id, desc, "requires γ ≤ 0");
    }
    if ctx.trivial {
        return ctx.skipped(id, desc, "trivial wave");
    }
    let d = &ctx.frame.derivs;
    let c = ctx.frame.speed;
    let vals = (1..=ctx.grid.np)
        .map(|j| {
            let i = half_integral(ctx, |k| 1.0 / ctx.half(&d.h_p, k, j));
            (c * PI - i, Location::p(ctx.grid.p(j)))
        })
        .collect();
    ctx.inequality(id, desc, vals, true, ctx.tol_eq, true)
}

/// Largest residual of a pointwise identity. The tolerance is second order in
/// the grid spacing, relative to the largest term anywhere.
/// Rows within two cells of the boundary are left out: the one-sided
/// fourth-order stencils there lose accuracy on third derivatives.
fn operator_check(
    ctx: &Ctx,
    id: &str,
    desc: &str,
    eval: impl Fn(usize, usize) -> (f64, f64),
) -> CheckResult {
    let g = ctx.grid;
    let mut scale = 0.0f64;
    let mut vals = Vec::new();
    for j in 2..=g.np - 2 {
        for i in 0..g.nq {
            let (res, size) = eval(i, j);
            scale = scale.max(size);
            vals.push((res, Location::qp(g.q(i), g.p(j))));
        }
    }
    let scale = scale.max(OPERATOR_FLOOR);
    let tol = OPERATOR_CONSTANT * (g.dq().powi(2) + g.dp().powi(2)) * scale;
    let mut r = ctx.residual(id, desc, vals, tol);
    r.notes.push(format!("largest term {scale:.3e}"));
    r
}

fn operators(ctx: &Ctx, a: &Jet2) -> Vec<CheckResult> {
    let gamma = &ctx.sol.gamma;
    let g = ctx.grid;
    let gm = |j: usize| gamma.at_p(g.p(j));
    let gd = |j: usize| gamma.derivative_at_p(g.p(j));
    let (hq, hp, hqq, hpp, hqp) = (&a.w_q, &a.w_p, &a.w_qq, &a.w_pp, &a.w_qp);

    let wq = Jet2 {
        w: hq.clone(),
        w_q: hqq.clone(),
        w_p: hqp.clone(),
        w_qq: dqq(hq),
        w_pp: dpp4(hq),
        w_qp: dq(&dp4(hq)),
    };
    let hq_op = operator_check(ctx, "h_q_operator", "h_q solves the differentiated equation", |i, j| {
        let (q1, p1) = (hq.at(i, j), hp.at(i, j));
        let terms = [
            (1.0 + q1 * q1) * wq.w_pp.at(i, j),
            -2.0 * p1 * q1 * wq.w_qp.at(i, j),
            p1 * p1 * wq.w_qq.at(i, j),
            2.0 * q1 * hpp.at(i, j) * wq.w_q.at(i, j),
            (3.0 * gm(j) * p1 * p1 - 2.0 * q1 * hqp.at(i, j)) * wq.w_p.at(i, j),
        ];
        sum_and_size(&terms)
    });

    let wp = Jet2::of(hp.clone());
    let hp_op = operator_check(ctx, "h_p_operator", "h_p solves the differentiated equation", |i, j| {
        let (q1, p1) = (hq.at(i, j), hp.at(i, j));
        let terms = [
            (1.0 + q1 * q1) * wp.w_pp.at(i, j),
            -2.0 * q1 * p1 * wp.w_qp.at(i, j),
            p1 * p1 * wp.w_qq.at(i, j),
            -2.0 * p1 * hqp.at(i, j) * wp.w_q.at(i, j),
            p1 * (2.0 * hqq.at(i, j) + 3.0 * gm(j) * p1) * wp.w_p.at(i, j),
            -gd(j) * p1 * p1 * wp.w.at(i, j),
        ];
        sum_and_size(&terms)
    });

    let wm = Jet2::of(hqp.clone());
    let hqp_op = operator_check(ctx, "h_qp_identity", "h_qp satisfies its elliptic identity", |i, j| {
        let (q1, p1) = (hq.at(i, j), hp.at(i, j));
        let (qq, pp, qp) = (hqq.at(i, j), hpp.at(i, j), hqp.at(i, j));
        let s = 1.0 + q1 * q1;
        let terms = [
            s * wm.w_pp.at(i, j),
            -2.0 * p1 * q1 * wm.w_qp.at(i, j),
            p1 * p1 * wm.w_qq.at(i, j),
            (4.0 * q1 * pp - 2.0 * p1 * qp - 2.0 * q1 * p1 * p1 * qq / s) * wm.w_q.at(i, j),
            (3.0 * gm(j) * p1 * p1 - 2.0 * q1 * qp + 4.0 * q1 * q1 * qq * p1 / s - 2.0 * pp * s / p1)
                * wm.w_p.at(i, j),
            (2.0 * (qq * pp - qp * qp) * (1.0 - 3.0 * q1 * q1) / s - 3.0 * gd(j) * p1 * p1)
                * wm.w.at(i, j),
            -2.0 * q1 * p1 * p1 / s * (gm(j) * (qq * pp + 2.0 * qp * qp) - gd(j) * p1 * qq),
        ];
        sum_and_size(&terms)
    });

    let (id, desc) = ("diffeomorphism_identity", "(h_q h_pp - h_p h_qp)² + h_pp² + h_p²(h_qq h_pp - h_qp²) = 0");
    let diffeo = if gamma.is_zero() {
        operator_check(ctx, id, desc, |i, j| {
            let (q1, p1) = (hq.at(i, j), hp.at(i, j));
            let (qq, pp, qp) = (hqq.at(i, j), hpp.at(i, j), hqp.at(i, j));
            let a = q1 * pp - p1 * qp;
            let terms = [a * a, pp * pp, p1 * p1 * qq * pp, -p1 * p1 * qp * qp];
            sum_and_size(&terms)
        })
    } else {
        ctx.skipped(id, desc, "requires γ = 0")
    };

    let (id, desc) = ("h_qp_squared_dominates", "h_qp² ≥ h_qq h_pp");
    let dominates = if gamma.is_zero() {
        let slack = diffeo.margin.unwrap_or(0.0) + ctx.tol_eq;
        let mut vals = Vec::new();
        for j in 2..=g.np - 2 {
            for i in 0..g.nq {
                let (qq, pp, qp) = (hqq.at(i, j), hpp.at(i, j), hqp.at(i, j));
                vals.push((qp * qp - qq * pp, Location::qp(g.q(i), g.p(j))));
            }
        }
        // the identity controls the product only up to its residual over h_p²
        let min_hp2 = (2..=g.np - 2)
            .flat_map(|j| (0..g.nq).map(move |i| (i, j)))
            .map(|(i, j)| hp.at(i, j).powi(2))
            .fold(f64::INFINITY, f64::min);
        ctx.inequality(id, desc, vals, false, slack / min_hp2, true)
    } else {
        ctx.skipped(id, desc, "requires γ = 0")
    };

    vec![hq_op, hp_op, hqp_op, diffeo, dominates]
}

fn sum_and_size(terms: &[f64]) -> (f64, f64) {
    let sum = terms.iter().sum();
    let size = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    (sum, size)
}

fn mass_flux_check(ctx: &Ctx) -> CheckResult {
    let p0 = ctx.sol.params.p0;
    let vals = [0.0, PI / 2.0, PI]
        .iter()
        .map(|&x| {
            let r = mass_flux(ctx.sol, ctx.frame, x).map_or(f64::INFINITY, |f| f - p0);
            (r, Location::x(x))
        })
        .collect();
    ctx.residual(
        "mass_flux",
        "∫_{-d}^{η} (u - c) dy equals p0",
        vals,
        MASS_FLUX_TOLERANCE,
    )
}

/// The bed velocity has zero period mean in the frame moving with c.
fn stokes(ctx: &Ctx) -> CheckResult {
    let row = ctx.frame.derivs.h_p.row(0);
    let inv: Vec<f64> = row.iter().map(|v| 1.0 / v).collect();
    let r = 2.0 * PI * ctx.frame.speed - integrate_q(&inv);
    ctx.residual(
        "stokes_condition",
        "∫ u(x, -d) dx = 0 over one period",
        vec![(r, Location::p(ctx.grid.p0))],
        ctx.tol_eq,
    )
}

fn mean_level(ctx: &Ctx) -> CheckResult {
    let mean = integrate_q(&ctx.frame.eta) / (2.0 * PI);
    ctx.residual(
        "mean_water_level",
        "∫ η dx = 0 over one period",
        vec![(mean, Location::p(0.0))],
        ctx.tol_eq * ctx.frame.depth.max(1.0),
    )
}
