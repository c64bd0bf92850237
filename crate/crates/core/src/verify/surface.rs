//! Surface bounds and closed-form surface formulas against finite differences.

use super::{CheckResult, Ctx, Location, FORMULA_TOLERANCE, SURFACE_BOUND_TOLERANCE};
use crate::fields::{psi_yy_at_critical_point, surface_formulas_from, PhysicalFrame, SurfaceFormulas};
use crate::solver::WaveSolution;

pub fn check_surface_suite(sol: &WaveSolution, frame: &PhysicalFrame) -> Vec<CheckResult> {
    suite(&Ctx::new(sol, frame))
}

pub(crate) fn suite(ctx: &Ctx) -> Vec<CheckResult> {
    let mut out = bounds(ctx);
    out.push(bernoulli(ctx));
    let formulas: Vec<Option<SurfaceFormulas>> = (0..ctx.grid.nq).map(|i| formulas_at(ctx, i)).collect();
    out.extend(formula_checks(ctx, &formulas));
    out.push(critical_point(ctx, &formulas));
    out
}

fn surf(ctx: &Ctx, i: usize) -> (f64, f64, f64) {
    (ctx.frame.eta[i], ctx.frame.eta_x[i], ctx.frame.eta_xx[i])
}

fn formulas_at(ctx: &Ctx, i: usize) -> Option<SurfaceFormulas> {
    let (e, ex, exx) = surf(ctx, i);
    surface_formulas_from(ctx.frame.bernoulli_c, ctx.sol.params.g, ctx.sol.gamma.at_p(0.0), e, ex, exx).ok()
}

/// η'' ≥ -K, η' ≥ -Kx and η - η(0) ≥ -Kx²/2 on (0, π) with K = g/(C - 2gη(0)).
fn bounds(ctx: &Ctx) -> Vec<CheckResult> {
    let ids = [
        ("eta_xx_bound", "η'' ≥ -g/(C - 2gη(0)) on (0, π)"),
        ("eta_x_bound", "η' ≥ -g x/(C - 2gη(0)) on (0, π)"),
        ("eta_parabola_bound", "η - η(0) ≥ -g x²/(2(C - 2gη(0))) on (0, π)"),
    ];
    if !ctx.sol.gamma.is_nonpositive_on_range() {
        return ids.iter().map(|(id, d)| ctx.skipped(id, d, "requires γ ≤ 0")).collect();
    }
    let g = ctx.sol.params.g;
    let crest = ctx.grid.crest();
    let k0 = g / (ctx.frame.bernoulli_c - 2.0 * g * ctx.frame.eta[crest]);
    let tol = SURFACE_BOUND_TOLERANCE * g;
    let mut cols: [Vec<(f64, Location)>; 3] = Default::default();
    for k in 1..ctx.k_max {
        let i = ctx.grid.half_to_full(k);
        let x = ctx.q(k);
        let (e, ex, exx) = surf(ctx, i);
        let loc = Location::x(x);
        cols[0].push((exx + k0, loc));
        cols[1].push((ex + k0 * x, loc));
        cols[2].push((e - ctx.frame.eta[crest] + 0.5 * k0 * x * x, loc));
    }
    ids.iter()
        .zip(cols)
        .map(|((id, d), vals)| ctx.inequality(id, d, vals, false, tol, true))
        .collect()
}

fn bernoulli(ctx: &Ctx) -> CheckResult {
    let np = ctx.grid.np;
    let g = ctx.sol.params.g;
    let mut scale = 1.0f64;
    let vals = (0..ctx.grid.nq)
        .map(|i| {
            let hp = ctx.frame.derivs.h_p.at(i, np);
            let (e, ex, _) = surf(ctx, i);
            let lhs = (1.0 + ex * ex) / (hp * hp);
            scale = scale.max(lhs);
            (lhs + 2.0 * g * e - ctx.frame.bernoulli_c, Location::x(ctx.grid.q(i)))
        })
        .collect();
    ctx.residual(
        "surface_bernoulli",
        "(1 + η'²)ψ_y² + 2gη = C on the surface",
        vals,
        ctx.tol_eq * scale,
    )
}

/// Relative max-norm difference of formula and reference over the surface.
/// When the reference vanishes the comparison is absolute.
fn compare(ctx: &Ctx, id: &str, desc: &str, pairs: Vec<(f64, f64, Location)>, tol: f64) -> CheckResult {
    let size = pairs.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let denom = if size > 1e3 * ctx.tol_eq { size } else { 1.0 };
    let vals = pairs.iter().map(|&(f, r, l)| ((f - r) / denom, l)).collect();
    let mut r = ctx.residual(id, desc, vals, tol);
    r.notes.push(format!("reference max-norm {size:.3e}"));
    r
}

fn formula_checks(ctx: &Ctx, formulas: &[Option<SurfaceFormulas>]) -> Vec<CheckResult> {
    let g = ctx.grid;
    let np = g.np;
    let n = g.nq;
    let d = &ctx.frame.derivs;
    let missing = |f: &Option<SurfaceFormulas>| f.is_none();
    if formulas.iter().any(missing) {
        let reason = "surface stagnation: C - 2gη ≤ 0";
        return [
            ("psi_y2_formula", "ψ_y² formula against 1/h_p²"),
            ("psi_xy_formula", "ψ_xy formula against differences"),
            ("psi_yy_formula", "ψ_yy formula against differences"),
            ("dx_psi_y2_formula", "D_x ψ_y² formula against differences"),
        ]
        .iter()
        .map(|(id, desc)| ctx.skipped(id, desc, reason))
        .collect();
    }
    let f: Vec<SurfaceFormulas> = formulas.iter().map(|f| f.unwrap()).collect();
    let psi_y2_ref: Vec<f64> = (0..n).map(|i| d.h_p.at(i, np).powi(-2)).collect();
    let loc = |i: usize| Location::x(g.q(i));
    let psi_y2 = (0..n).map(|i| (f[i].psi_y2, psi_y2_ref[i], loc(i))).collect();
    let psi_xy = (0..n)
        .map(|i| {
            let hp = d.h_p.at(i, np);
            let r = (d.h_qp.at(i, np) * hp - d.h_q.at(i, np) * d.h_pp.at(i, np)) / hp.powi(3);
            (f[i].psi_xy, r, loc(i))
        })
        .collect();
    let psi_yy = (0..n)
        .map(|i| (f[i].psi_yy, d.h_pp.at(i, np) / d.h_p.at(i, np).powi(3), loc(i)))
        .collect();
    let dx = (0..n)
        .map(|i| {
            let r = (psi_y2_ref[(i + 1) % n] - psi_y2_ref[(i + n - 1) % n]) / (2.0 * g.dq());
            (f[i].dx_psi_y2, r, loc(i))
        })
        .collect();
    let psi_y2_tol = ctx.tol_eq * psi_y2_ref.iter().fold(1.0f64, |m, v| m.max(*v));
    vec![
        compare(ctx, "psi_y2_formula", "ψ_y² = (C - 2gη)/(1 + η'²) against 1/h_p²", psi_y2, psi_y2_tol),
        compare(ctx, "psi_xy_formula", "ψ_xy formula against differences of h", psi_xy, FORMULA_TOLERANCE),
        compare(ctx, "psi_yy_formula", "ψ_yy formula against differences of h", psi_yy, FORMULA_TOLERANCE),
        compare(ctx, "dx_psi_y2_formula", "D_x ψ_y² formula against differences of 1/h_p²", dx, FORMULA_TOLERANCE),
    ]
}

/// ψ_yy with η'' from the critical-point relation agrees with the general formula.
fn critical_point(ctx: &Ctx, formulas: &[Option<SurfaceFormulas>]) -> CheckResult {
    let (id, desc) = ("critical_point_psi_yy", "ψ_yy at a critical point of ψ_y² reduces to the short form");
    if formulas.iter().any(Option::is_none) {
        return ctx.skipped(id, desc, "surface stagnation: C - 2gη ≤ 0");
    }
    let g = ctx.sol.params.g;
    let c = ctx.frame.bernoulli_c;
    let gamma0 = ctx.sol.gamma.at_p(0.0);
    let vals = (0..ctx.grid.nq)
        .map(|i| {
            let (e, ex, _) = surf(ctx, i);
            let exx = g * (1.0 + ex * ex) / (2.0 * g * e - c);
            let full = surface_formulas_from(c, g, gamma0, e, ex, exx).map_or(f64::NAN, |f| f.psi_yy);
            let short = psi_yy_at_critical_point(c, g, gamma0, e, ex);
            ((full - short) / short.abs().max(1.0), Location::x(ctx.grid.q(i)))
        })
        .collect();
    ctx.residual(id, desc, vals, 1e-10)
}
