//! Physical quantities reconstructed from a hodograph solution.
//!
//! Physical coordinates are x = q and y = h(q, p) - d, with ψ = -p and
//!
//! ```text
//! u - c = ψ_y = -1/h_p,   v = -ψ_x = -h_q/h_p.
//! ```

use serde::{Deserialize, Serialize};

use crate::diff::{diff_p, diff_pp, diff_q, diff_qp, diff_qq, integrate_q};
use crate::error::{Result, WaveError};
use crate::grid::GridFunction;
use crate::interp::{wrap_q, LocalJet, SmoothField};
use crate::solver::WaveSolution;

/// Relative slack for points queried on the boundary of the fluid.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Difference-quotient derivatives of h on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub h_q: GridFunction,
    pub h_p: GridFunction,
    pub h_qq: GridFunction,
    pub h_pp: GridFunction,
    pub h_qp: GridFunction,
}

impl Derivatives {
    pub fn new(h: &GridFunction) -> Self {
        Self {
            h_q: diff_q(h),
            h_p: diff_p(h),
            h_qq: diff_qq(h),
            h_pp: diff_pp(h),
            h_qp: diff_qp(h),
        }
    }
}

/// Frame quantities of a wave: depth, speed, Bernoulli constants and the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalFrame {
    /// Mean depth d, the period mean of h(·, 0).
    pub depth: f64,
    /// Wave speed c from the bed Stokes condition.
    pub speed: f64,
    /// Physical Bernoulli constant C = Q - 2gd.
    pub bernoulli_c: f64,
    pub bernoulli_q: f64,
    pub amplitude: f64,
    /// x at the q-nodes (-π first).
    pub x: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_x: Vec<f64>,
    pub eta_xx: Vec<f64>,
    pub derivs: Derivatives,
    smooth: SmoothField,
}

/// Serializable summary of a [`PhysicalFrame`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSummary {
    pub depth: f64,
    pub speed: f64,
    pub bernoulli_c: f64,
    pub bernoulli_q: f64,
    pub amplitude: f64,
    pub max_surface_slope: f64,
}

impl PhysicalFrame {
    pub fn summary(&self) -> FrameSummary {
        FrameSummary {
            depth: self.depth,
            speed: self.speed,
            bernoulli_c: self.bernoulli_c,
            bernoulli_q: self.bernoulli_q,
            amplitude: self.amplitude,
            max_surface_slope: self.eta_x.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn smooth(&self) -> &SmoothField {
        &self.smooth
    }

    /// Interpolated surface elevation η(x).
    pub fn eta_at(&self, x: f64) -> f64 {
        self.smooth.eval(wrap_q(x), 0.0).h - self.depth
    }
}

/// Stokes speed c = (1/2π) ∫ dq / h_p(q, p0).
pub(crate) fn stokes_speed(h_p_bed: &[f64]) -> f64 {
    let inv: Vec<f64> = h_p_bed.iter().map(|v| 1.0 / v).collect();
    integrate_q(&inv) / (2.0 * std::f64::consts::PI)
}

pub fn derive_frame(sol: &WaveSolution) -> PhysicalFrame {
    let grid = sol.grid();
    let derivs = Derivatives::new(&sol.h);
    let surface = sol.h.row(grid.np);
    let depth = integrate_q(surface) / (2.0 * std::f64::consts::PI);
    let speed = stokes_speed(derivs.h_p.row(0));
    let eta: Vec<f64> = surface.iter().map(|v| v - depth).collect();
    let n = grid.nq;
    let dq = grid.dq();
    let eta_x = (0..n)
        .map(|i| (eta[(i + 1) % n] - eta[(i + n - 1) % n]) / (2.0 * dq))
        .collect();
    let eta_xx = (0..n)
        .map(|i| (eta[(i + 1) % n] - 2.0 * eta[i] + eta[(i + n - 1) % n]) / (dq * dq))
        .collect();
    PhysicalFrame {
        depth,
        speed,
        bernoulli_c: sol.bernoulli_q - 2.0 * sol.params.g * depth,
        bernoulli_q: sol.bernoulli_q,
        amplitude: sol.amplitude(),
        x: (0..n).map(|i| grid.q(i)).collect(),
        eta,
        eta_x,
        eta_xx,
        smooth: SmoothField::new(&sol.h),
        derivs,
    }
}

fn bilinear(f: &GridFunction, q: f64, p: f64) -> f64 {
    let g = f.grid;
    let s = (q + std::f64::consts::PI) / g.dq();
    let i0 = (s.floor() as usize).min(g.nq - 1);
    let tq = s - i0 as f64;
    let i1 = (i0 + 1) % g.nq;
    let r = ((p - g.p0) / g.dp()).clamp(0.0, g.np as f64);
    let j0 = (r.floor() as usize).min(g.np - 1);
    let tp = r - j0 as f64;
    let lo = f.at(i0, j0) * (1.0 - tq) + f.at(i1, j0) * tq;
    let hi = f.at(i0, j0 + 1) * (1.0 - tq) + f.at(i1, j0 + 1) * tq;
    lo * (1.0 - tp) + hi * tp
}

/// (u, v) at hodograph point (q, p) from bilinear interpolation of the nodal h_q, h_p.
pub fn velocity_at_hodograph(
    sol: &WaveSolution,
    frame: &PhysicalFrame,
    q: f64,
    p: f64,
) -> Result<(f64, f64)> {
    let p0 = sol.params.p0;
    let slack = BOUNDARY_SLACK * p0.abs();
    if !(p >= p0 - slack && p <= slack) || !q.is_finite() {
        return Err(WaveError::InvalidParameter(format!(
            "p = {p} outside [{p0}, 0]"
        )));
    }
    let q = wrap_q(q);
    let hp = bilinear(&frame.derivs.h_p, q, p);
    let hq = bilinear(&frame.derivs.h_q, q, p);
    if !(hp > 0.0) {
        return Err(WaveError::StagnationQuery { q, p, h_p: hp });
    }
    Ok((frame.speed - 1.0 / hp, -hq / hp))
}

/// Hodograph coordinates (q, p) of the physical point (x, y).
pub fn locate_hodograph(
    sol: &WaveSolution,
    frame: &PhysicalFrame,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    let q = wrap_q(x);
    let p0 = sol.params.p0;
    let top = frame.smooth.eval(q, 0.0).h;
    let target = y + frame.depth;
    let slack = BOUNDARY_SLACK * top.max(1.0);
    if !(target >= -slack && target <= top + slack) {
        return Err(WaveError::OutsideFluid { x, y });
    }
    if target <= 0.0 {
        return Ok((q, p0));
    }
    if target >= top {
        return Ok((q, 0.0));
    }
    let guess = p0 + (-p0) * target / top;
    Ok((q, frame.smooth.solve_p(q, target, p0, 0.0, guess)))
}

/// Interpolant jet at the physical point (x, y), with p.
/// Points within a small band outside the fluid are extended smoothly.
pub(crate) fn jet_at_physical(frame: &PhysicalFrame, p0: f64, x: f64, y: f64, guess: f64) -> (f64, LocalJet) {
    let q = wrap_q(x);
    let target = y + frame.depth;
    let band = 1e-3 * p0.abs();
    let p = frame.smooth.solve_p(q, target, p0 - band, band, guess);
    (p, frame.smooth.eval(q, p))
}

/// The four closed-form surface quantities at one x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFormulas {
    pub psi_y2: f64,
    pub dx_psi_y2: f64,
    pub psi_xy: f64,
    pub psi_yy: f64,
}

/// Closed forms in terms of η, η', η'' and γ(0) at the surface.
pub fn surface_formulas_from(
    c: f64,
    g: f64,
    gamma0: f64,
    eta: f64,
    eta_x: f64,
    eta_xx: f64,
) -> Result<SurfaceFormulas> {
    let head = c - 2.0 * g * eta;
    if !(head > 0.0) {
        return Err(WaveError::SurfaceStagnation { x: f64::NAN, value: head });
    }
    let s = 1.0 + eta_x * eta_x;
    let root = head.sqrt();
    let psi_y2 = head / s;
    let dx_psi_y2 = 2.0 * eta_x * ((2.0 * g * eta - c) * eta_xx - g * s) / (s * s);
    let psi_xy = eta_x
        * (2.0 * eta_xx * head + (1.0 - eta_x.powi(4)) * g + gamma0 * root * s.powf(1.5))
        / (s.powf(2.5) * root);
    let psi_yy = (eta_xx * head * (eta_x * eta_x - 1.0) + 2.0 * g * eta_x * eta_x * s
        - gamma0 * root * s.powf(1.5))
        / (s.powf(2.5) * root);
    Ok(SurfaceFormulas {
        psi_y2,
        dx_psi_y2,
        psi_xy,
        psi_yy,
    })
}

/// ψ_yy with η'' eliminated through (2gη - C)η'' = g(1 + η'²).
pub fn psi_yy_at_critical_point(c: f64, g: f64, gamma0: f64, eta: f64, eta_x: f64) -> f64 {
    let s = 1.0 + eta_x * eta_x;
    let root = (c - 2.0 * g * eta).sqrt();
    (g * s.sqrt() - gamma0 * root) / (s * root)
}

/// Surface formulas at the q-node nearest to x.
pub fn surface_formulas(
    sol: &WaveSolution,
    frame: &PhysicalFrame,
    x: f64,
) -> Result<SurfaceFormulas> {
    let grid = sol.grid();
    let s = (wrap_q(x) + std::f64::consts::PI) / grid.dq();
    let i = (s.round() as usize) % grid.nq;
    let gamma0 = sol.gamma.eval(0.0)?;
    surface_formulas_from(
        frame.bernoulli_c,
        sol.params.g,
        gamma0,
        frame.eta[i],
        frame.eta_x[i],
        frame.eta_xx[i],
    )
    .map_err(|e| match e {
        WaveError::SurfaceStagnation { value, .. } => WaveError::SurfaceStagnation { x, value },
        other => other,
    })
}

/// One row of the sampled field export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
    pub psi: f64,
}

/// Samples (u, v, ψ) on an nx × ny lattice over one period and the full depth
/// range; lattice points above the surface are omitted.
pub fn sample_lattice(
    sol: &WaveSolution,
    frame: &PhysicalFrame,
    nx: usize,
    ny: usize,
) -> Result<Vec<FieldSample>> {
    let top = frame.eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bottom = -frame.depth;
    let mut out = Vec::new();
    for jy in 0..ny {
        let y = if ny == 1 {
            bottom
        } else {
            bottom + (top - bottom) * jy as f64 / (ny - 1) as f64
        };
        for ix in 0..nx {
            let x = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * ix as f64 / nx as f64;
            match locate_hodograph(sol, frame, x, y) {
                Ok((q, p)) => {
                    let (u, v) = velocity_at_hodograph(sol, frame, q, p)?;
                    out.push(FieldSample { x, y, u, v, psi: -p });
                }
                Err(WaveError::OutsideFluid { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}
