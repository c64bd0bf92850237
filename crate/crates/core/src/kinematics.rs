//! Streamlines, traversal times, drift and particle trajectories.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::fields::{jet_at_physical, locate_hodograph, stokes_speed, PhysicalFrame};
use crate::interp::wrap_q;
use crate::solver::WaveSolution;

/// Gauss-Legendre nodes and weights on [-1, 1].
const GAUSS: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Streamline {
    pub p: f64,
    pub x: Vec<f64>,
    pub sigma: Vec<f64>,
    pub slope: Vec<f64>,
    pub max_steepness: f64,
}

/// Samples σ(x) = h(x, p) - d at `samples` equispaced x in [-π, π).
pub fn streamline(sol: &WaveSolution, frame: &PhysicalFrame, p: f64, samples: usize) -> Result<Streamline> {
    let p0 = sol.params.p0;
    if !(p >= p0 && p <= 0.0) {
        return Err(WaveError::InvalidParameter(format!("p = {p} outside [{p0}, 0]")));
    }
    if samples == 0 {
        return Err(WaveError::InvalidParameter("samples must be positive".into()));
    }
    let x: Vec<f64> = (0..samples)
        .map(|i| -PI + 2.0 * PI * i as f64 / samples as f64)
        .collect();
    let mut sigma = Vec::with_capacity(samples);
    let mut slope = Vec::with_capacity(samples);
    for &xi in &x {
        let jet = frame.smooth().eval(xi, p);
        sigma.push(jet.h - frame.depth);
        slope.push(jet.h_q);
    }
    let max_steepness = slope.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(Streamline {
        p,
        x,
        sigma,
        slope,
        max_steepness,
    })
}

/// Traversal time τ and drift per period D at stream level p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelDrift {
    pub p: f64,
    pub tau: f64,
    pub drift: f64,
}

/// τ = ∫ h_p(q, p) dq over one period and D = cτ - 2π. Grid rows use the
/// trapezoid sum of the nodal h_p; other levels use the interpolant.
pub fn traversal_and_drift(sol: &WaveSolution, frame: &PhysicalFrame, p: f64) -> Result<LevelDrift> {
    let p0 = sol.params.p0;
    if !(p >= p0 && p <= 0.0) {
        return Err(WaveError::InvalidParameter(format!("p = {p} outside [{p0}, 0]")));
    }
    let g = sol.grid();
    let s = (p - p0) / g.dp();
    let j = s.round() as usize;
    let mean_hp = if (s - j as f64).abs() < 1e-12 {
        frame.smooth().row_mean_hp(j)
    } else {
        frame.smooth().mean_hp(p)
    };
    let tau = 2.0 * PI * mean_hp;
    Ok(LevelDrift {
        p,
        tau,
        drift: frame.speed * tau - 2.0 * PI,
    })
}

/// Drift on every grid level, bed first.
pub fn drift_profile(sol: &WaveSolution, frame: &PhysicalFrame) -> Vec<LevelDrift> {
    let g = sol.grid();
    (0..=g.np)
        .map(|j| {
            let tau = 2.0 * PI * frame.smooth().row_mean_hp(j);
            LevelDrift {
                p: g.p(j),
                tau,
                drift: frame.speed * tau - 2.0 * PI,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    /// Physical position, X = x + ct.
    pub big_x: f64,
    pub big_y: f64,
    /// Steady-frame x, not reduced to one period.
    pub x: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start: (f64, f64),
    pub dt: f64,
    pub samples: Vec<TrajectorySample>,
    /// Times at which the steady-frame x crosses π mod 2π.
    pub crossings: Vec<f64>,
    /// Mean time between successive crossings, if two were seen.
    pub tau: Option<f64>,
    pub drift: Option<f64>,
    /// max |ψ(t) - ψ(0)| / |p0|.
    pub psi_deviation: f64,
}

impl Trajectory {
    /// max Y - min Y over the samples.
    pub fn vertical_extent(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.big_y), hi.max(s.big_y)));
        hi - lo
    }
}

/// Steady-frame velocity (ẋ, ẏ) = (-1/h_p, -h_q/h_p) from the interpolant, and p.
fn steady_velocity(frame: &PhysicalFrame, p0: f64, x: f64, y: f64, guess: f64) -> Result<(f64, f64, f64)> {
    let (p, jet) = jet_at_physical(frame, p0, x, y, guess);
    if !(jet.h_p > 0.0) {
        return Err(WaveError::StagnationQuery { q: wrap_q(x), p, h_p: jet.h_p });
    }
    Ok((-1.0 / jet.h_p, -jet.h_q / jet.h_p, p))
}

/// Integrates the particle starting at (X0, Y0) at t = 0 with classic RK4 in
/// the steady frame.
pub fn integrate_trajectory(
    sol: &WaveSolution,
    frame: &PhysicalFrame,
    x0: f64,
    y0: f64,
    duration: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(duration >= 0.0) {
        return Err(WaveError::InvalidParameter("dt must be positive and duration non-negative".into()));
    }
    let p0 = sol.params.p0;
    let (_, p_start) = locate_hodograph(sol, frame, x0, y0)?;
    let c = frame.speed;
    let steps = (duration / dt).round() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    let (mut x, mut y, mut p) = (x0, y0, p_start);
    let mut crossings = Vec::new();
    let mut deviation = 0.0f64;
    samples.push(TrajectorySample { t: 0.0, big_x: x0, big_y: y0, x: x0, psi: -p_start });
    let period_index = |x: f64| ((x - PI) / (2.0 * PI)).floor();
    for n in 0..steps {
        let t = n as f64 * dt;
        let (k1x, k1y, p1) = steady_velocity(frame, p0, x, y, p)?;
        let (k2x, k2y, p2) = steady_velocity(frame, p0, x + 0.5 * dt * k1x, y + 0.5 * dt * k1y, p1)?;
        let (k3x, k3y, p3) = steady_velocity(frame, p0, x + 0.5 * dt * k2x, y + 0.5 * dt * k2y, p2)?;
        let (k4x, k4y, _) = steady_velocity(frame, p0, x + dt * k3x, y + dt * k3y, p3)?;
        let nx = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        let ny = y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        let (jet_p, _) = jet_at_physical(frame, p0, nx, ny, p);
        if period_index(nx) != period_index(x) {
            // x decreases through the level π + 2πm between the two samples
            let level = period_index(x) * 2.0 * PI + PI;
            let frac = (x - level) / (x - nx);
            crossings.push(t + frac * dt);
        }
        x = nx;
        y = ny;
        p = jet_p;
        deviation = deviation.max((p - p_start).abs() / p0.abs());
        let tn = (n + 1) as f64 * dt;
        samples.push(TrajectorySample { t: tn, big_x: x + c * tn, big_y: y, x, psi: -p });
    }
    let tau = if crossings.len() >= 2 {
        Some((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
    } else {
        None
    };
    Ok(Trajectory {
        start: (x0, y0),
        dt,
        samples,
        crossings,
        tau,
        drift: tau.map(|t| c * t - 2.0 * PI),
        psi_deviation: deviation,
    })
}

/// ∫_{-d}^{η(x)} (u - c) dy in physical coordinates, with u = c_sol - 1/h_p and
/// c_sol the Stokes speed of the solution itself; the frame's c is subtracted.
pub fn mass_flux(sol: &WaveSolution, frame: &PhysicalFrame, x: f64) -> Result<f64> {
    let g = sol.grid();
    let q = wrap_q(x);
    let c_sol = stokes_speed(frame.smooth().nodal_hp().row(0));
    // split [−d, η(x)] at the heights of the grid streamlines through x
    let levels: Vec<f64> = (0..=g.np)
        .map(|j| frame.smooth().eval(q, g.p(j)).h - frame.depth)
        .collect();
    let mut total = 0.0;
    for w in levels.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for &(node, weight) in &GAUSS {
            let y = mid + half * node;
            let (_, p) = locate_hodograph(sol, frame, x, y)?;
            let jet = frame.smooth().eval(q, p);
            let u = c_sol - 1.0 / jet.h_p;
            total += weight * half * (u - frame.speed);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::derive_frame;
    use crate::grid::WaveParameters;
    use crate::laminar::solve_laminar;
    use crate::vorticity::VorticitySpec;

    fn laminar(gamma0: f64) -> WaveSolution {
        let gamma = VorticitySpec::new(if gamma0 == 0.0 { vec![] } else { vec![gamma0] }, -1.0).unwrap();
        let prof = solve_laminar(&gamma, -1.0, 1.0, 9.81, 32).unwrap();
        WaveSolution::laminar(&prof, &gamma, WaveParameters::new(9.81, -1.0, 32, 32).unwrap()).unwrap()
    }

    #[test]
    fn laminar_streamlines_are_flat() {
        let sol = laminar(-0.3);
        let f = derive_frame(&sol);
        let bed = streamline(&sol, &f, -1.0, 16).unwrap();
        assert!(bed.sigma.iter().all(|s| (s + f.depth).abs() < 1e-13));
        assert_eq!(bed.max_steepness, 0.0);
        let mid = streamline(&sol, &f, -0.37, 16).unwrap();
        let first = mid.sigma[0];
        assert!(mid.sigma.iter().all(|s| (s - first).abs() < 1e-13));
    }

    #[test]
    fn laminar_drift() {
        let sol = laminar(0.0);
        let f = derive_frame(&sol);
        for p in [-1.0, -0.5, 0.0] {
            let d = traversal_and_drift(&sol, &f, p).unwrap();
            assert!((d.tau - 2.0 * PI).abs() < 1e-12);
            assert!(d.drift.abs() < 1e-12);
        }
        let sol = laminar(-0.3);
        let f = derive_frame(&sol);
        let d = traversal_and_drift(&sol, &f, 0.0).unwrap();
        // discrete profile: within O(Δp²) of 2π·0.58114
        assert!((d.drift - 2.0 * PI * (0.4f64.powf(-0.5) - 1.0)).abs() < 5e-3, "{}", d.drift);
    }

    #[test]
    fn laminar_trajectory_is_still() {
        let sol = laminar(0.0);
        let f = derive_frame(&sol);
        let tr = integrate_trajectory(&sol, &f, 0.3, -0.5, 13.0, 0.01).unwrap();
        for s in &tr.samples {
            assert!((s.big_x - 0.3).abs() < 1e-10);
            assert!((s.big_y + 0.5).abs() < 1e-12);
        }
        assert!((tr.tau.unwrap() - 2.0 * PI).abs() < 1e-9);
        assert!(integrate_trajectory(&sol, &f, 0.0, 0.5, 1.0, 0.1).is_err());
    }

    #[test]
    fn laminar_mass_flux() {
        let sol = laminar(0.0);
        let f = derive_frame(&sol);
        assert!((mass_flux(&sol, &f, 0.7).unwrap() + 1.0).abs() < 1e-12);
        let sol = laminar(-0.3);
        let f = derive_frame(&sol);
        assert!((mass_flux(&sol, &f, 2.0).unwrap() + 1.0).abs() < 1e-10);
    }
}
