//! Trivial q-independent flows H(p), the linearised dispersion condition and
//! the bifurcation point from which the periodic waves emanate.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::grid::{GridFunction, HodographGrid};
use crate::vorticity::VorticitySpec;

/// Sub-steps of the shooting integrator per solver p-cell.
pub const SHOOTING_REFINEMENT: usize = 8;

/// Laminar current with H(p0) = 0 and H'(p0) = λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaminarProfile {
    pub lambda: f64,
    pub p0: f64,
    pub g: f64,
    /// H at the Np + 1 solver p-nodes.
    pub height: Vec<f64>,
    /// H' at the same nodes.
    pub slope: Vec<f64>,
    /// Bernoulli constant in hodograph form, Q = 2gH(0) + 1/H'(0)².
    pub bernoulli_q: f64,
    /// Wave speed under the bed Stokes condition, c = 1/λ.
    pub speed: f64,
}

impl LaminarProfile {
    pub fn np(&self) -> usize {
        self.height.len() - 1
    }

    pub fn depth(&self) -> f64 {
        *self.height.last().unwrap()
    }

    pub fn surface_slope(&self) -> f64 {
        *self.slope.last().unwrap()
    }

    /// h(q, p) = H(p) on the given grid (which must share the p-nodes).
    pub fn height_field(&self, grid: HodographGrid) -> GridFunction {
        assert_eq!(grid.np, self.np(), "profile and grid p-nodes differ");
        let mut f = GridFunction::zeros(grid);
        for j in 0..=grid.np {
            for i in 0..grid.nq {
                f.set(i, j, self.height[j]);
            }
        }
        f
    }
}

/// λ⁻² + 2∫_{p0}^{p} γ(-t) dt, which equals H'(p)⁻² for the laminar flow.
fn inverse_square_slope(gamma: &VorticitySpec, p0: f64, lambda: f64, p: f64) -> f64 {
    lambda.powi(-2) + 2.0 * (gamma.antiderivative(-p0) - gamma.antiderivative(-p))
}

fn check_no_stagnation(gamma: &VorticitySpec, p0: f64, lambda: f64, np: usize) -> Result<()> {
    let samples = 4 * SHOOTING_REFINEMENT * np;
    let w = |p: f64| inverse_square_slope(gamma, p0, lambda, p);
    let p_at = |k: usize| p0 * (1.0 - k as f64 / samples as f64);
    for k in 1..=samples {
        let (a, b) = (p_at(k - 1), p_at(k));
        if w(b) <= 0.0 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if w(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Err(WaveError::LaminarStagnation { p: 0.5 * (lo + hi) });
        }
    }
    Ok(())
}

type State = [f64; 4];

/// Classic RK4 on (H, H', m, m') with H'' = -γH'³ and
/// m'' + 3γH'²m' - k²H'²m = 0, from p0 to 0.
fn shoot(
    gamma: &VorticitySpec,
    p0: f64,
    lambda: f64,
    k: f64,
    np: usize,
) -> Result<Vec<State>> {
    check_no_stagnation(gamma, p0, lambda, np)?;
    let rhs = |p: f64, y: &State| -> State {
        let gam = gamma.at_p(p.min(0.0));
        let hp2 = y[1] * y[1];
        [
            y[1],
            -gam * hp2 * y[1],
            y[3],
            -3.0 * gam * hp2 * y[3] + k * k * hp2 * y[2],
        ]
    };
    let steps = SHOOTING_REFINEMENT * np;
    let dp = -p0 / steps as f64;
    let mut y: State = [0.0, lambda, 0.0, 1.0];
    let mut out = Vec::with_capacity(np + 1);
    out.push(y);
    for n in 0..steps {
        let p = p0 + n as f64 * dp;
        let k1 = rhs(p, &y);
        let k2 = rhs(p + 0.5 * dp, &add(&y, &k1, 0.5 * dp));
        let k3 = rhs(p + 0.5 * dp, &add(&y, &k2, 0.5 * dp));
        let k4 = rhs(p + dp, &add(&y, &k3, dp));
        for c in 0..4 {
            y[c] += dp / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        if !(y[1] > 0.0) || !y[1].is_finite() {
            return Err(WaveError::LaminarStagnation { p: p + dp });
        }
        if (n + 1) % SHOOTING_REFINEMENT == 0 {
            out.push(y);
        }
    }
    Ok(out)
}

fn add(y: &State, k: &State, h: f64) -> State {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}

/// Integrates the laminar profile for slope parameter λ = H'(p0) on a p-grid with `np` cells.
pub fn solve_laminar(
    gamma: &VorticitySpec,
    p0: f64,
    lambda: f64,
    g: f64,
    np: usize,
) -> Result<LaminarProfile> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(WaveError::InvalidParameter("lambda must be positive".into()));
    }
    if !(p0 < 0.0) {
        return Err(WaveError::InvalidParameter("p0 must be negative".into()));
    }
    if np < 3 {
        return Err(WaveError::InvalidParameter("np must be at least 3".into()));
    }
    let states = shoot(gamma, p0, lambda, 0.0, np)?;
    let height: Vec<f64> = states.iter().map(|s| s[0]).collect();
    let slope: Vec<f64> = states.iter().map(|s| s[1]).collect();
    let h_top = height[np];
    let hp_top = slope[np];
    Ok(LaminarProfile {
        lambda,
        p0,
        g,
        height,
        slope,
        bernoulli_q: 2.0 * g * h_top + 1.0 / (hp_top * hp_top),
        speed: 1.0 / lambda,
    })
}

/// g·m(0)·H'(0)³ - m'(0) for the 2π/k-periodic linearised problem; zero at a bifurcation point.
pub fn dispersion_residual(
    profile: &LaminarProfile,
    gamma: &VorticitySpec,
    g: f64,
    k: u32,
) -> Result<f64> {
    let states = shoot(gamma, profile.p0, profile.lambda, k as f64, profile.np())?;
    let top = states.last().unwrap();
    Ok(g * top[2] * top[1].powi(3) - top[3])
}

fn residual_at(gamma: &VorticitySpec, p0: f64, g: f64, k: u32, lambda: f64, np: usize) -> Result<f64> {
    let states = shoot(gamma, p0, lambda, k as f64, np)?;
    let top = states.last().unwrap();
    Ok(g * top[2] * top[1].powi(3) - top[3])
}

/// A located bifurcation point together with the laminar flow and the neutral mode there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bifurcation {
    pub lambda: f64,
    pub wavenumber: u32,
    pub profile: LaminarProfile,
    /// Neutral mode m(p_j), normalised so that m(0) = 1.
    pub mode: Vec<f64>,
}

impl Bifurcation {
    pub fn depth(&self) -> f64 {
        self.profile.depth()
    }

    pub fn speed(&self) -> f64 {
        self.profile.speed
    }
}

/// Bisection on the dispersion residual over [lo, hi] until the bracket is below 1e-12.
#[allow(clippy::too_many_arguments)]
pub fn find_bifurcation(
    gamma: &VorticitySpec,
    p0: f64,
    g: f64,
    k: u32,
    lo: f64,
    hi: f64,
    np: usize,
) -> Result<Bifurcation> {
    if !(lo > 0.0 && hi > lo) {
        return Err(WaveError::InvalidParameter(format!(
            "invalid lambda bracket [{lo}, {hi}]"
        )));
    }
    let r = |l: f64| residual_at(gamma, p0, g, k, l, np);
    let (mut a, mut b) = (lo, hi);
    let (ra, rb) = (r(a)?, r(b)?);
    if ra == 0.0 {
        b = a;
    } else if rb == 0.0 {
        a = b;
    } else if ra.signum() == rb.signum() {
        return Err(WaveError::NoBifurcation { lo, hi });
    }
    let mut fa = ra;
    for _ in 0..200 {
        if b - a < 1e-12 {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = r(mid)?;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let lambda = 0.5 * (a + b);
    let profile = solve_laminar(gamma, p0, lambda, g, np)?;
    let states = shoot(gamma, p0, lambda, k as f64, np)?;
    let top = states.last().unwrap()[2];
    let mode = states.iter().map(|s| s[2] / top).collect();
    Ok(Bifurcation {
        lambda,
        wavenumber: k,
        profile,
        mode,
    })
}

/// Scans [lo, hi] and returns the first sub-bracket where the residual changes sign.
/// Scanning stops at the first stagnating λ.
pub fn scan_for_bracket(
    gamma: &VorticitySpec,
    p0: f64,
    g: f64,
    k: u32,
    lo: f64,
    hi: f64,
    samples: usize,
    np: usize,
) -> Result<(f64, f64)> {
    let mut prev: Option<(f64, f64)> = None;
    for n in 0..=samples {
        let lambda = lo + (hi - lo) * n as f64 / samples as f64;
        let value = match residual_at(gamma, p0, g, k, lambda, np) {
            Ok(v) => v,
            Err(WaveError::LaminarStagnation { .. }) => break,
            Err(e) => return Err(e),
        };
        if let Some((pl, pv)) = prev {
            if pv.signum() != value.signum() {
                return Ok((pl, lambda));
            }
        }
        prev = Some((lambda, value));
    }
    Err(WaveError::NoBifurcation { lo, hi })
}

/// h = H(p) + ε m(p) cos q with the laminar Q; a Newton starting guess.
pub fn linear_seed(bif: &Bifurcation, epsilon: f64, grid: HodographGrid) -> (GridFunction, f64) {
    let mut h = bif.profile.height_field(grid);
    for j in 0..=grid.np {
        for i in 0..grid.nq {
            let v = h.at(i, j) + epsilon * bif.mode[j] * grid.q(i).cos();
            h.set(i, j, v);
        }
    }
    (h, bif.profile.bernoulli_q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_form_slope(gamma0: f64, lambda: f64, p0: f64, p: f64) -> f64 {
        (lambda.powi(-2) + 2.0 * gamma0 * (p - p0)).powf(-0.5)
    }

    #[test]
    fn irrotational_profile_is_linear() {
        let gamma = VorticitySpec::irrotational(-1.0).unwrap();
        let prof = solve_laminar(&gamma, -1.0, 1.0, 9.81, 16).unwrap();
        for (j, h) in prof.height.iter().enumerate() {
            let p = -1.0 + j as f64 / 16.0;
            assert!((h - (p + 1.0)).abs() < 1e-14);
        }
        assert!((prof.depth() - 1.0).abs() < 1e-14);
        assert_eq!(prof.speed, 1.0);
        assert!((prof.bernoulli_q - (2.0 * 9.81 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn constant_vorticity_matches_closed_form() {
        let gamma = VorticitySpec::constant(-0.3, -1.0).unwrap();
        let prof = solve_laminar(&gamma, -1.0, 1.0, 9.81, 64).unwrap();
        for (j, s) in prof.slope.iter().enumerate() {
            let p = -1.0 + j as f64 / 64.0;
            assert!((s - closed_form_slope(-0.3, 1.0, -1.0, p)).abs() < 1e-10);
        }
        assert!((prof.surface_slope() - 0.4f64.powf(-0.5)).abs() < 1e-10);
        let depth = (1.0f64 + 2.0 * -0.3).sqrt().mul_add(1.0, -1.0) / -0.3;
        assert!((prof.depth() - depth).abs() < 1e-10);
        assert!((prof.depth() - 1.22514).abs() < 1e-5);
        // surface Bernoulli relation and Stokes speed
        let q_check = 2.0 * 9.81 * prof.depth() + 1.0 / prof.surface_slope().powi(2);
        assert!((prof.bernoulli_q - q_check).abs() < 1e-12);
        assert_eq!(prof.speed, 1.0);
    }

    #[test]
    fn strong_negative_vorticity_stagnates() {
        let gamma = VorticitySpec::constant(-0.6, -1.0).unwrap();
        match solve_laminar(&gamma, -1.0, 1.0, 9.81, 64) {
            Err(WaveError::LaminarStagnation { p }) => assert!((p + 1.0 / 6.0).abs() < 1e-9, "p {p}"),
            other => panic!("expected stagnation, got {other:?}"),
        }
    }

    /// Independent oracle: bisection on g λ² tanh(λ|p0|) = 1.
    fn irrotational_lambda(g: f64, depth: f64) -> f64 {
        let f = |l: f64| g * l * l * (l * depth).tanh() - 1.0;
        let (mut a, mut b) = (1e-3, 10.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                b = m
            } else {
                a = m
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn irrotational_residual_closed_form_and_signs() {
        let gamma = VorticitySpec::irrotational(-1.0).unwrap();
        let prof = solve_laminar(&gamma, -1.0, 1.0, 9.81, 64).unwrap();
        let r = dispersion_residual(&prof, &gamma, 9.81, 1).unwrap();
        // m = sinh(λ(p - p0))/λ, m' = cosh(...)
        let exact = 9.81 * 1.0f64.sinh() - 1.0f64.cosh();
        assert!((r - exact).abs() < 1e-10, "{r} vs {exact}");
        assert!(r > 0.0);
        let small = solve_laminar(&gamma, -1.0, 0.05, 9.81, 64).unwrap();
        assert!(dispersion_residual(&small, &gamma, 9.81, 1).unwrap() < 0.0);
        let star = irrotational_lambda(9.81, 1.0);
        let at_star = solve_laminar(&gamma, -1.0, star, 9.81, 64).unwrap();
        assert!(dispersion_residual(&at_star, &gamma, 9.81, 1).unwrap().abs() < 1e-9);
    }

    #[test]
    fn irrotational_bifurcation_matches_oracle() {
        let gamma = VorticitySpec::irrotational(-1.0).unwrap();
        let bif = find_bifurcation(&gamma, -1.0, 9.81, 1, 0.1, 1.0, 64).unwrap();
        let oracle = irrotational_lambda(9.81, 1.0);
        assert!((bif.lambda - oracle).abs() < 1e-10);
        assert!((bif.lambda - 0.4786).abs() < 1e-4);
        assert!((bif.depth() - bif.lambda).abs() < 1e-13);
        assert!((bif.speed() - 2.089).abs() < 1e-3);
        assert!((bif.mode[64] - 1.0).abs() < 1e-15);
        assert!(bif.mode[1..].iter().all(|&m| m > 0.0));
    }

    #[test]
    fn constructed_inverse_problem() {
        let gamma = VorticitySpec::irrotational(-1.0).unwrap();
        let g = 1.0 / (0.25 * 0.5f64.tanh());
        let bif = find_bifurcation(&gamma, -1.0, g, 1, 0.1, 1.0, 64).unwrap();
        assert!((bif.lambda - 0.5).abs() < 1e-8);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let gamma = VorticitySpec::irrotational(-1.0).unwrap();
        assert!(matches!(
            find_bifurcation(&gamma, -1.0, 9.81, 1, 0.6, 1.0, 64),
            Err(WaveError::NoBifurcation { .. })
        ));
    }

    #[test]
    fn constant_vorticity_bifurcation_is_grid_converged() {
        let gamma = VorticitySpec::constant(-0.3, -1.0).unwrap();
        let (lo, hi) = scan_for_bracket(&gamma, -1.0, 9.81, 1, 0.05, 1.2, 64, 64).unwrap();
        let coarse = find_bifurcation(&gamma, -1.0, 9.81, 1, lo, hi, 64).unwrap();
        let fine = find_bifurcation(&gamma, -1.0, 9.81, 1, lo, hi, 128).unwrap();
        assert!((coarse.lambda - fine.lambda).abs() < 1e-9);
        let prof = solve_laminar(&gamma, -1.0, coarse.lambda, 9.81, 64).unwrap();
        assert!(dispersion_residual(&prof, &gamma, 9.81, 1).unwrap().abs() < 1e-8);
        // regression anchor recorded from the first run
        assert!((coarse.lambda - LAMBDA_CONSTANT_MINUS_03).abs() < 1e-9, "{}", coarse.lambda);
    }

    const LAMBDA_CONSTANT_MINUS_03: f64 = 0.461_796_405_177_426_5;

    #[test]
    fn residual_is_monotone_in_lambda() {
        let gamma = VorticitySpec::constant(-0.1, -1.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for n in 0..200 {
            let lambda = 0.05 + n as f64 * 0.01;
            let prof = solve_laminar(&gamma, -1.0, lambda, 9.81, 32).unwrap();
            let r = dispersion_residual(&prof, &gamma, 9.81, 1).unwrap();
            assert!(r > prev, "not monotone at {lambda}");
            prev = r;
        }
    }

    #[test]
    fn seed_at_zero_amplitude_is_laminar() {
        let gamma = VorticitySpec::irrotational(-1.0).unwrap();
        let bif = find_bifurcation(&gamma, -1.0, 9.81, 1, 0.1, 1.0, 16).unwrap();
        let grid = HodographGrid { nq: 32, np: 16, p0: -1.0 };
        let (h, q) = linear_seed(&bif, 0.0, grid);
        assert_eq!(h, bif.profile.height_field(grid));
        assert_eq!(q, bif.profile.bernoulli_q);
        let (h, _) = linear_seed(&bif, 0.01, grid);
        let eta_crest = h.at(grid.crest(), 16) - bif.depth();
        let eta_trough = h.at(grid.trough(), 16) - bif.depth();
        assert!((eta_crest - 0.01).abs() < 1e-14);
        assert!((eta_trough + 0.01).abs() < 1e-14);
    }
}
