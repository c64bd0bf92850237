//! Numerical checks of the monotonicity, drift, identity and surface
//! properties of a computed wave.
//!
//! Strict inequalities are asserted as "value > floor" and non-strict ones as
//! "value ≥ -tol"; both numbers are recorded with each result. Checks whose
//! hypotheses on γ or on the surface slope are not met are skipped with the
//! unmet hypothesis as reason. Results that rely on closeness to the
//! bifurcation point are labelled `unguaranteed` instead of `fail` when the
//! amplitude exceeds [`SMALL_AMPLITUDE`] times the depth.

mod drift;
mod identity;
pub mod jets;
mod monotonicity;
mod surface;

use serde::{Deserialize, Serialize};

use crate::fields::{derive_frame, PhysicalFrame};
use crate::grid::{GridFunction, HodographGrid};
use crate::solver::{validate_solution, Violation, WaveSolution};

pub use drift::check_drift_suite;
pub use identity::check_identity_suite;
pub use monotonicity::check_monotonicity_suite;
pub use surface::check_surface_suite;

/// Amplitude bound, relative to depth, for "near the bifurcation point".
pub const SMALL_AMPLITUDE: f64 = 0.05;
/// Relative tolerance of the closed-form surface formulas against differences.
pub const FORMULA_TOLERANCE: f64 = 5e-2;
/// Absolute tolerance of the mass-flux check.
pub const MASS_FLUX_TOLERANCE: f64 = 1e-4;
/// Tolerance of the divergence identity relative to cπ.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-4;
/// Tolerance of the surface bounds relative to g.
pub const SURFACE_BOUND_TOLERANCE: f64 = 1e-8;

/// Every check id in report order.
pub const CHECK_IDS: [&str; 34] = [
    "streamline_slope_negative",
    "max_steepness_increasing",
    "max_u_increasing",
    "vertical_velocity_positive",
    "max_v_increasing",
    "surface_u_nonincreasing",
    "h_qp_negative",
    "psi_xy_negative",
    "max_u_location",
    "drift_positive",
    "bed_drift_nonnegative",
    "drift_increasing",
    "drift_derivative_positive",
    "holder_chain",
    "divergence_identity",
    "divergence_integral_monotone",
    "cpi_bound",
    "h_q_operator",
    "h_p_operator",
    "h_qp_identity",
    "diffeomorphism_identity",
    "h_qp_squared_dominates",
    "mass_flux",
    "stokes_condition",
    "mean_water_level",
    "eta_xx_bound",
    "eta_x_bound",
    "eta_parabola_bound",
    "surface_bernoulli",
    "psi_y2_formula",
    "psi_xy_formula",
    "psi_yy_formula",
    "dx_psi_y2_formula",
    "critical_point_psi_yy",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Violated outside the regime where the property is guaranteed.
    Unguaranteed,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Location {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
}

impl Location {
    pub fn qp(q: f64, p: f64) -> Self {
        Self { q: Some(q), p: Some(p), x: None }
    }

    pub fn p(p: f64) -> Self {
        Self { p: Some(p), ..Self::default() }
    }

    pub fn x(x: f64) -> Self {
        Self { x: Some(x), ..Self::default() }
    }
}

/// Outcome of one check. For inequalities `margin` is the smallest slack
/// (positive when satisfied); for identities it is the largest residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub description: String,
    pub applied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
    pub verdict: Verdict,
    pub margin: Option<f64>,
    pub tolerance: Option<f64>,
    pub worst_location: Option<Location>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub gamma: Vec<f64>,
    pub g: f64,
    pub p0: f64,
    pub nq: usize,
    pub np: usize,
    pub amplitude: f64,
    pub depth: Option<f64>,
    pub speed: Option<f64>,
    pub bernoulli_c: Option<f64>,
    pub bernoulli_q: f64,
    pub max_surface_slope: f64,
    pub trivial_wave: bool,
    pub guaranteed_regime: bool,
    pub tol_eq: f64,
    pub pos_floor: f64,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub meta: ReportMeta,
    pub checks: Vec<CheckResult>,
    pub overall: Overall,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.overall == Overall::Pass
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Shared state of the suites.
pub(crate) struct Ctx<'a> {
    pub sol: &'a WaveSolution,
    pub frame: &'a PhysicalFrame,
    pub grid: HodographGrid,
    /// Nq/2, the trough column on the half period.
    pub k_max: usize,
    pub tol_eq: f64,
    pub floor: f64,
    pub trivial: bool,
    pub small: bool,
    pub slope_ok: bool,
}

pub(crate) fn tolerance_scale(sol: &WaveSolution) -> f64 {
    (10.0 * sol.residual).max(1e-10)
}

impl<'a> Ctx<'a> {
    pub fn new(sol: &'a WaveSolution, frame: &'a PhysicalFrame) -> Self {
        let tol_eq = tolerance_scale(sol);
        let max_slope = frame.eta_x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Self {
            sol,
            frame,
            grid: sol.grid(),
            k_max: sol.grid().nq / 2,
            tol_eq,
            floor: tol_eq,
            trivial: sol.amplitude().abs() < 1e-12,
            small: sol.amplitude() <= SMALL_AMPLITUDE * frame.depth,
            slope_ok: max_slope <= 1.0 / 3f64.sqrt(),
        }
    }

    /// Value of `f` at q = kΔq on row j.
    pub fn half(&self, f: &GridFunction, k: usize, j: usize) -> f64 {
        f.at(self.grid.half_to_full(k), j)
    }

    pub fn q(&self, k: usize) -> f64 {
        k as f64 * self.grid.dq()
    }

    pub fn skipped(&self, id: &str, description: &str, reason: &str) -> CheckResult {
        CheckResult {
            id: id.into(),
            description: description.into(),
            applied: false,
            skip_reason: Some(reason.into()),
            verdict: Verdict::Skipped,
            margin: None,
            tolerance: None,
            worst_location: None,
            notes: Vec::new(),
        }
    }

    /// Every value must be > floor (strict) or ≥ -tol (non-strict). A trivial
    /// wave is checked in the non-strict form.
    pub fn inequality(
        &self,
        id: &str,
        description: &str,
        values: Vec<(f64, Location)>,
        strict: bool,
        tol: f64,
        guaranteed: bool,
    ) -> CheckResult {
        let mut notes = Vec::new();
        let strict = if strict && self.trivial {
            notes.push("trivial wave: non-strict form checked".into());
            false
        } else {
            strict
        };
        let worst = values
            .iter()
            .fold(None::<(f64, Location)>, |acc, &(v, loc)| match acc {
                Some((m, _)) if !(v < m) && !v.is_nan() => acc,
                _ => Some((v, loc)),
            });
        let (margin, location) = match worst {
            Some((m, l)) => (Some(m), Some(l)),
            None => (None, None),
        };
        let (ok, tolerance) = match margin {
            None => (true, if strict { self.floor } else { tol }),
            Some(m) if strict => (m > self.floor, self.floor),
            Some(m) => (m >= -tol, tol),
        };
        if strict {
            notes.push("strict: smallest value must exceed the floor".into());
        }
        CheckResult {
            id: id.into(),
            description: description.into(),
            applied: true,
            skip_reason: None,
            verdict: verdict(ok, guaranteed, &mut notes),
            margin,
            tolerance: Some(tolerance),
            worst_location: location,
            notes,
        }
    }

    /// The largest residual must not exceed `tol`.
    pub fn residual(
        &self,
        id: &str,
        description: &str,
        residuals: Vec<(f64, Location)>,
        tol: f64,
    ) -> CheckResult {
        let worst = residuals
            .iter()
            .fold(None::<(f64, Location)>, |acc, &(v, loc)| match acc {
                Some((m, _)) if !(v.abs() > m) && !v.is_nan() => acc,
                _ => Some((v.abs(), loc)),
            });
        let (margin, location) = match worst {
            Some((m, l)) => (Some(m), Some(l)),
            None => (None, None),
        };
        let ok = margin.map_or(true, |m| m <= tol);
        let mut notes = Vec::new();
        CheckResult {
            id: id.into(),
            description: description.into(),
            applied: true,
            skip_reason: None,
            verdict: verdict(ok, true, &mut notes),
            margin,
            tolerance: Some(tol),
            worst_location: location,
            notes,
        }
    }
}

fn verdict(ok: bool, guaranteed: bool, notes: &mut Vec<String>) -> Verdict {
    match (ok, guaranteed) {
        (true, _) => Verdict::Pass,
        (false, true) => Verdict::Fail,
        (false, false) => {
            notes.push(format!(
                "outside guaranteed regime (a > {SMALL_AMPLITUDE}·d)"
            ));
            Verdict::Unguaranteed
        }
    }
}

/// Validates the solution, derives its frame and runs the four suites.
pub fn run_all(sol: &WaveSolution) -> VerificationReport {
    let validation = validate_solution(sol);
    let grid = sol.grid();
    let mut meta = ReportMeta {
        gamma: sol.gamma.coefficients().to_vec(),
        g: sol.params.g,
        p0: sol.params.p0,
        nq: grid.nq,
        np: grid.np,
        amplitude: sol.amplitude(),
        depth: None,
        speed: None,
        bernoulli_c: None,
        bernoulli_q: sol.bernoulli_q,
        max_surface_slope: validation.max_surface_slope,
        trivial_wave: sol.is_trivial(),
        guaranteed_regime: false,
        tol_eq: tolerance_scale(sol),
        pos_floor: tolerance_scale(sol),
        violations: validation.violations.clone(),
    };
    if !validation.is_valid() {
        let checks = CHECK_IDS
            .iter()
            .map(|id| CheckResult {
                id: (*id).into(),
                description: String::new(),
                applied: false,
                skip_reason: Some("invalid solution".into()),
                verdict: Verdict::Skipped,
                margin: None,
                tolerance: None,
                worst_location: None,
                notes: Vec::new(),
            })
            .collect();
        return VerificationReport {
            meta,
            checks,
            overall: Overall::Fail,
        };
    }
    let frame = derive_frame(sol);
    let ctx = Ctx::new(sol, &frame);
    meta.depth = Some(frame.depth);
    meta.speed = Some(frame.speed);
    meta.bernoulli_c = Some(frame.bernoulli_c);
    meta.guaranteed_regime = ctx.small;
    let mut checks = monotonicity::suite(&ctx);
    checks.extend(drift::suite(&ctx));
    checks.extend(identity::suite(&ctx));
    checks.extend(surface::suite(&ctx));
    let overall = if checks.iter().any(|c| c.verdict == Verdict::Fail) {
        Overall::Fail
    } else {
        Overall::Pass
    };
    VerificationReport {
        meta,
        checks,
        overall,
    }
}
