mod common;

use std::f64::consts::PI;

use common::*;
use hodowave::verify::*;

fn verdict(r: &VerificationReport, id: &str) -> Verdict {
    r.check(id).unwrap_or_else(|| panic!("missing {id}")).verdict
}

#[test]
fn laminar_reports_pass_with_trivial_annotations() {
    for g0 in [None, Some(-0.3)] {
        let s = laminar(g0, 32, 16);
        assert!(s.residual < 1e-12);
        let r = run_all(&s);
        assert!(r.passed(), "{}", r.to_json());
        assert!(r.meta.trivial_wave);
        assert!(r.meta.violations.is_empty());
        assert_eq!(verdict(&r, "drift_positive"), Verdict::Skipped);
        assert_eq!(r.check("drift_positive").unwrap().skip_reason.as_deref(), Some("trivial wave"));
        let slope = r.check("streamline_slope_negative").unwrap();
        assert!(slope.notes.iter().any(|n| n.contains("trivial")));
    }
}

#[test]
fn laminar_divergence_identity_has_closed_form() {
    // γ constant: both sides equal cπ + γ₀π·d; the p-grid is fine enough for 1e-6
    let s = laminar(Some(-0.3), 16, 256);
    let f = hodowave::derive_frame(&s);
    let r = check_identity_suite(&s, &f);
    let div = r.iter().find(|c| c.id == "divergence_identity").unwrap();
    assert!(div.margin.unwrap() < 1e-6, "{div:?}");
    let hp_top = hodowave::fields::Derivatives::new(&s.h).h_p.at(0, 256);
    let lhs_surface = PI / hp_top;
    let rhs_surface = f.speed * PI - 0.3 * PI * f.depth;
    assert!((lhs_surface - rhs_surface).abs() < 1e-3, "{lhs_surface} vs {rhs_surface}");
}

#[test]
fn irrotational_wave_passes_every_applied_check() {
    let s = wave(None, 128, 64, 0.01);
    let r = run_all(&s);
    assert!(r.passed(), "{}", r.to_json());
    let applied = r.checks.iter().filter(|c| c.applied).count();
    assert!(applied >= 20, "{applied} applied");
    for c in r.checks.iter().filter(|c| c.applied) {
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
    }
    assert_eq!(r.checks.len(), CHECK_IDS.len());
    for (c, id) in r.checks.iter().zip(CHECK_IDS) {
        assert_eq!(c.id, id);
    }
}

#[test]
fn constant_vorticity_gating() {
    let s = wave(Some(-0.1), 64, 32, 0.01);
    let r = run_all(&s);
    assert!(r.passed(), "{}", r.to_json());
    for id in ["streamline_slope_negative", "max_steepness_increasing", "max_u_increasing", "surface_u_nonincreasing"] {
        assert_eq!(verdict(&r, id), Verdict::Pass, "{id}");
    }
    let hqp = r.check("h_qp_negative").unwrap();
    assert_eq!(hqp.skip_reason.as_deref(), Some("requires γ = 0"));
    assert_eq!(verdict(&r, "drift_derivative_positive"), Verdict::Pass);
    assert_eq!(verdict(&r, "diffeomorphism_identity"), Verdict::Skipped);
}

#[test]
fn positive_vorticity_skips_sign_dependent_checks() {
    let s = wave(Some(0.2), 64, 32, 0.005);
    let r = run_all(&s);
    for id in ["drift_positive", "surface_u_nonincreasing", "eta_xx_bound", "cpi_bound"] {
        let c = r.check(id).unwrap();
        assert_eq!(c.skip_reason.as_deref(), Some("requires γ ≤ 0"), "{id}");
    }
}

#[test]
fn invalid_solution_skips_everything() {
    let mut s = wave(None, 64, 32, 0.005);
    let v = s.h.at(3, 7);
    s.h.set(3, 7, v + 1e-2);
    let r = run_all(&s);
    assert_eq!(r.overall, Overall::Fail);
    assert!(!r.meta.violations.is_empty());
    assert!(r.checks.iter().all(|c| c.verdict == Verdict::Skipped));
    assert_eq!(r.checks.len(), CHECK_IDS.len());
}

#[test]
fn operator_residuals_converge_at_second_order() {
    let ids = ["h_q_operator", "h_p_operator", "h_qp_identity", "diffeomorphism_identity"];
    let margins = |nq, np| {
        let r = run_all(&wave(None, nq, np, 0.01));
        ids.map(|id| r.check(id).unwrap().margin.unwrap())
    };
    let coarse = margins(64, 32);
    let fine = margins(128, 64);
    for (k, id) in ids.iter().enumerate() {
        let ratio = coarse[k] / fine[k];
        assert!((3.0..=5.0).contains(&ratio), "{id}: ratio {ratio}");
    }
}

#[test]
fn reports_are_deterministic() {
    let a = run_all(&wave(Some(-0.1), 32, 16, 0.01)).to_json();
    let b = run_all(&wave(Some(-0.1), 32, 16, 0.01)).to_json();
    assert_eq!(a, b);
}
