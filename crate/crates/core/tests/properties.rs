use std::f64::consts::PI;

use hodowave::diff::*;
use hodowave::interp::spectral_q;
use hodowave::*;
use proptest::prelude::*;

fn grid(nq: usize, np: usize) -> HodographGrid {
    WaveParameters::new(9.81, -1.0, nq, np).unwrap().grid()
}

fn even_field(g: HodographGrid, a: f64, b: f64, k: f64) -> GridFunction {
    GridFunction::from_fn(g, |q, p| (p + 1.0) * (1.0 + a * q.cos()) + b * (k * (p + 1.0)).sinh() * (2.0 * q).cos())
}

proptest! {
    #[test]
    fn q_derivative_of_even_field_is_odd(a in -0.5f64..0.5, b in -0.2f64..0.2, k in 0.1f64..2.0) {
        let g = grid(32, 8);
        let f = even_field(g, a, b, k);
        prop_assert!(f.asymmetry() < 1e-12);
        for d in [diff_q(&f), spectral_q(&f, 1)] {
            for j in 0..=g.np {
                for i in 0..g.nq {
                    prop_assert!((d.at(i, j) + d.at(g.mirror(i), j)).abs() < 1e-10);
                }
            }
        }
        prop_assert!(diff_qq(&f).asymmetry() < 1e-9);
        prop_assert!(diff_p(&f).asymmetry() < 1e-10);
    }

    #[test]
    fn half_period_quadrature_matches_full_period_for_even_rows(a in -1.0f64..1.0, m in 0usize..6) {
        let g = grid(48, 8);
        let f = GridFunction::from_fn(g, |q, _| 1.0 + a * (m as f64 * q).cos());
        let full = integrate_q(f.row(0));
        let half = integrate_half(&f.half_row(0));
        prop_assert!((full - 2.0 * half).abs() < 1e-12);
        let mean = if m == 0 { 1.0 + a } else { 1.0 };
        prop_assert!((full - 2.0 * PI * mean).abs() < 1e-12);
    }

    #[test]
    fn laminar_solution_satisfies_discrete_equations(g0 in -0.4f64..0.0, lambda in 0.4f64..0.8) {
        let gamma = VorticitySpec::constant(g0, -1.0).unwrap();
        let profile = laminar::solve_laminar(&gamma, -1.0, lambda, 9.81, 16).unwrap();
        let params = WaveParameters::new(9.81, -1.0, 16, 16).unwrap();
        let s = solver::WaveSolution::laminar(&profile, &gamma, params).unwrap();
        prop_assert!(s.residual < 1e-12);
        prop_assert!(s.is_trivial());
        prop_assert!((derive_frame(&s).speed - 1.0 / lambda).abs() < 1e-12);
    }

    #[test]
    fn vorticity_sign_summaries_are_consistent(c0 in -1.0f64..1.0, c1 in -1.0f64..1.0) {
        let v = VorticitySpec::new(vec![c0, c1], -1.0).unwrap();
        let vals: Vec<f64> = (0..=20).map(|i| v.eval(i as f64 / 20.0).unwrap()).collect();
        if v.is_nonpositive_on_range() {
            prop_assert!(vals.iter().all(|&x| x <= 1e-12));
        }
        if v.is_negative_on_range() {
            prop_assert!(vals.iter().all(|&x| x < 0.0));
        }
        let ds = v.derivative_sign_on_range();
        prop_assert!((ds.min - c1).abs() < 1e-12 && (ds.max - c1).abs() < 1e-12);
    }
}
