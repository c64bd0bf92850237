//! Smooth interpolation of h between grid nodes and spectral q-derivatives.
//!
//! Each p-row of h and of the difference quotient h_p is expanded in its
//! trigonometric interpolant in q; rows are joined by cubic Hermite
//! interpolation in p using h_p as the nodal slope. The interpolant
//! reproduces the nodal h and h_p, and its period integrals of h_p equal the
//! trapezoid sums on grid rows.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::diff::diff_p;
use crate::grid::{GridFunction, HodographGrid};

/// Complex Fourier coefficients c_n, n = 0..N-1, of f(q_i) = Σ c_n e^{i n q_i}
/// with q_i = -π + iΔq.
fn fourier_coefficients(row: &[f64]) -> Vec<Complex<f64>> {
    let n = row.len();
    let mut buf: Vec<Complex<f64>> = row.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter()
        .enumerate()
        .map(|(k, c)| {
            // shift from the DFT origin at q = 0 to the grid origin at q = -π
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c * (sign / n as f64)
        })
        .collect()
}

/// m-th derivative of the trigonometric interpolant of a periodic row, on the nodes.
/// The Nyquist mode is dropped for odd m.
pub fn spectral_derivative(row: &[f64], m: u32) -> Vec<f64> {
    let n = row.len();
    let coef = fourier_coefficients(row);
    let mut buf: Vec<Complex<f64>> = coef
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let wave = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            if m % 2 == 1 && 2 * k == n {
                return Complex::new(0.0, 0.0);
            }
            let factor = Complex::new(0.0, wave).powu(m);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c * factor * sign
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re).collect()
}

/// Applies [`spectral_derivative`] to every row.
pub fn spectral_q(f: &GridFunction, m: u32) -> GridFunction {
    let mut out = GridFunction::zeros(f.grid);
    let nq = f.grid.nq;
    for j in 0..=f.grid.np {
        let d = spectral_derivative(f.row(j), m);
        out.values[j * nq..(j + 1) * nq].copy_from_slice(&d);
    }
    out
}

/// Cosine coefficients a_n, n = 0..=N/2, with f(q) = Σ a_n cos(nq) for an even row.
fn cosine_coefficients(row: &[f64]) -> Vec<f64> {
    let n = row.len();
    let coef = fourier_coefficients(row);
    (0..=n / 2)
        .map(|k| {
            if k == 0 || 2 * k == n {
                coef[k].re
            } else {
                2.0 * coef[k].re
            }
        })
        .collect()
}

/// Values and first derivatives of the interpolant at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalJet {
    pub h: f64,
    pub h_q: f64,
    pub h_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothField {
    grid: HodographGrid,
    h: Vec<Vec<f64>>,
    hp: Vec<Vec<f64>>,
    /// Difference-quotient h_p on the nodes.
    hp_nodes: GridFunction,
}

fn series(coef: &[f64], cos: &[f64], sin: &[f64]) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for (n, a) in coef.iter().enumerate() {
        v += a * cos[n];
        d -= n as f64 * a * sin[n];
    }
    (v, d)
}

impl SmoothField {
    /// Builds the interpolant of an even field.
    pub fn new(h: &GridFunction) -> Self {
        let hp_nodes = diff_p(h);
        let grid = h.grid;
        let rows = |f: &GridFunction| (0..=grid.np).map(|j| cosine_coefficients(f.row(j))).collect();
        Self {
            grid,
            h: rows(h),
            hp: rows(&hp_nodes),
            hp_nodes,
        }
    }

    pub fn grid(&self) -> HodographGrid {
        self.grid
    }

    /// Mean over one period of h_p on row j (the trapezoid sum divided by 2π).
    pub fn row_mean_hp(&self, j: usize) -> f64 {
        self.hp[j][0]
    }

    pub fn nodal_hp(&self) -> &GridFunction {
        &self.hp_nodes
    }

    /// Period mean of the interpolated h_p at level p.
    pub fn mean_hp(&self, p: f64) -> f64 {
        let (j, t) = self.cell(p);
        let t2 = t * t;
        let dh = (self.h[j + 1][0] - self.h[j][0]) * (6.0 * t - 6.0 * t2) / self.grid.dp();
        dh + self.hp[j][0] * (3.0 * t2 - 4.0 * t + 1.0) + self.hp[j + 1][0] * (3.0 * t2 - 2.0 * t)
    }

    /// Cell index and local coordinate t ∈ [0, 1] (outside for p beyond [p0, 0]).
    fn cell(&self, p: f64) -> (usize, f64) {
        let g = self.grid;
        let s = (p - g.p0) / g.dp();
        let j = (s.floor().max(0.0) as usize).min(g.np - 1);
        (j, s - j as f64)
    }

    /// Interpolated h, h_q, h_p. Points slightly outside [p0, 0] use the end cell's cubic.
    pub fn eval(&self, q: f64, p: f64) -> LocalJet {
        let k = self.grid.nq / 2;
        let mut cos = vec![0.0; k + 1];
        let mut sin = vec![0.0; k + 1];
        let (c1, s1) = (q.cos(), q.sin());
        cos[0] = 1.0;
        for n in 1..=k {
            // angle addition keeps the recurrence accurate to a few ulps
            cos[n] = cos[n - 1] * c1 - sin[n - 1] * s1;
            sin[n] = sin[n - 1] * c1 + cos[n - 1] * s1;
        }
        let (j, t) = self.cell(p);
        let dp = self.grid.dp();
        let (h0, h0q) = series(&self.h[j], &cos, &sin);
        let (d0, d0q) = series(&self.hp[j], &cos, &sin);
        let (h1, h1q) = series(&self.h[j + 1], &cos, &sin);
        let (d1, d1q) = series(&self.hp[j + 1], &cos, &sin);
        let (t2, t3) = (t * t, t * t * t);
        let b00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let b10 = t3 - 2.0 * t2 + t;
        let b01 = -2.0 * t3 + 3.0 * t2;
        let b11 = t3 - t2;
        let e00 = 6.0 * t2 - 6.0 * t;
        let e10 = 3.0 * t2 - 4.0 * t + 1.0;
        let e01 = -6.0 * t2 + 6.0 * t;
        let e11 = 3.0 * t2 - 2.0 * t;
        LocalJet {
            h: h0 * b00 + dp * d0 * b10 + h1 * b01 + dp * d1 * b11,
            h_q: h0q * b00 + dp * d0q * b10 + h1q * b01 + dp * d1q * b11,
            h_p: (h0 * e00 + h1 * e01) / dp + d0 * e10 + d1 * e11,
        }
    }

    /// Solves h(q, p) = target for p by safeguarded Newton on the bracket
    /// [lo, hi], which must satisfy h(q, lo) ≤ target ≤ h(q, hi).
    pub fn solve_p(&self, q: f64, target: f64, lo: f64, hi: f64, guess: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        let mut p = guess.clamp(lo, hi);
        for _ in 0..100 {
            let jet = self.eval(q, p);
            let f = jet.h - target;
            if f == 0.0 {
                return p;
            }
            if f < 0.0 {
                lo = p;
            } else {
                hi = p;
            }
            let newton = p - f / jet.h_p;
            let next = if jet.h_p > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - p).abs() < 1e-15 || hi - lo < 1e-15 {
                return next;
            }
            p = next;
        }
        p
    }
}

/// q reduced to [-π, π).
pub fn wrap_q(q: f64) -> f64 {
    let r = (q + PI).rem_euclid(2.0 * PI) - PI;
    if r >= PI {
        -PI
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WaveParameters;

    fn grid() -> HodographGrid {
        WaveParameters::new(9.81, -1.0, 32, 16).unwrap().grid()
    }

    #[test]
    fn spectral_derivative_is_exact_for_trig_polynomials() {
        let g = grid();
        let f = GridFunction::from_fn(g, |q, p| (1.0 + p) * (0.5 + (2.0 * q).cos() + 0.25 * (5.0 * q).sin()));
        let d1 = spectral_q(&f, 1);
        let d2 = spectral_q(&f, 2);
        for j in 0..=g.np {
            for i in 0..g.nq {
                let (q, p) = (g.q(i), g.p(j));
                let e1 = (1.0 + p) * (-2.0 * (2.0 * q).sin() + 1.25 * (5.0 * q).cos());
                let e2 = (1.0 + p) * (-4.0 * (2.0 * q).cos() - 6.25 * (5.0 * q).sin());
                assert!((d1.at(i, j) - e1).abs() < 1e-12);
                assert!((d2.at(i, j) - e2).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn interpolant_reproduces_nodes() {
        let g = grid();
        let h = GridFunction::from_fn(g, |q, p| (p + 1.0) * (1.0 + 0.1 * q.cos()) + 0.05 * (p + 1.0).powi(3) * (2.0 * q).cos());
        let s = SmoothField::new(&h);
        let hp = diff_p(&h);
        for j in [0, 3, 16] {
            for i in [0, 5, 16, 31] {
                let jet = s.eval(g.q(i), g.p(j));
                assert!((jet.h - h.at(i, j)).abs() < 1e-13);
                assert!((jet.h_p - hp.at(i, j)).abs() < 1e-12);
            }
        }
        // the period mean of h_p is the trapezoid mean
        let mean: f64 = hp.row(7).iter().sum::<f64>() / g.nq as f64;
        assert!((s.row_mean_hp(7) - mean).abs() < 1e-14);
    }

    #[test]
    fn interpolant_between_nodes_is_accurate() {
        let g = WaveParameters::new(9.81, -1.0, 64, 64).unwrap().grid();
        let exact = |q: f64, p: f64| (p + 1.0) + 0.1 * ((p + 1.0) * 1.3).sinh() * q.cos();
        let s = SmoothField::new(&GridFunction::from_fn(g, exact));
        let jet = s.eval(0.37, -0.4321);
        assert!((jet.h - exact(0.37, -0.4321)).abs() < 1e-6);
        let hq = -0.1 * ((-0.4321f64 + 1.0) * 1.3).sinh() * 0.37f64.sin();
        assert!((jet.h_q - hq).abs() < 1e-6);
    }

    #[test]
    fn inverse_in_p() {
        let g = grid();
        let h = GridFunction::from_fn(g, |q, p| (p + 1.0) * (1.0 + 0.1 * q.cos()));
        let s = SmoothField::new(&h);
        let q = 0.8;
        let target = s.eval(q, -0.3).h;
        let p = s.solve_p(q, target, -1.0, 0.0, -0.9);
        assert!((p + 0.3).abs() < 1e-12);
    }

    #[test]
    fn wrapping() {
        assert!((wrap_q(PI) + PI).abs() < 1e-15);
        assert!((wrap_q(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
        assert_eq!(wrap_q(0.25), 0.25);
    }
}
