//! Second-order finite differences on the hodograph grid and periodic quadrature.
//!
//! q-derivatives are periodic central differences. p-derivatives are central in
//! the interior and second-order one-sided on the rows p = p0 and p = 0.

use crate::grid::GridFunction;

pub fn diff_q(f: &GridFunction) -> GridFunction {
    let g = f.grid;
    let n = g.nq;
    let scale = 0.5 / g.dq();
    let mut out = GridFunction::zeros(g);
    for j in 0..=g.np {
        let row = f.row(j);
        for i in 0..n {
            let v = (row[(i + 1) % n] - row[(i + n - 1) % n]) * scale;
            out.set(i, j, v);
        }
    }
    out
}

pub fn diff_qq(f: &GridFunction) -> GridFunction {
    let g = f.grid;
    let n = g.nq;
    let scale = 1.0 / (g.dq() * g.dq());
    let mut out = GridFunction::zeros(g);
    for j in 0..=g.np {
        let row = f.row(j);
        for i in 0..n {
            let v = (row[(i + 1) % n] - 2.0 * row[i] + row[(i + n - 1) % n]) * scale;
            out.set(i, j, v);
        }
    }
    out
}

pub fn diff_p(f: &GridFunction) -> GridFunction {
    let g = f.grid;
    let np = g.np;
    let scale = 0.5 / g.dp();
    let mut out = GridFunction::zeros(g);
    for i in 0..g.nq {
        let col = |j: usize| f.at(i, j);
        out.set(i, 0, (-3.0 * col(0) + 4.0 * col(1) - col(2)) * scale);
        for j in 1..np {
            out.set(i, j, (col(j + 1) - col(j - 1)) * scale);
        }
        out.set(i, np, (3.0 * col(np) - 4.0 * col(np - 1) + col(np - 2)) * scale);
    }
    out
}

pub fn diff_pp(f: &GridFunction) -> GridFunction {
    let g = f.grid;
    let np = g.np;
    let scale = 1.0 / (g.dp() * g.dp());
    let mut out = GridFunction::zeros(g);
    for i in 0..g.nq {
        let col = |j: usize| f.at(i, j);
        out.set(
            i,
            0,
            (2.0 * col(0) - 5.0 * col(1) + 4.0 * col(2) - col(3)) * scale,
        );
        for j in 1..np {
            out.set(i, j, (col(j + 1) - 2.0 * col(j) + col(j - 1)) * scale);
        }
        out.set(
            i,
            np,
            (2.0 * col(np) - 5.0 * col(np - 1) + 4.0 * col(np - 2) - col(np - 3)) * scale,
        );
    }
    out
}

/// Mixed derivative as the q-difference of the p-difference.
pub fn diff_qp(f: &GridFunction) -> GridFunction {
    diff_q(&diff_p(f))
}

/// Trapezoid rule over one full period; exact for trigonometric polynomials of degree < Nq.
pub fn integrate_q(row: &[f64]) -> f64 {
    let dq = 2.0 * std::f64::consts::PI / row.len() as f64;
    row.iter().sum::<f64>() * dq
}

/// Trapezoid rule over [0, π] for values sampled at q = kΔq, k = 0..=Nq/2.
pub fn integrate_half(values: &[f64]) -> f64 {
    let k_max = values.len() - 1;
    let dq = std::f64::consts::PI / k_max as f64;
    let interior: f64 = values[1..k_max].iter().sum();
    (interior + 0.5 * (values[0] + values[k_max])) * dq
}
