//! Derivative estimates independent of the solver stencils: spectral in q,
//! fourth-order differences in p. Residuals of the differential identities
//! evaluated with these measure the discretisation error of the computed wave
//! instead of reproducing the discrete equations.

use crate::grid::GridFunction;
use crate::interp::spectral_q;

const D1_EDGE: [[f64; 5]; 2] = [
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
];
const D1_CENTRAL: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D2_EDGE: [[f64; 6]; 2] = [
    [45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
    [10.0, -15.0, -4.0, 14.0, -6.0, 1.0],
];
const D2_CENTRAL: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

fn p_derivative(f: &GridFunction, second: bool) -> GridFunction {
    let g = f.grid;
    let np = g.np;
    let dp = g.dp();
    let scale = if second { 1.0 / (12.0 * dp * dp) } else { 1.0 / (12.0 * dp) };
    // mirrored stencils at the top change sign for odd derivatives
    let top_sign = if second { 1.0 } else { -1.0 };
    let mut out = GridFunction::zeros(g);
    for i in 0..g.nq {
        let col = |j: usize| f.at(i, j);
        for j in 0..=np {
            let v = if j >= 2 && j + 2 <= np {
                let w = if second { &D2_CENTRAL } else { &D1_CENTRAL };
                (0..5).map(|m| w[m] * col(j + m - 2)).sum::<f64>()
            } else if j < 2 {
                if second {
                    (0..6).map(|m| D2_EDGE[j][m] * col(m)).sum::<f64>()
                } else {
                    (0..5).map(|m| D1_EDGE[j][m] * col(m)).sum::<f64>()
                }
            } else {
                let e = np - j;
                let s = if second {
                    (0..6).map(|m| D2_EDGE[e][m] * col(np - m)).sum::<f64>()
                } else {
                    (0..5).map(|m| D1_EDGE[e][m] * col(np - m)).sum::<f64>()
                };
                top_sign * s
            };
            out.set(i, j, v * scale);
        }
    }
    out
}

pub fn dp4(f: &GridFunction) -> GridFunction {
    p_derivative(f, false)
}

pub fn dpp4(f: &GridFunction) -> GridFunction {
    p_derivative(f, true)
}

pub fn dq(f: &GridFunction) -> GridFunction {
    spectral_q(f, 1)
}

pub fn dqq(f: &GridFunction) -> GridFunction {
    spectral_q(f, 2)
}

/// Derivatives of a field w needed by a second-order operator.
pub struct Jet2 {
    pub w: GridFunction,
    pub w_q: GridFunction,
    pub w_p: GridFunction,
    pub w_qq: GridFunction,
    pub w_pp: GridFunction,
    pub w_qp: GridFunction,
}

impl Jet2 {
    pub fn of(w: GridFunction) -> Self {
        let w_p = dp4(&w);
        Self {
            w_q: dq(&w),
            w_qq: dqq(&w),
            w_pp: dpp4(&w),
            w_qp: dq(&w_p),
            w_p,
            w,
        }
    }
}
