//! The fixed hodograph rectangle (-π, π) × (p0, 0) and fields stored on it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};

/// Physical and discretisation parameters. The period is fixed to 2π (k = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParameters {
    pub g: f64,
    pub p0: f64,
    pub nq: usize,
    pub np: usize,
}

impl WaveParameters {
    pub const PERIOD: f64 = 2.0 * PI;

    pub fn new(g: f64, p0: f64, nq: usize, np: usize) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(WaveError::InvalidParameter("g must be positive".into()));
        }
        if !(p0 < 0.0) || !p0.is_finite() {
            return Err(WaveError::InvalidParameter("p0 must be negative".into()));
        }
        if nq < 16 || nq % 2 != 0 {
            return Err(WaveError::InvalidParameter(
                "nq must be even and at least 16".into(),
            ));
        }
        if np < 8 {
            return Err(WaveError::InvalidParameter("np must be at least 8".into()));
        }
        Ok(Self { g, p0, nq, np })
    }

    pub fn grid(&self) -> HodographGrid {
        HodographGrid {
            nq: self.nq,
            np: self.np,
            p0: self.p0,
        }
    }
}

/// Nq periodic q-nodes starting at -π, Np + 1 p-nodes from p0 (index 0) to 0 (index Np).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HodographGrid {
    pub nq: usize,
    pub np: usize,
    pub p0: f64,
}

impl HodographGrid {
    pub fn dq(&self) -> f64 {
        2.0 * PI / self.nq as f64
    }

    pub fn dp(&self) -> f64 {
        -self.p0 / self.np as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        -PI + i as f64 * self.dq()
    }

    pub fn p(&self, j: usize) -> f64 {
        if j == self.np {
            0.0
        } else {
            self.p0 + j as f64 * self.dp()
        }
    }

    /// Index of the crest line q = 0.
    pub fn crest(&self) -> usize {
        self.nq / 2
    }

    /// Index of the trough line q = ±π.
    pub fn trough(&self) -> usize {
        0
    }

    /// Full-grid column of q = k Δq for k in 0..=Nq/2.
    pub fn half_to_full(&self, k: usize) -> usize {
        (self.nq / 2 + k) % self.nq
    }

    /// Column holding -q for the column holding q.
    pub fn mirror(&self, i: usize) -> usize {
        (self.nq - i) % self.nq
    }

    pub fn len(&self) -> usize {
        self.nq * (self.np + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nq + i
    }

    /// Fine-resolution copy with both node counts doubled.
    pub fn refined(&self) -> Self {
        Self {
            nq: 2 * self.nq,
            np: 2 * self.np,
            p0: self.p0,
        }
    }
}

/// Real values on every node of a [`HodographGrid`]; `values[j * nq + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: HodographGrid,
    pub values: Vec<f64>,
}

/// h(q, p), the height above the bed.
pub type HeightField = GridFunction;

impl GridFunction {
    pub fn zeros(grid: HodographGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: HodographGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..=grid.np {
            let p = grid.p(j);
            for i in 0..grid.nq {
                values.push(f(grid.q(i), p));
            }
        }
        Self { grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.grid.index(i, j);
        self.values[idx] = v;
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let start = j * self.grid.nq;
        &self.values[start..start + self.grid.nq]
    }

    /// max |f(q, p) - f(-q, p)|.
    pub fn asymmetry(&self) -> f64 {
        let g = self.grid;
        let mut worst = 0.0f64;
        for j in 0..=g.np {
            for i in 0..g.nq {
                worst = worst.max((self.at(i, j) - self.at(g.mirror(i), j)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Values of row `j` on the half period q = kΔq, k = 0..=Nq/2.
    pub fn half_row(&self, j: usize) -> Vec<f64> {
        (0..=self.grid.nq / 2)
            .map(|k| self.at(self.grid.half_to_full(k), j))
            .collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_layout() {
        let g = WaveParameters::new(9.81, -1.0, 16, 8).unwrap().grid();
        assert_eq!(g.q(0), -PI);
        assert_eq!(g.p(0), -1.0);
        assert_eq!(g.p(8), 0.0);
        assert!((g.q(g.crest())).abs() < 1e-15);
        assert_eq!(g.mirror(g.crest()), g.crest());
        assert_eq!(g.mirror(0), 0);
        assert_eq!(g.mirror(3), 13);
        assert_eq!(g.half_to_full(8), 0);
        assert!((g.q(g.half_to_full(3)) - 3.0 * g.dq()).abs() < 1e-14);
    }

    #[test]
    fn parameter_validation() {
        assert!(WaveParameters::new(-1.0, -1.0, 16, 8).is_err());
        assert!(WaveParameters::new(9.81, 0.5, 16, 8).is_err());
        assert!(WaveParameters::new(9.81, -1.0, 15, 8).is_err());
        assert!(WaveParameters::new(9.81, -1.0, 8, 8).is_err());
        assert!(WaveParameters::new(9.81, -1.0, 16, 4).is_err());
    }

    #[test]
    fn even_function_has_no_asymmetry() {
        let g = WaveParameters::new(9.81, -1.0, 32, 8).unwrap().grid();
        let f = GridFunction::from_fn(g, |q, p| q.cos() * (1.0 + p));
        assert!(f.asymmetry() < 1e-15);
        let odd = GridFunction::from_fn(g, |q, _| q.sin());
        assert!(odd.asymmetry() > 1.0);
    }
}
