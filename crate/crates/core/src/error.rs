use thiserror::Error;

/// Errors raised by the solver, the kinematic queries and the input validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vorticity argument s = {s} outside [0, {s_max}]")]
    VorticityDomain { s: f64, s_max: f64 },

    #[error("laminar stagnation at p = {p}")]
    LaminarStagnation { p: f64 },

    #[error("no bifurcation in bracket [{lo}, {hi}]")]
    NoBifurcation { lo: f64, hi: f64 },

    #[error("stagnation in iterate: h_p = {h_p} at (q, p) = ({q}, {p})")]
    StagnationInIterate { q: f64, p: f64, h_p: f64 },

    #[error("height field is not even in q (max asymmetry {asymmetry})")]
    NotEven { asymmetry: f64 },

    #[error("bottom condition h(q, p0) = 0 violated (max |h| = {max_abs})")]
    BottomCondition { max_abs: f64 },

    #[error("newton diverged after {iterations} iterations, last residual {residual}")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("branch start failed: {0}")]
    BranchStartFailed(String),

    #[error("point (x, y) = ({x}, {y}) outside fluid domain")]
    OutsideFluid { x: f64, y: f64 },

    #[error("stagnation query: interpolated h_p = {h_p} at (q, p) = ({q}, {p})")]
    StagnationQuery { q: f64, p: f64, h_p: f64 },

    #[error("stagnation at surface: C - 2 g eta = {value} at x = {x}")]
    SurfaceStagnation { x: f64, value: f64 },
}

impl WaveError {
    /// True for the failures that make the continuation driver shrink its step.
    pub fn is_step_failure(&self) -> bool {
        matches!(
            self,
            WaveError::NewtonDiverged { .. }
                | WaveError::StagnationInIterate { .. }
                | WaveError::LinearSolve(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, WaveError>;
