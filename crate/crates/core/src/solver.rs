//! Newton solver for the hodograph problem
//!
//! ```text
//! (1 + h_q²) h_pp - 2 h_p h_q h_pq + h_p² h_qq + γ(-p) h_p³ = 0   in p0 < p < 0
//! 1 + h_q² + (2gh - Q) h_p² = 0                                   on p = 0
//! h = 0                                                           on p = p0
//! ```
//!
//! with h even and 2π-periodic in q, plus amplitude continuation of the
//! branch bifurcating from a laminar flow.
//!
//! The unknowns are the nodal values on the half period q ∈ [0, π] for
//! p-rows 1..=Np, together with Q. Neighbours across q = 0 and q = π are
//! obtained by even reflection. The extra equation pins the crest-to-trough
//! height h(0, 0) - h(π, 0) = 2a.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::grid::{GridFunction, HeightField, HodographGrid, WaveParameters};
use crate::laminar::{linear_seed, Bifurcation, LaminarProfile};
use crate::vorticity::VorticitySpec;

/// Residual bound used by [`validate_solution`].
pub const VALIDATION_RESIDUAL: f64 = 1e-8;

/// Allowed asymmetry |h(q) - h(-q)| of an input field.
const EVENNESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 12,
        }
    }
}

/// A converged (or laminar) wave in hodograph variables.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSolution {
    pub params: WaveParameters,
    pub gamma: VorticitySpec,
    pub h: HeightField,
    /// Bernoulli constant of the hodograph surface condition.
    pub bernoulli_q: f64,
    /// Max |residual| over interior and surface nodes at return.
    pub residual: f64,
    /// Newton iterations spent (0 for a seed that already satisfied the tolerance).
    pub iterations: usize,
}

impl WaveSolution {
    /// The laminar flow as an exact solution of the discrete equations on the
    /// grid of `params`, keeping the one-sided bed slope equal to λ.
    pub fn laminar(profile: &LaminarProfile, gamma: &VorticitySpec, params: WaveParameters) -> Result<Self> {
        let grid = params.grid();
        let (column, q) = discrete_laminar(profile, gamma, grid)?;
        let mut h = GridFunction::zeros(grid);
        for (j, v) in column.iter().enumerate() {
            for i in 0..grid.nq {
                h.set(i, j, *v);
            }
        }
        let res = residual(&h, q, gamma, &params)?;
        Ok(Self {
            params,
            gamma: gamma.clone(),
            h,
            bernoulli_q: q,
            residual: res.max_abs(),
            iterations: 0,
        })
    }

    pub fn grid(&self) -> HodographGrid {
        self.h.grid
    }

    /// Half the crest-to-trough height, (h(0, 0) - h(π, 0)) / 2.
    pub fn amplitude(&self) -> f64 {
        let g = self.grid();
        0.5 * (self.h.at(g.crest(), g.np) - self.h.at(g.trough(), g.np))
    }

    pub fn is_trivial(&self) -> bool {
        self.amplitude().abs() < 1e-12
    }
}

/// Discrete derivatives of h at one node.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct NodeDerivs {
    pub h: f64,
    pub hq: f64,
    pub hp: f64,
    pub hqq: f64,
    pub hpp: f64,
    pub hqp: f64,
}

pub(crate) fn interior_residual(d: &NodeDerivs, gamma: f64) -> f64 {
    (1.0 + d.hq * d.hq) * d.hpp - 2.0 * d.hp * d.hq * d.hqp
        + d.hp * d.hp * d.hqq
        + gamma * d.hp * d.hp * d.hp
}

pub(crate) fn surface_residual(d: &NodeDerivs, g: f64, q: f64) -> f64 {
    1.0 + d.hq * d.hq + (2.0 * g * d.h - q) * d.hp * d.hp
}

type Stencil = Vec<(isize, isize, f64)>;

/// Finite-difference stencils shared by the residual and its Jacobian.
struct Stencils {
    q1: Stencil,
    qq: Stencil,
    p1: Stencil,
    p1_top: Stencil,
    pp: Stencil,
    qp: Stencil,
}

impl Stencils {
    fn new(grid: &HodographGrid) -> Self {
        let (dq, dp) = (grid.dq(), grid.dp());
        let w = 1.0 / (4.0 * dq * dp);
        Self {
            q1: vec![(1, 0, 0.5 / dq), (-1, 0, -0.5 / dq)],
            qq: vec![
                (1, 0, 1.0 / (dq * dq)),
                (0, 0, -2.0 / (dq * dq)),
                (-1, 0, 1.0 / (dq * dq)),
            ],
            p1: vec![(0, 1, 0.5 / dp), (0, -1, -0.5 / dp)],
            p1_top: vec![(0, 0, 1.5 / dp), (0, -1, -2.0 / dp), (0, -2, 0.5 / dp)],
            pp: vec![
                (0, 1, 1.0 / (dp * dp)),
                (0, 0, -2.0 / (dp * dp)),
                (0, -1, 1.0 / (dp * dp)),
            ],
            qp: vec![(1, 1, w), (1, -1, -w), (-1, 1, -w), (-1, -1, w)],
        }
    }
}

/// The reduced half-period system.
struct HalfSystem<'a> {
    grid: HodographGrid,
    gamma: &'a VorticitySpec,
    g: f64,
    stencils: Stencils,
    /// Number of half-period columns, Nq/2 + 1.
    nk: usize,
}

impl<'a> HalfSystem<'a> {
    fn new(grid: HodographGrid, gamma: &'a VorticitySpec, g: f64) -> Self {
        Self {
            grid,
            gamma,
            g,
            stencils: Stencils::new(&grid),
            nk: grid.nq / 2 + 1,
        }
    }

    fn n_nodes(&self) -> usize {
        self.nk * self.grid.np
    }

    fn n_unknowns(&self) -> usize {
        self.n_nodes() + 1
    }

    fn q_index(&self) -> usize {
        self.n_nodes()
    }

    fn reflect(&self, k: isize) -> usize {
        let kmax = (self.nk - 1) as isize;
        let r = if k < 0 {
            -k
        } else if k > kmax {
            2 * kmax - k
        } else {
            k
        };
        r as usize
    }

    /// Unknown index of (k, j), or None on the bottom row.
    fn unknown(&self, k: isize, j: isize) -> Option<usize> {
        if j <= 0 {
            None
        } else {
            Some((j as usize - 1) * self.nk + self.reflect(k))
        }
    }

    fn value(&self, u: &[f64], k: isize, j: isize) -> f64 {
        self.unknown(k, j).map_or(0.0, |idx| u[idx])
    }

    fn apply(&self, u: &[f64], st: &Stencil, k: usize, j: usize) -> f64 {
        st.iter()
            .map(|&(dk, dj, w)| w * self.value(u, k as isize + dk, j as isize + dj))
            .sum()
    }

    fn derivs(&self, u: &[f64], k: usize, j: usize) -> NodeDerivs {
        let s = &self.stencils;
        let top = j == self.grid.np;
        NodeDerivs {
            h: self.value(u, k as isize, j as isize),
            hq: self.apply(u, &s.q1, k, j),
            hp: self.apply(u, if top { &s.p1_top } else { &s.p1 }, k, j),
            hqq: self.apply(u, &s.qq, k, j),
            hpp: if top { 0.0 } else { self.apply(u, &s.pp, k, j) },
            hqp: if top { 0.0 } else { self.apply(u, &s.qp, k, j) },
        }
    }

    fn from_field(&self, h: &HeightField) -> Vec<f64> {
        let mut u = vec![0.0; self.n_nodes()];
        for j in 1..=self.grid.np {
            for k in 0..self.nk {
                u[(j - 1) * self.nk + k] = h.at(self.grid.half_to_full(k), j);
            }
        }
        u
    }

    fn to_field(&self, u: &[f64]) -> HeightField {
        let g = self.grid;
        let mut h = GridFunction::zeros(g);
        for j in 1..=g.np {
            for i in 0..g.nq {
                // q_i = -π + iΔq; |q_i| = kΔq
                let k = (i as isize - (g.nq / 2) as isize).unsigned_abs();
                h.set(i, j, u[(j - 1) * self.nk + k]);
            }
        }
        h
    }

    /// Rejects iterates with a non-positive one-sided or central h_p anywhere.
    fn check_stagnation(&self, u: &[f64]) -> Result<()> {
        let s = &self.stencils;
        let bottom: Stencil = vec![(0, 0, -1.5 / self.grid.dp()), (0, 1, 2.0 / self.grid.dp()), (0, 2, -0.5 / self.grid.dp())];
        for j in 0..=self.grid.np {
            for k in 0..self.nk {
                let hp = if j == 0 {
                    self.apply(u, &bottom, k, j)
                } else if j == self.grid.np {
                    self.apply(u, &s.p1_top, k, j)
                } else {
                    self.apply(u, &s.p1, k, j)
                };
                if !(hp > 0.0) {
                    return Err(WaveError::StagnationInIterate {
                        q: k as f64 * self.grid.dq(),
                        p: self.grid.p(j),
                        h_p: hp,
                    });
                }
            }
        }
        Ok(())
    }

    /// Node residuals (row-major over j = 1..=Np, k = 0..Nq/2) followed by the amplitude row.
    fn residual(&self, u: &[f64], q: f64, amplitude: f64) -> Result<Vec<f64>> {
        self.check_stagnation(u)?;
        let np = self.grid.np;
        let mut r = Vec::with_capacity(self.n_unknowns());
        for j in 1..=np {
            let gam = self.gamma.at_p(self.grid.p(j));
            for k in 0..self.nk {
                let d = self.derivs(u, k, j);
                r.push(if j == np {
                    surface_residual(&d, self.g, q)
                } else {
                    interior_residual(&d, gam)
                });
            }
        }
        let top = (np - 1) * self.nk;
        r.push(u[top] - u[top + self.nk - 1] - 2.0 * amplitude);
        Ok(r)
    }

    fn push_stencil(
        &self,
        triplets: &mut Vec<(usize, usize, f64)>,
        row: usize,
        st: &Stencil,
        k: usize,
        j: usize,
        factor: f64,
    ) {
        for &(dk, dj, w) in st {
            if let Some(col) = self.unknown(k as isize + dk, j as isize + dj) {
                triplets.push((row, col, factor * w));
            }
        }
    }

    /// Analytic Jacobian of [`HalfSystem::residual`] with respect to (u, Q).
    fn jacobian(&self, u: &[f64], q: f64) -> Vec<(usize, usize, f64)> {
        let np = self.grid.np;
        let s = &self.stencils;
        let mut t = Vec::with_capacity(self.n_unknowns() * 14);
        for j in 1..=np {
            let gam = self.gamma.at_p(self.grid.p(j));
            for k in 0..self.nk {
                let row = (j - 1) * self.nk + k;
                let d = self.derivs(u, k, j);
                if j == np {
                    // 1 + h_q² + (2gh - Q) h_p²
                    let own = self.unknown(k as isize, j as isize).unwrap();
                    t.push((row, own, 2.0 * self.g * d.hp * d.hp));
                    self.push_stencil(&mut t, row, &s.q1, k, j, 2.0 * d.hq);
                    let dhp = 2.0 * (2.0 * self.g * d.h - q) * d.hp;
                    self.push_stencil(&mut t, row, &s.p1_top, k, j, dhp);
                    t.push((row, self.q_index(), -d.hp * d.hp));
                } else {
                    let d_hq = 2.0 * d.hq * d.hpp - 2.0 * d.hp * d.hqp;
                    let d_hp = -2.0 * d.hq * d.hqp + 2.0 * d.hp * d.hqq + 3.0 * gam * d.hp * d.hp;
                    let d_hpp = 1.0 + d.hq * d.hq;
                    let d_hqp = -2.0 * d.hp * d.hq;
                    let d_hqq = d.hp * d.hp;
                    self.push_stencil(&mut t, row, &s.q1, k, j, d_hq);
                    self.push_stencil(&mut t, row, &s.p1, k, j, d_hp);
                    self.push_stencil(&mut t, row, &s.pp, k, j, d_hpp);
                    self.push_stencil(&mut t, row, &s.qp, k, j, d_hqp);
                    self.push_stencil(&mut t, row, &s.qq, k, j, d_hqq);
                }
            }
        }
        let amp_row = self.n_nodes();
        let top = (np - 1) * self.nk;
        t.push((amp_row, top, 1.0));
        t.push((amp_row, top + self.nk - 1, -1.0));
        t
    }
}

fn merge_triplets(mut t: Vec<(usize, usize, f64)>) -> Vec<Triplet<usize, usize, f64>> {
    t.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
    let mut out: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(t.len());
    for (r, c, v) in t {
        match out.last_mut() {
            Some(last) if last.row == r && last.col == c => last.val += v,
            _ => out.push(Triplet::new(r, c, v)),
        }
    }
    out
}

/// Sparse LU solve of J x = b.
fn sparse_solve(n: usize, triplets: Vec<(usize, usize, f64)>, b: &[f64]) -> Result<Vec<f64>> {
    let entries = merge_triplets(triplets);
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries)
        .map_err(|e| WaveError::LinearSolve(format!("{e:?}")))?;
    let lu = mat
        .sp_lu()
        .map_err(|e| WaveError::LinearSolve(format!("{e:?}")))?;
    let mut rhs = Mat::<f64>::zeros(n, 1);
    for (i, v) in b.iter().enumerate() {
        rhs[(i, 0)] = *v;
    }
    let x = lu.solve(&rhs);
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(WaveError::LinearSolve("singular Jacobian".into()));
    }
    Ok(out)
}

/// Solves the q-independent difference equations H_pp + γ H_p³ = 0 with
/// H_0 = 0 and one-sided bed slope λ, starting from the shooting profile.
/// Returns H at the p-nodes and the matching Q.
fn discrete_laminar(
    profile: &LaminarProfile,
    gamma: &VorticitySpec,
    grid: HodographGrid,
) -> Result<(Vec<f64>, f64)> {
    let np = grid.np;
    if profile.np() != np {
        return Err(WaveError::InvalidParameter(
            "laminar profile and grid have different p-nodes".into(),
        ));
    }
    let dp = grid.dp();
    let mut hh = profile.height.clone();
    hh[0] = 0.0;
    let eval = |hh: &[f64]| -> (Vec<f64>, Vec<(usize, usize, f64)>) {
        // unknown index j - 1 for node j
        let mut r = Vec::with_capacity(np);
        let mut t = Vec::new();
        r.push((4.0 * hh[1] - hh[2]) / (2.0 * dp) - profile.lambda);
        t.push((0, 0, 2.0 / dp));
        t.push((0, 1, -0.5 / dp));
        for j in 1..np {
            let gam = gamma.at_p(grid.p(j));
            let hp = (hh[j + 1] - hh[j - 1]) / (2.0 * dp);
            r.push((hh[j + 1] - 2.0 * hh[j] + hh[j - 1]) / (dp * dp) + gam * hp.powi(3));
            let dhp = 3.0 * gam * hp * hp / (2.0 * dp);
            t.push((j, j, 1.0 / (dp * dp) + dhp));
            t.push((j, j - 1, -2.0 / (dp * dp)));
            if j > 1 {
                t.push((j, j - 2, 1.0 / (dp * dp) - dhp));
            }
        }
        (r, t)
    };
    for _ in 0..20 {
        let (r, t) = eval(&hh);
        if max_abs(&r) < 1e-13 * (1.0 + profile.lambda) {
            break;
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = sparse_solve(np, t, &rhs)?;
        for (j, s) in step.iter().enumerate() {
            hh[j + 1] += s;
        }
    }
    let hp_top = (3.0 * hh[np] - 4.0 * hh[np - 1] + hh[np - 2]) / (2.0 * dp);
    if !(hp_top > 0.0) {
        return Err(WaveError::LaminarStagnation { p: 0.0 });
    }
    let q = 2.0 * profile.g * hh[np] + hp_top.powi(-2);
    Ok((hh, q))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn check_field(h: &HeightField) -> Result<()> {
    let scale = h.max_abs().max(1.0);
    let asym = h.asymmetry();
    if asym > EVENNESS_TOL * scale {
        return Err(WaveError::NotEven { asymmetry: asym });
    }
    let bottom = h.row(0).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if bottom > 0.0 {
        return Err(WaveError::BottomCondition { max_abs: bottom });
    }
    Ok(())
}

/// Residual of the hodograph problem on the full grid: zeros on the bottom row,
/// the quasilinear residual on interior rows and the Bernoulli residual on p = 0.
pub fn residual(
    h: &HeightField,
    q: f64,
    gamma: &VorticitySpec,
    params: &WaveParameters,
) -> Result<GridFunction> {
    check_field(h)?;
    let sys = HalfSystem::new(h.grid, gamma, params.g);
    let u = sys.from_field(h);
    let r = sys.residual(&u, q, 0.0)?;
    let mut out = sys.to_field(&r[..sys.n_nodes()]);
    // the bottom row carries no equation
    for i in 0..h.grid.nq {
        out.set(i, 0, 0.0);
    }
    Ok(out)
}

/// Newton's method on the reduced system with the amplitude constraint h(0,0) - h(π,0) = 2a.
pub fn newton_solve(
    seed: &HeightField,
    q_guess: f64,
    amplitude: f64,
    gamma: &VorticitySpec,
    params: &WaveParameters,
    opts: NewtonOptions,
) -> Result<WaveSolution> {
    check_field(seed)?;
    if !(amplitude >= 0.0) {
        return Err(WaveError::InvalidParameter(
            "amplitude must be non-negative".into(),
        ));
    }
    let sys = HalfSystem::new(seed.grid, gamma, params.g);
    let n = sys.n_unknowns();
    let mut u = sys.from_field(seed);
    let mut q = q_guess;
    let mut r = sys.residual(&u, q, amplitude)?;
    let mut norm = max_abs(&r);
    let mut iterations = 0;
    while norm >= opts.tol {
        if iterations == opts.max_iter {
            return Err(WaveError::NewtonDiverged {
                iterations,
                residual: norm,
            });
        }
        iterations += 1;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = sparse_solve(n, sys.jacobian(&u, q), &rhs)?;
        // backtracking on the max-norm; full steps in the quadratic regime
        let mut alpha = 1.0;
        let mut accepted = None;
        let mut last_err = None;
        for _ in 0..8 {
            let trial: Vec<f64> = u
                .iter()
                .zip(&step)
                .map(|(a, b)| a + alpha * b)
                .collect();
            let trial_q = q + alpha * step[sys.q_index()];
            match sys.residual(&trial, trial_q, amplitude) {
                Ok(tr) => {
                    let tn = max_abs(&tr);
                    if tn.is_finite() && (tn < norm || tn < opts.tol) {
                        accepted = Some((trial, trial_q, tr, tn));
                        break;
                    }
                    last_err = None;
                }
                Err(e) => last_err = Some(e),
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((nu, nq, nr, nn)) => {
                u = nu;
                q = nq;
                r = nr;
                norm = nn;
            }
            None => {
                return Err(last_err.unwrap_or(WaveError::NewtonDiverged {
                    iterations,
                    residual: norm,
                }))
            }
        }
    }
    Ok(WaveSolution {
        params: *params,
        gamma: gamma.clone(),
        h: sys.to_field(&u),
        bernoulli_q: q,
        residual: max_abs(&r[..sys.n_nodes()]),
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub a_max: f64,
    pub da: f64,
    pub newton: NewtonOptions,
}

/// Solutions along the branch, the laminar flow first.
#[derive(Debug, Clone)]
pub struct BranchState {
    pub solutions: Vec<WaveSolution>,
    /// Step in use when the continuation stopped.
    pub step: f64,
    pub halvings: usize,
}

impl BranchState {
    pub fn amplitudes(&self) -> Vec<f64> {
        self.solutions.iter().map(|s| s.amplitude()).collect()
    }

    pub fn last(&self) -> &WaveSolution {
        self.solutions.last().expect("branch holds the laminar flow")
    }
}

/// Amplitude continuation from the laminar flow at the bifurcation point.
///
/// Each solve is seeded by secant extrapolation of the previous two solutions
/// (the linear mode for the first step). A failed step halves Δa; the branch
/// ends once the step would fall below Δa/64.
pub fn continue_branch(
    bif: &Bifurcation,
    gamma: &VorticitySpec,
    params: &WaveParameters,
    opts: ContinuationOptions,
) -> Result<BranchState> {
    if !(opts.a_max >= 0.0) {
        return Err(WaveError::InvalidParameter("a_max must be non-negative".into()));
    }
    if opts.a_max > 0.0 && !(opts.da > 0.0) {
        return Err(WaveError::InvalidParameter("da must be positive".into()));
    }
    let laminar = WaveSolution::laminar(&bif.profile, gamma, *params)?;
    let mut solutions = vec![laminar];
    let mut step = opts.da;
    let mut halvings = 0;
    let min_step = opts.da / 64.0;
    let mut a_cur = 0.0;
    let mut last_err = None;
    while a_cur < opts.a_max {
        let a_next = (a_cur + step).min(opts.a_max);
        let (seed, q_seed) = if solutions.len() == 1 {
            linear_seed(bif, a_next, params.grid())
        } else {
            let s1 = &solutions[solutions.len() - 1];
            let s0 = &solutions[solutions.len() - 2];
            let t = (a_next - s1.amplitude()) / (s1.amplitude() - s0.amplitude());
            let mut h = s1.h.clone();
            for (v, (a, b)) in h.values.iter_mut().zip(s1.h.values.iter().zip(&s0.h.values)) {
                *v = a + t * (a - b);
            }
            (h, s1.bernoulli_q + t * (s1.bernoulli_q - s0.bernoulli_q))
        };
        match newton_solve(&seed, q_seed, a_next, gamma, params, opts.newton) {
            Ok(sol) => {
                a_cur = a_next;
                solutions.push(sol);
            }
            Err(e) if e.is_step_failure() => {
                last_err = Some(e);
                step *= 0.5;
                halvings += 1;
                if step < min_step {
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }
    if opts.a_max > 0.0 && solutions.len() == 1 {
        return Err(WaveError::BranchStartFailed(
            last_err.map_or_else(|| "no step converged".into(), |e| e.to_string()),
        ));
    }
    Ok(BranchState {
        solutions,
        step,
        halvings,
    })
}

/// An invariant of [`WaveSolution`] that does not hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Residual { max: f64, bound: f64 },
    Stagnation { q: f64, p: f64, h_p: f64 },
    NotEven { asymmetry: f64 },
    BottomCondition { max_abs: f64 },
    SurfaceNotMonotone { q: f64, rise: f64 },
    NegativeAmplitude { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    /// max |η'| from periodic central differences of the surface row.
    pub max_surface_slope: f64,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Whether max |η'| ≤ 1/√3.
    pub fn slope_within_third_root(&self) -> bool {
        self.max_surface_slope <= 1.0 / 3f64.sqrt()
    }
}

/// Checks residuals, h_p > 0, evenness, the bottom condition and a surface that
/// decreases from crest to trough. Periodicity holds by storage.
pub fn validate_solution(sol: &WaveSolution) -> Validation {
    let mut violations = Vec::new();
    let g = sol.grid();
    let asym = sol.h.asymmetry();
    if asym > EVENNESS_TOL * sol.h.max_abs().max(1.0) {
        violations.push(Violation::NotEven { asymmetry: asym });
    }
    let bottom = sol.h.row(0).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if bottom > 0.0 {
        violations.push(Violation::BottomCondition { max_abs: bottom });
    }
    let sys = HalfSystem::new(g, &sol.gamma, sol.params.g);
    // evaluate on the half period; an uneven field is already reported above
    let u = sys.from_field(&sol.h);
    match sys.residual(&u, sol.bernoulli_q, 0.0) {
        Ok(r) => {
            let m = max_abs(&r[..sys.n_nodes()]);
            if !(m < VALIDATION_RESIDUAL) {
                violations.push(Violation::Residual {
                    max: m,
                    bound: VALIDATION_RESIDUAL,
                });
            }
        }
        Err(WaveError::StagnationInIterate { q, p, h_p }) => {
            violations.push(Violation::Stagnation { q, p, h_p })
        }
        Err(_) => {}
    }
    let amplitude = sol.amplitude();
    if amplitude < 0.0 {
        violations.push(Violation::NegativeAmplitude { amplitude });
    }
    let surface = sol.h.half_row(g.np);
    let trivial = amplitude.abs() < 1e-12;
    for k in 0..surface.len() - 1 {
        let rise = surface[k + 1] - surface[k];
        let bad = if trivial { rise > 1e-12 } else { rise >= 0.0 };
        if bad {
            violations.push(Violation::SurfaceNotMonotone {
                q: (k as f64 + 0.5) * g.dq(),
                rise,
            });
        }
    }
    let row = sol.h.row(g.np);
    let n = g.nq;
    let max_surface_slope = (0..n)
        .map(|i| ((row[(i + 1) % n] - row[(i + n - 1) % n]) / (2.0 * g.dq())).abs())
        .fold(0.0, f64::max);
    Validation {
        violations,
        max_surface_slope,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laminar::{find_bifurcation, solve_laminar};

    fn irrotational_setup(nq: usize, np: usize) -> (VorticitySpec, WaveParameters, Bifurcation) {
        let gamma = VorticitySpec::irrotational(-1.0).unwrap();
        let params = WaveParameters::new(9.81, -1.0, nq, np).unwrap();
        let bif = find_bifurcation(&gamma, -1.0, 9.81, 1, 0.1, 1.0, np).unwrap();
        (gamma, params, bif)
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let gamma = VorticitySpec::new(vec![-0.2, 0.1], -1.0).unwrap();
        let params = WaveParameters::new(9.81, -1.0, 16, 8).unwrap();
        let prof = solve_laminar(&gamma, -1.0, 0.6, 9.81, 8).unwrap();
        let mut h = prof.height_field(params.grid());
        let grid = params.grid();
        for j in 1..=8 {
            for i in 0..16 {
                let q = grid.q(i);
                let v = h.at(i, j) + 0.03 * (j as f64 / 8.0) * (q.cos() + 0.3 * (2.0 * q).cos());
                h.set(i, j, v);
            }
        }
        let sys = HalfSystem::new(grid, &gamma, 9.81);
        let u = sys.from_field(&h);
        let q = prof.bernoulli_q + 0.1;
        let n = sys.n_unknowns();
        let mut dense = vec![vec![0.0; n]; n];
        for (r, c, v) in sys.jacobian(&u, q) {
            dense[r][c] += v;
        }
        let base = sys.residual(&u, q, 0.02).unwrap();
        let eps = 1e-6;
        for col in 0..n {
            let (mut up, mut qq) = (u.clone(), q);
            if col == sys.q_index() {
                qq += eps;
            } else {
                up[col] += eps;
            }
            let pert = sys.residual(&up, qq, 0.02).unwrap();
            for row in 0..n {
                let fd = (pert[row] - base[row]) / eps;
                let scale = 1.0 + dense[row][col].abs();
                assert!(
                    (fd - dense[row][col]).abs() < 2e-3 * scale,
                    "({row}, {col}): fd {fd} vs {}",
                    dense[row][col]
                );
            }
        }
    }

    #[test]
    fn laminar_residual_is_tiny() {
        let (gamma, params, bif) = irrotational_setup(32, 16);
        let r = residual(&bif.profile.height_field(params.grid()), bif.profile.bernoulli_q, &gamma, &params).unwrap();
        assert!(r.max_abs() < 1e-12);
        let gamma = VorticitySpec::constant(-0.3, -1.0).unwrap();
        let prof = solve_laminar(&gamma, -1.0, 1.0, 9.81, 64).unwrap();
        let params = WaveParameters::new(9.81, -1.0, 32, 64).unwrap();
        let sol = WaveSolution::laminar(&prof, &gamma, params).unwrap();
        assert!(sol.residual < 1e-12, "{}", sol.residual);
        // the discrete profile differs from the shooting one at O(Δp²)
        let drift = (sol.h.at(0, 64) - prof.depth()).abs();
        assert!(drift < 1e-4 && drift > 0.0);
    }

    #[test]
    fn uneven_field_is_rejected() {
        let (gamma, params, bif) = irrotational_setup(32, 16);
        let mut h = bif.profile.height_field(params.grid());
        let grid = params.grid();
        for j in 1..=16 {
            for i in 0..32 {
                let v = h.at(i, j) + 0.01 * grid.q(i).sin() * grid.p(j);
                h.set(i, j, v);
            }
        }
        assert!(matches!(
            residual(&h, bif.profile.bernoulli_q, &gamma, &params),
            Err(WaveError::NotEven { .. })
        ));
    }

    #[test]
    fn zero_amplitude_returns_laminar() {
        let (gamma, params, bif) = irrotational_setup(32, 16);
        let h = bif.profile.height_field(params.grid());
        let sol = newton_solve(&h, bif.profile.bernoulli_q, 0.0, &gamma, &params, NewtonOptions::default()).unwrap();
        assert_eq!(sol.iterations, 0);
        let expected_q = 2.0 * 9.81 * bif.depth() + bif.profile.surface_slope().powi(-2);
        assert!((sol.bernoulli_q - expected_q).abs() < 1e-10);
        assert!(validate_solution(&sol).is_valid());
    }

    #[test]
    fn seed_residual_is_quadratic_in_epsilon() {
        let (gamma, params, bif) = irrotational_setup(64, 32);
        let res = |eps: f64| {
            let (h, q) = linear_seed(&bif, eps, params.grid());
            residual(&h, q, &gamma, &params).unwrap().max_abs()
        };
        let (r1, r2) = (res(0.01), res(0.005));
        // the linearised problem is solved up to discretisation error of the mode,
        // so the O(ε) remainder is small and the quadratic part dominates
        assert!(r1 < 5e-3, "{r1}");
        assert!(r1 / r2 > 2.5, "{r1} {r2}");
    }

    #[test]
    fn small_irrotational_wave_converges_quickly() {
        let (gamma, params, bif) = irrotational_setup(64, 32);
        let (h, q) = linear_seed(&bif, 0.005, params.grid());
        let sol = newton_solve(&h, q, 0.005, &gamma, &params, NewtonOptions::default()).unwrap();
        assert!(sol.iterations <= 8);
        assert!(sol.residual < 1e-10);
        assert!((sol.amplitude() - 0.005).abs() < 1e-10);
        let v = validate_solution(&sol);
        assert!(v.is_valid(), "{:?}", v.violations);
        assert!(v.max_surface_slope < 0.05);
    }

    #[test]
    fn corrupted_node_is_reported() {
        let (gamma, params, bif) = irrotational_setup(64, 32);
        let (h, q) = linear_seed(&bif, 0.005, params.grid());
        let mut sol = newton_solve(&h, q, 0.005, &gamma, &params, NewtonOptions::default()).unwrap();
        let grid = sol.grid();
        let i = grid.half_to_full(5);
        let v = sol.h.at(i, 10) + 1e-3;
        sol.h.set(i, 10, v);
        let v = sol.h.at(grid.mirror(i), 10) + 1e-3;
        sol.h.set(grid.mirror(i), 10, v);
        let report = validate_solution(&sol);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Residual { .. })));
    }

    #[test]
    fn branch_with_zero_amplitude_is_laminar_only() {
        let (gamma, params, bif) = irrotational_setup(32, 16);
        let branch = continue_branch(
            &bif,
            &gamma,
            &params,
            ContinuationOptions {
                a_max: 0.0,
                da: 0.001,
                newton: NewtonOptions::default(),
            },
        )
        .unwrap();
        assert_eq!(branch.solutions.len(), 1);
        assert!(branch.last().is_trivial());
    }
}
