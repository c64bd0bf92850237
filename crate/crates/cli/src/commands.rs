use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use hodowave::fields::{sample_lattice, FrameSummary};
use hodowave::kinematics::{drift_profile, integrate_trajectory, streamline, Trajectory};
use hodowave::laminar::{dispersion_residual, find_bifurcation, scan_for_bracket, solve_laminar};
use hodowave::solver::{continue_branch, ContinuationOptions};
use hodowave::verify::{run_all, VerificationReport};
use hodowave::{derive_frame, Bifurcation, BranchState, NewtonOptions, VorticitySpec, WaveParameters, WaveSolution};
use serde::Serialize;

use crate::config::{RunConfig, TraceStart};
use crate::error::CliError;
use crate::plot;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_csv<const N: usize>(path: &Path, header: [&str; N], rows: impl IntoIterator<Item = [f64; N]>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn vorticity(cfg: &RunConfig, coefficients: &[f64]) -> Result<VorticitySpec, CliError> {
    VorticitySpec::new(coefficients.to_vec(), cfg.p0).map_err(|e| CliError::Config {
        key: Some("gamma".into()),
        message: e.to_string(),
    })
}

fn bifurcation(cfg: &RunConfig, gamma: &VorticitySpec) -> Result<Bifurcation, CliError> {
    let b = &cfg.bracket;
    let (lo, hi) = scan_for_bracket(gamma, cfg.p0, cfg.g, 1, b.lo, b.hi, b.samples, cfg.np)?;
    Ok(find_bifurcation(gamma, cfg.p0, cfg.g, 1, lo, hi, cfg.np)?)
}

fn branch(cfg: &RunConfig, gamma: &VorticitySpec, bif: &Bifurcation) -> Result<BranchState, CliError> {
    let d = bif.depth();
    let params = WaveParameters::new(cfg.g, cfg.p0, cfg.nq, cfg.np)?;
    let opts = ContinuationOptions {
        a_max: cfg.a_max.unwrap_or(0.01 * d),
        da: cfg.da.unwrap_or(0.005 * d),
        newton: NewtonOptions {
            tol: cfg.tol,
            max_iter: cfg.max_iter,
        },
    };
    Ok(continue_branch(bif, gamma, &params, opts)?)
}

/// The largest wave of the configured branch.
fn solve_wave(cfg: &RunConfig) -> Result<WaveSolution, CliError> {
    let gamma = vorticity(cfg, &cfg.gamma)?;
    let bif = bifurcation(cfg, &gamma)?;
    Ok(branch(cfg, &gamma, &bif)?.last().clone())
}

#[derive(Serialize)]
struct BifurcationRecord {
    k: u32,
    lambda: f64,
    d: f64,
    c: f64,
    #[serde(rename = "Q")]
    bernoulli_q: f64,
}

impl From<&Bifurcation> for BifurcationRecord {
    fn from(b: &Bifurcation) -> Self {
        Self {
            k: b.wavenumber,
            lambda: b.lambda,
            d: b.depth(),
            c: b.speed(),
            bernoulli_q: b.profile.bernoulli_q,
        }
    }
}

pub fn laminar(cfg: &RunConfig) -> Result<(), CliError> {
    let gamma = vorticity(cfg, &cfg.gamma)?;
    let bif = bifurcation(cfg, &gamma)?;
    let prof = &bif.profile;
    let dp = -cfg.p0 / cfg.np as f64;
    write_csv(
        &cfg.out.join("profile.csv"),
        ["p", "H", "H_p"],
        (0..=cfg.np).map(|j| [cfg.p0 + j as f64 * dp, prof.height[j], prof.slope[j]]),
    )?;
    let b = &cfg.bracket;
    let mut rows = Vec::new();
    for n in 0..=b.samples {
        let lambda = b.lo + (b.hi - b.lo) * n as f64 / b.samples as f64;
        // λ beyond laminar stagnation has no profile and no row
        if let Ok(p) = solve_laminar(&gamma, cfg.p0, lambda, cfg.g, cfg.np) {
            if let Ok(r) = dispersion_residual(&p, &gamma, cfg.g, 1) {
                rows.push([lambda, r]);
            }
        }
    }
    write_csv(&cfg.out.join("dispersion.csv"), ["lambda", "residual"], rows)?;
    write_json(&cfg.out.join("laminar.json"), &BifurcationRecord::from(&bif))
}

pub fn bifurcate(cfg: &RunConfig) -> Result<(), CliError> {
    let gamma = vorticity(cfg, &cfg.gamma)?;
    let bif = bifurcation(cfg, &gamma)?;
    write_json(&cfg.out.join("bifurcation.json"), &BifurcationRecord::from(&bif))
}

#[derive(Serialize)]
struct BranchRecord {
    index: usize,
    amplitude: f64,
    #[serde(rename = "Q")]
    bernoulli_q: f64,
    residual: f64,
    iterations: usize,
    frame: FrameSummary,
}

fn branch_records(state: &BranchState) -> Vec<BranchRecord> {
    state
        .solutions
        .iter()
        .enumerate()
        .map(|(index, s)| BranchRecord {
            index,
            amplitude: s.amplitude(),
            bernoulli_q: s.bernoulli_q,
            residual: s.residual,
            iterations: s.iterations,
            frame: derive_frame(s).summary(),
        })
        .collect()
}

#[derive(Serialize)]
struct FrameRecord<'a> {
    summary: FrameSummary,
    x: &'a [f64],
    eta: &'a [f64],
}

pub fn solve(cfg: &RunConfig) -> Result<(), CliError> {
    let gamma = vorticity(cfg, &cfg.gamma)?;
    let bif = bifurcation(cfg, &gamma)?;
    let state = branch(cfg, &gamma, &bif)?;
    write_json(&cfg.out.join("branch.json"), &branch_records(&state))?;
    for (n, s) in state.solutions.iter().enumerate() {
        let g = s.grid();
        write_csv(
            &cfg.out.join(format!("solution_{n:03}.csv")),
            ["q", "p", "h"],
            (0..=g.np).flat_map(|j| (0..g.nq).map(move |i| (i, j))).map(|(i, j)| [g.q(i), g.p(j), s.h.at(i, j)]),
        )?;
        let f = derive_frame(s);
        write_json(
            &cfg.out.join(format!("frame_{n:03}.json")),
            &FrameRecord {
                summary: f.summary(),
                x: &f.x,
                eta: &f.eta,
            },
        )?;
    }
    Ok(())
}

/// Crest starts at bed, mid-level and surface.
fn default_starts(s: &WaveSolution, depth: f64) -> Vec<TraceStart> {
    let g = s.grid();
    [0, g.np / 2, g.np]
        .iter()
        .map(|&j| TraceStart {
            x: 0.0,
            y: s.h.at(g.crest(), j) - depth,
        })
        .collect()
}

#[derive(Serialize)]
struct TraceRecord {
    start: (f64, f64),
    p: f64,
    dt: f64,
    crossings: Vec<f64>,
    tau: Option<f64>,
    drift: Option<f64>,
    psi_deviation: f64,
    vertical_extent: f64,
}

pub(crate) fn trace_all(cfg: &RunConfig, s: &WaveSolution) -> Result<Vec<(f64, Trajectory)>, CliError> {
    let f = derive_frame(s);
    let period = 2.0 * PI / f.speed;
    let duration = cfg.duration.unwrap_or(3.0 * period);
    let dt = cfg.dt.unwrap_or(period / 2000.0);
    let starts = if cfg.traces.is_empty() {
        default_starts(s, f.depth)
    } else {
        cfg.traces.clone()
    };
    starts
        .iter()
        .map(|t| {
            let tr = integrate_trajectory(s, &f, t.x, t.y, duration, dt)?;
            Ok((-tr.samples[0].psi, tr))
        })
        .collect()
}

pub fn trace(cfg: &RunConfig) -> Result<(), CliError> {
    let s = solve_wave(cfg)?;
    let f = derive_frame(&s);
    let traces = trace_all(cfg, &s)?;
    let mut records = Vec::new();
    for (n, (p, tr)) in traces.iter().enumerate() {
        write_csv(
            &cfg.out.join(format!("trajectory_{n:02}.csv")),
            ["t", "X", "Y"],
            tr.samples.iter().map(|s| [s.t, s.big_x, s.big_y]),
        )?;
        let line = streamline(&s, &f, *p, 2 * s.grid().nq)?;
        write_csv(
            &cfg.out.join(format!("streamline_{n:02}.csv")),
            ["x", "sigma"],
            line.x.iter().zip(&line.sigma).map(|(x, y)| [*x, *y]),
        )?;
        records.push(TraceRecord {
            start: tr.start,
            p: *p,
            dt: tr.dt,
            crossings: tr.crossings.clone(),
            tau: tr.tau,
            drift: tr.drift,
            psi_deviation: tr.psi_deviation,
            vertical_extent: tr.vertical_extent(),
        });
    }
    write_json(&cfg.out.join("trajectories.json"), &records)?;
    write_json(&cfg.out.join("drift.json"), &drift_profile(&s, &f))
}

fn verdict_error(report: &VerificationReport) -> Result<(), CliError> {
    if report.passed() {
        return Ok(());
    }
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.verdict == hodowave::verify::Verdict::Fail)
        .map(|c| c.id.as_str())
        .collect();
    let msg = if failed.is_empty() {
        format!("invalid solution: {} violation(s)", report.meta.violations.len())
    } else {
        failed.join(", ")
    };
    Err(CliError::Verification(msg))
}

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let s = solve_wave(cfg)?;
    let report = run_all(&s);
    write_json(&cfg.out.join("report.json"), &report)?;
    verdict_error(&report)
}

pub fn plot(cfg: &RunConfig) -> Result<(), CliError> {
    let s = solve_wave(cfg)?;
    let f = derive_frame(&s);
    if cfg.plots.streamlines {
        let lattice = sample_lattice(&s, &f, cfg.lattice.nx, cfg.lattice.ny)?;
        write_csv(
            &cfg.out.join("lattice.csv"),
            ["x", "y", "u", "v", "psi"],
            lattice.iter().map(|l| [l.x, l.y, l.u, l.v, l.psi]),
        )?;
        let levels = 9;
        let lines = (0..=levels)
            .map(|n| streamline(&s, &f, cfg.p0 * (1.0 - n as f64 / levels as f64), 2 * s.grid().nq))
            .collect::<Result<Vec<_>, _>>()?;
        fs::write(cfg.out.join("figure1.svg"), plot::streamline_figure(&f, &lines, &lattice))?;
    }
    if cfg.plots.drift {
        let profile = drift_profile(&s, &f);
        let traces = trace_all(cfg, &s)?;
        fs::write(cfg.out.join("figure2.svg"), plot::drift_figure(&profile, &traces))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRecord {
    index: usize,
    gamma: Vec<f64>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
}

fn sweep_job(cfg: &RunConfig, coefficients: &[f64], dir: &Path) -> Result<f64, CliError> {
    let gamma = vorticity(cfg, coefficients)?;
    let bif = bifurcation(cfg, &gamma)?;
    write_json(&dir.join("bifurcation.json"), &BifurcationRecord::from(&bif))?;
    let state = branch(cfg, &gamma, &bif)?;
    write_json(&dir.join("branch.json"), &branch_records(&state))?;
    let report = run_all(state.last());
    write_json(&dir.join("report.json"), &report)?;
    verdict_error(&report)?;
    Ok(state.last().amplitude())
}

/// Solve and verify per vorticity spec; the exit status is the worst job's.
pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let specs = if cfg.sweep.is_empty() {
        vec![cfg.gamma.clone()]
    } else {
        cfg.sweep.clone()
    };
    let mut records = Vec::new();
    let mut worst: Option<CliError> = None;
    for (index, coefficients) in specs.iter().enumerate() {
        let dir = cfg.out.join(format!("job_{index:02}"));
        fs::create_dir_all(&dir)?;
        let result = sweep_job(cfg, coefficients, &dir);
        let (status, message, amplitude) = match &result {
            Ok(a) => ("pass", None, Some(*a)),
            Err(CliError::Verification(m)) => ("fail", Some(m.clone()), None),
            Err(e) => (e.kind(), Some(e.to_string()), None),
        };
        records.push(SweepRecord {
            index,
            gamma: coefficients.clone(),
            status,
            message,
            amplitude,
        });
        if let Err(e) = result {
            let replace = worst.as_ref().map_or(true, |w| rank(&e) > rank(w));
            if replace {
                worst = Some(e);
            }
        }
    }
    write_json(&cfg.out.join("sweep.json"), &records)?;
    worst.map_or(Ok(()), Err)
}

fn rank(e: &CliError) -> u8 {
    match e {
        CliError::Verification(_) => 1,
        CliError::Solver(_) => 2,
        CliError::Config { .. } => 3,
        CliError::Io(_) => 4,
    }
}
