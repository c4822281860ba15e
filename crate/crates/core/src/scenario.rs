//! Running scenarios and sweeps, and writing their results.
//!
//! Sweep points are independent: each one builds its own system, runs on a
//! bounded rayon pool and writes its own files. The merged index is written
//! afterwards on the calling thread, in point order, so the output does not
//! depend on the worker count.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{RunMode, ScenarioConfig};
use crate::error::{Error, Result};
use crate::gaussian::{
    repeat_protocol, DetectorState, GaussianState, PassChannel, ProtocolOptions, System,
};
use crate::output::{col, emit_table, Cell, Formats, Table};
use crate::perturbation::{trajectory_amplitude, Channel};
use crate::thermometry::{oscillation_metric, steady_state, temperature_from_occupation};

/// Environment variable capping the number of worker threads.
pub const WORKER_CAP_ENV: &str = "UNRUH_LAB_MAX_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    /// Pass number (passes mode) or sample number (continuous mode).
    pub pass: usize,
    pub t: f64,
    pub occupation: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub t_ss: f64,
    pub n_ss: f64,
    pub converged: bool,
    pub relative_trend: f64,
    /// RMS over mean of the temperature in the steady window.
    pub oscillation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Largest symplectic defect of the detector rows of any channel used.
    pub channel_defect: f64,
    /// Smallest detector symplectic eigenvalue minus one over the run.
    pub min_uncertainty_margin: f64,
    /// Richardson estimate of the step error in the first recorded
    /// occupation, from a rerun at twice the step.
    pub error_estimate: Option<f64>,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub label: String,
    pub config_hash: String,
    pub omega_d: f64,
    pub series: Vec<SeriesRow>,
    pub summary: Summary,
    pub diagnostics: Diagnostics,
}

/// Joint initial state: detector at the configured temperature, field
/// thermal at `t_bec` (the vacuum when zero).
pub fn initial_state(cfg: &ScenarioConfig, sys: &System) -> GaussianState {
    let det = if cfg.protocol.initial_temperature > 0.0 {
        DetectorState::thermal(cfg.params.omega_d, cfg.protocol.initial_temperature)
    } else {
        DetectorState::vacuum()
    };
    let omegas: Vec<f64> = sys.modes.modes.iter().map(|m| m.omega).collect();
    GaussianState::product(det, &omegas, cfg.params.t_bec)
}

/// Sample times of a continuous run: `sample_from + j sample_every` up to
/// `t_end`, inclusive within rounding.
pub fn sample_times(cfg: &ScenarioConfig) -> Vec<f64> {
    let p = &cfg.protocol;
    let n = ((p.t_end - p.sample_from) / p.sample_every * (1.0 + 1e-12)).floor() as usize;
    (0..=n).map(|j| p.sample_from + j as f64 * p.sample_every).collect()
}

fn margin(d: &DetectorState) -> f64 {
    let c = &d.cov;
    (c[0] * c[3] - c[1] * c[2]).max(0.0).sqrt() - 1.0
}

/// Execute one scenario.
pub fn run(cfg: &ScenarioConfig) -> Result<RunResult> {
    let sys = cfg.system()?;
    let init = initial_state(cfg, &sys);
    let dt = cfg.protocol.dt.unwrap_or_else(|| sys.default_dt());
    match cfg.protocol.mode {
        RunMode::Passes => run_passes(cfg, &sys, &init, dt),
        RunMode::Continuous => run_continuous(cfg, &sys, &init, dt),
    }
}

fn richardson(sys: &System, init: &GaussianState, t0: f64, t1: f64, dt: f64, fine: f64, disp: bool) -> Result<f64> {
    let coarse = PassChannel::compute(sys, t0, t1, Some(2.0 * dt))?.apply(init).occupation(disp);
    Ok((fine - coarse).abs() / 15.0)
}

fn run_passes(cfg: &ScenarioConfig, sys: &System, init: &GaussianState, dt: f64) -> Result<RunResult> {
    let p = &cfg.protocol;
    let opts = ProtocolOptions {
        n_reps: cfg.params.n_reps,
        reset: p.field_reset,
        mirrored_return: p.mirrored_return,
        dt: Some(dt),
        with_displacement: p.with_displacement,
        omega_d: cfg.params.omega_d,
    };
    let res = repeat_protocol(sys, init, &opts)?;
    let w = sys.schedule.window;
    let series: Vec<SeriesRow> = res
        .records
        .iter()
        .map(|r| SeriesRow { pass: r.pass, t: r.pass as f64 * w.duration(), occupation: r.occupation, temperature: r.temperature })
        .collect();
    let temps: Vec<f64> = series.iter().map(|r| r.temperature).collect();
    let occs: Vec<f64> = series.iter().map(|r| r.occupation).collect();
    let summary = summarize(&temps, &occs, p.steady_fraction)?;
    let error_estimate = if p.error_estimate {
        Some(richardson(sys, init, w.t0, w.t1, dt, series[0].occupation, p.with_displacement)?)
    } else {
        None
    };
    let min_margin = res.records.iter().map(|r| r.uncertainty_margin).fold(f64::INFINITY, f64::min);
    Ok(RunResult {
        label: cfg.outputs.label.clone(),
        config_hash: cfg.hash(),
        omega_d: cfg.params.omega_d,
        series,
        summary,
        diagnostics: Diagnostics { channel_defect: res.channel_defect, min_uncertainty_margin: min_margin, error_estimate, dt },
    })
}

fn run_continuous(cfg: &ScenarioConfig, sys: &System, init: &GaussianState, dt: f64) -> Result<RunResult> {
    let p = &cfg.protocol;
    let t0 = sys.schedule.window.t0;
    let disp = p.with_displacement;
    let mut series = Vec::new();
    let mut defect: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    let mut last_fine = None;
    for (j, &t) in sample_times(cfg).iter().enumerate() {
        let det = if t <= t0 {
            init.detector()
        } else {
            let ch = PassChannel::compute(sys, t0, t, Some(dt))?;
            defect = defect.max(ch.symplectic_defect());
            ch.apply(init)
        };
        let n = det.occupation(disp);
        min_margin = min_margin.min(margin(&det));
        last_fine = Some((t, n));
        series.push(SeriesRow { pass: j, t, occupation: n, temperature: temperature_from_occupation(n.max(0.0), cfg.params.omega_d)? });
    }
    let window: Vec<&SeriesRow> = series.iter().filter(|r| r.t >= p.steady_from - 1e-9).collect();
    if window.is_empty() {
        return Err(Error::Validation(format!("no samples at or after protocol.steady_from = {}", p.steady_from)));
    }
    let temps: Vec<f64> = window.iter().map(|r| r.temperature).collect();
    let occs: Vec<f64> = window.iter().map(|r| r.occupation).collect();
    let summary = summarize(&temps, &occs, 1.0)?;
    let error_estimate = match (p.error_estimate, last_fine) {
        (true, Some((t, n))) if t > t0 => Some(richardson(sys, init, t0, t, dt, n, disp)?),
        _ => None,
    };
    Ok(RunResult {
        label: cfg.outputs.label.clone(),
        config_hash: cfg.hash(),
        omega_d: cfg.params.omega_d,
        series,
        summary,
        diagnostics: Diagnostics { channel_defect: defect, min_uncertainty_margin: min_margin, error_estimate, dt },
    })
}

/// Steady value of a temperature series. Short series fall back to the
/// plain mean, converged when the end-to-end change is below 1%.
fn summarize(temps: &[f64], occs: &[f64], fraction: f64) -> Result<Summary> {
    let w = ((temps.len() as f64 * fraction).ceil() as usize).clamp(1, temps.len());
    let tail = &temps[temps.len() - w..];
    let occ_tail = &occs[occs.len() - w..];
    let n_ss = occ_tail.iter().sum::<f64>() / w as f64;
    let oscillation = oscillation_metric(tail);
    if temps.len() >= 10 {
        let s = steady_state(temps, fraction)?;
        return Ok(Summary { t_ss: s.value, n_ss, converged: s.converged, relative_trend: s.relative_trend, oscillation });
    }
    let mean = tail.iter().sum::<f64>() / w as f64;
    let trend = if mean != 0.0 { (tail[w - 1] - tail[0]) / mean } else { 0.0 };
    Ok(Summary { t_ss: mean, n_ss, converged: trend.abs() < 0.01, relative_trend: trend, oscillation })
}

/// Number of workers: the request (or the available parallelism), capped
/// by [`WORKER_CAP_ENV`] when set.
pub fn worker_count(requested: Option<usize>) -> usize {
    let base = requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cap = std::env::var(WORKER_CAP_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&c| c > 0);
    base.min(cap.unwrap_or(usize::MAX)).max(1)
}

/// Map `f` over `items` on a pool of `workers` threads, keeping input order.
pub fn run_pool<T, R, F>(workers: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()))
}

/// One sweep point: the value applied and the outcome.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub value: String,
    pub result: std::result::Result<RunResult, String>,
}

/// Configurations for every sweep value, all validated before any run.
pub fn sweep_configs(cfg: &ScenarioConfig, param: &str, values: &[String]) -> Result<Vec<ScenarioConfig>> {
    if values.is_empty() {
        return Err(Error::Validation(format!("sweep over {param} has no values")));
    }
    values
        .iter()
        .map(|v| cfg.with_override(param, v).map_err(|e| Error::Validation(format!("sweep {param} = {v}: {e}"))))
        .collect()
}

/// Run every sweep point; an engine failure is recorded on its point only.
pub fn sweep(cfg: &ScenarioConfig, param: &str, values: &[String], workers: usize) -> Result<Vec<SweepPoint>> {
    let cfgs = sweep_configs(cfg, param, values)?;
    run_pool(workers, &cfgs, |i, c| SweepPoint { index: i, value: values[i].clone(), result: run(c).map_err(|e| e.to_string()) })
}

/// Per-run time series table.
pub fn series_table(r: &RunResult) -> Table {
    let mut t = Table::new(vec![col("pass", ""), col("t", "1/w0"), col("n", "quanta"), col("T", "w0")]);
    t.note(format!("run {} config sha256 {}", r.label, r.config_hash));
    t.note(format!("omega_d {:.12e}", r.omega_d));
    let s = &r.summary;
    t.note(format!(
        "T_ss {:.12e} n_ss {:.12e} converged {} relative_trend {:.6e} oscillation {:.6e}",
        s.t_ss, s.n_ss, s.converged, s.relative_trend, s.oscillation
    ));
    let d = &r.diagnostics;
    t.note(format!(
        "dt {:.6e} channel_defect {:.3e} min_uncertainty_margin {:.3e} error_estimate {}",
        d.dt,
        d.channel_defect,
        d.min_uncertainty_margin,
        d.error_estimate.map_or("none".to_string(), |e| format!("{e:.3e}"))
    ));
    for row in &r.series {
        t.push(vec![row.pass.into(), row.t.into(), row.occupation.into(), row.temperature.into()]);
    }
    t
}

/// Sweep summary table: one row per point.
pub fn scan_table(param: &str, points: &[SweepPoint]) -> Table {
    let mut t = Table::new(vec![
        col("value", ""),
        col("T_ss", "w0"),
        col("n_ss", "quanta"),
        col("converged", ""),
        col("oscillation", ""),
        col("error_estimate", "quanta"),
        col("status", ""),
    ]);
    t.note(format!("scan over {param}"));
    let ok: Vec<f64> = points.iter().filter_map(|p| p.result.as_ref().ok()).map(|r| r.summary.t_ss).collect();
    if ok.len() >= 2 {
        let mean = ok.iter().sum::<f64>() / ok.len() as f64;
        let max = ok.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ok.iter().copied().fold(f64::INFINITY, f64::min);
        t.note(format!("T_ss mean {mean:.12e} relative_spread {:.6e}", (max - min) / mean));
    }
    for p in points {
        let row = match &p.result {
            Ok(r) => vec![
                p.value.clone().into(),
                r.summary.t_ss.into(),
                r.summary.n_ss.into(),
                Cell::Int(r.summary.converged as i64),
                r.summary.oscillation.into(),
                r.diagnostics.error_estimate.unwrap_or(f64::NAN).into(),
                "ok".into(),
            ],
            Err(e) => vec![
                p.value.clone().into(),
                f64::NAN.into(),
                f64::NAN.into(),
                Cell::Int(0),
                f64::NAN.into(),
                f64::NAN.into(),
                format!("error: {e}").into(),
            ],
        };
        t.push(row);
    }
    t
}

/// One line of the merged index.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    pub job: String,
    pub point: usize,
    pub param: String,
    pub value: String,
    pub status: String,
    pub config_hash: String,
    pub t_ss: f64,
    pub files: Vec<String>,
}

fn rel(dir: &Path, p: &Path) -> String {
    p.strip_prefix(dir).unwrap_or(p).to_string_lossy().replace('\\', "/")
}

/// A job: one configuration, optionally swept over one parameter.
#[derive(Debug, Clone)]
pub struct Job {
    pub label: String,
    pub config: ScenarioConfig,
    pub sweep: Option<(String, Vec<String>)>,
}

impl Job {
    pub fn from_config(cfg: ScenarioConfig) -> Self {
        let sweep = cfg.sweep.as_ref().map(|s| (s.param.clone(), s.values.clone()));
        Job { label: cfg.outputs.label.clone(), config: cfg, sweep }
    }
}

struct Task {
    job: usize,
    point: usize,
    value: String,
    config: ScenarioConfig,
}

/// Run `jobs` on one pool and write everything under `dir`:
/// `<job>.ini`, per-point series, per-job scan tables and `index.dat/.csv`.
pub fn execute(dir: &Path, jobs: &[Job], workers: usize) -> Result<Vec<IndexEntry>> {
    let mut tasks = Vec::new();
    for (j, job) in jobs.iter().enumerate() {
        match &job.sweep {
            None => tasks.push(Task { job: j, point: 0, value: String::new(), config: job.config.clone() }),
            Some((param, values)) => {
                for (i, c) in sweep_configs(&job.config, param, values)?.into_iter().enumerate() {
                    tasks.push(Task { job: j, point: i, value: values[i].clone(), config: c });
                }
            }
        }
    }
    std::fs::create_dir_all(dir)?;
    let outcomes = run_pool(workers, &tasks, |_, t| -> (std::result::Result<RunResult, String>, Vec<PathBuf>) {
        let job = &jobs[t.job];
        let formats = Formats { dat: t.config.outputs.dat, csv: t.config.outputs.csv };
        match run(&t.config) {
            Ok(r) => {
                let stem = if job.sweep.is_some() { format!("{}/point_{:03}", job.label, t.point) } else { job.label.clone() };
                match emit_table(dir, &stem, &series_table(&r), formats) {
                    Ok(files) => (Ok(r), files),
                    Err(e) => (Err(e.to_string()), Vec::new()),
                }
            }
            Err(e) => (Err(e.to_string()), Vec::new()),
        }
    })?;

    let mut index = Vec::new();
    for (j, job) in jobs.iter().enumerate() {
        let formats = Formats { dat: job.config.outputs.dat, csv: job.config.outputs.csv };
        crate::output::write_atomic(&dir.join(format!("{}.ini", job.label)), job.config.to_ini().as_bytes())?;
        let mut points = Vec::new();
        for (t, (res, files)) in tasks.iter().zip(&outcomes).filter(|(t, _)| t.job == j) {
            index.push(IndexEntry {
                job: job.label.clone(),
                point: t.point,
                param: job.sweep.as_ref().map_or(String::new(), |s| s.0.clone()),
                value: t.value.clone(),
                status: match res {
                    Ok(_) => "ok".into(),
                    Err(e) => format!("error: {e}"),
                },
                config_hash: t.config.hash(),
                t_ss: res.as_ref().map_or(f64::NAN, |r| r.summary.t_ss),
                files: files.iter().map(|f| rel(dir, f)).collect(),
            });
            points.push(SweepPoint { index: t.point, value: t.value.clone(), result: res.clone() });
        }
        if let Some((param, _)) = &job.sweep {
            let files = emit_table(dir, &format!("{}_scan", job.label), &scan_table(param, &points), formats)?;
            index.push(IndexEntry {
                job: job.label.clone(),
                point: points.len(),
                param: param.clone(),
                value: "scan".into(),
                status: "ok".into(),
                config_hash: job.config.hash(),
                t_ss: f64::NAN,
                files: files.iter().map(|f| rel(dir, f)).collect(),
            });
        }
    }
    emit_table(dir, "index", &index_table(&index), Formats::default())?;
    Ok(index)
}

fn index_table(entries: &[IndexEntry]) -> Table {
    let mut t = Table::new(vec![
        col("job", ""),
        col("point", ""),
        col("param", ""),
        col("value", ""),
        col("T_ss", "w0"),
        col("status", ""),
        col("config_sha256", ""),
        col("files", ""),
    ]);
    for e in entries {
        t.push(vec![
            e.job.clone().into(),
            e.point.into(),
            (if e.param.is_empty() { "-".to_string() } else { e.param.clone() }).into(),
            (if e.value.is_empty() { "-".to_string() } else { e.value.clone() }).into(),
            e.t_ss.into(),
            e.status.clone().into(),
            e.config_hash.clone().into(),
            e.files.join(";").into(),
        ]);
    }
    t
}

/// Dispersion dump of the configured mode set.
pub fn dispersion_table(cfg: &ScenarioConfig) -> Result<Table> {
    let modes = cfg.mode_set()?;
    let mut t = Table::new(vec![
        col("k", "w0/c_s"),
        col("omega", "w0"),
        col("u", ""),
        col("v", ""),
        col("gap_correction", "w0"),
    ]);
    t.note(format!("dispersion {} c_s {} m {}", cfg.modes.dispersion.name(), cfg.params.c_s, cfg.params.m));
    for m in &modes.modes {
        let k = m.k_abs();
        t.push(vec![k.into(), m.omega.into(), m.u.into(), m.v.into(), (cfg.params.c_s * k - m.omega).into()]);
    }
    Ok(t)
}

/// First-order excitation and de-excitation probabilities per mode over the
/// configured window, with the detailed-balance temperature of the totals.
pub fn amplitude_table(cfg: &ScenarioConfig) -> Result<Table> {
    let sys = cfg.system()?;
    let w = sys.schedule.window;
    let gk2 = (cfg.params.g * sys.modes.coupling_norm()).powi(2);
    let mut t = Table::new(vec![
        col("k_x", "w0/c_s"),
        col("k_y", "w0/c_s"),
        col("omega", "w0"),
        col("P_plus", ""),
        col("P_minus", ""),
    ]);
    let (mut pp, mut pm) = (0.0, 0.0);
    let mut rows = Vec::new();
    for m in &sys.modes.modes {
        let a = gk2 * trajectory_amplitude(&sys.trajectory, m, cfg.params.omega_d, Channel::Excitation, &w)?.norm_sqr();
        let b = gk2 * trajectory_amplitude(&sys.trajectory, m, cfg.params.omega_d, Channel::Deexcitation, &w)?.norm_sqr();
        pp += a;
        pm += b;
        rows.push(vec![m.k[0].into(), m.k[1].into(), m.omega.into(), a.into(), b.into()]);
    }
    t.note(format!("window [{}, {}] omega_d {}", w.t0, w.t1, cfg.params.omega_d));
    let t_db = if pp > 0.0 && pm > pp { cfg.params.omega_d / (pm / pp).ln() } else { f64::NAN };
    t.note(format!("P_plus_total {pp:.12e} P_minus_total {pm:.12e} T_detailed_balance {t_db:.12e}"));
    t.rows = rows;
    Ok(t)
}
