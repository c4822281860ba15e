//! Acceptance criteria. Prints one PASS/FAIL line per criterion and fails
//! if any criterion fails.
//!
//! The preset runs are executed twice each, on one and two workers, and the
//! two output trees are compared byte for byte; every other figure check
//! reads the written series files back.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_PI;
use std::fs;
use std::path::{Path, PathBuf};

use common::{fock_comparison, gamma_oracle, step_halving, two_mode_squeezing};
use unruh_lab::config::{load_config, ScenarioConfig};
use unruh_lab::gaussian::{evolve, EvolveOptions};
use unruh_lab::perturbation::{analytic_probability, detailed_balance_fit, ideal_amplitude, Channel};
use unruh_lab::presets::{self, Preset};
use unruh_lab::scenario::{execute, initial_state, run, IndexEntry};
use unruh_lab::thermometry::{oscillation_metric, steady_state};

/// Bound on any symplectic eigenvalue's distance from one after a pass.
const PURITY_TOL: f64 = 1e-6;
/// Positivity of `cov + i Omega` along the way.
const POSITIVITY_TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// One run read back from its CSV twin and `.dat` header.
#[derive(Debug, Clone)]
struct Series {
    t: Vec<f64>,
    n: Vec<f64>,
    temp: Vec<f64>,
    channel_defect: f64,
    min_margin: f64,
}

fn read_series(dir: &Path, entry: &IndexEntry) -> Series {
    let csv = entry.files.iter().find(|f| f.ends_with(".csv")).expect("csv written");
    let dat = entry.files.iter().find(|f| f.ends_with(".dat")).expect("dat written");
    let mut s = Series { t: vec![], n: vec![], temp: vec![], channel_defect: f64::NAN, min_margin: f64::NAN };
    let text = fs::read_to_string(dir.join(csv)).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        s.t.push(v[1]);
        s.n.push(v[2]);
        s.temp.push(v[3]);
    }
    let header = fs::read_to_string(dir.join(dat)).unwrap();
    for line in header.lines().take_while(|l| l.starts_with('#')) {
        let words: Vec<&str> = line.split_whitespace().collect();
        for w in words.windows(2) {
            match w[0] {
                "channel_defect" => s.channel_defect = w[1].parse().unwrap(),
                "min_uncertainty_margin" => s.min_margin = w[1].parse().unwrap(),
                _ => {}
            }
        }
    }
    s
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

/// Results of one preset: series per `(job, value)` plus the invariant checks.
struct PresetRun {
    series: BTreeMap<(String, String), Series>,
    failures: Vec<String>,
    identical: bool,
}

fn run_preset(p: &Preset) -> PresetRun {
    let jobs = p.jobs().unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let index = execute(a.path(), &jobs, 1).unwrap();
    execute(b.path(), &jobs, 2).unwrap();
    let fa = files_under(a.path());
    let identical = fa == files_under(b.path())
        && fa.iter().all(|f| fs::read(a.path().join(f)).unwrap() == fs::read(b.path().join(f)).unwrap());

    let mut series = BTreeMap::new();
    let mut failures = Vec::new();
    for e in index.iter().filter(|e| e.value != "scan") {
        if e.status != "ok" {
            failures.push(format!("{} {}: {}", e.job, e.value, e.status));
            continue;
        }
        series.insert((e.job.clone(), e.value.clone()), read_series(a.path(), e));
    }
    PresetRun { series, failures, identical }
}

fn get<'a>(r: &'a PresetRun, job: &str, value: &str) -> &'a Series {
    &r.series[&(job.to_string(), value.to_string())]
}

fn rel_spread(xs: &[f64]) -> f64 {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min) / mean
}

fn criterion_1() -> Outcome {
    let (a, c_s, omega_k) = (2.0, 1.0, 50.0);
    let pts: Vec<(f64, f64, f64)> = [0.6, 0.8, 1.0, 1.2, 1.4]
        .iter()
        .map(|&w| {
            let p = ideal_amplitude(omega_k, w, a, c_s, Channel::Excitation).unwrap().probability();
            let m = ideal_amplitude(omega_k, w, a, c_s, Channel::Deexcitation).unwrap().probability();
            (w, p, m)
        })
        .collect();
    let fit = detailed_balance_fit(&pts).unwrap();
    let err = (fit.temperature / FRAC_1_PI - 1.0).abs();
    outcome(err <= 0.05, format!("fitted T = {:.6}, 1/pi = {FRAC_1_PI:.6}, relative error {err:.2e} (<= 5%)", fit.temperature))
}

fn criterion_2() -> Outcome {
    let pairs = [
        (0.5, 1.0),
        (1.0, 1.0),
        (0.6, 2.0),
        (1.0, 2.0),
        (1.4, 2.0),
        (2.0, 2.0),
        (1.0, 3.0),
        (2.5, 3.0),
        (1.0, 4.0),
        (3.0, 4.0),
    ];
    let mut worst: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for ch in [Channel::Excitation, Channel::Deexcitation] {
        let ratios: Vec<f64> = pairs
            .iter()
            .map(|&(w, a)| {
                let q = ideal_amplitude(40.0 * w, w, a, 1.0, ch).unwrap().probability();
                let closed = analytic_probability(w, a, 1.0, ch).unwrap();
                worst_closed = worst_closed.max((closed / gamma_oracle(w, a, 1.0, ch) - 1.0).abs());
                q / closed
            })
            .collect();
        for r in &ratios {
            worst = worst.max((r / ratios[0] - 1.0).abs());
        }
    }
    outcome(
        worst <= 0.01 && worst_closed <= 0.01,
        format!("10 pairs x 2 channels: max normalized deviation {worst:.2e}, closed form vs Gamma {worst_closed:.2e} (<= 1%)"),
    )
}

fn criterion_3() -> Outcome {
    let (n, exact) = two_mode_squeezing();
    let (n_gauss, n_fock) = fock_comparison();
    let s = step_halving();
    let a = (n - exact).abs();
    let b = (n_gauss - n_fock).abs();
    outcome(
        a <= 1e-6 && b <= 1e-4 && (12.0..=20.0).contains(&s.ratio),
        format!(
            "squeezing |n - sinh^2| = {a:.2e} (<= 1e-6); Fock |dn| = {b:.2e} (<= 1e-4); step-halving ratio {:.2} in [12, 20]",
            s.ratio
        ),
    )
}

fn criterion_4(r: &PresetRun) -> Outcome {
    let t_ss = |job: &str, v: &str| {
        let s = get(r, job, v);
        (steady_state(&s.temp, 0.2).unwrap(), s.temp.len())
    };
    let mut converged = true;
    let mut passes = 0;
    for (job, v) in [("gamma_scan", "3"), ("gamma_scan", "7"), ("gamma_scan", "17"), ("heating", ""), ("cooling", "")] {
        let (ss, n) = t_ss(job, v);
        converged &= ss.converged;
        passes = passes.max(n);
    }
    let t3 = t_ss("gamma_scan", "3").0.value;
    let t7 = t_ss("gamma_scan", "7").0.value;
    let t17 = t_ss("gamma_scan", "17").0.value;
    let heat = t_ss("heating", "").0.value;
    let cool = t_ss("cooling", "").0.value;
    let err17 = (t17 / FRAC_1_PI - 1.0).abs();
    let monotone = t3 > t7 && t7 > t17;
    let hc = (heat - cool).abs() / (0.5 * (heat + cool));
    outcome(
        converged && passes <= 150 && err17 <= 0.25 && monotone && hc <= 0.05,
        format!(
            "converged within {passes} passes: {converged}; T_ss(gamma=3,7,17) = {t3:.4}, {t7:.4}, {t17:.4} \
             (gamma=17 off 1/pi by {:.1}%, <= 25%; decreasing: {monotone}); heating {heat:.4} vs cooling {cool:.4} differ {:.2}% (<= 5%)",
            100.0 * err17,
            100.0 * hc
        ),
    )
}

fn criterion_5(r: &PresetRun) -> Outcome {
    let ts: Vec<f64> = ["0.8", "0.9", "1.0", "1.1", "1.2"]
        .iter()
        .map(|v| steady_state(&get(r, "gap_scan", v).temp, 0.2).unwrap().value)
        .collect();
    let spread = rel_spread(&ts);
    outcome(spread <= 0.05, format!("T_ss over omega_d in [0.8, 1.2]: {ts:.4?}, dT/T = {:.2}% (<= 5%)", 100.0 * spread))
}

fn criterion_6(r: &PresetRun) -> Outcome {
    let t0_limit = 120f64.ln() / 2.0;
    let mut before = Vec::new();
    let mut after = Vec::new();
    for ((_, v), s) in &r.series {
        let t0: f64 = v.parse().unwrap();
        let t = steady_state(&s.temp, 0.2).unwrap().value;
        if t0 < t0_limit {
            before.push(t);
        } else {
            after.push(t);
        }
    }
    let flat = rel_spread(&before);
    let plateau = before.iter().sum::<f64>() / before.len() as f64;
    let dev = after.iter().map(|t| (t / plateau - 1.0).abs()).fold(0.0, f64::max);
    outcome(
        !before.is_empty() && !after.is_empty() && flat <= 0.10 && dev > 0.10,
        format!(
            "t0 < {t0_limit:.3}: {} points, spread {:.2}% (<= 10%), plateau {plateau:.4}; beyond: {} points, max deviation {:.1}% (> 10%)",
            before.len(),
            100.0 * flat,
            after.len(),
            100.0 * dev
        ),
    )
}

fn single_pass(text: &str) -> f64 {
    run(&load_config(text).unwrap()).unwrap().series[0].occupation
}

fn criterion_7() -> Outcome {
    let base = "[params]\ng = 1/50\nn_reps = 1\ngamma = 17\n";
    let accel = single_pass(base);
    let uniform = single_pass(&format!("{base}[trajectory]\nkind = uniform\nv = 0.5\n"));
    let ratio = uniform.abs() / accel;
    // One mode sits exactly on the supersonic resonance omega_d + omega_k = k v.
    let super_n: Vec<f64> = [10, 20, 40, 80]
        .iter()
        .map(|tp| {
            single_pass(&format!(
                "[params]\ng = 1/50\nn_reps = 1\ngamma = 2\nl = tau\nn = 20\nt_pass = {tp}\n[trajectory]\nkind = uniform\nv = 2\n"
            ))
        })
        .collect();
    let growing = super_n.windows(2).all(|w| w[1] > w[0]);
    outcome(
        ratio <= 1e-4 && growing,
        format!(
            "v = 0.5: n = {uniform:.2e} vs accelerated {accel:.3e}, ratio {ratio:.1e} (<= 1e-4); v = 2 over windows 10..80: [{}] increasing: {growing}",
            super_n.iter().map(|n| format!("{n:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_8(r: &PresetRun) -> Outcome {
    let steady_from = presets::find("fig3").unwrap().base_config().unwrap().protocol.steady_from;
    let osc = |job: &str| {
        let s = get(r, job, "");
        let tail: Vec<f64> = s.t.iter().zip(&s.temp).filter(|(t, _)| **t >= steady_from).map(|(_, x)| *x).collect();
        oscillation_metric(&tail)
    };
    let ratios: Vec<(f64, f64, f64)> = ["0.8", "0.95"]
        .iter()
        .map(|v| {
            let (small, large) = (osc(&format!("small_v{v}")), osc(&format!("large_v{v}")));
            (small, large, small / large)
        })
        .collect();
    let gaps: Vec<f64> = ["0.6", "0.8", "1.0", "1.2", "1.4"]
        .iter()
        .map(|v| {
            let s = get(r, "gap_scan", v);
            s.temp.iter().sum::<f64>() / s.temp.len() as f64
        })
        .collect();
    let spread = rel_spread(&gaps);
    let osc_ok = ratios.iter().all(|r| r.2 >= 2.0);
    outcome(
        spread > 0.20 && osc_ok,
        format!(
            "gap scan T = {gaps:.4?}, spread {:.1}% (> 20%); oscillation small/large: v=0.8 {:.4}/{:.4} = {:.1}x, v=0.95 {:.4}/{:.4} = {:.1}x (>= 2x)",
            100.0 * spread,
            ratios[0].0,
            ratios[0].1,
            ratios[0].2,
            ratios[1].0,
            ratios[1].1,
            ratios[1].2
        ),
    )
}

/// Full joint evolution of a scenario over `[start, t1]`, checking
/// every symplectic eigenvalue along the way and purity at the end.
fn purity_check(cfg: &ScenarioConfig, t1: f64) -> Result<f64, String> {
    let sys = cfg.system().map_err(|e| e.to_string())?;
    let init = initial_state(cfg, &sys);
    let t0 = sys.schedule.window.t0;
    let out = evolve(&sys, &init, t0, t1, &EvolveOptions { check_every: 200, tol: POSITIVITY_TOL, ..Default::default() }).map_err(|e| e.to_string())?;
    let rep = out.state.check_invariants(POSITIVITY_TOL).map_err(|e| e.to_string())?;
    Ok(rep.purity_defect())
}

/// Largest occupation difference between a run and the same run shifted
/// by an arbitrary offset.
fn translation_check(cfg: &ScenarioConfig) -> f64 {
    let a = run(cfg).unwrap();
    let b = run(&cfg.with_override("trajectory.offset", "0.731").unwrap()).unwrap();
    a.series.iter().zip(&b.series).map(|(x, y)| (x.occupation - y.occupation).abs()).fold(0.0, f64::max)
}

fn criterion_9(runs: &[(&Preset, &PresetRun)]) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (p, r) in runs {
        let base = p.base_config().unwrap();
        let mut margin = f64::INFINITY;
        let mut defect: f64 = 0.0;
        for s in r.series.values() {
            margin = margin.min(s.min_margin);
            defect = defect.max(s.channel_defect);
        }
        // Pure initial states only; fig3's large strip is too big for a
        // dense joint covariance, so its small strip is checked over 50 time units.
        let (purity_cfg, t1) = match p.name {
            "fig3" => {
                let c = base.with_override("params.l", "25*tau").unwrap();
                let t0 = c.schedule.start;
                (c, t0 + 50.0)
            }
            _ => (base.clone(), base.schedule.end),
        };
        let purity = purity_check(&purity_cfg, t1);
        let shift_cfg = match p.name {
            "fig3" => base.with_override("protocol.t_end", "40").unwrap().with_override("protocol.steady_from", "0").unwrap(),
            _ => base.with_override("params.n_reps", "3").unwrap(),
        };
        let shift = translation_check(&shift_cfg);
        let pass = r.failures.is_empty()
            && margin >= -1e-9
            && defect <= 1e-6
            && matches!(purity, Ok(d) if d <= PURITY_TOL)
            && shift <= 1e-8
            && r.identical;
        ok &= pass;
        notes.push(format!(
            "{}: runs ok {}, min margin {margin:.2e}, channel defect {defect:.1e}, purity defect {}, shift |dn| {shift:.1e}, identical reruns {}",
            p.name,
            r.failures.is_empty(),
            match &purity {
                Ok(d) => format!("{d:.1e}"),
                Err(e) => e.clone(),
            },
            r.identical
        ));
    }
    outcome(ok, notes.join("; "))
}

#[test]
fn acceptance_criteria() {
    let mut results: Vec<(usize, Outcome)> = vec![(1, criterion_1()), (2, criterion_2()), (3, criterion_3())];
    let names = ["fig1a", "fig1b", "fig2", "fig3"];
    let presets: Vec<&Preset> = names.iter().map(|n| presets::find(n).unwrap()).collect();
    let runs: Vec<PresetRun> = presets.iter().map(|p| run_preset(p)).collect();
    results.push((4, criterion_4(&runs[0])));
    results.push((5, criterion_5(&runs[1])));
    results.push((6, criterion_6(&runs[2])));
    results.push((7, criterion_7()));
    results.push((8, criterion_8(&runs[3])));
    let pairs: Vec<(&Preset, &PresetRun)> = presets.iter().copied().zip(runs.iter()).collect();
    results.push((9, criterion_9(&pairs)));

    println!();
    for (i, o) in &results {
        println!("criterion {i}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<usize> = results.iter().filter(|(_, o)| !o.pass).map(|(i, _)| *i).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
