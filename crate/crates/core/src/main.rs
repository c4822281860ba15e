//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for configuration or usage errors, 2 when a
//! run fails or misses its accuracy target.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use unruh_lab::config::{load_config_file, split_values, ScenarioConfig};
use unruh_lab::output::{emit_table, Formats};
use unruh_lab::presets;
use unruh_lab::scenario::{amplitude_table, dispersion_table, execute, worker_count, IndexEntry, Job, WORKER_CAP_ENV};
use unruh_lab::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "unruh-lab", version, about = "Accelerated atom-dot detector in a condensate phonon field")]
#[command(after_help = "Set UNRUH_LAB_MAX_WORKERS to cap the number of worker threads.")]
struct Cli {
    /// Scenario file (INI-like, see docs/config.md).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; defaults to outputs.dir of the scenario, or the
    /// preset name for presets.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Integration step in 1/w0, overriding protocol.dt.
    #[arg(long, global = true)]
    dt: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario.
    Run,
    /// Run a scenario over a list of values of one parameter.
    Sweep {
        /// Parameter as section.key, e.g. params.gamma; defaults to [sweep] param.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values; defaults to [sweep] values.
        #[arg(long)]
        values: Option<String>,
    },
    /// Run a built-in figure scenario (fig1a, fig1b, fig2, fig3), or `list`.
    Preset {
        name: String,
        /// Run only this job of the preset.
        #[arg(long)]
        job: Option<String>,
    },
    /// Write the dispersion relation of the configured modes.
    Dispersion,
    /// Write first-order transition amplitudes per mode.
    Amplitudes,
    /// Check a scenario file and print its canonical form.
    Validate,
}

/// Like `println!`, but a closed stdout (e.g. piped into `head`) is not an error.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}

fn load(cli: &Cli) -> Result<ScenarioConfig> {
    let path = cli.config.as_deref().ok_or_else(|| Error::Validation("--config is required for this command".into()))?;
    let cfg = load_config_file(path)?;
    match &cli.dt {
        Some(dt) => cfg.with_override("protocol.dt", dt),
        None => Ok(cfg),
    }
}

fn out_dir(cli: &Cli, fallback: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(fallback))
}

fn workers(cli: &Cli) -> Result<usize> {
    if cli.threads == Some(0) {
        return Err(Error::Validation("--threads must be at least 1".into()));
    }
    Ok(worker_count(cli.threads))
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Run => {
            let cfg = load(cli)?;
            let dir = out_dir(cli, &cfg.outputs.dir);
            let job = Job { label: cfg.outputs.label.clone(), config: cfg, sweep: None };
            finish(&dir, &execute(&dir, &[job], workers(cli)?)?)
        }
        Command::Sweep { param, values } => {
            let cfg = load(cli)?;
            let (param, values) = match (param, values, &cfg.sweep) {
                (Some(p), Some(v), _) => (p.clone(), split_values(v)),
                (None, None, Some(s)) => (s.param.clone(), s.values.clone()),
                (None, None, None) => {
                    return Err(Error::Validation("sweep needs --param and --values or a [sweep] section".into()))
                }
                _ => return Err(Error::Validation("--param and --values must be given together".into())),
            };
            let dir = out_dir(cli, &cfg.outputs.dir);
            let job = Job { label: cfg.outputs.label.clone(), config: cfg, sweep: Some((param, values)) };
            finish(&dir, &execute(&dir, &[job], workers(cli)?)?)
        }
        Command::Preset { name, job } => {
            if name == "list" {
                for p in presets::PRESETS {
                    out!("{:<6} {}", p.name, p.description);
                }
                return Ok(ExitCode::SUCCESS);
            }
            let preset = presets::find(name).ok_or_else(|| {
                Error::Validation(format!("unknown preset '{name}'; known: {}", presets::names().join(", ")))
            })?;
            let mut jobs = preset.jobs()?;
            if let Some(label) = job {
                preset.job(label)?;
                jobs.retain(|j| &j.label == label);
            }
            if let Some(dt) = &cli.dt {
                for j in &mut jobs {
                    j.config = j.config.with_override("protocol.dt", dt)?;
                }
            }
            let dir = out_dir(cli, preset.name);
            finish(&dir, &execute(&dir, &jobs, workers(cli)?)?)
        }
        Command::Dispersion => {
            let cfg = load(cli)?;
            let dir = out_dir(cli, &cfg.outputs.dir);
            report(&emit_table(&dir, &format!("{}_dispersion", cfg.outputs.label), &dispersion_table(&cfg)?, formats(&cfg))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Amplitudes => {
            let cfg = load(cli)?;
            let dir = out_dir(cli, &cfg.outputs.dir);
            report(&emit_table(&dir, &format!("{}_amplitudes", cfg.outputs.label), &amplitude_table(&cfg)?, formats(&cfg))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate => {
            let cfg = load(cli)?;
            let _ = write!(std::io::stdout(), "{}", cfg.to_ini());
            eprintln!("ok: sha256 {}", cfg.hash());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn formats(cfg: &ScenarioConfig) -> Formats {
    Formats { dat: cfg.outputs.dat, csv: cfg.outputs.csv }
}

fn report(files: &[PathBuf]) {
    for f in files {
        out!("wrote {}", f.display());
    }
}

fn finish(dir: &Path, index: &[IndexEntry]) -> Result<ExitCode> {
    let mut failed = 0;
    for e in index {
        if e.value == "scan" {
            continue;
        }
        let what = if e.param.is_empty() { e.job.clone() } else { format!("{} {}={}", e.job, e.param, e.value) };
        if e.status == "ok" {
            out!("{what}: T_ss = {:.6}", e.t_ss);
        } else {
            failed += 1;
            eprintln!("{what}: {}", e.status);
        }
    }
    out!("index written to {}", dir.join("index.dat").display());
    if failed > 0 {
        eprintln!("{failed} run(s) failed; cap workers with {WORKER_CAP_ENV} if memory is short");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
