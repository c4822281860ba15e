//! Scenario files.
//!
//! Flat INI-like text: `[section]` headers followed by `key = value` lines.
//! `#` or `;` start a comment (at line start, or after whitespace inside a
//! value). Keys are case-insensitive; unknown sections or keys, duplicates
//! and malformed numbers are rejected with the offending line number.
//! Numeric values may be a product or quotient of literals and the constants
//! `pi` and `tau`, e.g. `tau/20` or `25*tau`. The full grammar, with examples,
//! is in `docs/config.md` at the repository root.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use crate::bogoliubov::{mode_grid_1d, mode_grid_2d, DispersionKind, ModeSet};
use crate::error::{Error, Result};
use crate::gaussian::{CouplingSchedule, FieldReset, MeanField, Modulation, System};
use crate::switching::{RampShape, Regulator, Window};
use crate::trajectory::{Trajectory, TrajectoryKind};
use crate::units::PhysicalParams;

/// Accepted keys, per section.
const SCHEMA: &[(&str, &[&str])] = &[
    ("params", &["c_s", "a", "m", "omega_d", "g", "gamma", "l", "n", "n_reps", "t_pass", "t_bec"]),
    ("modes", &["dimension", "dispersion", "ly", "k_max"]),
    ("trajectory", &["kind", "hold_before_start", "v", "omega_rot", "offset"]),
    ("schedule", &["ramp", "start", "end", "mean_field", "drive_amplitude", "modulation"]),
    (
        "protocol",
        &[
            "mode",
            "field_reset",
            "initial",
            "initial_temperature",
            "mirrored_return",
            "dt",
            "t_end",
            "sample_every",
            "sample_from",
            "steady_fraction",
            "steady_from",
            "with_displacement",
            "error_estimate",
        ],
    ),
    ("outputs", &["dir", "formats", "label"]),
    ("sweep", &["param", "values"]),
];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed but untyped scenario text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        let mut current: Option<String> = None;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with(';') {
                continue;
            }
            if let Some(rest) = t.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(lineno, "section header is missing ']'"))?
                    .trim()
                    .to_ascii_lowercase();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(parse_err(lineno, format!("unknown section [{name}]")));
                }
                raw.sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let (key, value) =
                t.split_once('=').ok_or_else(|| parse_err(lineno, format!("expected 'key = value', got '{t}'")))?;
            let key = key.trim().to_ascii_lowercase();
            let value = strip_comment(value).trim().to_string();
            let section = current.as_ref().ok_or_else(|| parse_err(lineno, "assignment before any section header"))?;
            if key.is_empty() {
                return Err(parse_err(lineno, "empty key"));
            }
            if value.is_empty() {
                return Err(parse_err(lineno, format!("'{key}' has no value")));
            }
            let allowed = SCHEMA.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key.as_str()) {
                return Err(parse_err(lineno, format!("unknown key '{key}' in [{section}]")));
            }
            let map = raw.sections.get_mut(section).expect("section inserted above");
            if let Some(prev) = map.get(&key) {
                return Err(parse_err(lineno, format!("duplicate key '{key}' (first set on line {})", prev.line)));
            }
            map.insert(key, Entry { value, line: lineno });
        }
        Ok(raw)
    }

    /// Override `section.key`, as done by sweeps and command-line flags.
    pub fn set(&mut self, path: &str, value: &str) -> Result<()> {
        let (section, key) = path
            .split_once('.')
            .ok_or_else(|| Error::Validation(format!("parameter '{path}' must look like section.key")))?;
        let (section, key) = (section.trim().to_ascii_lowercase(), key.trim().to_ascii_lowercase());
        let allowed = SCHEMA
            .iter()
            .find(|(s, _)| *s == section)
            .ok_or_else(|| Error::Validation(format!("unknown section '{section}' in '{path}'")))?
            .1;
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Validation(format!("unknown key '{key}' in [{section}]")));
        }
        self.sections.entry(section).or_default().insert(key, Entry { value: value.trim().to_string(), line: 0 });
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|e| e.value.as_str())
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section)?.get(key)
    }

    fn num(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.entry(section, key) {
            None => Ok(default),
            Some(e) => eval_number(&e.value).map_err(|m| located(e, section, key, m)),
        }
    }

    fn opt_num(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.entry(section, key) {
            None => Ok(None),
            Some(e) => eval_number(&e.value).map(Some).map_err(|m| located(e, section, key, m)),
        }
    }

    fn count(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.entry(section, key) {
            None => Ok(default),
            Some(e) => e.value.parse::<usize>().map_err(|_| located(e, section, key, "expected a non-negative integer".into())),
        }
    }

    fn flag(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.entry(section, key) {
            None => Ok(default),
            Some(e) => match e.value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(located(e, section, key, "expected true or false".into())),
            },
        }
    }

    fn word<'a>(&'a self, section: &str, key: &str, default: &'a str) -> (String, Option<&'a Entry>) {
        match self.entry(section, key) {
            None => (default.to_string(), None),
            Some(e) => (e.value.to_ascii_lowercase(), Some(e)),
        }
    }
}

fn strip_comment(v: &str) -> &str {
    let b = v.as_bytes();
    for i in 0..b.len() {
        if (b[i] == b'#' || b[i] == b';') && (i == 0 || b[i - 1].is_ascii_whitespace()) {
            return &v[..i];
        }
    }
    v
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn located(e: &Entry, section: &str, key: &str, msg: String) -> Error {
    if e.line > 0 {
        Error::Parse { line: e.line, msg: format!("{section}.{key}: {msg}") }
    } else {
        Error::Validation(format!("{section}.{key} = '{}': {msg}", e.value))
    }
}

fn bad_choice(e: Option<&Entry>, section: &str, key: &str, got: &str, choices: &str) -> Error {
    let msg = format!("'{got}' is not one of {choices}");
    match e {
        Some(e) => located(e, section, key, msg),
        None => Error::Validation(format!("{section}.{key}: {msg}")),
    }
}

/// Evaluate `factor (('*' | '/') factor)*` with factors that are float
/// literals, `pi` or `tau`. A literal directly followed by a constant
/// (`2pi`) is an implicit product.
pub fn eval_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    let mut acc = 1.0;
    let mut op = '*';
    let mut rest = s;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let v = factor(rest[..end].trim()).ok_or_else(|| format!("cannot read '{s}' as a number"))?;
        acc = if op == '*' { acc * v } else { acc / v };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    if !acc.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(acc)
}

fn factor(f: &str) -> Option<f64> {
    let lower = f.to_ascii_lowercase();
    for (name, c) in [("tau", TAU), ("pi", PI)] {
        if let Some(head) = lower.strip_suffix(name) {
            let head = head.trim();
            return if head.is_empty() {
                Some(c)
            } else if head == "-" {
                Some(-c)
            } else {
                head.parse::<f64>().ok().map(|h| h * c)
            };
        }
    }
    lower.parse::<f64>().ok()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModesSpec {
    pub dimension: usize,
    pub dispersion: DispersionKind,
    /// Transverse box side for `dimension = 2`.
    pub ly: f64,
    /// Shell radius for `dimension = 2`.
    pub k_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryChoice {
    EffectiveUnruh,
    Relativistic,
    Uniform,
    Circular,
}

impl TrajectoryChoice {
    fn name(self) -> &'static str {
        match self {
            TrajectoryChoice::EffectiveUnruh => "effective_unruh",
            TrajectoryChoice::Relativistic => "relativistic",
            TrajectoryChoice::Uniform => "uniform",
            TrajectoryChoice::Circular => "circular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySpec {
    pub kind: TrajectoryChoice,
    /// Effective trajectory only: rest before `t = 0`, then launch.
    pub hold_before_start: bool,
    /// Speed for `uniform` and `circular`.
    pub v: f64,
    /// Angular velocity for `circular`; the radius is `v / omega_rot`.
    pub omega_rot: f64,
    /// Rigid shift along the first axis.
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSpec {
    pub ramp: RampShape,
    pub start: f64,
    pub end: f64,
    pub drive_amplitude: Option<f64>,
    pub proper_time_modulation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Repeated passes over the window; one record per pass.
    Passes,
    /// A single long pass sampled every `sample_every`.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSpec {
    pub mode: RunMode,
    pub field_reset: FieldReset,
    /// Initial detector temperature; 0 is the vacuum.
    pub initial_temperature: f64,
    pub mirrored_return: bool,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub sample_every: f64,
    /// First sample time of a continuous run.
    pub sample_from: f64,
    pub steady_fraction: f64,
    pub steady_from: f64,
    pub with_displacement: bool,
    pub error_estimate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: String,
    pub dat: bool,
    pub csv: bool,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<String>,
}

/// A fully validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: PhysicalParams,
    pub modes: ModesSpec,
    pub trajectory: TrajectorySpec,
    pub schedule: ScheduleSpec,
    pub protocol: ProtocolSpec,
    pub outputs: OutputSpec,
    pub sweep: Option<SweepSpec>,
    /// The text the scenario was resolved from, with overrides applied.
    pub raw: RawConfig,
}

/// Parse and validate scenario text.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    ScenarioConfig::from_raw(RawConfig::parse(text)?)
}

/// Parse and validate a scenario file.
pub fn load_config_file(path: &std::path::Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    load_config(&text)
}

impl ScenarioConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let d = PhysicalParams::default();
        let params = PhysicalParams {
            c_s: raw.num("params", "c_s", d.c_s)?,
            a: raw.num("params", "a", d.a)?,
            m: raw.num("params", "m", d.m)?,
            omega_d: raw.num("params", "omega_d", d.omega_d)?,
            delta: raw.num("params", "omega_d", d.omega_d)?,
            g: raw.num("params", "g", d.g)?,
            gamma: raw.num("params", "gamma", d.gamma)?,
            l: raw.num("params", "l", d.l)?,
            n_modes: raw.count("params", "n", d.n_modes)?,
            n_reps: raw.count("params", "n_reps", d.n_reps)?,
            t_pass: raw.num("params", "t_pass", d.t_pass)?,
            t_bec: raw.num("params", "t_bec", d.t_bec)?,
        };
        params.validate()?;

        let dimension = raw.count("modes", "dimension", 1)?;
        let (disp, e) = raw.word("modes", "dispersion", "linear_cutoff");
        let dispersion = match disp.as_str() {
            "linear_cutoff" => DispersionKind::LinearCutoff,
            "full_bogoliubov" => DispersionKind::FullBogoliubov,
            other => return Err(bad_choice(e, "modes", "dispersion", other, "linear_cutoff, full_bogoliubov")),
        };
        let modes = ModesSpec { dimension, dispersion, ly: raw.num("modes", "ly", params.l)?, k_max: raw.num("modes", "k_max", 0.0)? };
        if !(1..=2).contains(&dimension) {
            return Err(Error::Validation(format!("modes.dimension must be 1 or 2, got {dimension}")));
        }

        let (kind, e) = raw.word("trajectory", "kind", "effective_unruh");
        let kind = match kind.as_str() {
            "effective_unruh" => TrajectoryChoice::EffectiveUnruh,
            "relativistic" => TrajectoryChoice::Relativistic,
            "uniform" => TrajectoryChoice::Uniform,
            "circular" => TrajectoryChoice::Circular,
            other => {
                return Err(bad_choice(e, "trajectory", "kind", other, "effective_unruh, relativistic, uniform, circular"))
            }
        };
        let trajectory = TrajectorySpec {
            kind,
            hold_before_start: raw.flag("trajectory", "hold_before_start", true)?,
            v: raw.num("trajectory", "v", 0.0)?,
            omega_rot: raw.num("trajectory", "omega_rot", 1.0)?,
            offset: raw.num("trajectory", "offset", 0.0)?,
        };

        let (ramp, e) = raw.word("schedule", "ramp", "gaussian");
        let ramp = RampShape::parse(&ramp).ok_or_else(|| bad_choice(e, "schedule", "ramp", &ramp, "gaussian, sin2"))?;
        // Default layout: full coupling over [0, t_pass], edges outside it.
        let edge = match ramp {
            RampShape::Gaussian => 2.0 * params.gamma,
            RampShape::SinSquared => params.gamma,
        };
        let (mf, e) = raw.word("schedule", "mean_field", "cancelled");
        let drive_amplitude = match mf.as_str() {
            "cancelled" => None,
            "drive" => Some(raw.num("schedule", "drive_amplitude", 0.0)?),
            other => return Err(bad_choice(e, "schedule", "mean_field", other, "cancelled, drive")),
        };
        let (modulation, e) = raw.word("schedule", "modulation", "constant");
        let proper_time_modulation = match modulation.as_str() {
            "constant" => false,
            "proper_time" => true,
            other => return Err(bad_choice(e, "schedule", "modulation", other, "constant, proper_time")),
        };
        let schedule = ScheduleSpec {
            ramp,
            start: raw.num("schedule", "start", -edge)?,
            end: raw.num("schedule", "end", params.t_pass + edge)?,
            drive_amplitude,
            proper_time_modulation,
        };

        let (mode, e) = raw.word("protocol", "mode", "passes");
        let mode = match mode.as_str() {
            "passes" => RunMode::Passes,
            "continuous" => RunMode::Continuous,
            other => return Err(bad_choice(e, "protocol", "mode", other, "passes, continuous")),
        };
        let (reset, e) = raw.word("protocol", "field_reset", "vacuum");
        let field_reset = match reset.as_str() {
            "vacuum" => FieldReset::Vacuum,
            "thermal" => FieldReset::Thermal { temperature: params.t_bec },
            "keep" => FieldReset::Keep,
            other => return Err(bad_choice(e, "protocol", "field_reset", other, "vacuum, thermal, keep")),
        };
        let (initial, e) = raw.word("protocol", "initial", "vacuum");
        let initial_temperature = match initial.as_str() {
            "vacuum" => 0.0,
            "thermal" => {
                let t = raw.opt_num("protocol", "initial_temperature")?.ok_or_else(|| {
                    Error::Validation("protocol.initial = thermal needs protocol.initial_temperature".into())
                })?;
                if !(t > 0.0) {
                    return Err(Error::Validation(format!("protocol.initial_temperature must be positive, got {t}")));
                }
                t
            }
            other => return Err(bad_choice(e, "protocol", "initial", other, "vacuum, thermal")),
        };
        let t_end = raw.num("protocol", "t_end", schedule.end)?;
        let protocol = ProtocolSpec {
            mode,
            field_reset,
            initial_temperature,
            mirrored_return: raw.flag("protocol", "mirrored_return", false)?,
            dt: raw.opt_num("protocol", "dt")?,
            t_end,
            sample_every: raw.num("protocol", "sample_every", TAU / params.omega_d)?,
            sample_from: raw.num("protocol", "sample_from", schedule.start.max(0.0))?,
            steady_fraction: raw.num("protocol", "steady_fraction", 0.2)?,
            steady_from: raw.num("protocol", "steady_from", 0.5 * (schedule.start.max(0.0) + t_end))?,
            with_displacement: raw.flag("protocol", "with_displacement", true)?,
            error_estimate: raw.flag("protocol", "error_estimate", true)?,
        };

        let (formats, _) = raw.word("outputs", "formats", "dat, csv");
        let mut dat = false;
        let mut csv = false;
        for f in formats.split(',').map(str::trim) {
            match f {
                "dat" => dat = true,
                "csv" => csv = true,
                other => {
                    return Err(bad_choice(raw.entry("outputs", "formats"), "outputs", "formats", other, "dat, csv"))
                }
            }
        }
        let outputs = OutputSpec {
            dir: raw.get("outputs", "dir").unwrap_or(".").to_string(),
            dat,
            csv,
            label: raw.get("outputs", "label").unwrap_or("run").to_string(),
        };
        if outputs.label.is_empty() || outputs.label.contains(['/', '\\']) {
            return Err(Error::Validation(format!("outputs.label '{}' must be a plain file stem", outputs.label)));
        }

        let sweep = match (raw.get("sweep", "param"), raw.get("sweep", "values")) {
            (None, None) => None,
            (Some(p), Some(v)) => Some(SweepSpec { param: p.to_string(), values: split_values(v) }),
            _ => return Err(Error::Validation("[sweep] needs both param and values".into())),
        };

        let cfg = ScenarioConfig { params, modes, trajectory, schedule, protocol, outputs, sweep, raw };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Cross-field preconditions; also builds the mode grid and system once
    /// so that any module precondition fails here rather than mid-run.
    fn validate(&self) -> Result<()> {
        let s = &self.schedule;
        let p = &self.protocol;
        if !(s.end > s.start) {
            return Err(Error::Validation(format!("schedule window [{}, {}] is empty", s.start, s.end)));
        }
        if let Some(dt) = p.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Validation(format!("protocol.dt must be positive, got {dt}")));
            }
        }
        if !(p.steady_fraction > 0.0 && p.steady_fraction <= 1.0) {
            return Err(Error::Validation(format!("protocol.steady_fraction must lie in (0, 1], got {}", p.steady_fraction)));
        }
        if p.mode == RunMode::Continuous {
            if !(p.t_end > s.start) {
                return Err(Error::Validation(format!("protocol.t_end {} must follow the window start {}", p.t_end, s.start)));
            }
            if !(p.sample_every > 0.0) {
                return Err(Error::Validation(format!("protocol.sample_every must be positive, got {}", p.sample_every)));
            }
            if !(p.sample_from >= s.start && p.sample_from <= p.t_end) {
                return Err(Error::Validation(format!(
                    "protocol.sample_from {} must lie in [{}, {}]",
                    p.sample_from, s.start, p.t_end
                )));
            }
            if p.t_end > s.end {
                return Err(Error::Validation(format!("protocol.t_end {} lies beyond the window end {}", p.t_end, s.end)));
            }
        }
        let t = &self.trajectory;
        match t.kind {
            TrajectoryChoice::Uniform if !t.v.is_finite() => {
                return Err(Error::Validation("trajectory.v must be finite".into()))
            }
            TrajectoryChoice::Circular if !(t.v > 0.0 && t.omega_rot > 0.0) => {
                return Err(Error::Validation("circular trajectory needs v > 0 and omega_rot > 0".into()))
            }
            TrajectoryChoice::EffectiveUnruh if !t.hold_before_start => {
                // Before t = 0 the pure path moves at c_s (1 - exp(-a t)).
                let speed = self.params.c_s * (-self.params.a * s.start).exp_m1();
                if speed > 9.0 * self.params.c_s {
                    return Err(Error::Validation(format!(
                        "effective trajectory without hold reaches speed {speed:.3e} at the window start {}; \
                         start the window after {:.4} or set hold_before_start = true",
                        s.start,
                        -(10f64).ln() / self.params.a
                    )));
                }
            }
            _ => {}
        }
        if self.modes.dimension == 2 && !(self.modes.k_max > 0.0) {
            return Err(Error::Validation("modes.dimension = 2 needs modes.k_max > 0".into()));
        }
        self.system()?;
        Ok(())
    }

    pub fn mode_set(&self) -> Result<ModeSet> {
        let p = &self.params;
        match self.modes.dimension {
            1 => mode_grid_1d(p.l, p.n_modes, p.c_s, p.m, self.modes.dispersion),
            _ => mode_grid_2d(p.l, self.modes.ly, self.modes.k_max, p.c_s, p.m, self.modes.dispersion),
        }
    }

    pub fn build_trajectory(&self) -> Result<Trajectory> {
        let p = &self.params;
        let t = &self.trajectory;
        let traj = match t.kind {
            TrajectoryChoice::EffectiveUnruh => {
                Trajectory::new(TrajectoryKind::EffectiveUnruh { a: p.a, c_s: p.c_s, hold_before_start: t.hold_before_start })
            }
            TrajectoryChoice::Relativistic => Trajectory::relativistic(p.a, p.c_s),
            TrajectoryChoice::Uniform => Trajectory::uniform(t.v),
            TrajectoryChoice::Circular => Trajectory::circular(t.v / t.omega_rot, t.omega_rot),
        }?;
        Ok(if t.offset != 0.0 { traj.shifted([t.offset, 0.0]) } else { traj })
    }

    pub fn window(&self) -> Result<Window> {
        let reg = if self.params.gamma > 0.0 {
            Regulator::Ramp { gamma: self.params.gamma, shape: self.schedule.ramp }
        } else {
            Regulator::None
        };
        Window::new(self.schedule.start, self.schedule.end, reg).map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn system(&self) -> Result<System> {
        let mut sched = CouplingSchedule::new(self.params.g, self.window()?);
        if let Some(amplitude) = self.schedule.drive_amplitude {
            sched.mean_field = MeanField::Drive { amplitude };
        }
        if self.schedule.proper_time_modulation {
            sched.modulation = Modulation::ProperTime { a: self.params.a, c_s: self.params.c_s };
        }
        System::new(self.mode_set()?, self.build_trajectory()?, self.params.omega_d, sched)
            .map_err(|e| Error::Validation(e.to_string()))
    }

    /// A copy with `section.key = value` applied and revalidated.
    pub fn with_override(&self, path: &str, value: &str) -> Result<Self> {
        let mut raw = self.raw.clone();
        raw.set(path, value)?;
        Self::from_raw(raw)
    }

    /// Canonical text with every default written out. Reloading it yields an
    /// equal configuration.
    pub fn to_ini(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(s, "[params]");
        for (k, v) in [
            ("c_s", p.c_s),
            ("a", p.a),
            ("m", p.m),
            ("omega_d", p.omega_d),
            ("g", p.g),
            ("gamma", p.gamma),
            ("l", p.l),
            ("t_pass", p.t_pass),
            ("t_bec", p.t_bec),
        ] {
            let _ = writeln!(s, "{k} = {}", fmt_f(v));
        }
        let _ = writeln!(s, "n = {}\nn_reps = {}", p.n_modes, p.n_reps);
        let m = &self.modes;
        let _ = writeln!(
            s,
            "\n[modes]\ndimension = {}\ndispersion = {}\nly = {}\nk_max = {}",
            m.dimension,
            m.dispersion.name(),
            fmt_f(m.ly),
            fmt_f(m.k_max)
        );
        let t = &self.trajectory;
        let _ = writeln!(
            s,
            "\n[trajectory]\nkind = {}\nhold_before_start = {}\nv = {}\nomega_rot = {}\noffset = {}",
            t.kind.name(),
            t.hold_before_start,
            fmt_f(t.v),
            fmt_f(t.omega_rot),
            fmt_f(t.offset)
        );
        let sc = &self.schedule;
        let _ = writeln!(s, "\n[schedule]\nramp = {}\nstart = {}\nend = {}", sc.ramp.name(), fmt_f(sc.start), fmt_f(sc.end));
        match sc.drive_amplitude {
            None => {
                let _ = writeln!(s, "mean_field = cancelled");
            }
            Some(a) => {
                let _ = writeln!(s, "mean_field = drive\ndrive_amplitude = {}", fmt_f(a));
            }
        }
        let _ = writeln!(s, "modulation = {}", if sc.proper_time_modulation { "proper_time" } else { "constant" });
        let pr = &self.protocol;
        let _ = writeln!(
            s,
            "\n[protocol]\nmode = {}\nfield_reset = {}",
            match pr.mode {
                RunMode::Passes => "passes",
                RunMode::Continuous => "continuous",
            },
            match pr.field_reset {
                FieldReset::Vacuum => "vacuum",
                FieldReset::Thermal { .. } => "thermal",
                FieldReset::Keep => "keep",
            }
        );
        if pr.initial_temperature > 0.0 {
            let _ = writeln!(s, "initial = thermal\ninitial_temperature = {}", fmt_f(pr.initial_temperature));
        } else {
            let _ = writeln!(s, "initial = vacuum");
        }
        let _ = writeln!(s, "mirrored_return = {}", pr.mirrored_return);
        if let Some(dt) = pr.dt {
            let _ = writeln!(s, "dt = {}", fmt_f(dt));
        }
        for (k, v) in [
            ("t_end", pr.t_end),
            ("sample_every", pr.sample_every),
            ("sample_from", pr.sample_from),
            ("steady_fraction", pr.steady_fraction),
            ("steady_from", pr.steady_from),
        ] {
            let _ = writeln!(s, "{k} = {}", fmt_f(v));
        }
        let _ = writeln!(s, "with_displacement = {}\nerror_estimate = {}", pr.with_displacement, pr.error_estimate);
        let o = &self.outputs;
        let mut formats = Vec::new();
        if o.dat {
            formats.push("dat");
        }
        if o.csv {
            formats.push("csv");
        }
        let _ = writeln!(s, "\n[outputs]\ndir = {}\nformats = {}\nlabel = {}", o.dir, formats.join(", "), o.label);
        if let Some(sw) = &self.sweep {
            let _ = writeln!(s, "\n[sweep]\nparam = {}\nvalues = {}", sw.param, sw.values.join(", "));
        }
        s
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.to_ini().as_bytes()))
    }
}

/// Shortest text that reads back to the same `f64`.
fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

/// Split a comma-separated list of values.
pub fn split_values(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}
