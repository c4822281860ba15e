//! Built-in scenarios reproducing the published figures.
//!
//! Each preset is a base scenario text plus a list of jobs, every job being
//! a set of overrides on the base and optionally a one-parameter sweep.

use crate::config::{load_config, RawConfig, ScenarioConfig};
use crate::error::{Error, Result};
use crate::scenario::Job;

#[derive(Debug, Clone, Copy)]
pub struct JobSpec {
    pub label: &'static str,
    pub overrides: &'static [(&'static str, &'static str)],
    pub sweep: Option<(&'static str, &'static [&'static str])>,
}

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub base: &'static str,
    pub jobs: &'static [JobSpec],
}

const FIG1A_BASE: &str = "\
# Thermalization of the accelerated detector for several smearing times.
[params]
a = 2
c_s = 1
omega_d = 1
g = 1/50
n = 20
l = tau/20          # chosen, not from paper: lowest mode at omega = 20
m = 1e6             # chosen, not from paper: effectively no dispersion cutoff
t_pass = 4          # chosen, not from paper
n_reps = 150        # chosen, not from paper
gamma = 17

[modes]
dispersion = linear_cutoff

[trajectory]
kind = effective_unruh
hold_before_start = true   # chosen, not from paper: launch at t = 0

[schedule]
ramp = gaussian

[protocol]
mode = passes
field_reset = vacuum
";

const FIG1B_BASE: &str = "\
# Steady temperature against the detector gap.
[params]
a = 2
c_s = 1
omega_d = 1
g = 1/50
n = 20
l = tau/20          # chosen, not from paper
m = 1e6             # chosen, not from paper
t_pass = 4          # chosen, not from paper
n_reps = 150        # chosen, not from paper
gamma = 25          # chosen, not from paper: suppresses switch-off leakage at small gaps

[trajectory]
kind = effective_unruh
hold_before_start = true   # chosen, not from paper

[schedule]
ramp = gaussian

[protocol]
mode = passes
";

const FIG2_BASE: &str = "\
# Steady temperature against the interaction time with the full dispersion.
[params]
a = 2
c_s = 1
omega_d = 1
m = 500
gamma = 0
g = 0.02            # chosen, not from paper
n = 40              # chosen, not from paper
l = tau/10          # chosen, not from paper
n_reps = 300        # chosen, not from paper
t_pass = 2

[modes]
dispersion = full_bogoliubov

[trajectory]
kind = effective_unruh
hold_before_start = true   # chosen, not from paper

[schedule]
ramp = gaussian

[protocol]
mode = passes
";

const FIG3_BASE: &str = "\
# Circular motion in a finite strip: thermalization and finite-size echoes.
[params]
c_s = 1
omega_d = 1
m = 1e6             # chosen, not from paper
g = 0.1             # chosen, not from paper
gamma = 5           # chosen, not from paper
l = 125*tau
t_pass = 400        # chosen, not from paper

[modes]
dimension = 2
dispersion = linear_cutoff
ly = 2              # chosen, not from paper: narrow transverse strip
k_max = 3           # chosen, not from paper

[trajectory]
kind = circular
v = 0.95            # chosen, not from paper
omega_rot = 1       # chosen, not from paper

[schedule]
ramp = gaussian

[protocol]
mode = continuous
t_end = 400
sample_every = 2*tau
sample_from = 0
steady_from = 200   # chosen, not from paper
";

const FIG1A_GAMMAS: &[&str] = &["1", "3", "7", "12", "17", "25"]; // chosen, not from paper
const FIG1B_GAPS: &[&str] = &["0.7", "0.8", "0.9", "1.0", "1.1", "1.2", "1.3"]; // chosen, not from paper
const FIG2_TIMES: &[&str] = &["1.4", "1.7", "2.0", "2.2", "2.6", "2.8", "3.0", "3.2", "3.5", "4.0", "4.5"]; // chosen, not from paper
const FIG3_GAPS: &[&str] = &["0.6", "0.8", "1.0", "1.2", "1.4"]; // chosen, not from paper

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1a",
        description: "steady temperature against smearing time, plus heating and cooling curves at gamma = 17",
        base: FIG1A_BASE,
        jobs: &[
            JobSpec { label: "gamma_scan", overrides: &[], sweep: Some(("params.gamma", FIG1A_GAMMAS)) },
            JobSpec { label: "heating", overrides: &[], sweep: None },
            JobSpec {
                label: "cooling",
                // chosen, not from paper: start at twice the expected temperature
                overrides: &[("protocol.initial", "thermal"), ("protocol.initial_temperature", "2/pi")],
                sweep: None,
            },
        ],
    },
    Preset {
        name: "fig1b",
        description: "steady temperature against the detector gap",
        base: FIG1B_BASE,
        jobs: &[JobSpec { label: "gap_scan", overrides: &[], sweep: Some(("params.omega_d", FIG1B_GAPS)) }],
    },
    Preset {
        name: "fig2",
        description: "steady temperature against interaction time, full dispersion, abrupt switching",
        base: FIG2_BASE,
        jobs: &[JobSpec { label: "t0_scan", overrides: &[], sweep: Some(("params.t_pass", FIG2_TIMES)) }],
    },
    Preset {
        name: "fig3",
        description: "circular motion in a large and a small strip, plus a gap scan",
        base: FIG3_BASE,
        jobs: &[
            JobSpec { label: "large_v0.8", overrides: &[("trajectory.v", "0.8")], sweep: None },
            JobSpec { label: "large_v0.95", overrides: &[], sweep: None },
            JobSpec { label: "small_v0.8", overrides: &[("params.l", "25*tau"), ("trajectory.v", "0.8")], sweep: None },
            JobSpec { label: "small_v0.95", overrides: &[("params.l", "25*tau")], sweep: None },
            JobSpec {
                label: "gap_scan",
                // chosen, not from paper: a short late window keeps the scan cheap
                overrides: &[
                    ("protocol.sample_from", "300"),
                    ("protocol.sample_every", "25"),
                    ("protocol.steady_from", "300"),
                ],
                sweep: Some(("params.omega_d", FIG3_GAPS)),
            },
        ],
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

impl Preset {
    pub fn base_config(&self) -> Result<ScenarioConfig> {
        load_config(self.base)
    }

    /// Resolved configuration of one job, without its sweep.
    pub fn job_config(&self, spec: &JobSpec) -> Result<ScenarioConfig> {
        let mut raw = RawConfig::parse(self.base)?;
        for (k, v) in spec.overrides {
            raw.set(k, v)?;
        }
        raw.set("outputs.label", spec.label)?;
        ScenarioConfig::from_raw(raw)
    }

    pub fn jobs(&self) -> Result<Vec<Job>> {
        self.jobs
            .iter()
            .map(|s| {
                let config = self.job_config(s)?;
                let sweep = s.sweep.map(|(p, vs)| (p.to_string(), vs.iter().map(|v| v.to_string()).collect()));
                Ok(Job { label: s.label.to_string(), config, sweep })
            })
            .collect()
    }

    pub fn job(&self, label: &str) -> Result<&JobSpec> {
        self.jobs
            .iter()
            .find(|j| j.label == label)
            .ok_or_else(|| Error::Validation(format!("preset {} has no job '{label}'", self.name)))
    }
}
