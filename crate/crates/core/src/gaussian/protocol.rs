//! Repeated passes of the detector through the condensate.

use super::channel::{field_variances, PassChannel};
use super::evolve::{evolve, EvolveOptions};
use super::hamiltonian::System;
use super::state::{DetectorState, GaussianState};
use crate::error::{Error, Result};
use crate::thermometry::temperature_from_occupation;

/// Field state at the start of every pass after the first.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FieldReset {
    #[default]
    Vacuum,
    Thermal { temperature: f64 },
    /// Carry the field marginal over; only detector-field correlations are dropped.
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolOptions {
    pub n_reps: usize,
    pub reset: FieldReset,
    /// Run every second pass on the mirrored worldline.
    pub mirrored_return: bool,
    pub dt: Option<f64>,
    pub with_displacement: bool,
    /// Gap used to convert occupations into temperatures.
    pub omega_d: f64,
}

impl ProtocolOptions {
    pub fn new(n_reps: usize, omega_d: f64) -> Self {
        ProtocolOptions { n_reps, reset: FieldReset::Vacuum, mirrored_return: false, dt: None, with_displacement: true, omega_d }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassRecord {
    /// One-based pass index.
    pub pass: usize,
    pub occupation: f64,
    pub temperature: f64,
    /// Detector symplectic eigenvalue minus one; negative values violate
    /// the uncertainty relation.
    pub uncertainty_margin: f64,
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub records: Vec<PassRecord>,
    pub detector: DetectorState,
    /// Largest `|Phi Omega Phi^T - Omega|` over the pass channels used.
    pub channel_defect: f64,
}

impl ProtocolResult {
    pub fn temperatures(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.temperature).collect()
    }
}

/// Run `n_reps` passes over the schedule window, starting from `initial`.
pub fn repeat_protocol(sys: &System, initial: &GaussianState, opts: &ProtocolOptions) -> Result<ProtocolResult> {
    if opts.n_reps == 0 {
        return Err(Error::domain("protocol needs at least one pass"));
    }
    if initial.dim() != sys.dim() {
        return Err(Error::domain(format!("initial state dimension {} does not match system {}", initial.dim(), sys.dim())));
    }
    let (t0, t1) = (sys.schedule.window.t0, sys.schedule.window.t1);
    let mut records = Vec::with_capacity(opts.n_reps);
    let record = |records: &mut Vec<PassRecord>, det: &DetectorState| -> Result<()> {
        let n = det.occupation(opts.with_displacement);
        let temperature = temperature_from_occupation(n.max(0.0), opts.omega_d)?;
        let c = &det.cov;
        let margin = (c[0] * c[3] - c[1] * c[2]).max(0.0).sqrt() - 1.0;
        records.push(PassRecord { pass: records.len() + 1, occupation: n, temperature, uncertainty_margin: margin });
        Ok(())
    };

    if let FieldReset::Keep = opts.reset {
        let mirrored = sys.with_trajectory(sys.trajectory.mirrored());
        let eo = EvolveOptions { dt: opts.dt, with_displacement: opts.with_displacement, ..Default::default() };
        let mut state = initial.clone();
        for p in 0..opts.n_reps {
            let s = if opts.mirrored_return && p % 2 == 1 { &mirrored } else { sys };
            state = evolve(s, &state, t0, t1, &eo)?.state;
            state.drop_detector_correlations();
            record(&mut records, &state.detector())?;
        }
        return Ok(ProtocolResult { detector: state.detector(), records, channel_defect: 0.0 });
    }

    let omegas: Vec<f64> = sys.modes.modes.iter().map(|m| m.omega).collect();
    let variances = match opts.reset {
        FieldReset::Thermal { temperature } => {
            if !(temperature >= 0.0) {
                return Err(Error::domain(format!("field temperature must be non-negative, got {temperature}")));
            }
            field_variances(&omegas, temperature)
        }
        _ => vec![1.0; omegas.len()],
    };
    let forward = PassChannel::compute(sys, t0, t1, opts.dt)?;
    let backward = if opts.mirrored_return && opts.n_reps > 1 {
        Some(PassChannel::compute(&sys.with_trajectory(sys.trajectory.mirrored()), t0, t1, opts.dt)?)
    } else {
        None
    };
    let channel_defect = forward.symplectic_defect().max(backward.as_ref().map_or(0.0, |c| c.symplectic_defect()));

    let mut det = forward.apply(initial);
    record(&mut records, &det)?;
    for p in 1..opts.n_reps {
        let ch = match (&backward, p % 2) {
            (Some(b), 1) => b,
            _ => &forward,
        };
        det = ch.apply_product(&det, &variances);
        record(&mut records, &det)?;
    }
    Ok(ProtocolResult { records, detector: det, channel_defect })
}

/// Detector occupation at each of `times`, for a single pass starting at
/// `t0` from `initial`. Each point is one adjoint sweep, so the cost is
/// linear in the number of modes.
pub fn occupation_series(
    sys: &System,
    initial: &GaussianState,
    t0: f64,
    times: &[f64],
    dt: Option<f64>,
    with_displacement: bool,
) -> Result<Vec<f64>> {
    times
        .iter()
        .map(|&t| {
            if t <= t0 {
                return Ok(initial.detector().occupation(with_displacement));
            }
            Ok(PassChannel::compute(sys, t0, t, dt)?.apply(initial).occupation(with_displacement))
        })
        .collect()
}
