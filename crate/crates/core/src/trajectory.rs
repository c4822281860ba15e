//! Detector worldlines in the lab frame of the condensate.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

type PathFn = dyn Fn(f64) -> ([f64; 2], [f64; 2]) + Send + Sync;

#[derive(Clone)]
pub enum TrajectoryKind {
    /// `x = v t` along the first axis.
    Uniform { v: f64 },
    /// `x = c_s t + (c_s^2/a) exp(-a t / c_s)`, whose Doppler factor is exactly
    /// `exp(-a t / c_s)`. With `hold_before_start` the dot rests at `c_s^2/a`
    /// for `t < 0` and is launched at `t = 0` with zero velocity.
    EffectiveUnruh { a: f64, c_s: f64, hold_before_start: bool },
    /// Hyperbolic worldline `x = c sqrt(t^2 + c^2/a^2)`.
    Relativistic { a: f64, c: f64 },
    /// Circle of radius `r` about the origin at angular velocity `omega_rot`.
    Circular { r: f64, omega_rot: f64 },
    /// Arbitrary path returning `(position, velocity)`.
    Custom(Arc<PathFn>),
}

impl fmt::Debug for TrajectoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrajectoryKind::Uniform { v } => f.debug_struct("Uniform").field("v", v).finish(),
            TrajectoryKind::EffectiveUnruh { a, c_s, hold_before_start } => f
                .debug_struct("EffectiveUnruh")
                .field("a", a)
                .field("c_s", c_s)
                .field("hold_before_start", hold_before_start)
                .finish(),
            TrajectoryKind::Relativistic { a, c } => {
                f.debug_struct("Relativistic").field("a", a).field("c", c).finish()
            }
            TrajectoryKind::Circular { r, omega_rot } => {
                f.debug_struct("Circular").field("r", r).field("omega_rot", omega_rot).finish()
            }
            TrajectoryKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A worldline, rigidly translated by `offset`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub offset: [f64; 2],
}

impl Trajectory {
    pub fn new(kind: TrajectoryKind) -> Result<Self> {
        match &kind {
            TrajectoryKind::Uniform { v } if !(v.is_finite()) => {
                return Err(Error::domain("uniform velocity must be finite"))
            }
            TrajectoryKind::EffectiveUnruh { a, c_s, .. } if !(*a > 0.0 && *c_s > 0.0) => {
                return Err(Error::domain("effective trajectory needs a > 0 and c_s > 0"))
            }
            TrajectoryKind::Relativistic { a, c } if !(*a > 0.0 && *c > 0.0) => {
                return Err(Error::domain("relativistic trajectory needs a > 0 and c > 0"))
            }
            TrajectoryKind::Circular { r, omega_rot } if !(*r > 0.0 && omega_rot.is_finite()) => {
                return Err(Error::domain("circular trajectory needs r > 0"))
            }
            _ => {}
        }
        Ok(Trajectory { kind, offset: [0.0, 0.0] })
    }

    pub fn uniform(v: f64) -> Result<Self> {
        Self::new(TrajectoryKind::Uniform { v })
    }

    pub fn effective_unruh(a: f64, c_s: f64) -> Result<Self> {
        Self::new(TrajectoryKind::EffectiveUnruh { a, c_s, hold_before_start: false })
    }

    /// Effective trajectory with the dot held at rest before `t = 0`.
    pub fn launched_unruh(a: f64, c_s: f64) -> Result<Self> {
        Self::new(TrajectoryKind::EffectiveUnruh { a, c_s, hold_before_start: true })
    }

    pub fn relativistic(a: f64, c: f64) -> Result<Self> {
        Self::new(TrajectoryKind::Relativistic { a, c })
    }

    pub fn circular(r: f64, omega_rot: f64) -> Result<Self> {
        Self::new(TrajectoryKind::Circular { r, omega_rot })
    }

    pub fn custom(f: impl Fn(f64) -> ([f64; 2], [f64; 2]) + Send + Sync + 'static) -> Self {
        Trajectory { kind: TrajectoryKind::Custom(Arc::new(f)), offset: [0.0, 0.0] }
    }

    pub fn shifted(&self, by: [f64; 2]) -> Self {
        Trajectory { kind: self.kind.clone(), offset: [self.offset[0] + by[0], self.offset[1] + by[1]] }
    }

    /// The same path reflected through the origin, as on a return leg.
    pub fn mirrored(&self) -> Self {
        let base = self.clone();
        Trajectory::custom(move |t| {
            let (x, v) = base.state(t);
            ([-x[0], -x[1]], [-v[0], -v[1]])
        })
    }

    pub fn position(&self, t: f64) -> [f64; 2] {
        self.state(t).0
    }

    pub fn velocity(&self, t: f64) -> [f64; 2] {
        self.state(t).1
    }

    pub fn speed(&self, t: f64) -> f64 {
        let v = self.velocity(t);
        v[0].hypot(v[1])
    }

    /// Position and velocity at lab time `t`.
    pub fn state(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        let (x, v) = match &self.kind {
            TrajectoryKind::Uniform { v } => ([v * t, 0.0], [*v, 0.0]),
            TrajectoryKind::EffectiveUnruh { a, c_s, hold_before_start } => {
                if *hold_before_start && t < 0.0 {
                    ([c_s * c_s / a, 0.0], [0.0, 0.0])
                } else {
                    (
                        [effective_unruh_position(t, *a, *c_s), 0.0],
                        [effective_unruh_velocity(t, *a, *c_s), 0.0],
                    )
                }
            }
            TrajectoryKind::Relativistic { a, c } => {
                let s = (t * t + c * c / (a * a)).sqrt();
                ([c * s, 0.0], [c * t / s, 0.0])
            }
            TrajectoryKind::Circular { r, omega_rot } => {
                let (s, c) = (omega_rot * t).sin_cos();
                ([r * c, r * s], [-r * omega_rot * s, r * omega_rot * c])
            }
            TrajectoryKind::Custom(f) => f(t),
        };
        ([x[0] + self.offset[0], x[1] + self.offset[1]], v)
    }
}

pub fn effective_unruh_position(t: f64, a: f64, c_s: f64) -> f64 {
    c_s * t + c_s * c_s / a * (-a * t / c_s).exp()
}

pub fn effective_unruh_velocity(t: f64, a: f64, c_s: f64) -> f64 {
    -c_s * (-a * t / c_s).exp_m1()
}

pub fn relativistic_position(t: f64, a: f64, c: f64) -> f64 {
    c * (t * t + c * c / (a * a)).sqrt()
}

/// `|x_eff(t) - x_rel(t)|` with `c = c_s`.
pub fn trajectory_deviation(t: f64, a: f64, c_s: f64) -> f64 {
    (effective_unruh_position(t, a, c_s) - relativistic_position(t, a, c_s)).abs()
}

/// Frequency of a mode travelling along the direction of motion, as seen by the dot.
pub fn doppler_shift(traj: &Trajectory, omega0: f64, t: f64, c_s: f64) -> f64 {
    match traj.kind {
        // exp(-a t / c_s) directly, so the identity holds to machine precision
        TrajectoryKind::EffectiveUnruh { a, c_s: cs, hold_before_start } if !(hold_before_start && t < 0.0) => {
            omega0 * (-a * t / cs).exp()
        }
        _ => omega0 * (1.0 - traj.speed(t) / c_s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlePoint {
    pub center: f64,
    pub half_width: f64,
}

/// Time at which a mode of frequency `omega` dominates the emission amplitude.
pub fn saddle_point_time(omega: f64, omega_d: f64, a: f64, c_s: f64) -> Result<SaddlePoint> {
    if !(omega > 0.0) || !(omega_d > 0.0) || !(a > 0.0) {
        return Err(Error::domain("saddle point needs positive frequencies and acceleration"));
    }
    Ok(SaddlePoint { center: c_s / a * (omega / omega_d).ln(), half_width: 1.0 / (omega_d * a).sqrt() })
}

pub fn circular_position(t: f64, r: f64, omega_rot: f64) -> [f64; 2] {
    let (s, c) = (omega_rot * t).sin_cos();
    [r * c, r * s]
}

/// `d tau / d t` of the hyperbolic worldline, normalised to one at `t = 0`.
pub fn proper_time_rate(t: f64, a: f64, c_s: f64) -> f64 {
    let t0 = c_s / a;
    t0 / (t * t + t0 * t0).sqrt()
}

/// Period of a circular trajectory.
pub fn rotation_period(omega_rot: f64) -> f64 {
    2.0 * PI / omega_rot.abs()
}
