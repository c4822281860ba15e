//! Fixed-step integration of the mean vector and covariance:
//! `r' = A r + Omega c`, `S' = A S + S A^T`. Each step applies the symplectic
//! two-stage Gauss-Legendre map `M` as `r <- M r + m`, `S <- M S M^T`.
//!
//! Steps are taken in the interaction picture of the free Hamiltonian; the
//! state is rotated in at `t0` and back out at `t1`. Recorded occupations
//! are unaffected by the rotation.

use nalgebra::{DMatrix, DVector};

use super::hamiltonian::{rotate_state, System};
use super::state::GaussianState;
use super::step::GaussStep;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Step size; `None` uses the system default.
    pub dt: Option<f64>,
    /// Record the detector occupation every `stride` steps (0 disables).
    pub stride: usize,
    /// Full invariant check every this many steps (0 disables). The cheap
    /// detector-block check runs at every step regardless.
    pub check_every: usize,
    pub tol: f64,
    /// Include the coherent displacement in recorded occupations.
    pub with_displacement: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { dt: None, stride: 0, check_every: 0, tol: 1e-8, with_displacement: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub t: f64,
    pub occupation: f64,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: GaussianState,
    pub series: Vec<SeriesPoint>,
    pub steps: usize,
    pub dt: f64,
}

/// Number of steps and exact step size covering `[t0, t1]` with steps no
/// longer than `dt`.
pub fn step_grid(t0: f64, t1: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!("time step must be positive, got {dt}")));
    }
    if !(t1 >= t0) {
        return Err(Error::domain(format!("time range [{t0}, {t1}] is reversed")));
    }
    let n = ((t1 - t0) / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((n, (t1 - t0) / n as f64))
}

fn detector_block_ok(cov: &DMatrix<f64>, tol: f64) -> bool {
    let (a, b, c) = (cov[(0, 0)], 0.5 * (cov[(0, 1)] + cov[(1, 0)]), cov[(1, 1)]);
    a.is_finite() && c.is_finite() && a > 0.0 && a * c - b * b >= 1.0 - tol
}

/// Integrate `state` over `[t0, t1]`.
pub fn evolve(sys: &System, state: &GaussianState, t0: f64, t1: f64, opts: &EvolveOptions) -> Result<Evolution> {
    let d = sys.dim();
    if state.dim() != d {
        return Err(Error::domain(format!("state dimension {} does not match system {d}", state.dim())));
    }
    let (n, h) = step_grid(t0, t1, opts.dt.unwrap_or_else(|| sys.default_dt()))?;
    let mut mean = state.means.clone();
    let mut cov = state.cov.clone();
    rotate_state(sys, t0, true, &mut mean, &mut cov);
    let occ = |m: &DVector<f64>, c: &DMatrix<f64>| {
        let mut o = 0.25 * (c[(0, 0)] + c[(1, 1)]) - 0.5;
        if opts.with_displacement {
            o += 0.5 * (m[0] * m[0] + m[1] * m[1]);
        }
        o
    };
    let mut series = Vec::new();
    if opts.stride > 0 {
        series.push(SeriesPoint { t: t0, occupation: occ(&mean, &cov) });
    }

    for step in 0..n {
        let t = t0 + step as f64 * h;
        let st = GaussStep::new(sys, t, h);
        st.apply(mean.as_mut_slice(), true);
        for _ in 0..2 {
            for mut col in cov.column_iter_mut() {
                st.apply(col.as_mut_slice(), false);
            }
            cov.transpose_mut();
        }

        let t_next = if step + 1 == n { t1 } else { t + h };
        if !detector_block_ok(&cov, opts.tol) || !mean[0].is_finite() {
            return Err(Error::Integration { t: t_next, msg: "detector block violates the uncertainty relation".into() });
        }
        if opts.check_every > 0 && (step + 1) % opts.check_every == 0 {
            let s = GaussianState { means: mean.clone(), cov: cov.clone() };
            if let Err(e) = s.check_invariants(opts.tol) {
                return Err(Error::Integration { t: t_next, msg: e.to_string() });
            }
        }
        if opts.stride > 0 && ((step + 1) % opts.stride == 0 || step + 1 == n) {
            series.push(SeriesPoint { t: t_next, occupation: occ(&mean, &cov) });
        }
    }
    rotate_state(sys, t1, false, &mut mean, &mut cov);
    Ok(Evolution { state: GaussianState { means: mean, cov }, series, steps: n, dt: h })
}
