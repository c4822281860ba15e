//! Time-dependent quadratic Hamiltonian `H = R^T G R / 2 + c^T R` of the
//! detector coupled to a set of Bogoliubov modes.
//!
//! The detector couples to mode `k` through
//! `g_k [u e^{i theta} d^+ c + v e^{-i theta} d^+ c^+ + h.c.]`,
//! `theta = k . x_D(t)`, `g_k = g(t) / sqrt(volume)`. In quadratures this is
//! `R_d^T C_k R_k` with
//! `C_k = g_k [[(u+v) cos, -(u+v) sin], [(u-v) sin, (u-v) cos]]`.
//!
//! The integrators work in the interaction picture of the free part, where
//! the coupling blocks become `F_d(t)^T C_k F_k(t)` with `F` the free
//! rotation. This removes the step-size error of the fast free rotations.

use nalgebra::{DMatrix, DVector};

use crate::bogoliubov::ModeSet;
use crate::error::{Error, Result};
use crate::switching::Window;
use crate::trajectory::{proper_time_rate, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanField {
    /// Condensate mean-field term removed by the two-level drive trick.
    Cancelled,
    /// Linear drive `amplitude (d + d^+)`, `amplitude = sqrt(n_a) Omega_a`.
    Drive { amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulation {
    Constant,
    /// Coupling scaled by the hyperbolic proper-time rate.
    ProperTime { a: f64, c_s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSchedule {
    pub g0: f64,
    pub window: Window,
    pub mean_field: MeanField,
    pub modulation: Modulation,
}

impl CouplingSchedule {
    pub fn new(g0: f64, window: Window) -> Self {
        CouplingSchedule { g0, window, mean_field: MeanField::Cancelled, modulation: Modulation::Constant }
    }

    fn envelope(&self, t: f64) -> f64 {
        let w = self.window.value(t);
        if w == 0.0 {
            return 0.0;
        }
        match self.modulation {
            Modulation::Constant => w,
            Modulation::ProperTime { a, c_s } => w * proper_time_rate(t, a, c_s),
        }
    }

    /// `g(t) = g0 w(t) modulation(t)`.
    pub fn coupling(&self, t: f64) -> f64 {
        self.g0 * self.envelope(t)
    }

    /// Coefficient of `(d + d^+)` at time `t`.
    pub fn drive(&self, t: f64) -> f64 {
        match self.mean_field {
            MeanField::Cancelled => 0.0,
            MeanField::Drive { amplitude } => amplitude * self.envelope(t),
        }
    }
}

/// Dense form of the instantaneous Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianFrame {
    pub g: DMatrix<f64>,
    pub c: DVector<f64>,
}

/// Detector, field and worldline: everything the engine needs.
#[derive(Debug, Clone)]
pub struct System {
    pub modes: ModeSet,
    pub trajectory: Trajectory,
    /// Detector level spacing `delta` (equal to `omega_d` unless detuned).
    pub gap: f64,
    pub schedule: CouplingSchedule,
}

/// Row-major 2x2 coupling block `C_k` for each mode.
pub(crate) type Block = [f64; 4];

impl System {
    pub fn new(modes: ModeSet, trajectory: Trajectory, gap: f64, schedule: CouplingSchedule) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::domain("system needs at least one mode"));
        }
        if !gap.is_finite() || gap < 0.0 {
            return Err(Error::domain(format!("detector gap must be non-negative, got {gap}")));
        }
        if !schedule.g0.is_finite() {
            return Err(Error::domain("coupling must be finite"));
        }
        Ok(System { modes, trajectory, gap, schedule })
    }

    pub fn dim(&self) -> usize {
        2 * (self.modes.len() + 1)
    }

    pub fn omega_max(&self) -> f64 {
        self.modes.omega_max().max(self.gap)
    }

    /// `(2 pi / omega_max) / 40`.
    pub fn default_dt(&self) -> f64 {
        std::f64::consts::TAU / self.omega_max() / 40.0
    }

    pub fn with_trajectory(&self, trajectory: Trajectory) -> Self {
        System { trajectory, ..self.clone() }
    }

    /// Fill `blocks` with the lab-frame coupling blocks at `t` and return
    /// the drive coefficient.
    pub(crate) fn lab_blocks(&self, t: f64, blocks: &mut Vec<Block>) -> f64 {
        blocks.clear();
        let g = self.schedule.coupling(t) * self.modes.coupling_norm();
        if g == 0.0 {
            blocks.resize(self.modes.len(), [0.0; 4]);
        } else {
            let [x, y] = self.trajectory.position(t);
            for m in &self.modes.modes {
                let (s, c) = (m.k[0] * x + m.k[1] * y).sin_cos();
                let p = g * (m.u + m.v);
                let q = g * (m.u - m.v);
                blocks.push([p * c, -p * s, q * s, q * c]);
            }
        }
        self.schedule.drive(t)
    }

    pub fn assemble_hamiltonian(&self, t: f64) -> HamiltonianFrame {
        let d = self.dim();
        let mut blocks = Vec::with_capacity(self.modes.len());
        let drive = self.lab_blocks(t, &mut blocks);
        let mut g = DMatrix::zeros(d, d);
        g[(0, 0)] = self.gap;
        g[(1, 1)] = self.gap;
        for (k, (m, b)) in self.modes.modes.iter().zip(&blocks).enumerate() {
            let i = 2 * k + 2;
            g[(i, i)] = m.omega;
            g[(i + 1, i + 1)] = m.omega;
            for r in 0..2 {
                for c in 0..2 {
                    g[(r, i + c)] = b[2 * r + c];
                    g[(i + c, r)] = b[2 * r + c];
                }
            }
        }
        let mut c = DVector::zeros(d);
        c[0] = std::f64::consts::SQRT_2 * drive;
        HamiltonianFrame { g, c }
    }

    /// Interaction-picture coupling blocks at `t`; returns the drive term
    /// `F^T Omega c` restricted to the detector.
    pub(crate) fn blocks_at(&self, t: f64, blocks: &mut Vec<Block>) -> [f64; 2] {
        let drive = self.lab_blocks(t, blocks);
        let (sd, cd) = (self.gap * t).sin_cos();
        if self.schedule.coupling(t) != 0.0 {
            for (m, b) in self.modes.modes.iter().zip(blocks.iter_mut()) {
                let (sk, ck) = (m.omega * t).sin_cos();
                let m00 = cd * b[0] - sd * b[2];
                let m01 = cd * b[1] - sd * b[3];
                let m10 = sd * b[0] + cd * b[2];
                let m11 = sd * b[1] + cd * b[3];
                *b = [m00 * ck - m01 * sk, m00 * sk + m01 * ck, m10 * ck - m11 * sk, m10 * sk + m11 * ck];
            }
        }
        let r = std::f64::consts::SQRT_2 * drive;
        [r * sd, -r * cd]
    }

    /// Free rotation `F(t)` of block `b` (0 is the detector) as `(cos, sin)`.
    pub(crate) fn free_rotation(&self, b: usize, t: f64) -> (f64, f64) {
        let w = if b == 0 { self.gap } else { self.modes.modes[b - 1].omega };
        let (s, c) = (w * t).sin_cos();
        (c, s)
    }

    /// `out = A_I x` for one column `x`, with `A_I = Omega G_I`.
    #[cfg(test)]
    pub(crate) fn apply_column(&self, blocks: &[Block], x: &[f64], out: &mut [f64]) {
        let (xd, pd) = (x[0], x[1]);
        let (mut yd, mut yp) = (0.0, 0.0);
        for (k, b) in blocks.iter().enumerate() {
            let i = 2 * k + 2;
            let (xk, pk) = (x[i], x[i + 1]);
            yd += b[0] * xk + b[1] * pk;
            yp += b[2] * xk + b[3] * pk;
            // (G x)_k = C^T x_d
            let gx = b[0] * xd + b[2] * pd;
            let gp = b[1] * xd + b[3] * pd;
            out[i] = gp;
            out[i + 1] = -gx;
        }
        out[0] = yp;
        out[1] = -yd;
    }

    /// `out = phi A_I` for one row `phi`.
    #[cfg(test)]
    pub(crate) fn apply_row(&self, blocks: &[Block], phi: &[f64], out: &mut [f64]) {
        // z = phi Omega: z_x = -phi_p, z_p = phi_x
        let (zd, zp) = (-phi[1], phi[0]);
        let (mut od, mut op) = (0.0, 0.0);
        for (k, b) in blocks.iter().enumerate() {
            let i = 2 * k + 2;
            let (zk, zq) = (-phi[i + 1], phi[i]);
            // (zG)_d += z_k C^T
            od += zk * b[0] + zq * b[1];
            op += zk * b[2] + zq * b[3];
            // (zG)_k = z_d C
            out[i] = zd * b[0] + zp * b[2];
            out[i + 1] = zd * b[1] + zp * b[3];
        }
        out[0] = od;
        out[1] = op;
    }
}

/// Apply the block-diagonal free rotation `F(t)` (or its transpose) to a
/// state in place: `r -> F r`, `S -> F S F^T`.
pub(crate) fn rotate_state(sys: &System, t: f64, transpose: bool, mean: &mut DVector<f64>, cov: &mut DMatrix<f64>) {
    let nb = sys.dim() / 2;
    let rot: Vec<[f64; 4]> = (0..nb)
        .map(|b| {
            let (c, s) = sys.free_rotation(b, t);
            if transpose {
                [c, -s, s, c]
            } else {
                [c, s, -s, c]
            }
        })
        .collect();
    for (b, f) in rot.iter().enumerate() {
        let (x, p) = (mean[2 * b], mean[2 * b + 1]);
        mean[2 * b] = f[0] * x + f[1] * p;
        mean[2 * b + 1] = f[2] * x + f[3] * p;
    }
    let d = sys.dim();
    // rows
    for j in 0..d {
        for (b, f) in rot.iter().enumerate() {
            let (x, p) = (cov[(2 * b, j)], cov[(2 * b + 1, j)]);
            cov[(2 * b, j)] = f[0] * x + f[1] * p;
            cov[(2 * b + 1, j)] = f[2] * x + f[3] * p;
        }
    }
    // columns
    for (b, f) in rot.iter().enumerate() {
        for i in 0..d {
            let (x, p) = (cov[(i, 2 * b)], cov[(i, 2 * b + 1)]);
            cov[(i, 2 * b)] = f[0] * x + f[1] * p;
            cov[(i, 2 * b + 1)] = f[2] * x + f[3] * p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::{mode_grid_1d, DispersionKind};

    fn system() -> System {
        let modes = mode_grid_1d(std::f64::consts::TAU / 20.0, 4, 1.0, 3.0, DispersionKind::FullBogoliubov).unwrap();
        let traj = Trajectory::effective_unruh(2.0, 1.0).unwrap();
        let win = Window::abrupt(-1.0, 5.0).unwrap();
        let mut sched = CouplingSchedule::new(0.3, win);
        sched.mean_field = MeanField::Drive { amplitude: 0.2 };
        System::new(modes, traj, 1.1, sched).unwrap()
    }

    #[test]
    fn frame_is_symmetric_with_expected_blocks() {
        let s = system();
        let h = s.assemble_hamiltonian(0.7);
        assert_eq!(h.g, h.g.transpose());
        assert_eq!(h.g[(0, 0)], 1.1);
        assert_eq!(h.g[(2, 2)], s.modes.modes[0].omega);
        assert_eq!(h.c[0], 0.2 * std::f64::consts::SQRT_2);
        let off = s.assemble_hamiltonian(7.0);
        assert_eq!(off.g.view((0, 2), (2, 8)).abs().max(), 0.0);
    }

    #[test]
    fn interaction_products_match_dense() {
        // A_I = F^T A_int F with F the free propagator and A_int = Omega G_int.
        let s = system();
        let t = 0.4;
        let h = s.assemble_hamiltonian(t);
        let d = s.dim();
        let mut omega = DMatrix::zeros(d, d);
        let mut f = DMatrix::zeros(d, d);
        for b in 0..d / 2 {
            omega[(2 * b, 2 * b + 1)] = 1.0;
            omega[(2 * b + 1, 2 * b)] = -1.0;
            let (c, sn) = s.free_rotation(b, t);
            f[(2 * b, 2 * b)] = c;
            f[(2 * b, 2 * b + 1)] = sn;
            f[(2 * b + 1, 2 * b)] = -sn;
            f[(2 * b + 1, 2 * b + 1)] = c;
        }
        let mut g_int = h.g.clone();
        for i in 0..d {
            for j in 0..d {
                if i / 2 == j / 2 {
                    g_int[(i, j)] = 0.0;
                }
            }
        }
        let a = &omega * f.transpose() * &g_int * &f;
        let mut blocks = Vec::new();
        let drive = s.blocks_at(t, &mut blocks);
        let dense_drive = &omega * f.transpose() * &h.c;
        assert!((drive[0] - dense_drive[0]).abs() < 1e-14 && (drive[1] - dense_drive[1]).abs() < 1e-14);
        let x: Vec<f64> = (0..d).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y = vec![0.0; d];
        s.apply_column(&blocks, &x, &mut y);
        let dense = &a * DVector::from_column_slice(&x);
        for i in 0..d {
            assert!((y[i] - dense[i]).abs() < 1e-13);
        }
        s.apply_row(&blocks, &x, &mut y);
        let dense = DVector::from_column_slice(&x).transpose() * &a;
        for i in 0..d {
            assert!((y[i] - dense[i]).abs() < 1e-13);
        }
    }
}
