//! Detector channel of a single pass, obtained by integrating the detector
//! rows of the propagator backward in time.
//!
//! With step maps `r <- M_j r + m_j`, the rows are `Phi = e_d^T M_{n-1} ... M_0`
//! and the detector after the pass is `R_d(t1) = Phi R(t0) + s` with
//! `s = sum_j e_d^T M_{n-1} ... M_{j+1} m_j`. The steps are the same as in
//! [`super::evolve`], so both agree to roundoff. Cost is linear in the
//! number of modes.
//!
//! The march runs in the interaction picture; the stored rows are converted
//! back to the lab frame, `F_d(t1) Phi_I F(t0)^T`.

use nalgebra::{DMatrix, DVector};

use super::evolve::step_grid;
use super::hamiltonian::{MeanField, System};
use super::state::{thermal_occupation, DetectorState, GaussianState};
use super::step::GaussStep;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PassChannel {
    /// Two rows of length `2(N+1)`: the detector rows of the propagator.
    pub rows: [Vec<f64>; 2],
    pub displacement: [f64; 2],
    pub steps: usize,
}

impl PassChannel {
    /// Channel of the window `[t0, t1]`, using the same step grid as
    /// [`super::evolve`].
    pub fn compute(sys: &System, t0: f64, t1: f64, dt: Option<f64>) -> Result<Self> {
        let d = sys.dim();
        let (n, h) = step_grid(t0, t1, dt.unwrap_or_else(|| sys.default_dt()))?;
        let mut phi = [vec![0.0; d], vec![0.0; d]];
        phi[0][0] = 1.0;
        phi[1][1] = 1.0;
        let mut s = [0.0f64; 2];
        let driven = matches!(sys.schedule.mean_field, MeanField::Drive { amplitude } if amplitude != 0.0);
        let mut m = vec![0.0; d];

        // March from t1 down to t0 on the forward grid t_j = t0 + j h.
        for j in (0..n).rev() {
            let t = t0 + j as f64 * h;
            let st = GaussStep::new(sys, t, h);
            if driven {
                m.iter_mut().for_each(|v| *v = 0.0);
                st.apply(&mut m, true);
            }
            for r in 0..2 {
                if driven {
                    s[r] += phi[r].iter().zip(&m).map(|(a, b)| a * b).sum::<f64>();
                }
                st.apply_row(&mut phi[r]);
            }
            if !phi[0][0].is_finite() {
                return Err(Error::Integration { t, msg: "adjoint propagation diverged".into() });
            }
        }
        // Back to the lab frame.
        for row in phi.iter_mut() {
            for b in 0..d / 2 {
                let (c, sn) = sys.free_rotation(b, t0);
                let (x, p) = (row[2 * b], row[2 * b + 1]);
                // row F^T with F = [[c, s], [-s, c]]
                row[2 * b] = x * c + p * sn;
                row[2 * b + 1] = -x * sn + p * c;
            }
        }
        let (c, sn) = sys.free_rotation(0, t1);
        let mut rows = [vec![0.0; d], vec![0.0; d]];
        for i in 0..d {
            rows[0][i] = c * phi[0][i] + sn * phi[1][i];
            rows[1][i] = -sn * phi[0][i] + c * phi[1][i];
        }
        let displacement = [c * s[0] + sn * s[1], -sn * s[0] + c * s[1]];
        Ok(PassChannel { rows, displacement, steps: n })
    }

    /// Detector state after the pass, starting from an arbitrary joint state.
    pub fn apply(&self, state: &GaussianState) -> DetectorState {
        let d = state.dim();
        let mut mean = self.displacement;
        let mut cov = [0.0; 4];
        let mut tmp = vec![0.0; d];
        for r in 0..2 {
            mean[r] += self.rows[r].iter().zip(state.means.iter()).map(|(a, b)| a * b).sum::<f64>();
            // tmp = cov * row_r
            let row = DVector::from_column_slice(&self.rows[r]);
            let v: DVector<f64> = &state.cov * &row;
            tmp.copy_from_slice(v.as_slice());
            for q in 0..2 {
                cov[2 * q + r] = self.rows[q].iter().zip(&tmp).map(|(a, b)| a * b).sum();
            }
        }
        symmetrize(&mut cov);
        DetectorState { mean, cov }
    }

    /// Detector state after the pass when it starts uncorrelated from a field
    /// of independent thermal modes with zero mean.
    pub fn apply_product(&self, det: &DetectorState, field_variance: &[f64]) -> DetectorState {
        let [r0, r1] = &self.rows;
        let dd = [r0[0], r0[1], r1[0], r1[1]];
        let mut cov = mul3(&dd, &det.cov);
        for (k, v) in field_variance.iter().enumerate() {
            let i = 2 * k + 2;
            let (a, b, c, e) = (r0[i], r0[i + 1], r1[i], r1[i + 1]);
            cov[0] += v * (a * a + b * b);
            cov[1] += v * (a * c + b * e);
            cov[2] += v * (a * c + b * e);
            cov[3] += v * (c * c + e * e);
        }
        symmetrize(&mut cov);
        let mean = [
            dd[0] * det.mean[0] + dd[1] * det.mean[1] + self.displacement[0],
            dd[2] * det.mean[0] + dd[3] * det.mean[1] + self.displacement[1],
        ];
        DetectorState { mean, cov }
    }

    /// Symplectic-form defect of the detector rows, `|Phi Omega Phi^T - Omega|`.
    pub fn symplectic_defect(&self) -> f64 {
        let [r0, r1] = &self.rows;
        let mut w = 0.0;
        for b in 0..r0.len() / 2 {
            w += r0[2 * b] * r1[2 * b + 1] - r0[2 * b + 1] * r1[2 * b];
        }
        (w - 1.0).abs()
    }

    /// The two rows as a dense `2 x D` matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.rows[0].len();
        DMatrix::from_fn(2, d, |r, c| self.rows[r][c])
    }
}

/// Per-mode covariance diagonal `2 n_k + 1` for a thermal field.
pub fn field_variances(mode_omegas: &[f64], temperature: f64) -> Vec<f64> {
    mode_omegas.iter().map(|&w| 2.0 * thermal_occupation(w, temperature) + 1.0).collect()
}

fn mul3(m: &[f64; 4], c: &[f64; 4]) -> [f64; 4] {
    // m c m^T for row-major 2x2
    let mc = [m[0] * c[0] + m[1] * c[2], m[0] * c[1] + m[1] * c[3], m[2] * c[0] + m[3] * c[2], m[2] * c[1] + m[3] * c[3]];
    [
        mc[0] * m[0] + mc[1] * m[1],
        mc[0] * m[2] + mc[1] * m[3],
        mc[2] * m[0] + mc[3] * m[1],
        mc[2] * m[2] + mc[3] * m[3],
    ]
}

fn symmetrize(c: &mut [f64; 4]) {
    let o = 0.5 * (c[1] + c[2]);
    c[1] = o;
    c[2] = o;
}
