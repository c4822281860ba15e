//! One step of the two-stage Gauss-Legendre method for
//! `x' = A(t) x + f(t)` in the interaction picture.
//!
//! There `A` only couples the detector to each mode, so the implicit stage
//! equations reduce to a 4x4 system for the detector stage values and a step
//! costs O(N) per vector. The method has order 4 and its step map is exactly
//! symplectic, so `S + i Omega >= 0` and purity are kept to roundoff.
//!
//! Notation: for stage `i`, `P_i x_m = sum_k J C_k x_k` and
//! `(Q_i y)_k = J C_k^T y`, with `J = [[0, 1], [-1, 0]]`.

use nalgebra::{Matrix4, Vector4};

use super::hamiltonian::{Block, System};

const R3: f64 = 0.288_675_134_594_812_9; // sqrt(3) / 6
const A: [[f64; 2]; 2] = [[0.25, 0.25 - R3], [0.25 + R3, 0.25]];
const C: [f64; 2] = [0.5 - R3, 0.5 + R3];

pub(crate) struct GaussStep {
    h: f64,
    blocks: [Vec<Block>; 2],
    drive: [[f64; 2]; 2],
    /// `M_ij = P_i Q_j`, row-major.
    m: [[[f64; 4]; 2]; 2],
    /// Inverse of the detector stage matrix `I - h^2 E`.
    kinv: Matrix4<f64>,
    coupled: bool,
}

impl GaussStep {
    pub(crate) fn new(sys: &System, t: f64, h: f64) -> Self {
        let mut blocks = [Vec::with_capacity(sys.modes.len()), Vec::with_capacity(sys.modes.len())];
        let mut drive = [[0.0; 2]; 2];
        for i in 0..2 {
            drive[i] = sys.blocks_at(t + C[i] * h, &mut blocks[i]);
        }
        let coupled = [t + C[0] * h, t + C[1] * h].iter().any(|&s| sys.schedule.coupling(s) != 0.0);
        let mut m = [[[0.0; 4]; 2]; 2];
        let mut kinv = Matrix4::identity();
        if coupled {
            for i in 0..2 {
                for j in 0..2 {
                    // U = sum_k C_i J C_j^T, M = J U
                    let mut u = [0.0; 4];
                    for (a, b) in blocks[i].iter().zip(&blocks[j]) {
                        u[0] += -a[1] * b[0] + a[0] * b[1];
                        u[1] += -a[1] * b[2] + a[0] * b[3];
                        u[2] += -a[3] * b[0] + a[2] * b[1];
                        u[3] += -a[3] * b[2] + a[2] * b[3];
                    }
                    m[i][j] = [u[2], u[3], -u[0], -u[1]];
                }
            }
            let mut k = Matrix4::identity();
            for i in 0..2 {
                for l in 0..2 {
                    for j in 0..2 {
                        let w = h * h * A[i][j] * A[j][l];
                        for r in 0..2 {
                            for c in 0..2 {
                                k[(2 * i + r, 2 * l + c)] -= w * m[j][l][2 * r + c];
                            }
                        }
                    }
                }
            }
            kinv = k.try_inverse().unwrap_or_else(Matrix4::identity);
        }
        GaussStep { h, blocks, drive, m, kinv, coupled }
    }

    /// `x <- M x`, plus the inhomogeneous part when `with_drive`.
    pub(crate) fn apply(&self, x: &mut [f64], with_drive: bool) {
        let h = self.h;
        let f = if with_drive { self.drive } else { [[0.0; 2]; 2] };
        if !self.coupled {
            x[0] += 0.5 * h * (f[0][0] + f[1][0]);
            x[1] += 0.5 * h * (f[0][1] + f[1][1]);
            return;
        }
        let mut p = [[0.0; 2]; 2];
        for (i, pi) in p.iter_mut().enumerate() {
            let (mut y0, mut y1) = (0.0, 0.0);
            for (k, b) in self.blocks[i].iter().enumerate() {
                let (xk, pk) = (x[2 * k + 2], x[2 * k + 3]);
                y0 += b[0] * xk + b[1] * pk;
                y1 += b[2] * xk + b[3] * pk;
            }
            *pi = [y1, -y0];
        }
        let mut w = Vector4::zeros();
        for i in 0..2 {
            for r in 0..2 {
                w[2 * i + r] = x[r] + h * (A[i][0] * (p[0][r] + f[0][r]) + A[i][1] * (p[1][r] + f[1][r]));
            }
        }
        let z = self.kinv * w;
        let y = [[z[0], z[1]], [z[2], z[3]]];
        let mut dd = [0.0; 2];
        for i in 0..2 {
            let mut py = [p[i][0] + f[i][0], p[i][1] + f[i][1]];
            for l in 0..2 {
                let mm = &self.m[i][l];
                py[0] += h * A[i][l] * (mm[0] * y[l][0] + mm[1] * y[l][1]);
                py[1] += h * A[i][l] * (mm[2] * y[l][0] + mm[3] * y[l][1]);
            }
            dd[0] += 0.5 * h * py[0];
            dd[1] += 0.5 * h * py[1];
        }
        for k in 0..self.blocks[0].len() {
            let (mut gx, mut gp) = (0.0, 0.0);
            for (i, yi) in y.iter().enumerate() {
                let b = &self.blocks[i][k];
                gx += b[0] * yi[0] + b[2] * yi[1];
                gp += b[1] * yi[0] + b[3] * yi[1];
            }
            x[2 * k + 2] += 0.5 * h * gp;
            x[2 * k + 3] -= 0.5 * h * gx;
        }
        x[0] += dd[0];
        x[1] += dd[1];
    }

    /// `phi <- phi M` for a row vector.
    pub(crate) fn apply_row(&self, phi: &mut [f64]) {
        if !self.coupled {
            return;
        }
        let h = self.h;
        let pd = [phi[0], phi[1]];
        let mut g = Vector4::zeros();
        for l in 0..2 {
            // r_l = phi_m Q_l
            let (mut r0, mut r1) = (0.0, 0.0);
            for (k, b) in self.blocks[l].iter().enumerate() {
                let (z0, z1) = (-phi[2 * k + 3], phi[2 * k + 2]);
                r0 += z0 * b[0] + z1 * b[1];
                r1 += z0 * b[2] + z1 * b[3];
            }
            let mut gl = [0.5 * h * r0, 0.5 * h * r1];
            for i in 0..2 {
                let mm = &self.m[i][l];
                let c = 0.5 * h * h * A[i][l];
                gl[0] += c * (pd[0] * mm[0] + pd[1] * mm[2]);
                gl[1] += c * (pd[0] * mm[1] + pd[1] * mm[3]);
            }
            g[2 * l] = gl[0];
            g[2 * l + 1] = gl[1];
        }
        let lam = self.kinv.transpose() * g;
        let lam = [[lam[0], lam[1]], [lam[2], lam[3]]];
        let mut mu = [[0.0; 2]; 2];
        for (i, mi) in mu.iter_mut().enumerate() {
            for r in 0..2 {
                mi[r] = 0.5 * h * pd[r] + h * (lam[0][r] * A[0][i] + lam[1][r] * A[1][i]);
            }
        }
        for k in 0..self.blocks[0].len() {
            let (mut o0, mut o1) = (0.0, 0.0);
            for (i, mi) in mu.iter().enumerate() {
                let b = &self.blocks[i][k];
                let (z0, z1) = (-mi[1], mi[0]);
                o0 += z0 * b[0] + z1 * b[2];
                o1 += z0 * b[1] + z1 * b[3];
            }
            phi[2 * k + 2] += o0;
            phi[2 * k + 3] += o1;
        }
        phi[0] += lam[0][0] + lam[1][0];
        phi[1] += lam[0][1] + lam[1][1];
    }
}
