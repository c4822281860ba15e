//! Gaussian states of detector plus field in quadrature form.
//!
//! Quadratures are ordered `(x_d, p_d, x_1, p_1, ..., x_N, p_N)` with
//! `x = (b + b^+)/sqrt2`, `p = (b - b^+)/(i sqrt2)`. The covariance is
//! `<{dR_i, dR_j}>`, so the vacuum is the identity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Mean photon number of a thermal oscillator.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

/// Reduced state of the detector oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorState {
    pub mean: [f64; 2],
    /// Row-major 2x2 covariance.
    pub cov: [f64; 4],
}

impl DetectorState {
    pub fn vacuum() -> Self {
        DetectorState { mean: [0.0, 0.0], cov: [1.0, 0.0, 0.0, 1.0] }
    }

    pub fn thermal_occupation(n: f64) -> Self {
        let s = 2.0 * n + 1.0;
        DetectorState { mean: [0.0, 0.0], cov: [s, 0.0, 0.0, s] }
    }

    pub fn thermal(omega: f64, temperature: f64) -> Self {
        Self::thermal_occupation(thermal_occupation(omega, temperature))
    }

    pub fn coherent(x: f64, p: f64) -> Self {
        DetectorState { mean: [x, p], ..Self::vacuum() }
    }

    /// `(s_xx + s_pp)/4 - 1/2`, plus `(x^2 + p^2)/2` if `with_displacement`.
    pub fn occupation(&self, with_displacement: bool) -> f64 {
        let mut n = 0.25 * (self.cov[0] + self.cov[3]) - 0.5;
        if with_displacement {
            n += 0.5 * (self.mean[0] * self.mean[0] + self.mean[1] * self.mean[1]);
        }
        n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub means: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn vacuum(n_modes: usize) -> Self {
        let d = 2 * (n_modes + 1);
        GaussianState { means: DVector::zeros(d), cov: DMatrix::identity(d, d) }
    }

    /// Product state of `detector` and independent thermal modes
    /// (vacuum where `temperature` is zero).
    pub fn product(detector: DetectorState, mode_omegas: &[f64], temperature: f64) -> Self {
        let mut s = Self::vacuum(mode_omegas.len());
        s.set_detector(&detector);
        for (k, &w) in mode_omegas.iter().enumerate() {
            let v = 2.0 * thermal_occupation(w, temperature) + 1.0;
            s.cov[(2 * k + 2, 2 * k + 2)] = v;
            s.cov[(2 * k + 3, 2 * k + 3)] = v;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn n_modes(&self) -> usize {
        self.dim() / 2 - 1
    }

    pub fn detector(&self) -> DetectorState {
        let c = &self.cov;
        DetectorState { mean: [self.means[0], self.means[1]], cov: [c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]] }
    }

    pub fn set_detector(&mut self, d: &DetectorState) {
        self.means[0] = d.mean[0];
        self.means[1] = d.mean[1];
        self.cov[(0, 0)] = d.cov[0];
        self.cov[(0, 1)] = d.cov[1];
        self.cov[(1, 0)] = d.cov[2];
        self.cov[(1, 1)] = d.cov[3];
    }

    /// Zero every detector-field covariance entry.
    pub fn drop_detector_correlations(&mut self) {
        let d = self.dim();
        for j in 2..d {
            for i in 0..2 {
                self.cov[(i, j)] = 0.0;
                self.cov[(j, i)] = 0.0;
            }
        }
    }

    pub fn mode_occupation(&self, k: usize) -> f64 {
        let i = 2 * k + 2;
        0.25 * (self.cov[(i, i)] + self.cov[(i + 1, i + 1)]) - 0.5
            + 0.5 * (self.means[i].powi(2) + self.means[i + 1].powi(2))
    }

    /// Symmetry, uncertainty and symplectic-spectrum diagnostics.
    pub fn invariants(&self) -> InvariantReport {
        let asym = (&self.cov - self.cov.transpose()).abs().max();
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        InvariantReport {
            asymmetry: asym,
            min_uncertainty_eigenvalue: min_uncertainty_eigenvalue(&sym),
            symplectic: symplectic_eigenvalues(&sym),
        }
    }

    pub fn check_invariants(&self, tol: f64) -> Result<InvariantReport> {
        let r = self.invariants();
        if r.asymmetry > 1e-10 * (1.0 + self.cov.abs().max()) {
            return Err(Error::Invariant(format!("covariance asymmetric by {:e}", r.asymmetry)));
        }
        if r.min_uncertainty_eigenvalue < -tol {
            return Err(Error::Invariant(format!(
                "cov + i Omega has eigenvalue {:e}",
                r.min_uncertainty_eigenvalue
            )));
        }
        if r.min_symplectic() < 1.0 - tol {
            return Err(Error::Invariant(format!("symplectic eigenvalue {} below 1", r.min_symplectic())));
        }
        Ok(r)
    }
}

/// Detector occupation of a full state.
pub fn detector_occupation(state: &GaussianState, with_displacement: bool) -> f64 {
    state.detector().occupation(with_displacement)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub asymmetry: f64,
    pub min_uncertainty_eigenvalue: f64,
    /// Ascending, one entry per mode.
    pub symplectic: Vec<f64>,
}

impl InvariantReport {
    pub fn min_symplectic(&self) -> f64 {
        self.symplectic.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max_symplectic(&self) -> f64 {
        self.symplectic.last().copied().unwrap_or(f64::NAN)
    }

    /// Largest deviation of any symplectic eigenvalue from one.
    pub fn purity_defect(&self) -> f64 {
        self.symplectic.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Symmetric eigendecomposition with a residual check. nalgebra's solver
/// occasionally stops short at its default tolerance, so the decomposition is
/// verified and retried with other tolerances when it does not reconstruct `m`.
fn symmetric_eigen(m: DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let scale = 1.0 + m.abs().max();
    let mut best: Option<(f64, SymmetricEigen<f64, nalgebra::Dyn>)> = None;
    for eps in [f64::EPSILON, 1e-16, 1e-15, 1e-14] {
        let Some(e) = SymmetricEigen::try_new(m.clone(), eps, 0) else { continue };
        let recon = &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues) * e.eigenvectors.transpose();
        let res = (recon - &m).abs().max() / scale;
        if res <= 1e-12 {
            return e;
        }
        if best.as_ref().map_or(true, |b| res < b.0) {
            best = Some((res, e));
        }
    }
    best.map(|b| b.1).unwrap_or_else(|| SymmetricEigen::new(m))
}

/// Smallest eigenvalue of the Hermitian matrix `cov + i Omega`, via its real
/// embedding `[[cov, -Omega], [Omega, cov]]`.
pub fn min_uncertainty_eigenvalue(cov: &DMatrix<f64>) -> f64 {
    let d = cov.nrows();
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(cov);
    m.view_mut((d, d), (d, d)).copy_from(cov);
    for b in 0..d / 2 {
        let (x, p) = (2 * b, 2 * b + 1);
        // Omega block [[0, 1], [-1, 0]]
        m[(x, d + p)] = -1.0;
        m[(p, d + x)] = 1.0;
        m[(d + x, p)] = 1.0;
        m[(d + p, x)] = -1.0;
    }
    symmetric_eigen(m).eigenvalues.min()
}

/// Symplectic eigenvalues of a positive covariance, ascending.
///
/// With `K = cov^{1/2} Omega cov^{1/2}`, the eigenvalues of `K^T K` are the
/// squared symplectic eigenvalues, each appearing twice.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
    let d = cov.nrows();
    let eig = symmetric_eigen(cov.clone());
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let mut omega = DMatrix::zeros(d, d);
    for b in 0..d / 2 {
        omega[(2 * b, 2 * b + 1)] = 1.0;
        omega[(2 * b + 1, 2 * b)] = -1.0;
    }
    let k = &root * omega * &root;
    let ktk = k.transpose() * &k;
    let mut vals: Vec<f64> = symmetric_eigen(ktk).eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
    vals.sort_by(f64::total_cmp);
    vals.chunks(2).map(|p| 0.5 * (p[0] + p[p.len() - 1])).collect()
}
