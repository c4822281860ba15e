//! Phonon modes of a uniform condensate in a periodic box.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Bogoliubov spectrum `sqrt((c_s k)^2 + (k^2 / 2m)^2)`.
pub fn dispersion(k: f64, c_s: f64, m: f64) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::domain(format!("dispersion needs k >= 0, got {k}")));
    }
    Ok(dispersion_unchecked(k, c_s, m))
}

fn dispersion_unchecked(k: f64, c_s: f64, m: f64) -> f64 {
    let free = k * k / (2.0 * m);
    (c_s * k).hypot(free)
}

/// Bogoliubov coefficients `(u_k, v_k)`, both taken positive.
///
/// `v^2` is evaluated as `(m c_s^2)^2 / (2 w (eps + m c_s^2 + w))`, which is
/// algebraically equal to `((eps + m c_s^2)/w - 1)/2` but free of the
/// cancellation at large `k`.
pub fn bogoliubov_coefficients(k: f64, c_s: f64, m: f64) -> Result<(f64, f64)> {
    if !(k > 0.0) {
        return Err(Error::domain("bogoliubov coefficients are undefined for the condensate mode k = 0"));
    }
    let w = dispersion_unchecked(k, c_s, m);
    let mc2 = m * c_s * c_s;
    let eps = k * k / (2.0 * m);
    let v2 = mc2 * mc2 / (2.0 * w * (eps + mc2 + w));
    Ok(((1.0 + v2).sqrt(), v2.sqrt()))
}

/// `c_s k - omega(k)`: the (non-positive) shift of the detector gap seen by mode `k`.
pub fn gap_correction(k: f64, c_s: f64, m: f64) -> f64 {
    let k = k.abs();
    // c k - c k sqrt(1 + x^2) written without cancellation
    let x = k / (2.0 * m * c_s);
    -c_s * k * x * x / (1.0 + (1.0 + x * x).sqrt())
}

/// Wavevector at which `omega(k) - c_s k = omega_d`, if it lies at or below `k_max`.
///
/// At this mode the emission channel sees a vanishing effective gap.
pub fn divergence_wavevector(omega_d: f64, c_s: f64, m: f64, k_max: f64) -> Option<f64> {
    let f = |k: f64| -gap_correction(k, c_s, m) - omega_d;
    if f(k_max) < 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0, k_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Which spectrum and mode coefficients to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersionKind {
    /// `omega = c_s k` with `u = v = 1`: the relativistic field, cutoff sent to infinity.
    LinearCutoff,
    /// Full Bogoliubov spectrum and coefficients.
    FullBogoliubov,
}

impl DispersionKind {
    pub fn name(self) -> &'static str {
        match self {
            DispersionKind::LinearCutoff => "linear_cutoff",
            DispersionKind::FullBogoliubov => "full_bogoliubov",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Wavevector; the second component is zero on 1D grids.
    pub k: [f64; 2],
    pub omega: f64,
    pub u: f64,
    pub v: f64,
}

impl Mode {
    pub fn k_abs(&self) -> f64 {
        self.k[0].hypot(self.k[1])
    }

    /// Mode with explicit coefficients, for oracles and hand-built couplings.
    pub fn custom(k: [f64; 2], omega: f64, u: f64, v: f64) -> Self {
        Mode { k, omega, u, v }
    }
}

/// Box geometry of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Line { l: f64 },
    /// Rectangular periodic box.
    Plane { lx: f64, ly: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub modes: Vec<Mode>,
    pub geometry: Geometry,
    pub k_c: f64,
    pub kind: DispersionKind,
}

impl ModeSet {
    pub fn dimension(&self) -> usize {
        match self.geometry {
            Geometry::Line { .. } => 1,
            Geometry::Plane { .. } => 2,
        }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Plane-wave normalisation `1/sqrt(L)` or `1/sqrt(Lx Ly)` folded into the coupling.
    pub fn coupling_norm(&self) -> f64 {
        match self.geometry {
            Geometry::Line { l } => 1.0 / l.sqrt(),
            Geometry::Plane { lx, ly } => 1.0 / (lx * ly).sqrt(),
        }
    }

    pub fn omega_max(&self) -> f64 {
        self.modes.iter().map(|m| m.omega).fold(0.0, f64::max)
    }

    pub fn k_max(&self) -> f64 {
        self.modes.iter().map(Mode::k_abs).fold(0.0, f64::max)
    }

    /// Mode set built from explicit modes in a line of length `l`.
    pub fn from_modes(modes: Vec<Mode>, l: f64) -> Self {
        ModeSet { modes, geometry: Geometry::Line { l }, k_c: f64::INFINITY, kind: DispersionKind::FullBogoliubov }
    }
}

fn make_mode(k: [f64; 2], c_s: f64, m: f64, kind: DispersionKind) -> Mode {
    let kk = k[0].hypot(k[1]);
    match kind {
        DispersionKind::LinearCutoff => Mode { k, omega: c_s * kk, u: 1.0, v: 1.0 },
        DispersionKind::FullBogoliubov => {
            let (u, v) = bogoliubov_coefficients(kk, c_s, m).expect("grid excludes k = 0");
            Mode { k, omega: dispersion_unchecked(kk, c_s, m), u, v }
        }
    }
}

fn sort_modes(modes: &mut [Mode]) {
    modes.sort_by(|a, b| {
        a.k_abs()
            .total_cmp(&b.k_abs())
            .then(a.k[0].total_cmp(&b.k[0]))
            .then(a.k[1].total_cmp(&b.k[1]))
    });
}

/// 1D grid `k_n = 2 pi n / L`, `n = +-1 .. +-N/2`.
pub fn mode_grid_1d(l: f64, n: usize, c_s: f64, m: f64, kind: DispersionKind) -> Result<ModeSet> {
    if !(l > 0.0) {
        return Err(Error::Validation(format!("mode grid needs L > 0, got {l}")));
    }
    if n == 0 || n % 2 == 1 {
        return Err(Error::Validation(format!("1D mode grid needs an even, non-zero N, got {n}")));
    }
    let half = (n / 2) as i64;
    let mut modes: Vec<Mode> = (-half..=half)
        .filter(|&j| j != 0)
        .map(|j| make_mode([2.0 * PI * j as f64 / l, 0.0], c_s, m, kind))
        .collect();
    sort_modes(&mut modes);
    Ok(ModeSet { modes, geometry: Geometry::Line { l }, k_c: m * c_s, kind })
}

/// 2D grid of lattice wavevectors with `0 < |k| <= k_max` in an `lx` by `ly` box.
pub fn mode_grid_2d(lx: f64, ly: f64, k_max: f64, c_s: f64, m: f64, kind: DispersionKind) -> Result<ModeSet> {
    if !(lx > 0.0) || !(ly > 0.0) {
        return Err(Error::Validation(format!("mode grid needs positive box sides, got {lx} x {ly}")));
    }
    if !(k_max > 0.0) {
        return Err(Error::Validation(format!("2D mode grid needs k_max > 0, got {k_max}")));
    }
    let (dkx, dky) = (2.0 * PI / lx, 2.0 * PI / ly);
    let nx = (k_max / dkx).floor() as i64;
    let ny = (k_max / dky).floor() as i64;
    let mut modes = Vec::new();
    for i in -nx..=nx {
        for j in -ny..=ny {
            if i == 0 && j == 0 {
                continue;
            }
            let k = [dkx * i as f64, dky * j as f64];
            // tolerance keeps lattice points that sit exactly on the shell
            if k[0].hypot(k[1]) <= k_max * (1.0 + 1e-12) {
                modes.push(make_mode(k, c_s, m, kind));
            }
        }
    }
    if modes.is_empty() {
        return Err(Error::Validation("2D mode grid is empty: k_max is below the lattice spacing".into()));
    }
    sort_modes(&mut modes);
    Ok(ModeSet { modes, geometry: Geometry::Plane { lx, ly }, k_c: m * c_s, kind })
}
