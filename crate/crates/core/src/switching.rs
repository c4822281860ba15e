//! Switching functions for the detector-field coupling.
//!
//! A [`Window`] is a support `[t0, t1]` plus a [`Regulator`] describing how the
//! coupling turns on and off at the edges.

use crate::error::{Error, Result};

/// Edge profile of a regulated switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampShape {
    /// Normal-CDF edge with `sigma = gamma / 6`, centred `gamma` inside the
    /// window and truncated at six widths (rescaled to stay continuous), so
    /// each edge occupies `2 gamma`. Boundary leakage decays as
    /// `exp(-omega^2 sigma^2 / 2)` down to about `1e-9`.
    #[default]
    Gaussian,
    /// `sin^2` edge of duration `gamma`. Compact support, but its boundary
    /// leakage only decays algebraically and oscillates with `omega * gamma`.
    SinSquared,
}

impl RampShape {
    pub fn name(self) -> &'static str {
        match self {
            RampShape::Gaussian => "gaussian",
            RampShape::SinSquared => "sin2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "erf" => Some(RampShape::Gaussian),
            "sin2" | "sin_squared" | "sin^2" => Some(RampShape::SinSquared),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regulator {
    /// Abrupt on/off at the window edges.
    None,
    Ramp { gamma: f64, shape: RampShape },
}

impl Regulator {
    pub fn ramp(gamma: f64) -> Self {
        if gamma > 0.0 {
            Regulator::Ramp { gamma, shape: RampShape::Gaussian }
        } else {
            Regulator::None
        }
    }

    pub fn gamma(&self) -> f64 {
        match self {
            Regulator::None => 0.0,
            Regulator::Ramp { gamma, .. } => *gamma,
        }
    }

    /// Edge factor for a point `s >= 0` inside the window, measured from the
    /// nearest edge.
    fn edge(&self, s: f64) -> f64 {
        match *self {
            Regulator::None => 1.0,
            Regulator::Ramp { gamma, shape: RampShape::Gaussian } => {
                if s >= 2.0 * gamma {
                    1.0
                } else {
                    let eps = normal_cdf(-6.0);
                    let sigma = gamma / 6.0;
                    ((normal_cdf((s - gamma) / sigma) - eps) / (1.0 - 2.0 * eps)).max(0.0)
                }
            }
            Regulator::Ramp { gamma, shape: RampShape::SinSquared } => {
                if s >= gamma {
                    1.0
                } else {
                    let y = (std::f64::consts::FRAC_PI_2 * s / gamma).sin();
                    y * y
                }
            }
        }
    }

    /// Magnitude of the Fourier transform of the normalised edge derivative
    /// at frequency `omega`. Equals 1 for an abrupt switch and tends to 0
    /// for slow ramps.
    pub fn boundary_suppression(&self, omega: f64) -> f64 {
        match *self {
            Regulator::None => 1.0,
            Regulator::Ramp { gamma, shape: RampShape::Gaussian } => {
                let sigma = gamma / 6.0;
                (-0.5 * omega * omega * sigma * sigma).exp()
            }
            Regulator::Ramp { gamma, shape: RampShape::SinSquared } => {
                // |int_0^gamma (pi/2gamma) sin(pi s/gamma) e^{i omega s} ds|
                let p = std::f64::consts::PI / gamma;
                let x = omega * gamma;
                let denom = p * p - omega * omega;
                if denom.abs() < 1e-9 * p * p {
                    std::f64::consts::FRAC_PI_4
                } else {
                    0.5 * p * p * (2.0 * (1.0 + x.cos())).sqrt() / denom.abs()
                }
            }
        }
    }
}

/// Normal cumulative distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub regulator: Regulator,
}

impl Window {
    pub fn new(t0: f64, t1: f64, regulator: Regulator) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t1 <= t0 {
            return Err(Error::domain(format!("window [{t0}, {t1}] is empty")));
        }
        if let Regulator::Ramp { gamma, .. } = regulator {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::domain(format!("ramp duration {gamma} must be positive")));
            }
        }
        Ok(Window { t0, t1, regulator })
    }

    pub fn abrupt(t0: f64, t1: f64) -> Result<Self> {
        Self::new(t0, t1, Regulator::None)
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Switching function `w(t)`, zero outside the support.
    pub fn value(&self, t: f64) -> f64 {
        if t < self.t0 || t > self.t1 {
            return 0.0;
        }
        self.regulator.edge(t - self.t0) * self.regulator.edge(self.t1 - t)
    }

    /// Shortest time scale of `w`, used to bound quadrature panels.
    pub fn resolution(&self) -> f64 {
        match self.regulator {
            Regulator::None => self.duration(),
            Regulator::Ramp { gamma, shape: RampShape::Gaussian } => gamma / 6.0,
            Regulator::Ramp { gamma, shape: RampShape::SinSquared } => gamma / 4.0,
        }
    }

    /// Times where `w` may be non-smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![self.t0, self.t1];
        if let Regulator::Ramp { gamma, shape } = self.regulator {
            let len = match shape {
                RampShape::Gaussian => 2.0 * gamma,
                RampShape::SinSquared => gamma,
            };
            for t in [self.t0 + len, self.t1 - len] {
                if t > self.t0 && t < self.t1 {
                    b.push(t);
                }
            }
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn abrupt_window_is_indicator() {
        let w = Window::abrupt(0.0, 2.0).unwrap();
        assert_eq!(w.value(-0.1), 0.0);
        assert_eq!(w.value(1.0), 1.0);
        assert_eq!(w.value(2.1), 0.0);
    }

    #[test]
    fn gaussian_ramp_is_symmetric_and_flat_in_middle() {
        let w = Window::new(0.0, 40.0, Regulator::ramp(6.0)).unwrap();
        assert_relative_eq!(w.value(6.0), 0.5, epsilon = 1e-12);
        assert_relative_eq!(w.value(34.0), 0.5, epsilon = 1e-12);
        assert_relative_eq!(w.value(20.0), 1.0, epsilon = 1e-12);
        assert_eq!(w.value(0.0), 0.0);
        assert_eq!(w.value(12.0), 1.0);
        for t in [1.0, 2.5, 5.0, 8.0] {
            assert_relative_eq!(w.value(t), w.value(40.0 - t), epsilon = 1e-14);
        }
    }

    #[test]
    fn sin2_ramp_edges() {
        let r = Regulator::Ramp { gamma: 2.0, shape: RampShape::SinSquared };
        let w = Window::new(0.0, 10.0, r).unwrap();
        assert_relative_eq!(w.value(1.0), 0.5, epsilon = 1e-14);
        assert_eq!(w.value(5.0), 1.0);
        assert_eq!(w.breakpoints(), vec![0.0, 2.0, 8.0, 10.0]);
    }

    #[test]
    fn suppression_matches_numeric_transform() {
        // Fourier transform of the normalised edge derivative, by brute force.
        for (shape, gamma, tol) in [(RampShape::Gaussian, 3.0, 1e-6), (RampShape::SinSquared, 3.0, 1e-5)] {
            let reg = Regulator::Ramp { gamma, shape };
            let w = Window::new(0.0, 100.0, reg).unwrap();
            for omega in [0.3, 1.0, 2.0] {
                let n = 200_000;
                let h = 50.0 / n as f64;
                let (mut re, mut im) = (0.0, 0.0);
                for i in 0..n {
                    let t = (i as f64 + 0.5) * h;
                    let d = (w.value(t + 1e-5) - w.value(t - 1e-5)) / 2e-5;
                    re += d * (omega * t).cos() * h;
                    im += d * (omega * t).sin() * h;
                }
                let mag = (re * re + im * im).sqrt();
                assert!((mag - reg.boundary_suppression(omega)).abs() < tol, "{shape:?} {omega}: {mag}");
            }
        }
    }

    #[test]
    fn rejects_bad_windows() {
        assert!(Window::abrupt(1.0, 1.0).is_err());
        assert!(Window::new(0.0, 1.0, Regulator::Ramp { gamma: -1.0, shape: RampShape::Gaussian }).is_err());
    }
}
