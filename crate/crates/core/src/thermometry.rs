//! Effective temperatures from detector occupations, steady-state
//! extraction, gap scans and finite-size oscillation measures.

use crate::error::{Error, Result};

/// Occupations this close below zero are roundoff and read as zero.
const OCCUPATION_SLACK: f64 = 1e-12;

/// Planck-law temperature `omega_d / ln(1 + 1/n)`.
pub fn temperature_from_occupation(n: f64, omega_d: f64) -> Result<f64> {
    if !(n >= -OCCUPATION_SLACK) || !n.is_finite() {
        return Err(Error::domain(format!("occupation must be non-negative, got {n}")));
    }
    if !(omega_d > 0.0) {
        return Err(Error::domain(format!("gap must be positive, got {omega_d}")));
    }
    if n <= 0.0 {
        return Ok(0.0);
    }
    Ok(omega_d / (1.0 / n).ln_1p())
}

pub fn occupation_from_temperature(t: f64, omega_d: f64) -> f64 {
    crate::gaussian::thermal_occupation(omega_d, t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub value: f64,
    pub converged: bool,
    /// Number of trailing points averaged.
    pub window: usize,
    /// Fitted change per 10 points over the window, relative to `value`.
    pub relative_trend: f64,
}

/// Average of the trailing `window_fraction` of `series`; converged when the
/// linear trend over that window is below 1% of the mean per 10 points.
pub fn steady_state(series: &[f64], window_fraction: f64) -> Result<SteadyState> {
    if series.len() < 10 {
        return Err(Error::domain(format!("steady state needs at least 10 points, got {}", series.len())));
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::domain(format!("window fraction {window_fraction} outside (0, 1]")));
    }
    let w = ((series.len() as f64 * window_fraction).ceil() as usize).clamp(2, series.len());
    let tail = &series[series.len() - w..];
    let n = w as f64;
    let mean = tail.iter().sum::<f64>() / n;
    let mx = 0.5 * (n - 1.0);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in tail.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (y - mean);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    let relative_trend = if mean != 0.0 { (10.0 * slope / mean).abs() } else if slope == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(SteadyState { value: mean, converged: relative_trend < 0.01, window: w, relative_trend })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalityScan {
    pub mean: f64,
    /// `(max - min) / mean`.
    pub relative_spread: f64,
    pub thermal: bool,
}

pub const DEFAULT_THERMAL_THRESHOLD: f64 = 0.05;

/// Gap-independence test over `(omega_d, T_ss)` pairs.
pub fn thermality_scan(points: &[(f64, f64)], threshold: f64) -> Result<ThermalityScan> {
    if points.len() < 3 {
        return Err(Error::domain(format!("thermality scan needs at least 3 gaps, got {}", points.len())));
    }
    let ts: Vec<f64> = points.iter().map(|p| p.1).collect();
    let mean = ts.iter().sum::<f64>() / ts.len() as f64;
    let max = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let relative_spread = if mean != 0.0 { (max - min) / mean } else { 0.0 };
    Ok(ThermalityScan { mean, relative_spread, thermal: relative_spread <= threshold })
}

/// RMS deviation over mean.
pub fn oscillation_metric(series: &[f64]) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean.abs()
}

/// Temperatures along a run, indexed by pass number or time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TemperatureSeries {
    pub points: Vec<(f64, f64)>,
}

impl TemperatureSeries {
    pub fn from_occupations(points: &[(f64, f64)], omega_d: f64) -> Result<Self> {
        let points = points
            .iter()
            .map(|&(x, n)| Ok((x, temperature_from_occupation(n, omega_d)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TemperatureSeries { points })
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn steady_state(&self, window_fraction: f64) -> Result<SteadyState> {
        steady_state(&self.values(), window_fraction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn planck_examples() {
        assert_relative_eq!(temperature_from_occupation(1.0, 1.0).unwrap(), 1.0 / 2f64.ln(), max_relative = 1e-15);
        assert_eq!(temperature_from_occupation(0.0, 1.0).unwrap(), 0.0);
        let n_u = 1.0 / std::f64::consts::PI.exp_m1();
        assert_relative_eq!(n_u, 0.04517, epsilon = 1e-5);
        assert_relative_eq!(temperature_from_occupation(n_u, 1.0).unwrap(), 1.0 / std::f64::consts::PI, max_relative = 1e-14);
        assert!(temperature_from_occupation(-0.1, 1.0).is_err());
    }

    #[test]
    fn steady_state_examples() {
        let c = vec![0.3; 50];
        let s = steady_state(&c, 0.2).unwrap();
        assert_relative_eq!(s.value, 0.3, max_relative = 1e-14);
        assert!(s.converged);

        // Averaging the last 20% of 1 - exp(-n/30) up to n = 150 sits about
        // 1.1% below the asymptote.
        let sat: Vec<f64> = (0..=150).map(|n| 1.0 - (-(n as f64) / 30.0).exp()).collect();
        let s = steady_state(&sat, 0.2).unwrap();
        assert!(s.converged);
        assert!((s.value - 1.0).abs() < 0.012, "{}", s.value);

        let lin: Vec<f64> = (0..100).map(|n| 1.0 + 0.01 * n as f64).collect();
        assert!(!steady_state(&lin, 0.2).unwrap().converged);
        assert!(steady_state(&c[..9], 0.2).is_err());
    }

    #[test]
    fn scan_and_oscillation_examples() {
        let s = thermality_scan(&[(0.8, 0.3), (1.0, 0.3), (1.2, 0.3)], DEFAULT_THERMAL_THRESHOLD).unwrap();
        assert_eq!(s.relative_spread, 0.0);
        assert!(s.thermal);
        let s = thermality_scan(&[(0.8, 0.2), (1.0, 0.3), (1.2, 0.4)], DEFAULT_THERMAL_THRESHOLD).unwrap();
        assert!(!s.thermal);
        assert!(thermality_scan(&[(1.0, 1.0), (2.0, 1.0)], 0.05).is_err());

        assert_eq!(oscillation_metric(&[2.0; 10]), 0.0);
        let sine: Vec<f64> = (0..1000).map(|i| 1.0 + 0.1 * (std::f64::consts::TAU * i as f64 / 100.0).sin()).collect();
        assert_relative_eq!(oscillation_metric(&sine), 0.1 / 2f64.sqrt(), max_relative = 1e-10);
    }

    proptest! {
        #[test]
        fn temperature_monotone_and_scales(n in 1e-6f64..100.0, dn in 1e-6f64..10.0, w in 0.1f64..10.0, lam in 0.1f64..10.0) {
            let t1 = temperature_from_occupation(n, w).unwrap();
            let t2 = temperature_from_occupation(n + dn, w).unwrap();
            prop_assert!(t2 > t1);
            let ts = temperature_from_occupation(n, lam * w).unwrap();
            prop_assert!((ts - lam * t1).abs() <= 1e-12 * ts);
        }

        #[test]
        fn steady_state_robust_to_jitter(
            eps in 1e-4f64..0.05,
            jitter in proptest::collection::vec(-1.0f64..1.0, 200),
            base in 0.1f64..2.0,
        ) {
            let series: Vec<f64> = jitter.iter().map(|u| base * (1.0 + eps * u)).collect();
            let s = steady_state(&series, 0.2).unwrap();
            prop_assert!((s.value - base).abs() <= 3.0 * eps * base);
        }
    }
}
