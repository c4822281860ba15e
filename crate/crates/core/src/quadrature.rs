//! Composite Gauss-Legendre quadrature for oscillatory integrals
//! `int_{t0}^{t1} w(t) exp(i phi(t)) dt`.
//!
//! Panels are sized so that the phase advances by at most a fixed fraction of
//! a cycle across each one; the whole partition is then halved until two
//! successive estimates agree.

use num_complex::Complex64;

use crate::error::{Error, Result};

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Relative agreement required between successive refinements.
    pub rel_tol: f64,
    /// Absolute floor, relative to `int |w| dt`.
    pub abs_floor: f64,
    /// Maximum phase advance per panel, radians.
    pub max_phase_step: f64,
    /// Upper bound on panel width regardless of phase.
    pub max_panel: f64,
    /// Number of halvings attempted before giving up.
    pub max_refinements: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-8,
            abs_floor: 1e-13,
            max_phase_step: std::f64::consts::TAU / 10.0,
            max_panel: f64::INFINITY,
            max_refinements: 6,
        }
    }
}

/// Integral of `w(t) exp(i phase(t))` over `[t0, t1]`.
///
/// `phase` returns `(phi(t), phi'(t))`; the derivative only drives panel
/// sizing. `breaks` lists points where `w` may be non-smooth.
pub fn oscillatory_integral<P, W>(
    phase: P,
    weight: W,
    t0: f64,
    t1: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<Complex64>
where
    P: Fn(f64) -> (f64, f64),
    W: Fn(f64) -> f64,
{
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::domain(format!("bad integration range [{t0}, {t1}]")));
    }
    if t1 == t0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let edges = partition(&phase, t0, t1, breaks, opts)?;

    let mut scale = 0.0;
    let mut prev = Complex64::new(0.0, 0.0);
    for (a, b) in edges.windows(2).map(|p| (p[0], p[1])) {
        let (i, s) = panel(&phase, &weight, a, b);
        prev += i;
        scale += s;
    }
    let floor = opts.abs_floor * scale.max(f64::MIN_POSITIVE);

    let mut best = prev;
    for level in 1..=opts.max_refinements {
        let parts = 1usize << level;
        let mut cur = Complex64::new(0.0, 0.0);
        for (a, b) in edges.windows(2).map(|p| (p[0], p[1])) {
            let h = (b - a) / parts as f64;
            for j in 0..parts {
                let lo = a + j as f64 * h;
                let hi = if j + 1 == parts { b } else { lo + h };
                cur += panel(&phase, &weight, lo, hi).0;
            }
        }
        let diff = (cur - prev).norm();
        best = cur;
        if diff <= opts.rel_tol * cur.norm() + floor {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Accuracy {
        msg: format!("oscillatory quadrature on [{t0}, {t1}] did not reach rel_tol {}", opts.rel_tol),
        best_re: best.re,
        best_im: best.im,
    })
}

fn panel<P, W>(phase: &P, weight: &W, a: f64, b: f64) -> (Complex64, f64)
where
    P: Fn(f64) -> (f64, f64),
    W: Fn(f64) -> f64,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (x, wq) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        let t = mid + half * x;
        let w = weight(t);
        if w != 0.0 {
            acc += Complex64::from_polar(w * wq, phase(t).0);
            mag += w.abs() * wq;
        }
    }
    (acc * half, mag * half)
}

fn partition<P>(phase: &P, t0: f64, t1: f64, breaks: &[f64], opts: &QuadOptions) -> Result<Vec<f64>>
where
    P: Fn(f64) -> (f64, f64),
{
    let mut stops: Vec<f64> = breaks.iter().copied().filter(|&b| b > t0 && b < t1).collect();
    stops.push(t1);
    stops.sort_by(f64::total_cmp);

    let min_width = (t1 - t0) * 1e-12;
    let mut edges = vec![t0];
    let mut t = t0;
    for stop in stops {
        while t < stop {
            let mut h = step_for(phase(t).1, opts).min(stop - t);
            // Shrink if the rate is larger at the far end.
            loop {
                let h2 = step_for(phase(t + h).1, opts);
                if h2 >= h || h <= min_width {
                    break;
                }
                h = h2.max(min_width);
            }
            t = if stop - (t + h) < min_width { stop } else { t + h };
            edges.push(t);
            if edges.len() > 50_000_000 {
                return Err(Error::domain("oscillatory integrand needs too many panels"));
            }
        }
    }
    Ok(edges)
}

fn step_for(rate: f64, opts: &QuadOptions) -> f64 {
    let r = rate.abs();
    if !r.is_finite() {
        return 0.0;
    }
    if r == 0.0 {
        opts.max_panel
    } else {
        (opts.max_phase_step / r).min(opts.max_panel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let opts = QuadOptions { max_panel: 1.0, ..Default::default() };
        let r = oscillatory_integral(|_| (0.0, 0.0), |t| t * t, 0.0, 3.0, &[], &opts).unwrap();
        assert_relative_eq!(r.re, 9.0, max_relative = 1e-14);
        assert_eq!(r.im, 0.0);
    }

    #[test]
    fn pure_oscillation() {
        let w = 37.0;
        let opts = QuadOptions::default();
        let r = oscillatory_integral(|t| (w * t, w), |_| 1.0, 0.0, 5.0, &[], &opts).unwrap();
        let exact = Complex64::new((w * 5.0).sin() / w, (1.0 - (w * 5.0).cos()) / w);
        assert_relative_eq!(r.re, exact.re, epsilon = 1e-12);
        assert_relative_eq!(r.im, exact.im, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_chirp() {
        // int exp(-t^2) exp(i t^2 / 2) = sqrt(pi / (1 - i/2))
        let opts = QuadOptions { max_panel: 0.2, ..Default::default() };
        let r = oscillatory_integral(|t| (0.5 * t * t, t), |t| (-t * t).exp(), -8.0, 8.0, &[], &opts)
            .unwrap();
        let exact = (Complex64::new(std::f64::consts::PI, 0.0) / Complex64::new(1.0, -0.5)).sqrt();
        assert_relative_eq!(r.re, exact.re, epsilon = 1e-12);
        assert_relative_eq!(r.im, exact.im, epsilon = 1e-12);
    }

    #[test]
    fn reports_accuracy_failure_with_estimate() {
        let opts = QuadOptions { max_phase_step: 1e3, max_refinements: 1, ..Default::default() };
        let err = oscillatory_integral(|t| (500.0 * t, 1e-9), |_| 1.0, 0.0, 1.0, &[], &opts)
            .unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }
}
