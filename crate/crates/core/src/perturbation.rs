//! First-order transition amplitudes of the detector.
//!
//! For a mode `k` the excitation amplitude (detector up, phonon created) is
//! `v_k int w(t) exp(i (omega_d + omega_k) t - i k.x(t)) dt` and the
//! de-excitation amplitude (detector down, phonon created) is
//! `u_k int w(t) exp(i (omega_k - omega_d) t - i k.x(t)) dt`. On the effective
//! trajectory with linear dispersion both collapse to
//! `int w(t) exp(+-i omega_d t - i beta exp(-a t / c_s)) dt`, `beta = omega_k c_s / a`.

use num_complex::Complex64;

use crate::bogoliubov::{bogoliubov_coefficients, dispersion, Mode};
use crate::error::{Error, Result};
use crate::quadrature::{oscillatory_integral, QuadOptions};
use crate::switching::{normal_cdf, Regulator, Window};
use crate::trajectory::{saddle_point_time, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Detector goes up while a phonon is created (`+omega_d`).
    Excitation,
    /// Detector goes down while a phonon is created (`-omega_d`).
    Deexcitation,
}

impl Channel {
    pub fn sign(self) -> f64 {
        match self {
            Channel::Excitation => 1.0,
            Channel::Deexcitation => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeResult {
    pub omega_k: f64,
    pub channel: Channel,
    pub amplitude: Complex64,
}

impl AmplitudeResult {
    pub fn probability(&self) -> f64 {
        self.amplitude.norm_sqr()
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {x}")))
    }
}

fn quad_opts(window: &Window) -> QuadOptions {
    QuadOptions { max_panel: window.resolution().min(window.duration() / 4.0), ..Default::default() }
}

/// `int w(t) exp(i (gap t - beta exp(-rate t))) dt` over the window.
fn chirp_integral<W: Fn(f64) -> f64>(
    gap: f64,
    beta: f64,
    rate: f64,
    weight: W,
    t0: f64,
    t1: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<Complex64> {
    let phase = |t: f64| {
        let e = beta * (-rate * t).exp();
        (gap * t - e, gap + rate * e)
    };
    oscillatory_integral(phase, weight, t0, t1, breaks, opts)
}

/// Transition amplitude on the effective trajectory for linear dispersion,
/// with `u_k = v_k = 1`.
pub fn transition_amplitude(
    omega_k: f64,
    omega_d: f64,
    a: f64,
    c_s: f64,
    channel: Channel,
    window: &Window,
) -> Result<AmplitudeResult> {
    check_positive("omega_k", omega_k)?;
    check_positive("omega_d", omega_d)?;
    check_positive("a", a)?;
    check_positive("c_s", c_s)?;
    let amp = chirp_integral(
        channel.sign() * omega_d,
        omega_k * c_s / a,
        a / c_s,
        |t| window.value(t),
        window.t0,
        window.t1,
        &window.breakpoints(),
        &quad_opts(window),
    )?;
    Ok(AmplitudeResult { omega_k, channel, amplitude: amp })
}

/// Amplitude for an unbounded, adiabatically switched window.
///
/// The integrand is cut off by smooth edges placed where leakage is below
/// roundoff: early, where the chirp rate is large; late, after many detector
/// periods.
pub fn ideal_amplitude(omega_k: f64, omega_d: f64, a: f64, c_s: f64, channel: Channel) -> Result<AmplitudeResult> {
    check_positive("omega_k", omega_k)?;
    check_positive("omega_d", omega_d)?;
    check_positive("a", a)?;
    check_positive("c_s", c_s)?;
    let sp = saddle_point_time(omega_k, omega_d, a, c_s)?;
    let tau = c_s / a;
    let x = omega_d * tau;
    let sigma_a = 0.2 * tau;
    let t_a = sp.center - tau * (400.0 / x).ln_1p();
    let sigma_b = 9.0 / omega_d;
    let t_b = sp.center + 6.0 * tau + 5.0 * sp.half_width + 8.0 * sigma_b;
    let t0 = t_a - 8.0 * sigma_a;
    let t1 = t_b + 8.0 * sigma_b;
    let weight = |t: f64| normal_cdf((t - t_a) / sigma_a) * normal_cdf((t_b - t) / sigma_b);
    let opts = QuadOptions { max_panel: sigma_a.min(sigma_b) / 2.0, ..Default::default() };
    let amp = chirp_integral(channel.sign() * omega_d, omega_k * tau, 1.0 / tau, weight, t0, t1, &[], &opts)?;
    Ok(AmplitudeResult { omega_k, channel, amplitude: amp })
}

/// Closed-form probabilities for an infinite adiabatic window:
/// `2 pi c_s / (omega_d a) / (exp(2 pi x) - 1)` for excitation and
/// `2 pi c_s / (omega_d a) / (1 - exp(-2 pi x))` for de-excitation,
/// `x = omega_d c_s / a`. Independent of `omega_k`.
pub fn analytic_probability(omega_d: f64, a: f64, c_s: f64, channel: Channel) -> Result<f64> {
    check_positive("omega_d", omega_d)?;
    check_positive("a", a)?;
    check_positive("c_s", c_s)?;
    let x = omega_d * c_s / a;
    let pre = std::f64::consts::TAU * c_s / (omega_d * a);
    let t = std::f64::consts::TAU * x;
    Ok(match channel {
        Channel::Excitation => pre / t.exp_m1(),
        Channel::Deexcitation => pre / -(-t).exp_m1(),
    })
}

/// Probability for a detector switched off at the saddle time with the given
/// regulator: `|A + s/(i omega_d) exp(-+i omega_d t_s)|^2`, where `A` is the
/// adiabatic amplitude and `s` the regulator's boundary suppression.
pub fn abrupt_switch_probability(
    omega_k: f64,
    omega_d: f64,
    a: f64,
    c_s: f64,
    channel: Channel,
    regulator: Regulator,
) -> Result<f64> {
    let ideal = ideal_amplitude(omega_k, omega_d, a, c_s, channel)?;
    let t_s = saddle_point_time(omega_k, omega_d, a, c_s)?.center;
    let s = regulator.boundary_suppression(omega_d);
    let boundary = Complex64::from_polar(s / omega_d, -channel.sign() * omega_d * t_s)
        / Complex64::new(0.0, 1.0);
    Ok((ideal.amplitude + boundary).norm_sqr())
}

/// Amplitude of `channel` for an arbitrary trajectory and mode, including
/// the Bogoliubov weight (`v` for excitation, `u` for de-excitation).
pub fn trajectory_amplitude(
    traj: &Trajectory,
    mode: &Mode,
    omega_d: f64,
    channel: Channel,
    window: &Window,
) -> Result<Complex64> {
    check_positive("omega_d", omega_d)?;
    let (gap, weight) = match channel {
        Channel::Excitation => (omega_d, mode.v),
        Channel::Deexcitation => (-omega_d, mode.u),
    };
    let [kx, ky] = mode.k;
    let phase = |t: f64| {
        let ([x, y], [vx, vy]) = traj.state(t);
        ((gap + mode.omega) * t - (kx * x + ky * y), gap + mode.omega - (kx * vx + ky * vy))
    };
    let amp = oscillatory_integral(phase, |t| window.value(t), window.t0, window.t1, &window.breakpoints(), &quad_opts(window))?;
    Ok(amp * weight)
}

/// Status of the effective gap once the dispersion correction is included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapStatus {
    Regular,
    /// Effective gap within roundoff of zero: the amplitude grows with the
    /// window length instead of saturating.
    Vanishing,
    /// Effective gap has changed sign.
    Inverted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionAmplitude {
    pub result: AmplitudeResult,
    pub effective_gap: f64,
    pub status: GapStatus,
}

/// Transition amplitude on the effective trajectory with the full Bogoliubov
/// dispersion. The residual `omega_k - c_s k` raises the excitation gap and
/// lowers the de-excitation gap to `omega_d - (omega_k - c_s k)`.
pub fn dispersion_corrected_amplitude(
    k: f64,
    omega_d: f64,
    a: f64,
    c_s: f64,
    m: f64,
    channel: Channel,
    window: &Window,
) -> Result<DispersionAmplitude> {
    check_positive("k", k)?;
    check_positive("omega_d", omega_d)?;
    check_positive("a", a)?;
    let omega = dispersion(k, c_s, m)?;
    let (u, v) = bogoliubov_coefficients(k, c_s, m)?;
    let corr = -crate::bogoliubov::gap_correction(k, c_s, m);
    let (eff, weight) = match channel {
        Channel::Excitation => (omega_d + corr, v),
        Channel::Deexcitation => (omega_d - corr, u),
    };
    let status = if eff.abs() <= 1e-9 * omega_d {
        GapStatus::Vanishing
    } else if eff < 0.0 {
        GapStatus::Inverted
    } else {
        GapStatus::Regular
    };
    let amp = chirp_integral(
        channel.sign() * eff,
        k * c_s * c_s / a,
        a / c_s,
        |t| window.value(t),
        window.t0,
        window.t1,
        &window.breakpoints(),
        &quad_opts(window),
    )?;
    Ok(DispersionAmplitude {
        result: AmplitudeResult { omega_k: omega, channel, amplitude: amp * weight },
        effective_gap: eff,
        status,
    })
}

/// Excitation probability for uniform motion at speed `v` along the mode
/// direction over `[-t_half, t_half]` with an abrupt window:
/// `v_k^2 (2 sin(D t_half) / D)^2`, `D = omega_d + omega_k - k v`.
pub fn uniform_motion_probability(v: f64, omega_d: f64, mode: &Mode, t_half: f64) -> Result<f64> {
    check_positive("omega_d", omega_d)?;
    check_positive("t_half", t_half)?;
    if !v.is_finite() {
        return Err(Error::domain("speed must be finite"));
    }
    let d = omega_d + mode.omega - mode.k[0] * v;
    let x = d * t_half;
    let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    let f = 2.0 * t_half * sinc;
    Ok(mode.v * mode.v * f * f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetailedBalanceFit {
    pub temperature: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of `ln(P+/P-)`.
    pub residual: f64,
}

/// Least-squares fit of `ln(P+/P-)` against `omega_d`; the temperature is
/// `-1/slope`. Input points are `(omega_d, P+, P-)`.
pub fn detailed_balance_fit(points: &[(f64, f64, f64)]) -> Result<DetailedBalanceFit> {
    if points.len() < 3 {
        return Err(Error::domain(format!("need at least 3 gaps, got {}", points.len())));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(w, pp, pm) in points {
        if !(pp > 0.0 && pm > 0.0 && w.is_finite()) {
            return Err(Error::domain(format!("non-positive probability at omega_d = {w}")));
        }
        xs.push(w);
        ys.push((pp / pm).ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("all gaps coincide".into()));
    }
    let slope = sxy / sxx;
    let spread = ys.iter().map(|y| (y - my).abs()).fold(0.0, f64::max);
    if !(slope < 0.0) || slope.abs() * sxx.sqrt() <= 1e-12 * (1.0 + spread) {
        return Err(Error::Fit(format!("slope {slope} does not define a positive temperature")));
    }
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DetailedBalanceFit { temperature: -1.0 / slope, slope, intercept, residual })
}
