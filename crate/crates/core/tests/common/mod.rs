//! Oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use unruh_lab::bogoliubov::{mode_grid_1d, DispersionKind, Mode, ModeSet};
use unruh_lab::gaussian::*;
use unruh_lab::perturbation::Channel;
use unruh_lab::switching::{Regulator, Window};
use unruh_lab::trajectory::Trajectory;

/// Complex Gamma function (Lanczos, g = 7) with reflection.
pub fn gamma(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let pi = std::f64::consts::PI;
    if z.re < 0.5 {
        return pi / ((z * pi).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(C[0], 0.0);
    for (i, c) in C.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * pi).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// Infinite-window probability from the Gamma-function representation of
/// the chirp integral: `(c/a)^2 |Gamma(-i s x)|^2 exp(-pi s x)`.
pub fn gamma_oracle(omega_d: f64, a: f64, c_s: f64, channel: Channel) -> f64 {
    let tau = c_s / a;
    let x = omega_d * tau;
    let s = channel.sign();
    let g = gamma(Complex64::new(0.0, -s * x));
    tau * tau * g.norm_sqr() * (-std::f64::consts::PI * s * x).exp()
}

/// Dense state-vector integration of detector plus two modes in a truncated
/// Fock basis.
struct Fock {
    dim: usize,
    cut: usize,
}

impl Fock {
    fn index(&self, n: [usize; 3]) -> usize {
        (n[0] * self.cut + n[1]) * self.cut + n[2]
    }

    /// Matrix elements of `a_i^+ a_j` (dag_j = false) or `a_i^+ a_j^+` (true).
    fn pair(&self, i: usize, j: usize, dag_j: bool) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for a in 0..self.cut {
            for b in 0..self.cut {
                for c in 0..self.cut {
                    let n = [a, b, c];
                    let mut m = n;
                    let mut amp;
                    if dag_j {
                        if m[j] + 1 >= self.cut {
                            continue;
                        }
                        amp = ((m[j] + 1) as f64).sqrt();
                        m[j] += 1;
                    } else {
                        if m[j] == 0 {
                            continue;
                        }
                        amp = (m[j] as f64).sqrt();
                        m[j] -= 1;
                    }
                    if m[i] + 1 >= self.cut {
                        continue;
                    }
                    amp *= ((m[i] + 1) as f64).sqrt();
                    m[i] += 1;
                    out.push((self.index(m), self.index(n), amp));
                }
            }
        }
        out
    }
}

/// Detector occupation after a near-resonant two-mode pass, from the
/// Gaussian engine and from the Fock-space integrator.
pub fn fock_comparison() -> (f64, f64) {
    // The first mode is slow enough that k v nearly matches gap + omega, so
    // pair creation is close to resonant and the detector is well excited.
    let (gap, g, t_end) = (0.25, 1.0 / 50.0, 20.0);
    let modes = vec![Mode::custom([1.3, 0.0], 0.2, 1.2, 0.66), Mode::custom([-2.1, 0.0], 2.1, 1.05, 0.32)];
    let traj = Trajectory::uniform(0.37).unwrap().shifted([0.8, 0.0]);
    let set = ModeSet::from_modes(modes.clone(), 1.0);
    let sys = System::new(set, traj.clone(), gap, CouplingSchedule::new(g, Window::abrupt(0.0, t_end).unwrap())).unwrap();
    let n_gauss = detector_occupation(
        &evolve(&sys, &GaussianState::vacuum(2), 0.0, t_end, &EvolveOptions { dt: Some(1e-3), ..Default::default() })
            .unwrap()
            .state,
        true,
    );

    let f = Fock { dim: 512, cut: 8 };
    let hop: Vec<_> = (1..3).map(|k| f.pair(0, k, false)).collect();
    let sq: Vec<_> = (1..3).map(|k| f.pair(0, k, true)).collect();
    let mut diag = vec![0.0; f.dim];
    for a in 0..8 {
        for b in 0..8 {
            for c in 0..8 {
                diag[f.index([a, b, c])] = gap * a as f64 + modes[0].omega * b as f64 + modes[1].omega * c as f64;
            }
        }
    }
    let i = Complex64::new(0.0, 1.0);
    let apply_h = |t: f64, psi: &[Complex64], out: &mut [Complex64]| {
        for (o, (d, p)) in out.iter_mut().zip(diag.iter().zip(psi)) {
            *o = *p * *d;
        }
        let x = traj.position(t)[0];
        for k in 0..2 {
            let th = modes[k].k[0] * x;
            let a = g * modes[k].u * Complex64::from_polar(1.0, th);
            let b = g * modes[k].v * Complex64::from_polar(1.0, -th);
            for &(r, c, m) in &hop[k] {
                out[r] += a * m * psi[c];
                out[c] += a.conj() * m * psi[r];
            }
            for &(r, c, m) in &sq[k] {
                out[r] += b * m * psi[c];
                out[c] += b.conj() * m * psi[r];
            }
        }
        for o in out.iter_mut() {
            *o *= -i;
        }
    };
    let mut psi = vec![Complex64::new(0.0, 0.0); f.dim];
    psi[0] = Complex64::new(1.0, 0.0);
    let h = 1e-3;
    let steps = (t_end / h).round() as usize;
    let mut k1 = vec![Complex64::new(0.0, 0.0); f.dim];
    let (mut k2, mut k3, mut k4, mut tmp) = (k1.clone(), k1.clone(), k1.clone(), k1.clone());
    for s in 0..steps {
        let t = s as f64 * h;
        apply_h(t, &psi, &mut k1);
        for j in 0..f.dim {
            tmp[j] = psi[j] + k1[j] * (0.5 * h);
        }
        apply_h(t + 0.5 * h, &tmp, &mut k2);
        for j in 0..f.dim {
            tmp[j] = psi[j] + k2[j] * (0.5 * h);
        }
        apply_h(t + 0.5 * h, &tmp, &mut k3);
        for j in 0..f.dim {
            tmp[j] = psi[j] + k3[j] * h;
        }
        apply_h(t + h, &tmp, &mut k4);
        for j in 0..f.dim {
            psi[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0);
        }
    }
    let mut n_fock = 0.0;
    for a in 0..8 {
        for b in 0..8 {
            for c in 0..8 {
                n_fock += a as f64 * psi[f.index([a, b, c])].norm_sqr();
            }
        }
    }
    (n_gauss, n_fock)
}


pub fn single_mode_system(u: f64, v: f64, g: f64, t1: f64) -> System {
    let modes = ModeSet::from_modes(vec![Mode::custom([1.0, 0.0], 0.0, u, v)], 1.0);
    let sched = CouplingSchedule::new(g, Window::abrupt(0.0, t1).unwrap());
    System::new(modes, Trajectory::uniform(0.0).unwrap(), 0.0, sched).unwrap()
}

pub fn fig1_system(g: f64, gamma: f64) -> System {
    let grid = mode_grid_1d(std::f64::consts::TAU / 20.0, 20, 1.0, 1e6, DispersionKind::LinearCutoff).unwrap();
    let win = Window::new(-gamma, 4.0 + gamma, Regulator::ramp(gamma)).unwrap();
    System::new(grid, Trajectory::launched_unruh(2.0, 1.0).unwrap(), 1.0, CouplingSchedule::new(g, win)).unwrap()
}

/// Detector occupation after a resonant pair-creation pass, and the exact
/// value `sinh^2(g t)`.
pub fn two_mode_squeezing() -> (f64, f64) {
    let (g, t) = (0.05, 10.0);
    let sys = single_mode_system(0.0, 1.0, g, t);
    let out = evolve(&sys, &GaussianState::vacuum(1), 0.0, t, &EvolveOptions { dt: Some(0.01), ..Default::default() }).unwrap();
    (detector_occupation(&out.state, true), (g * t).sinh().powi(2))
}

#[derive(Debug, Clone, Copy)]
pub struct StepHalving {
    /// `(n(h) - n(h/2)) / (n(h/2) - n(h/4))`, 16 for a fourth-order scheme.
    pub ratio: f64,
    /// Difference between the default step and half of it.
    pub default_error: f64,
}

pub fn step_halving() -> StepHalving {
    let sys = fig1_system(0.1, 1.0);
    let w = sys.schedule.window;
    let h = 4.0 * sys.default_dt();
    let n = |dt: f64| PassChannel::compute(&sys, w.t0, w.t1, Some(dt)).unwrap().apply(&GaussianState::vacuum(20)).occupation(true);
    let (a, b, c) = (n(h), n(h / 2.0), n(h / 4.0));
    StepHalving { ratio: (a - b) / (b - c), default_error: (c - n(sys.default_dt() / 2.0)).abs() }
}
