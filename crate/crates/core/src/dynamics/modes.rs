//! Brute-force oracle: the emitter coupled to a discretized plasmon continuum.
//!
//! Modes sit on a uniform detuning grid `δ_j` covering `[−δ_max, δ_max]`
//! with spacing `dδ`, each coupled with strength `G = g·√(dδ/c)` so that the
//! emergent decay rate `2πG²/dδ` equals Γ_p:
//!
//! ```text
//! dβ_j/dt = −iδ_j β_j + iG β_e
//! dβ_e/dt = −(Γ′/2) β_e + iΩ β_s + iG Σ_j β_j
//! dβ_s/dt = iΩ* β_e
//! ```
//!
//! The free rotation of each mode and the Γ′ decay are integrated exactly
//! (Lawson RK4). The outgoing field is rebuilt from the final mode amplitudes.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{conservation_residual, InitialState, Trajectory};
use crate::error::{Error, Result};
use crate::model::{ComplexSignal, PhysicalParams, Unit};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Discretization of the plasmon continuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpectrum {
    pub n_modes: usize,
    /// Half-width of the detuning band, rad/s.
    pub delta_max: f64,
}

impl ModeSpectrum {
    pub fn new(n_modes: usize, delta_max: f64) -> Result<Self> {
        if n_modes == 0 || !(delta_max.is_finite() && delta_max > 0.0) {
            return Err(Error::ModeGridError(format!(
                "need n_modes ≥ 1 and delta_max > 0, got {n_modes} and {delta_max}"
            )));
        }
        Ok(Self { n_modes, delta_max })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.delta_max / self.n_modes as f64
    }

    /// Mode detunings at the cell midpoints of the band.
    pub fn detunings(&self) -> Vec<f64> {
        let d = self.spacing();
        (0..self.n_modes)
            .map(|j| -self.delta_max + (j as f64 + 0.5) * d)
            .collect()
    }

    /// Time after which the discrete bath re-focuses, 2π/dδ.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.spacing()
    }
}

/// Integrates the mode-resolved model on the grid of `omega`.
///
/// `initial_modes`, when given, holds the initial amplitude of each mode
/// (an incoming photon); otherwise the field starts in vacuum.
pub fn simulate_mode_resolved(
    params: &PhysicalParams,
    omega: &ComplexSignal,
    initial_modes: Option<&[Complex64]>,
    spectrum: ModeSpectrum,
    init: InitialState,
) -> Result<Trajectory> {
    omega.ensure_unit(Unit::Rate)?;
    let grid = *omega.grid();
    let span = grid.t_end() - grid.t_start();
    if span > spectrum.recurrence_time() {
        return Err(Error::ModeGridError(format!(
            "run of {span:e} s exceeds the bath recurrence time {:e} s; use more modes",
            spectrum.recurrence_time()
        )));
    }
    let nm = spectrum.n_modes;
    let mut modes: Vec<Complex64> = match initial_modes {
        Some(m) if m.len() == nm => m.to_vec(),
        Some(m) => {
            return Err(Error::ModeGridError(format!(
                "{} initial amplitudes for {nm} modes",
                m.len()
            )))
        }
        None => vec![Complex64::new(0.0, 0.0); nm],
    };
    let photons0: f64 = modes.iter().map(|m| m.norm_sqr()).sum();

    let dd = spectrum.spacing();
    let deltas = spectrum.detunings();
    let coupling = params.g() * (dd / params.c()).sqrt();
    let gq = params.gamma_prime();

    let dt = grid.dt();
    let rate_bound = spectrum
        .delta_max
        .max(params.gamma_p())
        .max(omega.max_abs());
    let sub = (dt * rate_bound / 0.25).ceil().max(1.0) as usize;
    let h = dt / sub as f64;

    let rot_full: Vec<Complex64> = deltas
        .iter()
        .map(|&d| Complex64::from_polar(1.0, -d * h))
        .collect();
    let rot_half: Vec<Complex64> = deltas
        .iter()
        .map(|&d| Complex64::from_polar(1.0, -0.5 * d * h))
        .collect();
    let e_full = (-0.5 * gq * h).exp();
    let e_half = (-0.25 * gq * h).exp();

    let mut be = init.beta_e0;
    let mut bs = init.beta_s0;
    let mut loss = 0.0;
    let mut out_e = vec![be];
    let mut out_s = vec![bs];
    let mut stage = vec![Complex64::new(0.0, 0.0); nm];
    let om = omega.samples();

    // Each mode only sees β_e, so its RK4 stage derivatives are all iG·β_e(stage).
    for cell in 0..grid.n() - 1 {
        let (o0, o1) = (om[cell], om[cell + 1]);
        for j in 0..sub {
            let x0 = j as f64 / sub as f64;
            let xm = (j as f64 + 0.5) / sub as f64;
            let x1 = (j as f64 + 1.0) / sub as f64;
            let om0 = o0 + (o1 - o0) * x0;
            let omm = o0 + (o1 - o0) * xm;
            let om1 = o0 + (o1 - o0) * x1;

            // stage 1
            let sum1: Complex64 = modes.iter().sum();
            let k1e = I * (om0 * bs + coupling * sum1);
            let k1s = I * om0.conj() * be;
            let k1m = I * coupling * be;
            // stage 2: u = E_half(u_n + h/2 k1)
            let u2e = e_half * (be + 0.5 * h * k1e);
            let u2s = bs + 0.5 * h * k1s;
            let mut sum2 = Complex64::new(0.0, 0.0);
            for (st, (m, r)) in stage.iter_mut().zip(modes.iter().zip(&rot_half)) {
                *st = r * (m + 0.5 * h * k1m);
                sum2 += *st;
            }
            let k2e = I * (omm * u2s + coupling * sum2);
            let k2s = I * omm.conj() * u2e;
            let k2m = I * coupling * u2e;
            // stage 3: u = E_half u_n + h/2 k2
            let u3e = e_half * be + 0.5 * h * k2e;
            let u3s = bs + 0.5 * h * k2s;
            let mut sum3 = Complex64::new(0.0, 0.0);
            for (m, r) in modes.iter().zip(&rot_half) {
                sum3 += r * m + 0.5 * h * k2m;
            }
            let k3e = I * (omm * u3s + coupling * sum3);
            let k3s = I * omm.conj() * u3e;
            let k3m = I * coupling * u3e;
            // stage 4: u = E_full u_n + h E_half k3
            let u4e = e_full * be + h * e_half * k3e;
            let u4s = bs + h * k3s;
            let mut sum4 = Complex64::new(0.0, 0.0);
            for ((m, rf), rh) in modes.iter().zip(&rot_full).zip(&rot_half) {
                sum4 += rf * m + h * rh * k3m;
            }
            let k4e = I * (om1 * u4s + coupling * sum4);
            let k4s = I * om1.conj() * u4e;
            let k4m = I * coupling * u4e;

            loss += gq
                * (h / 6.0)
                * (be.norm_sqr() + 2.0 * (u2e.norm_sqr() + u3e.norm_sqr()) + u4e.norm_sqr());
            be = e_full * be + (h / 6.0) * (e_full * k1e + 2.0 * e_half * (k2e + k3e) + k4e);
            bs += (h / 6.0) * (k1s + 2.0 * (k2s + k3s) + k4s);
            let mix = (h / 6.0) * (2.0 * (k2m + k3m));
            for ((m, rf), rh) in modes.iter_mut().zip(&rot_full).zip(&rot_half) {
                *m = rf * *m + (h / 6.0) * (rf * k1m + k4m) + rh * mix;
            }
        }
        if !(be.re.is_finite() && bs.re.is_finite()) {
            return Err(Error::StiffnessError(
                "non-finite amplitudes in mode oracle".into(),
            ));
        }
        out_e.push(be);
        out_s.push(bs);
    }

    let photons: f64 = modes.iter().map(|m| m.norm_sqr()).sum();
    // E_out(t) = (1/√(2π))·√(dδ/c)·Σ_j β_j(T) e^{−iδ_j (t − T)}
    let prefactor = (dd / params.c()).sqrt() / (2.0 * PI).sqrt();
    let t_end = grid.t_end();
    let e_out = ComplexSignal::from_fn(grid, Unit::Field, |t| {
        let tau = t - t_end;
        modes
            .iter()
            .zip(&deltas)
            .map(|(m, &d)| m * Complex64::from_polar(1.0, -d * tau))
            .sum::<Complex64>()
            * prefactor
    });

    let mut traj = Trajectory {
        beta_e: ComplexSignal::new(grid, out_e, Unit::Amplitude)?,
        beta_s: ComplexSignal::new(grid, out_s, Unit::Amplitude)?,
        e_out,
        conservation_residual: 0.0,
        loss_integral: loss,
        net_emission: photons - photons0,
    };
    traj.conservation_residual = conservation_residual(&traj);
    Ok(traj)
}

/// Least-squares decay rate of |β_e|² over the samples with
/// `lo ≤ |β_e|² ≤ hi`.
pub fn fitted_decay_rate(beta_e: &ComplexSignal, lo: f64, hi: f64) -> Option<f64> {
    let grid = beta_e.grid();
    let pts: Vec<(f64, f64)> = beta_e
        .samples()
        .iter()
        .enumerate()
        .filter_map(|(i, b)| {
            let p = b.norm_sqr();
            (p >= lo && p <= hi).then(|| (grid.time(i), p.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    Some(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeGrid;

    fn params() -> PhysicalParams {
        PhysicalParams::with_purcell(1.6e10, 1.5e8, 100.0).unwrap()
    }

    #[test]
    fn spectrum_layout() {
        let s = ModeSpectrum::new(4, 2.0).unwrap();
        assert_eq!(s.detunings(), vec![-1.5, -0.5, 0.5, 1.5]);
        assert!(ModeSpectrum::new(0, 1.0).is_err());
    }

    #[test]
    fn wigner_weisskopf_rate() {
        let p = params();
        let gamma = p.total_decay();
        let spectrum = ModeSpectrum::new(4000, 30.0 * p.gamma_p()).unwrap();
        let grid = TimeGrid::spanning(0.0, 12.0 / gamma, 241).unwrap();
        let om = ComplexSignal::zeros(grid, Unit::Rate);
        let tr = simulate_mode_resolved(&p, &om, None, spectrum, InitialState::excited()).unwrap();
        let rate = fitted_decay_rate(&tr.beta_e, 1e-4, 0.5).unwrap();
        assert!((rate / gamma - 1.0).abs() < 0.02, "{}", rate / gamma);
        assert!(
            tr.conservation_residual < 1e-6,
            "{}",
            tr.conservation_residual
        );
    }

    #[test]
    fn uncoupled_amplitudes_are_constant() {
        // g → 0 leaves only Γ′, which we also make negligible over the run
        let p = PhysicalParams::new(1e-3, 1.5e8, 1e-30).unwrap();
        let grid = TimeGrid::spanning(0.0, 1e-12, 50).unwrap();
        let om = ComplexSignal::zeros(grid, Unit::Rate);
        let spectrum = ModeSpectrum::new(16, 1e12).unwrap();
        let init = InitialState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        let tr = simulate_mode_resolved(&p, &om, None, spectrum, init).unwrap();
        assert!((tr.final_beta_e() - init.beta_e0).norm() < 1e-9);
        assert!((tr.final_beta_s() - init.beta_s0).norm() < 1e-15);
    }

    #[test]
    fn recurrence_violation() {
        let p = params();
        let spectrum = ModeSpectrum::new(10, p.gamma_p()).unwrap();
        let grid = TimeGrid::spanning(0.0, 2.0 * spectrum.recurrence_time(), 50).unwrap();
        let om = ComplexSignal::zeros(grid, Unit::Rate);
        assert!(matches!(
            simulate_mode_resolved(&p, &om, None, spectrum, InitialState::excited()),
            Err(Error::ModeGridError(_))
        ));
    }
}
