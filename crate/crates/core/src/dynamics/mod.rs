//! Forward integration of the reduced emitter equations
//!
//! ```text
//! dβ_e/dt = iΩ β_s − ((Γ_p+Γ′)/2) β_e + i√(2π) g E_in
//! dβ_s/dt = iΩ* β_e
//! E_out   = E_in + i(√(2π) g / c) β_e
//! ```
//!
//! The decay term of β_e is removed with an exact integrating factor and the
//! remaining system is advanced with classical RK4 (Lawson scheme). Ω and
//! E_in are interpolated linearly between grid samples; the internal step is
//! a fixed fraction of the output step.

mod modes;

pub use modes::{fitted_decay_rate, simulate_mode_resolved, ModeSpectrum};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexSignal, EmitterCouplings, PhysicalParams, TimeGrid, Unit};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Initial emitter amplitudes in the one-excitation sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub beta_e0: Complex64,
    pub beta_s0: Complex64,
}

impl InitialState {
    pub fn new(beta_e0: Complex64, beta_s0: Complex64) -> Result<Self> {
        let p = beta_e0.norm_sqr() + beta_s0.norm_sqr();
        if !(p <= 1.0 + 1e-12) {
            return Err(Error::InvalidParams(format!(
                "|β_e0|² + |β_s0|² = {p} exceeds 1"
            )));
        }
        Ok(Self { beta_e0, beta_s0 })
    }

    /// Emitter in |g⟩ (no excitation on the emitter).
    pub fn ground() -> Self {
        Self {
            beta_e0: ZERO,
            beta_s0: ZERO,
        }
    }

    /// Emitter in the metastable |s⟩.
    pub fn storage() -> Self {
        Self {
            beta_e0: ZERO,
            beta_s0: Complex64::new(1.0, 0.0),
        }
    }

    /// Emitter in the excited |e⟩.
    pub fn excited() -> Self {
        Self {
            beta_e0: Complex64::new(1.0, 0.0),
            beta_s0: ZERO,
        }
    }

    fn population(&self) -> f64 {
        self.beta_e0.norm_sqr() + self.beta_s0.norm_sqr()
    }
}

/// Output of a forward simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub beta_e: ComplexSignal,
    pub beta_s: ComplexSignal,
    pub e_out: ComplexSignal,
    pub conservation_residual: f64,
    /// Population lost to non-plasmon channels, ∫ loss_rate·|β_e|² dt.
    pub loss_integral: f64,
    /// Net photon number added to the field, c∫(|E_out|² − |E_in|²) dt,
    /// integrated on the internal step.
    pub net_emission: f64,
}

impl Trajectory {
    pub fn final_beta_s(&self) -> Complex64 {
        *self.beta_s.samples().last().expect("non-empty grid")
    }

    pub fn final_beta_e(&self) -> Complex64 {
        *self.beta_e.samples().last().expect("non-empty grid")
    }

    fn population(&self, i: usize) -> f64 {
        self.beta_e.samples()[i].norm_sqr() + self.beta_s.samples()[i].norm_sqr()
    }
}

/// Probability bookkeeping error
/// `| |β_s(T)|²+|β_e(T)|² − |β_s0|²−|β_e0|² + loss + c∫(|E_out|²−|E_in|²) |`.
pub fn conservation_residual(traj: &Trajectory) -> f64 {
    let n = traj.beta_e.len();
    (traj.population(n - 1) - traj.population(0) + traj.loss_integral + traj.net_emission).abs()
}

/// Internal step control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Upper bound on (Γ_p+Γ′)·h.
    pub decay_step: f64,
    /// Upper bound on |Ω|·h.
    pub drive_step: f64,
    /// Refuse runs that would need more internal steps than this.
    pub max_steps: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            decay_step: 0.1,
            drive_step: 0.1,
            max_steps: 400_000_000,
        }
    }
}

impl SimOptions {
    /// Same bounds with the internal step divided by `factor`.
    pub fn refined(&self, factor: f64) -> Self {
        Self {
            decay_step: self.decay_step / factor,
            drive_step: self.drive_step / factor,
            ..*self
        }
    }
}

pub fn simulate(
    params: &PhysicalParams,
    omega: &ComplexSignal,
    e_in: &ComplexSignal,
    init: InitialState,
) -> Result<Trajectory> {
    simulate_with(
        &params.couplings(),
        omega,
        e_in,
        init,
        &SimOptions::default(),
    )
}

/// Right-hand side without the integrating-factor term.
struct Drive {
    coupling: f64,
}

impl Drive {
    #[inline]
    fn eval(
        &self,
        om: Complex64,
        ein: Complex64,
        be: Complex64,
        bs: Complex64,
    ) -> (Complex64, Complex64) {
        (I * (om * bs + self.coupling * ein), I * om.conj() * be)
    }
}

/// Integrand of the two bookkeeping integrals: (loss rate, net emission rate).
struct Ledger {
    loss_rate: f64,
    coupling: f64,
    gamma_field: f64,
}

impl Ledger {
    #[inline]
    fn eval(&self, ein: Complex64, be: Complex64) -> (f64, f64) {
        let p = be.norm_sqr();
        (
            self.loss_rate * p,
            2.0 * self.coupling * (I * ein.conj() * be).re + self.gamma_field * p,
        )
    }
}

/// Forward simulation with explicit couplings and step control.
pub fn simulate_with(
    k: &EmitterCouplings,
    omega: &ComplexSignal,
    e_in: &ComplexSignal,
    init: InitialState,
    opts: &SimOptions,
) -> Result<Trajectory> {
    omega.ensure_unit(Unit::Rate)?;
    e_in.ensure_unit(Unit::Field)?;
    let grid: TimeGrid = *omega.grid();
    grid.ensure_matches(e_in.grid())?;
    if !(k.total_decay() > 0.0 && k.c > 0.0 && k.field_coupling >= 0.0) {
        return Err(Error::InvalidParams(format!("bad couplings {k:?}")));
    }

    let dt = grid.dt();
    let n = grid.n();
    let gamma = k.total_decay();
    let om_max = omega.max_abs();
    let sub = (dt * gamma / opts.decay_step)
        .max(dt * om_max / opts.drive_step)
        .ceil()
        .max(1.0);
    let total = sub * (n - 1) as f64;
    if !(total <= opts.max_steps as f64) {
        return Err(Error::StiffnessError(format!(
            "{total:e} internal steps needed (limit {:e})",
            opts.max_steps as f64
        )));
    }
    let sub = sub as usize;
    let h = dt / sub as f64;
    let decay_full = (-0.5 * gamma * h).exp();
    let decay_half = (-0.25 * gamma * h).exp();

    let drive = Drive {
        coupling: k.field_coupling,
    };
    let ledger = Ledger {
        loss_rate: k.loss_rate(),
        coupling: k.field_coupling,
        gamma_field: k.field_coupling * k.field_coupling / k.c,
    };

    let om = omega.samples();
    let ein = e_in.samples();
    let mut be = init.beta_e0;
    let mut bs = init.beta_s0;
    let mut loss = 0.0;
    let mut net = 0.0;
    let mut out_e = Vec::with_capacity(n);
    let mut out_s = Vec::with_capacity(n);
    out_e.push(be);
    out_s.push(bs);

    let inv_sub = 1.0 / sub as f64;
    for cell in 0..n - 1 {
        let (o0, o1) = (om[cell], om[cell + 1]);
        let (e0, e1) = (ein[cell], ein[cell + 1]);
        let lerp = |a: Complex64, b: Complex64, x: f64| a + (b - a) * x;
        for j in 0..sub {
            let x0 = j as f64 * inv_sub;
            let xm = (j as f64 + 0.5) * inv_sub;
            let x1 = (j as f64 + 1.0) * inv_sub;
            let (om0, omm, om1) = (lerp(o0, o1, x0), lerp(o0, o1, xm), lerp(o0, o1, x1));
            let (ei0, eim, ei1) = (lerp(e0, e1, x0), lerp(e0, e1, xm), lerp(e0, e1, x1));

            let (k1e, k1s) = drive.eval(om0, ei0, be, bs);
            let q1 = ledger.eval(ei0, be);

            let u2e = decay_half * (be + 0.5 * h * k1e);
            let u2s = bs + 0.5 * h * k1s;
            let (k2e, k2s) = drive.eval(omm, eim, u2e, u2s);
            let q2 = ledger.eval(eim, u2e);

            let u3e = decay_half * be + 0.5 * h * k2e;
            let u3s = bs + 0.5 * h * k2s;
            let (k3e, k3s) = drive.eval(omm, eim, u3e, u3s);
            let q3 = ledger.eval(eim, u3e);

            let u4e = decay_full * be + h * decay_half * k3e;
            let u4s = bs + h * k3s;
            let (k4e, k4s) = drive.eval(om1, ei1, u4e, u4s);
            let q4 = ledger.eval(ei1, u4e);

            be = decay_full * be
                + (h / 6.0) * (decay_full * k1e + 2.0 * decay_half * (k2e + k3e) + k4e);
            bs += (h / 6.0) * (k1s + 2.0 * (k2s + k3s) + k4s);
            loss += (h / 6.0) * (q1.0 + 2.0 * (q2.0 + q3.0) + q4.0);
            net += (h / 6.0) * (q1.1 + 2.0 * (q2.1 + q3.1) + q4.1);
        }
        if !(be.re.is_finite() && be.im.is_finite() && bs.re.is_finite() && bs.im.is_finite()) {
            return Err(Error::StiffnessError(format!(
                "non-finite amplitudes at t = {:e} s",
                grid.time(cell + 1)
            )));
        }
        out_e.push(be);
        out_s.push(bs);
    }

    let out_coupling = I * (k.field_coupling / k.c);
    let e_out: Vec<Complex64> = ein
        .iter()
        .zip(&out_e)
        .map(|(&e, &b)| e + out_coupling * b)
        .collect();
    let mut traj = Trajectory {
        beta_e: ComplexSignal::new(grid, out_e, Unit::Amplitude)?,
        beta_s: ComplexSignal::new(grid, out_s, Unit::Amplitude)?,
        e_out: ComplexSignal::new(grid, e_out, Unit::Field)?,
        conservation_residual: 0.0,
        loss_integral: loss,
        net_emission: net,
    };
    debug_assert!((traj.population(0) - init.population()).abs() < 1e-15);
    traj.conservation_residual = conservation_residual(&traj);
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::l2_photon_norm;

    fn params() -> PhysicalParams {
        PhysicalParams::with_purcell(1.6e10, 1.5e8, 100.0).unwrap()
    }

    #[test]
    fn idle_storage_state_is_constant() {
        let p = params();
        let grid = TimeGrid::spanning(0.0, 1e-10, 200).unwrap();
        let om = ComplexSignal::zeros(grid, Unit::Rate);
        let ein = ComplexSignal::zeros(grid, Unit::Field);
        let tr = simulate(&p, &om, &ein, InitialState::storage()).unwrap();
        assert!(tr
            .beta_s
            .samples()
            .iter()
            .all(|&b| b == Complex64::new(1.0, 0.0)));
        assert_eq!(tr.e_out.max_abs(), 0.0);
        assert!(tr.conservation_residual < 1e-12);
    }

    #[test]
    fn exponential_decay_oracle() {
        let p = params();
        let gamma = p.total_decay();
        let grid = TimeGrid::spanning(0.0, 40.0 / gamma, 801).unwrap();
        let om = ComplexSignal::zeros(grid, Unit::Rate);
        let ein = ComplexSignal::zeros(grid, Unit::Field);
        let tr = simulate(&p, &om, &ein, InitialState::excited()).unwrap();
        for (t, b) in grid.times().zip(tr.beta_e.samples()) {
            assert!((b.re - (-0.5 * gamma * t).exp()).abs() < 1e-9, "t={t}");
        }
        // photon number P/(P+1)
        assert!(
            (tr.net_emission - 100.0 / 101.0).abs() < 1e-5,
            "{}",
            tr.net_emission
        );
        assert!((tr.net_emission - 0.990099).abs() < 1e-5);
        let sampled = l2_photon_norm(&tr.e_out, p.c()).unwrap();
        assert!((sampled - 100.0 / 101.0).abs() < 1e-3);
        assert!(tr.conservation_residual < 1e-5);
    }

    #[test]
    fn output_relation_is_exact() {
        let p = params();
        let gamma = p.total_decay();
        let grid = TimeGrid::spanning(0.0, 20.0 / gamma, 401).unwrap();
        let om = ComplexSignal::from_fn(grid, Unit::Rate, |t| {
            Complex64::new(0.0, 0.05 * gamma * (t * gamma / 7.0).sin())
        });
        let ein = ComplexSignal::from_fn(grid, Unit::Field, |t| {
            Complex64::new(0.3 * (t * gamma / 5.0).cos(), 0.1)
        });
        let tr = simulate(&p, &om, &ein, InitialState::storage()).unwrap();
        let coupling = (2.0 * std::f64::consts::PI).sqrt() * p.g() / p.c();
        for i in 0..grid.n() {
            let lhs = tr.e_out.samples()[i] - ein.samples()[i];
            let rhs = Complex64::i() * coupling * tr.beta_e.samples()[i];
            assert!((lhs - rhs).norm() <= 1e-15 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let p = params();
        let g1 = TimeGrid::spanning(0.0, 1e-10, 10).unwrap();
        let g2 = TimeGrid::spanning(0.0, 2e-10, 10).unwrap();
        let om = ComplexSignal::zeros(g1, Unit::Rate);
        assert!(matches!(
            simulate(
                &p,
                &om,
                &ComplexSignal::zeros(g2, Unit::Field),
                InitialState::storage()
            ),
            Err(Error::GridError(_))
        ));
        assert!(matches!(
            simulate(
                &p,
                &om,
                &ComplexSignal::zeros(g1, Unit::Amplitude),
                InitialState::storage()
            ),
            Err(Error::UnitError { .. })
        ));
    }

    #[test]
    fn step_budget_exceeded_is_stiffness() {
        let p = params();
        let grid = TimeGrid::spanning(0.0, 1e-6, 10).unwrap();
        let om = ComplexSignal::zeros(grid, Unit::Rate);
        let ein = ComplexSignal::zeros(grid, Unit::Field);
        let opts = SimOptions {
            max_steps: 1000,
            ..SimOptions::default()
        };
        assert!(matches!(
            simulate_with(&p.couplings(), &om, &ein, InitialState::storage(), &opts),
            Err(Error::StiffnessError(_))
        ));
    }

    #[test]
    fn initial_state_bound() {
        assert!(InitialState::new(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)).is_err());
    }
}
