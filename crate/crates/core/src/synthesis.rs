//! Control-pulse synthesis: given the incoming and outgoing photon wave
//! functions at a node, recover the emitter amplitudes β_e(t), β_s(t) and the
//! classical drive Ω(t) that produces them.
//!
//! The chain is
//!
//! ```text
//! β_e      = i c/(√(2π) g) · (E_in − E_out)
//! d|β_s|²/dt = c(|E_in|² − |E_out|²) − (c/P)|E_out − E_in|² − (c/Γ_p) d|E_out − E_in|²/dt
//! dθ/dt    = (i/|β_s|²) [β_e (dβ_e*/dt + (Γ_p+Γ′)/2 β_e* + i√(2π) g E_in*) + ½ d|β_s|²/dt]
//! Ω        = i (dβ_s*/dt) / β_e*
//! ```
//!
//! with β_s = |β_s| e^{iθ}. All derivatives are centered differences on the
//! signal grid and all integrals are cumulative trapezoids.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    cumulative_trapezoid, derivative, l2_photon_norm, ComplexSignal, PhysicalParams, RealSignal,
    Unit,
};
use crate::wavepacket::scale_to_photon_number;

/// Relative floor on |β_e| below which Ω is set to zero.
pub const EPS_OMEGA: f64 = 1e-8;
/// Floor on |β_s|² below which the phase equation is not integrated.
pub const EPS_POPULATION: f64 = 1e-8;
/// Fraction of the maximal emission withheld in a "full" send.
pub const EPS_DEPLETION: f64 = 1e-4;
/// Negative populations down to this value are rounding and get clamped.
pub const REALIZABILITY_FLOOR: f64 = 1e-9;
/// Largest tolerated real part of the phase bracket, relative to its scale.
pub const PHASE_RESIDUE_TOLERANCE: f64 = 1e-6;

/// A synthesized control pulse with the amplitudes it produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub omega: ComplexSignal,
    pub beta_e: ComplexSignal,
    pub beta_s: ComplexSignal,
    /// Accumulated phase of β_s at the last grid point, before any
    /// compensation.
    pub phi_final: f64,
    /// min_t |β_s(t)|².
    pub realizability_margin: f64,
    /// Photon number emitted (send) or offered to the emitter (receive).
    #[serde(rename = "norm")]
    pub emitted_or_absorbed_norm: f64,
}

impl SynthesisResult {
    pub fn final_beta_s(&self) -> Complex64 {
        *self.beta_s.samples().last().expect("non-empty grid")
    }
}

/// Photon number of a "full" send: `P/(P+1)·(1 − EPS_DEPLETION)`.
pub fn full_emission(params: &PhysicalParams) -> f64 {
    params.max_emission() * (1.0 - EPS_DEPLETION)
}

fn check_fields(e_in: &ComplexSignal, e_out: &ComplexSignal) -> Result<()> {
    e_in.ensure_unit(Unit::Field)?;
    e_out.ensure_unit(Unit::Field)?;
    e_in.grid().ensure_matches(e_out.grid())
}

/// β_e = i c/(√(2π) g) · (E_in − E_out).
pub fn beta_e_from_fields(
    e_in: &ComplexSignal,
    e_out: &ComplexSignal,
    params: &PhysicalParams,
) -> Result<ComplexSignal> {
    check_fields(e_in, e_out)?;
    let k = Complex64::new(0.0, params.c() / params.couplings().field_coupling);
    Ok(e_in.try_sub(e_out)?.converted(k, Unit::Amplitude))
}

/// |β_s(t)|² starting from `s0`.
///
/// The derivative term `(c/Γ_p)·d|ΔE|²/dt` is integrated exactly as the
/// difference of its endpoint values.
pub fn integrate_population(
    e_in: &ComplexSignal,
    e_out: &ComplexSignal,
    params: &PhysicalParams,
    s0: f64,
) -> Result<RealSignal> {
    check_fields(e_in, e_out)?;
    if !(0.0..=1.0).contains(&s0) {
        return Err(Error::InvalidParams(format!(
            "initial population {s0} outside [0, 1]"
        )));
    }
    let c = params.c();
    let inv_p = 1.0 / params.purcell();
    let c_over_gp = c / params.gamma_p();
    let diff2: Vec<f64> = e_out
        .samples()
        .iter()
        .zip(e_in.samples())
        .map(|(o, i)| (o - i).norm_sqr())
        .collect();
    let rate: Vec<f64> = e_in
        .samples()
        .iter()
        .zip(e_out.samples())
        .zip(&diff2)
        .map(|((i, o), d2)| c * (i.norm_sqr() - o.norm_sqr()) - c * inv_p * d2)
        .collect();
    let cum = cumulative_trapezoid(&rate, e_in.grid().dt());
    let mut values: Vec<f64> = cum
        .iter()
        .zip(&diff2)
        .map(|(acc, d2)| s0 + acc - c_over_gp * (d2 - diff2[0]))
        .collect();

    let (imin, min) = values
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |a, (i, v)| if v < a.1 { (i, v) } else { a },
        );
    if min < -REALIZABILITY_FLOOR {
        return Err(Error::UnrealizableWavepacket(format!(
            "|β_s|² reaches {min:e} at t = {:e} s",
            e_in.grid().time(imin)
        )));
    }
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(RealSignal {
        grid: *e_in.grid(),
        values,
    })
}

/// Phase θ(t) of β_s, starting at `theta0`.
///
/// Points where |β_e| is below the Ω floor carry no phase evolution. A
/// leading run with |β_s|² ≤ [`EPS_POPULATION`] (a node that starts empty)
/// is held at `theta0`; a vanishing population anywhere later inside the
/// pulse is an error.
pub fn integrate_phase(
    beta_e: &ComplexSignal,
    beta_s_mag2: &RealSignal,
    e_in: &ComplexSignal,
    params: &PhysicalParams,
    theta0: f64,
) -> Result<RealSignal> {
    beta_e.ensure_unit(Unit::Amplitude)?;
    e_in.ensure_unit(Unit::Field)?;
    let grid = *beta_e.grid();
    grid.ensure_matches(e_in.grid())?;
    grid.ensure_matches(&beta_s_mag2.grid)?;
    let dt = grid.dt();
    let c = params.c();
    let k = params.couplings();
    let half_decay = 0.5 * k.total_decay();
    let inv_p = 1.0 / params.purcell();

    let be = beta_e.samples();
    let ein = e_in.samples();
    let dbe = derivative(be, dt);
    let floor = EPS_OMEGA * beta_e.max_abs();

    let mut rate = vec![0.0; grid.n()];
    let mut started = false;
    let mut worst_residue = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..grid.n() {
        let pop = beta_s_mag2.values[i];
        if pop > EPS_POPULATION {
            started = true;
        }
        if be[i].norm() <= floor {
            continue;
        }
        let bracket = be[i]
            * (dbe[i].conj()
                + half_decay * be[i].conj()
                + Complex64::i() * k.field_coupling * ein[i].conj());
        // d|β_s|²/dt from the population equation, with ΔE = −i(√(2π)g/c)β_e
        let de = Complex64::new(0.0, -k.field_coupling / c) * be[i];
        let eout = ein[i] - de;
        let dpop = c * (ein[i].norm_sqr() - eout.norm_sqr())
            - c * inv_p * de.norm_sqr()
            - 2.0 * (be[i] * dbe[i].conj()).re;
        let total = bracket + 0.5 * dpop;
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::ConsistencyError(format!(
                "non-finite phase bracket at t = {:e} s",
                grid.time(i)
            )));
        }
        worst_residue = worst_residue.max(total.re.abs());
        scale = scale.max(bracket.norm()).max(0.5 * dpop.abs());
        if pop <= EPS_POPULATION {
            if started {
                return Err(Error::PhaseSingular(format!(
                    "|β_s|² = {pop:e} inside the pulse at t = {:e} s",
                    grid.time(i)
                )));
            }
            continue;
        }
        // (i/|β_s|²)·(i·Im) = −Im/|β_s|²
        rate[i] = -total.im / pop;
    }
    if scale > 0.0 && worst_residue > PHASE_RESIDUE_TOLERANCE * scale {
        return Err(Error::ConsistencyError(format!(
            "phase bracket has real residue {:e} (relative)",
            worst_residue / scale
        )));
    }
    let values = cumulative_trapezoid(&rate, dt)
        .into_iter()
        .map(|v| theta0 + v)
        .collect();
    Ok(RealSignal { grid, values })
}

/// Ω = i (dβ_s*/dt) / β_e*, zero where |β_e| ≤ EPS_OMEGA·max|β_e|.
pub fn control_from_amplitudes(
    beta_s: &ComplexSignal,
    beta_e: &ComplexSignal,
) -> Result<ComplexSignal> {
    beta_s.ensure_unit(Unit::Amplitude)?;
    beta_e.ensure_unit(Unit::Amplitude)?;
    let grid = *beta_s.grid();
    grid.ensure_matches(beta_e.grid())?;
    let max_e = beta_e.max_abs();
    if max_e == 0.0 {
        let s = beta_s.samples();
        let spread = s.iter().map(|v| (v - s[0]).norm()).fold(0.0, f64::max);
        if spread > 1e-12 {
            return Err(Error::InconsistentAmplitudes(
                "β_s changes while β_e vanishes everywhere".into(),
            ));
        }
        return Ok(ComplexSignal::zeros(grid, Unit::Rate));
    }
    let floor = EPS_OMEGA * max_e;
    let dbs = derivative(beta_s.samples(), grid.dt());
    let samples = beta_e
        .samples()
        .iter()
        .zip(&dbs)
        .map(|(&be, &d)| {
            if be.norm() > floor {
                Complex64::i() * d.conj() / be.conj()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    ComplexSignal::new(grid, samples, Unit::Rate)
}

fn assemble(
    params: &PhysicalParams,
    e_in: &ComplexSignal,
    e_out: &ComplexSignal,
    s0: f64,
    compensate_phase: bool,
    norm: f64,
) -> Result<SynthesisResult> {
    let beta_e = beta_e_from_fields(e_in, e_out, params)?;
    let pop = integrate_population(e_in, e_out, params, s0)?;
    let theta = integrate_phase(&beta_e, &pop, e_in, params, 0.0)?;
    let phi_final = theta.last();
    let shift = if compensate_phase { phi_final } else { 0.0 };
    let beta_s = ComplexSignal::new(
        *e_in.grid(),
        pop.values
            .iter()
            .zip(&theta.values)
            .map(|(&p, &th)| Complex64::from_polar(p.sqrt(), th - shift))
            .collect(),
        Unit::Amplitude,
    )?;
    let omega = control_from_amplitudes(&beta_s, &beta_e)?;

    let overfull = beta_e
        .samples()
        .iter()
        .zip(&pop.values)
        .map(|(be, p)| be.norm_sqr() + p)
        .fold(0.0, f64::max);
    if overfull > 1.0 + 1e-6 {
        return Err(Error::ConsistencyError(format!(
            "|β_e|² + |β_s|² reaches {overfull}"
        )));
    }
    Ok(SynthesisResult {
        omega,
        beta_e,
        beta_s,
        phi_final,
        realizability_margin: pop.min(),
        emitted_or_absorbed_norm: norm,
    })
}

/// Control for a node starting in |s⟩ that emits `s` photons in the shape of
/// `target` (which is renormalized first).
pub fn synth_send(
    params: &PhysicalParams,
    target: &ComplexSignal,
    s: f64,
) -> Result<SynthesisResult> {
    target.ensure_unit(Unit::Field)?;
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "emitted photon number must be ≥ 0, got {s}"
        )));
    }
    let s_max = params.max_emission();
    if s > s_max * (1.0 + 1e-12) {
        return Err(Error::UnrealizableWavepacket(format!(
            "s = {s} exceeds the emission limit P/(P+1) = {s_max}"
        )));
    }
    let e_out = if s == 0.0 {
        ComplexSignal::zeros(*target.grid(), Unit::Field)
    } else {
        let shape = scale_to_photon_number(target, 1.0, params.c())?;
        shape.scaled(Complex64::new(s.sqrt(), 0.0))
    };
    let e_in = ComplexSignal::zeros(*target.grid(), Unit::Field);
    assemble(params, &e_in, &e_out, 1.0, false, s)
}

/// Control for a node starting in |g⟩ that absorbs the whole `incoming`
/// field. The accumulated phase is moved into Ω so that the stored amplitude
/// ends real and non-negative.
pub fn synth_receive(params: &PhysicalParams, incoming: &ComplexSignal) -> Result<SynthesisResult> {
    incoming.ensure_unit(Unit::Field)?;
    let norm = l2_photon_norm(incoming, params.c())?;
    let e_out = ComplexSignal::zeros(*incoming.grid(), Unit::Field);
    assemble(params, incoming, &e_out, 0.0, true, norm)
}
