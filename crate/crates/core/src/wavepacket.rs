//! Single-photon wavepacket envelopes: construction, normalization, delay.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{l2_photon_norm, ComplexSignal, PhysicalParams, TimeGrid, Unit};

/// Largest tolerated |E| at either grid end, relative to the peak.
pub const ENDPOINT_TOLERANCE: f64 = 1e-6;

/// Gaussian envelope `φ·√(√2/(a√π))·exp(−(c(t−t₀)/a)²)` of spatial width `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub a: f64,
    pub amplitude_phase: Complex64,
}

impl GaussianSpec {
    /// Width `a` in meters with the default phase factor `i`.
    pub fn new(a: f64) -> Result<Self> {
        Self::with_phase(a, Complex64::i())
    }

    pub fn with_phase(a: f64, amplitude_phase: Complex64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParams(format!(
                "packet width must be positive, got {a}"
            )));
        }
        if (amplitude_phase.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "amplitude phase must have unit modulus, got {amplitude_phase}"
            )));
        }
        Ok(Self { a, amplitude_phase })
    }

    /// Peak modulus √(√2/(a√π)) in m^(-1/2).
    pub fn peak(&self) -> f64 {
        (2f64.sqrt() / (self.a * PI.sqrt())).sqrt()
    }

    /// Temporal width a/c.
    pub fn duration(&self, c: f64) -> f64 {
        self.a / c
    }
}

/// Grid layout around a packet: `span` temporal widths on either side of the
/// center, `n` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub span: f64,
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { span: 6.0, n: 8192 }
    }
}

impl GridSpec {
    /// Grid covering `center ± span·width`, then extended by `extra_time`
    /// (rounded up to whole steps) at the end.
    pub fn build(&self, width: f64, center: f64, extra_time: f64) -> Result<TimeGrid> {
        if !(self.span.is_finite() && self.span > 0.0 && width > 0.0) {
            return Err(Error::TruncationError(format!(
                "grid span {} packet widths leaves no room for the packet",
                self.span
            )));
        }
        let half = self.span * width;
        let base = TimeGrid::spanning(center - half, center + half, self.n)?;
        let extra = if extra_time > 0.0 {
            (extra_time / base.dt()).ceil() as usize
        } else {
            0
        };
        Ok(base.extended(extra))
    }
}

pub fn gaussian_packet(
    spec: &GaussianSpec,
    params: &PhysicalParams,
    grid: &TimeGrid,
    center: f64,
) -> Result<ComplexSignal> {
    let c = params.c();
    let width = spec.duration(c);
    if center < grid.t_start() || center > grid.t_end() {
        return Err(Error::TruncationError(format!(
            "packet center {center:e} s lies outside the grid"
        )));
    }
    let envelope = |t: f64| {
        let x = (t - center) / width;
        (-x * x).exp()
    };
    let edge = envelope(grid.t_start()).max(envelope(grid.t_end()));
    if edge > ENDPOINT_TOLERANCE {
        return Err(Error::TruncationError(format!(
            "packet at grid edge is {edge:e} of its peak; widen the grid"
        )));
    }
    let amp = spec.amplitude_phase * spec.peak();
    Ok(ComplexSignal::from_fn(*grid, Unit::Field, |t| {
        amp * envelope(t)
    }))
}

/// Normalized superposition of Gaussians `Σ wₖ·exp(−((t−tₖ)/τₖ)²)`, with
/// `(weight, center, temporal width)` per component.
pub fn gaussian_mixture(
    components: &[(Complex64, f64, f64)],
    c: f64,
    grid: &TimeGrid,
) -> Result<ComplexSignal> {
    if components.iter().any(|&(_, _, w)| !(w > 0.0)) {
        return Err(Error::InvalidParams(
            "component widths must be positive".into(),
        ));
    }
    let sig = ComplexSignal::from_fn(*grid, Unit::Field, |t| {
        components
            .iter()
            .map(|&(w, t0, tau)| {
                let x = (t - t0) / tau;
                w * (-x * x).exp()
            })
            .sum()
    });
    validate_endpoints(&sig)?;
    scale_to_photon_number(&sig, 1.0, c)
}

/// Normalized raised-cosine (Hann) envelope of total duration `2·half_width`.
pub fn raised_cosine(
    half_width: f64,
    center: f64,
    phase: Complex64,
    c: f64,
    grid: &TimeGrid,
) -> Result<ComplexSignal> {
    if !(half_width > 0.0) {
        return Err(Error::InvalidParams("half width must be positive".into()));
    }
    let sig = ComplexSignal::from_fn(*grid, Unit::Field, |t| {
        let x = (t - center) / half_width;
        if x.abs() >= 1.0 {
            Complex64::new(0.0, 0.0)
        } else {
            phase * (0.5 * (1.0 + (PI * x).cos()))
        }
    });
    validate_endpoints(&sig)?;
    scale_to_photon_number(&sig, 1.0, c)
}

/// Checks that a packet decays to `≤ 1e-6` of its peak at both grid ends.
pub fn validate_endpoints(sig: &ComplexSignal) -> Result<()> {
    let peak = sig.max_abs();
    if peak == 0.0 {
        return Ok(());
    }
    let s = sig.samples();
    let edge = s[0].norm().max(s[s.len() - 1].norm());
    if edge > ENDPOINT_TOLERANCE * peak {
        return Err(Error::TruncationError(format!(
            "signal at grid edge is {:e} of its peak",
            edge / peak
        )));
    }
    Ok(())
}

/// Rescales a field so that `c·∫|E|²dt == target`.
pub fn scale_to_photon_number(sig: &ComplexSignal, target: f64, c: f64) -> Result<ComplexSignal> {
    if !(target.is_finite() && target >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "photon number must be ≥ 0, got {target}"
        )));
    }
    let norm = l2_photon_norm(sig, c)?;
    if target == 0.0 {
        return Ok(ComplexSignal::zeros(*sig.grid(), Unit::Field));
    }
    if norm == 0.0 {
        return Err(Error::DegenerateInput("cannot rescale a zero field".into()));
    }
    Ok(sig.scaled(Complex64::new((target / norm).sqrt(), 0.0)))
}

/// Shifts a signal later by `tau` (earlier when negative), in whole grid steps.
pub fn delay(sig: &ComplexSignal, tau: f64) -> Result<ComplexSignal> {
    let grid = *sig.grid();
    let steps = (tau / grid.dt()).round();
    let n = grid.n();
    if steps.abs() >= n as f64 {
        return Err(Error::TruncationError(format!(
            "delay of {tau:e} s exceeds the grid span"
        )));
    }
    let steps = steps as isize;
    if steps == 0 {
        return Ok(sig.clone());
    }
    let src = sig.samples();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut lost = 0.0;
    for (i, &v) in src.iter().enumerate() {
        let j = i as isize + steps;
        if (0..n as isize).contains(&j) {
            out[j as usize] = v;
        } else {
            lost += v.norm_sqr();
        }
    }
    let total: f64 = src.iter().map(|v| v.norm_sqr()).sum();
    if lost > 1e-9 * total {
        return Err(Error::TruncationError(format!(
            "delay pushes {:e} of the norm off the grid",
            lost / total
        )));
    }
    ComplexSignal::new(grid, out, sig.unit())
}
