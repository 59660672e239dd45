//! Physical parameters, time grids and sampled signals shared by every other
//! module.
//!
//! Everything is in SI units: coupling `g` in m^(1/2)/s, group velocity in
//! m/s, rates in 1/s, fields in m^(-1/2).

use std::f64::consts::PI;
use std::ops::{Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Emitter–plasmon parameters of one node.
///
/// Only `g`, `c` and `gamma_prime` are stored; the plasmon emission rate and
/// the Purcell factor are always recomputed from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    g: f64,
    c: f64,
    gamma_prime: f64,
}

impl PhysicalParams {
    pub fn new(g: f64, c: f64, gamma_prime: f64) -> Result<Self> {
        let params = Self { g, c, gamma_prime };
        params.validate()?;
        Ok(params)
    }

    /// Builds parameters from a Purcell factor `P = Γ_p / Γ′` instead of Γ′.
    pub fn with_purcell(g: f64, c: f64, purcell: f64) -> Result<Self> {
        if !(purcell.is_finite() && purcell > 0.0) {
            return Err(Error::InvalidParams(format!(
                "Purcell factor must be positive, got {purcell}"
            )));
        }
        if !(g.is_finite() && g > 0.0 && c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParams(format!(
                "g and c must be positive, got g={g}, c={c}"
            )));
        }
        let gamma_p = 2.0 * PI * g * g / c;
        Self::new(g, c, gamma_p / purcell)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g", self.g),
            ("c", self.c),
            ("gamma_prime", self.gamma_prime),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    /// Spontaneous emission rate into the plasmon modes, 2πg²/c.
    pub fn gamma_p(&self) -> f64 {
        2.0 * PI * self.g * self.g / self.c
    }

    pub fn purcell(&self) -> f64 {
        self.gamma_p() / self.gamma_prime
    }

    /// Γ_p + Γ′.
    pub fn total_decay(&self) -> f64 {
        self.gamma_p() + self.gamma_prime
    }

    /// Largest photon number a node starting in |s⟩ can emit, P/(P+1).
    pub fn max_emission(&self) -> f64 {
        let p = self.purcell();
        p / (p + 1.0)
    }

    pub fn couplings(&self) -> EmitterCouplings {
        EmitterCouplings {
            field_coupling: (2.0 * PI).sqrt() * self.g,
            gamma_p: self.gamma_p(),
            gamma_prime: self.gamma_prime,
            c: self.c,
        }
    }
}

/// Returns `(Γ_p, P)` for a parameter set.
pub fn derive_rates(params: &PhysicalParams) -> Result<(f64, f64)> {
    params.validate()?;
    let gamma_p = 2.0 * PI * params.g * params.g / params.c;
    Ok((gamma_p, gamma_p / params.gamma_prime))
}

/// The coefficients that actually enter the reduced equations of motion.
///
/// For a physical node `field_coupling² / c == gamma_p`. The forward
/// simulator accepts arbitrary combinations so that a mismatch between the
/// field coupling and the decay rate can be injected; any decay not carried
/// away by the plasmon field is booked as loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterCouplings {
    /// √(2π)·g, multiplies E_in in the β_e equation and β_e in E_out.
    pub field_coupling: f64,
    pub gamma_p: f64,
    pub gamma_prime: f64,
    pub c: f64,
}

impl EmitterCouplings {
    pub fn total_decay(&self) -> f64 {
        self.gamma_p + self.gamma_prime
    }

    /// Rate of population loss into channels other than the plasmon field.
    pub fn loss_rate(&self) -> f64 {
        self.gamma_p + self.gamma_prime - self.field_coupling * self.field_coupling / self.c
    }

    /// A node is passive when it cannot create photons: loss rate ≥ 0.
    pub fn is_passive(&self) -> bool {
        self.loss_rate() >= -1e-12 * self.total_decay()
    }
}

/// Uniform sampling grid `t_start + i·dt`, `i in 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_start: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::GridError(format!("dt must be positive, got {dt}")));
        }
        if n < 2 {
            return Err(Error::GridError(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        if !t_start.is_finite() {
            return Err(Error::GridError("t_start must be finite".into()));
        }
        Ok(Self { t_start, dt, n })
    }

    /// `n` samples covering `[t_start, t_end]` inclusive.
    pub fn spanning(t_start: f64, t_end: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridError(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        Self::new(t_start, (t_end - t_start) / (n - 1) as f64, n)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n - 1)
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.time(i))
    }

    /// Same grid extended by `extra` samples at the end.
    pub fn extended(&self, extra: usize) -> Self {
        Self {
            n: self.n + extra,
            ..*self
        }
    }

    /// Grids agree when sample counts match and start/step agree to rounding.
    pub fn matches(&self, other: &TimeGrid) -> bool {
        self.n == other.n
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt
            && (self.t_start - other.t_start).abs() <= 1e-9 * self.dt
    }

    pub(crate) fn ensure_matches(&self, other: &TimeGrid) -> Result<()> {
        if self.matches(other) {
            Ok(())
        } else {
            Err(Error::GridError(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Physical unit carried by a [`ComplexSignal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    /// Photon wave function, m^(-1/2).
    Field,
    /// Dimensionless probability amplitude.
    Amplitude,
    /// Rate, 1/s.
    Rate,
}

/// Complex samples on a [`TimeGrid`], tagged with a [`Unit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalRepr", into = "SignalRepr")]
pub struct ComplexSignal {
    grid: TimeGrid,
    samples: Vec<Complex64>,
    unit: Unit,
}

impl ComplexSignal {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>, unit: Unit) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::GridError(format!(
                "{} samples for a grid of {}",
                samples.len(),
                grid.n()
            )));
        }
        Ok(Self {
            grid,
            samples,
            unit,
        })
    }

    pub fn zeros(grid: TimeGrid, unit: Unit) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.n()],
            unit,
        }
    }

    pub fn from_fn(grid: TimeGrid, unit: Unit, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let samples = grid.times().map(&mut f).collect();
        Self {
            grid,
            samples,
            unit,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ensure_unit(&self, expected: Unit) -> Result<()> {
        if self.unit == expected {
            Ok(())
        } else {
            Err(Error::UnitError {
                expected,
                found: self.unit,
            })
        }
    }

    fn ensure_compatible(&self, other: &ComplexSignal) -> Result<()> {
        other.ensure_unit(self.unit)?;
        self.grid.ensure_matches(&other.grid)
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|&s| s * k).collect(),
            unit: self.unit,
        }
    }

    pub fn try_add(&self, other: &ComplexSignal) -> Result<Self> {
        self.ensure_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            grid: self.grid,
            samples,
            unit: self.unit,
        })
    }

    pub fn try_sub(&self, other: &ComplexSignal) -> Result<Self> {
        self.ensure_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid,
            samples,
            unit: self.unit,
        })
    }

    /// Reinterprets the samples in another unit after multiplying by `k`.
    /// Used where a physical relation converts between units.
    pub(crate) fn converted(&self, k: Complex64, unit: Unit) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|&s| s * k).collect(),
            unit,
        }
    }

    /// ∫|s|² dt by the trapezoidal rule.
    pub fn energy(&self) -> f64 {
        let mag2: Vec<f64> = self.samples.iter().map(|s| s.norm_sqr()).collect();
        trapezoid(&mag2, self.grid.dt())
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    pub fn argmax_abs(&self) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, s) in self.samples.iter().enumerate() {
            let a = s.norm();
            if a > best.1 {
                best = (i, a);
            }
        }
        best.0
    }
}

#[derive(Clone, Serialize, Deserialize)]
struct SignalRepr {
    unit: Unit,
    t_start: f64,
    dt: f64,
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<SignalRepr> for ComplexSignal {
    type Error = Error;

    fn try_from(r: SignalRepr) -> Result<Self> {
        if r.re.len() != r.n || r.im.len() != r.n {
            return Err(Error::GridError(format!(
                "n={} but re has {} and im has {} entries",
                r.n,
                r.re.len(),
                r.im.len()
            )));
        }
        let grid = TimeGrid::new(r.t_start, r.dt, r.n)?;
        let samples =
            r.re.iter()
                .zip(&r.im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
        ComplexSignal::new(grid, samples, r.unit)
    }
}

impl From<ComplexSignal> for SignalRepr {
    fn from(s: ComplexSignal) -> Self {
        SignalRepr {
            unit: s.unit,
            t_start: s.grid.t_start(),
            dt: s.grid.dt(),
            n: s.grid.n(),
            re: s.samples.iter().map(|z| z.re).collect(),
            im: s.samples.iter().map(|z| z.im).collect(),
        }
    }
}

/// Real-valued samples on a grid (populations, phases).
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl RealSignal {
    pub fn last(&self) -> f64 {
        *self.values.last().expect("grid has at least two samples")
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Stationary qubit `α_g|g⟩ + α_s|s⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitAmplitudes {
    alpha_g: Complex64,
    alpha_s: Complex64,
}

impl QubitAmplitudes {
    pub fn new(alpha_g: Complex64, alpha_s: Complex64) -> Result<Self> {
        let norm = alpha_g.norm_sqr() + alpha_s.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "qubit amplitudes must be normalized, |α_g|²+|α_s|² = {norm}"
            )));
        }
        Ok(Self { alpha_g, alpha_s })
    }

    /// Builds a normalized state from real amplitudes, rescaling them.
    pub fn from_real(alpha_g: f64, alpha_s: f64) -> Result<Self> {
        let norm = (alpha_g * alpha_g + alpha_s * alpha_s).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParams(
                "qubit amplitudes are both zero".into(),
            ));
        }
        Self::new(
            Complex64::new(alpha_g / norm, 0.0),
            Complex64::new(alpha_s / norm, 0.0),
        )
    }

    pub fn equal_superposition() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            alpha_g: a,
            alpha_s: a,
        }
    }

    pub fn storage() -> Self {
        Self {
            alpha_g: Complex64::new(0.0, 0.0),
            alpha_s: Complex64::new(1.0, 0.0),
        }
    }

    pub fn alpha_g(&self) -> Complex64 {
        self.alpha_g
    }

    pub fn alpha_s(&self) -> Complex64 {
        self.alpha_s
    }
}

/// Photon number `c·∫|E|²dt` of a field signal.
pub fn l2_photon_norm(sig: &ComplexSignal, c: f64) -> Result<f64> {
    sig.ensure_unit(Unit::Field)?;
    Ok(c * sig.energy())
}

/// `∫ conj(a)·b dt` (trapezoidal).
pub fn overlap(a: &ComplexSignal, b: &ComplexSignal) -> Result<Complex64> {
    a.ensure_compatible(b)?;
    let prod: Vec<Complex64> = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| x.conj() * y)
        .collect();
    Ok(trapezoid(&prod, a.grid.dt()))
}

/// Composite trapezoidal rule on uniformly spaced samples.
pub fn trapezoid<T>(values: &[T], dt: f64) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + Mul<f64, Output = T>,
{
    match values.len() {
        0 | 1 => T::default(),
        n => {
            let mut acc = (values[0] + values[n - 1]) * 0.5;
            for &v in &values[1..n - 1] {
                acc = acc + v;
            }
            acc * dt
        }
    }
}

/// Running trapezoidal integral; element `i` is the integral up to sample `i`.
pub fn cumulative_trapezoid(values: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * (values[i - 1] + v) * dt;
        }
        out.push(acc);
    }
    out
}

/// Centered differences in the interior, second-order one-sided at the ends.
pub fn derivative<T>(values: &[T], dt: f64) -> Vec<T>
where
    T: Copy + Default + Sub<Output = T> + std::ops::Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    match n {
        0 => Vec::new(),
        1 => vec![T::default()],
        2 => {
            let d = (values[1] - values[0]) * (1.0 / dt);
            vec![d, d]
        }
        _ => {
            let mut out = Vec::with_capacity(n);
            let inv2 = 0.5 / dt;
            out.push((values[1] * 4.0 - values[0] * 3.0 - values[2]) * inv2);
            for i in 1..n - 1 {
                out.push((values[i + 1] - values[i - 1]) * inv2);
            }
            out.push((values[n - 1] * 3.0 - values[n - 2] * 4.0 + values[n - 3]) * inv2);
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_params() -> PhysicalParams {
        PhysicalParams::with_purcell(1.6e10, 1.5e8, 100.0).unwrap()
    }

    #[test]
    fn rates_for_reference_coupling() {
        let (gamma_p, _) = derive_rates(&reference_params()).unwrap();
        // 2π·(1.6e10)²/1.5e8
        assert!((gamma_p / 1.07233e13 - 1.0).abs() < 1e-5, "{gamma_p}");
    }

    #[test]
    fn purcell_from_gamma_prime() {
        let gp = 2.0 * PI * 1.6e10 * 1.6e10 / 1.5e8;
        let p = PhysicalParams::new(1.6e10, 1.5e8, gp / 100.0).unwrap();
        let (_, purcell) = derive_rates(&p).unwrap();
        assert!((purcell - 100.0).abs() < 1e-12);
        assert!((p.purcell() * p.gamma_prime() - p.gamma_p()).abs() <= 1e-15 * p.gamma_p());
    }

    #[test]
    fn rejects_non_positive() {
        assert!(matches!(
            PhysicalParams::new(0.0, 1.5e8, 1.0),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            PhysicalParams::new(1.0, -1.0, 1.0),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            PhysicalParams::new(1.0, 1.0, 0.0),
            Err(Error::InvalidParams(_))
        ));
        assert!(PhysicalParams::with_purcell(0.0, 1.5e8, 100.0).is_err());
    }

    #[test]
    fn derive_rates_is_bitwise_pure() {
        let p = reference_params();
        let a = derive_rates(&p).unwrap();
        let b = derive_rates(&p).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }

    #[test]
    fn physical_couplings_have_no_excess_loss() {
        let p = reference_params();
        let k = p.couplings();
        assert!((k.loss_rate() - p.gamma_prime()).abs() < 1e-6 * p.gamma_prime());
        assert!(k.is_passive());
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 0.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        let g = TimeGrid::spanning(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.dt(), 0.5);
        assert_eq!(g.t_end(), 1.0);
    }

    #[test]
    fn zero_signal_has_zero_norm() {
        let g = TimeGrid::spanning(0.0, 1.0, 11).unwrap();
        let z = ComplexSignal::zeros(g, Unit::Field);
        assert_eq!(l2_photon_norm(&z, 1.5e8).unwrap(), 0.0);
        let s = ComplexSignal::from_fn(g, Unit::Field, |t| Complex64::new(t, 1.0));
        assert_eq!(overlap(&s, &z).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn unit_and_grid_mismatch() {
        let g = TimeGrid::spanning(0.0, 1.0, 11).unwrap();
        let a = ComplexSignal::zeros(g, Unit::Field);
        let b = ComplexSignal::zeros(g, Unit::Amplitude);
        assert!(matches!(
            l2_photon_norm(&b, 1.0),
            Err(Error::UnitError { .. })
        ));
        assert!(matches!(a.try_add(&b), Err(Error::UnitError { .. })));
        let c = ComplexSignal::zeros(TimeGrid::spanning(0.0, 2.0, 11).unwrap(), Unit::Field);
        assert!(matches!(overlap(&a, &c), Err(Error::GridError(_))));
    }

    #[test]
    fn self_overlap_is_energy() {
        let g = TimeGrid::spanning(-3.0, 3.0, 301).unwrap();
        let s = ComplexSignal::from_fn(g, Unit::Amplitude, |t| {
            Complex64::from_polar((-t * t).exp(), 0.3 * t)
        });
        let o = overlap(&s, &s).unwrap();
        assert!(o.im.abs() < 1e-15);
        assert!((o.re - s.energy()).abs() < 1e-14);
        assert!(o.re > 0.0);
    }

    #[test]
    fn derivative_is_exact_on_quadratics() {
        let dt = 0.1;
        let v: Vec<f64> = (0..20)
            .map(|i| {
                let t = i as f64 * dt;
                3.0 * t * t - t + 2.0
            })
            .collect();
        let d = derivative(&v, dt);
        for (i, di) in d.iter().enumerate() {
            let t = i as f64 * dt;
            assert!((di - (6.0 * t - 1.0)).abs() < 1e-10, "{i}: {di}");
        }
    }

    #[test]
    fn signal_json_schema() {
        let g = TimeGrid::new(-1.0, 0.5, 3).unwrap();
        let s = ComplexSignal::new(
            g,
            vec![
                Complex64::new(1.0, 2.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.5, 0.0),
            ],
            Unit::Rate,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["unit"], "rate");
        assert_eq!(v["n"], 3);
        assert_eq!(v["t_start"], -1.0);
        assert_eq!(v["dt"], 0.5);
        assert_eq!(v["re"], serde_json::json!([1.0, 0.0, 0.5]));
        assert_eq!(v["im"], serde_json::json!([2.0, -1.0, 0.0]));
        let back: ComplexSignal = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn signal_json_rejects_length_mismatch() {
        let bad = r#"{"unit":"field","t_start":0,"dt":1,"n":3,"re":[1,2],"im":[0,0,0]}"#;
        assert!(serde_json::from_str::<ComplexSignal>(bad).is_err());
    }

    #[test]
    fn qubit_normalization() {
        assert!(QubitAmplitudes::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
        let q = QubitAmplitudes::from_real(1.0, 1.0).unwrap();
        assert!((q.alpha_g().norm_sqr() + q.alpha_s().norm_sqr() - 1.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn signal(seed: &[(f64, f64)]) -> ComplexSignal {
            let g = TimeGrid::new(0.0, 1e-3, seed.len()).unwrap();
            ComplexSignal::new(
                g,
                seed.iter().map(|&(r, i)| Complex64::new(r, i)).collect(),
                Unit::Field,
            )
            .unwrap()
        }

        proptest! {
            #[test]
            fn norm_ignores_global_phase(
                seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..64),
                phi in 0.0f64..(2.0 * PI),
            ) {
                let s = signal(&seed);
                let rotated = s.scaled(Complex64::from_polar(1.0, phi));
                let a = l2_photon_norm(&s, 1.5e8).unwrap();
                let b = l2_photon_norm(&rotated, 1.5e8).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
            }

            #[test]
            fn overlap_is_conjugate_symmetric(
                seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 2..64),
            ) {
                let a = signal(&seed.iter().map(|t| (t.0, t.1)).collect::<Vec<_>>());
                let b = signal(&seed.iter().map(|t| (t.2, t.3)).collect::<Vec<_>>());
                let ab = overlap(&a, &b).unwrap();
                let ba = overlap(&b, &a).unwrap();
                let scale = (a.energy() * b.energy()).sqrt().max(1e-300);
                prop_assert!((ab - ba.conj()).norm() <= 1e-12 * scale);
            }
        }
    }
}
