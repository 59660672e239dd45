//! Run configuration: a JSON document whose fields can all be overridden on
//! the command line.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexSignal, PhysicalParams, QubitAmplitudes, Unit};
use crate::network::PacketSpec;
use crate::sensitivity::{ErrorSpec, PerturbationModel};
use crate::wavepacket::{GaussianSpec, GridSpec};

pub const DEFAULT_G: f64 = 1.6e10;
pub const DEFAULT_C: f64 = 1.5e8;
pub const DEFAULT_PURCELL: f64 = 100.0;
pub const DEFAULT_A: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }
}

/// Every field is optional; unset fields fall back to the defaults of the
/// reference device.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub g: Option<f64>,
    pub c: Option<f64>,
    pub gamma_prime: Option<f64>,
    #[serde(rename = "P")]
    pub purcell: Option<f64>,
    /// Purcell factor of the second node (swap); defaults to the first.
    #[serde(rename = "P2")]
    pub purcell2: Option<f64>,
    pub a: Option<f64>,
    pub center: Option<f64>,
    /// JSON file holding a field-valued ComplexSignal used instead of a
    /// Gaussian.
    pub packet_file: Option<PathBuf>,
    pub grid_span: Option<f64>,
    pub grid_n: Option<usize>,
    pub s: Option<f64>,
    pub tau: Option<f64>,
    pub alpha_g: Option<f64>,
    pub alpha_s: Option<f64>,
    pub alpha_g2: Option<f64>,
    pub alpha_s2: Option<f64>,
    pub errors: Option<Vec<ErrorSpec>>,
    pub error_size: Option<f64>,
    pub model: Option<PerturbationModel>,
    pub omega_file: Option<PathBuf>,
    pub e_in_file: Option<PathBuf>,
    pub init_e: Option<[f64; 2]>,
    pub init_s: Option<[f64; 2]>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),* $(,)?) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `top` replace those of `self`. Setting either of
    /// `gamma_prime`/`P` in `top` replaces both.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        if top.gamma_prime.is_some() || top.purcell.is_some() {
            self.gamma_prime = top.gamma_prime;
            self.purcell = top.purcell;
        }
        let top = RunConfig {
            gamma_prime: None,
            purcell: None,
            ..top
        };
        overlay!(self, top;
            g, c, purcell2, a, center, packet_file, grid_span, grid_n, s, tau, alpha_g, alpha_s,
            alpha_g2, alpha_s2, errors, error_size, model, omega_file, e_in_file, init_e, init_s,
            out, format,
        );
        self
    }

    /// Referenced input files must exist before any work starts.
    pub fn check_files(&self) -> Result<()> {
        for p in [&self.packet_file, &self.omega_file, &self.e_in_file]
            .into_iter()
            .flatten()
        {
            if !p.is_file() {
                return Err(Error::Config(format!(
                    "input file {} does not exist",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    fn g(&self) -> f64 {
        self.g.unwrap_or(DEFAULT_G)
    }

    fn c(&self) -> f64 {
        self.c.unwrap_or(DEFAULT_C)
    }

    pub fn params(&self) -> Result<PhysicalParams> {
        match (self.gamma_prime, self.purcell) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give exactly one of gamma_prime and P".into(),
            )),
            (Some(gq), None) => PhysicalParams::new(self.g(), self.c(), gq),
            (None, p) => {
                PhysicalParams::with_purcell(self.g(), self.c(), p.unwrap_or(DEFAULT_PURCELL))
            }
        }
    }

    pub fn params2(&self) -> Result<PhysicalParams> {
        match self.purcell2 {
            Some(p) => PhysicalParams::with_purcell(self.g(), self.c(), p),
            None => self.params(),
        }
    }

    pub fn grid(&self) -> GridSpec {
        let d = GridSpec::default();
        GridSpec {
            span: self.grid_span.unwrap_or(d.span),
            n: self.grid_n.unwrap_or(d.n),
        }
    }

    pub fn packet(&self) -> Result<PacketSpec> {
        match &self.packet_file {
            Some(path) => Ok(PacketSpec::Custom(read_signal(path, Unit::Field)?)),
            None => Ok(PacketSpec::Gaussian {
                spec: GaussianSpec::new(self.a.unwrap_or(DEFAULT_A))?,
                center: self.center.unwrap_or(0.0),
            }),
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(0.0)
    }

    /// Qubit from `alpha_g`/`alpha_s`, normalized; a missing amplitude is
    /// completed to unit norm, both missing give the equal superposition.
    pub fn qubit(&self) -> Result<QubitAmplitudes> {
        qubit_from(self.alpha_g, self.alpha_s)
    }

    pub fn qubit2(&self) -> Result<QubitAmplitudes> {
        if self.alpha_g2.is_none() && self.alpha_s2.is_none() {
            self.qubit()
        } else {
            qubit_from(self.alpha_g2, self.alpha_s2)
        }
    }

    pub fn init(&self, default: (Complex64, Complex64)) -> (Complex64, Complex64) {
        let pick = |v: Option<[f64; 2]>, d| v.map_or(d, |[re, im]| Complex64::new(re, im));
        (pick(self.init_e, default.0), pick(self.init_s, default.1))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or_default()
    }

    pub fn model(&self) -> PerturbationModel {
        self.model.unwrap_or_default()
    }
}

fn qubit_from(alpha_g: Option<f64>, alpha_s: Option<f64>) -> Result<QubitAmplitudes> {
    let complete = |x: f64| {
        if x.abs() > 1.0 {
            Err(Error::Config(format!("amplitude {x} exceeds 1")))
        } else {
            Ok((1.0 - x * x).sqrt())
        }
    };
    match (alpha_g, alpha_s) {
        (None, None) => Ok(QubitAmplitudes::equal_superposition()),
        (Some(g), None) => QubitAmplitudes::from_real(g, complete(g)?),
        (None, Some(s)) => QubitAmplitudes::from_real(complete(s)?, s),
        (Some(g), Some(s)) => QubitAmplitudes::from_real(g, s),
    }
}

pub fn read_signal(path: &Path, unit: Unit) -> Result<ComplexSignal> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let sig: ComplexSignal = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    sig.ensure_unit(unit)?;
    Ok(sig)
}
