//! Transfer fidelity when one node runs with parameters that differ from the
//! ones its control was designed for.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::network::{transfer_with, NodeRun, TransferSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    G,
    GammaP,
    GammaPrime,
    Omega,
}

impl Parameter {
    pub const ALL: [Parameter; 4] = [Self::G, Self::GammaP, Self::GammaPrime, Self::Omega];

    pub fn name(&self) -> &'static str {
        match self {
            Self::G => "g",
            Self::GammaP => "gamma_p",
            Self::GammaPrime => "gamma_prime",
            Self::Omega => "omega",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown parameter {s:?}")))
    }
}

/// How a g or Γ_p error enters the simulated node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationModel {
    /// The g row scales only the field coupling √(2π)g and the Γ_p row only
    /// the decay rate; the mismatch shows up as extra loss.
    #[default]
    Decoupled,
    /// Γ_p = 2πg²/c is kept: the g row scales both, and the Γ_p row moves g
    /// to match.
    Consistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub parameter: Parameter,
    pub relative_error: f64,
    /// 1 (sender) or 2 (receiver).
    pub node: u8,
}

impl ErrorSpec {
    pub fn new(parameter: Parameter, relative_error: f64, node: u8) -> Result<Self> {
        if !(relative_error.is_finite() && relative_error > -1.0) {
            return Err(Error::InvalidParams(format!(
                "relative error must exceed −1, got {relative_error}"
            )));
        }
        if node != 1 && node != 2 {
            return Err(Error::InvalidParams(format!(
                "node must be 1 or 2, got {node}"
            )));
        }
        Ok(Self {
            parameter,
            relative_error,
            node,
        })
    }
}

/// Signed default error of each parameter in the standard table.
pub fn default_sign(parameter: Parameter) -> f64 {
    match parameter {
        Parameter::G | Parameter::Omega => -1.0,
        Parameter::GammaP | Parameter::GammaPrime => 1.0,
    }
}

/// The eight standard cells: every parameter on each node, at `size`
/// relative error with the default sign.
pub fn standard_errors(size: f64) -> Result<Vec<ErrorSpec>> {
    let mut out = Vec::with_capacity(8);
    for node in [1, 2] {
        for p in Parameter::ALL {
            out.push(ErrorSpec::new(p, default_sign(p) * size, node)?);
        }
    }
    Ok(out)
}

/// How a node designed for `params` actually runs under `err`.
pub fn perturbed_node(
    params: &PhysicalParams,
    err: &ErrorSpec,
    model: PerturbationModel,
) -> Result<NodeRun> {
    let mut run = NodeRun::nominal(params);
    let k = 1.0 + err.relative_error;
    let c = &mut run.couplings;
    match (err.parameter, model) {
        (Parameter::G, PerturbationModel::Decoupled) => c.field_coupling *= k,
        (Parameter::G, PerturbationModel::Consistent) => {
            c.field_coupling *= k;
            c.gamma_p *= k * k;
        }
        (Parameter::GammaP, PerturbationModel::Decoupled) => c.gamma_p *= k,
        (Parameter::GammaP, PerturbationModel::Consistent) => {
            c.gamma_p *= k;
            c.field_coupling *= k.sqrt();
        }
        (Parameter::GammaPrime, _) => c.gamma_prime *= k,
        (Parameter::Omega, _) => run.omega_scale = k,
    }
    if !run.couplings.is_passive() {
        return Err(Error::InvalidParams(format!(
            "{} error of {} on node {} makes the emitter radiate more than it decays",
            err.parameter.name(),
            err.relative_error,
            err.node
        )));
    }
    Ok(run)
}

/// Overlap fidelity of a transfer with one node perturbed.
pub fn perturbed_transfer(
    spec: &TransferSpec,
    err: &ErrorSpec,
    model: PerturbationModel,
) -> Result<f64> {
    let mut run1 = NodeRun::nominal(&spec.node1);
    let mut run2 = NodeRun::nominal(&spec.node2);
    match err.node {
        1 => run1 = perturbed_node(&spec.node1, err, model)?,
        2 => run2 = perturbed_node(&spec.node2, err, model)?,
        n => {
            return Err(Error::InvalidParams(format!(
                "node must be 1 or 2, got {n}"
            )))
        }
    }
    Ok(transfer_with(spec, &run1, &run2)?.result.fidelity_overlap)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub error: ErrorSpec,
    /// `None` when the row failed.
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityTable {
    pub model: PerturbationModel,
    pub baseline: f64,
    pub rows: Vec<SensitivityRow>,
}

impl SensitivityTable {
    pub fn fidelity(&self, parameter: Parameter, node: u8) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.error.parameter == parameter && r.error.node == node)
            .and_then(|r| r.fidelity)
    }

    pub fn succeeded(&self) -> usize {
        self.rows.iter().filter(|r| r.fidelity.is_some()).count()
    }

    /// `node,parameter,relative_error,fidelity`, baseline first as
    /// `0,none,0,F`, failed rows as `NA`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut write = |rec: [String; 4]| w.write_record(&rec).expect("in-memory write");
        write(["node", "parameter", "relative_error", "fidelity"].map(String::from));
        write([
            "0".into(),
            "none".into(),
            "0".into(),
            self.baseline.to_string(),
        ]);
        for r in &self.rows {
            write([
                r.error.node.to_string(),
                r.error.parameter.name().into(),
                r.error.relative_error.to_string(),
                r.fidelity.map_or_else(|| "NA".into(), |v| v.to_string()),
            ]);
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

/// Baseline plus one perturbed transfer per error, evaluated in parallel and
/// reported in input order. Row failures are recorded, not propagated.
pub fn build_table(
    spec: &TransferSpec,
    errors: &[ErrorSpec],
    model: PerturbationModel,
) -> Result<SensitivityTable> {
    let baseline = crate::network::transfer(spec)?.fidelity_overlap;
    let rows = errors
        .par_iter()
        .map(|e| match perturbed_transfer(spec, e, model) {
            Ok(f) => SensitivityRow {
                error: *e,
                fidelity: Some(f),
                failure: None,
            },
            Err(err) => SensitivityRow {
                error: *e,
                fidelity: None,
                failure: Some(err.to_string()),
            },
        })
        .collect();
    Ok(SensitivityTable {
        model,
        baseline,
        rows,
    })
}
