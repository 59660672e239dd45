//! CSV and JSON emission.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::model::ComplexSignal;
use crate::network::NodeRecord;
use crate::synthesis::SynthesisResult;

pub const SYNTH_COLUMNS: [&str; 5] = ["t", "re_omega", "im_omega", "abs_beta_e", "abs_beta_s"];

pub const TRAJECTORY_COLUMNS: [&str; 7] = [
    "t",
    "re_beta_e",
    "im_beta_e",
    "re_beta_s",
    "im_beta_s",
    "re_e_out",
    "im_e_out",
];

pub const NODE_COLUMNS: [&str; 9] = [
    "t",
    "re_omega",
    "im_omega",
    "abs_beta_e",
    "abs_beta_s",
    "re_e_in",
    "im_e_in",
    "re_e_out",
    "im_e_out",
];

/// Shortest round-trip decimal, switching to exponent notation for very
/// small or large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e6).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| num(v)))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> crate::error::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => std::io::Error::other(format!("{other:?}")).into(),
    }
}

pub fn write_synthesis_csv(path: &Path, r: &SynthesisResult) -> Result<()> {
    let grid = *r.omega.grid();
    let (om, be, bs) = (r.omega.samples(), r.beta_e.samples(), r.beta_s.samples());
    write_rows(
        path,
        &SYNTH_COLUMNS,
        (0..grid.n()).map(|i| vec![grid.time(i), om[i].re, om[i].im, be[i].norm(), bs[i].norm()]),
    )
}

pub fn write_trajectory_csv(path: &Path, tr: &Trajectory) -> Result<()> {
    let grid = *tr.beta_e.grid();
    let (be, bs, eo) = (tr.beta_e.samples(), tr.beta_s.samples(), tr.e_out.samples());
    write_rows(
        path,
        &TRAJECTORY_COLUMNS,
        (0..grid.n()).map(|i| {
            vec![
                grid.time(i),
                be[i].re,
                be[i].im,
                bs[i].re,
                bs[i].im,
                eo[i].re,
                eo[i].im,
            ]
        }),
    )
}

/// Control, simulated amplitudes and fields of one network node.
pub fn write_node_csv(path: &Path, node: &NodeRecord, e_in: &ComplexSignal) -> Result<()> {
    let grid = *node.synthesis.omega.grid();
    let om = node.synthesis.omega.samples();
    let tr = &node.trajectory;
    let (be, bs, ei, eo) = (
        tr.beta_e.samples(),
        tr.beta_s.samples(),
        e_in.samples(),
        tr.e_out.samples(),
    );
    write_rows(
        path,
        &NODE_COLUMNS,
        (0..grid.n()).map(|i| {
            vec![
                grid.time(i),
                om[i].re,
                om[i].im,
                be[i].norm(),
                bs[i].norm(),
                ei[i].re,
                ei[i].im,
                eo[i].re,
                eo[i].im,
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn number_format_roundtrips() {
        for v in [0.0, 0.99, -0.1, 1.2e-12, 3.5e13, 1e-4, -7.25e-300] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(1.2e-12), "1.2e-12");
        assert_eq!(num(0.5), "0.5");
    }
}
