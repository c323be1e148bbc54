use std::fs;
use std::path::Path;

use super::{Outcome, ScenarioError, SweepTable, TraceSet};

/// Full-precision float formatting used by every CSV artifact.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Write(e.to_string())
}

/// `field,t,re,im,intensity`, one row per sample of each labelled field.
pub fn traces_csv(traces: &TraceSet) -> Result<String, ScenarioError> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["field", "t", "re", "im", "intensity"]).map_err(csv_error)?;
    for (label, env) in &traces.fields {
        for (j, v) in env.samples.iter().enumerate() {
            let t = env.grid.t(j);
            w.write_record([
                label.clone(),
                format_float(t),
                format_float(v.re),
                format_float(v.im),
                format_float(v.norm_sqr()),
            ])
            .map_err(csv_error)?;
        }
    }
    String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
}

pub fn sweep_csv(table: &SweepTable) -> Result<String, ScenarioError> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(&table.columns).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| format_float(*x))).map_err(csv_error)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
}

pub(super) fn write_all(dir: &Path, outcome: &Outcome) -> Result<(), ScenarioError> {
    let io = |e: std::io::Error| ScenarioError::Write(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let json = serde_json::to_string_pretty(&outcome.report).map_err(csv_error)?;
    fs::write(dir.join("report.json"), json + "\n").map_err(io)?;
    if !outcome.traces.is_empty() {
        fs::write(dir.join("traces.csv"), traces_csv(&outcome.traces)?).map_err(io)?;
    }
    if let Some(t) = &outcome.sweep {
        fs::write(dir.join("sweep.csv"), sweep_csv(t)?).map_err(io)?;
    }
    Ok(())
}
