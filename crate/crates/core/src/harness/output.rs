use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentResult, PolicySummary};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Column order of the per-round CSV.
pub const CSV_COLUMNS: [&str; 10] = [
    "round",
    "policy",
    "measure",
    "instantaneous_energy_j",
    "cumulative_energy_j",
    "global_loss",
    "objective_value",
    "cr_value",
    "selected_ids",
    "wall_time_ms",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    /// `rounds.csv` plus a `summary.json` sidecar.
    #[default]
    Csv,
    /// A single `result.json` with every record.
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config("format", format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a ScenarioConfig,
    summary: &'a [PolicySummary],
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Json { path: path.into(), source: e })?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Writes the experiment into `dir`, overwriting earlier output. Returns the files written.
pub fn write_results(result: &ExperimentResult, dir: impl AsRef<Path>, format: OutputFormat) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        OutputFormat::Json => {
            let path = dir.join("result.json");
            write_json(&path, result)?;
            Ok(vec![path])
        }
        OutputFormat::Csv => {
            let csv_path = dir.join("rounds.csv");
            let csv_err = |e| Error::Csv { path: csv_path.clone(), source: e };
            let mut writer = csv::Writer::from_path(&csv_path).map_err(csv_err)?;
            writer.write_record(CSV_COLUMNS).map_err(csv_err)?;
            for r in &result.records {
                let ids = r.selected_ids.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
                writer
                    .write_record([
                        r.round.to_string(),
                        r.policy.clone(),
                        r.measure.clone(),
                        r.instantaneous_energy_j.to_string(),
                        r.cumulative_energy_j.to_string(),
                        r.global_loss.to_string(),
                        r.objective_value.to_string(),
                        r.cr_value.to_string(),
                        ids,
                        r.wall_time_ms.to_string(),
                    ])
                    .map_err(csv_err)?;
            }
            writer.flush().map_err(|e| Error::io(&csv_path, e))?;

            let sidecar = dir.join("summary.json");
            write_json(&sidecar, &Sidecar { config: &result.config, summary: &result.summary })?;
            Ok(vec![csv_path, sidecar])
        }
    }
}
