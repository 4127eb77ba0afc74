//! Run manifests and table writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PointResult;
use crate::error::{Error, Result};
use crate::rng::fnv1a;

pub const CSV_HEADER: [&str; 12] = [
    "run_id",
    "d",
    "alpha",
    "eta",
    "p_z_single",
    "p_z_ent",
    "p_f",
    "trials",
    "failures",
    "p_L",
    "ci_low",
    "ci_high",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything needed to reproduce a run, plus its tallies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub software: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub rows: Vec<PointResult>,
    /// Command-specific results (crossing, mapped thresholds, tables).
    pub summary: serde_json::Value,
}

/// Stable identifier of `(command, config)`; worker count is not part of it.
pub fn run_id(command: &str, config: &serde_json::Value) -> String {
    let text = format!("{command}|{config}|{}", env!("CARGO_PKG_VERSION"));
    format!("{:016x}", fnv1a(text.as_bytes()))
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        Self {
            run_id: run_id(command, &config),
            software: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config,
            rows: Vec::new(),
            summary: serde_json::Value::Null,
        }
    }
}

/// Point table in the fixed column order.
pub fn write_csv<W: std::io::Write>(w: W, run_id: &str, rows: &[PointResult]) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        wr.write_record([
            run_id.to_string(),
            row.d.to_string(),
            row.alpha.to_string(),
            row.eta.to_string(),
            row.p_z_single.to_string(),
            row.p_z_ent.to_string(),
            row.p_f.to_string(),
            row.trials.to_string(),
            row.failures.to_string(),
            row.p_l.to_string(),
            row.ci_low.to_string(),
            row.ci_high.to_string(),
        ])
        .map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

/// Writes `<dir>/<command>.csv` plus `<command>.manifest.json`, or a single
/// `<command>.json`. Returns the paths written.
pub fn write_run(dir: &Path, manifest: &RunManifest, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let json =
        |v: &RunManifest| serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()));
    match format {
        OutputFormat::Csv => {
            let csv_path = dir.join(format!("{}.csv", manifest.command));
            write_csv(
                fs::File::create(&csv_path)?,
                &manifest.run_id,
                &manifest.rows,
            )?;
            let man_path = dir.join(format!("{}.manifest.json", manifest.command));
            fs::write(&man_path, json(manifest)? + "\n")?;
            Ok(vec![csv_path, man_path])
        }
        OutputFormat::Json => {
            let path = dir.join(format!("{}.json", manifest.command));
            fs::write(&path, json(manifest)? + "\n")?;
            Ok(vec![path])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Point;
    use crate::lattice::Distance;

    fn row() -> PointResult {
        let p = Point::knob(6.9e-3, 1.247, 3.3e-3).unwrap();
        PointResult::new(Distance::new(5).unwrap(), &p, 1000, 7)
    }

    #[test]
    fn csv_header_and_row() {
        let mut buf = Vec::new();
        write_csv(&mut buf, "abc", &[row()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 12);
        assert_eq!(&fields[..3], &["abc", "5", "1.247"]);
        assert_eq!(fields[8], "7");
        assert_eq!(fields[9], "0.007");
    }

    #[test]
    fn manifest_round_trip() {
        let cfg = serde_json::json!({"distances": [3, 5], "trials": 10});
        let mut m = RunManifest::new("simulate", 4, cfg.clone());
        assert_eq!(m.run_id, run_id("simulate", &cfg));
        assert_ne!(m.run_id, run_id("threshold", &cfg));
        let empty: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(empty, m);
        m.rows = vec![row(); 500];
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn writes_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("simulate", 1, serde_json::json!({}));
        m.rows.push(row());
        let csv = write_run(dir.path(), &m, OutputFormat::Csv).unwrap();
        assert_eq!(csv.len(), 2);
        assert!(fs::read_to_string(&csv[0])
            .unwrap()
            .starts_with("run_id,d,alpha"));
        let js = write_run(dir.path(), &m, OutputFormat::Json).unwrap();
        let back: RunManifest = serde_json::from_str(&fs::read_to_string(&js[0]).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
