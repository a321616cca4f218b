//! Atomic file emission and CSV helpers.
//!
//! Every output is written to a temporary sibling file and renamed into
//! place, so a crash never leaves a partial artifact.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::dist::FeatureDistribution;
use crate::error::DistError;

use super::HarnessError;

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    if !dir.as_os_str().is_empty() {
        fs::create_dir_all(dir).map_err(|e| HarnessError::Io(path.display().to_string(), e))?;
    }
    let mut tmp: PathBuf = path.to_path_buf();
    let mut name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    name.push_str(".tmp");
    tmp.set_file_name(name);
    fs::write(&tmp, bytes).map_err(|e| HarnessError::Io(tmp.display().to_string(), e))?;
    fs::rename(&tmp, path).map_err(|e| HarnessError::Io(path.display().to_string(), e))
}

pub fn write_csv<T: Serialize>(path: &Path, records: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)
            .map_err(|e| HarnessError::Csv(path.display().to_string(), e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| HarnessError::Csv(path.display().to_string(), e.to_string()))?;
    atomic_write(path, &bytes)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| HarnessError::Csv(path.display().to_string(), e.to_string()))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| HarnessError::Csv(path.display().to_string(), e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| HarnessError::Csv(path.display().to_string(), e.to_string()))?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

#[derive(Debug, Serialize, serde::Deserialize)]
struct GridRow {
    x: f64,
    cdf: f64,
}

#[derive(Debug, Serialize)]
struct SampleRow<'a> {
    x: f64,
    label: u8,
    action: &'a str,
    caught: u8,
    accepted: u8,
}

/// Dumps per-agent simulation records as `x,label,action,caught,accepted`.
pub fn write_samples_csv(
    path: &Path,
    samples: &[crate::oracle::AgentSample],
) -> Result<(), HarnessError> {
    let rows: Vec<SampleRow> = samples
        .iter()
        .map(|s| SampleRow {
            x: s.x,
            label: s.final_label as u8,
            action: s.action.as_str(),
            caught: s.caught as u8,
            accepted: s.accepted as u8,
        })
        .collect();
    write_csv(path, &rows)
}

/// Loads an empirical-grid distribution from a `x,cdf` CSV.
pub fn load_empirical_csv(path: &Path) -> Result<FeatureDistribution, DistError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| DistError::Csv(e.to_string()))?;
    let points = r
        .deserialize::<GridRow>()
        .map(|row| row.map(|g| (g.x, g.cdf)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| DistError::Csv(e.to_string()))?;
    FeatureDistribution::empirical(points)
}

/// Stores an empirical-grid distribution as a `x,cdf` CSV.
pub fn store_empirical_csv(path: &Path, dist: &FeatureDistribution) -> Result<(), HarnessError> {
    let FeatureDistribution::EmpiricalGrid(grid) = dist else {
        return Err(HarnessError::Csv(
            path.display().to_string(),
            "only empirical-grid distributions round-trip as x,cdf csv".into(),
        ));
    };
    let rows: Vec<GridRow> = grid.points().map(|(x, cdf)| GridRow { x, cdf }).collect();
    write_csv(path, &rows)
}
