use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::LabError;

/// One line of a result table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub method: String,
    pub scene_id: usize,
    pub seed: u64,
    pub axis: Option<&'static str>,
    pub offset_m: Option<f64>,
    pub peb_m: Option<f64>,
    pub stage1_trace: Option<f64>,
    pub stage2_trace: Option<f64>,
    pub wall_s: Option<f64>,
    pub status: String,
}

pub const CSV_HEADER: [&str; 10] = [
    "method",
    "scene_id",
    "seed",
    "axis",
    "offset_m",
    "peb_m",
    "stage1_trace",
    "stage2_trace",
    "wall_s",
    "status",
];

pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<(), LabError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Resolved configuration and bookkeeping written next to each table.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'static str,
    pub seed: u64,
    pub rows: usize,
    pub failed_rows: usize,
    pub table: &'a str,
    pub transmit_power_w: f64,
    pub noise_power_w: f64,
    pub config: &'a ExperimentConfig,
}

pub fn write_manifest(path: &Path, manifest: &Manifest<'_>) -> Result<(), LabError> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, manifest)?;
    f.write_all(b"\n")?;
    Ok(())
}
