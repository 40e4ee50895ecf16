//! Persisted channel knowledge maps (JSON container).

use std::fs;
use std::path::Path;

use ckm_core::ckm::{BimDatabase, CpmDatabase, CpmParams, LabeledSample};
use ckm_core::geometry::ArrayLayout;
use ckm_core::scene::GroundTruthSample;
use serde::{Deserialize, Serialize};

use crate::error::FormatError;

pub const MAP_FORMAT: &str = "ckm-map";
pub const MAP_VERSION: u32 = 1;

#[derive(Serialize)]
struct CpmFileOut<'a> {
    format: &'static str,
    version: u32,
    kind: &'static str,
    params: CpmParams,
    samples: &'a [GroundTruthSample],
}

#[derive(Serialize)]
struct BimFileOut<'a> {
    format: &'static str,
    version: u32,
    kind: &'static str,
    k: usize,
    layout: &'a ArrayLayout,
    samples: &'a [LabeledSample],
}

#[derive(Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    kind: String,
}

#[derive(Deserialize)]
struct CpmFileIn {
    params: CpmParams,
    samples: Vec<GroundTruthSample>,
}

#[derive(Deserialize)]
struct BimFileIn {
    k: usize,
    layout: ArrayLayout,
    samples: Vec<LabeledSample>,
}

fn malformed(e: serde_json::Error) -> FormatError {
    FormatError::Malformed(e.to_string())
}

fn check_envelope(text: &str, kind: &'static str) -> Result<(), FormatError> {
    let env: Envelope = serde_json::from_str(text).map_err(malformed)?;
    if env.format != MAP_FORMAT {
        return Err(FormatError::Malformed(format!("not a {MAP_FORMAT} file")));
    }
    if env.version != MAP_VERSION {
        return Err(FormatError::Version {
            what: "map",
            found: env.version,
            expected: MAP_VERSION,
        });
    }
    if env.kind != kind {
        return Err(FormatError::KindMismatch {
            expected: kind,
            found: env.kind,
        });
    }
    Ok(())
}

pub fn cpm_to_json(db: &CpmDatabase) -> String {
    serde_json::to_string(&CpmFileOut {
        format: MAP_FORMAT,
        version: MAP_VERSION,
        kind: "cpm",
        params: db.params(),
        samples: db.samples(),
    })
    .expect("map serializes")
}

pub fn cpm_from_json(text: &str) -> Result<CpmDatabase, FormatError> {
    check_envelope(text, "cpm")?;
    let f: CpmFileIn = serde_json::from_str(text).map_err(malformed)?;
    Ok(CpmDatabase::build(f.samples, f.params)?)
}

pub fn bim_to_json(db: &BimDatabase) -> String {
    serde_json::to_string(&BimFileOut {
        format: MAP_FORMAT,
        version: MAP_VERSION,
        kind: "bim",
        k: db.k(),
        layout: db.layout(),
        samples: db.samples(),
    })
    .expect("map serializes")
}

pub fn bim_from_json(text: &str) -> Result<BimDatabase, FormatError> {
    check_envelope(text, "bim")?;
    let f: BimFileIn = serde_json::from_str(text).map_err(malformed)?;
    Ok(BimDatabase::from_labeled(f.samples, f.layout, f.k)?)
}

fn write_text(path: &Path, mut text: String) -> Result<(), FormatError> {
    text.push('\n');
    fs::write(path, text).map_err(|e| FormatError::io(path, e))
}

fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|e| FormatError::io(path, e))
}

pub fn save_cpm(path: &Path, db: &CpmDatabase) -> Result<(), FormatError> {
    write_text(path, cpm_to_json(db))
}

pub fn load_cpm(path: &Path) -> Result<CpmDatabase, FormatError> {
    cpm_from_json(&read_text(path)?)
}

pub fn save_bim(path: &Path, db: &BimDatabase) -> Result<(), FormatError> {
    write_text(path, bim_to_json(db))
}

pub fn load_bim(path: &Path) -> Result<BimDatabase, FormatError> {
    bim_from_json(&read_text(path)?)
}
