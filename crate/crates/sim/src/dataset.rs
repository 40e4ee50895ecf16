//! Plain-text ground-truth dataset files.
//!
//! One record per line:
//!
//! ```text
//! x y z L (|α| ψ θ_AoD φ_AoD θ_AoA φ_AoA)×L
//! ```
//!
//! Lines starting with `#` are comments. The first comment line written by
//! [`write_dataset`] is a header of `key=value` tokens (`wavelength`,
//! `gamma`, `scene`, `seed`, `paths`). Files without a header are accepted,
//! so externally traced data in the same record layout can be loaded.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path as FsPath;

use ckm_core::channel::{Path, PathSet};
use ckm_core::geometry::{AnglePair, Point3};
use ckm_core::scene::{GroundTruthSample, Scene};
use ckm_core::Complex64;

use crate::error::FormatError;
use crate::scenefile::scene_hash;

pub const DATASET_MAGIC: &str = "ckm-dataset";
pub const DATASET_VERSION: u32 = 1;

/// Metadata carried by the header line. Every field is optional on read.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetHeader {
    pub wavelength: Option<f64>,
    pub reflection: Option<Complex64>,
    pub scene_hash: Option<String>,
    pub seed: Option<u64>,
    pub max_paths: Option<usize>,
}

impl DatasetHeader {
    pub fn for_scene(scene: &Scene, seed: u64, max_paths: usize) -> Self {
        Self {
            wavelength: Some(scene.wavelength),
            reflection: Some(scene.reflection),
            scene_hash: Some(scene_hash(scene)),
            seed: Some(seed),
            max_paths: Some(max_paths),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub samples: Vec<GroundTruthSample>,
}

// 17 significant digits: every f64 survives a text round trip.
fn num(out: &mut String, x: f64) {
    write!(out, " {x:.16e}").unwrap();
}

pub fn encode_record(s: &GroundTruthSample) -> String {
    let mut line = String::with_capacity(32 + 150 * s.pathset.len());
    let p = s.location;
    write!(line, "{:.16e} {:.16e} {:.16e} {}", p.x, p.y, p.z, s.pathset.len()).unwrap();
    for path in s.pathset.paths() {
        for v in [
            path.gain,
            path.phase,
            path.aod.zenith,
            path.aod.azimuth,
            path.aoa.zenith,
            path.aoa.azimuth,
        ] {
            num(&mut line, v);
        }
    }
    line
}

fn encode_header(h: &DatasetHeader) -> String {
    let mut line = format!("# {DATASET_MAGIC} v{DATASET_VERSION}");
    if let Some(w) = h.wavelength {
        write!(line, " wavelength={w:.16e}").unwrap();
    }
    if let Some(g) = h.reflection {
        write!(line, " gamma={:.16e},{:.16e}", g.re, g.im).unwrap();
    }
    if let Some(s) = &h.scene_hash {
        write!(line, " scene={s}").unwrap();
    }
    if let Some(s) = h.seed {
        write!(line, " seed={s}").unwrap();
    }
    if let Some(l) = h.max_paths {
        write!(line, " paths={l}").unwrap();
    }
    line
}

pub fn write_dataset<W: Write>(mut out: W, data: &Dataset) -> std::io::Result<()> {
    writeln!(out, "{}", encode_header(&data.header))?;
    for s in &data.samples {
        writeln!(out, "{}", encode_record(s))?;
    }
    out.flush()
}

pub fn save_dataset(path: &FsPath, data: &Dataset) -> Result<(), FormatError> {
    let file = fs::File::create(path).map_err(|e| FormatError::io(path, e))?;
    write_dataset(std::io::BufWriter::new(file), data).map_err(|e| FormatError::io(path, e))
}

pub fn load_dataset(path: &FsPath) -> Result<Dataset, FormatError> {
    let file = fs::File::open(path).map_err(|e| FormatError::io(path, e))?;
    read_dataset(BufReader::new(file)).map_err(|e| match e {
        FormatError::Io { source, .. } => FormatError::io(path, source),
        other => other,
    })
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, FormatError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| FormatError::parse(line, format!("not a number: {tok:?}")))?;
    if !v.is_finite() {
        return Err(FormatError::parse(line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

fn parse_header(text: &str, line: usize, h: &mut DatasetHeader) -> Result<(), FormatError> {
    let mut toks = text.split_whitespace();
    if toks.next() != Some(DATASET_MAGIC) {
        return Ok(());
    }
    let version = toks
        .next()
        .and_then(|v| v.strip_prefix('v'))
        .and_then(|v| v.parse::<u32>().ok())
        .ok_or_else(|| FormatError::parse(line, "missing dataset version"))?;
    if version != DATASET_VERSION {
        return Err(FormatError::Version {
            what: "dataset",
            found: version,
            expected: DATASET_VERSION,
        });
    }
    for tok in toks {
        let Some((key, value)) = tok.split_once('=') else {
            return Err(FormatError::parse(line, format!("bad header token {tok:?}")));
        };
        match key {
            "wavelength" => h.wavelength = Some(parse_f64(value, line)?),
            "gamma" => {
                let (re, im) = value
                    .split_once(',')
                    .ok_or_else(|| FormatError::parse(line, "gamma must be re,im"))?;
                h.reflection = Some(Complex64::new(parse_f64(re, line)?, parse_f64(im, line)?));
            }
            "scene" => h.scene_hash = Some(value.to_string()),
            "seed" => {
                h.seed = Some(
                    value
                        .parse()
                        .map_err(|_| FormatError::parse(line, "bad seed"))?,
                )
            }
            "paths" => {
                h.max_paths = Some(
                    value
                        .parse()
                        .map_err(|_| FormatError::parse(line, "bad path count"))?,
                )
            }
            // unknown keys are kept forward compatible
            _ => {}
        }
    }
    Ok(())
}

struct RawRecord {
    location: Point3,
    paths: Vec<Path>,
}

fn parse_record(text: &str, line: usize) -> Result<RawRecord, FormatError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() < 4 {
        return Err(FormatError::parse(line, "record needs x y z L"));
    }
    let location = Point3::new(
        parse_f64(toks[0], line)?,
        parse_f64(toks[1], line)?,
        parse_f64(toks[2], line)?,
    );
    let count: usize = toks[3]
        .parse()
        .map_err(|_| FormatError::parse(line, format!("bad path count {:?}", toks[3])))?;
    let expected = 4 + 6 * count;
    if toks.len() != expected {
        return Err(FormatError::parse(
            line,
            format!("expected {expected} fields for {count} paths, found {}", toks.len()),
        ));
    }
    let mut paths = Vec::with_capacity(count);
    for chunk in toks[4..].chunks_exact(6) {
        let v = chunk
            .iter()
            .map(|t| parse_f64(t, line))
            .collect::<Result<Vec<f64>, _>>()?;
        let angles = |z, a| AnglePair::new(z, a).map_err(|e| FormatError::parse(line, e.to_string()));
        paths.push(Path {
            gain: v[0],
            phase: v[1],
            aod: angles(v[2], v[3])?,
            aoa: angles(v[4], v[5])?,
        });
    }
    Ok(RawRecord { location, paths })
}

pub fn read_dataset<R: BufRead>(input: R) -> Result<Dataset, FormatError> {
    let mut header = DatasetHeader::default();
    let mut raw = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| FormatError::io("<dataset>", e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = t.strip_prefix('#') {
            parse_header(c, line_no, &mut header)?;
            continue;
        }
        raw.push((line_no, parse_record(t, line_no)?));
    }
    let widest = raw.iter().map(|(_, r)| r.paths.len()).max().unwrap_or(0);
    let max_paths = match header.max_paths {
        Some(l) if l < widest => {
            return Err(FormatError::Malformed(format!(
                "record holds {widest} paths but the header allows {l}"
            )))
        }
        Some(l) => l,
        None => widest.max(1),
    };
    let samples = raw
        .into_iter()
        .map(|(line, r)| {
            let pathset =
                PathSet::new(r.paths, max_paths).map_err(|e| FormatError::parse(line, e.to_string()))?;
            Ok(GroundTruthSample {
                location: r.location,
                pathset,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(Dataset { header, samples })
}
