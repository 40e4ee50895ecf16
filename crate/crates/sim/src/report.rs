//! Long result table to a wide, plot-ready table (rate vs Mt per scheme).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use ckm_core::alignment::Scheme;

use crate::error::FormatError;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub mt: usize,
    pub scheme: Scheme,
    pub avg_rate: f64,
    pub avg_gain: f64,
    pub avg_overhead: f64,
    pub n_locations: usize,
    pub seed: u64,
}

fn field(rec: &csv::StringRecord, i: usize, line: usize) -> Result<&str, FormatError> {
    rec.get(i)
        .ok_or_else(|| FormatError::parse(line, format!("missing column {i}")))
}

fn parse<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, FormatError> {
    s.parse()
        .map_err(|_| FormatError::parse(line, format!("bad {what}: {s:?}")))
}

pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRow>, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| FormatError::Malformed(e.to_string()))?
        .clone();
    if headers.iter().ne(crate::experiment::CSV_COLUMNS) {
        return Err(FormatError::Malformed(format!("unexpected columns: {headers:?}")));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| FormatError::Malformed(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let scheme_name = field(&rec, 1, line)?;
        rows.push(ResultRow {
            mt: parse(field(&rec, 0, line)?, line, "Mt")?,
            scheme: scheme_name
                .parse()
                .map_err(|e: ckm_core::alignment::UnknownScheme| FormatError::parse(line, e.to_string()))?,
            avg_rate: parse(field(&rec, 2, line)?, line, "rate")?,
            avg_gain: parse(field(&rec, 3, line)?, line, "gain")?,
            avg_overhead: parse(field(&rec, 4, line)?, line, "overhead")?,
            n_locations: parse(field(&rec, 5, line)?, line, "location count")?,
            seed: parse(field(&rec, 6, line)?, line, "seed")?,
        });
    }
    Ok(rows)
}

/// `Mt,<scheme>...` with average rates; schemes in first-seen order, missing
/// cells left empty.
pub fn write_wide<W: Write>(rows: &[ResultRow], out: W) -> Result<(), FormatError> {
    let mut schemes: Vec<Scheme> = Vec::new();
    let mut table: BTreeMap<usize, BTreeMap<Scheme, f64>> = BTreeMap::new();
    for r in rows {
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme);
        }
        table.entry(r.mt).or_default().insert(r.scheme, r.avg_rate);
    }
    let io = |e: csv::Error| FormatError::Malformed(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["Mt".to_string()];
    header.extend(schemes.iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(io)?;
    for (mt, cells) in &table {
        let mut rec = vec![mt.to_string()];
        rec.extend(
            schemes
                .iter()
                .map(|s| cells.get(s).map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| FormatError::io("<report>", e))
}
