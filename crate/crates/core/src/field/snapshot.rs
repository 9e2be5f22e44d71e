//! Binary field snapshots: a one-line text header followed by the raw values
//! as little-endian `f64`, row-major.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{ScalarField, TorusGrid};
use crate::error::{Error, Result};

const MAGIC: &str = "okfield v1";

fn header(grid: &TorusGrid) -> String {
    let sizes: Vec<String> = grid.sizes().iter().map(|s| s.to_string()).collect();
    format!("{MAGIC} dim={} sizes={}\n", grid.dim(), sizes.join(","))
}

pub fn write_snapshot<W: Write>(field: &ScalarField, mut out: W) -> Result<()> {
    out.write_all(header(field.grid()).as_bytes())?;
    let mut buf = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

fn parse_header(line: &str) -> Result<TorusGrid> {
    let bad = || Error::Parse(format!("bad snapshot header {line:?}"));
    let rest = line.strip_prefix(MAGIC).ok_or_else(bad)?.trim();
    let mut dim = None;
    let mut sizes = None;
    for tok in rest.split_whitespace() {
        if let Some(d) = tok.strip_prefix("dim=") {
            dim = Some(d.parse::<usize>().map_err(|_| bad())?);
        } else if let Some(s) = tok.strip_prefix("sizes=") {
            let parsed: std::result::Result<Vec<usize>, _> = s.split(',').map(|x| x.parse::<usize>()).collect();
            sizes = Some(parsed.map_err(|_| bad())?);
        } else {
            return Err(bad());
        }
    }
    TorusGrid::make(dim.ok_or_else(bad)?, &sizes.ok_or_else(bad)?)
}

pub fn read_snapshot<R: Read>(input: R) -> Result<ScalarField> {
    let mut reader = BufReader::new(input);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let grid = parse_header(line.trim_end_matches('\n'))?;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * grid.len() {
        return Err(Error::Parse(format!(
            "expected {} values, found {} bytes",
            grid.len(),
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    ScalarField::new(grid, values)
}

pub fn save_snapshot(field: &ScalarField, path: &Path) -> Result<()> {
    write_snapshot(field, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn load_snapshot(path: &Path) -> Result<ScalarField> {
    read_snapshot(std::fs::File::open(path)?)
}
