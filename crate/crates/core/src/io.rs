//! CSV ingestion and emission for datasets and weighted (synthetic) datasets.
//!
//! Format: one row per point, comma-separated, `.` decimal separator, an
//! optional header on input. Weighted files carry a trailing `weight` column.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::types::{Dataset, Point, WeightedDataset};
use crate::{Error, Result};

fn parse_rows<R: BufRead>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = trimmed
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect();
        match parsed {
            Ok(values) => rows.push(values),
            Err(e) => {
                // tolerate a single non-numeric first row: it is the header
                if rows.is_empty() && lineno == 0 {
                    continue;
                }
                return Err(Error::CsvParse {
                    row: lineno + 1,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(rows)
}

/// Read a dataset from CSV (header optional, all columns numeric).
pub fn read_dataset<R: BufRead>(reader: R) -> Result<Dataset> {
    Dataset::from_rows(parse_rows(reader)?)
}

pub fn read_dataset_path(path: impl AsRef<Path>) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_dataset(std::io::BufReader::new(file))
}

/// Read a weighted dataset: `d` coordinate columns plus a trailing weight.
pub fn read_weighted<R: BufRead>(reader: R) -> Result<WeightedDataset> {
    let rows = parse_rows(reader)?;
    let first = rows.first().ok_or(Error::EmptyInput)?;
    if first.len() < 2 {
        return Err(Error::invalid(
            "weighted rows need at least one coordinate and a weight",
        ));
    }
    let dim = first.len() - 1;
    let mut entries = Vec::with_capacity(rows.len());
    for (i, mut row) in rows.into_iter().enumerate() {
        if row.len() != dim + 1 {
            return Err(Error::CsvParse {
                row: i + 1,
                message: format!("expected {} columns, got {}", dim + 1, row.len()),
            });
        }
        let w = row.pop().expect("nonempty row");
        entries.push((Point::new(row)?, w));
    }
    WeightedDataset::new(entries, dim)
}

pub fn read_weighted_path(path: impl AsRef<Path>) -> Result<WeightedDataset> {
    let file = std::fs::File::open(path)?;
    read_weighted(std::io::BufReader::new(file))
}

fn coord_header(dim: usize) -> String {
    (0..dim)
        .map(|i| format!("x{i}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Write a dataset as CSV with an `x0,x1,...` header.
pub fn write_dataset<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut out = BufWriter::new(writer);
    writeln!(out, "{}", coord_header(data.dim()))?;
    for p in data.points() {
        let row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_dataset_path(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    write_dataset(std::fs::File::create(path)?, data)
}

/// Write a weighted dataset as CSV with a trailing `weight` column.
pub fn write_weighted<W: Write>(writer: W, data: &WeightedDataset) -> Result<()> {
    let mut out = BufWriter::new(writer);
    writeln!(out, "{},weight", coord_header(data.dim()))?;
    for (p, w) in data.entries() {
        let row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        writeln!(out, "{},{}", row.join(","), w)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_weighted_path(path: impl AsRef<Path>, data: &WeightedDataset) -> Result<()> {
    write_weighted(std::fs::File::create(path)?, data)
}
