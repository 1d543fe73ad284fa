//! Plain-text datasets: one sample per row, values in storage order.
//!
//! Labeled rows start with `+1`/`1` or `-1`. Blank lines and lines starting
//! with `#` are skipped.

use std::io::{Read, Write};

use super::TensorDataset;
use crate::error::{Error, Result};
use crate::model::Label;
use crate::multilinear::DenseTensor;

fn reader<R: Read>(source: R) -> ::csv::Reader<R> {
    ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(::csv::Trim::All)
        .from_reader(source)
}

fn line_of(rec: &::csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn csv_error(e: ::csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::data(format!("line {}: {e}", p.line())),
        None => Error::data(e.to_string()),
    }
}

fn parse_values<'a>(
    fields: impl Iterator<Item = &'a str>,
    dims: &[usize],
    line: u64,
) -> Result<DenseTensor> {
    let vals = fields
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::data(format!("line {line}: bad value {f:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let want: usize = dims.iter().product();
    if vals.len() != want {
        return Err(Error::data(format!(
            "line {line}: {} values, expected {want} for shape {dims:?}",
            vals.len()
        )));
    }
    DenseTensor::new(dims.to_vec(), vals)
}

fn parse_label(field: &str, line: u64) -> Result<Label> {
    match field.parse::<f64>() {
        Ok(1.0) => Ok(Label::Positive),
        Ok(-1.0) => Ok(Label::Negative),
        _ => Err(Error::data(format!(
            "line {line}: label {field:?} is not ±1"
        ))),
    }
}

pub fn read_csv<R: Read>(source: R, dims: &[usize]) -> Result<TensorDataset> {
    let mut labels = Vec::new();
    let mut samples = Vec::new();
    for rec in reader(source).records() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        let mut fields = rec.iter();
        let label = parse_label(fields.next().unwrap_or(""), line)?;
        samples.push(parse_values(fields, dims, line)?);
        labels.push(label);
    }
    TensorDataset::new(dims.to_vec(), labels, samples)
}

/// Rows of values only, no label column.
pub fn read_csv_unlabeled<R: Read>(source: R, dims: &[usize]) -> Result<Vec<DenseTensor>> {
    let mut samples = Vec::new();
    for rec in reader(source).records() {
        let rec = rec.map_err(csv_error)?;
        samples.push(parse_values(rec.iter(), dims, line_of(&rec))?);
    }
    if samples.is_empty() {
        return Err(Error::data("no samples in input"));
    }
    Ok(samples)
}

/// Inverse of [`read_csv`]; values use the shortest exact decimal form.
pub fn write_csv<W: Write>(ds: &TensorDataset, mut sink: W) -> Result<()> {
    let mut out = String::new();
    for (l, s) in ds.labels().iter().zip(ds.samples()) {
        out.push_str(&l.as_i8().to_string());
        for v in s.values() {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}
