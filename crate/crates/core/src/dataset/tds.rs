//! `TNSD` binary dataset files.
//!
//! Little-endian: `b"TNSD"`, version `u32`, order `u32`, dimensions `u32`
//! each, count `u32`, one `i8` label per sample, zero padding up to the next
//! multiple of 8 bytes from the start of the file, then all values as `f64`,
//! sample by sample, each in storage order.

use std::io::{Read, Write};

use super::TensorDataset;
use crate::binio::Cursor;
use crate::error::{Error, Result};
use crate::model::Label;
use crate::multilinear::DenseTensor;

pub const TDS_MAGIC: [u8; 4] = *b"TNSD";
pub const TDS_VERSION: u32 = 1;

const MAX_EXTENT: u32 = 1 << 28;
const MAX_ORDER: u32 = 64;

pub fn write_tds<W: Write>(ds: &TensorDataset, mut sink: W) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(&TDS_MAGIC);
    buf.extend_from_slice(&TDS_VERSION.to_le_bytes());
    buf.extend_from_slice(&(ds.order() as u32).to_le_bytes());
    for &d in ds.dims() {
        buf.extend_from_slice(&(d as u32).to_le_bytes());
    }
    buf.extend_from_slice(&(ds.count() as u32).to_le_bytes());
    buf.extend(ds.labels().iter().map(|l| l.as_i8() as u8));
    buf.resize(buf.len().next_multiple_of(8), 0);
    for s in ds.samples() {
        for v in s.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(())
}

pub fn read_tds<R: Read>(mut source: R) -> Result<TensorDataset> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let mut c = Cursor::new(bytes);
    if c.take(4, "magic")? != TDS_MAGIC {
        return Err(Error::format(0, "bad magic, not a TNSD file"));
    }
    let version = c.u32("version")?;
    if version != TDS_VERSION {
        return Err(Error::format(
            4,
            format!("unsupported TNSD version {version}"),
        ));
    }
    let order = c.extent("order", MAX_ORDER)?;
    let dims = (0..order)
        .map(|_| c.extent("dimension", MAX_EXTENT))
        .collect::<Result<Vec<_>>>()?;
    let count = c.extent("count", MAX_EXTENT)?;
    let label_at = c.pos();
    let labels = c
        .take(count, "labels")?
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            Label::try_from(b as i8).map_err(|_| {
                Error::data(format!(
                    "label {} of sample {i} at byte {} is not ±1",
                    b as i8,
                    label_at + i
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pad_at = c.pos();
    let pad = pad_at.next_multiple_of(8) - pad_at;
    if let Some(k) = c.take(pad, "padding")?.iter().position(|&b| b != 0) {
        return Err(Error::format((pad_at + k) as u64, "nonzero padding byte"));
    }
    let per = dims
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .ok_or_else(|| Error::format(8, "sample size overflows"))?;
    let mut samples = Vec::with_capacity(count.min(1 << 16));
    for i in 0..count {
        let at = c.pos();
        let vals = c.f64s(per, "values")?;
        if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "non-finite value in sample {i} at byte {}",
                at + 8 * k
            )));
        }
        samples.push(DenseTensor::new(dims.clone(), vals)?);
    }
    c.finish("dataset")?;
    TensorDataset::new(dims, labels, samples)
}
