//! Little-endian reading with byte offsets for format errors.

use crate::error::{Error, Result};

pub(crate) struct Cursor {
    bytes: Vec<u8>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(bytes: Vec<u8>) -> Self {
        Cursor { bytes, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn take(&mut self, n: usize, what: &str) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::format(
                self.pos as u64,
                format!("truncated while reading {what}"),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()))
    }

    pub(crate) fn f64(&mut self, what: &str) -> Result<f64> {
        let b = self.take(8, what)?;
        Ok(f64::from_le_bytes(b.try_into().unwrap()))
    }

    pub(crate) fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let b = self.take(n.saturating_mul(8), what)?;
        Ok(b.chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    /// A `u32` in `1..=max`.
    pub(crate) fn extent(&mut self, what: &str, max: u32) -> Result<usize> {
        let at = self.pos as u64;
        let v = self.u32(what)?;
        if v == 0 || v > max {
            return Err(Error::format(at, format!("{what} {v} out of range")));
        }
        Ok(v as usize)
    }

    pub(crate) fn finish(&self, what: &str) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::format(
                self.pos as u64,
                format!("trailing bytes after {what}"),
            ));
        }
        Ok(())
    }
}
