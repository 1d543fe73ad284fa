//! Binary model files.
//!
//! Little-endian layout: `b"LNPS"`, version `u32`, order `u32`, each
//! dimension `u32`, rank `u32`, then every factor of plane 1 and then plane 2
//! as column-major `f64`, then twelve `f64`: c1..c4, λ1..λ4, eps, ridge,
//! seed and the outer iteration count.
//!
//! `max_outer` and the convergence flag are not stored; a loaded model gets
//! the default cap and `converged == false`.

use std::io::{Read, Write};

use crate::binio::Cursor;
use crate::error::{Error, Result};
use crate::model::{Hyperparams, ModelPair, Plane};
use crate::multilinear::{CpFactors, Matrix};

pub const MODEL_MAGIC: [u8; 4] = *b"LNPS";
pub const MODEL_VERSION: u32 = 1;

/// Largest dimension, order or rank accepted when loading.
const MAX_EXTENT: u32 = 1 << 24;

pub fn save_model<W: Write>(model: &ModelPair, mut sink: W) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(&MODEL_MAGIC);
    buf.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    let dims = model.dims();
    buf.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        buf.extend_from_slice(&(d as u32).to_le_bytes());
    }
    buf.extend_from_slice(&(model.rank() as u32).to_le_bytes());
    for plane in Plane::BOTH {
        for u in model.factors(plane).factors() {
            for v in u.as_slice() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    let h = model.hyper();
    let tail = [
        h.c1,
        h.c2,
        h.c3,
        h.c4,
        h.lambda1,
        h.lambda2,
        h.lambda3,
        h.lambda4,
        h.eps,
        h.ridge,
        h.seed as f64,
        model.outer_iters() as f64,
    ];
    for v in tail {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(())
}

pub fn load_model<R: Read>(mut source: R) -> Result<ModelPair> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let mut c = Cursor::new(bytes);
    if c.take(4, "magic")? != MODEL_MAGIC {
        return Err(Error::format(0, "bad magic, not a model file"));
    }
    let version = c.u32("version")?;
    if version != MODEL_VERSION {
        return Err(Error::format(
            4,
            format!("unsupported model version {version}"),
        ));
    }
    let order = c.extent("order", MAX_EXTENT)?;
    let mut dims = Vec::with_capacity(order.min(64));
    for _ in 0..order {
        dims.push(c.extent("dimension", MAX_EXTENT)?);
    }
    let rank = c.extent("rank", MAX_EXTENT)?;
    let mut planes = Vec::with_capacity(2);
    for _ in 0..2 {
        let mut mats = Vec::with_capacity(order);
        for &d in &dims {
            let n = d
                .checked_mul(rank)
                .ok_or_else(|| Error::format(c.pos() as u64, "factor size overflows"))?;
            let at = c.pos() as u64;
            let vals = c.f64s(n, "factor values")?;
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::format(at, "non-finite factor value"));
            }
            mats.push(Matrix::from_col_major(d, rank, vals)?);
        }
        planes.push(CpFactors::new(mats)?);
    }
    let mut t = [0.0; 12];
    for v in t.iter_mut() {
        *v = c.f64("hyperparameters")?;
    }
    c.finish("model")?;
    let hyper = Hyperparams {
        c1: t[0],
        c2: t[1],
        c3: t[2],
        c4: t[3],
        lambda1: t[4],
        lambda2: t[5],
        lambda3: t[6],
        lambda4: t[7],
        eps: t[8],
        ridge: t[9],
        seed: t[10] as u64,
        rank,
        ..Default::default()
    };
    let f2 = planes.pop().unwrap();
    let f1 = planes.pop().unwrap();
    ModelPair::new(f1, f2, hyper, false, t[11] as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::initial_factors;

    fn sample_model() -> ModelPair {
        let [f1, f2] = initial_factors(&[2, 2], 1, 3).unwrap();
        let h = Hyperparams {
            c3: 0.5,
            lambda2: 2.0,
            seed: 3,
            ..Default::default()
        };
        ModelPair::new(f1, f2, h, false, 17).unwrap()
    }

    #[test]
    fn byte_count_for_small_model() {
        let mut buf = Vec::new();
        save_model(&sample_model(), &mut buf).unwrap();
        // header 4+4+4+2·4+4, factors 2·2·2·8, tail 12·8
        assert_eq!(buf.len(), 24 + 64 + 96);
        assert_eq!(&buf[..4], b"LNPS");
        assert_eq!(&buf[8..12], &2u32.to_le_bytes());
        assert_eq!(&buf[20..24], &1u32.to_le_bytes());
    }

    #[test]
    fn round_trip() {
        let m = sample_model();
        let mut buf = Vec::new();
        save_model(&m, &mut buf).unwrap();
        let back = load_model(&buf[..]).unwrap();
        assert_eq!(back, m);
        let mut again = Vec::new();
        save_model(&back, &mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn truncation_reports_offset() {
        let mut buf = Vec::new();
        save_model(&sample_model(), &mut buf).unwrap();
        for cut in [0, 3, 10, 30, buf.len() - 1] {
            match load_model(&buf[..cut]) {
                Err(Error::Format { offset, .. }) => assert!(offset <= cut as u64),
                other => panic!("cut {cut}: {other:?}"),
            }
        }
    }

    #[test]
    fn bad_magic_and_version() {
        let mut buf = Vec::new();
        save_model(&sample_model(), &mut buf).unwrap();
        let mut b = buf.clone();
        b[0] = b'X';
        assert!(matches!(
            load_model(&b[..]),
            Err(Error::Format { offset: 0, .. })
        ));
        let mut b = buf;
        b[4] = 9;
        assert!(matches!(
            load_model(&b[..]),
            Err(Error::Format { offset: 4, .. })
        ));
    }
}
