use crate::error::{Error, Result};
use crate::multilinear::matrix::{dot, Matrix};

/// Dense real tensor of order `M`.
///
/// Values are laid out first-index-fastest: multi-index `(i_1, ..., i_M)`
/// (zero based) lives at offset `i_1 + I_1 i_2 + I_1 I_2 i_3 + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        validate_dims(&dims)?;
        let n: usize = dims.iter().product();
        if values.len() != n {
            return Err(Error::dim(format!(
                "{} values for a tensor of shape {:?}",
                values.len(),
                dims
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::arg(format!(
                "non-finite tensor entry at offset {pos}"
            )));
        }
        Ok(DenseTensor { dims, values })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        validate_dims(&dims)?;
        let n = dims.iter().product();
        Ok(DenseTensor {
            dims,
            values: vec![0.0; n],
        })
    }

    /// Fills a tensor by evaluating `f` at every zero-based multi-index.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = DenseTensor::zeros(dims)?;
        let mut idx = vec![0usize; t.order()];
        for off in 0..t.values.len() {
            t.values[off] = f(&idx);
            increment(&mut idx, &t.dims);
        }
        if t.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("non-finite tensor entry"));
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order());
        let mut off = 0;
        let mut stride = 1;
        for (&i, &d) in idx.iter().zip(&self.dims) {
            debug_assert!(i < d);
            off += i * stride;
            stride *= d;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.offset(idx)]
    }

    pub fn scaled(&self, s: f64) -> DenseTensor {
        DenseTensor {
            dims: self.dims.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::arg("tensor order must be at least 1"));
    }
    if dims.contains(&0) {
        return Err(Error::arg(format!("zero-length mode in shape {dims:?}")));
    }
    Ok(())
}

/// Advances a first-index-fastest multi-index odometer.
pub(crate) fn increment(idx: &mut [usize], dims: &[usize]) {
    for (i, &d) in idx.iter_mut().zip(dims) {
        *i += 1;
        if *i < d {
            return;
        }
        *i = 0;
    }
}

/// `⟨A, B⟩`: sum of elementwise products.
pub fn inner_product(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::dim(format!(
            "inner product of shapes {:?} and {:?}",
            a.dims, b.dims
        )));
    }
    Ok(dot(&a.values, &b.values))
}

pub fn frobenius_norm(a: &DenseTensor) -> f64 {
    dot(&a.values, &a.values).sqrt()
}

/// `v_1 ∘ v_2 ∘ ... ∘ v_M`.
pub fn outer_product(vs: &[&[f64]]) -> Result<DenseTensor> {
    if vs.is_empty() {
        return Err(Error::arg("outer product of an empty list"));
    }
    if vs.iter().any(|v| v.is_empty()) {
        return Err(Error::arg("outer product with an empty vector"));
    }
    let dims: Vec<usize> = vs.iter().map(|v| v.len()).collect();
    // Kronecker-style expansion: the first vector stays contiguous.
    let mut values = vs[0].to_vec();
    for v in &vs[1..] {
        let mut next = Vec::with_capacity(values.len() * v.len());
        for &b in v.iter() {
            next.extend(values.iter().map(|a| a * b));
        }
        values = next;
    }
    DenseTensor::new(dims, values)
}

/// Mode-`n` matricization (zero-based mode).
///
/// Entry `(i_1, ..., i_M)` lands at row `i_n` and column
/// `Σ_{k≠n} i_k J_k` with `J_k = ∏_{l<k, l≠n} I_l`.
pub fn unfold(a: &DenseTensor, mode: usize) -> Result<Matrix> {
    check_mode(mode, a.order())?;
    let rows = a.dims[mode];
    let cols = a.len() / rows;
    // Offsets split as: inner block (modes < n) of size `inner`, then the
    // mode itself, then the outer block.
    let inner: usize = a.dims[..mode].iter().product();
    let outer = cols / inner;
    let mut out = Matrix::zeros(rows, cols);
    let data = out.as_mut_slice();
    for o in 0..outer {
        for r in 0..rows {
            let src = (o * rows + r) * inner;
            for i in 0..inner {
                let col = o * inner + i;
                data[r + col * rows] = a.values[src + i];
            }
        }
    }
    Ok(out)
}

/// Inverse of [`unfold`].
pub fn fold(m: &Matrix, mode: usize, dims: &[usize]) -> Result<DenseTensor> {
    check_mode(mode, dims.len())?;
    let n: usize = dims.iter().product();
    if m.rows() != dims[mode] || m.rows() * m.cols() != n {
        return Err(Error::dim(format!(
            "{}x{} matrix is not a mode-{mode} unfolding of {dims:?}",
            m.rows(),
            m.cols()
        )));
    }
    let rows = dims[mode];
    let inner: usize = dims[..mode].iter().product();
    let outer = m.cols() / inner;
    let mut values = vec![0.0; n];
    for o in 0..outer {
        for r in 0..rows {
            let dst = (o * rows + r) * inner;
            for i in 0..inner {
                values[dst + i] = m[(r, o * inner + i)];
            }
        }
    }
    DenseTensor::new(dims.to_vec(), values)
}

pub(crate) fn check_mode(mode: usize, order: usize) -> Result<()> {
    if mode >= order {
        return Err(Error::arg(format!(
            "mode {mode} out of range for an order-{order} tensor"
        )));
    }
    Ok(())
}
