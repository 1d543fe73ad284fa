use crate::error::{Error, Result};
use crate::multilinear::matrix::Matrix;

/// `A ⊗ B`: block `(i, j)` of the result is `a_ij B`.
pub fn kronecker(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Matrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for l in 0..bc {
            let col = j * bc + l;
            for i in 0..ar {
                let aij = a[(i, j)];
                for k in 0..br {
                    out[(i * br + k, col)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `A ⊙ B`: column `k` is `a_k ⊗ b_k`.
pub fn khatri_rao(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(Error::dim(format!(
            "khatri-rao of {} and {} columns",
            a.cols(),
            b.cols()
        )));
    }
    let (ar, br) = (a.rows(), b.rows());
    let mut out = Matrix::zeros(ar * br, a.cols());
    for k in 0..a.cols() {
        let (ak, bk) = (a.col(k), b.col(k));
        let dst = out.col_mut(k);
        for (i, &x) in ak.iter().enumerate() {
            for (o, &y) in dst[i * br..(i + 1) * br].iter_mut().zip(bk) {
                *o = x * y;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::tensor::outer_product;

    #[test]
    fn identity_kronecker() {
        assert_eq!(
            kronecker(&Matrix::identity(2), &Matrix::identity(2)),
            Matrix::identity(4)
        );
    }

    #[test]
    fn block_formula() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let expected = Matrix::from_rows(&[
            &[0.0, 1.0, 0.0, 2.0],
            &[1.0, 0.0, 2.0, 0.0],
            &[0.0, 3.0, 0.0, 4.0],
            &[3.0, 0.0, 4.0, 0.0],
        ])
        .unwrap();
        assert_eq!(kronecker(&a, &b), expected);
    }

    #[test]
    fn vector_kronecker_is_reversed_outer_vec() {
        // Under first-index-fastest layout vec(a ∘ b) = b ⊗ a.
        let a = [1.0, -2.0, 3.0];
        let b = [0.5, 4.0];
        let k = kronecker(&Matrix::column(&b), &Matrix::column(&a));
        let t = outer_product(&[&a, &b]).unwrap();
        assert_eq!(k.as_slice(), t.values());
    }

    #[test]
    fn single_column_khatri_rao_is_kronecker() {
        let a = Matrix::column(&[1.0, 2.0, 3.0]);
        let b = Matrix::column(&[-1.0, 0.5]);
        assert_eq!(khatri_rao(&a, &b).unwrap(), kronecker(&a, &b));
    }

    #[test]
    fn columnwise_kronecker() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[&[5.0, 6.0], &[7.0, 8.0]]).unwrap();
        let kr = khatri_rao(&a, &b).unwrap();
        assert_eq!(kr.shape(), (4, 2));
        for k in 0..2 {
            let expect = kronecker(&Matrix::column(a.col(k)), &Matrix::column(b.col(k)));
            assert_eq!(kr.col(k), expect.as_slice());
        }
        assert_eq!(kr.col(0), &[5.0, 7.0, 15.0, 21.0]);
    }

    #[test]
    fn zero_column_stays_zero() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[&[5.0, 0.0], &[7.0, 0.0]]).unwrap();
        assert!(khatri_rao(&a, &b).unwrap().col(1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn column_mismatch() {
        assert!(khatri_rao(&Matrix::zeros(2, 2), &Matrix::zeros(2, 3)).is_err());
    }
}
