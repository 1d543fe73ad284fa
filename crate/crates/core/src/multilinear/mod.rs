//! Tensor and matrix primitives: inner products, unfoldings, Kronecker and
//! Khatri-Rao products, CP factor algebra and small symmetric kernels.

mod cp;
mod linalg;
mod matrix;
mod products;
mod tensor;

pub use cp::{
    cp_frobenius, cp_inner, cp_reconstruct, cp_unfold, gram_complement, khatri_rao_complement,
    CpFactors,
};
pub use linalg::{spd_solve, sym_eig, sym_inv_sqrt, SymEig, DEFAULT_EIG_FLOOR};
pub use matrix::{axpy, dot, norm2, Matrix};
pub use products::{khatri_rao, kronecker};
pub use tensor::{fold, frobenius_norm, inner_product, outer_product, unfold, DenseTensor};
