//! The indefinite Hermitian inner product of signature (r; s; t) on C^n and
//! the point classification it induces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mat::Mat;
use crate::scalar::Scalar;

/// Signature (r; s; t): counts of +1, -1 and 0 directions. Ambient dimension
/// is n = r + s + t; the form matrix is diag(+1 x r, -1 x s, 0 x t).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Signature {
    pub r: usize,
    pub s: usize,
    pub t: usize,
}

impl Signature {
    pub fn new(r: usize, s: usize, t: usize) -> Self {
        let sig = Self { r, s, t };
        assert!(sig.dim() >= 1, "ambient dimension must be >= 1");
        sig
    }

    /// Nondegenerate signature (r; s; 0), the I_{r,s} case.
    pub fn nondegenerate(r: usize, s: usize) -> Self {
        Self::new(r, s, 0)
    }

    pub fn dim(&self) -> usize {
        self.r + self.s + self.t
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.t == 0
    }

    /// The form matrix diag(I_r, -I_s, 0_t).
    pub fn form_matrix<S: Scalar>(&self) -> Mat<S> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for i in 0..self.r {
            m[(i, i)] = S::one();
        }
        for i in self.r..self.r + self.s {
            m[(i, i)] = S::from_int(-1);
        }
        m
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormsError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum VectorClass {
    Positive,
    Negative,
    Null,
}

fn check_dim<S: Scalar>(z: &[S], sig: Signature) -> Result<(), FormsError> {
    if z.len() != sig.dim() {
        Err(FormsError::DimensionMismatch {
            expected: sig.dim(),
            got: z.len(),
        })
    } else {
        Ok(())
    }
}

/// <z, w> = sum_{i<=r} z_i conj(w_i) - sum_{r<i<=r+s} z_i conj(w_i).
/// Coordinates in the trailing t block contribute nothing.
pub fn inner_product<S: Scalar>(z: &[S], w: &[S], sig: Signature) -> Result<S, FormsError> {
    check_dim(z, sig)?;
    check_dim(w, sig)?;
    let mut acc = S::zero();
    for i in 0..sig.r {
        acc = acc.add(&z[i].mul(&w[i].conj()));
    }
    for i in sig.r..sig.r + sig.s {
        acc = acc.sub(&z[i].mul(&w[i].conj()));
    }
    Ok(acc)
}

/// ||z||^2 = <z, z>; always real.
pub fn norm_sq<S: Scalar>(z: &[S], sig: Signature) -> Result<S, FormsError> {
    inner_product(z, z, sig)
}

/// Null iff |norm_sq| <= tol, else the sign decides. Pass tol = 0 in exact mode.
pub fn classify_vector<S: Scalar>(
    z: &[S],
    sig: Signature,
    tol: f64,
) -> Result<VectorClass, FormsError> {
    let n = norm_sq(z, sig)?;
    Ok(match n.real_sign(tol) {
        1 => VectorClass::Positive,
        -1 => VectorClass::Negative,
        _ => VectorClass::Null,
    })
}
