//! The indefinite unitary group U(r,s) acting on the Grassmannian and its
//! chart coordinates, plus the Witt-extension normalization that moves any
//! null point to the base null point.
//!
//! Points transform by right multiplication with g^t (row-vector convention),
//! which keeps the A_p I_{r,s} A_q^H pairing formulas untouched.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::forms::{inner_product, Signature};
use crate::grassmannian::{ChartMatrix, GrassError, GrassPoint, PointClass};
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::util::trial_rng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutoError {
    #[error("matrix does not preserve the indefinite form")]
    NotIndefUnitary,
    #[error("point is not null")]
    NotNull,
    #[error("shape mismatch")]
    ShapeMismatch,
    #[error(transparent)]
    Grass(#[from] GrassError),
}

/// An element of U(r,s): M with M I_{r,s} M^H = I_{r,s}.
#[derive(Clone, PartialEq, Debug)]
pub struct IndefUnitary<S> {
    m: Mat<S>,
    sig: Signature,
}

/// Membership test: ||M I_{r,s} M^H - I_{r,s}||_max <= tol.
pub fn verify_indefinite_unitary<S: Scalar>(m: &Mat<S>, sig: Signature, tol: f64) -> bool {
    let n = sig.dim();
    if m.nrows() != n || m.ncols() != n {
        return false;
    }
    let j = sig.form_matrix::<S>();
    m.mul(&j).mul(&m.conj_t()).max_dev(&j) <= tol
}

impl<S: Scalar> IndefUnitary<S> {
    /// Wraps a matrix after verifying group membership at `tol`.
    pub fn new(m: Mat<S>, sig: Signature, tol: f64) -> Result<Self, AutoError> {
        assert!(sig.is_nondegenerate(), "U(r,s) requires t = 0");
        if !verify_indefinite_unitary(&m, sig, tol) {
            return Err(AutoError::NotIndefUnitary);
        }
        Ok(Self { m, sig })
    }

    pub fn identity(sig: Signature) -> Self {
        Self {
            m: Mat::identity(sig.dim()),
            sig,
        }
    }

    pub fn matrix(&self) -> &Mat<S> {
        &self.m
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    /// Group inverse I_{r,s} M^H I_{r,s}.
    pub fn inverse(&self) -> Self {
        let j = self.sig.form_matrix::<S>();
        Self {
            m: j.mul(&self.m.conj_t()).mul(&j),
            sig: self.sig,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.sig, other.sig);
        Self {
            m: self.m.mul(&other.m),
            sig: self.sig,
        }
    }

    /// A_p -> A_p g^t; each basis row transforms as a vector.
    pub fn act_on_point(&self, p: &GrassPoint<S>, tol: f64) -> Result<GrassPoint<S>, AutoError> {
        let (r, s) = p.shape();
        if r + s != self.sig.dim() || r != self.sig.r {
            return Err(AutoError::ShapeMismatch);
        }
        let a = p.representative().mul(&self.m.transpose());
        Ok(GrassPoint::from_matrix(a, tol)?)
    }

    /// Fractional-linear chart form: with g^t in blocks [[M11, M12], [M21, M22]],
    /// Z' = (M11 + Z M21)^{-1} (M12 + Z M22).
    pub fn act_on_chart(&self, z: &ChartMatrix<S>, tol: f64) -> Result<ChartMatrix<S>, AutoError> {
        let (r, s) = (z.r, z.s);
        if r + s != self.sig.dim() || r != self.sig.r {
            return Err(AutoError::ShapeMismatch);
        }
        let gt = self.m.transpose();
        let m11 = Mat::from_fn(r, r, |i, j| gt[(i, j)].clone());
        let m12 = Mat::from_fn(r, s, |i, j| gt[(i, r + j)].clone());
        let m21 = Mat::from_fn(s, r, |i, j| gt[(r + i, j)].clone());
        let m22 = Mat::from_fn(s, s, |i, j| gt[(r + i, r + j)].clone());
        let lead = m11.add(&z.z.mul(&m21));
        let inv = lead.inverse(tol).ok_or(GrassError::NotInChart)?;
        Ok(ChartMatrix::new(inv.mul(&m12.add(&z.z.mul(&m22)))))
    }
}

/// Haar-distributed n x n unitary (orthonormalized Gaussian rows).
pub fn haar_unitary_rng(n: usize, rng: &mut ChaCha8Rng) -> Mat<Complex64> {
    let g = Mat::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    crate::grassmannian::orthonormalize_rows(&g)
}

fn block_diag_unitary(sig: Signature, rng: &mut ChaCha8Rng) -> Mat<Complex64> {
    let ur = haar_unitary_rng(sig.r, rng);
    let us = haar_unitary_rng(sig.s, rng);
    Mat::from_fn(sig.dim(), sig.dim(), |i, j| {
        if i < sig.r && j < sig.r {
            ur[(i, j)]
        } else if i >= sig.r && j >= sig.r {
            us[(i - sig.r, j - sig.r)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Elementary hyperbolic boost mixing positive direction `i` and negative
/// direction `j` (absolute index) with parameter `a`.
fn boost(sig: Signature, i: usize, j: usize, a: f64) -> Mat<Complex64> {
    let mut m = Mat::identity(sig.dim());
    m[(i, i)] = Complex64::new(a.cosh(), 0.0);
    m[(j, j)] = Complex64::new(a.cosh(), 0.0);
    m[(i, j)] = Complex64::new(a.sinh(), 0.0);
    m[(j, i)] = Complex64::new(a.sinh(), 0.0);
    m
}

/// Seeded element of U(r,s): a product of block-diagonal unitaries and
/// `n_boosts` elementary hyperbolic boosts with parameters in [-1, 1].
pub fn random_automorphism_with(
    sig: Signature,
    n_boosts: usize,
    seed: u64,
) -> IndefUnitary<Complex64> {
    let rng = &mut trial_rng(seed, 0);
    random_automorphism_rng(sig, n_boosts, rng)
}

pub fn random_automorphism_rng(
    sig: Signature,
    n_boosts: usize,
    rng: &mut ChaCha8Rng,
) -> IndefUnitary<Complex64> {
    assert!(sig.is_nondegenerate());
    let mut m = block_diag_unitary(sig, rng);
    for _ in 0..n_boosts {
        let i = rng.gen_range(0..sig.r);
        let j = sig.r + rng.gen_range(0..sig.s);
        let a: f64 = rng.gen_range(-1.0..1.0);
        m = m.mul(&boost(sig, i, j, a));
    }
    m = m.mul(&block_diag_unitary(sig, rng));
    IndefUnitary { m, sig }
}

pub fn random_automorphism(sig: Signature, seed: u64) -> IndefUnitary<Complex64> {
    random_automorphism_with(sig, sig.r.min(sig.s) + 1, seed)
}

/// The base null point of G(r,s): chart matrix [I_r | 0], representative
/// rows e_i + e_{r+i}.
pub fn base_null_point(r: usize, s: usize) -> GrassPoint<Complex64> {
    let z = Mat::from_fn(r, s, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    GrassPoint::from_chart(&ChartMatrix::new(z))
}

/// Witt extension: returns g in U(r,s) with act_on_point(g, p) equal to the
/// base null point. Requires p null and r <= s.
pub fn move_null_to_base(
    p: &GrassPoint<Complex64>,
    tol: f64,
) -> Result<IndefUnitary<Complex64>, AutoError> {
    let (r, s) = p.shape();
    let sig = Signature::nondegenerate(r, s);
    let n = sig.dim();
    if r > s {
        return Err(AutoError::ShapeMismatch);
    }
    if p.classify(tol) != PointClass::Null {
        return Err(AutoError::NotNull);
    }

    let a = p.representative().clone(); // r x n, rows are a null frame
    let j = sig.form_matrix::<Complex64>();

    // dual null frame: candidates c_j with <a_i, c_j> = delta_ij, then a
    // correction kills the mutual pairings without touching <a_i, c_j>
    let b_form = a.mul(&j); // r x n
    let gram_bb = b_form.mul(&b_form.conj_t());
    let x = b_form
        .conj_t()
        .mul(&gram_bb.inverse(tol).ok_or(AutoError::NotIndefUnitary)?); // n x r, columns conj(c_j)
    let c_rows = x.conj_t(); // rows are c_j
    let a_rows = a.to_row_vecs();
    let c_vecs = c_rows.to_row_vecs();
    let pair = |u: &[Complex64], v: &[Complex64]| inner_product(u, v, sig).expect("dims");
    let mut b_vecs: Vec<Vec<Complex64>> = Vec::with_capacity(r);
    for jj in 0..r {
        let mut b = c_vecs[jj].clone();
        for (i, arow) in a_rows.iter().enumerate() {
            let t = 0.5 * pair(&c_vecs[jj], &c_vecs[i]);
            for (x, y) in b.iter_mut().zip(arow.iter()) {
                *x -= t * y;
            }
        }
        b_vecs.push(b);
    }

    // negative-definite complement of the hyperbolic block
    let stacked = a.vcat(&Mat::from_rows(b_vecs.clone()));
    let kernel = stacked.mul(&j).null_space(tol);
    let mut w_vecs: Vec<Vec<Complex64>> = kernel
        .rows_iter()
        .map(|row| row.iter().map(|x| x.conj()).collect())
        .collect();
    assert_eq!(w_vecs.len(), s - r, "complement dimension");
    // Gram-Schmidt under the negated (positive definite) form
    for k in 0..w_vecs.len() {
        for _pass in 0..2 {
            for l in 0..k {
                let coef = -pair(&w_vecs[k], &w_vecs[l]); // <u_l,u_l> = -1
                let prev = w_vecs[l].clone();
                for (x, y) in w_vecs[k].iter_mut().zip(prev.iter()) {
                    *x -= coef * y;
                }
            }
        }
        let nrm = (-pair(&w_vecs[k], &w_vecs[k]).re).sqrt();
        for x in w_vecs[k].iter_mut() {
            *x /= nrm;
        }
    }

    // adapted frame for p and the matching standard frame
    let mut frame_rows = a_rows;
    frame_rows.extend(b_vecs);
    frame_rows.extend(w_vecs);
    let s_p = Mat::from_rows(frame_rows);
    let s_0 = Mat::from_fn(n, n, |i, jx| {
        let val = if i < r {
            // null frame row e_i + e_{r+i}
            f64::from(jx == i) + f64::from(jx == r + i)
        } else if i < 2 * r {
            // dual null frame row (e_k - e_{r+k}) / 2
            let k = i - r;
            0.5 * f64::from(jx == k) - 0.5 * f64::from(jx == r + k)
        } else {
            // remaining negative directions stay put
            f64::from(jx == i)
        };
        Complex64::new(val, 0.0)
    });
    let rmat = s_p
        .inverse(tol)
        .ok_or(AutoError::NotIndefUnitary)?
        .mul(&s_0);
    let g = rmat.transpose();
    IndefUnitary::new(g, sig, 1e-8)
}
