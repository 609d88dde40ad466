//! Linear-subspace calculus and the signature of the restricted form.
//!
//! Subspaces are held as canonical (reduced row-echelon) basis matrices, so
//! equality of subspaces is equality of matrices. The inertia engine is a
//! radical-free congruence diagonalization that works unchanged in the exact
//! backend.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{inner_product, Signature};
use crate::mat::Mat;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubspaceError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
}

/// A linear subspace of C^n, stored as a k x n canonical basis matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Subspace<S> {
    ambient: usize,
    basis: Mat<S>,
}

/// Inertia (a, b, c) of a restricted Hermitian form: positive, negative and
/// null counts, with a + b + c = dim.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SubSignature {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl<S: Scalar> Subspace<S> {
    /// Span of a list of vectors; the empty list gives the zero subspace.
    pub fn span(vectors: &[Vec<S>], tol: f64) -> Self {
        if vectors.is_empty() {
            return Self {
                ambient: 0,
                basis: Mat::zeros(0, 0),
            };
        }
        let ambient = vectors[0].len();
        assert!(vectors.iter().all(|v| v.len() == ambient), "ragged vectors");
        let mut m = Mat::from_rows(vectors.to_vec());
        let pivots = m.rref(tol);
        m.truncate_rows(pivots.len());
        Self { ambient, basis: m }
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Mat::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Mat::identity(ambient),
        }
    }

    /// Wraps an already-reduced basis matrix. Used internally after rref.
    fn from_reduced(ambient: usize, basis: Mat<S>) -> Self {
        Self { ambient, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &Mat<S> {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<S>> {
        self.basis.to_row_vecs()
    }

    fn check_ambient(&self, other: &Self) -> Result<(), SubspaceError> {
        if self.ambient != other.ambient {
            Err(SubspaceError::AmbientMismatch(self.ambient, other.ambient))
        } else {
            Ok(())
        }
    }

    pub fn sum(&self, other: &Self, tol: f64) -> Result<Self, SubspaceError> {
        self.check_ambient(other)?;
        if self.dim() == 0 {
            return Ok(other.clone());
        }
        if other.dim() == 0 {
            return Ok(self.clone());
        }
        let mut stacked = self.basis.vcat(&other.basis);
        let pivots = stacked.rref(tol);
        stacked.truncate_rows(pivots.len());
        Ok(Self::from_reduced(self.ambient, stacked))
    }

    /// Intersection via the kernel of the stacked-basis system: coefficient
    /// pairs (a, b) with a.U = b.V give the common vectors.
    pub fn intersect(&self, other: &Self, tol: f64) -> Result<Self, SubspaceError> {
        self.check_ambient(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(self.ambient));
        }
        // columns of A are the basis vectors of U followed by -V; kernel
        // elements are coefficient vectors of intersection representations
        let a = self
            .basis
            .transpose()
            .hcat(&other.basis.transpose().scale(&S::from_int(-1)));
        let coeffs = a.null_space(tol);
        let mut vecs = Vec::with_capacity(coeffs.nrows());
        for c in coeffs.rows_iter() {
            let mut v = vec![S::zero(); self.ambient];
            for (i, row) in self.basis.rows_iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    v[j] = v[j].add(&c[i].mul(x));
                }
            }
            vecs.push(v);
        }
        if vecs.is_empty() {
            return Ok(Self::zero(self.ambient));
        }
        Ok(Self::span(&vecs, tol))
    }

    /// {w : <v, w> = 0 for all v in V} with respect to the given signature.
    pub fn orth_complement(&self, sig: Signature, tol: f64) -> Result<Self, SubspaceError> {
        if self.ambient != sig.dim() {
            return Err(SubspaceError::AmbientMismatch(self.ambient, sig.dim()));
        }
        if self.dim() == 0 {
            return Ok(Self::full(self.ambient));
        }
        // <v, w> = 0  <=>  (B J) conj(w) = 0, B the basis rows, J the form
        let bj = self.basis.mul(&sig.form_matrix());
        let kernel = bj.null_space(tol);
        let vecs: Vec<Vec<S>> = kernel
            .rows_iter()
            .map(|r| r.iter().map(|x| x.conj()).collect())
            .collect();
        if vecs.is_empty() {
            return Ok(Self::zero(self.ambient));
        }
        Ok(Self::span(&vecs, tol))
    }

    /// Gram matrix of the restricted form over the canonical basis.
    pub fn gram(&self, sig: Signature) -> Result<Mat<S>, SubspaceError> {
        if self.ambient != sig.dim() {
            return Err(SubspaceError::AmbientMismatch(self.ambient, sig.dim()));
        }
        let rows = self.basis_rows();
        let k = rows.len();
        Ok(Mat::from_fn(k, k, |i, j| {
            inner_product(&rows[i], &rows[j], sig).expect("dims checked")
        }))
    }

    /// Inertia of the restricted form.
    pub fn signature(&self, sig: Signature, tol: f64) -> Result<SubSignature, SubspaceError> {
        let g = self.gram(sig)?;
        let (d, _) = congruence_diagonalize(&g, tol)?;
        Ok(inertia_of_diagonal(&d, tol))
    }

    /// True iff the subspace is null of the maximal dimension min(r, s).
    pub fn is_maximal_null(&self, sig: Signature, tol: f64) -> Result<bool, SubspaceError> {
        assert!(sig.is_nondegenerate(), "maximal null requires t = 0");
        let s = self.signature(sig, tol)?;
        Ok(s.a == 0 && s.b == 0 && s.c == sig.r.min(sig.s) && self.dim() == s.c)
    }

    /// Least-squares residual of the best representation of `v` inside this
    /// subspace (Euclidean). Zero iff v lies in the subspace.
    pub fn containment_residual(&self, v: &[S], tol: f64) -> f64 {
        assert_eq!(v.len(), self.ambient);
        if self.dim() == 0 {
            return Mat::from_rows(vec![v.to_vec()]).max_abs();
        }
        let bt = self.basis.transpose();
        let b = Mat::from_rows(vec![v.to_vec()]).transpose();
        match bt.solve_lsq(&b, tol) {
            Some(x) => bt.mul(&x).max_dev(&b),
            None => f64::INFINITY,
        }
    }

    /// Max containment residual over all basis vectors of `self` w.r.t. `outer`.
    pub fn containment_in(&self, outer: &Self, tol: f64) -> f64 {
        self.basis_rows()
            .iter()
            .map(|v| outer.containment_residual(v, tol))
            .fold(0.0, f64::max)
    }
}

/// Congruence diagonalization P H P^H = D with D real diagonal, returning
/// (diagonal of D, P). Radical-free: symmetric pivoting plus the
/// hyperbolic-pair trick for isotropic blocks, so it is exact-mode safe.
pub fn congruence_diagonalize<S: Scalar>(
    h: &Mat<S>,
    tol: f64,
) -> Result<(Vec<S>, Mat<S>), SubspaceError> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "square matrix required");
    let scale = h.max_abs();
    let thresh = if S::EXACT { 0.0 } else { tol * scale.max(1e-300) };
    if h.max_dev(&h.conj_t()) > thresh.max(tol * scale.max(1.0)) {
        return Err(SubspaceError::NotHermitian);
    }
    let mut a = h.clone();
    let mut p = Mat::identity(n);

    // congruence row op: row_i += c * row_j on A (both sides) and on P
    fn add_row<S: Scalar>(a: &mut Mat<S>, p: &mut Mat<S>, i: usize, j: usize, c: &S) {
        let n = a.nrows();
        for k in 0..n {
            let t = c.mul(&a[(j, k)]);
            a[(i, k)] = a[(i, k)].add(&t);
        }
        // column update uses the conjugate factor: A <- A E^H
        for k in 0..n {
            let t = c.conj().mul(&a[(k, j)]);
            a[(k, i)] = a[(k, i)].add(&t);
        }
        for k in 0..p.ncols() {
            let t = c.mul(&p[(j, k)]);
            p[(i, k)] = p[(i, k)].add(&t);
        }
    }

    fn swap_sym<S: Scalar>(a: &mut Mat<S>, p: &mut Mat<S>, i: usize, j: usize) {
        if i == j {
            return;
        }
        let n = a.nrows();
        for k in 0..n {
            let x = a[(i, k)].clone();
            a[(i, k)] = a[(j, k)].clone();
            a[(j, k)] = x;
        }
        for k in 0..n {
            let x = a[(k, i)].clone();
            a[(k, i)] = a[(k, j)].clone();
            a[(k, j)] = x;
        }
        for k in 0..p.ncols() {
            let x = p[(i, k)].clone();
            p[(i, k)] = p[(j, k)].clone();
            p[(j, k)] = x;
        }
    }

    for step in 0..n {
        // best remaining diagonal pivot
        let mut best = step;
        let mut best_mag = a[(step, step)].abs_sq();
        for i in step + 1..n {
            let m = a[(i, i)].abs_sq();
            if m > best_mag {
                best = i;
                best_mag = m;
            }
        }
        if a[(best, best)].is_zero(thresh) {
            // all remaining diagonal entries vanish; look for an off-diagonal
            // entry and break the isotropic pair
            let mut found = None;
            let mut found_mag = 0.0;
            for i in step..n {
                for j in i + 1..n {
                    let m = a[(i, j)].abs_sq();
                    if m > found_mag {
                        found = Some((i, j));
                        found_mag = m;
                    }
                }
            }
            let Some((i, j)) = found else {
                break; // remaining block is zero
            };
            if a[(i, j)].is_zero(thresh) {
                break;
            }
            // row_i += row_j gives diagonal 2 Re a_ij; if that is zero the
            // entry is purely imaginary and row_i += i*row_j gives 2 Im a_ij
            let re_ok = 2.0 * a[(i, j)].re_approx().abs();
            let probe = if S::EXACT {
                a[(i, j)].add(&a[(i, j)].conj())
            } else {
                S::from_int(0)
            };
            let use_real = if S::EXACT {
                !probe.is_zero(0.0)
            } else {
                re_ok > thresh
            };
            let c = if use_real { S::one() } else { S::i() };
            add_row(&mut a, &mut p, i, j, &c);
            swap_sym(&mut a, &mut p, step, i);
        } else {
            swap_sym(&mut a, &mut p, step, best);
        }
        let d = a[(step, step)].clone();
        let d_inv = d.inv().expect("nonzero pivot");
        for i in step + 1..n {
            if a[(i, step)].is_zero(0.0) {
                continue;
            }
            let c = a[(i, step)].mul(&d_inv).neg();
            add_row(&mut a, &mut p, i, step, &c);
        }
    }

    let diag: Vec<S> = (0..n).map(|i| a[(i, i)].clone()).collect();
    Ok((diag, p))
}

/// Counts signs on a real diagonal.
pub fn inertia_of_diagonal<S: Scalar>(diag: &[S], tol: f64) -> SubSignature {
    let scale = diag.iter().map(|d| d.abs_sq()).fold(0.0f64, f64::max).sqrt();
    let thresh = if S::EXACT { 0.0 } else { tol * scale.max(1.0) };
    let mut sig = SubSignature { a: 0, b: 0, c: 0 };
    for d in diag {
        match d.real_sign(thresh) {
            1 => sig.a += 1,
            -1 => sig.b += 1,
            _ => sig.c += 1,
        }
    }
    sig
}

/// Inertia of a Hermitian matrix.
pub fn inertia<S: Scalar>(h: &Mat<S>, tol: f64) -> Result<SubSignature, SubspaceError> {
    let (d, _) = congruence_diagonalize(h, tol)?;
    Ok(inertia_of_diagonal(&d, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;
    use num_complex::Complex64;

    type Sub = Subspace<Complex64>;
    type SubQ = Subspace<GaussianRational>;

    fn v(coords: &[f64]) -> Vec<Complex64> {
        coords.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    const TOL: f64 = 1e-9;

    #[test]
    fn span_drops_dependent_rows() {
        let s = Sub::span(&[v(&[1.0, 0.0]), v(&[2.0, 0.0])], TOL);
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis_rows()[0], v(&[1.0, 0.0]));
        let s3 = Sub::span(
            &[v(&[1.0, 1.0, 0.0]), v(&[0.0, 1.0, 1.0]), v(&[1.0, 0.0, -1.0])],
            TOL,
        );
        assert_eq!(s3.dim(), 2);
    }

    #[test]
    fn empty_span_is_zero_subspace() {
        let s = Sub::span(&[], TOL);
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn sum_examples() {
        let e1 = Sub::span(&[v(&[1.0, 0.0])], TOL);
        let e2 = Sub::span(&[v(&[0.0, 1.0])], TOL);
        assert_eq!(e1.sum(&e2, TOL).unwrap().dim(), 2);
        assert_eq!(e1.sum(&e1, TOL).unwrap(), e1);
        let a = Sub::span(&[v(&[1.0, 1.0, 0.0])], TOL);
        let b = Sub::span(&[v(&[1.0, 0.0, 1.0]), v(&[0.0, 1.0, -1.0])], TOL);
        assert_eq!(a.sum(&b, TOL).unwrap().dim(), 2);
    }

    #[test]
    fn intersect_examples() {
        let u = Sub::span(&[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])], TOL);
        let w = Sub::span(&[v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])], TOL);
        let i = u.intersect(&w, TOL).unwrap();
        assert_eq!(i, Sub::span(&[v(&[0.0, 1.0, 0.0])], TOL));
        assert_eq!(u.intersect(&Sub::zero(3), TOL).unwrap().dim(), 0);
        let full = Sub::span(&[v(&[1.0, 1.0]), v(&[0.0, 1.0])], TOL);
        let line = Sub::span(&[v(&[1.0, 2.0])], TOL);
        assert_eq!(full.intersect(&line, TOL).unwrap(), line);
    }

    #[test]
    fn orth_complement_examples() {
        let sig = Signature::nondegenerate(1, 1);
        let nullline = Sub::span(&[v(&[1.0, 1.0])], TOL);
        assert_eq!(nullline.orth_complement(sig, TOL).unwrap(), nullline);
        assert_eq!(Sub::zero(2).orth_complement(sig, TOL).unwrap().dim(), 2);
        let sig12 = Signature::nondegenerate(1, 2);
        let e1 = Sub::span(&[v(&[1.0, 0.0, 0.0])], TOL);
        let c = e1.orth_complement(sig12, TOL).unwrap();
        assert_eq!(
            c,
            Sub::span(&[v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])], TOL)
        );
    }

    #[test]
    fn gram_examples() {
        let sig = Signature::nondegenerate(1, 1);
        let full = Sub::full(2);
        let g = full.gram(sig).unwrap();
        assert_eq!(g, Mat::from_ints(vec![vec![1, 0], vec![0, -1]]));
        let nullline = Sub::span(&[v(&[1.0, 1.0])], TOL);
        assert!(nullline.gram(sig).unwrap().is_zero(1e-12));
        let sig21 = Signature::nondegenerate(2, 1);
        let s = Sub::span(&[v(&[1.0, 0.0, 1.0]), v(&[0.0, 1.0, 0.0])], TOL);
        let g2 = s.gram(sig21).unwrap();
        assert_eq!(g2, Mat::from_ints(vec![vec![0, 0], vec![0, 1]]));
    }

    #[test]
    fn congruence_inertia_examples() {
        let h = Mat::<Complex64>::from_ints(vec![vec![3, 0], vec![0, -2]]);
        assert_eq!(inertia(&h, TOL).unwrap(), SubSignature { a: 1, b: 1, c: 0 });
        let hyp = Mat::<Complex64>::from_ints(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(inertia(&hyp, TOL).unwrap(), SubSignature { a: 1, b: 1, c: 0 });
        let z = Mat::<Complex64>::zeros(3, 3);
        assert_eq!(inertia(&z, TOL).unwrap(), SubSignature { a: 0, b: 0, c: 3 });
    }

    #[test]
    fn congruence_transform_is_consistent() {
        let h = Mat::<Complex64>::from_rows(vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(0.0, -2.0), Complex64::new(0.0, 0.0)],
        ]);
        let (d, p) = congruence_diagonalize(&h, TOL).unwrap();
        let lhs = p.mul(&h).mul(&p.conj_t());
        let mut dm = Mat::zeros(2, 2);
        for (i, x) in d.iter().enumerate() {
            dm[(i, i)] = *x;
        }
        assert!(lhs.max_dev(&dm) < 1e-9);
        assert_eq!(inertia_of_diagonal(&d, TOL), SubSignature { a: 1, b: 1, c: 0 });
    }

    #[test]
    fn exact_hyperbolic_block() {
        // purely imaginary coupling exercises the i-weighted row move
        let i = GaussianRational::i();
        let h = Mat::from_rows(vec![
            vec![GaussianRational::zero(), i.clone()],
            vec![i.neg(), GaussianRational::zero()],
        ]);
        let (d, p) = congruence_diagonalize(&h, 0.0).unwrap();
        assert_eq!(inertia_of_diagonal(&d, 0.0), SubSignature { a: 1, b: 1, c: 0 });
        let mut dm = Mat::zeros(2, 2);
        for (k, x) in d.iter().enumerate() {
            dm[(k, k)] = x.clone();
        }
        assert_eq!(p.mul(&h).mul(&p.conj_t()), dm);
    }

    #[test]
    fn subspace_signature_examples() {
        let sig = Signature::nondegenerate(1, 1);
        let nullline = Sub::span(&[v(&[1.0, 1.0])], TOL);
        assert_eq!(
            nullline.signature(sig, TOL).unwrap(),
            SubSignature { a: 0, b: 0, c: 1 }
        );
        assert_eq!(
            Sub::full(2).signature(sig, TOL).unwrap(),
            SubSignature { a: 1, b: 1, c: 0 }
        );
        let sig21 = Signature::nondegenerate(2, 1);
        let s = Sub::span(&[v(&[1.0, 0.0, 1.0]), v(&[0.0, 1.0, 0.0])], TOL);
        assert_eq!(
            s.signature(sig21, TOL).unwrap(),
            SubSignature { a: 1, b: 0, c: 1 }
        );
    }

    #[test]
    fn maximal_null_examples() {
        let sig = Signature::nondegenerate(1, 1);
        let nullline = Sub::span(&[v(&[1.0, 1.0])], TOL);
        assert!(nullline.is_maximal_null(sig, TOL).unwrap());
        // (1,1,0) under (2,1): norm 1 + 1 - 0 = 2 > 0, not null at all
        let sig21 = Signature::nondegenerate(2, 1);
        let pos = Sub::span(&[v(&[1.0, 1.0, 0.0])], TOL);
        assert!(!pos.is_maximal_null(sig21, TOL).unwrap());
        let sig22 = Signature::nondegenerate(2, 2);
        let plane = Sub::span(&[v(&[1.0, 0.0, 0.0, 1.0]), v(&[0.0, 1.0, 1.0, 0.0])], TOL);
        assert!(plane.is_maximal_null(sig22, TOL).unwrap());
    }

    #[test]
    fn exact_signature_with_rationals() {
        let sig = Signature::nondegenerate(2, 1);
        let rows = vec![
            vec![
                GaussianRational::from_ratio(1, 2),
                GaussianRational::zero(),
                GaussianRational::from_ratio(1, 2),
            ],
            vec![
                GaussianRational::zero(),
                GaussianRational::from_int(3),
                GaussianRational::zero(),
            ],
        ];
        let s = SubQ::span(&rows, 0.0);
        assert_eq!(s.signature(sig, 0.0).unwrap(), SubSignature { a: 1, b: 0, c: 1 });
    }
}
