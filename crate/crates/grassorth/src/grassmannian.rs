//! Points of G(r, r+s) with the orthogonal structure induced by the
//! indefinite form: representative matrices, chart coordinates, the pairing
//! A_p I_{r,s} A_q^H, domain/Shilov membership, and seeded samplers.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::Signature;
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::subspaces::{inertia, Subspace};
use crate::util::trial_rng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrassError {
    #[error("representative matrix is rank deficient")]
    RankDeficient,
    #[error("point does not lie in the standard chart")]
    NotInChart,
    #[error("shape mismatch: ({0},{1}) vs ({2},{3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("zero vector admits no orthogonal partner in the chart")]
    ZeroVector,
    #[error("sampler requires r <= s")]
    RankExceedsNullity,
}

/// A point of G(r, r+s): a full-rank r x (r+s) representative matrix,
/// canonicalized to reduced row-echelon form so equal points compare equal.
#[derive(Clone, PartialEq, Debug)]
pub struct GrassPoint<S> {
    r: usize,
    s: usize,
    a: Mat<S>,
}

/// Chart coordinates: the point [I_r, Z] for an arbitrary r x s matrix Z.
#[derive(Clone, PartialEq, Debug)]
pub struct ChartMatrix<S> {
    pub r: usize,
    pub s: usize,
    pub z: Mat<S>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PointClass {
    Null,
    Positive,
    Indefinite,
    Degenerate,
}

impl<S: Scalar> ChartMatrix<S> {
    pub fn new(z: Mat<S>) -> Self {
        Self {
            r: z.nrows(),
            s: z.ncols(),
            z,
        }
    }

    /// r = 1 chart point from a coordinate vector.
    pub fn from_vec(z: Vec<S>) -> Self {
        Self::new(Mat::from_rows(vec![z]))
    }

    pub fn row1(&self) -> &[S] {
        self.z.row(0)
    }
}

impl<S: Scalar> GrassPoint<S> {
    /// Canonicalizes `a`; fails when rank(a) < r.
    pub fn from_matrix(a: Mat<S>, tol: f64) -> Result<Self, GrassError> {
        let r = a.nrows();
        let s = a.ncols().checked_sub(r).ok_or(GrassError::RankDeficient)?;
        let mut m = a;
        let pivots = m.rref(tol);
        if pivots.len() < r {
            return Err(GrassError::RankDeficient);
        }
        Ok(Self { r, s, a: m })
    }

    /// The point [I_r, Z]; always full rank.
    pub fn from_chart(z: &ChartMatrix<S>) -> Self {
        let a = Mat::identity(z.r).hcat(&z.z);
        Self { r: z.r, s: z.s, a }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.r, self.s)
    }

    pub fn representative(&self) -> &Mat<S> {
        &self.a
    }

    pub fn signature(&self) -> Signature {
        Signature::nondegenerate(self.r, self.s)
    }

    /// The row space of the representative matrix.
    pub fn subspace(&self, tol: f64) -> Subspace<S> {
        Subspace::span(&self.a.to_row_vecs(), tol)
    }

    /// Chart coordinates Z with self = [I_r, Z], when the leading r x r block
    /// of the canonical representative is invertible.
    pub fn to_chart(&self, tol: f64) -> Result<ChartMatrix<S>, GrassError> {
        let lead = Mat::from_fn(self.r, self.r, |i, j| self.a[(i, j)].clone());
        let inv = lead.inverse(tol).ok_or(GrassError::NotInChart)?;
        let rest = Mat::from_fn(self.r, self.s, |i, j| self.a[(i, self.r + j)].clone());
        Ok(ChartMatrix::new(inv.mul(&rest)))
    }

    /// A_p I_{r,s} A_q^H for the canonical representatives.
    pub fn pairing(&self, other: &Self) -> Result<Mat<S>, GrassError> {
        if self.shape() != other.shape() {
            return Err(GrassError::ShapeMismatch(self.r, self.s, other.r, other.s));
        }
        let j = self.signature().form_matrix();
        Ok(self.a.mul(&j).mul(&other.a.conj_t()))
    }

    pub fn is_orthogonal(&self, other: &Self, tol: f64) -> Result<bool, GrassError> {
        Ok(self.pairing(other)?.is_zero(tol))
    }

    /// Classification by inertia of the self-pairing.
    pub fn classify(&self, tol: f64) -> PointClass {
        let g = self.pairing(self).expect("same shape");
        let sig = inertia(&g, tol).expect("self-pairing is Hermitian");
        if sig.c == self.r {
            PointClass::Null
        } else if sig.a == self.r {
            PointClass::Positive
        } else if sig.c == 0 && sig.a > 0 && sig.b > 0 {
            PointClass::Indefinite
        } else {
            PointClass::Degenerate
        }
    }
}

/// I_r - Z Z^H, the chart-side Hermitian witness for domain and Shilov tests.
pub fn chart_hermitian_defect<S: Scalar>(z: &ChartMatrix<S>) -> Mat<S> {
    Mat::identity(z.r).sub(&z.z.mul(&z.z.conj_t()))
}

/// True iff I - ZZ^H is positive definite.
pub fn in_domain<S: Scalar>(z: &ChartMatrix<S>, tol: f64) -> bool {
    let h = chart_hermitian_defect(z);
    let sig = inertia(&h, tol).expect("Hermitian by construction");
    sig.a == z.r
}

/// True iff ||I - ZZ^H||_max <= tol.
pub fn in_shilov<S: Scalar>(z: &ChartMatrix<S>, tol: f64) -> bool {
    chart_hermitian_defect(z).is_zero(tol)
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn random_complex_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<Complex64> {
    Mat::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Modified Gram-Schmidt with one re-orthogonalization pass; rows of the
/// result are orthonormal for the standard Hermitian product.
pub(crate) fn orthonormalize_rows(m: &Mat<Complex64>) -> Mat<Complex64> {
    let mut rows = m.to_row_vecs();
    let n = rows.len();
    for i in 0..n {
        for _pass in 0..2 {
            for j in 0..i {
                let proj: Complex64 = rows[i]
                    .iter()
                    .zip(rows[j].iter())
                    .map(|(a, b)| a * b.conj())
                    .sum();
                let rj = rows[j].clone();
                for (x, y) in rows[i].iter_mut().zip(rj.iter()) {
                    *x -= proj * y;
                }
            }
        }
        let norm: f64 = rows[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in rows[i].iter_mut() {
            *x /= norm;
        }
    }
    Mat::from_rows(rows)
}

/// Deterministic sample of S(Omega_{r,s}): the first r rows of a unitary
/// obtained from a seeded random complex s x s matrix. Requires r <= s.
pub fn sample_shilov(r: usize, s: usize, seed: u64) -> Result<ChartMatrix<Complex64>, GrassError> {
    sample_shilov_rng(r, s, &mut trial_rng(seed, 0))
}

pub fn sample_shilov_rng(
    r: usize,
    s: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ChartMatrix<Complex64>, GrassError> {
    if r > s {
        return Err(GrassError::RankExceedsNullity);
    }
    let u = orthonormalize_rows(&random_complex_mat(rng, s, s));
    let z = Mat::from_fn(r, s, |i, j| u[(i, j)]);
    Ok(ChartMatrix::new(z))
}

/// For a nonzero r = 1 chart point z, returns w with the chart orthogonality
/// relation sum_k z_k conj(w_k) = 1: all coordinates of conj(w) except the
/// largest-modulus pivot are free samples, the pivot solves the constraint.
pub fn sample_orthogonal_partner(
    z: &ChartMatrix<Complex64>,
    seed: u64,
) -> Result<ChartMatrix<Complex64>, GrassError> {
    sample_orthogonal_partner_rng(z, &mut trial_rng(seed, 0))
}

pub fn sample_orthogonal_partner_rng(
    z: &ChartMatrix<Complex64>,
    rng: &mut ChaCha8Rng,
) -> Result<ChartMatrix<Complex64>, GrassError> {
    assert_eq!(z.r, 1, "partner sampler is r = 1 only");
    let zs = z.row1();
    let (pivot, mag) = zs
        .iter()
        .enumerate()
        .map(|(k, x)| (k, x.norm_sqr()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    if mag <= 1e-28 {
        return Err(GrassError::ZeroVector);
    }
    let s = z.s;
    let mut wbar: Vec<Complex64> = (0..s).map(|_| 0.5 * random_complex(rng)).collect();
    let partial: Complex64 = (0..s)
        .filter(|&k| k != pivot)
        .map(|k| zs[k] * wbar[k])
        .sum();
    wbar[pivot] = (Complex64::new(1.0, 0.0) - partial) / zs[pivot];
    let w: Vec<Complex64> = wbar.into_iter().map(|x| x.conj()).collect();
    Ok(ChartMatrix::from_vec(w))
}

/// Generic non-null r = 1 chart point: Gaussian coordinates, rejecting draws
/// too close to the null quadric |z| = 1 or to the origin.
pub fn sample_nonnull_chart_rng(s: usize, rng: &mut ChaCha8Rng) -> ChartMatrix<Complex64> {
    loop {
        let z: Vec<Complex64> = (0..s).map(|_| 0.7 * random_complex(rng)).collect();
        let n2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
        if (n2 - 1.0).abs() > 0.05 && n2 > 0.01 {
            return ChartMatrix::from_vec(z);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type MF = Mat<Complex64>;
    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn point_from_matrix_examples() {
        let base = GrassPoint::from_matrix(MF::from_ints(vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]), TOL)
            .unwrap();
        assert_eq!(base.shape(), (2, 2));
        assert_eq!(
            GrassPoint::from_matrix(MF::from_ints(vec![vec![1, 0, 1, 0], vec![2, 0, 2, 0]]), TOL),
            Err(GrassError::RankDeficient)
        );
        let p = GrassPoint::from_matrix(MF::from_ints(vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0]]), TOL)
            .unwrap();
        assert_eq!(
            p.representative(),
            &MF::from_ints(vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]])
        );
    }

    #[test]
    fn chart_roundtrip() {
        let z = ChartMatrix::new(MF::from_ints(vec![vec![1, 0], vec![0, 1]]));
        let p = GrassPoint::from_chart(&z);
        assert_eq!(
            p.representative(),
            &MF::from_ints(vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]])
        );
        assert_eq!(p.to_chart(TOL).unwrap(), z);
        let p2 = GrassPoint::from_matrix(MF::from_ints(vec![vec![2, 0, 4, 0], vec![0, 1, 0, 3]]), TOL)
            .unwrap();
        let z2 = p2.to_chart(TOL).unwrap();
        assert!(z2.z.max_dev(&MF::from_ints(vec![vec![2, 0], vec![0, 3]])) < 1e-12);
        // a point outside the chart
        let q = GrassPoint::from_matrix(MF::from_ints(vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1]]), TOL)
            .unwrap();
        assert_eq!(q.to_chart(TOL), Err(GrassError::NotInChart));
    }

    #[test]
    fn pairing_examples() {
        let p = GrassPoint::from_matrix(MF::from_ints(vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]), TOL)
            .unwrap();
        let q = GrassPoint::from_matrix(MF::from_ints(vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1]]), TOL)
            .unwrap();
        assert!(p.pairing(&q).unwrap().is_zero(0.0));
        assert!(p.is_orthogonal(&q, TOL).unwrap());
        let base = GrassPoint::from_chart(&ChartMatrix::new(MF::zeros(2, 2)));
        assert_eq!(base.pairing(&base).unwrap(), MF::identity(2));
        assert!(!base.is_orthogonal(&base, TOL).unwrap());
        // 1-dimensional: [1,1,0] vs [1,1,1] under (1,2)
        let a = GrassPoint::from_matrix(MF::from_ints(vec![vec![1, 1, 0]]), TOL).unwrap();
        let b = GrassPoint::from_matrix(MF::from_ints(vec![vec![1, 1, 1]]), TOL).unwrap();
        assert!(a.pairing(&b).unwrap().is_zero(1e-12));
    }

    #[test]
    fn chart_orthogonality_reduces_to_vectors() {
        let z = ChartMatrix::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let w = ChartMatrix::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let p = GrassPoint::from_chart(&z);
        let q = GrassPoint::from_chart(&w);
        assert!(p.is_orthogonal(&q, TOL).unwrap());
    }

    #[test]
    fn classify_examples() {
        let pos = GrassPoint::from_chart(&ChartMatrix::new(MF::zeros(2, 2)));
        assert_eq!(pos.classify(TOL), PointClass::Positive);
        let z = sample_shilov(2, 3, 11).unwrap();
        assert_eq!(GrassPoint::from_chart(&z).classify(1e-8), PointClass::Null);
        let ind =
            GrassPoint::from_matrix(MF::from_ints(vec![vec![1, 0, 0], vec![0, 0, 1]]), TOL).unwrap();
        assert_eq!(ind.classify(TOL), PointClass::Indefinite);
    }

    #[test]
    fn domain_and_shilov_examples() {
        let zero = ChartMatrix::new(MF::zeros(2, 2));
        assert!(in_domain(&zero, TOL));
        assert!(!in_shilov(&zero, TOL));
        let invsqrt2 = 1.0 / 2.0_f64.sqrt();
        let z = ChartMatrix::from_vec(vec![c(invsqrt2, 0.0), c(invsqrt2, 0.0)]);
        assert!(in_shilov(&z, 1e-12));
        // Z = [I_r | 0] of shape r x s
        let z2 = ChartMatrix::new(MF::from_ints(vec![vec![1, 0, 0], vec![0, 1, 0]]));
        assert!(in_shilov(&z2, 0.0));
    }

    #[test]
    fn shilov_sampler_contract() {
        for seed in 0..5 {
            let z = sample_shilov(2, 3, seed).unwrap();
            assert!(in_shilov(&z, 1e-10));
        }
        // r = s gives a unitary: |det| = 1
        let z = sample_shilov(3, 3, 4).unwrap();
        assert!(in_shilov(&z, 1e-10));
        assert_eq!(sample_shilov(2, 3, 9).unwrap(), sample_shilov(2, 3, 9).unwrap());
        assert_eq!(sample_shilov(3, 2, 0), Err(GrassError::RankExceedsNullity));
    }

    #[test]
    fn shilov_points_are_maximal_null() {
        let z = sample_shilov(2, 3, 21).unwrap();
        let p = GrassPoint::from_chart(&z);
        let sub = p.subspace(TOL);
        assert!(sub.is_maximal_null(p.signature(), 1e-8).unwrap());
    }

    #[test]
    fn partner_sampler_contract() {
        let z = ChartMatrix::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let w = sample_orthogonal_partner(&z, 3).unwrap();
        assert!((w.row1()[0] - c(1.0, 0.0)).norm() < 1e-12);
        for seed in 0..10 {
            let z = sample_shilov(1, 3, seed).unwrap();
            let w = sample_orthogonal_partner(&z, seed + 100).unwrap();
            let p = GrassPoint::from_chart(&z);
            let q = GrassPoint::from_chart(&w);
            assert!(p.is_orthogonal(&q, 1e-10).unwrap());
        }
        let zero = ChartMatrix::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(sample_orthogonal_partner(&zero, 0), Err(GrassError::ZeroVector));
    }

    #[test]
    fn classification_is_representative_independent() {
        let mut rng = trial_rng(5, 0);
        for _ in 0..20 {
            let a = random_complex_mat(&mut rng, 2, 5);
            let Ok(p) = GrassPoint::from_matrix(a.clone(), TOL) else {
                continue;
            };
            let mix = loop {
                let m = random_complex_mat(&mut rng, 2, 2);
                if m.inverse(TOL).is_some() {
                    break m;
                }
            };
            let q = GrassPoint::from_matrix(mix.mul(&a), TOL).unwrap();
            assert_eq!(p.classify(1e-7), q.classify(1e-7));
            assert!(p.representative().max_dev(q.representative()) < 1e-7);
        }
    }
}
