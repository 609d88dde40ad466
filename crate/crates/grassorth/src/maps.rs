//! Polynomial chart-to-chart holomorphic maps, the built-in witnesses
//! (standard embedding, generalized Whitney map), and the two verification
//! engines: sampling-based residual checks and exact polarized identity
//! testing over Gaussian rationals.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::grassmannian::{
    sample_orthogonal_partner_rng, sample_shilov_rng, ChartMatrix, GrassError,
};
use crate::mat::Mat;
use crate::scalar::{GaussianRational, Scalar};
use crate::util::{batch_map, batch_map_seq, trial_rng};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapsError {
    #[error("shape mismatch")]
    ShapeMismatch,
    #[error("embedding blocks do not fit: need s' >= s + r' - 1 and r' >= 2")]
    BlocksDontFit,
    #[error("operation requires source rank 1")]
    SourceRankNotOne,
    #[error(transparent)]
    Grass(#[from] GrassError),
}

/// Sparse multivariate polynomial in `nvars` variables (the source chart
/// variables z_11, ..., z_rs in row-major order).
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<S> {
    nvars: usize,
    /// (exponent multi-index, coefficient); indices unique, zeros pruned.
    terms: Vec<(Vec<u32>, S)>,
}

impl<S: Scalar> MultiPoly<S> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut exp = vec![0; nvars];
        exp[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exp, S::one());
        p
    }

    pub fn monomial(nvars: usize, exp: Vec<u32>, coef: S) -> Self {
        assert_eq!(exp.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exp, coef);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, S)] {
        &self.terms
    }

    pub fn is_zero_poly(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coef * x^exp`, merging with an existing term and pruning zeros.
    pub fn add_term(&mut self, exp: Vec<u32>, coef: S) {
        assert_eq!(exp.len(), self.nvars);
        if let Some(pos) = self.terms.iter().position(|(e, _)| *e == exp) {
            let merged = self.terms[pos].1.add(&coef);
            if merged.is_zero(0.0) {
                self.terms.remove(pos);
            } else {
                self.terms[pos].1 = merged;
            }
        } else if !coef.is_zero(0.0) {
            let at = self
                .terms
                .binary_search_by(|(e, _)| e.cmp(&exp))
                .unwrap_err();
            self.terms.insert(at, (exp, coef));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, k) in &self.terms {
            out.add_term(e.clone(), k.mul(c));
        }
        out
    }

    /// Coefficient-conjugated polynomial: variables stay free. This is the
    /// holomorphic extension used in the polarization step.
    pub fn conj_coeffs(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.conj()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let exp = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                out.add_term(exp, c1.mul(c2));
            }
        }
        out
    }

    /// Substitutes a polynomial for each variable. `vals` must all share a
    /// variable count, which becomes the variable count of the result.
    pub fn eval_poly(&self, vals: &[Self]) -> Self {
        assert_eq!(vals.len(), self.nvars);
        let out_nvars = vals.first().map_or(0, |p| p.nvars);
        let mut acc = Self::zero(out_nvars);
        for (exp, coef) in &self.terms {
            let mut term = Self::constant(out_nvars, coef.clone());
            for (v, &e) in vals.iter().zip(exp.iter()) {
                for _ in 0..e {
                    term = term.mul(v);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    pub fn eval(&self, vals: &[S]) -> S {
        assert_eq!(vals.len(), self.nvars);
        let mut acc = S::zero();
        for (exp, coef) in &self.terms {
            let mut term = coef.clone();
            for (v, &e) in vals.iter().zip(exp.iter()) {
                for _ in 0..e {
                    term = term.mul(v);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }
}

/// An r' x s' matrix of polynomials in the r*s source chart variables: the
/// chart form F# of the map [I_{r'}, F#].
#[derive(Clone, PartialEq, Debug)]
pub struct PolyMatrixMap<S> {
    src: (usize, usize),
    tgt: (usize, usize),
    entries: Vec<Vec<MultiPoly<S>>>,
}

impl<S: Scalar> PolyMatrixMap<S> {
    pub fn new(
        src: (usize, usize),
        tgt: (usize, usize),
        entries: Vec<Vec<MultiPoly<S>>>,
    ) -> Result<Self, MapsError> {
        let nvars = src.0 * src.1;
        if entries.len() != tgt.0
            || entries
                .iter()
                .any(|row| row.len() != tgt.1 || row.iter().any(|p| p.nvars() != nvars))
        {
            return Err(MapsError::ShapeMismatch);
        }
        Ok(Self { src, tgt, entries })
    }

    pub fn src(&self) -> (usize, usize) {
        self.src
    }

    pub fn tgt(&self) -> (usize, usize) {
        self.tgt
    }

    pub fn nvars(&self) -> usize {
        self.src.0 * self.src.1
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiPoly<S> {
        &self.entries[i][j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut MultiPoly<S> {
        &mut self.entries[i][j]
    }

    /// Entrywise evaluation at flattened chart coordinates.
    pub fn evaluate_flat(&self, vals: &[S]) -> Mat<S> {
        assert_eq!(vals.len(), self.nvars());
        Mat::from_fn(self.tgt.0, self.tgt.1, |i, j| self.entries[i][j].eval(vals))
    }

    pub fn evaluate(&self, z: &ChartMatrix<S>) -> Result<ChartMatrix<S>, MapsError> {
        if (z.r, z.s) != self.src {
            return Err(MapsError::ShapeMismatch);
        }
        let flat: Vec<S> = z.z.to_row_vecs().into_iter().flatten().collect();
        Ok(ChartMatrix::new(self.evaluate_flat(&flat)))
    }

    /// Constant map F = C.
    pub fn constant_map(src: (usize, usize), c: &Mat<S>) -> Self {
        let nvars = src.0 * src.1;
        Self {
            src,
            tgt: (c.nrows(), c.ncols()),
            entries: (0..c.nrows())
                .map(|i| {
                    (0..c.ncols())
                        .map(|j| MultiPoly::constant(nvars, c[(i, j)].clone()))
                        .collect()
                })
                .collect(),
        }
    }

    /// F -> A F (constant r' x r' matrix on the left).
    pub fn left_mul(&self, a: &Mat<S>) -> Self {
        assert_eq!(a.ncols(), self.tgt.0);
        let entries = (0..a.nrows())
            .map(|i| {
                (0..self.tgt.1)
                    .map(|j| {
                        let mut acc = MultiPoly::zero(self.nvars());
                        for k in 0..self.tgt.0 {
                            acc = acc.add(&self.entries[k][j].scale(&a[(i, k)]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Self {
            src: self.src,
            tgt: (a.nrows(), self.tgt.1),
            entries,
        }
    }

    /// F -> F B (constant s' x s' matrix on the right).
    pub fn right_mul(&self, b: &Mat<S>) -> Self {
        assert_eq!(b.nrows(), self.tgt.1);
        let entries = (0..self.tgt.0)
            .map(|i| {
                (0..b.ncols())
                    .map(|j| {
                        let mut acc = MultiPoly::zero(self.nvars());
                        for k in 0..self.tgt.1 {
                            acc = acc.add(&self.entries[i][k].scale(&b[(k, j)]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Self {
            src: self.src,
            tgt: (self.tgt.0, b.ncols()),
            entries,
        }
    }
}

impl<S: Scalar> PolyMatrixMap<S> {
    /// Source substitution z |-> z A for a rank-1 source: the new map is
    /// G(z') = F(z' A), with z' of length `a.nrows()`.
    pub fn precompose_linear(&self, a: &Mat<S>) -> Self {
        assert_eq!(self.src.0, 1);
        assert_eq!(a.ncols(), self.src.1);
        let new_s = a.nrows();
        let subst: Vec<MultiPoly<S>> = (0..self.src.1)
            .map(|k| {
                let mut p = MultiPoly::zero(new_s);
                for j in 0..new_s {
                    let mut exp = vec![0u32; new_s];
                    exp[j] = 1;
                    p.add_term(exp, a[(j, k)].clone());
                }
                p
            })
            .collect();
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|p| p.eval_poly(&subst)).collect())
            .collect();
        Self {
            src: (1, new_s),
            tgt: self.tgt,
            entries,
        }
    }
}

/// The standard linear embedding in chart form: rows 1..r'-1 are [I_{r'-1} | 0]
/// and row r' is [0 | z_1 ... z_s | 0]. Requires r' >= 2 and s' >= s + r' - 1.
pub fn standard_embedding<S: Scalar>(
    s: usize,
    rp: usize,
    sp: usize,
) -> Result<PolyMatrixMap<S>, MapsError> {
    if rp < 2 || sp < s + rp - 1 {
        return Err(MapsError::BlocksDontFit);
    }
    let nvars = s;
    let entries = (0..rp)
        .map(|i| {
            (0..sp)
                .map(|j| {
                    if i < rp - 1 {
                        if j == i {
                            MultiPoly::constant(nvars, S::one())
                        } else {
                            MultiPoly::zero(nvars)
                        }
                    } else if j >= rp - 1 && j < rp - 1 + s {
                        MultiPoly::var(nvars, j - (rp - 1))
                    } else {
                        MultiPoly::zero(nvars)
                    }
                })
                .collect()
        })
        .collect();
    PolyMatrixMap::new((1, s), (rp, sp), entries)
}

/// The generalized Whitney map: row 1 is [z_1, ..., z_{s-1}, z_1 z_s, ...,
/// z_s^2, 0 x (r'-1)], the remaining rows carry I_{r'-1} in the trailing
/// block. Target shape r' x (2s + r' - 2), the sharpness boundary
/// s' - r' = 2s - 2.
pub fn whitney_map<S: Scalar>(s: usize, rp: usize) -> Result<PolyMatrixMap<S>, MapsError> {
    if s < 2 || rp < 1 {
        return Err(MapsError::BlocksDontFit);
    }
    let sp = 2 * s + rp - 2;
    let nvars = s;
    let entries = (0..rp)
        .map(|i| {
            (0..sp)
                .map(|j| {
                    if i == 0 {
                        if j < s - 1 {
                            MultiPoly::var(nvars, j)
                        } else if j < 2 * s - 1 {
                            // z_{k} z_s with k = j - (s-1) in 0..s
                            let k = j - (s - 1);
                            let mut exp = vec![0u32; nvars];
                            exp[k] += 1;
                            exp[s - 1] += 1;
                            MultiPoly::monomial(nvars, exp, S::one())
                        } else {
                            MultiPoly::zero(nvars)
                        }
                    } else if j == 2 * s - 2 + i {
                        MultiPoly::constant(nvars, S::one())
                    } else {
                        MultiPoly::zero(nvars)
                    }
                })
                .collect()
        })
        .collect();
    PolyMatrixMap::new((1, s), (rp, sp), entries)
}

/// A constant Shilov-valued map: F = [I_{r'} | 0] as an r' x s' chart value.
pub fn constant_shilov_map<S: Scalar>(
    s: usize,
    rp: usize,
    sp: usize,
) -> Result<PolyMatrixMap<S>, MapsError> {
    if sp < rp {
        return Err(MapsError::BlocksDontFit);
    }
    let c = Mat::from_fn(rp, sp, |i, j| if i == j { S::one() } else { S::zero() });
    Ok(PolyMatrixMap::constant_map((1, s), &c))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum VerifyMode {
    Sampling,
    ExactPit,
}

/// Outcome of a verification engine run. `failures` is empty iff the run
/// passed.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub mode: VerifyMode,
    pub check: String,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_zero: Option<bool>,
    pub failures: Vec<serde_json::Value>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn chart_to_witness(z: &ChartMatrix<Complex64>) -> serde_json::Value {
    crate::jsonio::chart_to_json(z)
}

/// Per-sample residual ||I - F(z) F(z)^H||_max on a seeded Shilov sample.
fn null_residual(
    f: &PolyMatrixMap<Complex64>,
    seed: u64,
    index: usize,
) -> (ChartMatrix<Complex64>, f64) {
    let s = f.src().1;
    let rng = &mut trial_rng(seed, index as u64);
    let z = sample_shilov_rng(1, s, rng).expect("r = 1 <= s");
    let fz = f.evaluate(&z).expect("shape");
    let defect = crate::grassmannian::chart_hermitian_defect(&fz);
    (z, defect.max_abs())
}

/// Residual stream for the null-preservation check; parallel under the
/// `parallel` feature.
pub fn null_preservation_residuals(
    f: &PolyMatrixMap<Complex64>,
    n_samples: usize,
    seed: u64,
) -> Vec<(ChartMatrix<Complex64>, f64)> {
    batch_map(n_samples, |i| null_residual(f, seed, i))
}

/// Sequential twin of [`null_preservation_residuals`], for benchmarking.
pub fn null_preservation_residuals_seq(
    f: &PolyMatrixMap<Complex64>,
    n_samples: usize,
    seed: u64,
) -> Vec<(ChartMatrix<Complex64>, f64)> {
    batch_map_seq(n_samples, |i| null_residual(f, seed, i))
}

/// Samples S(Omega_{1,s}) and checks ||I - F(z)F(z)^H||_max <= tol per sample.
pub fn check_null_preservation(
    f: &PolyMatrixMap<Complex64>,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport, MapsError> {
    if f.src().0 != 1 {
        return Err(MapsError::SourceRankNotOne);
    }
    let results = null_preservation_residuals(f, n_samples, seed);
    let mut max_residual: f64 = 0.0;
    let mut failures = Vec::new();
    for (z, res) in &results {
        max_residual = max_residual.max(*res);
        if *res > tol {
            failures.push(chart_to_witness(z));
        }
    }
    Ok(VerificationReport {
        mode: VerifyMode::Sampling,
        check: "null_preservation".into(),
        trials: n_samples,
        max_residual: Some(max_residual),
        all_zero: None,
        failures,
    })
}

fn orthogonality_residual(
    f: &PolyMatrixMap<Complex64>,
    seed: u64,
    index: usize,
) -> (ChartMatrix<Complex64>, ChartMatrix<Complex64>, f64) {
    let s = f.src().1;
    let rng = &mut trial_rng(seed, index as u64);
    let z = sample_shilov_rng(1, s, rng).expect("r = 1 <= s");
    let w = sample_orthogonal_partner_rng(&z, rng).expect("Shilov samples are nonzero");
    let fz = f.evaluate(&z).expect("shape");
    let fw = f.evaluate(&w).expect("shape");
    let rp = f.tgt().0;
    let defect = Mat::identity(rp).sub(&fz.z.mul(&fw.z.conj_t()));
    (z, w, defect.max_abs())
}

/// Samples orthogonal chart pairs z | w (constraint sum z_k conj(w_k) = 1)
/// and checks ||I - F(z)F(w)^H||_max <= tol per pair.
pub fn check_orthogonality_preservation(
    f: &PolyMatrixMap<Complex64>,
    n_pairs: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport, MapsError> {
    if f.src().0 != 1 {
        return Err(MapsError::SourceRankNotOne);
    }
    let results = batch_map(n_pairs, |i| orthogonality_residual(f, seed, i));
    let mut max_residual: f64 = 0.0;
    let mut failures = Vec::new();
    for (z, w, res) in &results {
        max_residual = max_residual.max(*res);
        if *res > tol {
            failures.push(serde_json::json!({
                "z": chart_to_witness(z),
                "w": chart_to_witness(w),
                "residual": res,
            }));
        }
    }
    Ok(VerificationReport {
        mode: VerifyMode::Sampling,
        check: "orthogonality_preservation".into(),
        trials: n_pairs,
        max_residual: Some(max_residual),
        all_zero: None,
        failures,
    })
}

/// Polarized Gram matrix: G_ij(Z, V) = sum_k f_ik(Z) f~_jk(V) - delta_ij,
/// with f~ the coefficient-conjugated polynomials and V an independent set of
/// variables standing for conj(W). On the diagonal V = conj(Z) this equals
/// F(Z) F(Z)^H - I.
pub fn polarized_gram<S: Scalar>(f: &PolyMatrixMap<S>, z_vals: &[S], v_vals: &[S]) -> Mat<S> {
    assert_eq!(z_vals.len(), f.nvars());
    assert_eq!(v_vals.len(), f.nvars());
    let (rp, sp) = f.tgt();
    Mat::from_fn(rp, rp, |i, j| {
        let mut acc = S::zero();
        for k in 0..sp {
            let a = f.entry(i, k).eval(z_vals);
            let b = f.entry(j, k).conj_coeffs().eval(v_vals);
            acc = acc.add(&a.mul(&b));
        }
        if i == j {
            acc.sub(&S::one())
        } else {
            acc
        }
    })
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num: i64 = rng.gen_range(-9..=9);
    let den: i64 = rng.gen_range(1..=9);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn random_gaussian_rational(rng: &mut ChaCha8Rng) -> GaussianRational {
    GaussianRational::new(random_rational(rng), random_rational(rng))
}

/// One exact trial: rational z with a nonzero pivot, free rational v off the
/// pivot, pivot coordinate solved exactly from sum_k z_k v_k = 1; returns the
/// witness values and the polarized Gram matrix on that variety point.
fn pit_trial(
    f: &PolyMatrixMap<GaussianRational>,
    seed: u64,
    index: usize,
) -> (Vec<GaussianRational>, Vec<GaussianRational>, bool) {
    let s = f.src().1;
    let rng = &mut trial_rng(seed, index as u64);
    let z: Vec<GaussianRational> = loop {
        let cand: Vec<GaussianRational> = (0..s).map(|_| random_gaussian_rational(rng)).collect();
        if cand.iter().any(|x| !x.is_exact_zero()) {
            break cand;
        }
    };
    // first nonzero coordinate is the pivot in exact mode
    let pivot = z.iter().position(|x| !x.is_exact_zero()).expect("nonzero");
    let mut v: Vec<GaussianRational> = (0..s).map(|_| random_gaussian_rational(rng)).collect();
    let mut partial = GaussianRational::zero();
    for k in 0..s {
        if k != pivot {
            partial = partial.add(&z[k].mul(&v[k]));
        }
    }
    v[pivot] = GaussianRational::one()
        .sub(&partial)
        .div(&z[pivot])
        .expect("pivot nonzero");
    let g = polarized_gram(f, &z, &v);
    let all_zero = (0..g.nrows()).all(|i| (0..g.ncols()).all(|j| g[(i, j)].is_exact_zero()));
    (z, v, all_zero)
}

/// Schwartz-Zippel identity test: certifies that the polarized Gram matrix
/// vanishes identically on the orthogonality variety {sum_k z_k v_k = 1}.
/// All arithmetic is exact; a single nonzero trial is a disproof certificate.
pub fn pit_orthogonality(
    f: &PolyMatrixMap<GaussianRational>,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, MapsError> {
    if f.src().0 != 1 {
        return Err(MapsError::SourceRankNotOne);
    }
    let results = batch_map(trials, |i| pit_trial(f, seed, i));
    let mut failures = Vec::new();
    for (z, v, ok) in &results {
        if !ok {
            failures.push(serde_json::json!({
                "z": crate::jsonio::scalar_vec_to_json(z),
                "v": crate::jsonio::scalar_vec_to_json(v),
            }));
        }
    }
    Ok(VerificationReport {
        mode: VerifyMode::ExactPit,
        check: "pit_orthogonality".into(),
        trials,
        max_residual: None,
        all_zero: Some(failures.is_empty()),
        failures,
    })
}
