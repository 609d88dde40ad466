//! Complex scalar backends: double-precision floats for sampling-scale
//! verification and Gaussian rationals for exact identity certification.
//!
//! All core algorithms are generic over [`Scalar`]. Zero decisions in the
//! float backend always go through an explicit tolerance; the exact backend
//! ignores tolerances and compares exactly.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default tolerance used by the float backend when nothing else is specified.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ParseScalarError {
    #[error("invalid scalar component {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Abstract complex scalar with two realizations: [`Complex64`] (float) and
/// [`GaussianRational`] (exact).
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    /// True when arithmetic is exact and tolerances are ignored.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// i, the imaginary unit.
    fn i() -> Self;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }
    fn conj(&self) -> Self;

    /// |z|^2 as an f64 approximation; used for pivot ranking and residuals.
    fn abs_sq(&self) -> f64;
    /// Zero test. Float: |z| <= tol. Exact: exact zero, tol ignored.
    fn is_zero(&self, tol: f64) -> bool;
    /// Sign of the real part: -1, 0, +1. Float uses tol; exact is exact.
    fn real_sign(&self, tol: f64) -> i8;
    fn re_approx(&self) -> f64;
    fn im_approx(&self) -> f64;

    /// Serialize to the `{"re": ..., "im": ...}` string pair.
    fn encode_parts(&self) -> (String, String);
    /// Parse from decimal ("1.25"), integer ("-3") or rational ("2/7") strings.
    fn decode_parts(re: &str, im: &str) -> Result<Self, ParseScalarError>;
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if self.norm_sqr() == 0.0 {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }
    fn is_zero(&self, tol: f64) -> bool {
        self.norm_sqr() <= tol * tol
    }
    fn real_sign(&self, tol: f64) -> i8 {
        if self.re > tol {
            1
        } else if self.re < -tol {
            -1
        } else {
            0
        }
    }
    fn re_approx(&self) -> f64 {
        self.re
    }
    fn im_approx(&self) -> f64 {
        self.im
    }

    fn encode_parts(&self) -> (String, String) {
        (format!("{}", self.re), format!("{}", self.im))
    }
    fn decode_parts(re: &str, im: &str) -> Result<Self, ParseScalarError> {
        Ok(Complex64::new(parse_f64_part(re)?, parse_f64_part(im)?))
    }
}

fn parse_f64_part(s: &str) -> Result<f64, ParseScalarError> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| ParseScalarError::Invalid(s.to_string()))?;
        let q: f64 = q
            .trim()
            .parse()
            .map_err(|_| ParseScalarError::Invalid(s.to_string()))?;
        if q == 0.0 {
            return Err(ParseScalarError::ZeroDenominator(s.to_string()));
        }
        Ok(p / q)
    } else {
        s.parse()
            .map_err(|_| ParseScalarError::Invalid(s.to_string()))
    }
}

/// Gaussian rational: a + b·i with a, b arbitrary-precision rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_i64_parts(re: i64, im: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

fn parse_rational_part(s: &str) -> Result<BigRational, ParseScalarError> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| ParseScalarError::Invalid(s.to_string()))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| ParseScalarError::Invalid(s.to_string()))?;
        if q.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(s.to_string()));
        }
        Ok(BigRational::new(p, q))
    } else if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::from(0)
        } else {
            int_part
                .parse()
                .map_err(|_| ParseScalarError::Invalid(s.to_string()))?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseScalarError::Invalid(s.to_string()));
        }
        let digits: BigInt = frac_part
            .parse()
            .map_err(|_| ParseScalarError::Invalid(s.to_string()))?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = BigRational::new(digits, den);
        let int = BigRational::from_integer(int);
        Ok(if neg { int - frac } else { int + frac })
    } else {
        let n: BigInt = s
            .parse()
            .map_err(|_| ParseScalarError::Invalid(s.to_string()))?;
        Ok(BigRational::from_integer(n))
    }
}

fn encode_rational(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Scalar for GaussianRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Self::from_i64_parts(0, 0)
    }
    fn one() -> Self {
        Self::from_i64_parts(1, 0)
    }
    fn from_int(n: i64) -> Self {
        Self::from_i64_parts(n, 0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Self {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::from_integer(BigInt::from(0)),
        }
    }
    fn i() -> Self {
        Self::from_i64_parts(0, 1)
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }
    fn sub(&self, other: &Self) -> Self {
        Self {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }
    fn mul(&self, other: &Self) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }
    fn neg(&self) -> Self {
        Self {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
    fn inv(&self) -> Option<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return None;
        }
        Some(Self {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }
    fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn abs_sq(&self) -> f64 {
        let n = &self.re * &self.re + &self.im * &self.im;
        n.to_f64().unwrap_or(f64::MAX)
    }
    fn is_zero(&self, _tol: f64) -> bool {
        self.is_exact_zero()
    }
    fn real_sign(&self, _tol: f64) -> i8 {
        if self.re.is_positive() {
            1
        } else if self.re.is_negative() {
            -1
        } else {
            0
        }
    }
    fn re_approx(&self) -> f64 {
        self.re.to_f64().unwrap_or(f64::NAN)
    }
    fn im_approx(&self) -> f64 {
        self.im.to_f64().unwrap_or(f64::NAN)
    }

    fn encode_parts(&self) -> (String, String) {
        (encode_rational(&self.re), encode_rational(&self.im))
    }
    fn decode_parts(re: &str, im: &str) -> Result<Self, ParseScalarError> {
        Ok(Self {
            re: parse_rational_part(re)?,
            im: parse_rational_part(im)?,
        })
    }
}
