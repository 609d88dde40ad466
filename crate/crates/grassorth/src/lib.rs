//! Indefinite-signature linear algebra on C^{r,s,t}, the orthogonal structure
//! it induces on Grassmannians, and verification/classification machinery for
//! local orthogonal maps between them.
//!
//! The crate has two scalar backends (see [`scalar`]): complex doubles for
//! sampling-scale verification and Gaussian rationals for exact polynomial
//! identity certification. Sampling loops run data-parallel under the
//! `parallel` feature (on by default) and fall back to sequential execution
//! without it.

pub mod automorphisms;
pub mod forms;
pub mod grassmannian;
pub mod jsonio;
pub mod maps;
pub mod mat;
pub mod rigidity;
pub mod scalar;
pub mod subspaces;
pub mod util;

pub use scalar::{GaussianRational, Scalar, DEFAULT_TOL};
