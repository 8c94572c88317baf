//! Inner vectors and zero sets in weighted spaces of analytic functions.
//!
//! The library is organized around a single family of Hilbert spaces: diagonal
//! weighted `l^2` spaces of power series on the unit disk, described by a
//! positive weight sequence `lambda_n` with `lambda_0 = 1`. On top of these it
//! provides
//!
//! * [`space`] - weight sequences, reproducing kernels `k_w(z) = sum (conj(w) z)^n / lambda_n`
//!   and their derivative kernels, evaluated with certified truncation error;
//! * [`inner`] - the shift-inner function `J_n` attached to a finite zero
//!   configuration, built from the Gram system of kernel functionals;
//! * [`zero_sets`] - certificates for zero sequences: growth of `||J_n||`, the
//!   Shapiro-Shields-style positive-definiteness test, and Blaschke bookkeeping;
//! * [`extra_zeros`] - detection and lower bounds for zeros of `J_n` beyond the
//!   prescribed configuration;
//! * [`lp`] - the Banach-space analogue on `l^p` coefficient spaces via
//!   Birkhoff-James orthogonality and metric projections;
//! * [`operators`] - a finite-dimensional laboratory for `T`-inner vectors of
//!   arbitrary matrices.

pub mod error;
pub mod extra_zeros;
pub mod inner;
pub(crate) mod linalg;
pub mod lp;
pub mod operators;
pub mod space;
pub mod zero_sets;

pub use error::{Error, ErrorKind, Result};
pub use inner::{
    build_gram, closed_form_one_point, eval_inner, gram_schmidt_kernels, norm_sequence,
    projection_distance, solve_inner, GramSchmidtKernels, GramSystem, InnerFunctionRep, ZeroConfig,
};
pub use space::{gram_entry, kernel_eval, weights_from_phi, KernelNode, PhiSpec, WeightSequence};
