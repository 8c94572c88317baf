//! Finite-dimensional laboratory for `T`-inner vectors.
//!
//! A nonzero `v` is `T`-inner when `v` is orthogonal to `T^n v` for every
//! `n >= 1`; every such vector is the co-projection `v - P_{[Tv]} v` of some
//! `v` onto the closure of `{Tv, T^2 v, ...}`. Here the projection is built
//! by a Krylov sweep with modified Gram-Schmidt, and certification checks the
//! residuals `|<v, T^n v>|` directly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::space::WeightSequence;

/// Largest matrix accepted by the laboratory.
pub const MAX_DIM: usize = 512;

/// `<a, b> = sum a_i conj(b_i)` (linear in the first slot).
fn inner(a: &CVec, b: &CVec) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// A dense operator with an optional catalog label.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    pub matrix: CMat,
    pub label: Option<String>,
}

impl OperatorSpec {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Precondition(format!(
                "operator matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 || matrix.nrows() > MAX_DIM {
            return Err(Error::Precondition(format!(
                "operator dimension {} outside 1..={}",
                matrix.nrows(),
                MAX_DIM
            )));
        }
        if !matrix.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Precondition("operator entries must be finite".into()));
        }
        Ok(OperatorSpec { matrix, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> OperatorSpec {
        OperatorSpec { matrix: self.matrix.adjoint(), label: self.label.clone() }
    }
}

/// Result of the Krylov co-projection `v - P_{[Tv]} v`.
#[derive(Clone, Debug)]
pub struct KrylovInner {
    pub vector: CVec,
    /// numerical rank of the Krylov family `{Tv, T^2 v, ...}`
    pub rank: usize,
    /// index at which the rank cut triggered, if it did
    pub rank_cut_index: Option<usize>,
    pub projection_norm: f64,
}

/// Orthonormalizes the Krylov family of `Tv` (modified Gram-Schmidt with one
/// reorthogonalization pass, rank cut at `tol * ||Tv||`) and subtracts the
/// projection of `v`. The result is `T`-inner or zero.
pub fn krylov_inner(t: &OperatorSpec, v: &CVec, tol: f64) -> Result<KrylovInner> {
    if v.norm() == 0.0 {
        return Err(Error::Precondition("krylov_inner requires v != 0".into()));
    }
    if v.len() != t.dim() {
        return Err(Error::Precondition(format!(
            "vector length {} does not match operator dimension {}",
            v.len(),
            t.dim()
        )));
    }
    let d = t.dim();
    let tv = &t.matrix * v;
    let cut = tol.max(f64::EPSILON) * tv.norm().max(f64::MIN_POSITIVE);

    let mut basis: Vec<CVec> = Vec::new();
    let mut raw = tv;
    let mut rank_cut_index = None;
    for step in 0..d {
        let mut u = raw.clone();
        for _ in 0..2 {
            for q in &basis {
                let coeff = inner(&u, q);
                u -= q * coeff;
            }
        }
        if u.norm() < cut {
            rank_cut_index = Some(step);
            break;
        }
        let nrm = u.norm();
        basis.push(u / Complex64::new(nrm, 0.0));
        raw = &t.matrix * &raw;
    }

    let mut projection = CVec::zeros(d);
    for q in &basis {
        projection += q * inner(v, q);
    }
    let vector = v - &projection;
    Ok(KrylovInner {
        vector,
        rank: basis.len(),
        rank_cut_index,
        projection_norm: projection.norm(),
    })
}

/// A vector with its inner-property residuals `|<v, T^n v>|`.
#[derive(Clone, Debug)]
pub struct InnerCandidate {
    pub vector: CVec,
    pub residuals: Vec<f64>,
    pub certified: bool,
    pub tol: f64,
}

/// Residuals `|<v, T^n v>|` for `n = 1..=n_max`; certified when all stay
/// below `tol`. In dimension `d` the first `d` residuals are decisive.
pub fn check_inner(t: &OperatorSpec, v: &CVec, n_max: usize, tol: f64) -> Result<InnerCandidate> {
    if v.norm() == 0.0 {
        return Err(Error::Precondition("check_inner requires v != 0".into()));
    }
    if v.len() != t.dim() {
        return Err(Error::Precondition(format!(
            "vector length {} does not match operator dimension {}",
            v.len(),
            t.dim()
        )));
    }
    let mut u = v.clone();
    let mut residuals = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        u = &t.matrix * &u;
        residuals.push(inner(v, &u).norm());
    }
    let certified = residuals.iter().all(|r| *r < tol);
    Ok(InnerCandidate { vector: v.clone(), residuals, certified, tol })
}

/// Whether `check_inner` for `T` and for its adjoint agree (they must:
/// `<v, T^n v> = <(T*)^n v, v>`).
pub fn adjoint_inner_check(t: &OperatorSpec, v: &CVec, n_max: usize, tol: f64) -> Result<bool> {
    let direct = check_inner(t, v, n_max, tol)?;
    let adjoint = check_inner(&t.adjoint(), v, n_max, tol)?;
    Ok(direct.certified == adjoint.certified)
}

/// Catalog of example operators.
#[derive(Clone, Debug)]
pub enum ExampleOperator {
    /// compressed shift on the polynomial model space: ones on the
    /// subdiagonal
    CompressedShift { dim: usize },
    /// its `power`-th power: ones on the `power`-th subdiagonal
    CompressedShiftPower { dim: usize, power: usize },
    /// multiplication by an analytic symbol, truncated: lower-triangular
    /// Toeplitz matrix of the symbol's Taylor coefficients
    ToeplitzTruncation { symbol: Vec<Complex64>, dim: usize },
    /// the shift on a diagonal space, unitarily represented as the weighted
    /// shift with subdiagonal `sqrt(lambda_{n+1}/lambda_n)`
    WeightedShift { space: WeightSequence, dim: usize },
}

pub fn make_example_operator(kind: ExampleOperator) -> Result<OperatorSpec> {
    match kind {
        ExampleOperator::CompressedShift { dim } => {
            make_example_operator(ExampleOperator::CompressedShiftPower { dim, power: 1 })
        }
        ExampleOperator::CompressedShiftPower { dim, power } => {
            if dim == 0 || dim > MAX_DIM {
                return Err(Error::Precondition(format!("dimension {} invalid", dim)));
            }
            if power == 0 {
                return Err(Error::Precondition("power must be >= 1".into()));
            }
            let mut m = CMat::zeros(dim, dim);
            for i in power..dim {
                m[(i, i - power)] = Complex64::new(1.0, 0.0);
            }
            Ok(OperatorSpec::new(m)?.with_label(format!("compressed_shift^{}({})", power, dim)))
        }
        ExampleOperator::ToeplitzTruncation { symbol, dim } => {
            if dim == 0 || dim > MAX_DIM {
                return Err(Error::Precondition(format!("dimension {} invalid", dim)));
            }
            if symbol.is_empty() {
                return Err(Error::Precondition("empty symbol".into()));
            }
            let mut m = CMat::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..=i {
                    let k = i - j;
                    if k < symbol.len() {
                        m[(i, j)] = symbol[k];
                    }
                }
            }
            Ok(OperatorSpec::new(m)?.with_label(format!("toeplitz({})", dim)))
        }
        ExampleOperator::WeightedShift { space, dim } => {
            if dim == 0 || dim > MAX_DIM {
                return Err(Error::Precondition(format!("dimension {} invalid", dim)));
            }
            let mut m = CMat::zeros(dim, dim);
            for i in 1..dim {
                let ratio = (space.weight(i) / space.weight(i - 1)).sqrt();
                m[(i, i - 1)] = Complex64::new(ratio, 0.0);
            }
            Ok(OperatorSpec::new(m)?.with_label(format!("weighted_shift[{}]({})", space, dim)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cvec(vals: &[(f64, f64)]) -> CVec {
        CVec::from_vec(vals.iter().map(|&(re, im)| c(re, im)).collect())
    }

    fn jordan(dim: usize) -> OperatorSpec {
        make_example_operator(ExampleOperator::CompressedShift { dim }).unwrap()
    }

    #[test]
    fn compressed_shift_matrix_layout() {
        let t = jordan(4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j + 1 { 1.0 } else { 0.0 };
                assert_eq!(t.matrix[(i, j)], c(expect, 0.0));
            }
        }
        let t2 = make_example_operator(ExampleOperator::CompressedShiftPower { dim: 4, power: 2 })
            .unwrap();
        assert_eq!(t2.matrix[(2, 0)], c(1.0, 0.0));
        assert_eq!(t2.matrix[(3, 1)], c(1.0, 0.0));
        assert_eq!(t2.matrix[(1, 0)], c(0.0, 0.0));
    }

    #[test]
    fn weighted_shift_hardy_is_plain_shift() {
        let t = make_example_operator(ExampleOperator::WeightedShift {
            space: WeightSequence::hardy(),
            dim: 3,
        })
        .unwrap();
        assert_eq!(t.matrix[(1, 0)], c(1.0, 0.0));
        assert_eq!(t.matrix[(2, 1)], c(1.0, 0.0));
    }

    #[test]
    fn jordan_basis_vectors_are_inner() {
        let t = jordan(5);
        for j in 0..5 {
            let mut v = CVec::zeros(5);
            v[j] = c(1.0, 0.0);
            let r = check_inner(&t, &v, 5, 1e-12).unwrap();
            assert!(r.certified, "e_{} must be inner", j);
        }
    }

    #[test]
    fn krylov_on_jordan_e0_is_identity() {
        let t = jordan(4);
        let mut v = CVec::zeros(4);
        v[0] = c(1.0, 0.0);
        let r = krylov_inner(&t, &v, 1e-12).unwrap();
        assert!((r.vector.clone() - v).norm() < 1e-12);
        assert_eq!(r.rank, 3);
        assert!(r.projection_norm < 1e-12);
    }

    #[test]
    fn kernel_vector_is_certified() {
        let t = jordan(4);
        let mut v = CVec::zeros(4);
        v[3] = c(0.7, -0.2); // Tv = 0
        let r = check_inner(&t, &v, 4, 1e-14).unwrap();
        assert!(r.certified);
        assert!(r.residuals.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn compressed_shift_squared_criterion() {
        // v is inner for the squared shift iff z3 conj(z1) + z4 conj(z2) = 0
        let t = make_example_operator(ExampleOperator::CompressedShiftPower { dim: 4, power: 2 })
            .unwrap();
        let v = cvec(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let r = check_inner(&t, &v, 4, 1e-12).unwrap();
        assert!(r.certified);
        let k = krylov_inner(&t, &v, 1e-12).unwrap();
        assert!((k.vector - v).norm() < 1e-12);

        let v = cvec(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let r = check_inner(&t, &v, 4, 1e-12).unwrap();
        assert!(!r.certified);
        assert!((r.residuals[0] - 1.0).abs() < 1e-12);
        let k = krylov_inner(&t, &v, 1e-12).unwrap();
        assert!(k.projection_norm > 0.1);
        // the co-projection is inner
        let again = check_inner(&t, &k.vector, 4, 1e-12).unwrap();
        assert!(again.certified);
        // and brute force agrees: projection of v onto span{Tv} (T^2 v = 0)
        let tv = &t.matrix * &v;
        let coeff = inner(&v, &tv) / inner(&tv, &tv);
        let brute = &v - tv * coeff;
        assert!((k.vector - brute).norm() < 1e-12);
    }

    #[test]
    fn krylov_is_idempotent() {
        let t = make_example_operator(ExampleOperator::CompressedShiftPower { dim: 6, power: 2 })
            .unwrap();
        let v = cvec(&[(0.4, 0.1), (0.2, -0.3), (1.0, 0.0), (0.0, 0.5), (0.3, 0.3), (-0.2, 0.1)]);
        let first = krylov_inner(&t, &v, 1e-12).unwrap();
        let second = krylov_inner(&t, &first.vector, 1e-12).unwrap();
        assert!((second.vector - &first.vector).norm() < 1e-12);
        assert!(second.projection_norm < 1e-12);
    }

    #[test]
    fn linear_polynomials_are_squared_shift_inner() {
        // f = a + b z against the square of the Hardy shift, truncated
        let t = make_example_operator(ExampleOperator::WeightedShift {
            space: WeightSequence::hardy(),
            dim: 61,
        })
        .unwrap();
        let t2 = OperatorSpec::new(&t.matrix * &t.matrix).unwrap();
        let mut v = CVec::zeros(61);
        v[0] = c(1.0, 0.0);
        v[1] = c(1.0, 0.0);
        let r = check_inner(&t2, &v, 30, 1e-13).unwrap();
        assert!(r.certified);
    }

    #[test]
    fn adjoint_agreement() {
        let t = make_example_operator(ExampleOperator::CompressedShiftPower { dim: 4, power: 2 })
            .unwrap();
        let inner_v = cvec(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let not_inner = cvec(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert!(adjoint_inner_check(&t, &inner_v, 4, 1e-12).unwrap());
        assert!(adjoint_inner_check(&t, &not_inner, 4, 1e-12).unwrap());
    }

    #[test]
    fn toeplitz_blaschke_symbol_inner_function() {
        // symbol phi = (z - a)/(1 - a z), candidate v = 1/(1 - a z): the
        // multiplication-operator inner functions are j(z)/(1 - conj(w) z);
        // truncation residuals shrink as the dimension grows
        let a = 0.5_f64;
        let run = |dim: usize| {
            // phi coefficients: -a + (1 - a^2) sum_{k>=1} a^{k-1} z^k
            let mut symbol = vec![c(-a, 0.0)];
            for k in 1..dim {
                symbol.push(c((1.0 - a * a) * a.powi(k as i32 - 1), 0.0));
            }
            let t =
                make_example_operator(ExampleOperator::ToeplitzTruncation { symbol, dim }).unwrap();
            let v = CVec::from_fn(dim, |k, _| c(a.powi(k as i32), 0.0));
            let r = check_inner(&t, &v, 12, 1e-3).unwrap();
            r.residuals.iter().cloned().fold(0.0, f64::max)
        };
        // truncation error decays geometrically with the dimension
        let coarse = run(16);
        let fine = run(200);
        assert!(fine < 1e-6, "dim 200: worst residual {}", fine);
        assert!(fine < coarse, "{} vs {}", fine, coarse);
    }

    #[test]
    fn orthogonality_characterization() {
        // certified pairs satisfy ||v + alpha T^n v|| >= ||v||
        let t = make_example_operator(ExampleOperator::CompressedShiftPower { dim: 4, power: 2 })
            .unwrap();
        let v = cvec(&[(1.0, 0.0), (0.5, 0.2), (0.04, 0.2), (0.1, -0.22)]);
        // make it inner first
        let v = krylov_inner(&t, &v, 1e-13).unwrap().vector;
        let tv = &t.matrix * &v;
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..1000 {
            let alpha = c(10.0 * next(), 10.0 * next());
            let sum = &v + &tv * alpha;
            assert!(sum.norm() >= v.norm() - 1e-12);
        }
    }

    #[test]
    fn invalid_inputs_rejected() {
        let t = jordan(3);
        let zero = CVec::zeros(3);
        assert!(check_inner(&t, &zero, 3, 1e-12).is_err());
        assert!(krylov_inner(&t, &zero, 1e-12).is_err());
        let wrong_len = CVec::zeros(4);
        assert!(check_inner(&t, &wrong_len, 3, 1e-12).is_err());
        assert!(OperatorSpec::new(CMat::zeros(2, 3)).is_err());
    }
}
