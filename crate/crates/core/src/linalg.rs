//! Dense complex linear algebra used by the Gram machinery.
//!
//! Gram matrices of nearby kernels are ill-conditioned, so the solver is a
//! diagonally pivoted Cholesky factorization with explicit pivot tracking;
//! determinants are accumulated in log space from the pivots.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// `P A P^T = L L^H` for Hermitian positive definite `A`, with diagonal
/// pivoting (largest remaining diagonal first).
pub struct PivotedCholesky {
    /// permutation: row `k` of the factor corresponds to node `perm[k]`
    pub perm: Vec<usize>,
    /// lower-triangular factor in permuted order
    pub factor: CMat,
    /// squared diagonal entries `|L_kk|^2`, in factorization order
    pub pivots: Vec<f64>,
}

/// Failure data: the step at which the pivot collapsed and the earlier node
/// most correlated with it.
#[derive(Debug)]
pub struct DegeneracyInfo {
    pub failing: usize,
    pub partner: usize,
    pub pivot_ratio: f64,
}

impl PivotedCholesky {
    /// `rel_tol` is the pivot cutoff relative to the largest pivot seen.
    pub fn new(a: &CMat, rel_tol: f64) -> Result<Self, DegeneracyInfo> {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        let mut work = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut l = CMat::zeros(n, n);
        let mut pivots = Vec::with_capacity(n);
        let mut max_pivot = 0.0_f64;

        for k in 0..n {
            // select the largest remaining diagonal entry
            let (mut best, mut best_val) = (k, work[(k, k)].re);
            for j in k + 1..n {
                if work[(j, j)].re > best_val {
                    best = j;
                    best_val = work[(j, j)].re;
                }
            }
            if best != k {
                work.swap_rows(k, best);
                work.swap_columns(k, best);
                l.swap_rows(k, best);
                perm.swap(k, best);
            }

            let d = work[(k, k)].re;
            max_pivot = max_pivot.max(d.max(0.0));
            if !(d > 0.0) || (max_pivot > 0.0 && d < rel_tol * max_pivot) {
                let info = Self::degeneracy(a, &perm, k, d / max_pivot.max(f64::MIN_POSITIVE));
                return Err(info);
            }
            pivots.push(d);
            let dk = d.sqrt();
            l[(k, k)] = Complex64::new(dk, 0.0);
            for i in k + 1..n {
                l[(i, k)] = work[(i, k)] / dk;
            }
            // full Hermitian update of the trailing block so later symmetric
            // pivot swaps stay consistent
            for j in k + 1..n {
                for i in k + 1..n {
                    let delta = l[(i, k)] * l[(j, k)].conj();
                    work[(i, j)] -= delta;
                }
                work[(j, j)] = Complex64::new(work[(j, j)].re, 0.0);
            }
        }

        Ok(PivotedCholesky { perm, factor: l, pivots })
    }

    fn degeneracy(a: &CMat, perm: &[usize], step: usize, pivot_ratio: f64) -> DegeneracyInfo {
        let failing = perm[step];
        // earlier node with the highest normalized correlation to the failing one
        let mut partner = perm[0];
        let mut best = -1.0;
        for &j in &perm[..step] {
            let denom = (a[(failing, failing)].re * a[(j, j)].re).sqrt();
            let corr = if denom > 0.0 {
                a[(failing, j)].norm() / denom
            } else {
                0.0
            };
            if corr > best {
                best = corr;
                partner = j;
            }
        }
        DegeneracyInfo { failing, partner, pivot_ratio }
    }

    /// Solves `A x = b` through the permuted factor.
    pub fn solve(&self, b: &CVec) -> CVec {
        let n = self.perm.len();
        let mut y = CVec::zeros(n);
        // forward: L y = P b
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.factor[(i, j)] * y[j];
            }
            y[i] = s / self.factor[(i, i)];
        }
        // backward: L^H z = y
        let mut z = CVec::zeros(n);
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.factor[(j, i)].conj() * z[j];
            }
            z[i] = s / self.factor[(i, i)].conj();
        }
        // undo permutation
        let mut x = CVec::zeros(n);
        for i in 0..n {
            x[self.perm[i]] = z[i];
        }
        x
    }

    /// `ln det A`, from the pivot products.
    pub fn log_det(&self) -> f64 {
        self.pivots.iter().map(|p| p.ln()).sum()
    }

    /// Cheap spectral condition estimate (a lower bound on the true condition
    /// number): ratio of extreme pivots.
    pub fn condition_estimate(&self) -> f64 {
        let max = self.pivots.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.pivots.iter().cloned().fold(f64::MAX, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

/// `(ln |det A|, phase)` by partial-pivot LU; phase has unit modulus and
/// carries the permutation sign. Returns `(-inf, 0)` for an exactly singular
/// matrix.
pub fn lu_logdet(a: &CMat) -> (f64, Complex64) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut log_abs = 0.0_f64;
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut p = k;
        let mut best = m[(k, k)].norm();
        for i in k + 1..n {
            if m[(i, k)].norm() > best {
                best = m[(i, k)].norm();
                p = i;
            }
        }
        if best == 0.0 {
            return (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
        }
        if p != k {
            m.swap_rows(p, k);
            phase = -phase;
        }
        let piv = m[(k, k)];
        log_abs += piv.norm().ln();
        phase *= piv / piv.norm();
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            m[(i, k)] = f;
            for j in k + 1..n {
                let delta = f * m[(k, j)];
                m[(i, j)] -= delta;
            }
        }
    }
    (log_abs, phase)
}

/// Minimum eigenvalue of a Hermitian matrix via the real symmetric embedding
/// `[[Re A, -Im A], [Im A, Re A]]`, whose spectrum is that of `A` doubled.
pub fn hermitian_min_eig(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)];
            m[(i, j)] = v.re;
            m[(i, j + n)] = -v.im;
            m[(i + n, j)] = v.im;
            m[(i + n, j + n)] = v.re;
        }
    }
    // enforce exact symmetry against roundoff in the caller's matrix
    let m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigenvalues();
    eig.iter().cloned().fold(f64::MAX, f64::min)
}

/// Largest singular value of `M`, by power iteration on `M^H M`.
/// Deterministic start; the estimate is a monotone-from-below limit of
/// Rayleigh quotients.
pub fn top_singular_value(m: &CMat, rel_tol: f64, max_iter: usize) -> f64 {
    let n = m.ncols();
    let mut x = CVec::from_fn(n, |i, _| {
        Complex64::new(1.0 + 0.3 * ((i + 1) as f64).sin(), 0.1 * ((i + 1) as f64).cos())
    });
    x /= Complex64::new(x.norm(), 0.0);
    let mut prev = 0.0_f64;
    let mut sigma = 0.0_f64;
    for _ in 0..max_iter {
        let y = m * &x; // ||y|| -> sigma_max since ||x|| = 1
        sigma = y.norm();
        if sigma == 0.0 {
            return 0.0;
        }
        let mut z = m.adjoint() * y;
        let norm = z.norm();
        if norm == 0.0 {
            return sigma;
        }
        z /= Complex64::new(norm, 0.0);
        x = z;
        if (sigma - prev).abs() <= rel_tol * sigma.max(1e-300) {
            return sigma;
        }
        prev = sigma;
    }
    sigma
}
