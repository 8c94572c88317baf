//! Inner functions in `l^p` coefficient spaces, `1 < p < infinity`, via
//! Birkhoff-James orthogonality.
//!
//! `f` is orthogonal to `g` when `sum |a_k|^{p-2} conj(a_k) b_k = 0`; the
//! metric projection onto a finite span is computed by smooth convex descent,
//! and first-order optimality of the objective `sum |r_k|^p` is exactly the
//! orthogonality of the co-projection to the span, so the stopping rule is
//! the certificate itself.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inner::ZeroConfig;
use crate::linalg::{CMat, CVec, PivotedCholesky};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A finite coefficient sequence with its exponent.
#[derive(Clone, Debug)]
pub struct LpSeries {
    coeffs: Vec<Complex64>,
    p: f64,
}

impl LpSeries {
    pub fn new(coeffs: Vec<Complex64>, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Precondition(format!(
                "exponent p = {} must lie in (1, inf) for a smooth, uniformly convex space",
                p
            )));
        }
        if !coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
        {
            return Err(Error::Precondition("coefficients must be finite".into()));
        }
        Ok(LpSeries { coeffs, p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        lp_norm(&self.coeffs, self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// The series multiplied by `z^m`, truncated/padded to length `len`.
    pub fn shift(&self, m: usize, len: usize) -> LpSeries {
        let mut out = vec![ZERO; len];
        for (k, c) in self.coeffs.iter().enumerate() {
            if k + m < len {
                out[k + m] = *c;
            }
        }
        LpSeries { coeffs: out, p: self.p }
    }
}

fn lp_norm(coeffs: &[Complex64], p: f64) -> f64 {
    coeffs
        .iter()
        .map(|c| c.norm().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Conjugate exponent `q = p/(p-1)`.
pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

/// The dual-side companion of a series: coefficients paired bilinearly,
/// `l(f) = sum f_k l_k`, measured in the conjugate exponent.
#[derive(Clone, Debug)]
pub struct DualSeries {
    pub coeffs: Vec<Complex64>,
    pub q: f64,
}

impl DualSeries {
    /// Bilinear duality action.
    pub fn apply(&self, f: &LpSeries) -> Complex64 {
        f.coeffs
            .iter()
            .zip(self.coeffs.iter())
            .map(|(a, l)| a * l)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        lp_norm(&self.coeffs, self.q)
    }
}

/// `sum_k |a_k|^{p-2} conj(a_k) b_k`; zero exactly when `f` is Birkhoff-James
/// orthogonal to `g`. Terms with `a_k = 0` contribute nothing.
pub fn bj_residual(f: &LpSeries, g: &LpSeries) -> Result<Complex64> {
    if (f.p - g.p).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "mixed exponents {} and {}",
            f.p, g.p
        )));
    }
    if f.is_zero() {
        return Err(Error::Precondition(
            "Birkhoff-James orthogonality is undefined from the zero vector".into(),
        ));
    }
    Ok(bj_residual_raw(&f.coeffs, &g.coeffs, f.p))
}

fn bj_residual_raw(a: &[Complex64], b: &[Complex64], p: f64) -> Complex64 {
    let mut acc = ZERO;
    for (ak, bk) in a.iter().zip(b.iter()) {
        let m = ak.norm();
        if m > 0.0 {
            acc += m.powf(p - 2.0) * ak.conj() * bk;
        }
    }
    acc
}

/// The unique norming functional `l_f` of a nonzero `f`:
/// `l_k = |a_k|^{p-2} conj(a_k) / ||f||^{p-1}`, with `l(f) = ||f||` and
/// `||l||_q = 1` certified to 1e-12 relative.
pub fn norming_functional(f: &LpSeries) -> Result<DualSeries> {
    if f.is_zero() {
        return Err(Error::Precondition(
            "the zero vector has no norming functional".into(),
        ));
    }
    let nrm = f.norm();
    let scale = nrm.powf(f.p - 1.0);
    let coeffs: Vec<Complex64> = f
        .coeffs
        .iter()
        .map(|a| {
            let m = a.norm();
            if m > 0.0 {
                m.powf(f.p - 2.0) * a.conj() / scale
            } else {
                ZERO
            }
        })
        .collect();
    let dual = DualSeries { coeffs, q: conjugate_exponent(f.p) };
    let action = dual.apply(f);
    if (action - Complex64::new(nrm, 0.0)).norm() > 1e-12 * nrm.max(1.0)
        || (dual.norm() - 1.0).abs() > 1e-12
    {
        return Err(Error::CertificationFailed {
            context: "norming functional",
            index: 0,
            residual: (action - Complex64::new(nrm, 0.0)).norm().max((dual.norm() - 1.0).abs()),
            tol: 1e-12,
        });
    }
    Ok(dual)
}

/// Outcome of a metric projection.
#[derive(Clone, Debug)]
pub struct Projection {
    /// coefficients of the minimizer over the basis
    pub beta: Vec<Complex64>,
    /// `f - sum beta_j basis_j`
    pub residual: LpSeries,
    /// `|bj_residual(residual, basis_j)|` for each basis element
    pub bj_residuals: Vec<f64>,
    pub iterations: usize,
}

struct DescentProblem<'a> {
    target: &'a [Complex64],
    basis: &'a [Vec<Complex64>],
    p: f64,
    len: usize,
}

impl DescentProblem<'_> {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn residual_coeffs(&self, beta: &[Complex64]) -> Vec<Complex64> {
        let mut r = self.target.to_vec();
        for (b, col) in beta.iter().zip(self.basis.iter()) {
            for (rk, ck) in r.iter_mut().zip(col.iter()) {
                *rk -= b * ck;
            }
        }
        r
    }

    fn objective(&self, r: &[Complex64]) -> f64 {
        r.iter().map(|c| c.norm().powf(self.p)).sum()
    }

    /// Orthogonality defects `R_j = sum_k |r_k|^{p-2} conj(r_k) basis_{j,k}`;
    /// the real gradient of the objective in `(Re beta_j, Im beta_j)` is
    /// `(-p Re R_j, +p Im R_j)`.
    fn defects(&self, r: &[Complex64]) -> Vec<Complex64> {
        // weights |r_k|^{p-2} conj(r_k) shared across basis columns
        let w: Vec<Complex64> = r
            .iter()
            .map(|rk| {
                let m = rk.norm();
                if m > 0.0 {
                    m.powf(self.p - 2.0) * rk.conj()
                } else {
                    ZERO
                }
            })
            .collect();
        self.basis
            .iter()
            .map(|col| col.iter().zip(w.iter()).map(|(c, wk)| wk * c).sum())
            .collect()
    }
}

/// Least-squares warm start: the `p = 2` projection through the normal
/// equations of the basis Gram matrix.
fn least_squares_start(problem: &DescentProblem) -> Result<Vec<Complex64>> {
    let m = problem.m();
    let mut gram = CMat::zeros(m, m);
    let mut rhs = CVec::zeros(m);
    for i in 0..m {
        for j in 0..=i {
            let v: Complex64 = problem.basis[j]
                .iter()
                .zip(problem.basis[i].iter())
                .map(|(bj, bi)| bj * bi.conj())
                .sum();
            gram[(i, j)] = v;
            gram[(j, i)] = v.conj();
        }
        rhs[i] = problem.basis[i]
            .iter()
            .zip(problem.target.iter())
            .map(|(b, t)| t * b.conj())
            .sum();
    }
    let factor = PivotedCholesky::new(&gram, 1e-14).map_err(|_| {
        Error::Precondition("metric projection requires a linearly independent basis".into())
    })?;
    let beta = factor.solve(&rhs);
    Ok(beta.iter().cloned().collect())
}

/// One weighted-least-squares step: solves the normal equations of
/// `min sum_k w_k |f_k - (B beta)_k|^2`. The pivot cutoff is permissive: the
/// step only steers the descent, and ill-conditioning is paid for with a
/// shorter accepted step, not a wrong answer.
fn weighted_least_squares(problem: &DescentProblem, w: &[f64]) -> Option<Vec<Complex64>> {
    let m = problem.m();
    let mut gram = CMat::zeros(m, m);
    let mut rhs = CVec::zeros(m);
    for i in 0..m {
        for j in 0..=i {
            let v: Complex64 = problem.basis[i]
                .iter()
                .zip(problem.basis[j].iter())
                .zip(w.iter())
                .map(|((bi, bj), wk)| bi.conj() * bj * *wk)
                .sum();
            gram[(i, j)] = v;
            gram[(j, i)] = v.conj();
        }
        rhs[i] = problem.basis[i]
            .iter()
            .zip(problem.target.iter())
            .zip(w.iter())
            .map(|((b, t), wk)| t * b.conj() * *wk)
            .sum();
    }
    let factor = PivotedCholesky::new(&gram, 1e-240).ok()?;
    Some(factor.solve(&rhs).iter().cloned().collect())
}

/// Metric projection of `f` onto the complex span of `basis` by damped
/// iteratively-reweighted least squares: each step solves the Gauss-Newton
/// normal equations with weights `|r_k|^{p-2}` (regularized from below while
/// far from the optimum), with a backtracking step between iterates. The
/// fixed point of the iteration is exactly the Birkhoff-James condition, and
/// convergence is declared when every orthogonality defect falls below
/// `tol` - the certificate, not the iterate path, is the acceptance test.
pub fn metric_project(f: &LpSeries, basis: &[LpSeries], tol: f64) -> Result<Projection> {
    if basis.is_empty() {
        return Err(Error::Precondition("empty projection basis".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let len = basis
        .iter()
        .map(|b| b.coeffs.len())
        .chain([f.coeffs.len()])
        .max()
        .unwrap();
    for b in basis {
        if (b.p - f.p).abs() > 1e-12 {
            return Err(Error::Precondition("basis exponent differs from target".into()));
        }
    }
    let p = f.p;
    let mut target = f.coeffs.clone();
    target.resize(len, ZERO);
    let cols: Vec<Vec<Complex64>> = basis
        .iter()
        .map(|b| {
            let mut c = b.coeffs.clone();
            c.resize(len, ZERO);
            c
        })
        .collect();
    let problem = DescentProblem { target: &target, basis: &cols, p, len };
    let _ = problem.len;

    let beta0 = least_squares_start(&problem)?;
    let finish = |beta: Vec<Complex64>, iterations: usize| -> Projection {
        let r = problem.residual_coeffs(&beta);
        let defects = problem.defects(&r);
        Projection {
            beta,
            residual: LpSeries { coeffs: r, p },
            bj_residuals: defects.iter().map(|d| d.norm()).collect(),
            iterations,
        }
    };

    if (p - 2.0).abs() < 1e-14 {
        // the warm start is the exact minimizer
        return Ok(finish(beta0, 0));
    }

    let max_iter = 600;
    let mut beta = beta0;
    let mut r = problem.residual_coeffs(&beta);
    let mut fx = problem.objective(&r);
    let worst_defect =
        |r: &[Complex64]| -> f64 { problem.defects(r).iter().map(|d| d.norm()).fold(0.0, f64::max) };
    // weight regularization floor, tightened as the iteration proceeds;
    // keeps the normal matrix definite for p > 2 (vanishing weights) and the
    // weights finite for p < 2 (exploding weights)
    let mut floor = 1e-2;
    let mut stalls = 0;
    let mut descent_phase = true;
    for iter in 0..max_iter {
        let worst = worst_defect(&r);
        if worst <= tol {
            return Ok(finish(beta, iter));
        }

        let r_scale = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = (floor * r_scale).max(1e-300);
        let w: Vec<f64> = r.iter().map(|rk| rk.norm().max(cut).powf(p - 2.0)).collect();
        let proposal = match weighted_least_squares(&problem, &w) {
            Some(q) => q,
            None => {
                // weighted system collapsed at this regularization; relax it
                floor = (floor * 1e4).min(0.5);
                stalls += 1;
                if stalls > 20 {
                    break;
                }
                continue;
            }
        };

        // Backtrack along the segment toward the reweighted minimizer.
        // While the objective still decreases measurably that is the merit;
        // once a whole ladder of step sizes fails to move it (floating
        // granularity reached) the remaining contraction is steered by the
        // orthogonality defect, constrained to a non-increasing objective so
        // the two merits cannot trade places and cycle.
        let mut t = 1.0;
        let mut advanced = false;
        for _ in 0..24 {
            let trial: Vec<Complex64> = beta
                .iter()
                .zip(proposal.iter())
                .map(|(b, q)| b + (q - b) * t)
                .collect();
            let r_trial = problem.residual_coeffs(&trial);
            let f_trial = problem.objective(&r_trial);
            let accept = if descent_phase {
                f_trial < fx * (1.0 - 1e-12)
            } else {
                f_trial <= fx * (1.0 + 1e-9) && worst_defect(&r_trial) < worst
            };
            if accept {
                beta = trial;
                r = r_trial;
                fx = f_trial;
                advanced = true;
                break;
            }
            t *= 0.5;
        }
        if advanced {
            stalls = 0;
            floor *= 0.25;
        } else if descent_phase {
            // objective converged to granularity; latch to defect contraction
            descent_phase = false;
        } else {
            stalls += 1;
            floor *= 1e-3;
            if floor < 1e-290 && stalls > 4 {
                break;
            }
        }
    }

    let defects = problem.defects(&r);
    let residuals: Vec<f64> = defects.iter().map(|d| d.norm()).collect();
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    Err(Error::ProjectionDiverged {
        iterations: max_iter,
        residual: worst,
        last_iterate: beta,
        residuals,
    })
}

/// Report of an `l^p` inner-function solve.
#[derive(Clone, Debug)]
pub struct LpInnerReport {
    pub j: LpSeries,
    pub norm: f64,
    pub bj_residual_max: f64,
    /// multiplier degree at which the norm stabilized
    pub multiplier_degree: usize,
    pub iterations: usize,
}

/// The inner function of a zero configuration in `l^p`: `J = f - P f` with
/// `P` the metric projection onto `span{z f, ..., z^D f}`, where `D` doubles
/// until `||J||_p` changes by less than `tol` (the projections converge in
/// norm as the subspace grows).
pub fn lp_inner_function(
    p: f64,
    points: &[Complex64],
    multiplier_degree: usize,
    tol: f64,
) -> Result<LpInnerReport> {
    let config = ZeroConfig::from_points(points)?;
    let f_poly = config.poly_coeffs();
    let deg_f = f_poly.len() - 1;
    let mut d = multiplier_degree.max(deg_f + 8);
    let cap = 1024;
    let f = LpSeries::new(f_poly, p)?;

    let solve_at = |d: usize| -> Result<(Projection, f64)> {
        let len = deg_f + d + 1;
        let basis: Vec<LpSeries> = (1..=d).map(|m| f.shift(m, len)).collect();
        let proj = metric_project(&f, &basis, tol.min(1e-9))?;
        let norm = proj.residual.norm();
        Ok((proj, norm))
    };

    let (_, mut norm) = solve_at(d)?;
    loop {
        if 2 * d > cap {
            return Err(Error::NonConvergence {
                context: "lp_inner_function multiplier doubling",
                detail: format!("norm not stabilized at degree {}", d),
            });
        }
        let (proj2, norm2) = solve_at(2 * d)?;
        if norm2 > norm + 1e-9 {
            return Err(Error::CertificationFailed {
                context: "projection monotonicity in the multiplier degree",
                index: 2 * d,
                residual: norm2 - norm,
                tol: 1e-9,
            });
        }
        if (norm - norm2).abs() < tol {
            let bj_residual_max = proj2.bj_residuals.iter().cloned().fold(0.0, f64::max);
            return Ok(LpInnerReport {
                j: proj2.residual,
                norm: norm2,
                bj_residual_max,
                multiplier_degree: 2 * d,
                iterations: proj2.iterations,
            });
        }
        d *= 2;
        norm = norm2;
        let _ = proj2;
    }
}

/// Closed form of the one-point `l^p` inner function with zero `w`,
/// normalized to `J(0) = 1` and truncated at `degree`:
/// the Birkhoff-James conditions force the geometric recursion
/// `psi_p(J_{m+1}) = w psi_p(J_m)` with `psi_p(u) = |u|^{p-2} conj(u)`, so
/// `J_k = J_1 c^{k-1}` with ratio `c = conj(w) |w|^{q-2}` built from the
/// conjugate exponent `q`, and `J_1 = -(1 - |w|^q)/w`.
pub fn lp_one_point_inner(p: f64, w: Complex64, degree: usize) -> Result<LpSeries> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Precondition(format!("exponent p = {} outside (1, inf)", p)));
    }
    if !(w.norm() < 1.0) {
        return Err(Error::OutsideDisk(w));
    }
    if w.norm() == 0.0 {
        return Err(Error::ZeroAtOrigin);
    }
    let q = conjugate_exponent(p);
    let ratio = w.conj() * w.norm().powf(q - 2.0);
    let j1 = -(1.0 - w.norm().powf(q)) / w;
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(Complex64::new(1.0, 0.0));
    let mut term = j1;
    for _ in 1..=degree {
        coeffs.push(term);
        term *= ratio;
    }
    LpSeries::new(coeffs, p)
}

/// `||J_n||` through the dual side:
/// `||J_n|| = [inf ||k_0 + b_1 k_1 + ... + b_n k_n||_q]^{-1}` where `k_j` is
/// the evaluation functional at `w_j` truncated to degree `D`.
pub fn dual_infimum_norm(
    p: f64,
    points: &[Complex64],
    degree: usize,
    tol: f64,
) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Precondition(format!("exponent p = {} outside (1, inf)", p)));
    }
    let q = conjugate_exponent(p);
    let len = degree + 1;
    let mut e0 = vec![ZERO; len];
    e0[0] = Complex64::new(1.0, 0.0);
    let k0 = LpSeries::new(e0, q)?;
    if points.is_empty() {
        return Ok(1.0);
    }
    // validate the points as a zero configuration (in-disk, nonzero)
    let _ = ZeroConfig::from_points(points)?;
    let basis: Vec<LpSeries> = points
        .iter()
        .map(|w| {
            let mut col = Vec::with_capacity(len);
            let mut pw = Complex64::new(1.0, 0.0);
            for _ in 0..len {
                col.push(pw);
                pw *= w;
            }
            LpSeries::new(col, q)
        })
        .collect::<Result<_>>()?;
    let proj = metric_project(&k0, &basis, tol.min(1e-9))?;
    let min_norm = proj.residual.norm();
    if !(min_norm > 0.0) {
        return Err(Error::NonConvergence {
            context: "dual infimum",
            detail: "minimum collapsed to zero".into(),
        });
    }
    Ok(1.0 / min_norm)
}

/// `||J_n||_p` for every prefix of the point list; nondecreasing by the
/// zero-set theorem, enforced to 1e-8.
pub fn lp_zero_set_trace(
    p: f64,
    points: &[Complex64],
    n_max: usize,
    multiplier_degree: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let n_use = points.len().min(n_max.max(1));
    let mut norms = Vec::with_capacity(n_use);
    for n in 1..=n_use {
        let rep = lp_inner_function(p, &points[..n], multiplier_degree, tol)?;
        if let Some(&prev) = norms.last() {
            if rep.norm < prev - 1e-8 {
                return Err(Error::CertificationFailed {
                    context: "lp norm monotonicity",
                    index: n,
                    residual: prev - rep.norm,
                    tol: 1e-8,
                });
            }
        }
        norms.push(rep.norm);
    }
    Ok(norms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn series(vals: &[(f64, f64)], p: f64) -> LpSeries {
        LpSeries::new(vals.iter().map(|&(re, im)| c(re, im)).collect(), p).unwrap()
    }

    #[test]
    fn bj_disjoint_supports() {
        // z^2 against z^5
        let f = series(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], 3.0);
        let g = series(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], 3.0);
        assert_eq!(bj_residual(&f, &g).unwrap(), ZERO);
    }

    #[test]
    fn bj_p2_is_hermitian_product() {
        let f = series(&[(1.0, 2.0), (0.5, -0.25)], 2.0);
        let g = series(&[(-0.5, 0.1), (0.2, 0.3)], 2.0);
        let r = bj_residual(&f, &g).unwrap();
        let expect = f.coeffs()[0].conj() * g.coeffs()[0] + f.coeffs()[1].conj() * g.coeffs()[1];
        assert!((r - expect).norm() < 1e-15);
    }

    #[test]
    fn bj_rejects_zero_and_mixed_exponents() {
        let z = series(&[(0.0, 0.0)], 3.0);
        let g = series(&[(1.0, 0.0)], 3.0);
        assert!(bj_residual(&z, &g).is_err());
        let f3 = series(&[(1.0, 0.0)], 3.0);
        let g4 = series(&[(1.0, 0.0)], 4.0);
        assert!(bj_residual(&f3, &g4).is_err());
    }

    #[test]
    fn norming_functional_examples() {
        // p = 2: Hilbert self-duality
        let f = series(&[(3.0, 0.0), (4.0, 0.0)], 2.0);
        let l = norming_functional(&f).unwrap();
        assert!((l.coeffs[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((l.coeffs[1] - c(0.8, 0.0)).norm() < 1e-15);

        // p = 4, f = (1,1): l = (1,1)/2^{3/4}
        let f = series(&[(1.0, 0.0), (1.0, 0.0)], 4.0);
        let l = norming_functional(&f).unwrap();
        let expect = 1.0 / 2.0_f64.powf(0.75);
        assert!((l.coeffs[0] - c(expect, 0.0)).norm() < 1e-14);

        // monomial: dual monomial of unit norm
        let f = series(&[(0.0, 0.0), (0.0, 0.0), (2.0, 1.0)], 3.0);
        let l = norming_functional(&f).unwrap();
        assert!((l.norm() - 1.0).abs() < 1e-12);
        assert!(l.coeffs[0].norm() == 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = 2.7;
        let target = vec![c(1.0, 0.2), c(-0.4, 0.7), c(0.3, -0.3), c(0.05, 0.0)];
        let cols = vec![
            vec![c(0.2, 0.1), c(1.0, 0.0), c(-0.3, 0.4), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, -0.2), c(0.9, 0.0), c(0.1, 0.1)],
        ];
        let problem = DescentProblem { target: &target, basis: &cols, p, len: 4 };
        let beta = vec![c(0.3, -0.1), c(-0.2, 0.25)];
        let r = problem.residual_coeffs(&beta);
        let defects = problem.defects(&r);
        let h = 1e-7;
        for j in 0..2 {
            for (im, expect) in [(false, -p * defects[j].re), (true, p * defects[j].im)] {
                let mut bp = beta.clone();
                let mut bm = beta.clone();
                if im {
                    bp[j] += c(0.0, h);
                    bm[j] -= c(0.0, h);
                } else {
                    bp[j] += c(h, 0.0);
                    bm[j] -= c(h, 0.0);
                }
                let fp = problem.objective(&problem.residual_coeffs(&bp));
                let fm = problem.objective(&problem.residual_coeffs(&bm));
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (fd - expect).abs() < 1e-5 * (1.0 + expect.abs()),
                    "j={} im={}: fd {} vs {}",
                    j,
                    im,
                    fd,
                    expect
                );
            }
        }
    }

    #[test]
    fn projection_onto_higher_shifts_is_zero() {
        // f = z^2 against {z^3, z^4, z^5}: coordinates separate
        for p in [1.5, 2.0, 3.0] {
            let len = 7;
            let f = series(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], p);
            let basis: Vec<LpSeries> = (3..6)
                .map(|m| {
                    let mut cvec = vec![ZERO; len];
                    cvec[m] = c(1.0, 0.0);
                    LpSeries::new(cvec, p).unwrap()
                })
                .collect();
            let proj = metric_project(&f, &basis, 1e-11).unwrap();
            for b in &proj.beta {
                assert!(b.norm() < 1e-9, "p={}: beta {}", p, b);
            }
        }
    }

    #[test]
    fn one_dimensional_p4_projection_matches_golden_section() {
        // f = 1 - 2z onto span{z f}: frozen from an independent golden-section
        // minimization of (1 + |-2-b|^4 + |2b|^4)^{1/4} over real b
        let f = series(&[(1.0, 0.0), (-2.0, 0.0)], 4.0);
        let basis = vec![f.shift(1, 3)];
        let proj = metric_project(&f, &basis, 1e-12).unwrap();
        assert!(
            (proj.beta[0] - c(-0.5682073068332999, 0.0)).norm() < 1e-8,
            "beta = {}",
            proj.beta[0]
        );
        assert!((proj.residual.norm() - 1.6189971644155832).abs() < 1e-9);

        // in-test golden-section oracle, independent of the descent path
        let obj = |b: f64| -> f64 {
            (1.0 + (-2.0 - b).abs().powi(4) + (2.0 * b).abs().powi(4)).powf(0.25)
        };
        let (mut a, mut b) = (-2.0, 1.0);
        let gr = (5.0_f64.sqrt() - 1.0) / 2.0;
        for _ in 0..120 {
            let d = b - gr * (b - a);
            let e = a + gr * (b - a);
            if obj(d) < obj(e) {
                b = e;
            } else {
                a = d;
            }
        }
        let bstar = 0.5 * (a + b);
        assert!((proj.beta[0].re - bstar).abs() < 1e-7);
    }

    #[test]
    fn p2_matches_hardy_inner_function() {
        // J = (1 - 2z)/(1 - 0.5 z): Taylor 1, -1.5 * 0.5^{k-1}
        let rep = lp_inner_function(2.0, &[c(0.5, 0.0)], 40, 1e-10).unwrap();
        assert!((rep.norm - 2.0).abs() < 1e-8, "norm {}", rep.norm);
        let coeffs = rep.j.coeffs();
        assert!((coeffs[0] - c(1.0, 0.0)).norm() < 1e-8);
        for k in 1..10 {
            let expect = -1.5 * 0.5_f64.powi(k as i32 - 1);
            assert!(
                (coeffs[k] - c(expect, 0.0)).norm() < 1e-8,
                "k={} {} vs {}",
                k,
                coeffs[k],
                expect
            );
        }
    }

    #[test]
    fn one_point_family_certifies_and_matches_solver() {
        for (p, w) in [(1.5, c(0.5, 0.0)), (3.0, c(0.5, 0.0)), (3.0, c(0.0, 0.5)), (4.0, c(0.3, 0.0))] {
            let j = lp_one_point_inner(p, w, 80).unwrap();
            // J(w) = 0
            let jw: Complex64 = j
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, a)| a * w.powu(k as u32))
                .sum();
            assert!(jw.norm() < 1e-10, "p={} w={}: J(w) = {}", p, w, jw);
            // BJ residuals against shifts of f = 1 - z/w vanish
            let len = j.coeffs().len();
            let f = LpSeries::new(vec![c(1.0, 0.0), -Complex64::new(1.0, 0.0) / w], p).unwrap();
            for m in 1..=20 {
                let r = bj_residual(&j, &f.shift(m, len)).unwrap();
                assert!(r.norm() < 1e-12, "p={} w={} m={}: {}", p, w, m, r.norm());
            }
            // the descent solver converges to the same function
            let rep = lp_inner_function(p, &[w], 48, 1e-8).unwrap();
            for k in 0..12 {
                assert!(
                    (rep.j.coeffs()[k] - j.coeffs()[k]).norm() < 2e-5,
                    "p={} w={} k={}: {} vs {}",
                    p,
                    w,
                    k,
                    rep.j.coeffs()[k],
                    j.coeffs()[k]
                );
            }
        }
    }

    #[test]
    fn plain_exponent_variant_is_not_inner_for_p_ne_2() {
        // the geometric family built with exponent p instead of the conjugate
        // exponent q fails the orthogonality conditions by a wide margin
        let p = 3.0;
        let w = c(0.5, 0.0);
        let ratio = w.conj() * w.norm().powf(p - 2.0);
        let mut coeffs = vec![c(1.0, 0.0)];
        let mut term = -(1.0 - w.norm().powf(p)) / w;
        for _ in 1..=60 {
            coeffs.push(term);
            term *= ratio;
        }
        let j = LpSeries::new(coeffs, p).unwrap();
        let f = LpSeries::new(vec![c(1.0, 0.0), c(-2.0, 0.0)], p).unwrap();
        let r = bj_residual(&j, &f.shift(1, 61)).unwrap();
        assert!(r.norm() > 0.1, "residual unexpectedly small: {}", r.norm());
    }

    #[test]
    fn p3_norm_regression() {
        // closed-form value (1 + |J_1|^3/(1-|c|^3))^{1/3} at w = 0.5
        let rep = lp_inner_function(3.0, &[c(0.5, 0.0)], 48, 1e-8).unwrap();
        assert!(
            (rep.norm - 1.6315540588556415).abs() < 1e-6,
            "norm {}",
            rep.norm
        );
    }

    #[test]
    fn empty_points_give_constant_one() {
        let rep = lp_inner_function(2.5, &[], 8, 1e-9).unwrap();
        assert!((rep.norm - 1.0).abs() < 1e-12);
        assert!((rep.j.coeffs()[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(dual_infimum_norm(2.5, &[], 8, 1e-9).unwrap(), 1.0);
    }

    #[test]
    fn dual_infimum_hilbert_values() {
        let v = dual_infimum_norm(2.0, &[c(0.5, 0.0)], 60, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-6, "{}", v);
        let v = dual_infimum_norm(2.0, &[c(0.5, 0.0), c(-0.5, 0.0)], 60, 1e-10).unwrap();
        assert!((v - 4.0).abs() < 1e-5, "{}", v);
    }

    #[test]
    fn trace_examples() {
        let norms = lp_zero_set_trace(2.0, &[c(0.5, 0.0), c(-0.5, 0.0)], 2, 40, 1e-9).unwrap();
        assert!((norms[0] - 2.0).abs() < 1e-7);
        assert!((norms[1] - 4.0).abs() < 1e-6);

        let norms = lp_zero_set_trace(1.5, &[c(0.9, 0.0)], 1, 24, 1e-7).unwrap();
        assert!(norms[0] >= 1.0); // |J(0)| = 1 forces ||J|| >= 1
    }

    #[test]
    fn bj_definitional_inequality() {
        // for certified pairs, ||f + beta g|| >= ||f|| for all beta
        let p = 2.5;
        let w = c(0.4, 0.2);
        let j = lp_one_point_inner(p, w, 60).unwrap();
        let len = j.coeffs().len();
        let f = LpSeries::new(vec![c(1.0, 0.0), -Complex64::new(1.0, 0.0) / w], p).unwrap();
        let g = f.shift(3, len);
        let base = j.norm();
        let mut state = 0xabcdef12345678_u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..1000 {
            let beta = c(10.0 * next(), 10.0 * next());
            let sum: Vec<Complex64> = j
                .coeffs()
                .iter()
                .zip(g.coeffs().iter())
                .map(|(a, b)| a + beta * b)
                .collect();
            assert!(lp_norm(&sum, p) >= base - 1e-10);
        }
    }

    #[test]
    fn norming_functional_of_inner_is_dual_inner() {
        // l_J is inner for the adjoint shift: both transfer conditions hold
        let p = 3.0;
        let w = c(0.5, 0.0);
        let j = lp_one_point_inner(p, w, 120).unwrap();
        let l = norming_functional(&j).unwrap();
        let len = j.coeffs().len();
        // |l(z^k J)| = 0 for k >= 1
        for k in 1..=10 {
            let shifted = j.shift(k, len);
            let v: Complex64 = shifted
                .coeffs()
                .iter()
                .zip(l.coeffs.iter())
                .map(|(a, b)| a * b)
                .sum();
            assert!(v.norm() < 1e-10, "k={}: {}", k, v.norm());
        }
        // dual-side BJ orthogonality to its backward shifts
        let q = l.q;
        for m in 1..=10 {
            let mut acc = ZERO;
            for k in 0..len - m {
                let lk = l.coeffs[k];
                let mag = lk.norm();
                if mag > 0.0 {
                    acc += mag.powf(q - 2.0) * lk.conj() * l.coeffs[k + m];
                }
            }
            assert!(acc.norm() < 1e-10, "m={}: {}", m, acc.norm());
        }
    }
}
