//! Extra zeros of inner functions: operator-norm lower bounds, the
//! determinant criterion, and a grid-plus-Newton scanner.
//!
//! On a diagonal space the shift and backward shift are weighted shifts on an
//! orthogonal basis, so their norms are exactly the weight-ratio suprema
//! `||S|| = sup sqrt(lambda_{n+1}/lambda_n)` and
//! `||Q_0|| = sup sqrt(lambda_n/lambda_{n+1})`. The difference-quotient
//! operator `Q_w` at `w != 0` has no closed form; its norm is estimated from
//! below on truncated monomial bases of doubling degree.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inner::{
    build_gram_nodes, eval_inner, eval_inner_dz, solve_inner, InnerFunctionRep, ZeroConfig,
};
use crate::linalg::{lu_logdet, top_singular_value, CMat};
use crate::space::{KernelNode, WeightSequence, MERGE_TOL};

/// Weight-ratio supremum scan length for spaces without a closed form.
const RATIO_SCAN: usize = 8192;

#[derive(Clone, Debug)]
pub struct OperatorNormReport {
    pub shift_norm: f64,
    pub backward_shift_norm: f64,
    /// lower estimate of `||Q_w||` (exact for `w = 0`)
    pub qw_norm: f64,
    pub truncation_degree: usize,
    pub converged: bool,
}

enum RatioDirection {
    Forward,  // lambda_{n+1} / lambda_n
    Backward, // lambda_n / lambda_{n+1}
}

fn ratio_sup(space: &WeightSequence, dir: RatioDirection) -> Result<f64> {
    let scan = space.explicit_ratio_count().map(|n| n + 1).unwrap_or(RATIO_SCAN);
    let ratio = |n: usize| -> f64 {
        // in log space: the raw reciprocals underflow along the scan
        match dir {
            RatioDirection::Forward => (space.ln_recip(n) - space.ln_recip(n + 1)).exp(),
            RatioDirection::Backward => (space.ln_recip(n + 1) - space.ln_recip(n)).exp(),
        }
    };
    let mut sup = f64::MIN;
    let mut arg = 0;
    for n in 0..scan {
        let r = ratio(n);
        if r > sup {
            sup = r;
            arg = n;
        }
    }
    // the supremum must be attained well inside the scanned range, or the
    // scan says nothing about the tail; custom lists have an exact tail
    // ratio of 1 and named spaces never reach this path
    if space.explicit_ratio_count().is_none() && arg >= scan - scan / 8 {
        return Err(Error::RatioSupUnresolved);
    }
    Ok(sup)
}

/// `||S|| = sup_n sqrt(lambda_{n+1}/lambda_n)`; closed form for the named
/// spaces, a scanned supremum with attainment check otherwise.
pub fn shift_norm(space: &WeightSequence) -> Result<f64> {
    let v = match space.spec_string().as_str() {
        "hardy" => 1.0,
        "dirichlet" => 2.0,  // attained at n = 0
        "bergman" => 1.0,    // ratios (n+1)/(n+2) increase to 1
        "korenblum" => 4.0,  // attained at n = 1
        _ => ratio_sup(space, RatioDirection::Forward)?,
    };
    Ok(v.sqrt())
}

/// `||Q_0|| = sup_n sqrt(lambda_n/lambda_{n+1})`.
pub fn backward_shift_norm(space: &WeightSequence) -> Result<f64> {
    let v = match space.spec_string().as_str() {
        "hardy" => 1.0,
        "dirichlet" => 1.0, // ratios (n+1)/(n+2) increase to 1
        "bergman" => 2.0,   // attained at n = 0
        "korenblum" => 1.0, // attained at n = 0
        _ => ratio_sup(space, RatioDirection::Backward)?,
    };
    Ok(v.sqrt())
}

/// Matrix of `Q_w` on the monomial basis of degree `<= n`, conjugated by the
/// diagonal weight square roots so that its singular values are computed in
/// the space norm: entries `sqrt(lambda_j/lambda_n) w^{n-1-j}` for `j < n`.
fn qw_matrix(space: &WeightSequence, w: Complex64, degree: usize) -> CMat {
    let n = degree + 1;
    // sqrt(lambda_j/lambda_col) = exp((ln b_col - ln b_j)/2), in log space so
    // geometrically decaying phi coefficients cannot underflow the ratio
    let ln_b: Vec<f64> = (0..n).map(|k| space.ln_recip(k)).collect();
    let mut m = CMat::zeros(n, n);
    for col in 1..n {
        let mut pw = Complex64::new(1.0, 0.0);
        // rows j = col-1 down to 0 carry w^{col-1-j}
        for j in (0..col).rev() {
            m[(j, col)] = pw * (0.5 * (ln_b[col] - ln_b[j])).exp();
            pw *= w;
        }
    }
    m
}

/// Lower estimate of `||Q_w||` on truncated bases of doubling degree.
///
/// The restriction of `Q_w` to polynomials of degree `<= N` maps into the
/// same subspace, so each truncation norm is a true lower bound and the
/// estimates are nondecreasing in `N`. Convergence is declared when one
/// doubling changes the estimate by less than `tol` relative.
pub fn qw_norm_estimate(
    space: &WeightSequence,
    w: Complex64,
    start_degree: usize,
    tol: f64,
) -> Result<OperatorNormReport> {
    if !(w.norm() < 1.0) {
        return Err(Error::OutsideDisk(w));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let shift = shift_norm(space)?;
    let backward = backward_shift_norm(space)?;

    // Q_0 is the backward shift itself, a weighted shift with known norm;
    // truncation would approach an asymptotically attained supremum only as
    // the degree grows without bound.
    if w.norm() == 0.0 {
        return Ok(OperatorNormReport {
            shift_norm: shift,
            backward_shift_norm: backward,
            qw_norm: backward,
            truncation_degree: 0,
            converged: true,
        });
    }

    let cap = 2048;
    // superseded-by-doubling accuracy: the per-degree power iteration only
    // needs to resolve changes well below the doubling tolerance
    let power_tol = (tol * 1e-2).max(1e-11);
    let mut degree = start_degree.max(8);
    let mut prev = {
        let m = qw_matrix(space, w, degree);
        top_singular_value(&m, power_tol, 1500)
    };
    loop {
        let next_degree = degree * 2;
        if next_degree > cap {
            return Ok(OperatorNormReport {
                shift_norm: shift,
                backward_shift_norm: backward,
                qw_norm: prev,
                truncation_degree: degree,
                converged: false,
            });
        }
        let est = top_singular_value(&qw_matrix(space, w, next_degree), power_tol, 1500);
        if (est - prev).abs() <= tol * est.max(1e-300) {
            return Ok(OperatorNormReport {
                shift_norm: shift,
                backward_shift_norm: backward,
                qw_norm: est,
                truncation_degree: next_degree,
                converged: true,
            });
        }
        prev = est;
        degree = next_degree;
    }
}

/// Result of the extra-zero lower bound
/// `|w| >= sqrt(1 + ||S||^2 ||Q_w||^2) / (||Q_0|| ||S|| ||Q_w||)`.
#[derive(Clone, Debug)]
pub struct ExtraZeroBound {
    pub bound: f64,
    pub report: OperatorNormReport,
}

/// Evaluates the lower-bound expression at `w`, with default estimator
/// parameters. When `||Q_0|| <= 1` the bound is `>= 1` for any value of
/// `||Q_w||`, which is how the no-extra-zeros conclusions arise.
///
/// `report.converged == false` flags an unconverged `||Q_w||`: a lower
/// estimate of the norm yields an upper estimate of the bound, so an
/// unconverged bound must not be used to exclude candidate zeros.
pub fn extra_zero_lower_bound(space: &WeightSequence, w: Complex64) -> Result<ExtraZeroBound> {
    extra_zero_lower_bound_with(space, w, 32, 5e-3)
}

pub fn extra_zero_lower_bound_with(
    space: &WeightSequence,
    w: Complex64,
    start_degree: usize,
    tol: f64,
) -> Result<ExtraZeroBound> {
    let report = qw_norm_estimate(space, w, start_degree, tol)?;
    let s = report.shift_norm;
    let q0 = report.backward_shift_norm;
    let qw = report.qw_norm;
    let bound = (1.0 + s * s * qw * qw).sqrt() / (q0 * s * qw);
    Ok(ExtraZeroBound { bound, report })
}

/// `det R` for the extra-zero criterion, with its scale-free residual.
#[derive(Clone, Debug)]
pub struct DetRResidual {
    pub value: Complex64,
    pub log_abs: f64,
    /// `|det R|` divided by the product of row norms (Hadamard scale);
    /// near zero exactly when the criterion matrix is singular
    pub relative: f64,
}

pub(crate) fn det_r_from_config(
    space: &WeightSequence,
    config: &ZeroConfig,
    candidate: Complex64,
    tol: f64,
) -> Result<DetRResidual> {
    if !(candidate.norm() < 1.0) {
        return Err(Error::OutsideDisk(candidate));
    }
    if candidate.norm() < MERGE_TOL {
        return Err(Error::ZeroAtOrigin);
    }
    if config
        .groups()
        .iter()
        .any(|(p, _)| (*p - candidate).norm() < MERGE_TOL)
    {
        return Err(Error::Precondition(
            "candidate coincides with a prescribed zero".into(),
        ));
    }
    let mut nodes = config.nodes();
    if nodes.is_empty() || nodes[0].point().norm() != 0.0 {
        return Err(Error::Precondition(
            "det R requires a configuration with the origin node".into(),
        ));
    }
    nodes.push(KernelNode::new(candidate, 0)?);
    let gram = build_gram_nodes(space, nodes, tol)?;
    let m = gram.matrix.nrows();
    // rows 1..m, columns 0..m-1 of the bordered Gram matrix
    let r = gram.matrix.view((1, 0), (m - 1, m - 1)).into_owned();
    let (log_abs, phase) = lu_logdet(&r);
    let value = if log_abs.is_finite() {
        phase * log_abs.exp()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let mut log_scale = 0.0;
    for i in 0..m - 1 {
        let row_norm: f64 = (0..m - 1)
            .map(|j| r[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        log_scale += row_norm.ln();
    }
    let relative = if log_abs.is_finite() {
        (log_abs - log_scale).exp()
    } else {
        0.0
    };
    Ok(DetRResidual { value, log_abs, relative })
}

/// Determinant of the submatrix `R` (rows `1..n`, columns `0..n-1` of the
/// Gram matrix bordered by the candidate node): `det R = 0` exactly when the
/// inner function of the prescribed zeros has an extra zero at `candidate`.
pub fn det_r_residual(
    space: &WeightSequence,
    zeros: &[Complex64],
    candidate: Complex64,
    tol: f64,
) -> Result<DetRResidual> {
    let config = ZeroConfig::from_points(zeros)?;
    if !config.all_simple() || config.groups().len() != zeros.len() {
        return Err(Error::Precondition(
            "det_r_residual requires distinct zeros".into(),
        ));
    }
    det_r_from_config(space, &config, candidate, tol)
}

/// `zeta = -(a_1 + a_2 |w|^2)/(a_2 conj(w))`, the guaranteed extra zero of
/// the one-point inner function in the phi-space generated by
/// `1/(1 - a_1 z - a_2 z^2)`.
pub fn phi_space_extra_zero(a1: f64, a2: f64, w: Complex64) -> Result<Complex64> {
    if !(a1 > 0.0) {
        return Err(Error::Precondition(format!("a1 = {} violates a1 > 0", a1)));
    }
    if !(a2 > 4.0 * a1) {
        return Err(Error::Precondition(format!(
            "a2 = {} violates a2 > 4 a1 = {}",
            a2,
            4.0 * a1
        )));
    }
    if a1 + a2 > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!(
            "a1 + a2 = {} violates a1 + a2 <= 1",
            a1 + a2
        )));
    }
    if !(w.norm() < 1.0) {
        return Err(Error::OutsideDisk(w));
    }
    if w.norm() < MERGE_TOL {
        return Err(Error::ZeroAtOrigin);
    }
    let m = w.norm();
    if !(m - m * m > a1 / a2) {
        return Err(Error::Precondition(format!(
            "|w| - |w|^2 = {} must exceed a1/a2 = {}",
            m - m * m,
            a1 / a2
        )));
    }
    let zeta = -(a1 + a2 * m * m) / (a2 * w.conj());
    Ok(zeta)
}

#[derive(Clone, Debug)]
pub struct ExtraZeroFinding {
    pub location: Complex64,
    /// `|J(location)|` by kernel-series evaluation
    pub residual: f64,
    pub det_r: DetRResidual,
    pub bound: f64,
    pub bound_converged: bool,
    pub bound_satisfied: bool,
}

/// Grid candidate whose Newton refinement did not converge.
#[derive(Clone, Debug)]
pub struct UnrefinedCandidate {
    pub grid_point: Complex64,
    pub modulus: f64,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub grid_angles: usize,
    pub grid_radii: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub keep_trace: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            grid_angles: 256,
            grid_radii: 128,
            newton_tol: 1e-12,
            newton_max_iter: 50,
            keep_trace: false,
        }
    }
}

#[derive(Debug)]
pub struct ScanReport {
    pub findings: Vec<ExtraZeroFinding>,
    pub unrefined: Vec<UnrefinedCandidate>,
    /// `(r, theta, |J|)` rows when tracing was requested
    pub trace: Option<Vec<(f64, f64, f64)>>,
}

/// Taylor coefficients of `J` long enough that the dropped tail contributes
/// at most `target` on `|z| <= r`; the coefficient moduli of a kernel
/// combination decay geometrically like `|w_j|^k / lambda_k`.
fn taylor_for_radius(rep: &InnerFunctionRep, r: f64, target: f64) -> Vec<Complex64> {
    let mut len = 64usize;
    let cap = 1 << 14;
    loop {
        let coeffs = rep.taylor(len);
        // crude certified check: geometric extrapolation of the last
        // observed coefficients against the dominant ratio |w_max| r
        let w_max = rep
            .nodes
            .iter()
            .map(|n| n.point().norm())
            .fold(0.0, f64::max);
        let q = w_max * r;
        let last = coeffs[len - 8..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            * r.powi(len as i32 - 1);
        let tail = if q < 1.0 { last * q / (1.0 - q) } else { f64::MAX };
        if tail <= target || len >= cap {
            return coeffs;
        }
        len *= 2;
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Scans `|z| <= r_max` for zeros of the configuration's inner function
/// beyond the prescribed ones. Grid localization on the Taylor polynomial,
/// Newton refinement on the kernel series, certification by series
/// evaluation, `det R` and the operator-norm bound attached to each finding.
pub fn scan_extra_zeros(
    space: &WeightSequence,
    config: &ZeroConfig,
    r_max: f64,
    opts: &ScanOptions,
    tol: f64,
) -> Result<ScanReport> {
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::Precondition(format!(
            "r_max = {} must lie in (0, 1)",
            r_max
        )));
    }
    let rep = solve_inner(space, config, tol)?;
    let scale = 1.0 + rep.coefficients.iter().map(|c| c.norm()).sum::<f64>();
    let coeffs = taylor_for_radius(&rep, r_max, 1e-10 * scale);

    let na = opts.grid_angles.max(16);
    let nr = opts.grid_radii.max(8);
    let mut grid = vec![0.0_f64; na * nr];
    let mut trace = if opts.keep_trace { Some(Vec::with_capacity(na * nr)) } else { None };
    for it in 0..na {
        let theta = 2.0 * std::f64::consts::PI * it as f64 / na as f64;
        let dir = Complex64::new(theta.cos(), theta.sin());
        for ir in 0..nr {
            let r = r_max * (ir + 1) as f64 / nr as f64;
            let v = horner(&coeffs, dir * r).norm();
            grid[it * nr + ir] = v;
            if let Some(t) = trace.as_mut() {
                t.push((r, theta, v));
            }
        }
    }

    // interior local minima of |J|; by the minimum modulus principle a strict
    // interior minimum of a nonvanishing analytic function cannot occur, so
    // surviving cells sit at zeros (the outermost ring has no outward
    // neighbor and is excluded)
    let center = horner(&coeffs, Complex64::new(0.0, 0.0)).norm();
    let mut seeds: Vec<(usize, usize)> = Vec::new();
    for it in 0..na {
        for ir in 0..nr - 1 {
            let v = grid[it * nr + ir];
            let mut is_min = true;
            let mut lipschitz = 0.0_f64;
            for dt in [-1i64, 0, 1] {
                for dr in [-1i64, 0, 1] {
                    if dt == 0 && dr == 0 {
                        continue;
                    }
                    let jt = ((it as i64 + dt).rem_euclid(na as i64)) as usize;
                    let jr = ir as i64 + dr;
                    let nv = if jr < 0 {
                        center
                    } else {
                        grid[jt * nr + jr as usize]
                    };
                    if nv < v {
                        is_min = false;
                    }
                    lipschitz = lipschitz.max((nv - v).abs());
                }
            }
            if is_min && v < 10.0 * lipschitz {
                seeds.push((it, ir));
            }
        }
    }

    let eval_tol = (tol / scale).min(1e-13);
    let accept_residual = (1e-10 * scale).max(tol);
    let mut findings: Vec<ExtraZeroFinding> = Vec::new();
    let mut unrefined = Vec::new();
    'seed: for (it, ir) in seeds {
        let theta = 2.0 * std::f64::consts::PI * it as f64 / na as f64;
        let r = r_max * (ir + 1) as f64 / nr as f64;
        let mut z = Complex64::new(theta.cos(), theta.sin()) * r;
        let seed_modulus = grid[it * nr + ir];

        // polish to step convergence first; stopping on the residual alone
        // can strand an iterate a useless distance from the actual root
        let mut step_converged = false;
        for _ in 0..opts.newton_max_iter {
            let jv = eval_inner(&rep, z, eval_tol)?;
            let dv = eval_inner_dz(&rep, z, eval_tol)?;
            if dv.norm() == 0.0 {
                break;
            }
            let step = jv / dv;
            z -= step;
            if !(z.norm() < 1.0) {
                break;
            }
            if step.norm() < opts.newton_tol {
                step_converged = true;
                break;
            }
        }
        let converged = step_converged
            && z.norm() < 1.0
            && eval_inner(&rep, z, eval_tol)?.norm() <= accept_residual;
        if !converged || !(z.norm() < 1.0 - 1e-9) {
            unrefined.push(UnrefinedCandidate {
                grid_point: Complex64::new(theta.cos(), theta.sin()) * r,
                modulus: seed_modulus,
            });
            continue;
        }
        // prescribed zeros are not findings
        for (p, _) in config.groups() {
            if (z - p).norm() < 1e-6 {
                continue 'seed;
            }
        }
        // dedupe against previous findings
        for f in &findings {
            if (z - f.location).norm() < 1e-6 {
                continue 'seed;
            }
        }
        let residual = eval_inner(&rep, z, eval_tol)?.norm();
        let det_r = det_r_from_config(space, config, z, tol)?;
        let bound = extra_zero_lower_bound(space, z)?;
        findings.push(ExtraZeroFinding {
            location: z,
            residual,
            det_r,
            bound: bound.bound,
            bound_converged: bound.report.converged,
            bound_satisfied: z.norm() >= bound.bound - 1e-8,
        });
    }

    Ok(ScanReport { findings, unrefined, trace })
}
