//! Construction of the shift-inner function attached to a finite zero
//! configuration.
//!
//! Given prescribed zeros `w_1 .. w_n` (with multiplicities) the inner
//! function `J` is the unique combination over the kernel basis
//! `{k_0, k_1, .., k_n}` solving the Gram system `G c = e_0`; it satisfies
//! `J(0) = 1`, vanishes to the prescribed orders, and is orthogonal to every
//! shift `z^m f_n` of the zero polynomial `f_n = prod (1 - z/w_j)`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, PivotedCholesky};
use crate::space::{
    gram_entry, kernel_eval, kernel_eval_dz, kernel_weighted_coeff, KernelNode, WeightSequence,
    MERGE_TOL,
};

/// Condition estimates above this make the interpolation certificate
/// unattainable in double precision; the solve is refused.
pub const CONDITION_ERROR: f64 = 1e14;
/// Above this the solve proceeds but is flagged.
pub const CONDITION_WARN: f64 = 1e10;

const PIVOT_REL_TOL: f64 = 1e-14;

/// A finite zero configuration: points with multiplicities, plus the
/// distinguished origin node `k_0`.
#[derive(Clone, Debug)]
pub struct ZeroConfig {
    groups: Vec<(Complex64, usize)>,
    include_origin: bool,
}

impl ZeroConfig {
    /// Builds a configuration from `(point, multiplicity)` pairs. Points
    /// closer than [`MERGE_TOL`] are merged with summed multiplicity; a point
    /// that close to the origin is rejected.
    pub fn new(zeros: &[(Complex64, usize)], include_origin: bool) -> Result<Self> {
        let mut groups: Vec<(Complex64, usize)> = Vec::new();
        for &(w, r) in zeros {
            if !(w.norm() < 1.0) || !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::OutsideDisk(w));
            }
            if w.norm() < MERGE_TOL {
                return Err(Error::ZeroAtOrigin);
            }
            if r == 0 {
                return Err(Error::Precondition("multiplicities must be >= 1".into()));
            }
            match groups.iter_mut().find(|(p, _)| (*p - w).norm() < MERGE_TOL) {
                Some((_, mult)) => *mult += r,
                None => groups.push((w, r)),
            }
        }
        Ok(ZeroConfig { groups, include_origin })
    }

    /// Simple-zero configuration with origin included (duplicates merge into
    /// multiplicities).
    pub fn from_points(points: &[Complex64]) -> Result<Self> {
        let zeros: Vec<(Complex64, usize)> = points.iter().map(|&w| (w, 1)).collect();
        Self::new(&zeros, true)
    }

    pub fn groups(&self) -> &[(Complex64, usize)] {
        &self.groups
    }

    pub fn include_origin(&self) -> bool {
        self.include_origin
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Total zero count with multiplicity (the degree of `f_n`).
    pub fn degree(&self) -> usize {
        self.groups.iter().map(|(_, r)| r).sum()
    }

    /// True when every prescribed zero is simple.
    pub fn all_simple(&self) -> bool {
        self.groups.iter().all(|(_, r)| *r == 1)
    }

    /// Kernel nodes in solve order: origin first (when included), then for
    /// each zero `w` of multiplicity `r` the nodes `(w, 0) .. (w, r-1)`.
    pub fn nodes(&self) -> Vec<KernelNode> {
        let mut nodes = Vec::with_capacity(self.degree() + 1);
        if self.include_origin {
            nodes.push(KernelNode::origin());
        }
        for &(w, r) in &self.groups {
            for s in 0..r {
                nodes.push(KernelNode::new(w, s).expect("validated on construction"));
            }
        }
        nodes
    }

    /// Coefficients of `f_n(z) = prod (1 - z/w_j)^{r_j}`, exact incremental
    /// convolution.
    pub fn poly_coeffs(&self) -> Vec<Complex64> {
        let mut f = vec![Complex64::new(1.0, 0.0)];
        for &(w, r) in &self.groups {
            for _ in 0..r {
                let mut next = vec![Complex64::new(0.0, 0.0); f.len() + 1];
                for (k, &fk) in f.iter().enumerate() {
                    next[k] += fk;
                    next[k + 1] -= fk / w;
                }
                f = next;
            }
        }
        f
    }
}

/// The Hermitian Gram system `G_{s,t} = <k_t, k_s>` over a node list, with
/// its pivoted factorization.
pub struct GramSystem {
    pub nodes: Vec<KernelNode>,
    pub matrix: CMat,
    pub condition_estimate: f64,
    pub ill_conditioned: bool,
    factor: PivotedCholesky,
}

impl GramSystem {
    /// Factorized solve with one step of iterative refinement.
    pub fn solve(&self, rhs: &CVec) -> CVec {
        let x = self.factor.solve(rhs);
        let residual = rhs - &self.matrix * &x;
        x + self.factor.solve(&residual)
    }

    pub fn log_det(&self) -> f64 {
        self.factor.log_det()
    }
}

/// Builds and factors the Gram matrix of a node list.
pub fn build_gram_nodes(
    space: &WeightSequence,
    nodes: Vec<KernelNode>,
    tol: f64,
) -> Result<GramSystem> {
    if nodes.is_empty() {
        return Err(Error::Precondition("empty node list".into()));
    }
    let n = nodes.len();
    let mut g = CMat::zeros(n, n);
    for s in 0..n {
        for t in 0..=s {
            let v = gram_entry(space, &nodes[s], &nodes[t], tol)?;
            g[(s, t)] = v;
            g[(t, s)] = v.conj();
        }
        g[(s, s)] = Complex64::new(g[(s, s)].re, 0.0);
    }
    let factor = PivotedCholesky::new(&g, PIVOT_REL_TOL).map_err(|info| Error::DegenerateGram {
        index_a: info.failing,
        node_a: nodes[info.failing].point(),
        index_b: info.partner,
        node_b: nodes[info.partner].point(),
        pivot_ratio: info.pivot_ratio,
    })?;
    let condition_estimate = factor.condition_estimate();
    if condition_estimate > CONDITION_ERROR {
        return Err(Error::IllConditioned { estimate: condition_estimate });
    }
    Ok(GramSystem {
        nodes,
        matrix: g,
        condition_estimate,
        ill_conditioned: condition_estimate > CONDITION_WARN,
        factor,
    })
}

/// Gram system of a zero configuration (origin node first).
pub fn build_gram(space: &WeightSequence, config: &ZeroConfig, tol: f64) -> Result<GramSystem> {
    build_gram_nodes(space, config.nodes(), tol)
}

/// An inner function stored as coefficients over the kernel basis, together
/// with its certificates.
pub struct InnerFunctionRep {
    pub space: WeightSequence,
    pub config: ZeroConfig,
    pub nodes: Vec<KernelNode>,
    pub coefficients: Vec<Complex64>,
    pub norm_squared: f64,
    /// `|<J, z^m f_n>|` for `m = 1 ..= residual_depth`
    pub residual_report: Vec<(usize, f64)>,
    /// max residual of the interpolation system `G c - e_0`
    pub interpolation_residual: f64,
    pub condition_estimate: f64,
    pub ill_conditioned: bool,
}

impl InnerFunctionRep {
    pub fn norm(&self) -> f64 {
        self.norm_squared.sqrt()
    }

    /// Taylor coefficients of `J`, `J_k = (sum_j c_j (k)_{s_j} conj(w_j)^{k-s_j}) / lambda_k`.
    pub fn taylor(&self, len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|k| {
                let mu: Complex64 = self
                    .nodes
                    .iter()
                    .zip(&self.coefficients)
                    .map(|(node, c)| c * kernel_weighted_coeff(node, k))
                    .sum();
                mu * self.space.recip(k)
            })
            .collect()
    }

    /// `max |J^{(s)}(w) - expected|` over the configuration nodes and the
    /// origin, recomputed by direct series evaluation.
    pub fn max_node_residual(&self) -> f64 {
        self.interpolation_residual
    }

    pub fn worst_inner_residual(&self) -> f64 {
        self.residual_report
            .iter()
            .map(|(_, r)| *r)
            .fold(0.0, f64::max)
    }
}

fn certify(
    space: &WeightSequence,
    config: &ZeroConfig,
    gram: GramSystem,
    coeffs: CVec,
    tol: f64,
) -> Result<InnerFunctionRep> {
    let n = gram.nodes.len();
    let scale = 1.0 + coeffs.iter().map(|c| c.norm()).sum::<f64>();

    // interpolation certificate: G c = e_0 residual (row 0 is J(0) = 1, the
    // others are the prescribed vanishing conditions)
    let mut rhs = CVec::zeros(n);
    rhs[0] = Complex64::new(1.0, 0.0);
    let res = &gram.matrix * &coeffs - rhs;
    let interpolation_residual = res.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let interp_tol = (1e-9_f64).max(tol) * scale;
    if interpolation_residual > interp_tol {
        return Err(Error::CertificationFailed {
            context: "interpolation conditions",
            index: 0,
            residual: interpolation_residual,
            tol: interp_tol,
        });
    }

    // three quantities that must agree: Re c_0, the quadratic form, and
    // (tested externally) the determinant-ratio distance
    let norm_sq_form = {
        let gc = &gram.matrix * &coeffs;
        coeffs
            .iter()
            .zip(gc.iter())
            .map(|(c, g)| (c.conj() * g).re)
            .sum::<f64>()
    };
    let norm_squared = coeffs[0].re;
    // the quadratic form loses ~scale digits to cancellation, so its
    // agreement certificate carries an extra order of slack; acceptance
    // tests assert the tight tolerances on well-conditioned configurations
    let nrm_tol = 10.0 * (1e-9_f64).max(tol) * scale.max(norm_squared.abs());
    if (norm_squared - norm_sq_form).abs() > nrm_tol || coeffs[0].im.abs() > nrm_tol {
        return Err(Error::CertificationFailed {
            context: "norm agreement Re(c_0) vs c*Gc",
            index: 0,
            residual: (norm_squared - norm_sq_form).abs().max(coeffs[0].im.abs()),
            tol: nrm_tol,
        });
    }

    // inner-property residuals |<J, z^m f_n>| in coefficient space; both
    // factors are polynomials in the sum, so the computation is exact up to
    // rounding: <J, z^m f> = sum_k mu_k conj(f_{k-m}), mu_k = sum_j c_j (k)_{s_j} conj(w_j)^{k-s_j}
    let f = config.poly_coeffs();
    let residual_depth = 2 * n + 8;
    let k_max = residual_depth + f.len();
    let mu: Vec<Complex64> = (0..=k_max)
        .map(|k| {
            gram.nodes
                .iter()
                .zip(coeffs.iter())
                .map(|(node, c)| c * kernel_weighted_coeff(node, k))
                .sum()
        })
        .collect();
    let mut residual_report = Vec::with_capacity(residual_depth);
    let res_tol = (1e-9_f64).max(tol) * scale;
    for m in 1..=residual_depth {
        let mut ip = Complex64::new(0.0, 0.0);
        for (i, fk) in f.iter().enumerate() {
            ip += mu[m + i] * fk.conj();
        }
        residual_report.push((m, ip.norm()));
    }
    if let Some(&(m, r)) = residual_report
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
    {
        if r > res_tol {
            return Err(Error::CertificationFailed {
                context: "inner-property residual <J, z^m f>",
                index: m,
                residual: r,
                tol: res_tol,
            });
        }
    }

    Ok(InnerFunctionRep {
        space: space.clone(),
        config: config.clone(),
        coefficients: coeffs.iter().cloned().collect(),
        norm_squared,
        residual_report,
        interpolation_residual,
        condition_estimate: gram.condition_estimate,
        ill_conditioned: gram.ill_conditioned,
        nodes: gram.nodes,
    })
}

/// Solves `G c = e_0` for the inner function of a configuration and certifies
/// the result (interpolation, norm agreement, inner-property residuals).
pub fn solve_inner(
    space: &WeightSequence,
    config: &ZeroConfig,
    tol: f64,
) -> Result<InnerFunctionRep> {
    if !config.include_origin() {
        return Err(Error::Precondition(
            "inner-function solves require the origin node".into(),
        ));
    }
    let gram = build_gram(space, config, tol)?;
    let n = gram.nodes.len();
    let mut rhs = CVec::zeros(n);
    rhs[0] = Complex64::new(1.0, 0.0);
    let coeffs = gram.solve(&rhs);
    certify(space, config, gram, coeffs, tol)
}

/// Evaluates an inner function at `z`: `sum_j c_j k_j(z)`, each kernel summed
/// at tolerance `tol` so the total error is at most `tol * sum |c_j|`.
pub fn eval_inner(rep: &InnerFunctionRep, z: Complex64, tol: f64) -> Result<Complex64> {
    let mut v = Complex64::new(0.0, 0.0);
    for (node, c) in rep.nodes.iter().zip(&rep.coefficients) {
        v += c * kernel_eval(&rep.space, node, z, tol)?;
    }
    Ok(v)
}

/// `d/dz` of [`eval_inner`], by termwise differentiation of each kernel series.
pub fn eval_inner_dz(rep: &InnerFunctionRep, z: Complex64, tol: f64) -> Result<Complex64> {
    let mut v = Complex64::new(0.0, 0.0);
    for (node, c) in rep.nodes.iter().zip(&rep.coefficients) {
        v += c * kernel_eval_dz(&rep.space, node, z, tol)?;
    }
    Ok(v)
}

/// One-point inner function in closed form:
/// `J = (k_w(w) k_0 - conj(k_w(0)) k_w) / (k_w(w) k_0(0) - |k_w(0)|^2)`.
///
/// Independent of the Gram solve path (2x2 closed form); used as an oracle.
/// Note `k_w(0) = k_0(0) = 1` in any diagonal space with `lambda_0 = 1`.
pub fn closed_form_one_point(
    space: &WeightSequence,
    w: Complex64,
    tol: f64,
) -> Result<InnerFunctionRep> {
    let config = ZeroConfig::new(&[(w, 1)], true)?;
    let node = KernelNode::new(w, 0)?;
    let kww = kernel_eval(space, &node, w, tol)?;
    let kw0 = Complex64::new(1.0, 0.0); // n = 0 term only
    let k00 = Complex64::new(1.0, 0.0);
    let denom = kww * k00 - kw0 * kw0.conj();
    let c0 = kww / denom;
    let c1 = -kw0.conj() / denom;
    let gram = build_gram(space, &config, tol)?;
    let coeffs = DVector::from_vec(vec![c0, c1]);
    certify(space, &config, gram, coeffs, tol)
}

/// `||J_1||, ||J_2||, ...` for the prefixes of a point list. Repeated points
/// accumulate multiplicity. Monotonicity is a theorem; a decrease beyond 1e-9
/// is reported as a certification failure.
pub fn norm_sequence(
    space: &WeightSequence,
    points: &[Complex64],
    tol: f64,
) -> Result<Vec<f64>> {
    let mut norms = Vec::with_capacity(points.len());
    for n in 1..=points.len() {
        let config = ZeroConfig::from_points(&points[..n])?;
        let rep = solve_inner(space, &config, tol)?;
        let norm = rep.norm();
        if let Some(&prev) = norms.last() {
            if norm < prev - 1e-9 {
                return Err(Error::CertificationFailed {
                    context: "norm monotonicity",
                    index: n,
                    residual: prev - norm,
                    tol: 1e-9,
                });
            }
        }
        norms.push(norm);
    }
    Ok(norms)
}

/// Distance from `k_0` to the span of the zero-node kernels, via the
/// determinant ratio `d^2 = det G[k_0..k_n] / det G[k_1..k_n]` computed from
/// pivot products in log space. Satisfies `d * ||J|| = 1`.
pub fn projection_distance(
    space: &WeightSequence,
    points: &[Complex64],
    tol: f64,
) -> Result<f64> {
    if points.is_empty() {
        return Ok(1.0); // ||k_0|| with lambda_0 = 1
    }
    let config = ZeroConfig::from_points(points)?;
    let full = build_gram(space, &config, tol)?;
    let zeros_only = ZeroConfig::new(config.groups(), false)?;
    let sub = build_gram_nodes(space, zeros_only.nodes(), tol)?;
    Ok((0.5 * (full.log_det() - sub.log_det())).exp())
}

/// Triangular table expressing the Gram-Schmidt orthonormalization `v_j` of
/// the zero-node kernels over `{k_1 .. k_n}` (unpivoted, order preserving),
/// together with the components `<k_0, v_j>`.
pub struct GramSchmidtKernels {
    pub nodes: Vec<KernelNode>,
    /// column `j` holds the coefficients of `v_j` over the kernel basis
    /// (upper triangular)
    pub coefficients: CMat,
    /// `<k_0, v_j>`
    pub k0_components: Vec<Complex64>,
    pub gram: CMat,
}

impl GramSchmidtKernels {
    /// `||Phi_n||^2 = sum |<k_0, v_j>|^2`, the squared norm of the
    /// co-projection of `k_0` onto the kernel span.
    pub fn phi_norm_squared(&self) -> f64 {
        self.k0_components.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `max |<v_i, v_j> - delta_ij>|`, recomputed from the Gram matrix.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = &self.coefficients;
        let prod = v.adjoint() * &self.gram * v;
        let n = prod.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// Inner-function coefficients over `{k_0, k_1, .., k_n}` reconstructed
    /// from the orthonormal family:
    /// `J = (k_0 - sum <k_0,v_j> v_j) / (||k_0||^2 - sum |<k_0,v_j>|^2)`.
    pub fn inner_coefficients(&self) -> Vec<Complex64> {
        let n = self.nodes.len();
        let d_sq = 1.0 - self.phi_norm_squared();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        out[0] = Complex64::new(1.0 / d_sq, 0.0);
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in i..n {
                s += self.k0_components[j] * self.coefficients[(i, j)];
            }
            out[i + 1] = -s / d_sq;
        }
        out
    }
}

/// Gram-Schmidt of the kernel functions at distinct points, in the given
/// order (the ordering matters: the classical Takenaka system arises in the
/// Hardy space). Used as an independent cross-check of [`solve_inner`].
pub fn gram_schmidt_kernels(
    space: &WeightSequence,
    points: &[Complex64],
    tol: f64,
) -> Result<GramSchmidtKernels> {
    let config = ZeroConfig::from_points(points)?;
    if !config.all_simple() || config.groups().len() != points.len() {
        return Err(Error::Precondition(
            "gram_schmidt_kernels requires distinct points".into(),
        ));
    }
    let zeros_only = ZeroConfig::new(config.groups(), false)?;
    let nodes = zeros_only.nodes();
    let n = nodes.len();
    let mut g = CMat::zeros(n, n);
    for s in 0..n {
        for t in 0..=s {
            let v = gram_entry(space, &nodes[s], &nodes[t], tol)?;
            g[(s, t)] = v;
            g[(t, s)] = v.conj();
        }
        g[(s, s)] = Complex64::new(g[(s, s)].re, 0.0);
    }

    // unpivoted Cholesky G = L L^H; v_j coefficients are the columns of L^{-H}
    let mut l = CMat::zeros(n, n);
    for k in 0..n {
        let mut d = g[(k, k)].re;
        for j in 0..k {
            d -= l[(k, j)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::DegenerateGram {
                index_a: k,
                node_a: nodes[k].point(),
                index_b: if k > 0 { k - 1 } else { 0 },
                node_b: nodes[if k > 0 { k - 1 } else { 0 }].point(),
                pivot_ratio: d.max(0.0) / g[(0, 0)].re,
            });
        }
        l[(k, k)] = Complex64::new(d.sqrt(), 0.0);
        for i in k + 1..n {
            let mut s = g[(i, k)];
            for j in 0..k {
                s -= l[(i, j)] * l[(k, j)].conj();
            }
            l[(i, k)] = s / l[(k, k)];
        }
    }
    // columns of V = L^{-H} by back substitution on L^H V = I
    let mut v = CMat::zeros(n, n);
    for col in 0..n {
        for i in (0..=col).rev() {
            let mut s = if i == col {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            for j in i + 1..=col {
                s -= l[(j, i)].conj() * v[(j, col)];
            }
            v[(i, col)] = s / l[(i, i)].conj();
        }
    }

    // <k_0, v_j> = sum_i conj(V_ij) <k_0, k_i>; in a diagonal space
    // <k_0, k_i> = 1 for order-0 nodes (here all nodes are order 0)
    let k0_components: Vec<Complex64> = (0..n)
        .map(|j| (0..n).map(|i| v[(i, j)].conj()).sum())
        .collect();

    Ok(GramSchmidtKernels { nodes, coefficients: v, k0_components, gram: g })
}
