//! Diagonal weighted spaces of analytic functions on the unit disk.
//!
//! A space is described by its weight sequence `lambda_n > 0`, `lambda_0 = 1`;
//! the inner product is `<f, g> = sum f_n conj(g_n) lambda_n` and point
//! evaluation of the `s`-th derivative at `w` is implemented by the kernel
//!
//! ```text
//! k_{s,w}(z) = sum_{n >= s}  n!/(n-s)!  conj(w)^{n-s} z^n / lambda_n .
//! ```
//!
//! All kernel values and Gram entries are computed by direct summation of this
//! series with a certified geometric tail bound; no closed forms are used, so
//! every space (including phi-generated ones) goes through the same path.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for kernel series truncation.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Two prescribed zeros closer than this are treated as one zero with summed
/// multiplicity; the Gram matrix degenerates continuously as points merge and
/// the derivative-kernel machinery is the correct limit.
pub const MERGE_TOL: f64 = 1e-10;

const MAX_SERIES_TERMS: usize = 4_000_000;

/// Generating data for a phi-space: `Phi(z) = 1 / (1 - sum a_m z^m)` with
/// `a_1 > 0`, every `a_m >= 0` and `sum a_m <= 1`. The power-series
/// coefficients `b_n` of `Phi` are then positive and `lambda_n = 1/b_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSpec {
    a: Vec<f64>,
}

impl PhiSpec {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidPhiSpec("coefficient list is empty".into()));
        }
        if !a.iter().all(|x| x.is_finite() && *x >= 0.0) {
            return Err(Error::InvalidPhiSpec(
                "coefficients must be finite and nonnegative".into(),
            ));
        }
        if a[0] <= 0.0 {
            return Err(Error::InvalidPhiSpec(format!(
                "a_1 = {} violates a_1 > 0",
                a[0]
            )));
        }
        let sum: f64 = a.iter().sum();
        if sum > 1.0 + 1e-12 {
            return Err(Error::InvalidPhiSpec(format!(
                "sum of coefficients {} violates sum <= 1",
                sum
            )));
        }
        Ok(PhiSpec { a })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.a
    }
}

#[derive(Debug)]
enum Kind {
    Hardy,
    Dirichlet,
    Bergman,
    Korenblum,
    Phi {
        spec: PhiSpec,
        // memoized log power-series coefficients ln(b_n) of Phi, extended on
        // demand; kept in log space because b_n decays geometrically and
        // underflows at the indices operator-norm scans reach
        log_recips: RwLock<Vec<f64>>,
    },
    // provided weights; the final entry repeats past the end of the list
    Custom(Vec<f64>),
}

/// `ln(sum exp(x))` without overflow.
fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// A weight sequence `lambda_n`, the single source of truth for norms and
/// kernels of one space. Cheap to clone; phi-space coefficient memoization is
/// shared and safe under concurrent read/extend.
#[derive(Clone, Debug)]
pub struct WeightSequence {
    kind: Arc<Kind>,
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

impl WeightSequence {
    pub fn hardy() -> Self {
        WeightSequence { kind: Arc::new(Kind::Hardy) }
    }

    pub fn dirichlet() -> Self {
        WeightSequence { kind: Arc::new(Kind::Dirichlet) }
    }

    pub fn bergman() -> Self {
        WeightSequence { kind: Arc::new(Kind::Bergman) }
    }

    pub fn korenblum() -> Self {
        WeightSequence { kind: Arc::new(Kind::Korenblum) }
    }

    /// Space lookup by name; the kernel series of each named space sums to its
    /// classical closed form.
    pub fn named(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "hardy" => Ok(Self::hardy()),
            "dirichlet" => Ok(Self::dirichlet()),
            "bergman" => Ok(Self::bergman()),
            "korenblum" => Ok(Self::korenblum()),
            other => Err(Error::UnknownSpace(other.to_string())),
        }
    }

    pub fn from_phi(spec: PhiSpec) -> Self {
        WeightSequence {
            kind: Arc::new(Kind::Phi {
                spec,
                log_recips: RwLock::new(vec![0.0]),
            }),
        }
    }

    /// Custom weights. The list must start with `lambda_0 = 1` and be strictly
    /// positive; indices past the end of the list repeat the final weight.
    pub fn custom(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidWeights("weight list is empty".into()));
        }
        if (lambda[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!(
                "lambda_0 = {} violates the normalization lambda_0 = 1",
                lambda[0]
            )));
        }
        if !lambda.iter().all(|x| x.is_finite() && *x > 0.0) {
            return Err(Error::InvalidWeights(
                "weights must be finite and strictly positive".into(),
            ));
        }
        let mut lambda = lambda;
        lambda[0] = 1.0;
        Ok(WeightSequence { kind: Arc::new(Kind::Custom(lambda)) })
    }

    /// `lambda_n`.
    pub fn weight(&self, n: usize) -> f64 {
        1.0 / self.recip(n)
    }

    /// `1 / lambda_n`; for phi spaces this is the memoized series coefficient
    /// `b_n` of the generating function.
    pub fn recip(&self, n: usize) -> f64 {
        match &*self.kind {
            Kind::Hardy => 1.0,
            Kind::Dirichlet => 1.0 / (n as f64 + 1.0),
            Kind::Bergman => n as f64 + 1.0,
            Kind::Korenblum => {
                if n == 0 {
                    1.0
                } else {
                    1.0 / ((n * n) as f64)
                }
            }
            Kind::Phi { .. } => self.ln_recip(n).exp(),
            Kind::Custom(lambda) => 1.0 / lambda[n.min(lambda.len() - 1)],
        }
    }

    /// `ln(1/lambda_n)`, exact in log space; the primitive used by
    /// operator-norm scans where `1/lambda_n` itself underflows.
    pub fn ln_recip(&self, n: usize) -> f64 {
        match &*self.kind {
            Kind::Hardy => 0.0,
            Kind::Dirichlet => -(n as f64 + 1.0).ln(),
            Kind::Bergman => (n as f64 + 1.0).ln(),
            Kind::Korenblum => {
                if n == 0 {
                    0.0
                } else {
                    -2.0 * (n as f64).ln()
                }
            }
            Kind::Phi { spec, log_recips } => {
                {
                    let cache = log_recips.read().unwrap();
                    if n < cache.len() {
                        return cache[n];
                    }
                }
                let mut cache = log_recips.write().unwrap();
                while cache.len() <= n {
                    let k = cache.len();
                    let a = &spec.a;
                    let lnb = log_sum_exp(
                        a.iter()
                            .enumerate()
                            .take(k)
                            .filter(|(_, am)| **am > 0.0)
                            .map(|(i, am)| am.ln() + cache[k - (i + 1)]),
                    );
                    cache.push(lnb);
                }
                cache[n]
            }
            Kind::Custom(lambda) => -lambda[n.min(lambda.len() - 1)].ln(),
        }
    }

    /// `(C, alpha)` with `1/lambda_n <= C (n+1)^alpha` for every `n`; feeds the
    /// geometric tail bound of the kernel series.
    fn coeff_growth(&self) -> (f64, f64) {
        match &*self.kind {
            Kind::Hardy | Kind::Dirichlet | Kind::Korenblum => (1.0, 0.0),
            Kind::Bergman => (1.0, 1.0),
            // b_n = sum a_m b_{n-m} <= max_{k<n} b_k * sum a_m <= 1 by induction
            Kind::Phi { .. } => (1.0, 0.0),
            Kind::Custom(lambda) => {
                let c = lambda.iter().fold(1.0_f64, |acc, l| acc.max(1.0 / l));
                (c, 0.0)
            }
        }
    }

    pub fn is_named(&self) -> bool {
        matches!(
            &*self.kind,
            Kind::Hardy | Kind::Dirichlet | Kind::Bergman | Kind::Korenblum
        )
    }

    pub fn phi_spec(&self) -> Option<&PhiSpec> {
        match &*self.kind {
            Kind::Phi { spec, .. } => Some(spec),
            _ => None,
        }
    }

    /// Weight ratios `lambda_{n+1} / lambda_n` for the number of indices a
    /// ratio supremum scan needs; `None` past the end only for custom lists,
    /// where the tail ratio is exactly 1.
    pub(crate) fn explicit_ratio_count(&self) -> Option<usize> {
        match &*self.kind {
            Kind::Custom(lambda) => Some(lambda.len()),
            _ => None,
        }
    }

    /// Canonical textual form, echoed into reports.
    pub fn spec_string(&self) -> String {
        match &*self.kind {
            Kind::Hardy => "hardy".into(),
            Kind::Dirichlet => "dirichlet".into(),
            Kind::Bergman => "bergman".into(),
            Kind::Korenblum => "korenblum".into(),
            Kind::Phi { spec, .. } => {
                let parts: Vec<String> = spec.a.iter().map(|x| format!("{}", x)).collect();
                format!("phi:{}", parts.join(","))
            }
            Kind::Custom(lambda) => {
                let parts: Vec<String> = lambda.iter().map(|x| format!("{}", x)).collect();
                format!("custom:{}", parts.join(","))
            }
        }
    }
}

/// Builds the phi-space weight sequence and materializes `b_0 .. b_degree`,
/// checking positivity of every coefficient on the way.
pub fn weights_from_phi(spec: PhiSpec, degree: usize) -> Result<WeightSequence> {
    if degree < 1 {
        return Err(Error::Precondition("degree must be >= 1".into()));
    }
    let space = WeightSequence::from_phi(spec);
    for n in 0..=degree {
        let lnb = space.ln_recip(n);
        if !lnb.is_finite() {
            return Err(Error::InvalidPhiSpec(format!(
                "series coefficient b_{} is not positive (ln b = {})",
                n, lnb
            )));
        }
    }
    Ok(space)
}

/// A point-evaluation node: the functional `f -> f^(order)(point)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelNode {
    point: Complex64,
    order: usize,
}

impl KernelNode {
    pub fn new(point: Complex64, order: usize) -> Result<Self> {
        if !(point.norm() < 1.0) || !point.re.is_finite() || !point.im.is_finite() {
            return Err(Error::OutsideDisk(point));
        }
        Ok(KernelNode { point, order })
    }

    pub fn point(&self) -> Complex64 {
        self.point
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub(crate) fn origin() -> Self {
        KernelNode { point: Complex64::new(0.0, 0.0), order: 0 }
    }
}

impl fmt::Display for KernelNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 0 {
            write!(f, "k[{}]", self.point)
        } else {
            write!(f, "k[{}; d^{}]", self.point, self.order)
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance {} must be > 0", tol)));
    }
    Ok(())
}

fn check_in_disk(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::OutsideDisk(z));
    }
    Ok(())
}

/// Falling-factorial product `(n)_s = n (n-1) ... (n-s+1)`, `(n)_0 = 1`.
fn falling(n: usize, s: usize) -> f64 {
    let mut p = 1.0;
    for i in 0..s {
        p *= (n - i) as f64;
    }
    p
}

/// Tail bound for `sum_{n > big_n} (n+1)^s rho^n`:
/// `(N+2)^s rho^{N+1} / (1 - rho e^{s/(N+2)})`, valid once the denominator is
/// positive (always, for `N` large enough, since `rho < 1`).
fn poly_geometric_tail(big_n: usize, s: f64, rho: f64) -> Option<f64> {
    let np2 = big_n as f64 + 2.0;
    let growth = rho * (s / np2).exp();
    if growth >= 1.0 {
        return None;
    }
    Some(np2.powf(s) * rho.powi(big_n as i32 + 1) / (1.0 - growth))
}

/// Core series: `sum_{n >= max(su, sw)} (n)_su (n)_sw u^{n-su} conj(w)^{n-sw} / lambda_n`
/// with guaranteed absolute error `<= tol`.
///
/// With `u` an evaluation point and `(w, sw)` a kernel node this is
/// `k_{sw,w}^{(su)}(u)`; with two nodes it is the Gram entry `<k_b, k_a>`.
fn pair_sum(
    space: &WeightSequence,
    u: Complex64,
    su: usize,
    w: Complex64,
    sw: usize,
    tol: f64,
) -> Result<Complex64> {
    let wc = w.conj();
    // a vanishing point collapses the series to at most one term
    if u.norm() == 0.0 {
        if su < sw {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let n = su;
        let val = falling(n, su) * falling(n, sw) * wc.powu((n - sw) as u32) * space.recip(n);
        return Ok(val);
    }
    if wc.norm() == 0.0 {
        if sw < su {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let n = sw;
        let val = falling(n, su) * falling(n, sw) * u.powu((n - su) as u32) * space.recip(n);
        return Ok(val);
    }

    let rho = u.norm() * w.norm();
    let (c_growth, alpha) = space.coeff_growth();
    let s_poly = (su + sw) as f64 + alpha;
    let amp = c_growth * u.norm().powi(-(su as i32)) * w.norm().powi(-(sw as i32));

    let n0 = su.max(sw);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow_u = u.powu((n0 - su) as u32);
    let mut pow_w = wc.powu((n0 - sw) as u32);
    let mut n = n0;
    loop {
        let term = falling(n, su) * falling(n, sw) * pow_u * pow_w * space.recip(n);
        sum += term;
        if let Some(tail) = poly_geometric_tail(n, s_poly, rho) {
            if amp * tail <= tol {
                return Ok(sum);
            }
        }
        if n - n0 > MAX_SERIES_TERMS {
            return Err(Error::SeriesDivergence { rho });
        }
        n += 1;
        pow_u *= u;
        pow_w *= wc;
    }
}

/// Evaluates the kernel `k_{s,w}` at `z` by series summation; absolute error
/// at most `tol`.
pub fn kernel_eval(
    space: &WeightSequence,
    node: &KernelNode,
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    check_in_disk(z)?;
    check_tol(tol)?;
    pair_sum(space, z, 0, node.point, node.order, tol)
}

/// `d/dz` of [`kernel_eval`], by termwise differentiation of the series.
pub fn kernel_eval_dz(
    space: &WeightSequence,
    node: &KernelNode,
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    check_in_disk(z)?;
    check_tol(tol)?;
    let s = node.order;
    let wc = node.point.conj();
    let n0 = s.max(1);

    if wc.norm() == 0.0 {
        // only the n = s term of k_{s,0} survives; its derivative is s! s z^{s-1}
        if s == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Ok(falling(s, s)
            * (s as f64)
            * z.powu((s - 1) as u32)
            * space.recip(s));
    }
    if z.norm() == 0.0 {
        if n0 > 1 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Ok(falling(1, s) * wc.powu((1 - s) as u32) * space.recip(1));
    }

    let rho = z.norm() * node.point.norm();
    let (c_growth, alpha) = space.coeff_growth();
    let s_poly = (s + 1) as f64 + alpha;
    let amp = c_growth * node.point.norm().powi(-(s as i32)) / z.norm();

    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow_z = z.powu((n0 - 1) as u32);
    let mut pow_w = wc.powu((n0 - s) as u32);
    let mut n = n0;
    loop {
        let term = (n as f64) * falling(n, s) * pow_z * pow_w * space.recip(n);
        sum += term;
        if let Some(tail) = poly_geometric_tail(n, s_poly, rho) {
            if amp * tail <= tol {
                return Ok(sum);
            }
        }
        if n - n0 > MAX_SERIES_TERMS {
            return Err(Error::SeriesDivergence { rho });
        }
        n += 1;
        pow_z *= z;
        pow_w *= wc;
    }
}

/// Gram entry `<k_b, k_a> = sum (n)_{sa} (n)_{sb} a^{n-sa} conj(b)^{n-sb} / lambda_n`.
///
/// Hermitian by construction: `gram_entry(a, b) = conj(gram_entry(b, a))`.
pub fn gram_entry(
    space: &WeightSequence,
    a: &KernelNode,
    b: &KernelNode,
    tol: f64,
) -> Result<Complex64> {
    check_tol(tol)?;
    pair_sum(space, a.point, a.order, b.point, b.order, tol)
}

/// Taylor coefficient of the kernel function `k_{s,w}`:
/// `[z^k] k_{s,w} = (k)_s conj(w)^{k-s} / lambda_k` (zero for `k < s`).
pub fn kernel_taylor_coeff(space: &WeightSequence, node: &KernelNode, k: usize) -> Complex64 {
    if k < node.order {
        return Complex64::new(0.0, 0.0);
    }
    // conj(w)^0 = 1 also when w = 0
    let pw = node.point.conj().powu((k - node.order) as u32);
    falling(k, node.order) * pw * space.recip(k)
}

/// Same coefficient without the `1/lambda_k` factor; `<J, g>` for polynomial
/// `g` reduces to `sum_k mu_k conj(g_k)` with `mu_k` built from these.
pub fn kernel_weighted_coeff(node: &KernelNode, k: usize) -> Complex64 {
    if k < node.order {
        return Complex64::new(0.0, 0.0);
    }
    let pw = node.point.conj().powu((k - node.order) as u32);
    falling(k, node.order) * pw
}
