//! Property suite for zero-set certificates and extra-zero machinery.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rkinner::extra_zeros::{
    backward_shift_norm, det_r_residual, extra_zero_lower_bound, phi_space_extra_zero,
    qw_norm_estimate, scan_extra_zeros, shift_norm, ScanOptions,
};
use rkinner::zero_sets::{
    blaschke_union_inequality, shapiro_shields, zero_set_certificate, Boundedness, SsVerdict,
};
use rkinner::{eval_inner, kernel_eval, solve_inner, KernelNode, PhiSpec, WeightSequence, ZeroConfig};

const TOL: f64 = 1e-12;

fn random_disk_point(rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> Complex64 {
    let r = rng.gen_range(r_min..r_max);
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

fn random_config(rng: &mut ChaCha8Rng, n: usize, r_max: f64) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = Vec::new();
    while pts.len() < n {
        let cand = random_disk_point(rng, 0.08, r_max);
        if pts.iter().all(|p| (p - cand).norm() > 0.08) {
            pts.push(cand);
        }
    }
    pts
}

fn random_phi(rng: &mut ChaCha8Rng) -> PhiSpec {
    // a_1 > 0, nonnegative, sum <= 1
    let m = rng.gen_range(1..=3);
    let mut a = vec![rng.gen_range(0.02..0.5)];
    for _ in 1..m {
        a.push(rng.gen_range(0.0..0.3));
    }
    let sum: f64 = a.iter().sum();
    if sum > 1.0 {
        for x in a.iter_mut() {
            *x /= sum + 0.05;
        }
    }
    PhiSpec::new(a).unwrap()
}

#[test]
fn oppenheim_inequality_on_kernel_matrices() {
    // det(A o B) >= det(A) prod B_tt for PSD Hadamard factors drawn from the
    // kernel construction: A the zero-node Gram matrix, B the criterion
    // matrix with unit diagonal shifts
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let spaces = [
        WeightSequence::hardy(),
        WeightSequence::from_phi(PhiSpec::new(vec![0.04, 0.9]).unwrap()),
        WeightSequence::from_phi(PhiSpec::new(vec![0.3, 0.3, 0.2]).unwrap()),
    ];
    for trial in 0..30 {
        let space = &spaces[trial % spaces.len()];
        let n = rng.gen_range(2..=5);
        let pts = random_config(&mut rng, n, 0.8);
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        let mut b = DMatrix::<Complex64>::zeros(n, n);
        for s in 0..n {
            for t in 0..n {
                let node_t = KernelNode::new(pts[t], 0).unwrap();
                let kts = kernel_eval(space, &node_t, pts[s], 1e-13).unwrap();
                a[(s, t)] = kts;
                b[(s, t)] = Complex64::new(1.0, 0.0) - 1.0 / kts;
            }
        }
        let hadamard = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * b[(i, j)]);
        let det = |m: &DMatrix<Complex64>| -> f64 {
            m.clone().lu().determinant().re
        };
        let prod_diag: f64 = (0..n).map(|t| b[(t, t)].re).product();
        assert!(
            det(&hadamard) >= det(&a) * prod_diag - 1e-10,
            "space {}: {} vs {}",
            space,
            det(&hadamard),
            det(&a) * prod_diag
        );
    }
}

#[test]
fn shapiro_shields_psd_for_random_phi_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(302);
    for _ in 0..5 {
        let space = WeightSequence::from_phi(random_phi(&mut rng));
        for _ in 0..20 {
            let n = rng.gen_range(2..=6);
            let pts = random_config(&mut rng, n, 0.9);
            let r = shapiro_shields(&space, &pts, n, TOL).unwrap();
            for e in &r.min_eigenvalues {
                assert!(*e >= -1e-10, "space {}: min eig {}", space, e);
            }
        }
    }
}

#[test]
fn phi_criterion_matrix_equals_generator_power_sum() {
    // for a generator space the criterion entry 1 - 1/k_{w_t}(w_s) collapses
    // to sum_m a_m (conj(w_t) w_s)^m; this ties the matrix construction to
    // the coefficients directly
    let mut rng = ChaCha8Rng::seed_from_u64(309);
    let spec = PhiSpec::new(vec![0.04, 0.9]).unwrap();
    let space = WeightSequence::from_phi(spec.clone());
    for _ in 0..10 {
        let s = random_disk_point(&mut rng, 0.1, 0.85);
        let t = random_disk_point(&mut rng, 0.1, 0.85);
        let node_t = KernelNode::new(t, 0).unwrap();
        let kts = kernel_eval(&space, &node_t, s, 1e-14).unwrap();
        let entry = Complex64::new(1.0, 0.0) - 1.0 / kts;
        let x = t.conj() * s;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut xm = x;
        for a in spec.coefficients() {
            sum += *a * xm;
            xm *= x;
        }
        assert!((entry - sum).norm() < 1e-12, "{} vs {}", entry, sum);
    }
}

#[test]
fn scan_with_zero_near_the_rim() {
    // a prescribed zero close to the scan radius is still deduplicated
    let space = WeightSequence::dirichlet();
    let config = ZeroConfig::from_points(&[Complex64::new(0.93, 0.0)]).unwrap();
    let opts = ScanOptions { grid_angles: 128, grid_radii: 64, ..Default::default() };
    let report = scan_extra_zeros(&space, &config, 0.95, &opts, TOL).unwrap();
    assert!(report.findings.is_empty(), "{:?}", report.findings);
}

#[test]
fn shapiro_shields_consistency_with_certificate() {
    // whenever the sufficient condition is met the certificate must not
    // report certified growth on the same prefix
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for trial in 0..10 {
        let space = if trial % 2 == 0 {
            WeightSequence::hardy()
        } else {
            WeightSequence::from_phi(PhiSpec::new(vec![0.04, 0.9]).unwrap())
        };
        // geometric approach to the boundary keeps the products positive
        let base: f64 = rng.gen_range(0.3..0.6);
        let pts: Vec<Complex64> = (0..10)
            .map(|j| Complex64::from_polar(1.0 - base * 0.7f64.powi(j), 0.3 * j as f64))
            .collect();
        let ss = shapiro_shields(&space, &pts, pts.len(), TOL).unwrap();
        if ss.verdict == SsVerdict::SufficientConditionMet {
            let v = zero_set_certificate(&space, &pts, pts.len(), 1e12, TOL).unwrap();
            assert_ne!(v.bounded, Boundedness::CertifiedGrowing, "space {}", space);
        }
    }
}

#[test]
fn det_r_matches_inner_function_evaluation() {
    // det R / (sign * det G_prev) = J_{n-1}(candidate)
    let mut rng = ChaCha8Rng::seed_from_u64(304);
    let spaces = [
        WeightSequence::hardy(),
        WeightSequence::dirichlet(),
        WeightSequence::bergman(),
        WeightSequence::from_phi(PhiSpec::new(vec![0.04, 0.9]).unwrap()),
    ];
    for trial in 0..20 {
        let space = &spaces[trial % spaces.len()];
        let n = rng.gen_range(1..=3);
        let pts = random_config(&mut rng, n + 1, 0.8);
        let (zeros, cand) = (&pts[..n], pts[n]);
        let d = det_r_residual(space, zeros, cand, TOL).unwrap();
        let config = ZeroConfig::from_points(zeros).unwrap();
        let rep = solve_inner(space, &config, TOL).unwrap();
        let j = eval_inner(&rep, cand, TOL).unwrap();
        let gram = rkinner::build_gram(space, &config, TOL).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let expect = j * gram.log_det().exp() * sign;
        assert!(
            (d.value - expect).norm() <= 1e-8 * expect.norm().max(1e-8),
            "space {} n {}: {} vs {}",
            space,
            n,
            d.value,
            expect
        );
    }
}

#[test]
fn contractive_spaces_scan_clean() {
    // a light randomized version of the no-extra-zeros corollaries
    let mut rng = ChaCha8Rng::seed_from_u64(305);
    let opts = ScanOptions { grid_angles: 96, grid_radii: 48, ..Default::default() };
    for space in [WeightSequence::dirichlet(), WeightSequence::korenblum()] {
        for _ in 0..5 {
            let n = rng.gen_range(1..=3);
            let pts = random_config(&mut rng, n, 0.8);
            let config = ZeroConfig::from_points(&pts).unwrap();
            let report = scan_extra_zeros(&space, &config, 0.97, &opts, TOL).unwrap();
            assert!(
                report.findings.is_empty(),
                "space {} pts {:?}: findings {:?}",
                space,
                pts,
                report.findings
            );
        }
    }
}

#[test]
fn phi_family_extra_zeros_satisfy_the_bound() {
    // random admissible (a1, a2, w): the scanner finds the predicted zero and
    // the finding obeys the operator-norm lower bound
    let mut rng = ChaCha8Rng::seed_from_u64(306);
    let opts = ScanOptions::default();
    for _ in 0..4 {
        let a1 = rng.gen_range(0.01..0.05);
        let a2 = rng.gen_range(5.0 * a1..0.92);
        let spec = PhiSpec::new(vec![a1, a2]).unwrap();
        // choose |w| with |w| - |w|^2 > a1/a2
        let lo = 0.5 - (0.25 - a1 / a2).sqrt();
        let hi = 0.5 + (0.25 - a1 / a2).sqrt();
        let m = rng.gen_range((lo + 0.02).max(0.3)..(hi - 0.02).min(0.7));
        let w = Complex64::from_polar(m, rng.gen_range(0.0..std::f64::consts::TAU));
        let zeta = phi_space_extra_zero(a1, a2, w).unwrap();
        assert!(zeta.norm() < 1.0);

        let space = WeightSequence::from_phi(spec);
        let config = ZeroConfig::from_points(&[w]).unwrap();
        let report = scan_extra_zeros(&space, &config, 0.97, &opts, TOL).unwrap();
        assert_eq!(report.findings.len(), 1, "a=({}, {}), w={}", a1, a2, w);
        let f = &report.findings[0];
        assert!((f.location - zeta).norm() < 1e-6);
        assert!(f.residual < 1e-8);
        assert!(f.det_r.relative < 1e-8);
        assert!(f.location.norm() >= f.bound - 1e-8, "bound {}", f.bound);
    }
}

#[test]
fn scan_with_multiplicity_config_stays_clean() {
    // derivative nodes in the configuration: the double zero is found by the
    // grid, refined, and deduplicated against the prescribed set
    let space = WeightSequence::dirichlet();
    let config = ZeroConfig::new(&[(Complex64::new(0.4, 0.2), 2)], true).unwrap();
    let opts = ScanOptions { grid_angles: 96, grid_radii: 48, ..Default::default() };
    let report = scan_extra_zeros(&space, &config, 0.95, &opts, TOL).unwrap();
    assert!(report.findings.is_empty(), "{:?}", report.findings);
}

#[test]
fn qw_estimates_consistent_with_diagonal_norms() {
    for space in [
        WeightSequence::hardy(),
        WeightSequence::dirichlet(),
        WeightSequence::bergman(),
        WeightSequence::korenblum(),
    ] {
        let r = qw_norm_estimate(&space, Complex64::new(0.0, 0.0), 16, 1e-6).unwrap();
        assert!((r.qw_norm - backward_shift_norm(&space).unwrap()).abs() < 1e-6);
        assert!((r.shift_norm - shift_norm(&space).unwrap()).abs() < 1e-12);
        // hardy at w != 0: estimates are >= 1
        let est = qw_norm_estimate(&WeightSequence::hardy(), Complex64::new(0.5, 0.0), 16, 1e-3)
            .unwrap();
        assert!(est.qw_norm >= 1.0 - 1e-9);
    }
}

#[test]
fn lower_bound_exceeds_one_on_contractive_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(307);
    for space in [
        WeightSequence::hardy(),
        WeightSequence::dirichlet(),
        WeightSequence::korenblum(),
    ] {
        for _ in 0..2 {
            let w = random_disk_point(&mut rng, 0.2, 0.8);
            let b = extra_zero_lower_bound(&space, w).unwrap();
            assert!(b.bound >= 1.0, "space {} w {}: {}", space, w, b.bound);
        }
    }
}

#[test]
fn bergman_scans_clean_despite_expanding_backward_shift() {
    // ||Q_0|| = sqrt(2) > 1 makes the corollary inapplicable, yet no extra
    // zeros exist; the scan documents that the bound is sufficient, not
    // necessary
    let space = WeightSequence::bergman();
    let opts = ScanOptions { grid_angles: 96, grid_radii: 48, ..Default::default() };
    let config = ZeroConfig::from_points(&[Complex64::new(0.5, 0.0), Complex64::new(-0.2, 0.3)])
        .unwrap();
    let report = scan_extra_zeros(&space, &config, 0.95, &opts, TOL).unwrap();
    assert!(report.findings.is_empty());
}

#[test]
fn union_inequality_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(308);
    for space in [WeightSequence::hardy(), WeightSequence::bergman()] {
        for _ in 0..5 {
            let nb = rng.gen_range(1..=2);
            let ne = rng.gen_range(1..=2);
            let base = random_config(&mut rng, nb, 0.7);
            let extra = random_config(&mut rng, ne, 0.7);
            let r = blaschke_union_inequality(&space, &base, &extra, TOL).unwrap();
            assert!(
                r.holds,
                "space {}: union {} bound {}",
                space, r.union_norm, r.product_bound
            );
        }
    }
}

#[test]
fn certificate_growth_and_oracle_agree() {
    // the same growing family certified with different bounds stays coherent
    let space = WeightSequence::hardy();
    let pts: Vec<Complex64> = (1..=40)
        .map(|j| Complex64::new(1.0 - 1.0 / ((j + 1) as f64), 0.0))
        .collect();
    let strict = zero_set_certificate(&space, &pts, 40, 50.0, TOL).unwrap();
    assert_eq!(strict.bounded, Boundedness::CertifiedGrowing);
    let lax = zero_set_certificate(&space, &pts, 40, 1e8, TOL).unwrap();
    assert_ne!(lax.bounded, Boundedness::CertifiedGrowing);
    // norms agree on the common range
    for (a, b) in strict.norms.iter().zip(lax.norms.iter()) {
        assert!((a - b).abs() < 1e-6);
    }
}
