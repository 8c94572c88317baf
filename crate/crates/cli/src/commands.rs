//! Subcommand handlers. Every JSON report echoes the space specification,
//! the tolerance, and the truncation/residual certificates it relied on, so
//! results are auditable without rerunning.

use num_complex::Complex64;
use rkinner::extra_zeros::{
    det_r_residual, extra_zero_lower_bound, phi_space_extra_zero, scan_extra_zeros, ScanOptions,
};
use rkinner::lp::{dual_infimum_norm, lp_inner_function, lp_zero_set_trace, metric_project, LpSeries};
use rkinner::operators::{
    adjoint_inner_check, check_inner, krylov_inner, make_example_operator, ExampleOperator,
    OperatorSpec,
};
use rkinner::zero_sets::{blaschke_sum, shapiro_shields, zero_set_certificate, Boundedness, SsVerdict};
use rkinner::{closed_form_one_point, solve_inner, Error, Result, ZeroConfig};

use crate::args::{ExtraCmd, Format, LpCmd, OpCmd};
use crate::input;
use crate::json::Json;

pub enum Output {
    Report(Json),
    Table(String),
}

fn zeros_from_args(
    zeros: &Option<String>,
    zeros_file: &Option<String>,
) -> Result<Vec<(Complex64, usize)>> {
    match (zeros, zeros_file) {
        (Some(inline), None) => Ok(input::parse_points(inline)?
            .into_iter()
            .map(|w| (w, 1))
            .collect()),
        (None, Some(path)) => input::read_points_file(path),
        (None, None) => Ok(Vec::new()),
        (Some(_), Some(_)) => Err(Error::Precondition(
            "give zeros inline or as a file, not both".into(),
        )),
    }
}

fn config_json(config: &ZeroConfig) -> Json {
    Json::Arr(
        config
            .groups()
            .iter()
            .map(|(w, r)| {
                Json::Obj(vec![
                    ("point", Json::complex(*w)),
                    ("multiplicity", Json::Int(*r as i64)),
                ])
            })
            .collect(),
    )
}

pub fn inner_cmd(
    space_arg: &str,
    zeros: &Option<String>,
    zeros_file: &Option<String>,
    tol: f64,
) -> Result<Output> {
    let space = input::parse_space(space_arg)?;
    let zero_list = zeros_from_args(zeros, zeros_file)?;
    let config = ZeroConfig::new(&zero_list, true)?;
    let rep = solve_inner(&space, &config, tol)?;

    let mut fields = vec![
        ("space", Json::Str(space.spec_string())),
        ("tolerance", Json::Num(tol)),
        ("zeros", config_json(&config)),
        ("coefficients", Json::complex_vec(&rep.coefficients)),
        ("norm", Json::Num(rep.norm())),
        ("norm_squared", Json::Num(rep.norm_squared)),
        ("interpolation_residual", Json::Num(rep.interpolation_residual)),
        (
            "inner_residuals",
            Json::Arr(
                rep.residual_report
                    .iter()
                    .map(|(m, r)| Json::Arr(vec![Json::Int(*m as i64), Json::Num(*r)]))
                    .collect(),
            ),
        ),
        ("condition_estimate", Json::Num(rep.condition_estimate)),
        ("ill_conditioned", Json::Bool(rep.ill_conditioned)),
    ];

    // one-point configurations admit the closed-form oracle
    if config.groups().len() == 1 && config.groups()[0].1 == 1 {
        let oracle = closed_form_one_point(&space, config.groups()[0].0, tol)?;
        let diff = rep
            .coefficients
            .iter()
            .zip(oracle.coefficients.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        fields.push((
            "one_point_check",
            Json::Obj(vec![
                ("coefficients", Json::complex_vec(&oracle.coefficients)),
                ("max_coefficient_diff", Json::Num(diff)),
            ]),
        ));
    }
    Ok(Output::Report(Json::Obj(fields)))
}

pub fn zeroset_cmd(
    space_arg: &str,
    points: &Option<String>,
    points_file: &Option<String>,
    n_max: usize,
    bound: f64,
    tol: f64,
    format: Format,
) -> Result<Output> {
    let space = input::parse_space(space_arg)?;
    let zero_list = zeros_from_args(points, points_file)?;
    // multiplicities enter the trace as repeated points
    let pts: Vec<Complex64> = zero_list
        .iter()
        .flat_map(|(w, m)| std::iter::repeat(*w).take(*m))
        .collect();
    let verdict = zero_set_certificate(&space, &pts, n_max, bound, tol)?;
    let distinct = ZeroConfig::from_points(&pts)
        .map(|c| c.all_simple() && c.groups().len() == pts.len())
        .unwrap_or(false);
    let ss = if distinct {
        Some(shapiro_shields(&space, &pts, n_max, tol)?)
    } else {
        None
    };

    if format == Format::Csv {
        let mut out = String::from("n,norm,partial_product,min_eigenvalue\n");
        for (i, nrm) in verdict.norms.iter().enumerate() {
            let (pp, me) = match &ss {
                Some(r) if i < r.partial_products.len() => (
                    crate::json::format_float(r.partial_products[i]),
                    crate::json::format_float(r.min_eigenvalues[i]),
                ),
                _ => (String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                i + 1,
                crate::json::format_float(*nrm),
                pp,
                me
            ));
        }
        return Ok(Output::Table(out));
    }

    let bounded = match verdict.bounded {
        Boundedness::CertifiedBounded => "certified-bounded",
        Boundedness::CertifiedGrowing => "certified-growing",
        Boundedness::Inconclusive => "inconclusive",
    };
    let mut fields = vec![
        ("space", Json::Str(space.spec_string())),
        ("tolerance", Json::Num(tol)),
        ("points", Json::complex_vec(&pts)),
        ("n_max", Json::Int(n_max as i64)),
        ("bound", Json::Num(bound)),
        ("verdict", Json::Str(bounded.into())),
        ("norms", Json::num_vec(&verdict.norms)),
        ("blaschke_sum", Json::Num(blaschke_sum(&pts))),
    ];
    if let Some(est) = verdict.sup_estimate {
        fields.push(("sup_norm_squared_estimate", Json::Num(est)));
    }
    if let Some(from) = verdict.oracle_from {
        fields.push(("product_oracle_from", Json::Int(from as i64)));
    }
    if let Some(r) = ss {
        let v = match r.verdict {
            SsVerdict::SufficientConditionMet => "sufficient-condition-met",
            SsVerdict::Inconclusive => "inconclusive",
            SsVerdict::NotMet => "not-met",
        };
        let mut ss_fields = vec![
            ("verdict", Json::Str(v.into())),
            ("min_eigenvalues", Json::num_vec(&r.min_eigenvalues)),
            ("partial_products", Json::num_vec(&r.partial_products)),
        ];
        if let Some(floor) = r.product_floor {
            ss_fields.push(("product_floor", Json::Num(floor)));
        }
        fields.push(("shapiro_shields", Json::Obj(ss_fields)));
    }
    Ok(Output::Report(Json::Obj(fields)))
}

pub fn extra_cmd(cmd: &ExtraCmd, tol: f64, format: Format) -> Result<Output> {
    match cmd {
        ExtraCmd::Bound { space, point } => {
            let space = input::parse_space(space)?;
            let w = input::parse_complex(point)?;
            let b = extra_zero_lower_bound(&space, w)?;
            Ok(Output::Report(Json::Obj(vec![
                ("space", Json::Str(space.spec_string())),
                ("point", Json::complex(w)),
                ("bound", Json::Num(b.bound)),
                ("shift_norm", Json::Num(b.report.shift_norm)),
                ("backward_shift_norm", Json::Num(b.report.backward_shift_norm)),
                ("qw_norm_estimate", Json::Num(b.report.qw_norm)),
                ("truncation_degree", Json::Int(b.report.truncation_degree as i64)),
                ("converged", Json::Bool(b.report.converged)),
            ])))
        }
        ExtraCmd::Detr { space, zeros, candidate } => {
            let space = input::parse_space(space)?;
            let zeros = input::parse_points(zeros)?;
            let cand = input::parse_complex(candidate)?;
            let d = det_r_residual(&space, &zeros, cand, tol)?;
            Ok(Output::Report(Json::Obj(vec![
                ("space", Json::Str(space.spec_string())),
                ("tolerance", Json::Num(tol)),
                ("zeros", Json::complex_vec(&zeros)),
                ("candidate", Json::complex(cand)),
                ("det_r", Json::complex(d.value)),
                ("log_abs", Json::Num(d.log_abs)),
                ("relative", Json::Num(d.relative)),
            ])))
        }
        ExtraCmd::Scan { space, zeros, zeros_file, r_max, grid } => {
            let space = input::parse_space(space)?;
            let zero_list = zeros_from_args(zeros, zeros_file)?;
            let config = ZeroConfig::new(&zero_list, true)?;
            let (na, nr) = parse_grid(grid)?;
            let opts = ScanOptions {
                grid_angles: na,
                grid_radii: nr,
                keep_trace: format == Format::Csv,
                ..Default::default()
            };
            let report = scan_extra_zeros(&space, &config, *r_max, &opts, tol)?;
            if format == Format::Csv {
                let mut out = String::from("r,theta,abs_j\n");
                for (r, theta, v) in report.trace.unwrap_or_default() {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        crate::json::format_float(r),
                        crate::json::format_float(theta),
                        crate::json::format_float(v)
                    ));
                }
                return Ok(Output::Table(out));
            }
            let findings: Vec<Json> = report
                .findings
                .iter()
                .map(|f| {
                    Json::Obj(vec![
                        ("location", Json::complex(f.location)),
                        ("residual", Json::Num(f.residual)),
                        ("det_r", Json::complex(f.det_r.value)),
                        ("det_r_relative", Json::Num(f.det_r.relative)),
                        ("bound", Json::Num(f.bound)),
                        ("bound_converged", Json::Bool(f.bound_converged)),
                        ("bound_satisfied", Json::Bool(f.bound_satisfied)),
                    ])
                })
                .collect();
            Ok(Output::Report(Json::Obj(vec![
                ("space", Json::Str(space.spec_string())),
                ("tolerance", Json::Num(tol)),
                ("zeros", config_json(&config)),
                ("r_max", Json::Num(*r_max)),
                (
                    "grid",
                    Json::Arr(vec![Json::Int(na as i64), Json::Int(nr as i64)]),
                ),
                ("findings", Json::Arr(findings)),
                ("unrefined_candidates", Json::Int(report.unrefined.len() as i64)),
            ])))
        }
        ExtraCmd::Phizeta { a1, a2, w } => {
            let w = input::parse_complex(w)?;
            let zeta = phi_space_extra_zero(*a1, *a2, w)?;
            Ok(Output::Report(Json::Obj(vec![
                ("a1", Json::Num(*a1)),
                ("a2", Json::Num(*a2)),
                ("w", Json::complex(w)),
                ("zeta", Json::complex(zeta)),
                ("zeta_abs", Json::Num(zeta.norm())),
            ])))
        }
    }
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = text.split('x').collect();
    if parts.len() != 2 {
        return Err(Error::Precondition(format!(
            "grid must be ANGLESxRADII, got `{}`",
            text
        )));
    }
    let na = parts[0]
        .parse()
        .map_err(|_| Error::Precondition(format!("invalid grid angles `{}`", parts[0])))?;
    let nr = parts[1]
        .parse()
        .map_err(|_| Error::Precondition(format!("invalid grid radii `{}`", parts[1])))?;
    Ok((na, nr))
}

pub fn lp_cmd(cmd: &LpCmd, tol: f64, format: Format) -> Result<Output> {
    match cmd {
        LpCmd::Inner { p, zeros, degree } => {
            let pts = input::parse_points(zeros)?;
            let rep = lp_inner_function(*p, &pts, *degree, tol)?;
            Ok(Output::Report(Json::Obj(vec![
                ("p", Json::Num(*p)),
                ("tolerance", Json::Num(tol)),
                ("points", Json::complex_vec(&pts)),
                ("multiplier_degree", Json::Int(rep.multiplier_degree as i64)),
                ("norm", Json::Num(rep.norm)),
                ("bj_residual_max", Json::Num(rep.bj_residual_max)),
                ("j_coefficients", Json::complex_vec(rep.j.coeffs())),
            ])))
        }
        LpCmd::Project { p, input: path } => {
            let data = input::read_lp_project_file(path)?;
            let f = LpSeries::new(data.f, *p)?;
            let basis: Vec<LpSeries> = data
                .basis
                .into_iter()
                .map(|b| LpSeries::new(b, *p))
                .collect::<Result<_>>()?;
            let proj = metric_project(&f, &basis, tol.min(1e-9))?;
            Ok(Output::Report(Json::Obj(vec![
                ("p", Json::Num(*p)),
                ("tolerance", Json::Num(tol)),
                ("beta", Json::complex_vec(&proj.beta)),
                ("residual_norm", Json::Num(proj.residual.norm())),
                ("bj_residuals", Json::num_vec(&proj.bj_residuals)),
                ("iterations", Json::Int(proj.iterations as i64)),
            ])))
        }
        LpCmd::Trace { p, zeros, n_max, degree } => {
            let pts = input::parse_points(zeros)?;
            let norms = lp_zero_set_trace(*p, &pts, *n_max, *degree, tol)?;
            if format == Format::Csv {
                let mut out = String::from("n,norm\n");
                for (i, nrm) in norms.iter().enumerate() {
                    out.push_str(&format!("{},{}\n", i + 1, crate::json::format_float(*nrm)));
                }
                return Ok(Output::Table(out));
            }
            Ok(Output::Report(Json::Obj(vec![
                ("p", Json::Num(*p)),
                ("tolerance", Json::Num(tol)),
                ("points", Json::complex_vec(&pts)),
                ("norms", Json::num_vec(&norms)),
            ])))
        }
        LpCmd::Dual { p, zeros, degree } => {
            let pts = input::parse_points(zeros)?;
            let value = dual_infimum_norm(*p, &pts, *degree, tol)?;
            Ok(Output::Report(Json::Obj(vec![
                ("p", Json::Num(*p)),
                ("tolerance", Json::Num(tol)),
                ("points", Json::complex_vec(&pts)),
                ("degree", Json::Int(*degree as i64)),
                ("norm_via_dual", Json::Num(value)),
            ])))
        }
    }
}

pub fn op_cmd(cmd: &OpCmd, tol: f64) -> Result<Output> {
    match cmd {
        OpCmd::Krylov { input: path } => {
            let data = input::read_operator_file(path)?;
            let v = data.vector.ok_or_else(|| {
                Error::Precondition("operator file must carry a \"vector\" entry".into())
            })?;
            let t = OperatorSpec::new(data.matrix)?;
            let k = krylov_inner(&t, &v, tol)?;
            let check = if k.vector.norm() > 0.0 {
                let c = check_inner(&t, &k.vector, t.dim(), (tol * 10.0).max(1e-10))?;
                Some(c.certified)
            } else {
                None
            };
            let mut fields = vec![
                ("tolerance", Json::Num(tol)),
                (
                    "vector",
                    Json::complex_vec(&k.vector.iter().cloned().collect::<Vec<_>>()),
                ),
                ("krylov_rank", Json::Int(k.rank as i64)),
                ("projection_norm", Json::Num(k.projection_norm)),
            ];
            if let Some(cert) = check {
                fields.push(("certified_inner", Json::Bool(cert)));
            }
            Ok(Output::Report(Json::Obj(fields)))
        }
        OpCmd::Check { input: path, n_max } => {
            let data = input::read_operator_file(path)?;
            let v = data.vector.ok_or_else(|| {
                Error::Precondition("operator file must carry a \"vector\" entry".into())
            })?;
            let t = OperatorSpec::new(data.matrix)?;
            let n = n_max.unwrap_or(t.dim());
            let c = check_inner(&t, &v, n, tol)?;
            Ok(Output::Report(Json::Obj(vec![
                ("tolerance", Json::Num(tol)),
                ("n_max", Json::Int(n as i64)),
                ("residuals", Json::num_vec(&c.residuals)),
                ("certified", Json::Bool(c.certified)),
            ])))
        }
        OpCmd::Adjoint { input: path, n_max } => {
            let data = input::read_operator_file(path)?;
            let v = data.vector.ok_or_else(|| {
                Error::Precondition("operator file must carry a \"vector\" entry".into())
            })?;
            let t = OperatorSpec::new(data.matrix)?;
            let n = n_max.unwrap_or(t.dim());
            let agree = adjoint_inner_check(&t, &v, n, tol)?;
            Ok(Output::Report(Json::Obj(vec![
                ("tolerance", Json::Num(tol)),
                ("n_max", Json::Int(n as i64)),
                ("agree", Json::Bool(agree)),
            ])))
        }
        OpCmd::Example { kind, dim, power, space, symbol } => {
            let op = match kind.as_str() {
                "compressed_shift" => {
                    make_example_operator(ExampleOperator::CompressedShift { dim: *dim })?
                }
                "compressed_shift_power" => {
                    make_example_operator(ExampleOperator::CompressedShiftPower {
                        dim: *dim,
                        power: power.unwrap_or(2),
                    })?
                }
                "toeplitz" => {
                    let sym = symbol.as_ref().ok_or_else(|| {
                        Error::Precondition("toeplitz requires --symbol".into())
                    })?;
                    make_example_operator(ExampleOperator::ToeplitzTruncation {
                        symbol: input::parse_points(sym)?,
                        dim: *dim,
                    })?
                }
                "weighted_shift" => {
                    let sp = input::parse_space(space.as_deref().unwrap_or("hardy"))?;
                    make_example_operator(ExampleOperator::WeightedShift { space: sp, dim: *dim })?
                }
                other => {
                    return Err(Error::Precondition(format!(
                        "unknown operator kind `{}` (compressed_shift, compressed_shift_power, toeplitz, weighted_shift)",
                        other
                    )))
                }
            };
            let rows: Vec<Json> = (0..op.dim())
                .map(|i| {
                    Json::Arr(
                        (0..op.dim())
                            .map(|j| Json::complex(op.matrix[(i, j)]))
                            .collect(),
                    )
                })
                .collect();
            Ok(Output::Report(Json::Obj(vec![
                ("label", Json::Str(op.label.clone().unwrap_or_default())),
                ("dim", Json::Int(op.dim() as i64)),
                ("matrix", Json::Arr(rows)),
            ])))
        }
    }
}
