//! Input parsing: space specifications, complex literals, point lists, and
//! the JSON file formats consumed by the subcommands.

use num_complex::Complex64;
use rkinner::{Error, PhiSpec, Result, WeightSequence};
use serde::Deserialize;

/// Space specification: a name, `phi:a1,a2,...`, `custom:l0,l1,...`, or a
/// path to a JSON record {"type":"named"|"phi"|"custom", ...}.
pub fn parse_space(arg: &str) -> Result<WeightSequence> {
    if arg.ends_with(".json") || arg.starts_with('@') {
        let path = arg.strip_prefix('@').unwrap_or(arg);
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Precondition(format!("cannot read space file {}: {}", path, e)))?;
        return parse_space_json(&text);
    }
    if let Some(rest) = arg.strip_prefix("phi:") {
        let a = parse_real_list(rest)?;
        return Ok(WeightSequence::from_phi(PhiSpec::new(a)?));
    }
    if let Some(rest) = arg.strip_prefix("custom:") {
        let lambda = parse_real_list(rest)?;
        return WeightSequence::custom(lambda);
    }
    WeightSequence::named(arg)
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum SpaceRecord {
    Named { name: String },
    Phi { a: Vec<f64> },
    Custom { lambda: Vec<f64> },
}

pub fn parse_space_json(text: &str) -> Result<WeightSequence> {
    let record: SpaceRecord = serde_json::from_str(text)
        .map_err(|e| Error::Precondition(format!("invalid space record: {}", e)))?;
    match record {
        SpaceRecord::Named { name } => WeightSequence::named(&name),
        SpaceRecord::Phi { a } => Ok(WeightSequence::from_phi(PhiSpec::new(a)?)),
        SpaceRecord::Custom { lambda } => WeightSequence::custom(lambda),
    }
}

fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Precondition(format!("invalid real literal `{}`", t.trim())))
        })
        .collect()
}

/// Complex literal: `re`, `re+imi`, `re-imi`, `imi`, `i`, `-i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Precondition("empty complex literal".into()));
    }
    let bad = || Error::Precondition(format!("invalid complex literal `{}`", text));
    if !t.ends_with('i') {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    }
    let body = &t[..t.len() - 1];
    // split off the imaginary part at the last +/- that is not an exponent sign
    let mut split = None;
    for (idx, ch) in body.char_indices().rev() {
        if (ch == '+' || ch == '-') && idx > 0 {
            let prev = body.as_bytes()[idx - 1] as char;
            if prev != 'e' && prev != 'E' {
                split = Some(idx);
                break;
            }
        }
    }
    match split {
        Some(idx) => {
            let re: f64 = body[..idx].parse().map_err(|_| bad())?;
            let im_text = &body[idx..];
            let im: f64 = match im_text {
                "+" => 1.0,
                "-" => -1.0,
                s => s.parse().map_err(|_| bad())?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" => 1.0,
                "-" => -1.0,
                s => s.parse().map_err(|_| bad())?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

/// Comma-separated complex literals.
pub fn parse_points(text: &str) -> Result<Vec<Complex64>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_complex)
        .collect()
}

#[derive(Deserialize)]
struct PointsFile {
    points: Vec<[f64; 2]>,
    multiplicities: Option<Vec<usize>>,
}

/// Reads `{"points":[[re,im],...],"multiplicities":[...]}`.
pub fn read_points_file(path: &str) -> Result<Vec<(Complex64, usize)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("cannot read points file {}: {}", path, e)))?;
    let parsed: PointsFile = serde_json::from_str(&text)
        .map_err(|e| Error::Precondition(format!("invalid points file {}: {}", path, e)))?;
    let mults = match &parsed.multiplicities {
        Some(m) => {
            if m.len() != parsed.points.len() {
                return Err(Error::Precondition(
                    "multiplicities length does not match points length".into(),
                ));
            }
            m.clone()
        }
        None => vec![1; parsed.points.len()],
    };
    Ok(parsed
        .points
        .iter()
        .zip(mults)
        .map(|(p, m)| (Complex64::new(p[0], p[1]), m))
        .collect())
}

#[derive(Deserialize)]
struct OperatorFile {
    matrix: Vec<Vec<[f64; 2]>>,
    vector: Option<Vec<[f64; 2]>>,
}

pub struct OperatorInput {
    pub matrix: nalgebra::DMatrix<Complex64>,
    pub vector: Option<nalgebra::DVector<Complex64>>,
}

/// Reads `{"matrix": [[[re,im],...],...], "vector": [[re,im],...]}`.
pub fn read_operator_file(path: &str) -> Result<OperatorInput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("cannot read operator file {}: {}", path, e)))?;
    let parsed: OperatorFile = serde_json::from_str(&text)
        .map_err(|e| Error::Precondition(format!("invalid operator file {}: {}", path, e)))?;
    let rows = parsed.matrix.len();
    if rows == 0 || parsed.matrix.iter().any(|r| r.len() != rows) {
        return Err(Error::Precondition("matrix must be square and nonempty".into()));
    }
    let matrix = nalgebra::DMatrix::from_fn(rows, rows, |i, j| {
        Complex64::new(parsed.matrix[i][j][0], parsed.matrix[i][j][1])
    });
    let vector = parsed.vector.map(|v| {
        nalgebra::DVector::from_vec(v.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    });
    Ok(OperatorInput { matrix, vector })
}

#[derive(Deserialize)]
struct LpProjectFile {
    f: Vec<[f64; 2]>,
    basis: Vec<Vec<[f64; 2]>>,
}

pub struct LpProjectInput {
    pub f: Vec<Complex64>,
    pub basis: Vec<Vec<Complex64>>,
}

pub fn read_lp_project_file(path: &str) -> Result<LpProjectInput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("cannot read input file {}: {}", path, e)))?;
    let parsed: LpProjectFile = serde_json::from_str(&text)
        .map_err(|e| Error::Precondition(format!("invalid input file {}: {}", path, e)))?;
    let conv = |v: &[[f64; 2]]| v.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    Ok(LpProjectInput {
        f: conv(&parsed.f),
        basis: parsed.basis.iter().map(|b| conv(b)).collect(),
    })
}
