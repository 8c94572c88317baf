//! Command-line surface.

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "rkinner",
    about = "Inner functions, zero-set certificates, and extra-zero detection in weighted spaces of analytic functions",
    version
)]
pub struct Cli {
    /// Working tolerance for series truncation and certificates
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,

    /// Report format (csv applies to trace-shaped reports)
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed override for randomized reproduction runs
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the inner function of a zero configuration, with the
    /// one-point closed form as a cross-check where it applies
    Inner {
        #[arg(long)]
        space: String,
        /// comma-separated complex zeros, e.g. "0.5,-0.3+0.2i"
        #[arg(long)]
        zeros: Option<String>,
        /// JSON file {"points":[[re,im],...],"multiplicities":[...]}
        #[arg(long)]
        zeros_file: Option<String>,
    },
    /// Zero-set certificate: norm trace, Shapiro-Shields test, Blaschke sum
    Zeroset {
        #[arg(long)]
        space: String,
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        points_file: Option<String>,
        #[arg(long, default_value_t = 30)]
        n_max: usize,
        /// growth threshold compared against the squared norms
        #[arg(long, default_value_t = 1e3)]
        bound: f64,
    },
    /// Extra-zero analysis
    Extra {
        #[command(subcommand)]
        cmd: ExtraCmd,
    },
    /// Banach-space (l^p) operations
    Lp {
        #[command(subcommand)]
        cmd: LpCmd,
    },
    /// Finite-dimensional operator laboratory
    Op {
        #[command(subcommand)]
        cmd: OpCmd,
    },
    /// Reproduce the full verification suite and print a pass/fail table
    Repro {
        /// run a single numbered check
        #[arg(long)]
        only: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExtraCmd {
    /// Operator-norm lower bound for the modulus of any extra zero
    Bound {
        #[arg(long)]
        space: String,
        /// evaluation point for the difference-quotient norm
        #[arg(long)]
        point: String,
    },
    /// Determinant criterion det R for one candidate point
    Detr {
        #[arg(long)]
        space: String,
        #[arg(long)]
        zeros: String,
        #[arg(long)]
        candidate: String,
    },
    /// Grid-plus-Newton scan for zeros beyond the configuration
    Scan {
        #[arg(long)]
        space: String,
        #[arg(long)]
        zeros: Option<String>,
        #[arg(long)]
        zeros_file: Option<String>,
        #[arg(long, default_value_t = 0.95)]
        r_max: f64,
        /// grid as ANGLESxRADII, e.g. 256x128
        #[arg(long, default_value = "256x128")]
        grid: String,
    },
    /// Closed-form extra zero of the quadratic-generator family
    Phizeta {
        #[arg(long)]
        a1: f64,
        #[arg(long)]
        a2: f64,
        #[arg(long)]
        w: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum LpCmd {
    /// l^p inner function of a zero configuration
    Inner {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        zeros: String,
        #[arg(long, default_value_t = 32)]
        degree: usize,
    },
    /// Metric projection of f onto a basis read from a JSON file
    Project {
        #[arg(long)]
        p: f64,
        /// JSON file {"f":[[re,im],...],"basis":[[[re,im],...],...]}
        #[arg(long)]
        input: String,
    },
    /// Norm trace over prefixes of the zero list
    Trace {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        zeros: String,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 32)]
        degree: usize,
    },
    /// Dual-side norm via the evaluation-functional infimum
    Dual {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        zeros: String,
        #[arg(long, default_value_t = 60)]
        degree: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum OpCmd {
    /// Co-projection of v onto its shifted Krylov span
    Krylov {
        /// JSON file {"matrix":[[[re,im],...],...],"vector":[[re,im],...]}
        #[arg(long)]
        input: String,
    },
    /// Residuals |<v, T^n v>| and certification
    Check {
        #[arg(long)]
        input: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Agreement of the certification for T and its adjoint
    Adjoint {
        #[arg(long)]
        input: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Emit a catalog operator as JSON
    Example {
        /// compressed_shift | compressed_shift_power | toeplitz | weighted_shift
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long)]
        power: Option<usize>,
        #[arg(long)]
        space: Option<String>,
        /// comma-separated complex Taylor coefficients for toeplitz
        #[arg(long)]
        symbol: Option<String>,
    },
}
