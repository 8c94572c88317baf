//! Library surface of the command-line front end; exposed so integration
//! tests can drive the subcommand handlers and the reproduction suite
//! directly.

pub mod args;
pub mod commands;
pub mod input;
pub mod json;
pub mod repro;

use args::{Cli, Command};
use commands::Output;
use rkinner::{ErrorKind, Result};

fn deliver(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            rkinner::Error::Precondition(format!("cannot write {}: {}", path.display(), e))
        }),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

/// Executes a parsed invocation and renders its output.
pub fn execute(cli: &Cli) -> Result<String> {
    let out = match &cli.command {
        Command::Inner { space, zeros, zeros_file } => {
            commands::inner_cmd(space, zeros, zeros_file, cli.tol)?
        }
        Command::Zeroset { space, points, points_file, n_max, bound } => commands::zeroset_cmd(
            space,
            points,
            points_file,
            *n_max,
            *bound,
            cli.tol,
            cli.format,
        )?,
        Command::Extra { cmd } => commands::extra_cmd(cmd, cli.tol, cli.format)?,
        Command::Lp { cmd } => commands::lp_cmd(cmd, cli.tol, cli.format)?,
        Command::Op { cmd } => commands::op_cmd(cmd, cli.tol)?,
        Command::Repro { only } => {
            let results = match only {
                Some(id) => repro::run_only(*id, cli.seed),
                None => repro::run_all(cli.seed),
            };
            let mut table = String::new();
            for r in &results {
                table.push_str(&r.line());
                table.push('\n');
            }
            let pass = results.iter().filter(|r| r.pass).count();
            table.push_str(&format!("{}/{} checks passed\n", pass, results.len()));
            // the table is delivered even when a check fails
            deliver(cli, &table)?;
            if pass != results.len() {
                return Err(rkinner::Error::CertificationFailed {
                    context: "reproduction suite",
                    index: results.iter().find(|r| !r.pass).map(|r| r.id).unwrap_or(0),
                    residual: (results.len() - pass) as f64,
                    tol: 0.0,
                });
            }
            return Ok(String::new());
        }
    };
    let text = match out {
        Output::Report(json) => json.render(),
        Output::Table(text) => text,
    };
    deliver(cli, &text)?;
    Ok(text)
}

/// Process exit code for a failed run.
pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Precondition => 2,
        ErrorKind::Certification => 3,
        ErrorKind::NonConvergence => 4,
    }
}
