//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or validation
//! error, 3 group or family incompatibility.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::dirichlet;
use crate::error::Error;
use crate::io::{self, IoError};
use crate::verify::{self, Suite};

#[derive(Debug, Parser)]
#[command(name = "hausdorff", version, about = "Discrete Hausdorff operators on ordered dual groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply an operator config to a spectrum file.
    Apply { config: PathBuf, spectrum: PathBuf, output: PathBuf },
    /// Run a verification suite and write a JSON report.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Transform a Dirichlet coefficient file.
    Dirichlet {
        #[arg(long, value_enum)]
        op: DirichletOp,
        config: PathBuf,
        coeffs: PathBuf,
        output: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirichletOp {
    Sigma,
    Rootscale,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

fn domain_code(e: &Error) -> i32 {
    match e {
        Error::GroupMismatch { .. } | Error::FamilyMismatch { .. } => EXIT_MISMATCH,
        _ => EXIT_INPUT,
    }
}

fn io_code(e: &IoError) -> i32 {
    match e {
        IoError::Domain { source, .. } => domain_code(source),
        IoError::File { .. } | IoError::Invalid { .. } => EXIT_INPUT,
    }
}

fn fail(context: &Path, e: impl std::fmt::Display, code: i32) -> i32 {
    eprintln!("error: {}: {e}", context.display());
    code
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Apply { config, spectrum, output } => apply(&config, &spectrum, &output),
        Command::Verify { suite, seed, report } => verify_cmd(suite, seed, &report),
        Command::Dirichlet { op, config, coeffs, output } => dirichlet_cmd(op, &config, &coeffs, &output),
    }
}

fn apply(config: &Path, spectrum: &Path, output: &Path) -> i32 {
    let h = match io::read_json(config).and_then(|v| io::operator_from_json(&v)) {
        Ok(h) => h,
        Err(e) => return fail(config, &e, io_code(&e)),
    };
    let s = match io::read_json(spectrum).and_then(|v| io::spectrum_from_json(&v)) {
        Ok(s) => s,
        Err(e) => return fail(spectrum, &e, io_code(&e)),
    };
    let out = match h.apply(&s) {
        Ok(out) => out,
        Err(e) => return fail(spectrum, &e, domain_code(&e)),
    };
    match io::write_json(output, &io::spectrum_to_json(&out)) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(output, &e, EXIT_INPUT),
    }
}

fn verify_cmd(suite: Suite, seed: u64, report_path: &Path) -> i32 {
    let report = match verify::run_suite(suite, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: suite {} could not complete: {e}", suite.name());
            return EXIT_FAILED;
        }
    };
    for c in &report.checks {
        println!(
            "{:<26} {}  instances={:<5} max_deviation={:.3e} tolerance={:.1e}",
            c.id,
            if c.pass { "pass" } else { "FAIL" },
            c.instances,
            c.max_deviation,
            c.tolerance
        );
    }
    if let Err(e) = io::write_json(report_path, &report.to_json()) {
        return fail(report_path, &e, EXIT_INPUT);
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn dirichlet_cmd(op: DirichletOp, config: &Path, coeffs: &Path, output: &Path) -> i32 {
    let d = match io::read_json(coeffs).and_then(|v| io::dirichlet_from_json(&v)) {
        Ok(d) => d,
        Err(e) => return fail(coeffs, &e, io_code(&e)),
    };
    let cfg = match io::read_json(config) {
        Ok(v) => v,
        Err(e) => return fail(config, &e, io_code(&e)),
    };
    let result = match op {
        DirichletOp::Sigma => io::sigma_weights_from_json(&cfg).map(|w| dirichlet::sigma_operator(&w, &d)),
        DirichletOp::Rootscale => io::root_weights_from_json(&cfg).map(|w| dirichlet::root_rescale_operator(&w, &d)),
    };
    let out = match result {
        Ok(Ok(out)) => out,
        Ok(Err(e)) => return fail(coeffs, &e, domain_code(&e)),
        Err(e) => return fail(config, &e, io_code(&e)),
    };
    match io::write_json(output, &io::dirichlet_to_json(&out)) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(output, &e, EXIT_INPUT),
    }
}
