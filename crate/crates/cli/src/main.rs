//! `qst`: kernel evaluation, decay analysis, slice transforms, diagram
//! expansion and commutative-limit tables on the command line.
//!
//! Exit codes: 0 success, 1 tolerance breach, 2 input or parse error,
//! 3 expansion guard exceeded.

mod commands;
mod input;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{Body, Outcome};
use input::ParseError;
use table::Format;

#[derive(Debug, Parser)]
#[command(name = "qst", version, about = "Non-local scalar field toolkit on quantum spacetime")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Global {
    /// Planck length λ_P.
    #[arg(long, global = true, default_value_t = 1.0, value_parser = positive)]
    pub lambda_p: f64,
    /// Gauss–Legendre nodes in cos θ for the sphere quadrature (φ uses twice as many).
    #[arg(long, global = true, default_value_t = 64)]
    pub quad_order: usize,
    /// Output format; `expand` defaults to json, every other verb to csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for probe sets.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Kernel evaluator used by `slice`.
    #[arg(long, global = true, default_value = "closed")]
    pub kernel: String,
    /// Allowed closed-form vs quadrature gap in `kernel`.
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive)]
    pub tol: f64,
    /// Relative residual below which a direction lies on a variety.
    #[arg(long, global = true, default_value_t = qst_core::microlocal::DEFAULT_VARIETY_TOL, value_parser = positive)]
    pub variety_tol: f64,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// β±, closed form, quadrature, split and variety class per configuration.
    Kernel(commands::KernelArgs),
    /// Asymptote and decay exponent of Λ along each ray.
    Decay(commands::DecayArgs),
    /// Inverse Fourier transform of the kernel on a 1-D or 2-D momentum slice.
    Slice(commands::SliceArgs),
    /// Symbolic perturbative expansion of the interacting field.
    Expand(commands::ExpandArgs),
    /// sup |Λ − 1| over the momentum ball against the analytic bound.
    Limits(commands::LimitsArgs),
    /// Uncertainty relations for the optimally localized state or given widths.
    Stur(commands::SturArgs),
}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Kernel(a) => commands::kernel(g, a),
        Command::Decay(a) => commands::decay(g, a),
        Command::Slice(a) => commands::slice(g, a),
        Command::Expand(a) => commands::expand(g, a),
        Command::Limits(a) => commands::limits(g, a),
        Command::Stur(a) => commands::stur(g, a),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    let mut sink: Box<dyn Write> = match &cli.global.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = BufWriter::new(&mut sink);
    match &outcome.body {
        Body::Table(t) => t.write(cli.global.format.unwrap_or(Format::Csv), &mut w)?,
        Body::Json(v) => {
            serde_json::to_writer_pretty(&mut w, v)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(qst_core::Error::Guard(_)) = err.downcast_ref::<qst_core::Error>() {
        return 3;
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| emit(&cli, &outcome).map(|()| outcome));
    match result {
        Ok(Outcome { breach: None, .. }) => ExitCode::SUCCESS,
        Ok(Outcome { breach: Some(report), .. }) => {
            eprintln!("tolerance breach:\n{report}");
            ExitCode::from(1)
        }
        Err(err) => {
            match err.downcast_ref::<ParseError>() {
                Some(p) => eprintln!("error: parse error at {p}"),
                None => eprintln!("error: {err:#}"),
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
