use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gippa_cli::commands::{self, ReproduceTarget};
use gippa_cli::config::ConstructMethod;
use gippa_cli::exit_codes;

/// Warped-resolvent proximal solvers for inclusion problems 0 ∈ F(x) with
/// possibly non-monotone F.
#[derive(Parser)]
#[command(name = "gippa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem described by a TOML config file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides output.dir from the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct a kernel matrix for A and certify the resulting pair.
    Kernel {
        /// CSV file holding the square matrix A.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Perturbation matrix A1 (perturbation method only).
        #[arg(long)]
        a1: Option<PathBuf>,
        /// Output CSV file for the kernel.
        #[arg(long)]
        out: PathBuf,
    },
    /// Certify monotonicity of the linear pair (A, B).
    Certify {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Re-run a bundled benchmark configuration or parameter sweep.
    Reproduce {
        #[arg(value_enum)]
        target: TargetArg,
        #[arg(long)]
        out: PathBuf,
        /// Additionally render an SVG error plot.
        #[arg(long)]
        plot: bool,
    },
    /// Fit a geometric convergence rate to a trace (or bare series) file.
    Rate {
        #[arg(long)]
        trace: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Perturbation,
    Symmetric,
    Factored,
}

impl From<MethodArg> for ConstructMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Perturbation => ConstructMethod::Perturbation,
            MethodArg::Symmetric => ConstructMethod::Symmetric,
            MethodArg::Factored => ConstructMethod::Factored,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    #[value(name = "example1-v1")]
    Example1V1,
    #[value(name = "example1-v2")]
    Example1V2,
    Example2,
    Figure1a,
    Figure1b,
    Figure3a,
    Figure3b,
}

impl From<TargetArg> for ReproduceTarget {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Example1V1 => ReproduceTarget::Example1V1,
            TargetArg::Example1V2 => ReproduceTarget::Example1V2,
            TargetArg::Example2 => ReproduceTarget::Example2,
            TargetArg::Figure1a => ReproduceTarget::Figure1a,
            TargetArg::Figure1b => ReproduceTarget::Figure1b,
            TargetArg::Figure3a => ReproduceTarget::Figure3a,
            TargetArg::Figure3b => ReproduceTarget::Figure3b,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve { config, out } => commands::cmd_solve(&config, out.as_deref()),
        Command::Kernel { matrix, method, a1, out } => {
            commands::cmd_kernel(&matrix, method.into(), a1.as_deref(), &out)
        }
        Command::Certify { a, b } => commands::cmd_certify(&a, &b),
        Command::Reproduce { target, out, plot } => {
            commands::cmd_reproduce(target.into(), &out, plot)
        }
        Command::Rate { trace } => commands::cmd_rate(&trace),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(exit_codes::CONFIG_OR_IO as u8)
        }
    }
}
