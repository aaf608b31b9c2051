use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod io;

/// Exit status when a build aborts or a certificate fails.
const EXIT_FAIL: u8 = 2;
/// Exit status for malformed input.
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "tuniv", version, about = "Build and verify T-universal polynomial series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curve family utilities
    Family {
        #[command(subcommand)]
        command: FamilyCommand,
    },
    /// Decode the canonical enumerations
    Enum {
        #[command(subcommand)]
        command: EnumCommand,
    },
    /// Build a series for a task list and self-verify it
    Build {
        #[arg(long)]
        config: PathBuf,
        /// Series file to write
        #[arg(long)]
        out: PathBuf,
        /// Certificate file (defaults to <out>.certificates.json)
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        control_samples: Option<usize>,
        /// Recorded only; builds are deterministic
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify a series against a task, or re-check its recorded witnesses
    Verify {
        #[arg(long)]
        series: PathBuf,
        /// Task file; without it every recorded witness is re-certified
        #[arg(long)]
        task: Option<PathBuf>,
        /// Check one index tuple m,j,p,s,t,l,k,n instead of searching
        #[arg(long)]
        indices: Option<String>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 1024)]
        control_samples: usize,
        #[arg(long, default_value_t = 1024)]
        k_max: u64,
        #[arg(long, default_value_t = 4096)]
        n_max: u64,
        #[arg(long)]
        allow_version_mismatch: bool,
    },
    /// Split f into g - h with g and h universal for their own task lists
    Decompose {
        #[arg(long)]
        config: PathBuf,
        /// Output prefix; writes <out>.g.json and <out>.h.json
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        control_samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the three-task radii demo end to end
    Demo {
        /// Output directory
        #[arg(long, default_value = "tuniv-demo")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// Check that every sampled member has a subfamily neighbour
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum EnumKind {
    Scale,
    Boundary,
    Rational,
    Poly,
    Tuple,
}

#[derive(Subcommand)]
enum EnumCommand {
    /// Print one element of a sequence
    Show {
        #[arg(long, value_enum)]
        kind: EnumKind,
        /// 1-based index (arbitrary size for rational and poly)
        #[arg(long)]
        index: String,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Family { command: FamilyCommand::Certify { config, report } } => {
            commands::family_certify(&config, report.as_deref())
        }
        Command::Enum { command: EnumCommand::Show { kind, index } } => commands::enum_show(kind, &index),
        Command::Build { config, out, report, max_degree, control_samples, seed } => {
            let overrides = commands::Overrides { max_degree, control_samples, seed };
            commands::build(&config, &out, report.as_deref(), &overrides)
        }
        Command::Verify { series, task, indices, report, control_samples, k_max, n_max, allow_version_mismatch } => {
            let opts = commands::VerifyOptions { control_samples, k_max, n_max, allow_version_mismatch };
            commands::verify(&series, task.as_deref(), indices.as_deref(), &report, &opts)
        }
        Command::Decompose { config, out, report, max_degree, control_samples, seed } => {
            let overrides = commands::Overrides { max_degree, control_samples, seed };
            commands::decompose(&config, &out, report.as_deref(), &overrides)
        }
        Command::Demo { out } => commands::demo(&out),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use tuniv::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::TaskRejected(_) | Error::Certification(_)) => EXIT_FAIL,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
