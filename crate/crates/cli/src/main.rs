//! `adp`: verification scans and divisor experiments for the binary
//! additive divisor problem.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on
//! bad flags or an unusable output directory.

mod commands;
mod report;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{corollary, divisor, gamma, lambda, lemma2};
use crate::report::{CommandError, Run};

#[derive(Parser, Debug)]
#[command(name = "adp", version, about = "Numerical checks for the binary additive divisor problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Log-gamma and digamma identities.
    VerifyGamma(gamma::GammaArgs),
    /// Large-y behaviour of the prefactored hypergeometric function.
    VerifyCorollary(corollary::CorollaryArgs),
    /// Weight integral against its envelope.
    ScanLambda(lambda::LambdaArgs),
    /// Remainder integral and its seven-piece majorant.
    VerifyLemma2(lemma2::Lemma2Args),
    /// Divisor correlations, error terms and bound comparison.
    DivisorExperiment(divisor::DivisorArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyGamma(_) => "verify-gamma",
            Command::VerifyCorollary(_) => "verify-corollary",
            Command::ScanLambda(_) => "scan-lambda",
            Command::VerifyLemma2(_) => "verify-lemma2",
            Command::DivisorExperiment(_) => "divisor-experiment",
        }
    }

    fn out_dir(&self) -> &Path {
        match self {
            Command::VerifyGamma(a) => &a.out_dir,
            Command::VerifyCorollary(a) => &a.out_dir,
            Command::ScanLambda(a) => &a.out_dir,
            Command::VerifyLemma2(a) => &a.out_dir,
            Command::DivisorExperiment(a) => &a.out_dir,
        }
    }

    fn execute(&self, run: &mut Run) -> Result<(), CommandError> {
        match self {
            Command::VerifyGamma(a) => gamma::run(a, run),
            Command::VerifyCorollary(a) => corollary::run(a, run),
            Command::ScanLambda(a) => lambda::run(a, run),
            Command::VerifyLemma2(a) => lemma2::run(a, run),
            Command::DivisorExperiment(a) => divisor::run(a, run),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut run = Run::new(cli.command.name(), cli.command.out_dir());
    run.param("out-dir", cli.command.out_dir().display());
    let status = match cli.command.execute(&mut run) {
        Ok(()) => {
            run.print_summary();
            if run.all_pass() {
                0
            } else {
                1
            }
        }
        Err(CommandError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    };
    if let Err(e) = run.write_manifest(status) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(status as u8)
}
