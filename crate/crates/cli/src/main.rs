//! `divlab`: divergence measures, cost-benefit analysis and fixture
//! reproduction from the command line.
//!
//! Exit status is 0 on success, 1 for invalid input or usage and 2 when a
//! file cannot be read.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use divlab::curves::{DEFAULT_POINTS_PER_DECADE, NEAR_ZERO_RANGE};
use divlab::MeasureId;
use thiserror::Error;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "divlab", version, about, long_about = None)]
pub struct Cli {
    /// Output format. CSV and JSON keep full precision.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Significant digits in table output.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    digits: u8,

    /// Fixtures directory [default: $DIVLAB_FIXTURES, else the shipped fixtures].
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shannon entropy of a PMF.
    Entropy {
        /// PMF file (JSON or CSV).
        #[arg(long)]
        p: PathBuf,
    },
    /// Divergence of P from Q under one or more measures.
    Divergence {
        #[command(flatten)]
        measures: Measures,
        /// First PMF, e.g. the reconstruction (JSON or CSV).
        #[arg(long)]
        p: PathBuf,
        /// Second PMF, e.g. the ground truth.
        #[arg(long)]
        q: PathBuf,
        /// Joint PMF `{"letters": [...], "r": [[...]]}`, needed by `cond`.
        #[arg(long)]
        joint: Option<PathBuf>,
        /// Also print each letter's contribution.
        #[arg(long)]
        per_letter: bool,
    },
    /// Benefit of a process: alphabet compression minus potential distortion.
    Benefit(BenefitArgs),
    /// Benefit divided by cost.
    Ratio {
        #[command(flatten)]
        benefit: BenefitArgs,
        /// Cost of the process, e.g. seconds.
        #[arg(long)]
        cost: f64,
    },
    /// Sweep measures over the two-letter family q1 = (1 - alpha) p1 + alpha (1 - p1).
    Curve {
        #[command(flatten)]
        measures: Measures,
        /// Alpha values, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1"
        )]
        alpha: Vec<f64>,
        /// Evenly spaced p1 values over [0, 1].
        #[arg(long, default_value_t = divlab::curves::DEFAULT_LINEAR_POINTS, conflicts_with = "p1")]
        points: usize,
        /// Explicit p1 values, comma separated and increasing.
        #[arg(long, value_delimiter = ',')]
        p1: Option<Vec<f64>>,
        /// Pass Q first to each measure.
        #[arg(long)]
        q_first: bool,
    },
    /// Log-spaced sweep towards p1 = 0 with alpha = 1.
    Nearzero {
        #[command(flatten)]
        measures: Measures,
        /// Smallest p1.
        #[arg(long, default_value_t = NEAR_ZERO_RANGE.0)]
        lo: f64,
        /// Largest p1, below 0.5.
        #[arg(long, default_value_t = NEAR_ZERO_RANGE.1)]
        hi: f64,
        /// Points per decade of p1.
        #[arg(long, default_value_t = DEFAULT_POINTS_PER_DECADE)]
        per_decade: usize,
    },
    /// Huffman code for a PMF.
    Huffman {
        /// PMF to build the code for.
        #[arg(long)]
        q: PathBuf,
        /// Add entropy, average lengths and the entropy bounds.
        #[arg(long)]
        stats: bool,
    },
    /// Worst-case PMF and code whose one-hot cross entropy reaches n - 1.
    Worstcase {
        /// Alphabet size, at least 2.
        #[arg(long)]
        n: usize,
        /// Smallest probability; must lie in (0, 2^-(n-1)) [default: 2^-n].
        #[arg(long)]
        epsilon: Option<f64>,
        /// Also test the bound on this many random PMF pairs.
        #[arg(long)]
        trials: Option<usize>,
        /// Seed for the random trials.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Staged criteria sums and elimination.
    Mcda {
        /// Criteria table [default: mcda/selection.json under the fixtures].
        #[arg(long)]
        table: Option<PathBuf>,
        /// Elimination plan [default: mcda/selection-plan.json under the fixtures].
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Scenario bundles.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
    /// Survey analyses.
    #[command(subcommand)]
    Survey(SurveyCommand),
    /// Check every fixture against its expected values.
    Reproduce,
}

#[derive(Debug, Subcommand)]
enum ScenarioCommand {
    /// List the bundles in the fixtures directory.
    List,
    /// Evaluate a bundle.
    Run {
        /// Bundle name or file stem.
        name: String,
        /// Measures to use instead of the bundle's own.
        #[arg(long, value_delimiter = ',')]
        measure: Vec<MeasureId>,
    },
}

#[derive(Debug, Subcommand)]
enum SurveyCommand {
    /// Per-question benefit, response time and ratio of the walking-time survey.
    Walking {
        /// Answers CSV [default: survey/walking-time-kcl.csv under the fixtures].
        #[arg(long)]
        answers: Option<PathBuf>,
        /// Question list [default: survey/walking-time-questions.json under the fixtures].
        #[arg(long)]
        questions: Option<PathBuf>,
        /// Measure for the potential distortion.
        #[arg(long, default_value = "dnew:k=2")]
        measure: MeasureId,
    },
    /// Answer tallies of the multiple-choice volume-rendering survey.
    Choices {
        /// Answers CSV [default: survey/volume-rendering.csv under the fixtures].
        #[arg(long)]
        answers: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Measures {
    /// Measures, e.g. kl, kl*0.3, js, cond, dnew:k=2, dncm:k=1, mink:k=200.
    #[arg(long, required = true, value_delimiter = ',')]
    measure: Vec<MeasureId>,
}

#[derive(Debug, Args)]
struct BenefitArgs {
    /// Ground-truth PMF of the process input.
    #[arg(long)]
    input: PathBuf,
    /// PMF of the process output.
    #[arg(long)]
    output: PathBuf,
    /// The viewer's reconstruction of the input.
    #[arg(long)]
    recon: PathBuf,
    /// Measures for the potential distortion: kl or a bounded measure.
    #[arg(long, default_value = "dnew:k=2", value_delimiter = ',')]
    measure: Vec<MeasureId>,
    /// Maximum entropy to scale bounded measures by [default: log2 of the input alphabet size].
    #[arg(long)]
    hmax: Option<f64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] divlab::Error),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_io() => 2,
            CliError::Output(_) => 2,
            _ => 1,
        }
    }
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    /// Output was produced but reports a failed check.
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = commands::run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(CliError::Output(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("divlab: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
