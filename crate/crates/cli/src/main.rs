use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slitomo::commands::{self, IdlerPosition, Workspace};
use slitomo::config::ExperimentConfig;
use slitomo_core::measurement::NoiseModel;
use slitomo_core::tomography::InversionMethod;

/// Simulation and tomographic reconstruction of two-spatial-qubit states
/// from double-slit apertured photon pairs.
#[derive(Parser)]
#[command(name = "slitomo", version, about)]
struct Cli {
    /// Configuration file (TOML); defaults reproduce the reference setup.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Master seed (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Counts CSV produced by `simulate`.
    #[arg(long = "counts-csv", value_name = "PATH")]
    counts_csv: PathBuf,

    /// Inversion method.
    #[arg(long, value_enum, default_value = "least-squares")]
    method: MethodArg,

    /// Bootstrap resamples for error bars (overrides the config; 0 disables).
    #[arg(long, value_name = "N")]
    bootstrap: Option<usize>,

    /// Exit nonzero when the result violates the Schwarz inequality.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MethodArg {
    /// Per-element closed-form inversion.
    ClosedForm,
    /// Full-system least squares (uses redundant rows).
    LeastSquares,
}

impl From<MethodArg> for InversionMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ClosedForm => InversionMethod::ClosedForm,
            MethodArg::LeastSquares => InversionMethod::LeastSquares,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum NoiseArg {
    Multinomial,
    Poisson,
}

impl From<NoiseArg> for NoiseModel {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::Multinomial => NoiseModel::Multinomial,
            NoiseArg::Poisson => NoiseModel::Poisson,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the two arm states and their mixture as JSON.
    Generate,
    /// Simulate the nine-setting coincidence acquisition into counts.csv.
    Simulate {
        /// State file to measure (default: <out>/rho_the.json).
        #[arg(long, value_name = "PATH")]
        state: Option<PathBuf>,
        /// Coincidences per setting (overrides the config).
        #[arg(long, value_name = "N")]
        counts: Option<u64>,
        /// Counting-noise model (overrides the config).
        #[arg(long, value_enum)]
        noise: Option<NoiseArg>,
    },
    /// Invert a counts CSV into a density matrix with diagnostics.
    Reconstruct(ReconstructArgs),
    /// Scan the fourth-order fringe pattern vs signal-detector position.
    Pattern {
        /// State file to scan (default: <out>/rho_the.json).
        #[arg(long, value_name = "PATH")]
        state: Option<PathBuf>,
        /// Idler-detector preset position.
        #[arg(long, value_enum, conflicts_with = "idler_x")]
        idler_preset: Option<IdlerPresetArg>,
        /// Idler-detector position in meters.
        #[arg(long, value_name = "METERS")]
        idler_x: Option<f64>,
        /// Scan range lo:hi in meters (default from config).
        #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
        range: Option<String>,
        #[arg(long, value_name = "N")]
        points: Option<usize>,
    },
    /// Tabulate measured / decomposed / predicted matrix real parts.
    Histogram {
        #[arg(long, value_name = "PATH")]
        result: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        psi1: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        psi2: Option<PathBuf>,
    },
    /// generate → simulate → reconstruct → patterns → histogram.
    Pipeline {
        #[arg(long, value_enum, default_value = "least-squares")]
        method: MethodArg,
        /// Exit nonzero when the result violates the Schwarz inequality.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum IdlerPresetArg {
    /// Idler on the optical axis (0 mm).
    Zero,
    /// Idler at the measurement-slit spacing Δ (1.376 mm by default).
    Delta,
}

fn parse_range(text: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| anyhow::anyhow!("range must be LO:HI, got '{text}'"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    config.validate()?;
    let ws = Workspace::new(config, cli.out, cli.seed);

    match cli.command {
        Command::Generate => {
            commands::generate(&ws)?;
        }
        Command::Simulate {
            state,
            counts,
            noise,
        } => {
            commands::simulate(&ws, state, counts, noise.map(NoiseModel::from))?;
        }
        Command::Reconstruct(args) => {
            let result =
                commands::reconstruct_counts(&ws, &args.counts_csv, args.method.into(), args.bootstrap)?;
            if args.strict && !result.schwarz_violations.is_empty() {
                eprintln!(
                    "strict: {} Schwarz violation(s) present",
                    result.schwarz_violations.len()
                );
                return Ok(ExitCode::from(2));
            }
        }
        Command::Pattern {
            state,
            idler_preset,
            idler_x,
            range,
            points,
        } => {
            let idler = match (idler_preset, idler_x) {
                (Some(IdlerPresetArg::Zero), None) | (None, None) => IdlerPosition::Zero,
                (Some(IdlerPresetArg::Delta), None) => IdlerPosition::Delta,
                (None, Some(x)) => IdlerPosition::Custom(x),
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let range = range.as_deref().map(parse_range).transpose()?;
            commands::pattern(&ws, state, idler, range, points)?;
        }
        Command::Histogram { result, psi1, psi2 } => {
            commands::histogram(&ws, result, psi1, psi2)?;
        }
        Command::Pipeline { method, strict } => {
            let result = commands::pipeline(&ws, method.into())?;
            if strict && !result.schwarz_violations.is_empty() {
                eprintln!(
                    "strict: {} Schwarz violation(s) present",
                    result.schwarz_violations.len()
                );
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
