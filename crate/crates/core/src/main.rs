use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lcao_bounds::driver::{load_config, run_experiment, ExperimentConfig, ExperimentKind};
use lcao_bounds::estimator::GapMode;
use lcao_bounds::partition::CaMode;
use lcao_bounds::{Error, Result};

/// Guaranteed a posteriori error bounds for 1D Schrödinger problems in
/// atom-centered Hermite–Gaussian bases.
#[derive(Parser)]
#[command(name = "lcao-bounds", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Basis-size sweep for the source problem with error bounds.
    SourceSweep(RunArgs),
    /// Basis-size sweep for the ground-state eigenpair with error bounds.
    EigSweep(RunArgs),
    /// Greedy atom-wise basis refinement driven by the local indicators.
    Adaptive(RunArgs),
    /// Partition-constant table C(ℓ, ς_a) over the study grid.
    Constants(RunArgs),
    /// Dual-norm enclosures as the spectral truncation J grows.
    SpectralConvergence(RunArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::SourceSweep(a) => (ExperimentKind::SourceSweep, a),
            Command::EigSweep(a) => (ExperimentKind::EigSweep, a),
            Command::Adaptive(a) => (ExperimentKind::Adaptive, a),
            Command::Constants(a) => (ExperimentKind::Constants, a),
            Command::SpectralConvergence(a) => (ExperimentKind::SpectralConvergence, a),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Flat key-value configuration file overriding the defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Source of the lower bound for the next eigenvalue.
    #[arg(long, value_enum, default_value_t = GapModeArg::Oracle)]
    gap_mode: GapModeArg,

    /// How the operator-norm constant c_A is obtained.
    #[arg(long, value_enum, default_value_t = CaModeArg::Optimal)]
    ca_mode: CaModeArg,

    /// Divide the spectral remainder by ε_J instead of ε_{J+1}.
    #[arg(long)]
    remainder_last_kept: bool,

    /// Worker threads for sweep points; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum GapModeArg {
    Nonguaranteed,
    Weyl,
    Oracle,
}

impl From<GapModeArg> for GapMode {
    fn from(a: GapModeArg) -> GapMode {
        match a {
            GapModeArg::Nonguaranteed => GapMode::NonGuaranteed,
            GapModeArg::Weyl => GapMode::Weyl,
            GapModeArg::Oracle => GapMode::Oracle,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CaModeArg {
    Optimal,
    Guaranteed,
}

impl From<CaModeArg> for CaMode {
    fn from(a: CaModeArg) -> CaMode {
        match a {
            CaModeArg::Optimal => CaMode::Optimal,
            CaModeArg::Guaranteed => CaMode::Guaranteed,
        }
    }
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<()> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot size the thread pool: {e}")))?;
    }

    let mut cfg = ExperimentConfig::<f64>::new(kind);
    cfg.gap_mode = args.gap_mode.into();
    cfg.ca_mode = args.ca_mode.into();
    cfg.remainder_last_kept = args.remainder_last_kept;
    if let Some(path) = &args.config {
        cfg = load_config(path, cfg)?;
    }

    let table = run_experiment(&cfg)?;
    let text = match args.format {
        FormatArg::Csv => table.to_csv(),
        FormatArg::Json => table.to_json(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write to stdout: {e}")))?,
    }
    Ok(())
}

fn main() {
    // Per-point sweep failures surface as `nan` table rows plus a warning;
    // show warnings unless RUST_LOG says otherwise.
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    if let Err(e) = run(kind, args) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
