//! Thin command-line wrapper around [`tta_lab::cli`].

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tta_lab::cli::{run, CommandKind, RunConfig};
use tta_lab::io::FileFormat;
use tta_lab::SolverOptions;

#[derive(Parser)]
#[command(
    name = "tta-lab",
    version,
    about = "Residual-correlation analysis, weight optimization, pruning and \
             risk decomposition for test-time augmentation ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the residual co-moment matrix Γ from a prediction file
    EstimateGamma {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Compute closed-form and nonnegative (projected) combination weights
    Optimize {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Greedily drop strategies whose removal does not increase the uniform risk
    Prune {
        #[command(flatten)]
        io: IoArgs,
        /// Stop pruning once this many strategies remain
        #[arg(long, default_value_t = 1)]
        min_keep: usize,
    },
    /// Split the uniform-weight risk into error and ambiguity terms
    Decompose {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Sweep the removal-inequality probability over correlation levels
    Simulate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Run the Monte Carlo theorem-verification suites (exit 3 on failure)
    Verify {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for FileFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => FileFormat::Csv,
            FormatArg::Json => FileFormat::Json,
        }
    }
}

#[derive(Args)]
struct IoArgs {
    /// Prediction file (CSV or JSON)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report destination; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// File format; inferred from the input extension when omitted
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SolverArgs {
    /// Ridge strength relative to the mean diagonal of Γ
    #[arg(long, default_value_t = 1e-8)]
    ridge: f64,
    /// Report only the raw closed form, skipping the projected solve
    #[arg(long)]
    no_projection: bool,
}

#[derive(Args)]
struct SimArgs {
    /// Number of augmentation strategies
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Pairwise error correlation in [0, 1]
    #[arg(long)]
    rho: Option<f64>,
    /// Samples per trial
    #[arg(long, default_value_t = 100)]
    n_samples: usize,
    /// Independent trials per correlation level
    #[arg(long, default_value_t = 100)]
    n_trials: usize,
    /// Root seed for all draws
    #[arg(long, env = "TTA_LAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Comma-separated correlation sweep, e.g. 0.1,0.33,0.99
    #[arg(long, value_delimiter = ',')]
    rho_grid: Option<Vec<f64>>,
}

impl SimArgs {
    fn apply(&self, config: &mut RunConfig, sweeping: bool) {
        config.sim.m = self.m;
        config.sim.rho = self.rho.unwrap_or(config.sim.rho);
        config.sim.n_samples = self.n_samples;
        config.sim.n_trials = self.n_trials;
        config.sim.seed = self.seed;
        config.sim.rho_grid = self.rho_grid.clone();
        if sweeping && config.sim.rho_grid.is_none() {
            config.sim.rho_grid = self.rho.map(|r| vec![r]);
        }
    }
}

impl IoArgs {
    fn apply(&self, config: &mut RunConfig) {
        config.input = self.input.clone();
        config.output = self.output.clone();
        config.format = self.format.map(FileFormat::from);
    }
}

fn build_config(command: &Command) -> RunConfig {
    match command {
        Command::EstimateGamma { io } => {
            let mut config = RunConfig::new(CommandKind::EstimateGamma);
            io.apply(&mut config);
            config
        }
        Command::Optimize { io, solver } => {
            let mut config = RunConfig::new(CommandKind::Optimize);
            io.apply(&mut config);
            config.solver = SolverOptions {
                ridge_lambda: solver.ridge,
                projection: !solver.no_projection,
                ..SolverOptions::default()
            };
            config
        }
        Command::Prune { io, min_keep } => {
            let mut config = RunConfig::new(CommandKind::Prune);
            io.apply(&mut config);
            config.min_keep = *min_keep;
            config
        }
        Command::Decompose { io } => {
            let mut config = RunConfig::new(CommandKind::Decompose);
            io.apply(&mut config);
            config
        }
        Command::Simulate { io, sim } => {
            let mut config = RunConfig::new(CommandKind::Simulate);
            io.apply(&mut config);
            sim.apply(&mut config, true);
            config
        }
        Command::Verify { io, sim } => {
            let mut config = RunConfig::new(CommandKind::Verify);
            io.apply(&mut config);
            sim.apply(&mut config, false);
            config
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = build_config(&cli.command);
    match run(&config) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {}", err);
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
