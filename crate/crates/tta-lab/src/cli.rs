//! Batch front door shared by the `tta-lab` binary and the integration
//! tests: ingest prediction files, run estimation / optimization / pruning /
//! decomposition / simulation, emit deterministic machine-readable reports.
//!
//! Every report embeds the tool version, a full config echo and the seed.
//! Exit codes: 0 success, 1 input error, 2 numerical failure, 3 verification
//! failure.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use crate::data::WeightVector;
use crate::error::{Error, Result};
use crate::io::{load_predictions, FileFormat};
use crate::optimizer::{
    condition_diagnostics, solve_closed_form, solve_projected, SolverOptions, SolverReport,
};
use crate::pruning::{greedy_prune, PruneDecision};
use crate::report::{serialize_f64_or_inf, to_report_json};
use crate::risk::{decompose, estimate_gamma, weighted_risk, DecompositionReport, GammaMatrix};
use crate::simulator::{
    fig1_experiment, verify_consistency, verify_theorem1, verify_theorem2, ConsistencyReport,
    SimulationConfig, TheoremOneReport, TheoremTwoReport, TrialOutcome,
};

/// Sample sizes used by the consistency suite of the `verify` command.
pub const CONSISTENCY_GRID: [usize; 4] = [100, 400, 1600, 6400];

/// Correlation sweep used by `simulate` when neither `--rho` nor
/// `--rho-grid` is given.
pub fn default_rho_grid() -> Vec<f64> {
    vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    EstimateGamma,
    Optimize,
    Prune,
    Decompose,
    Simulate,
    Verify,
}

impl CommandKind {
    fn name(self) -> &'static str {
        match self {
            CommandKind::EstimateGamma => "estimate-gamma",
            CommandKind::Optimize => "optimize",
            CommandKind::Prune => "prune",
            CommandKind::Decompose => "decompose",
            CommandKind::Simulate => "simulate",
            CommandKind::Verify => "verify",
        }
    }
}

/// One resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Input format for data commands, output format for `simulate`;
    /// inferred from the input extension (respectively JSON) when absent.
    pub format: Option<FileFormat>,
    pub solver: SolverOptions,
    pub sim: SimulationConfig,
    pub min_keep: usize,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            input: None,
            output: None,
            format: None,
            solver: SolverOptions::default(),
            sim: SimulationConfig::default(),
            min_keep: 1,
        }
    }
}

#[derive(Serialize)]
struct ConfigEcho {
    input: Option<String>,
    output: Option<String>,
    format: &'static str,
    ridge_lambda: f64,
    conditioning_threshold: f64,
    projection: bool,
    min_keep: usize,
    m: usize,
    rho: f64,
    sigma: f64,
    n_samples: usize,
    n_trials: usize,
    seed: u64,
    rho_grid: Option<Vec<f64>>,
}

impl ConfigEcho {
    fn new(config: &RunConfig, format: FileFormat) -> Self {
        Self {
            input: config.input.as_ref().map(|p| p.display().to_string()),
            output: config.output.as_ref().map(|p| p.display().to_string()),
            format: format.as_str(),
            ridge_lambda: config.solver.ridge_lambda,
            conditioning_threshold: config.solver.conditioning_threshold,
            projection: config.solver.projection,
            min_keep: config.min_keep,
            m: config.sim.m,
            rho: config.sim.rho,
            sigma: config.sim.sigma,
            n_samples: config.sim.n_samples,
            n_trials: config.sim.n_trials,
            seed: config.sim.seed,
            rho_grid: config.sim.rho_grid.clone(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: ConfigEcho,
    #[serde(flatten)]
    payload: T,
}

fn envelope<T: Serialize>(config: &RunConfig, format: FileFormat, payload: T) -> Envelope<T> {
    Envelope {
        tool: "tta-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: config.command.name(),
        config: ConfigEcho::new(config, format),
        payload,
    }
}

#[derive(Serialize)]
struct GammaPayload {
    augmentations: Vec<String>,
    gamma: GammaMatrix,
    #[serde(serialize_with = "serialize_f64_or_inf")]
    condition_estimate: f64,
}

#[derive(Serialize)]
struct OptimizePayload {
    augmentations: Vec<String>,
    gamma: GammaMatrix,
    #[serde(serialize_with = "serialize_f64_or_inf")]
    condition_estimate: f64,
    /// Quadratic-form risk of equal weights on the unregularized Γ.
    uniform_risk: f64,
    raw: SolverReport,
    projected: Option<SolverReport>,
}

#[derive(Serialize)]
struct PrunePayload {
    augmentations: Vec<String>,
    initial_risk: f64,
    final_risk: f64,
    decisions: Vec<PruneDecision>,
    removed: Vec<String>,
    kept: Vec<String>,
}

#[derive(Serialize)]
struct DecomposePayload {
    augmentations: Vec<String>,
    weights: WeightVector,
    decomposition: DecompositionReport,
}

#[derive(Serialize)]
struct SimulatePayload {
    outcomes: Vec<TrialOutcome>,
}

#[derive(Serialize)]
struct VerifyPayload {
    theorem1: TheoremOneReport,
    theorem2: TheoremTwoReport,
    consistency: ConsistencyReport,
    all_passed: bool,
}

fn emit(config: &RunConfig, contents: &str) -> Result<()> {
    match &config.output {
        Some(path) => {
            fs::write(path, contents)?;
            Ok(())
        }
        None => {
            print!("{}", contents);
            Ok(())
        }
    }
}

fn load_input(config: &RunConfig) -> Result<(crate::data::PredictionSet, FileFormat)> {
    let path = config.input.as_ref().ok_or_else(|| {
        Error::InvalidConfig(format!(
            "the {} command requires --input",
            config.command.name()
        ))
    })?;
    let format = config.format.unwrap_or_else(|| FileFormat::from_path(path));
    Ok((load_predictions(path, format)?, format))
}

/// Execute one command; returns the process exit code.
pub fn run(config: &RunConfig) -> Result<i32> {
    match config.command {
        CommandKind::EstimateGamma => {
            let (data, format) = load_input(config)?;
            let gamma = estimate_gamma(&data);
            let condition_estimate = condition_diagnostics(&gamma);
            let payload = GammaPayload {
                augmentations: data.augmentation_names().to_vec(),
                gamma,
                condition_estimate,
            };
            emit(config, &to_report_json(&envelope(config, format, payload))?)?;
            Ok(0)
        }
        CommandKind::Optimize => {
            let (data, format) = load_input(config)?;
            let gamma = estimate_gamma(&data);
            let condition_estimate = condition_diagnostics(&gamma);
            let uniform = WeightVector::uniform(gamma.size())?;
            let uniform_risk = weighted_risk(&gamma, &uniform)?;
            let raw = solve_closed_form(&gamma, &config.solver)?;
            let projected = if config.solver.projection {
                Some(solve_projected(&gamma, &config.solver)?)
            } else {
                None
            };
            let payload = OptimizePayload {
                augmentations: data.augmentation_names().to_vec(),
                gamma,
                condition_estimate,
                uniform_risk,
                raw,
                projected,
            };
            emit(config, &to_report_json(&envelope(config, format, payload))?)?;
            Ok(0)
        }
        CommandKind::Prune => {
            let (data, format) = load_input(config)?;
            let gamma = estimate_gamma(&data);
            let names = data.augmentation_names();
            let uniform = WeightVector::uniform(gamma.size())?;
            let initial_risk = weighted_risk(&gamma, &uniform)?;
            let decisions = greedy_prune(&gamma, config.min_keep)?;
            let removed: Vec<String> = decisions
                .iter()
                .map(|d| names[d.index_k].clone())
                .collect();
            let mut removed_mask = vec![false; names.len()];
            for d in &decisions {
                removed_mask[d.index_k] = true;
            }
            let kept: Vec<String> = names
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed_mask[*i])
                .map(|(_, n)| n.clone())
                .collect();
            let final_risk = decisions
                .last()
                .map_or(initial_risk, |d| d.risk_after);
            let payload = PrunePayload {
                augmentations: names.to_vec(),
                initial_risk,
                final_risk,
                decisions,
                removed,
                kept,
            };
            emit(config, &to_report_json(&envelope(config, format, payload))?)?;
            Ok(0)
        }
        CommandKind::Decompose => {
            let (data, format) = load_input(config)?;
            let weights = WeightVector::uniform(data.n_augmentations())?;
            let decomposition = decompose(&data, &weights)?;
            let payload = DecomposePayload {
                augmentations: data.augmentation_names().to_vec(),
                weights,
                decomposition,
            };
            emit(config, &to_report_json(&envelope(config, format, payload))?)?;
            Ok(0)
        }
        CommandKind::Simulate => {
            let mut sim = config.sim.clone();
            if sim.rho_grid.as_ref().map_or(true, |g| g.is_empty()) {
                sim.rho_grid = Some(default_rho_grid());
            }
            let outcomes = fig1_experiment(&sim)?;
            let format = config.format.unwrap_or(FileFormat::Json);
            let mut echoed = config.clone();
            echoed.sim = sim;
            let contents = match format {
                FileFormat::Json => {
                    to_report_json(&envelope(&echoed, format, SimulatePayload { outcomes }))?
                }
                FileFormat::Csv => sweep_csv(&outcomes, echoed.sim.seed),
            };
            emit(config, &contents)?;
            Ok(0)
        }
        CommandKind::Verify => {
            let theorem1 = verify_theorem1(&config.sim)?;
            let theorem2 = verify_theorem2(&SimulationConfig {
                rho: 0.0,
                ..config.sim.clone()
            })?;
            let consistency = verify_consistency(&config.sim, &CONSISTENCY_GRID)?;
            let all_passed = theorem1.pass && theorem2.pass && consistency.pass;
            let payload = VerifyPayload {
                theorem1,
                theorem2,
                consistency,
                all_passed,
            };
            let format = config.format.unwrap_or(FileFormat::Json);
            emit(config, &to_report_json(&envelope(config, format, payload))?)?;
            Ok(if all_passed { 0 } else { 3 })
        }
    }
}

/// Plot data for the correlation sweep: one row per correlation level.
fn sweep_csv(outcomes: &[TrialOutcome], seed: u64) -> String {
    let mut out = String::from("rho,probability_holds,trials,seed\n");
    for o in outcomes {
        out.push_str(&format!(
            "{},{},{},{}\n",
            o.rho, o.probability_holds, o.trials, seed
        ));
    }
    out
}
