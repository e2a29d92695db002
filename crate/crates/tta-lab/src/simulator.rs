//! Synthetic correlated-error generation and Monte Carlo verification of the
//! averaging bound, the independence ratio, the removal-inequality sweep and
//! the consistency of the augmented empirical risk.
//!
//! Errors follow the exchangeable Gaussian model
//! `ε_i = σ(√ρ·z + √(1−ρ)·u_i)` with `z, u_i` independent standard normals
//! per sample, so every pair of strategies has correlation `ρ` and variance
//! `σ²`. Labels are fixed at zero and predictions are `−ε_i`, which makes the
//! residual of column `i` exactly `ε_i`.
//!
//! Trials run on independent substreams keyed by `(seed, trial)`, so parallel
//! and serial execution produce identical results, and the same draws are
//! reused across the points of a ρ-sweep (common random numbers).

use nalgebra::{DMatrix, DVector};
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{PredictionSet, WeightVector};
use crate::error::{Error, Result};
use crate::pruning::prune_check;
use crate::risk::{direct_risk, estimate_gamma};

/// Pointwise slack for the averaging bound (an algebraic fact, not a
/// statistical one).
pub const JENSEN_TOL: f64 = 1e-12;

/// Parameters for the synthetic-error experiments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    /// Number of augmentation strategies.
    pub m: usize,
    /// Pairwise error correlation in `[0, 1]`.
    pub rho: f64,
    /// Error scale (standard deviation); zero collapses to exact residuals.
    pub sigma: f64,
    /// Samples per trial.
    pub n_samples: usize,
    /// Independent trials per experiment.
    pub n_trials: usize,
    /// Root seed; every result is a pure function of the config.
    pub seed: u64,
    /// Correlations to sweep in [`fig1_experiment`].
    pub rho_grid: Option<Vec<f64>>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            m: 10,
            rho: 0.5,
            sigma: 1.0,
            n_samples: 100,
            n_trials: 100,
            seed: 0,
            rho_grid: None,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidConfig(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "sigma must be a nonnegative finite value, got {}",
                self.sigma
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidConfig(
                "n_samples must be at least 2".into(),
            ));
        }
        if self.n_trials < 1 {
            return Err(Error::InvalidConfig("n_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Aggregated removal-inequality outcome at one correlation level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub rho: f64,
    /// Fraction of trials in which the inequality held; exactly
    /// `per_trial_flags.count(true) / trials`.
    pub probability_holds: f64,
    pub trials: usize,
    pub per_trial_flags: Vec<bool>,
}

fn substream(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// N×m matrix of correlated errors; the single sampling routine behind every
/// experiment.
fn sample_errors(rng: &mut ChaCha12Rng, n: usize, m: usize, rho: f64, sigma: f64) -> DMatrix<f64> {
    let sq_common = rho.sqrt();
    let sq_own = (1.0 - rho).sqrt();
    let normal = StandardNormal;
    let mut errors = DMatrix::zeros(n, m);
    for s in 0..n {
        let z: f64 = normal.sample(rng);
        for i in 0..m {
            let u: f64 = normal.sample(rng);
            errors[(s, i)] = sigma * (sq_common * z + sq_own * u);
        }
    }
    errors
}

fn errors_to_predictions(errors: DMatrix<f64>) -> PredictionSet {
    let n = errors.nrows();
    let m = errors.ncols();
    let labels = DVector::zeros(n);
    let predictions = -errors;
    let names = (1..=m).map(|i| format!("aug_{}", i)).collect();
    PredictionSet::from_parts(labels, predictions, names)
        .expect("generator output is finite and well shaped")
}

/// Draw one synthetic calibration set with the configured correlation
/// structure. Residuals of column `i` equal the generated `ε_i` exactly.
pub fn generate_correlated_errors(config: &SimulationConfig) -> Result<PredictionSet> {
    config.validate()?;
    let mut rng = substream(config.seed, 0);
    let errors = sample_errors(&mut rng, config.n_samples, config.m, config.rho, config.sigma);
    Ok(errors_to_predictions(errors))
}

/// Sweep the removal inequality over `rho_grid`.
///
/// Each trial draws fresh errors, estimates Γ and tests removal of the first
/// strategy; the outcome aggregates how often the inequality held. Trials are
/// embarrassingly parallel on per-trial substreams.
pub fn fig1_experiment(config: &SimulationConfig) -> Result<Vec<TrialOutcome>> {
    config.validate()?;
    let grid = config
        .rho_grid
        .as_ref()
        .filter(|g| !g.is_empty())
        .ok_or_else(|| Error::InvalidConfig("rho_grid must be nonempty".into()))?;
    for rho in grid {
        if !(0.0..=1.0).contains(rho) {
            return Err(Error::InvalidConfig(format!(
                "rho_grid entry {} outside [0, 1]",
                rho
            )));
        }
    }
    let mut outcomes = Vec::with_capacity(grid.len());
    for &rho in grid {
        let per_trial_flags: Vec<bool> = (0..config.n_trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = substream(config.seed, trial as u64);
                let errors =
                    sample_errors(&mut rng, config.n_samples, config.m, rho, config.sigma);
                let data = errors_to_predictions(errors);
                let gamma = estimate_gamma(&data);
                prune_check(&gamma, 0).map(|d| d.removable)
            })
            .collect::<Result<_>>()?;
        let holds = per_trial_flags.iter().filter(|f| **f).count();
        outcomes.push(TrialOutcome {
            rho,
            probability_holds: holds as f64 / config.n_trials as f64,
            trials: config.n_trials,
            per_trial_flags,
        });
    }
    Ok(outcomes)
}

/// Per-trial verification that the uniform combiner never beats the average
/// single-strategy error from below: `tta ≤ avg + JENSEN_TOL`, every trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremOneReport {
    pub trials: usize,
    pub violations: usize,
    /// Largest observed `tta − avg` (at most round-off when the bound holds).
    pub max_excess: f64,
    pub mean_tta_risk: f64,
    pub mean_average_risk: f64,
    /// Mean TTA risk over mean average risk; `1/m` under independence, `1`
    /// under perfect correlation.
    pub ratio_of_means: f64,
    pub pass: bool,
}

pub fn verify_theorem1(config: &SimulationConfig) -> Result<TheoremOneReport> {
    config.validate()?;
    let uniform = WeightVector::uniform(config.m)?;
    let mut violations = 0usize;
    let mut max_excess = f64::NEG_INFINITY;
    let mut sum_tta = 0.0;
    let mut sum_avg = 0.0;
    for trial in 0..config.n_trials {
        let mut rng = substream(config.seed, trial as u64);
        let errors = sample_errors(
            &mut rng,
            config.n_samples,
            config.m,
            config.rho,
            config.sigma,
        );
        let data = errors_to_predictions(errors);
        let tta = direct_risk(&data, &uniform)?;
        let mut avg = 0.0;
        for i in 0..config.m {
            let mut col = 0.0;
            for s in 0..config.n_samples {
                let r = data.residual(s, i);
                col += r * r;
            }
            avg += col / config.n_samples as f64;
        }
        avg /= config.m as f64;
        let excess = tta - avg;
        if excess > JENSEN_TOL {
            violations += 1;
        }
        max_excess = max_excess.max(excess);
        sum_tta += tta;
        sum_avg += avg;
    }
    let mean_tta_risk = sum_tta / config.n_trials as f64;
    let mean_average_risk = sum_avg / config.n_trials as f64;
    let ratio_of_means = if mean_average_risk == 0.0 {
        1.0
    } else {
        mean_tta_risk / mean_average_risk
    };
    Ok(TheoremOneReport {
        trials: config.n_trials,
        violations,
        max_excess,
        mean_tta_risk,
        mean_average_risk,
        ratio_of_means,
        pass: violations == 0,
    })
}

/// Ratio check under independence: with ρ = 0 the TTA risk is `1/m` of the
/// average risk; the report carries a delta-method Monte Carlo standard
/// error for the pooled ratio estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremTwoReport {
    /// Pooled sample count, `n_trials · n_samples`.
    pub samples: usize,
    pub tta_risk: f64,
    pub average_risk: f64,
    pub ratio: f64,
    pub expected_ratio: f64,
    pub std_error: f64,
    /// `|ratio − 1/m| ≤ 3·std_error`.
    pub pass: bool,
}

pub fn verify_theorem2(config: &SimulationConfig) -> Result<TheoremTwoReport> {
    config.validate()?;
    if config.rho != 0.0 {
        return Err(Error::InvalidConfig(format!(
            "the independence ratio check requires rho = 0, got {}",
            config.rho
        )));
    }
    let m = config.m as f64;
    let mut sa = 0.0;
    let mut sb = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for trial in 0..config.n_trials {
        let mut rng = substream(config.seed, trial as u64);
        let errors = sample_errors(&mut rng, config.n_samples, config.m, 0.0, config.sigma);
        for s in 0..config.n_samples {
            let mut mean = 0.0;
            let mut mean_sq = 0.0;
            for i in 0..config.m {
                let e = errors[(s, i)];
                mean += e;
                mean_sq += e * e;
            }
            mean /= m;
            mean_sq /= m;
            let a = mean * mean;
            sa += a;
            sb += mean_sq;
            saa += a * a;
            sbb += mean_sq * mean_sq;
            sab += a * mean_sq;
        }
    }
    let samples = config.n_trials * config.n_samples;
    let count = samples as f64;
    let tta_risk = sa / count;
    let average_risk = sb / count;
    let expected_ratio = 1.0 / m;
    let (ratio, std_error) = if average_risk == 0.0 {
        // degenerate sigma = 0: both risks vanish identically
        (1.0, 0.0)
    } else {
        let ratio = tta_risk / average_risk;
        let var_resid =
            (saa - 2.0 * ratio * sab + ratio * ratio * sbb) / count - {
                let r = tta_risk - ratio * average_risk;
                r * r
            };
        let std_error = (var_resid.max(0.0) / count).sqrt() / average_risk;
        (ratio, std_error)
    };
    Ok(TheoremTwoReport {
        samples,
        tta_risk,
        average_risk,
        ratio,
        expected_ratio,
        std_error,
        pass: (ratio - expected_ratio).abs() <= 3.0 * std_error,
    })
}

/// Deviation of the augmented empirical risk from its analytic expectation
/// `σ²` along a growing sample-size grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub n_grid: Vec<usize>,
    /// Closed-form expectation of the per-draw squared error (`σ²`).
    pub analytic_risk: f64,
    /// Mean absolute deviation from `analytic_risk` at each grid size.
    pub mean_abs_devs: Vec<f64>,
    /// Steps on which the deviation shrank (an exact zero staying zero also
    /// counts, so the σ = 0 degenerate case is not a spurious failure).
    pub improved_steps: usize,
    pub total_steps: usize,
    /// Majority of steps improved.
    pub pass: bool,
}

pub fn verify_consistency(config: &SimulationConfig, n_grid: &[usize]) -> Result<ConsistencyReport> {
    config.validate()?;
    if n_grid.is_empty() {
        return Err(Error::InvalidConfig("n_grid must be nonempty".into()));
    }
    for w in n_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidConfig(
                "n_grid must be strictly increasing".into(),
            ));
        }
    }
    if n_grid[0] < 2 {
        return Err(Error::InvalidConfig("n_grid entries must be at least 2".into()));
    }
    let analytic_risk = config.sigma * config.sigma;
    let mut mean_abs_devs = Vec::with_capacity(n_grid.len());
    for (gi, &n) in n_grid.iter().enumerate() {
        let mut dev_sum = 0.0;
        for trial in 0..config.n_trials {
            let stream = (gi * config.n_trials + trial) as u64;
            let mut rng = substream(config.seed, stream);
            let errors = sample_errors(&mut rng, n, config.m, config.rho, config.sigma);
            let mut acc = 0.0;
            for s in 0..n {
                for i in 0..config.m {
                    let e = errors[(s, i)];
                    acc += e * e;
                }
            }
            let risk = acc / (n * config.m) as f64;
            dev_sum += (risk - analytic_risk).abs();
        }
        mean_abs_devs.push(dev_sum / config.n_trials as f64);
    }
    let mut improved_steps = 0usize;
    for w in mean_abs_devs.windows(2) {
        if w[1] < w[0] || (w[1] == w[0] && w[0] == 0.0) {
            improved_steps += 1;
        }
    }
    let total_steps = n_grid.len() - 1;
    Ok(ConsistencyReport {
        n_grid: n_grid.to_vec(),
        analytic_risk,
        mean_abs_devs,
        improved_steps,
        total_steps,
        pass: 2 * improved_steps > total_steps || total_steps == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::weighted_risk;
    use approx::assert_relative_eq;

    fn config() -> SimulationConfig {
        SimulationConfig::default()
    }

    #[test]
    fn generator_is_reproducible() {
        let cfg = SimulationConfig {
            m: 4,
            rho: 0.3,
            seed: 99,
            ..config()
        };
        let a = generate_correlated_errors(&cfg).unwrap();
        let b = generate_correlated_errors(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rho_one_duplicates_columns_exactly() {
        let cfg = SimulationConfig {
            m: 5,
            rho: 1.0,
            ..config()
        };
        let d = generate_correlated_errors(&cfg).unwrap();
        for s in 0..d.n_samples() {
            let first = d.predictions()[(s, 0)];
            for i in 1..5 {
                assert_eq!(d.predictions()[(s, i)], first);
            }
        }
    }

    #[test]
    fn sigma_zero_gives_zero_gamma() {
        let cfg = SimulationConfig {
            m: 3,
            sigma: 0.0,
            ..config()
        };
        let d = generate_correlated_errors(&cfg).unwrap();
        let g = estimate_gamma(&d);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.entry(i, j), 0.0);
            }
        }
    }

    #[test]
    fn rho_zero_offdiagonal_correlations_vanish() {
        let n = 10_000;
        let cfg = SimulationConfig {
            m: 4,
            rho: 0.0,
            n_samples: n,
            seed: 7,
            ..config()
        };
        let d = generate_correlated_errors(&cfg).unwrap();
        let g = estimate_gamma(&d);
        let bound = 4.0 / (n as f64).sqrt();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let corr = g.entry(i, j) / (g.entry(i, i) * g.entry(j, j)).sqrt();
                assert!(
                    corr.abs() < bound,
                    "corr({}, {}) = {} exceeds {}",
                    i,
                    j,
                    corr,
                    bound
                );
            }
        }
    }

    #[test]
    fn sample_gamma_converges_to_population_moments() {
        // population Γ = σ²[(1−ρ)I + ρJ]; entrywise error is O(1/√N)
        let rho = 0.6;
        let sigma = 1.5;
        let mut previous = f64::INFINITY;
        for n in [500, 32_000] {
            let cfg = SimulationConfig {
                m: 3,
                rho,
                sigma,
                n_samples: n,
                seed: 11,
                ..config()
            };
            let g = estimate_gamma(&generate_correlated_errors(&cfg).unwrap());
            let mut worst = 0.0f64;
            for i in 0..3 {
                for j in 0..3 {
                    let target = if i == j {
                        sigma * sigma
                    } else {
                        sigma * sigma * rho
                    };
                    worst = worst.max((g.entry(i, j) - target).abs());
                }
            }
            assert!(worst < 5.0 * sigma * sigma / (n as f64).sqrt());
            assert!(worst < previous);
            previous = worst;
        }
    }

    #[test]
    fn fig1_requires_nonempty_grid() {
        let cfg = SimulationConfig {
            rho_grid: None,
            ..config()
        };
        assert!(matches!(
            fig1_experiment(&cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn fig1_is_reproducible_and_counts_exactly() {
        let cfg = SimulationConfig {
            m: 4,
            n_trials: 50,
            rho_grid: Some(vec![0.2, 0.8]),
            seed: 3,
            ..config()
        };
        let a = fig1_experiment(&cfg).unwrap();
        let b = fig1_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        for outcome in &a {
            let holds = outcome.per_trial_flags.iter().filter(|f| **f).count();
            assert_eq!(
                outcome.probability_holds,
                holds as f64 / outcome.trials as f64
            );
        }
    }

    #[test]
    fn fig1_perfect_correlation_always_ties() {
        let cfg = SimulationConfig {
            m: 6,
            n_samples: 2_000,
            n_trials: 200,
            rho_grid: Some(vec![1.0]),
            seed: 21,
            ..config()
        };
        let outcomes = fig1_experiment(&cfg).unwrap();
        assert_eq!(outcomes[0].probability_holds, 1.0);
    }

    #[test]
    fn theorem1_holds_across_configurations() {
        for (m, rho, seed) in [(1, 0.0, 1), (4, 0.0, 2), (3, 0.7, 3), (5, 1.0, 4)] {
            let cfg = SimulationConfig {
                m,
                rho,
                n_trials: 50,
                seed,
                ..config()
            };
            let rep = verify_theorem1(&cfg).unwrap();
            assert!(rep.pass, "violations at m={} rho={}", m, rho);
            assert_eq!(rep.violations, 0);
        }
    }

    #[test]
    fn theorem1_ratio_reflects_correlation_regime() {
        let independent = verify_theorem1(&SimulationConfig {
            m: 4,
            rho: 0.0,
            n_samples: 2_000,
            n_trials: 30,
            seed: 5,
            ..config()
        })
        .unwrap();
        assert!((independent.ratio_of_means - 0.25).abs() < 0.02);

        let duplicated = verify_theorem1(&SimulationConfig {
            m: 4,
            rho: 1.0,
            n_trials: 10,
            seed: 6,
            ..config()
        })
        .unwrap();
        assert_relative_eq!(duplicated.ratio_of_means, 1.0, epsilon = 1e-12);

        let single = verify_theorem1(&SimulationConfig {
            m: 1,
            rho: 0.0,
            n_trials: 10,
            seed: 7,
            ..config()
        })
        .unwrap();
        assert_relative_eq!(single.ratio_of_means, 1.0, epsilon = 1e-12);
        assert!(single.max_excess.abs() <= JENSEN_TOL);
    }

    #[test]
    fn theorem2_ratio_near_one_over_m() {
        let rep = verify_theorem2(&SimulationConfig {
            m: 5,
            rho: 0.0,
            n_samples: 100_000,
            n_trials: 1,
            seed: 12,
            ..config()
        })
        .unwrap();
        assert!(rep.pass, "ratio {} se {}", rep.ratio, rep.std_error);
        assert!((rep.ratio - 0.2).abs() < 0.01);

        let two = verify_theorem2(&SimulationConfig {
            m: 2,
            rho: 0.0,
            n_samples: 100_000,
            n_trials: 1,
            seed: 13,
            ..config()
        })
        .unwrap();
        assert!(two.pass);
        assert!((two.ratio - 0.5).abs() < 0.02);
    }

    #[test]
    fn theorem2_single_strategy_is_exact() {
        let rep = verify_theorem2(&SimulationConfig {
            m: 1,
            rho: 0.0,
            n_trials: 3,
            seed: 2,
            ..config()
        })
        .unwrap();
        assert_eq!(rep.ratio, 1.0);
        assert_eq!(rep.expected_ratio, 1.0);
        assert_eq!(rep.std_error, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn theorem2_rejects_correlated_config() {
        let cfg = SimulationConfig {
            rho: 0.5,
            ..config()
        };
        assert!(matches!(
            verify_theorem2(&cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn consistency_deviation_shrinks() {
        let cfg = SimulationConfig {
            m: 3,
            rho: 0.4,
            n_trials: 50,
            seed: 17,
            ..config()
        };
        let rep = verify_consistency(&cfg, &[100, 400, 1600, 6400]).unwrap();
        assert_eq!(rep.analytic_risk, 1.0);
        assert!(rep.pass, "mean deviations: {:?}", rep.mean_abs_devs);
    }

    #[test]
    fn consistency_sigma_zero_is_exact() {
        let cfg = SimulationConfig {
            sigma: 0.0,
            n_trials: 5,
            ..config()
        };
        let rep = verify_consistency(&cfg, &[100, 400, 1600]).unwrap();
        assert!(rep.mean_abs_devs.iter().all(|d| *d == 0.0));
        assert!(rep.pass);
    }

    #[test]
    fn consistency_rejects_bad_grid() {
        let cfg = config();
        assert!(matches!(
            verify_consistency(&cfg, &[]),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            verify_consistency(&cfg, &[100, 100]),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn uniform_risk_routes_agree_on_simulated_data() {
        let cfg = SimulationConfig {
            m: 6,
            rho: 0.35,
            seed: 23,
            ..config()
        };
        let d = generate_correlated_errors(&cfg).unwrap();
        let w = WeightVector::uniform(6).unwrap();
        let direct = direct_risk(&d, &w).unwrap();
        let via_gamma = weighted_risk(&estimate_gamma(&d), &w).unwrap();
        assert_relative_eq!(direct, via_gamma, epsilon = 1e-12);
    }
}
