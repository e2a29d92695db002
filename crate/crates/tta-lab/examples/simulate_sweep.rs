//! Sweep the probability that the removal inequality holds as pairwise
//! error correlation grows: highly correlated augmentation groups become
//! redundant.
//!
//! ```text
//! cargo run --example simulate_sweep
//! ```

use tta_lab::{fig1_experiment, SimulationConfig};

fn main() {
    let config = SimulationConfig {
        m: 10,
        n_samples: 100,
        n_trials: 1000,
        seed: 42,
        rho_grid: Some(vec![
            0.0, 0.1, 0.2, 0.3, 0.33, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99,
        ]),
        ..SimulationConfig::default()
    };

    let outcomes = fig1_experiment(&config).expect("valid sweep config");

    println!(
        "Pr(removal inequality holds), m={}, {} samples, {} trials per point",
        config.m, config.n_samples, config.n_trials
    );
    println!("{:>6}  {:>12}  bar", "rho", "probability");
    for o in &outcomes {
        let bar = "#".repeat((o.probability_holds * 50.0).round() as usize);
        println!("{:>6.2}  {:>12.3}  {}", o.rho, o.probability_holds, bar);
    }
}
