//! Monte Carlo verification of the averaging guarantees: the upper bound,
//! the 1/m ratio under independence, and the consistency of the augmented
//! empirical risk.
//!
//! ```text
//! cargo run --example verify_theorems
//! ```

use tta_lab::{verify_consistency, verify_theorem1, verify_theorem2, SimulationConfig};

fn main() {
    let base = SimulationConfig {
        m: 5,
        rho: 0.4,
        sigma: 1.0,
        n_samples: 1000,
        n_trials: 200,
        seed: 7,
        rho_grid: None,
    };

    let t1 = verify_theorem1(&base).unwrap();
    println!("averaging bound (ρ = {}):", base.rho);
    println!(
        "  combined ≤ average risk in {}/{} trials (max excess {:.1e})",
        t1.trials - t1.violations,
        t1.trials,
        t1.max_excess
    );
    println!(
        "  mean combined {:.4} vs mean average {:.4} (ratio {:.3})",
        t1.mean_tta_risk, t1.mean_average_risk, t1.ratio_of_means
    );

    let t2 = verify_theorem2(&SimulationConfig {
        rho: 0.0,
        n_samples: 100_000,
        n_trials: 1,
        ..base.clone()
    })
    .unwrap();
    println!();
    println!("independence ratio (ρ = 0):");
    println!(
        "  ratio {:.5} vs 1/m = {:.5} (3·SE = {:.1e}) -> pass: {}",
        t2.ratio,
        t2.expected_ratio,
        3.0 * t2.std_error,
        t2.pass
    );

    let grid = [100, 400, 1600, 6400];
    let lemma = verify_consistency(&base, &grid).unwrap();
    println!();
    println!("consistency of the augmented empirical risk (target σ² = 1):");
    for (n, dev) in grid.iter().zip(&lemma.mean_abs_devs) {
        println!("  N = {:>5}: mean |risk − σ²| = {:.5}", n, dev);
    }
    println!(
        "  shrank on {}/{} steps -> pass: {}",
        lemma.improved_steps, lemma.total_steps, lemma.pass
    );
}
