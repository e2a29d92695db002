//! Decide which augmentation strategies are redundant under uniform
//! weighting and prune them greedily.
//!
//! ```text
//! cargo run --example prune_redundant
//! ```

use tta_lab::{greedy_prune, prune_check, GammaMatrix};

fn main() {
    // strategies 1 and 2 are near-duplicates with inflated variance;
    // strategy 0 is cheaper and only mildly correlated with them
    let gamma = GammaMatrix::from_rows(
        &[
            vec![1.0, 0.5, 0.55],
            vec![0.5, 2.0, 1.9],
            vec![0.55, 1.9, 2.1],
        ],
        500,
    )
    .unwrap();

    println!("single-strategy removal checks:");
    for k in 0..gamma.size() {
        let d = prune_check(&gamma, k).unwrap();
        println!(
            "  k={}: lhs {:>8.3}, rhs {:>8.3}, removable {:>5}, \
             uniform risk {:.4} -> {:.4}",
            k, d.lhs, d.rhs, d.removable, d.risk_before, d.risk_after
        );
    }

    println!();
    println!("greedy pruning down to one strategy:");
    let decisions = greedy_prune(&gamma, 1).unwrap();
    if decisions.is_empty() {
        println!("  nothing is removable");
    }
    for d in &decisions {
        println!(
            "  removed strategy {} (margin {:.3}); uniform risk {:.4} -> {:.4}",
            d.index_k,
            d.margin(),
            d.risk_before,
            d.risk_after
        );
    }
}
