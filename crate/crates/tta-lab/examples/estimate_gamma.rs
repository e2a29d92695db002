//! Estimate the residual co-moment matrix Γ from a small calibration set
//! and inspect its conditioning.
//!
//! ```text
//! cargo run --example estimate_gamma
//! ```

use tta_lab::{condition_diagnostics, estimate_gamma, PredictionSet};

fn main() {
    // Four samples, three augmentation strategies. `flip` and `crop` track
    // the label closely and make similar mistakes; `jitter` is noisier but
    // errs independently.
    let labels = vec![1.0, -0.5, 2.0, 0.0];
    let rows = vec![
        vec![1.1, 1.2, 0.4],
        vec![-0.4, -0.3, -1.2],
        vec![2.2, 2.3, 2.6],
        vec![0.1, 0.2, -0.6],
    ];
    let names = vec!["flip".into(), "crop".into(), "jitter".into()];
    let data = PredictionSet::new(labels, rows, names).expect("valid calibration set");

    let gamma = estimate_gamma(&data);
    println!(
        "Γ estimated from {} samples over {} strategies:",
        gamma.sample_count(),
        gamma.size()
    );
    for i in 0..gamma.size() {
        let row: Vec<String> = (0..gamma.size())
            .map(|j| format!("{:>8.4}", gamma.entry(i, j)))
            .collect();
        println!("  [{}]", row.join(", "));
    }

    println!("condition estimate: {:.3e}", condition_diagnostics(&gamma));
    println!("mean diagonal (ridge scale): {:.4}", gamma.mean_diagonal());
}
