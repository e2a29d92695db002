//! Split the combined risk into per-strategy error and ambiguity: the
//! ensemble wins exactly when its members are accurate *and* disagree.
//!
//! ```text
//! cargo run --example decompose_risk
//! ```

use tta_lab::{decompose, direct_risk, PredictionSet, WeightVector};

fn main() {
    // two strategies that bracket the label from opposite sides: large
    // individual errors, but the disagreement cancels in the average
    let labels = vec![0.0, 1.0, -1.0, 0.5];
    let rows = vec![
        vec![0.8, -0.8],
        vec![1.9, 0.2],
        vec![-0.2, -1.9],
        vec![1.3, -0.2],
    ];
    let data = PredictionSet::new(
        labels,
        rows,
        vec!["over".into(), "under".into()],
    )
    .unwrap();

    let uniform = WeightVector::uniform(2).unwrap();
    let report = decompose(&data, &uniform).unwrap();

    println!("per-strategy error    : {:?}", report.per_aug_error);
    println!("per-strategy ambiguity: {:?}", report.per_aug_ambiguity);
    println!("weighted error        : {:.6}", report.weighted_error);
    println!("weighted ambiguity    : {:.6}", report.weighted_ambiguity);
    println!("total risk            : {:.6}", report.total_risk);
    println!(
        "direct risk           : {:.6} (same number, computed sample-wise)",
        direct_risk(&data, &uniform).unwrap()
    );
    println!(
        "diversity gain        : {:.1}% of the average error cancelled",
        100.0 * report.weighted_ambiguity / report.weighted_error
    );
}
