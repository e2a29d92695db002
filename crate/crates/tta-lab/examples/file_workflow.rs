//! The batch workflow end to end: write a prediction file, load it back,
//! and produce the same optimization report the CLI emits.
//!
//! ```text
//! cargo run --example file_workflow
//! ```

use tta_lab::cli::{run, CommandKind, RunConfig};
use tta_lab::io::{load_predictions, write_predictions, FileFormat};
use tta_lab::PredictionSet;

fn main() {
    let dir = std::env::temp_dir().join("tta-lab-example");
    std::fs::create_dir_all(&dir).expect("create scratch directory");
    let csv_path = dir.join("calibration.csv");
    let report_path = dir.join("optimize.json");

    // residual columns are orthogonal with norms² 2 and 8, so Γ = diag(1, 4)
    let data = PredictionSet::new(
        vec![0.0, 0.0],
        vec![vec![-1.0, -2.0], vec![1.0, -2.0]],
        vec!["flip".into(), "crop".into()],
    )
    .unwrap();
    write_predictions(&data, &csv_path, FileFormat::Csv).unwrap();
    println!("wrote {}", csv_path.display());
    println!("{}", std::fs::read_to_string(&csv_path).unwrap());

    let loaded = load_predictions(&csv_path, FileFormat::Csv).unwrap();
    assert_eq!(loaded, data, "round trip is exact");

    let mut config = RunConfig::new(CommandKind::Optimize);
    config.input = Some(csv_path);
    config.output = Some(report_path.clone());
    let exit = run(&config).expect("optimize succeeds");
    println!("optimize exited {}", exit);
    println!("report at {}:", report_path.display());
    println!("{}", std::fs::read_to_string(&report_path).unwrap());
}
