//! Closed-form versus projected combination weights, including a matrix
//! whose unconstrained optimum leaves the simplex.
//!
//! ```text
//! cargo run --example optimal_weights
//! ```

use tta_lab::{
    solve_closed_form, solve_projected, weighted_risk, GammaMatrix, SolverOptions, WeightVector,
};

fn show(label: &str, gamma: &GammaMatrix, opts: &SolverOptions) {
    let uniform = WeightVector::uniform(gamma.size()).unwrap();
    let uniform_risk = weighted_risk(gamma, &uniform).unwrap();
    let raw = solve_closed_form(gamma, opts).unwrap();
    let projected = solve_projected(gamma, opts).unwrap();

    println!("{}", label);
    println!("  uniform risk        : {:.6}", uniform_risk);
    println!(
        "  closed form         : {:?} (risk {:.6}, negative weights: {})",
        raw.weights.weights(),
        raw.achieved_risk,
        raw.weights.negative_weights_present()
    );
    println!(
        "  projected           : {:?} (risk {:.6}, {} support changes)",
        projected.weights.weights(),
        projected.achieved_risk,
        projected.iterations
    );
    println!(
        "  condition estimate  : {:.3e} (ill-conditioned: {})",
        raw.condition_estimate, raw.ill_conditioned
    );
    println!();
}

fn main() {
    let opts = SolverOptions::default();

    // unequal variances, independent errors: inverse-variance weighting
    let diag = GammaMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 4.0]], 100).unwrap();
    show("Γ = diag(1, 4) — independent, unequal variances", &diag, &opts);

    // the unconstrained optimum shorts the second strategy; projection
    // lands on the vertex instead
    let shorting = GammaMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 5.0]], 100).unwrap();
    show(
        "Γ = [[1, 2], [2, 5]] — closed form goes negative",
        &shorting,
        &opts,
    );

    // nearly collinear strategies: the ridge keeps the solve stable and the
    // condition estimate flags the trouble
    let collinear = GammaMatrix::from_rows(
        &[vec![1.0, 0.999, 0.5], vec![0.999, 1.0, 0.5], vec![0.5, 0.5, 2.0]],
        100,
    )
    .unwrap();
    show("nearly collinear pair + one diverse strategy", &collinear, &opts);
}
