//! Shared helpers for the integration and acceptance suites: seeded random
//! instances and brute-force oracles kept independent of the library's own
//! solution paths.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::distributions::Distribution;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use tta_lab::{GammaMatrix, PredictionSet};

/// Random calibration set with labels and predictions of order one.
pub fn random_prediction_set(rng: &mut ChaCha12Rng, max_n: usize, max_m: usize) -> PredictionSet {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let normal = StandardNormal;
    let labels: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = normal.sample(rng);
            3.0 * z
        })
        .collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|y| {
            (0..m)
                .map(|_| {
                    let z: f64 = normal.sample(rng);
                    y + z
                })
                .collect()
        })
        .collect();
    let names = (1..=m).map(|i| format!("aug_{}", i)).collect();
    PredictionSet::new(labels, rows, names).expect("generated set is valid")
}

/// Random PSD matrix `AᵀA / r` with `r ≥ m + 2` rows of standard normals.
pub fn random_psd(rng: &mut ChaCha12Rng, m: usize) -> GammaMatrix {
    let r = m + 2 + rng.gen_range(0..4);
    let normal = StandardNormal;
    let a = DMatrix::from_fn(r, m, |_, _| {
        let z: f64 = normal.sample(rng);
        z
    });
    let entries = a.transpose() * &a / r as f64;
    // mirror the upper triangle so the symmetry check is exact
    let mut sym = entries.clone();
    for i in 0..m {
        for j in (i + 1)..m {
            sym[(j, i)] = sym[(i, j)];
        }
    }
    GammaMatrix::try_new(sym, r).expect("Gram matrices are PSD")
}

/// Random point on the probability simplex.
pub fn random_simplex_point(rng: &mut ChaCha12Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| -rng.gen_range(0.0f64..1.0).max(1e-12).ln()).collect();
    let sum: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|v| v / sum).collect();
    // push the vector back onto the exact-sum surface
    let correction: f64 = 1.0 - w.iter().sum::<f64>();
    w[0] += correction;
    w
}

fn quadratic_form(q: &DMatrix<f64>, w: &[f64]) -> f64 {
    let m = q.nrows();
    let mut total = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            row += q[(i, j)] * w[j];
        }
        total += w[i] * row;
    }
    total
}

/// Minimum of `wᵀQw` over lattice points `k/steps` with `Σk = steps` and
/// `lo_i ≤ k_i ≤ hi_i`. Plain recursive enumeration with prefix-sum pruning.
fn lattice_min_bounded(
    q: &DMatrix<f64>,
    steps: usize,
    lo: &[usize],
    hi: &[usize],
) -> (f64, Vec<usize>) {
    let m = q.nrows();
    let mut suffix_lo = vec![0usize; m + 1];
    let mut suffix_hi = vec![0usize; m + 1];
    for i in (0..m).rev() {
        suffix_lo[i] = suffix_lo[i + 1] + lo[i];
        suffix_hi[i] = suffix_hi[i + 1] + hi[i];
    }
    let mut best = (f64::INFINITY, vec![0usize; m]);
    let mut current = vec![0usize; m];
    let mut w = vec![0.0; m];
    fn recurse(
        q: &DMatrix<f64>,
        steps: usize,
        depth: usize,
        remaining: usize,
        lo: &[usize],
        hi: &[usize],
        suffix_lo: &[usize],
        suffix_hi: &[usize],
        current: &mut Vec<usize>,
        w: &mut Vec<f64>,
        best: &mut (f64, Vec<usize>),
    ) {
        let m = q.nrows();
        if depth == m - 1 {
            if remaining < lo[depth] || remaining > hi[depth] {
                return;
            }
            current[depth] = remaining;
            for i in 0..m {
                w[i] = current[i] as f64 / steps as f64;
            }
            let value = quadratic_form(q, w);
            if value < best.0 {
                *best = (value, current.clone());
            }
            return;
        }
        let rest_lo = suffix_lo[depth + 1];
        let rest_hi = suffix_hi[depth + 1];
        let k_min = lo[depth].max(remaining.saturating_sub(rest_hi));
        let k_max = hi[depth].min(remaining.saturating_sub(rest_lo));
        if k_min > k_max {
            return;
        }
        for k in k_min..=k_max {
            current[depth] = k;
            recurse(
                q,
                steps,
                depth + 1,
                remaining - k,
                lo,
                hi,
                suffix_lo,
                suffix_hi,
                current,
                w,
                best,
            );
        }
    }
    recurse(
        q,
        steps,
        0,
        steps,
        lo,
        hi,
        &suffix_lo,
        &suffix_hi,
        &mut current,
        &mut w,
        &mut best,
    );
    best
}

/// Brute-force minimum of `wᵀQw` over the simplex lattice with the given
/// step.
///
/// For m ≤ 3 the full lattice is enumerated. For larger m a full pass at
/// that resolution is infeasible (the 1e-3 lattice at m = 5 has ~4·10¹⁰
/// points), so the scan proceeds coarse-to-fine: a full pass at step 1/10,
/// then full-resolution passes restricted to a box of three coarse cells
/// around the best point found so far. The result is a minimum over a subset
/// of the target lattice, hence an upper bound on the true lattice minimum,
/// which keeps `solver ≤ oracle + tol` assertions sound; the objective is
/// convex, so the boxed refinement lands on the true lattice minimum for any
/// reasonably conditioned Q.
pub fn simplex_grid_min(gamma: &GammaMatrix, step: f64) -> f64 {
    let q = gamma.entries();
    let m = q.nrows();
    let target: usize = (1.0 / step).round() as usize;
    if m <= 3 {
        return lattice_min_bounded(q, target, &vec![0; m], &vec![target; m]).0;
    }
    let mut steps = 10usize;
    let (mut value, mut point) =
        lattice_min_bounded(q, steps, &vec![0; m], &vec![steps; m]);
    while steps < target {
        let next = (steps * 10).min(target);
        let scale = next / steps;
        let radius = 3 * scale;
        let lo: Vec<usize> = point.iter().map(|k| (k * scale).saturating_sub(radius)).collect();
        let hi: Vec<usize> = point.iter().map(|k| (k * scale + radius).min(next)).collect();
        let refined = lattice_min_bounded(q, next, &lo, &hi);
        value = refined.0;
        point = refined.1;
        steps = next;
    }
    value
}

/// Pool-adjacent-violators fit of a nondecreasing curve; returns the fitted
/// values.
pub fn isotonic_fit(values: &[f64]) -> Vec<f64> {
    let mut level: Vec<f64> = Vec::with_capacity(values.len());
    let mut weight: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        level.push(v);
        weight.push(1.0);
        while level.len() > 1 && level[level.len() - 2] > level[level.len() - 1] {
            let (l2, w2) = (level.pop().unwrap(), weight.pop().unwrap());
            let (l1, w1) = (level.pop().unwrap(), weight.pop().unwrap());
            level.push((l1 * w1 + l2 * w2) / (w1 + w2));
            weight.push(w1 + w2);
        }
    }
    let mut fitted = Vec::with_capacity(values.len());
    for (l, w) in level.iter().zip(&weight) {
        for _ in 0..(*w as usize) {
            fitted.push(*l);
        }
    }
    fitted
}

/// All terminal uniform risks reachable by removing removable strategies one
/// at a time (every branch, not just the greedy one).
pub fn enumerate_prune_outcomes(gamma: &GammaMatrix, min_keep: usize) -> Vec<f64> {
    fn uniform_risk(q: &DMatrix<f64>) -> f64 {
        let m = q.nrows() as f64;
        let mut s = 0.0;
        for v in q.iter() {
            s += v;
        }
        s / (m * m)
    }
    fn recurse(q: &DMatrix<f64>, min_keep: usize, out: &mut Vec<f64>) {
        let m = q.nrows();
        let mut any = false;
        if m > min_keep {
            for k in 0..m {
                let g = GammaMatrix::try_new(q.clone(), 1).unwrap();
                let d = tta_lab::prune_check(&g, k).unwrap();
                if d.removable {
                    any = true;
                    let sub = q.clone().remove_row(k).remove_column(k);
                    recurse(&sub, min_keep, out);
                }
            }
        }
        if !any {
            out.push(uniform_risk(q));
        }
    }
    let mut out = Vec::new();
    recurse(gamma.entries(), min_keep, &mut out);
    out
}
