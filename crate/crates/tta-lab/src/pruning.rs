//! Redundancy detection: when does dropping a strategy not increase the
//! uniform-weight risk?
//!
//! The removal inequality compares `(2m−1) Σ_ij Γ_ij` against
//! `2m² Σ_{i≠k} Γ_ik + m² Γ_kk`; it is algebraically equivalent to the direct
//! comparison of the uniform risks over `m` and `m−1` strategies. Ties count
//! as removable.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::risk::GammaMatrix;

/// Relative slack applied to the inequality so exact ties (identical
/// strategies) come out removable despite round-off.
const TIE_RTOL: f64 = 1e-12;

/// Outcome of testing one strategy for removal under uniform weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PruneDecision {
    /// Index of the tested strategy (original index in [`greedy_prune`]).
    pub index_k: usize,
    /// `(2m−1) Σ_i Σ_j Γ_ij`.
    pub lhs: f64,
    /// `2m² Σ_{i≠k} Γ_ik + m² Γ_kk`.
    pub rhs: f64,
    /// `rhs ≥ lhs` (up to round-off); equivalently the uniform risk does not
    /// increase when strategy `k` is dropped.
    pub removable: bool,
    /// Uniform risk over all `m` strategies, `Σ_ij Γ_ij / m²`.
    pub risk_before: f64,
    /// Uniform risk over the remaining `m−1`, `Σ_{i≠k,j≠k} Γ_ij / (m−1)²`.
    pub risk_after: f64,
}

impl PruneDecision {
    /// Removal margin; positive means removal helps (or is free).
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

fn check_entries(entries: &DMatrix<f64>, k: usize) -> Result<()> {
    let m = entries.nrows();
    if m < 2 {
        return Err(Error::TooFewAugmentations(m));
    }
    if k >= m {
        return Err(Error::IndexOutOfRange { index: k, len: m });
    }
    Ok(())
}

fn decision_on(entries: &DMatrix<f64>, k: usize) -> Result<PruneDecision> {
    check_entries(entries, k)?;
    let m = entries.nrows();
    let mf = m as f64;

    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            total += entries[(i, j)];
        }
    }
    let mut col_k_off = 0.0;
    for i in 0..m {
        if i != k {
            col_k_off += entries[(i, k)];
        }
    }
    let lhs = (2.0 * mf - 1.0) * total;
    let rhs = 2.0 * mf * mf * col_k_off + mf * mf * entries[(k, k)];
    let tie_tol = TIE_RTOL * lhs.abs().max(rhs.abs()).max(1.0);
    let removable = rhs >= lhs - tie_tol;

    let risk_before = total / (mf * mf);
    let removed_sum = total - 2.0 * col_k_off - entries[(k, k)];
    let risk_after = removed_sum / ((mf - 1.0) * (mf - 1.0));

    Ok(PruneDecision {
        index_k: k,
        lhs,
        rhs,
        removable,
        risk_before,
        risk_after,
    })
}

/// Test whether dropping strategy `k` (0-based) keeps the uniform risk from
/// increasing.
pub fn prune_check(gamma: &GammaMatrix, k: usize) -> Result<PruneDecision> {
    decision_on(gamma.entries(), k)
}

/// Repeatedly remove the strategy with the largest removal margin until no
/// strategy is removable or only `min_keep` remain.
///
/// The returned decisions record the executed removals in order, with
/// `index_k` referring to the original strategy indices; `lhs`/`rhs` and the
/// risks are evaluated on the surviving submatrix at that step. Single-step
/// removal is the paper-level operation; the loop is a greedy extension.
pub fn greedy_prune(gamma: &GammaMatrix, min_keep: usize) -> Result<Vec<PruneDecision>> {
    let m = gamma.size();
    if min_keep == 0 || min_keep > m {
        return Err(Error::InvalidConfig(format!(
            "min_keep must be in 1..={}, got {}",
            m, min_keep
        )));
    }
    let mut survivors: Vec<usize> = (0..m).collect();
    let mut current = gamma.entries().clone();
    let mut decisions = Vec::new();
    while survivors.len() > min_keep {
        let mut best: Option<(usize, PruneDecision)> = None;
        for pos in 0..survivors.len() {
            let d = decision_on(&current, pos)?;
            if d.removable
                && best
                    .as_ref()
                    .map_or(true, |(_, b)| d.margin() > b.margin())
            {
                best = Some((pos, d));
            }
        }
        let Some((pos, mut decision)) = best else {
            break;
        };
        decision.index_k = survivors[pos];
        decisions.push(decision);
        survivors.remove(pos);
        current = current.remove_row(pos).remove_column(pos);
    }
    Ok(decisions)
}
