//! Residual co-moment estimation, weighted-risk evaluation, and the exact
//! error–ambiguity decomposition.
//!
//! All operations are pure functions of their inputs. Summations run in a
//! fixed (row-major) order so repeated calls are bit-reproducible.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::data::{PredictionSet, WeightVector};
use crate::error::{Error, Result};

/// Eigenvalue tolerance for the positive-semidefiniteness check.
pub const PSD_TOL: f64 = 1e-9;

/// Symmetric m×m matrix of mean residual products,
/// `Γ_ij = (1/N) Σ_n (y_n − p_{n,i})(y_n − p_{n,j})`.
///
/// It is `1/N` times a Gram matrix of residual columns, hence positive
/// semidefinite up to round-off.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaMatrix {
    entries: DMatrix<f64>,
    sample_count: usize,
}

impl GammaMatrix {
    /// Validate a caller-supplied matrix: square, exactly symmetric, all
    /// entries finite, and positive semidefinite up to [`PSD_TOL`] relative
    /// to the largest eigenvalue.
    pub fn try_new(entries: DMatrix<f64>, sample_count: usize) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "gamma matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let m = entries.nrows();
        for i in 0..m {
            for j in 0..m {
                if !entries[(i, j)].is_finite() {
                    return Err(Error::NonFinite(format!("gamma ({}, {})", i, j)));
                }
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        let eigenvalues = entries.clone().symmetric_eigen().eigenvalues;
        let lam_max = eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lam_min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if lam_min < -PSD_TOL * lam_max.max(1.0) {
            return Err(Error::NotPositiveSemidefinite(lam_min));
        }
        Ok(Self {
            entries,
            sample_count,
        })
    }

    /// Convenience constructor from row vectors.
    pub fn from_rows(rows: &[Vec<f64>], sample_count: usize) -> Result<Self> {
        let m = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::ShapeMismatch(format!(
                    "gamma row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    m
                )));
            }
        }
        let entries = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
        Self::try_new(entries, sample_count)
    }

    /// Number of augmentation strategies.
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Calibration sample count the estimate was computed from.
    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Mean of the diagonal; the scale the relative ridge is anchored to.
    pub fn mean_diagonal(&self) -> f64 {
        let m = self.size();
        (0..m).map(|i| self.entries[(i, i)]).sum::<f64>() / m as f64
    }
}

impl Serialize for GammaMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let m = self.size();
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| self.entries[(i, j)]).collect())
            .collect();
        let mut st = serializer.serialize_struct("GammaMatrix", 2)?;
        st.serialize_field("entries", &rows)?;
        st.serialize_field("sample_count", &self.sample_count)?;
        st.end()
    }
}

/// Plug-in estimate `Γ_ij = (1/N) Σ_n (y_n − p_{n,i})(y_n − p_{n,j})`.
///
/// The upper triangle is computed and mirrored, so the result is symmetric
/// by construction; the `1/N` normalization keeps it a scaled Gram matrix
/// and therefore positive semidefinite.
pub fn estimate_gamma(data: &PredictionSet) -> GammaMatrix {
    let n = data.n_samples();
    let m = data.n_augmentations();
    let mut entries = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut acc = 0.0;
            for s in 0..n {
                acc += data.residual(s, i) * data.residual(s, j);
            }
            let v = acc / n as f64;
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    GammaMatrix {
        entries,
        sample_count: n,
    }
}

fn check_dims(m: usize, weights: &WeightVector) -> Result<()> {
    if weights.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: weights.len(),
        });
    }
    Ok(())
}

/// Quadratic-form risk `Σ_i Σ_j w_i w_j Γ_ij` (the full double sum).
pub fn weighted_risk(gamma: &GammaMatrix, weights: &WeightVector) -> Result<f64> {
    let m = gamma.size();
    check_dims(m, weights)?;
    let w = weights.weights();
    let mut total = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            row += gamma.entry(i, j) * w[j];
        }
        total += w[i] * row;
    }
    Ok(total)
}

/// Sample-level risk `(1/N) Σ_n (y_n − Σ_i w_i p_{n,i})²`.
///
/// Algebraically identical to `weighted_risk(estimate_gamma(data), w)`; kept
/// as an independent evaluation route for cross-checking.
pub fn direct_risk(data: &PredictionSet, weights: &WeightVector) -> Result<f64> {
    let m = data.n_augmentations();
    check_dims(m, weights)?;
    let n = data.n_samples();
    let w = weights.weights();
    let mut acc = 0.0;
    for s in 0..n {
        let combined = combined_prediction(data, w, s);
        let r = data.labels()[s] - combined;
        acc += r * r;
    }
    Ok(acc / n as f64)
}

#[inline]
fn combined_prediction(data: &PredictionSet, w: &[f64], sample: usize) -> f64 {
    let mut combined = 0.0;
    for (i, wi) in w.iter().enumerate() {
        combined += wi * data.predictions()[(sample, i)];
    }
    combined
}

/// Error–ambiguity split of the combined risk.
///
/// `total_risk = weighted_error − weighted_ambiguity`, where the ambiguity of
/// strategy `i` is the mean squared deviation of its prediction from the
/// combined prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub per_aug_error: Vec<f64>,
    pub per_aug_ambiguity: Vec<f64>,
    pub weighted_error: f64,
    pub weighted_ambiguity: f64,
    pub total_risk: f64,
}

/// Decompose the weighted-TTA risk into per-strategy error and ambiguity.
///
/// Requires nonnegative weights; raw closed-form weights with negative
/// entries are rejected because ambiguity is only a diversity measure on the
/// simplex.
pub fn decompose(data: &PredictionSet, weights: &WeightVector) -> Result<DecompositionReport> {
    let m = data.n_augmentations();
    check_dims(m, weights)?;
    if weights.negative_weights_present() {
        let (index, value) = weights
            .weights()
            .iter()
            .enumerate()
            .find(|(_, w)| **w < 0.0)
            .map(|(i, w)| (i, *w))
            .expect("flag implies a negative entry");
        return Err(Error::NegativeWeight {
            index,
            value,
            provenance: "decompose",
        });
    }
    let n = data.n_samples();
    let w = weights.weights();
    let mut per_aug_error = vec![0.0; m];
    let mut per_aug_ambiguity = vec![0.0; m];
    for s in 0..n {
        let combined = combined_prediction(data, w, s);
        for i in 0..m {
            let r = data.residual(s, i);
            per_aug_error[i] += r * r;
            let d = data.predictions()[(s, i)] - combined;
            per_aug_ambiguity[i] += d * d;
        }
    }
    for i in 0..m {
        per_aug_error[i] /= n as f64;
        per_aug_ambiguity[i] /= n as f64;
    }
    let weighted_error: f64 = w.iter().zip(&per_aug_error).map(|(wi, e)| wi * e).sum();
    let weighted_ambiguity: f64 = w
        .iter()
        .zip(&per_aug_ambiguity)
        .map(|(wi, a)| wi * a)
        .sum();
    Ok(DecompositionReport {
        per_aug_error,
        per_aug_ambiguity,
        weighted_error,
        weighted_ambiguity,
        total_risk: weighted_error - weighted_ambiguity,
    })
}
