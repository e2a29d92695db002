//! Core domain types: calibration predictions and combination weights.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance on `sum(weights) == 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Per-augmentation predictions of a fixed model on a labeled calibration set.
///
/// Column `i` of `predictions` holds the model output after applying the
/// `i`-th augmentation strategy to every sample, so the set is the empirical
/// stand-in for the composed predictors the combiner averages over.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    labels: DVector<f64>,
    predictions: DMatrix<f64>,
    augmentation_names: Vec<String>,
}

impl PredictionSet {
    /// Build from row-major prediction rows (one row per sample).
    pub fn new(
        labels: Vec<f64>,
        rows: Vec<Vec<f64>>,
        augmentation_names: Vec<String>,
    ) -> Result<Self> {
        if labels.is_empty() || augmentation_names.is_empty() {
            return Err(Error::EmptyData);
        }
        let n = labels.len();
        let m = augmentation_names.len();
        if rows.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} prediction rows for {} labels",
                rows.len(),
                n
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::ShapeMismatch(format!(
                    "row {} has {} predictions, expected {}",
                    r,
                    row.len(),
                    m
                )));
            }
        }
        let predictions = DMatrix::from_fn(n, m, |i, j| rows[i][j]);
        Self::from_parts(DVector::from_vec(labels), predictions, augmentation_names)
    }

    /// Build from preassembled nalgebra containers.
    pub fn from_parts(
        labels: DVector<f64>,
        predictions: DMatrix<f64>,
        augmentation_names: Vec<String>,
    ) -> Result<Self> {
        let n = labels.len();
        let m = augmentation_names.len();
        if n == 0 || m == 0 {
            return Err(Error::EmptyData);
        }
        if predictions.nrows() != n || predictions.ncols() != m {
            return Err(Error::ShapeMismatch(format!(
                "prediction matrix is {}x{}, expected {}x{}",
                predictions.nrows(),
                predictions.ncols(),
                n,
                m
            )));
        }
        for (i, v) in labels.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("label {}", i)));
            }
        }
        for j in 0..m {
            for i in 0..n {
                if !predictions[(i, j)].is_finite() {
                    return Err(Error::NonFinite(format!("prediction ({}, {})", i, j)));
                }
            }
        }
        Ok(Self {
            labels,
            predictions,
            augmentation_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_augmentations(&self) -> usize {
        self.augmentation_names.len()
    }

    pub fn labels(&self) -> &DVector<f64> {
        &self.labels
    }

    pub fn predictions(&self) -> &DMatrix<f64> {
        &self.predictions
    }

    pub fn augmentation_names(&self) -> &[String] {
        &self.augmentation_names
    }

    /// Residual of strategy `aug` on sample `sample`: `y_n - p_{n,i}`.
    #[inline]
    pub fn residual(&self, sample: usize, aug: usize) -> f64 {
        self.labels[sample] - self.predictions[(sample, aug)]
    }
}

/// How a weight vector was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Uniform,
    ClosedFormRaw,
    ClosedFormProjected,
}

impl Provenance {
    fn name(self) -> &'static str {
        match self {
            Provenance::Uniform => "uniform",
            Provenance::ClosedFormRaw => "closed_form_raw",
            Provenance::ClosedFormProjected => "closed_form_projected",
        }
    }

    /// Raw closed-form weights may dip below zero; the other provenances
    /// promise nonnegativity.
    fn allows_negative(self) -> bool {
        matches!(self, Provenance::ClosedFormRaw)
    }
}

/// Combination weights over the `m` augmentation strategies: they sum to one,
/// and except for the raw closed form they are nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    weights: Vec<f64>,
    provenance: Provenance,
    negative_weights_present: bool,
}

impl WeightVector {
    /// Equal weights `1/m`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyData);
        }
        Self::try_new(vec![1.0 / m as f64; m], Provenance::Uniform)
    }

    pub fn try_new(weights: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyData);
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite(format!("weight {}", i)));
            }
            if *w < 0.0 && !provenance.allows_negative() {
                return Err(Error::NegativeWeight {
                    index: i,
                    value: *w,
                    provenance: provenance.name(),
                });
            }
        }
        let sum = compensated_sum(&weights);
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum(sum));
        }
        let negative_weights_present = weights.iter().any(|w| *w < 0.0);
        Ok(Self {
            weights,
            provenance,
            negative_weights_present,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn negative_weights_present(&self) -> bool {
        self.negative_weights_present
    }
}

/// Neumaier compensated summation; keeps weight-sum checks at round-off
/// accuracy independent of vector length.
pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
