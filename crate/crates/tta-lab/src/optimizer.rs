//! Optimal combination weights for the weighted combiner.
//!
//! `solve_closed_form` is the analytic minimizer of `wᵀΓw` under the sum
//! constraint alone (`w_i = Σ_j Γ⁻¹_ij / Σ_kj Γ⁻¹_kj`, which may go
//! negative). `solve_projected` additionally enforces `w ≥ 0` with an
//! active-set scheme. Since residual co-moment matrices of highly correlated
//! strategies are routinely near-singular, both accept a relative ridge.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::data::{compensated_sum, Provenance, WeightVector};
use crate::error::{Error, Result};
use crate::risk::GammaMatrix;

/// Cholesky pivot threshold, relative to the largest diagonal entry.
pub const PIVOT_RTOL: f64 = 1e-14;

/// Eigenvalue ratio cutoff below which the condition number is reported as
/// the infinity sentinel.
const SINGULAR_EIG_RTOL: f64 = 1e-15;

/// Knobs for the weight solvers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Ridge strength relative to the mean diagonal of Γ; the solver inverts
    /// `Γ + ridge_lambda · mean_diag(Γ) · I`.
    pub ridge_lambda: f64,
    /// Condition-number cutoff above which the report flags ill-conditioning.
    pub conditioning_threshold: f64,
    /// Enforce nonnegative weights (pick `solve_projected` in the CLI).
    pub projection: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            ridge_lambda: 1e-8,
            conditioning_threshold: 1e12,
            projection: true,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !self.ridge_lambda.is_finite() || self.ridge_lambda < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "ridge_lambda must be a nonnegative finite value, got {}",
                self.ridge_lambda
            )));
        }
        if !(self.conditioning_threshold > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "conditioning_threshold must exceed 1, got {}",
                self.conditioning_threshold
            )));
        }
        Ok(())
    }

    /// Absolute ridge added to the diagonal: `ridge_lambda · mean_diag(Γ)`.
    pub fn ridge_value(&self, gamma: &GammaMatrix) -> f64 {
        self.ridge_lambda * gamma.mean_diagonal()
    }
}

/// `Γ + ridge·I`, the matrix the solvers actually minimize over.
pub fn regularized_gamma(gamma: &GammaMatrix, opts: &SolverOptions) -> Result<GammaMatrix> {
    let ridge = opts.ridge_value(gamma);
    let mut entries = gamma.entries().clone();
    for i in 0..gamma.size() {
        entries[(i, i)] += ridge;
    }
    GammaMatrix::try_new(entries, gamma.sample_count())
}

/// Result of a weight solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverReport {
    pub weights: WeightVector,
    /// `wᵀ(Γ + ridge·I)w`, the objective actually minimized.
    pub achieved_risk: f64,
    /// Condition estimate of the *input* Γ (see [`condition_diagnostics`]).
    #[serde(serialize_with = "crate::report::serialize_f64_or_inf")]
    pub condition_estimate: f64,
    /// Lagrange multiplier of the sum constraint, `1 / Σ_kj Γ⁻¹_kj`.
    pub lagrange_lambda: f64,
    /// Support changes performed; 0 for the pure closed form.
    pub iterations: usize,
    /// True when `condition_estimate` exceeds `conditioning_threshold`.
    pub ill_conditioned: bool,
}

/// Condition-number estimate: ratio of extreme eigenvalues of the symmetric
/// eigendecomposition. Eigenvalues below `1e-15 · λ_max` count as zero and
/// yield the `f64::INFINITY` sentinel. Deterministic for a given matrix.
pub fn condition_diagnostics(gamma: &GammaMatrix) -> f64 {
    let eigenvalues = gamma.entries().clone().symmetric_eigen().eigenvalues;
    let lam_max = eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lam_min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lam_max <= 0.0 || lam_min <= SINGULAR_EIG_RTOL * lam_max {
        return f64::INFINITY;
    }
    lam_max / lam_min
}

/// Lower-triangular Cholesky factor with an explicit pivot floor of
/// `PIVOT_RTOL` times the largest diagonal entry of the input.
fn cholesky_with_threshold(mat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = mat.nrows();
    let scale = (0..m).map(|i| mat[(i, i)].abs()).fold(0.0, f64::max);
    let threshold = PIVOT_RTOL * scale;
    let mut l = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut d = mat[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > threshold) {
            return Err(Error::SingularGamma(format!(
                "pivot {:e} at column {} below threshold {:e}; increase ridge_lambda",
                d, j, threshold
            )));
        }
        let root = d.sqrt();
        l[(j, j)] = root;
        for i in (j + 1)..m {
            let mut v = mat[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / root;
        }
    }
    Ok(l)
}

/// Solve `mat · x = 1` through the Cholesky factor.
fn solve_ones(l: &DMatrix<f64>) -> Vec<f64> {
    let m = l.nrows();
    let mut x = vec![1.0; m];
    for i in 0..m {
        for k in 0..i {
            x[i] -= l[(i, k)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    for i in (0..m).rev() {
        for k in (i + 1)..m {
            x[i] -= l[(k, i)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    x
}

/// Closed-form weights on one (sub)matrix: normalized row sums of the
/// inverse, plus the sum-constraint multiplier.
fn closed_form_on(mat: &DMatrix<f64>) -> Result<(Vec<f64>, f64)> {
    let l = cholesky_with_threshold(mat)?;
    let x = solve_ones(&l);
    let total = compensated_sum(&x);
    if !(total.abs() > 0.0) || !total.is_finite() {
        return Err(Error::SingularGamma(format!(
            "inverse row sums cancel to {:e}; weights are not normalizable",
            total
        )));
    }
    let weights: Vec<f64> = x.iter().map(|v| v / total).collect();
    Ok((weights, 1.0 / total))
}

fn quadratic_form(mat: &DMatrix<f64>, w: &[f64]) -> f64 {
    let m = mat.nrows();
    let mut total = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            row += mat[(i, j)] * w[j];
        }
        total += w[i] * row;
    }
    total
}

fn weight_vector_or_singular(weights: Vec<f64>, provenance: Provenance) -> Result<WeightVector> {
    WeightVector::try_new(weights, provenance).map_err(|e| match e {
        Error::WeightSum(sum) => Error::SingularGamma(format!(
            "normalized weights sum to {} instead of 1; Γ is too ill-conditioned",
            sum
        )),
        other => other,
    })
}

/// The analytic minimizer of `wᵀ(Γ + ridge·I)w` subject to `Σ w_i = 1` only.
/// Negative entries are permitted and flagged on the returned weights.
pub fn solve_closed_form(gamma: &GammaMatrix, opts: &SolverOptions) -> Result<SolverReport> {
    opts.validate()?;
    let reg = regularized_gamma(gamma, opts)?;
    let (w, lagrange_lambda) = closed_form_on(reg.entries())?;
    let achieved_risk = quadratic_form(reg.entries(), &w);
    let weights = weight_vector_or_singular(w, Provenance::ClosedFormRaw)?;
    let condition_estimate = condition_diagnostics(gamma);
    Ok(SolverReport {
        weights,
        achieved_risk,
        condition_estimate,
        lagrange_lambda,
        iterations: 0,
        ill_conditioned: !(condition_estimate <= opts.conditioning_threshold),
    })
}

/// Minimize `wᵀ(Γ + ridge·I)w` over the probability simplex.
///
/// Active-set scheme: start from the closed form on the full support; while
/// negative coordinates exist, fix the most negative one to zero and re-solve
/// on the remaining support. Once the support solution is nonnegative, check
/// the reduced gradient of the fixed coordinates and free the most violating
/// one if reintroducing it would lower the risk, so the returned point is the
/// simplex minimizer and not just a feasible deflation.
pub fn solve_projected(gamma: &GammaMatrix, opts: &SolverOptions) -> Result<SolverReport> {
    opts.validate()?;
    let m = gamma.size();
    let reg = regularized_gamma(gamma, opts)?;
    let mat = reg.entries();
    let scale = (0..m).map(|i| mat[(i, i)].abs()).fold(0.0, f64::max);
    let kkt_tol = 1e-10 * scale.max(1.0);

    let mut support: Vec<usize> = (0..m).collect();
    let mut iterations = 0usize;
    let max_iterations = 4 * m * m + 16;
    loop {
        if support.is_empty() {
            return Err(Error::NonConvergence(
                "active-set support shrank to empty".into(),
            ));
        }
        let k = support.len();
        let sub = DMatrix::from_fn(k, k, |i, j| mat[(support[i], support[j])]);
        let (w_sub, lagrange_lambda) = closed_form_on(&sub)?;

        // Fix the most negative coordinate first; ties break to the lowest
        // index for reproducibility.
        let mut drop_pos: Option<usize> = None;
        for (pos, w) in w_sub.iter().enumerate() {
            if *w < 0.0 && drop_pos.map_or(true, |best| *w < w_sub[best]) {
                drop_pos = Some(pos);
            }
        }
        if let Some(pos) = drop_pos {
            support.remove(pos);
            iterations += 1;
            if iterations > max_iterations {
                return Err(Error::NonConvergence(format!(
                    "no nonnegative support after {} support changes",
                    iterations
                )));
            }
            continue;
        }

        let mut w_full = vec![0.0; m];
        for (pos, &idx) in support.iter().enumerate() {
            w_full[idx] = w_sub[pos];
        }

        // Reduced-gradient check on the fixed coordinates: (Γw)_k below the
        // support multiplier means coordinate k should re-enter.
        let mut free_idx: Option<usize> = None;
        let mut worst = lagrange_lambda - kkt_tol;
        for k in 0..m {
            if support.binary_search(&k).is_ok() {
                continue;
            }
            let mut g = 0.0;
            for j in 0..m {
                g += mat[(k, j)] * w_full[j];
            }
            if g < worst {
                worst = g;
                free_idx = Some(k);
            }
        }
        if let Some(k) = free_idx {
            let insert_at = support.binary_search(&k).unwrap_err();
            support.insert(insert_at, k);
            iterations += 1;
            if iterations > max_iterations {
                return Err(Error::NonConvergence(format!(
                    "active set cycling after {} support changes",
                    iterations
                )));
            }
            continue;
        }

        let achieved_risk = quadratic_form(mat, &w_full);
        let weights = weight_vector_or_singular(w_full, Provenance::ClosedFormProjected)?;
        let condition_estimate = condition_diagnostics(gamma);
        return Ok(SolverReport {
            weights,
            achieved_risk,
            condition_estimate,
            lagrange_lambda,
            iterations,
            ill_conditioned: !(condition_estimate <= opts.conditioning_threshold),
        });
    }
}
