//! Minimum-class-residual classification over coded queries.
//!
//! A fitted model holds the unit-normalized dictionary and one cached Gram
//! factorization; classification codes the normalized query with the chosen
//! coder, computes per-class reconstruction residuals r_k = ‖y − X_k ĉ_k‖₂,
//! and predicts the class with the smallest residual (ties go to the
//! smallest class index). Models are immutable after fitting and safe to
//! share across threads.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::data::{normalize_columns, Query, SampleMatrix};
use crate::error::Error;
use crate::parallel;
use crate::solver::{self, precompute, precompute_ridge, GramMode, PrecomputedGram, SolverConfig};
use crate::Result;

/// Which coding rule a model applies to each query.
#[derive(Debug, Clone, PartialEq)]
pub enum CoderKind {
    /// Non-negative coder with ℓ2 weight α and ℓ1 weight β.
    Nscr(SolverConfig),
    /// Collaborative (ridge) coder, closed form (XᵀX + λI)^{-1}Xᵀy.
    Crc {
        /// Ridge weight λ > 0.
        lambda: f64,
    },
    /// Non-negative least squares: the non-negative coder with α = β = 0.
    Nrc(SolverConfig),
    /// Sparse (ℓ1) coder solved by the soft-threshold variant of the
    /// splitting iteration.
    Src {
        /// ℓ1 weight λ > 0.
        lambda: f64,
        /// Iteration settings (ρ, tol, max_iter); α and β are unused.
        config: SolverConfig,
    },
}

/// Default ridge weight for the collaborative coder when not cross-validated.
pub const CRC_DEFAULT_LAMBDA: f64 = 0.001;

impl CoderKind {
    fn validate(&self) -> Result<()> {
        match self {
            CoderKind::Nscr(config) | CoderKind::Nrc(config) => config.validate(),
            CoderKind::Crc { lambda } => {
                if lambda.is_finite() && *lambda > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!(
                        "crc lambda must be positive, got {lambda}"
                    )))
                }
            }
            CoderKind::Src { lambda, config } => {
                config.validate()?;
                if lambda.is_finite() && *lambda > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!(
                        "src lambda must be positive, got {lambda}"
                    )))
                }
            }
        }
    }
}

/// Per-class residuals and the argmin label for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    /// Predicted class id.
    pub label: String,
    /// Index of the predicted class in partition order.
    pub class_index: usize,
    /// r_k for every class, in partition order.
    pub residuals: DVector<f64>,
    /// The coding vector the residuals were computed from.
    pub coding: DVector<f64>,
}

/// Per-class reconstruction residuals r_k = ‖y − X_k·coding_k‖₂, using only
/// the columns of class k and the matching slice of the coding vector.
pub fn class_residuals(
    x: &SampleMatrix,
    y: &DVector<f64>,
    coding: &DVector<f64>,
) -> Result<DVector<f64>> {
    if coding.len() != x.len() {
        return Err(Error::DimensionMismatch {
            context: "coding length vs dictionary columns",
            expected: x.len(),
            got: coding.len(),
        });
    }
    if y.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            context: "query length vs dictionary rows",
            expected: x.dim(),
            got: y.len(),
        });
    }
    let k = x.partition().num_classes();
    let mut residuals = DVector::zeros(k);
    for class in 0..k {
        let range = x.partition().class_range(class);
        let block = x.values().columns(range.start, range.len());
        let slice = coding.rows(range.start, range.len());
        residuals[class] = (y - block * slice).norm();
    }
    Ok(residuals)
}

/// Index of the smallest residual; ties go to the smallest index.
fn argmin(residuals: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..residuals.len() {
        if residuals[i] < residuals[best] {
            best = i;
        }
    }
    best
}

/// Collaborative coding, closed form ĉ = (XᵀX + λI)^{-1}Xᵀy (through the
/// Woodbury identity when N > D). Entries may be negative.
pub fn code_crc(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    let gram = precompute_ridge(x, lambda, None)?;
    Ok(gram.apply_inverse(x, &x.tr_mul(y)))
}

/// Non-negative least-squares coding: the splitting solver with α = β = 0.
pub fn code_nrc(x: &DMatrix<f64>, y: &DVector<f64>, config: &SolverConfig) -> Result<DVector<f64>> {
    let config = config.with_weights(0.0, 0.0);
    let gram = precompute(x, 0.0, config.rho, None)?;
    Ok(solver::solve(x, y, &config, &gram)?.coding)
}

/// Sparse (ℓ1) coding by the soft-threshold splitting; signs unconstrained.
pub fn code_src(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    config: &SolverConfig,
) -> Result<DVector<f64>> {
    let gram = precompute(x, 0.0, config.rho, None)?;
    Ok(solver::solve_lasso(x, y, lambda, config, &gram)?.coding)
}

/// A fitted classifier: normalized dictionary, coder, and cached Gram
/// factorization shared by every classify call.
#[derive(Debug, Clone)]
pub struct ClassifierModel {
    dictionary: SampleMatrix,
    coder: CoderKind,
    gram: PrecomputedGram,
}

/// Normalizes the training columns and caches the coder's factorization.
pub fn fit_model(train: &SampleMatrix, coder: CoderKind) -> Result<ClassifierModel> {
    fit_model_with_mode(train, coder, None)
}

/// [`fit_model`] with the factorization mode forced, for experiments that
/// compare the direct and Woodbury paths.
pub fn fit_model_with_mode(
    train: &SampleMatrix,
    coder: CoderKind,
    mode_override: Option<GramMode>,
) -> Result<ClassifierModel> {
    coder.validate()?;
    let dictionary = normalize_columns(train)?;
    let x = dictionary.values();
    let gram = match &coder {
        CoderKind::Nscr(config) => precompute(x, config.alpha, config.rho, mode_override)?,
        CoderKind::Nrc(config) | CoderKind::Src { config, .. } => {
            precompute(x, 0.0, config.rho, mode_override)?
        }
        CoderKind::Crc { lambda } => precompute_ridge(x, *lambda, mode_override)?,
    };
    Ok(ClassifierModel {
        dictionary,
        coder,
        gram,
    })
}

impl ClassifierModel {
    /// The unit-normalized dictionary.
    pub fn dictionary(&self) -> &SampleMatrix {
        &self.dictionary
    }

    /// The coder this model applies.
    pub fn coder(&self) -> &CoderKind {
        &self.coder
    }

    /// The cached factorization.
    pub fn gram(&self) -> &PrecomputedGram {
        &self.gram
    }

    /// Same dictionary and factorization under a different coder.
    ///
    /// The factorization depends only on (X, α, ρ) for the splitting coders
    /// and on λ for the ridge coder, so swaps that keep those fixed (any β
    /// change in particular) avoid refactoring; anything else is rejected.
    pub fn with_coder(&self, coder: CoderKind) -> Result<ClassifierModel> {
        coder.validate()?;
        let (need_alpha, need_rho) = match &coder {
            CoderKind::Nscr(config) => (config.alpha, config.rho),
            CoderKind::Nrc(config) | CoderKind::Src { config, .. } => (0.0, config.rho),
            CoderKind::Crc { lambda } => (*lambda, 0.0),
        };
        if self.gram.alpha() != need_alpha || self.gram.rho() != need_rho {
            return Err(Error::GramMismatch(format!(
                "cached factorization has alpha={}, rho={}, coder needs alpha={need_alpha}, rho={need_rho}",
                self.gram.alpha(),
                self.gram.rho()
            )));
        }
        Ok(ClassifierModel {
            dictionary: self.dictionary.clone(),
            coder,
            gram: self.gram.clone(),
        })
    }

    /// Codes the query against the full dictionary.
    pub fn code(&self, y: &Query) -> Result<DVector<f64>> {
        let y = y.normalized()?;
        let x = self.dictionary.values();
        let yv = y.vector();
        match &self.coder {
            CoderKind::Nscr(config) => Ok(solver::solve(x, yv, config, &self.gram)?.coding),
            CoderKind::Nrc(config) => {
                let config = config.with_weights(0.0, 0.0);
                Ok(solver::solve(x, yv, &config, &self.gram)?.coding)
            }
            CoderKind::Crc { .. } => Ok(self.gram.apply_inverse(x, &x.tr_mul(yv))),
            CoderKind::Src { lambda, config } => {
                Ok(solver::solve_lasso(x, yv, *lambda, config, &self.gram)?.coding)
            }
        }
    }

    /// Normalizes the query, codes it, and picks the minimum-residual class.
    pub fn classify(&self, y: &Query) -> Result<ClassificationResult> {
        let normalized = y.normalized()?;
        let coding = self.code(y)?;
        let residuals = class_residuals(&self.dictionary, normalized.vector(), &coding)?;
        let class_index = argmin(&residuals);
        Ok(ClassificationResult {
            label: self.dictionary.partition().class_ids()[class_index].clone(),
            class_index,
            residuals,
            coding,
        })
    }

    /// Classifies every column of `queries`, in parallel when the `parallel`
    /// feature is enabled.
    pub fn classify_batch(&self, queries: &SampleMatrix) -> Result<Vec<ClassificationResult>> {
        parallel::try_map_indexed(queries.len(), |j| {
            self.classify(&Query::new(queries.column(j).clone_owned())?)
        })
    }

    /// Sequential batch classification with identical results, kept for
    /// timing comparisons against [`classify_batch`].
    pub fn classify_batch_seq(&self, queries: &SampleMatrix) -> Result<Vec<ClassificationResult>> {
        (0..queries.len())
            .map(|j| self.classify(&Query::new(queries.column(j).clone_owned())?))
            .collect()
    }
}

/// Fraction of results whose predicted label equals the query's own label.
pub fn batch_accuracy(results: &[ClassificationResult], queries: &SampleMatrix) -> Result<f64> {
    if results.len() != queries.len() {
        return Err(Error::DimensionMismatch {
            context: "results vs queries",
            expected: queries.len(),
            got: results.len(),
        });
    }
    let hits = results
        .iter()
        .enumerate()
        .filter(|(j, r)| r.label == queries.label_of(*j))
        .count();
    Ok(hits as f64 / results.len() as f64)
}

/// Writes one row per query: `query_index,predicted_label,true_label,r_1..r_K`.
pub fn write_predictions_csv(
    path: impl AsRef<Path>,
    results: &[ClassificationResult],
    true_labels: &[String],
) -> Result<()> {
    if results.len() != true_labels.len() {
        return Err(Error::DimensionMismatch {
            context: "results vs true labels",
            expected: true_labels.len(),
            got: results.len(),
        });
    }
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let k = results.first().map_or(0, |r| r.residuals.len());
    let mut header = vec![
        "query_index".to_string(),
        "predicted_label".to_string(),
        "true_label".to_string(),
    ];
    header.extend((1..=k).map(|i| format!("r_{i}")));
    writer.write_record(&header)?;
    for (j, (result, truth)) in results.iter().zip(true_labels).enumerate() {
        let mut record = vec![j.to_string(), result.label.clone(), truth.clone()];
        record.extend(result.residuals.iter().map(|r| r.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
