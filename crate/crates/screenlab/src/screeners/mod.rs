//! The five screening methods — correlation (SIS), rank-indicator (SIRS),
//! distance correlation (DC-SIS), cross-validated lasso, and best-subset
//! local search (FOSS) — plus the exhaustive subset oracle.

mod foss;
mod lasso;
mod marginal;

pub use foss::{exhaustive_best_subset, foss_screen};
pub use lasso::{
    lambda_grid, lasso_cv, lasso_outcome_from_cv, lasso_path, lasso_screen, LassoCvResult,
    LassoFit,
};
pub use marginal::{dcsis_scores, sirs_scores, sis_scores};

pub(crate) use lasso::trim_to_m;

/// Fold count used when a caller does not specify one.
pub const DEFAULT_FOLDS: usize = 10;

use crate::basis::BasisLabel;
use crate::bla::BlaError;
use crate::core::{CoreError, Matrix, ResponseVector, VariableSet};
use crate::sampling::SeededStream;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScreenerError {
    #[error(transparent)]
    Fit(#[from] BlaError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("coordinate descent failed to converge at lambda = {lambda}")]
    NoConvergence { lambda: f64 },
    #[error("subset size M = {m} must satisfy {min} <= M <= {max}")]
    InvalidSubsetSize { m: usize, min: usize, max: usize },
    #[error("cross-validation needs at least 2 folds, got {folds}")]
    TooFewFolds { folds: usize },
    #[error("initial subset has {init} indices, more than M = {m}")]
    InitTooLarge { init: usize, m: usize },
    #[error("{combinations} size-M subsets exceed the exhaustive-search cap {cap}")]
    TooManySubsets { combinations: u128, cap: u128 },
}

/// Which screening method produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenerId {
    Sis,
    Sirs,
    Dcsis,
    Lasso,
    Foss,
}

impl ScreenerId {
    pub const ALL: [ScreenerId; 5] = [
        ScreenerId::Sis,
        ScreenerId::Sirs,
        ScreenerId::Dcsis,
        ScreenerId::Lasso,
        ScreenerId::Foss,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScreenerId::Sis => "sis",
            ScreenerId::Sirs => "sirs",
            ScreenerId::Dcsis => "dcsis",
            ScreenerId::Lasso => "lasso",
            ScreenerId::Foss => "foss",
        }
    }
}

impl std::fmt::Display for ScreenerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScreenerId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sis" => Ok(ScreenerId::Sis),
            "sirs" => Ok(ScreenerId::Sirs),
            "dcsis" => Ok(ScreenerId::Dcsis),
            "lasso" => Ok(ScreenerId::Lasso),
            "foss" => Ok(ScreenerId::Foss),
            other => Err(format!("unknown screening method '{other}'")),
        }
    }
}

/// Residual comparison recorded by the two-stage combiner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoStageInfo {
    pub linear_rss: f64,
    pub quadratic_rss: f64,
    pub tie_broken: bool,
}

/// Per-variable scores and the size-M subset a screener selected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningOutcome {
    /// Method-specific importance, one entry per variable.
    pub scores: Vec<f64>,
    /// Exactly M selected variables, 1-based.
    pub selected: VariableSet,
    pub method: ScreenerId,
    pub basis: BasisLabel,
    /// Present when the outcome came from the two-stage combiner.
    pub two_stage: Option<TwoStageInfo>,
}

/// Indices of the M largest scores; ties broken toward the smaller index.
pub fn top_m(scores: &[f64], m: usize) -> VariableSet {
    assert!(m <= scores.len(), "M = {m} exceeds p = {}", scores.len());
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    VariableSet::from_indices(order[..m].iter().map(|&j| j + 1))
        .expect("positions are 1-based and distinct")
}

/// Dispatches one screening method on a (possibly basis-transformed) design.
///
/// Marginal methods rank by their score and take the top M. Lasso screens at
/// the cross-validated penalty. FOSS starts from the lasso's nonzero
/// coefficients (trimmed to the M largest) and locally minimizes RSS.
pub fn run_screener(
    x: &Matrix,
    y: &ResponseVector,
    m: usize,
    method: ScreenerId,
    folds: usize,
    stream: SeededStream,
) -> Result<ScreeningOutcome, ScreenerError> {
    if m < 1 || m > x.p() || m >= x.n() {
        return Err(ScreenerError::InvalidSubsetSize {
            m,
            min: 1,
            max: x.p().min(x.n().saturating_sub(1)),
        });
    }
    match method {
        ScreenerId::Sis | ScreenerId::Sirs | ScreenerId::Dcsis => {
            let scores = match method {
                ScreenerId::Sis => sis_scores(x, y),
                ScreenerId::Sirs => sirs_scores(x, y),
                _ => dcsis_scores(x, y),
            };
            let selected = top_m(&scores, m);
            Ok(ScreeningOutcome {
                scores,
                selected,
                method,
                basis: BasisLabel::Linear,
                two_stage: None,
            })
        }
        ScreenerId::Lasso => lasso_screen(x, y, m, folds, stream),
        ScreenerId::Foss => {
            let cv = lasso_cv(x, y, folds, stream)?;
            foss_outcome_from_cv(x, y, m, &cv)
        }
    }
}

/// The `run_screener` FOSS arm with the cross-validation result already in
/// hand: local search seeded by the one-standard-error fit trimmed to M.
pub fn foss_outcome_from_cv(
    x: &Matrix,
    y: &ResponseVector,
    m: usize,
    cv: &LassoCvResult,
) -> Result<ScreeningOutcome, ScreenerError> {
    let init = lasso::trim_to_m(&cv.one_se_fit, m);
    let mut outcome = foss_screen(x, y, m, &init)?;
    outcome.method = ScreenerId::Foss;
    Ok(outcome)
}
