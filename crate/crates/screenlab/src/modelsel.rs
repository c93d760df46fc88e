//! Choosing the screening size M: the n/ln(n) default and generalized
//! cross-validation over the interval between the lasso's active-set size
//! and that default.

use crate::bla;
use crate::core::{Matrix, ResponseVector, VariableSet};
use crate::sampling::SeededStream;
use crate::screeners::{self, LassoCvResult, ScreenerError, DEFAULT_FOLDS};
use rayon::prelude::*;
use serde::Serialize;

/// How the size-M RSS in the GCV numerator is obtained.
#[derive(Debug, Clone)]
pub enum SubsetSolver {
    /// Local search seeded by `init` (at most M indices).
    Foss { init: VariableSet },
    /// Exact enumeration; only viable for tiny p.
    Exhaustive,
}

/// round(n / ln n), clamped to [1, n−2].
pub fn default_m(n: usize) -> usize {
    assert!(n >= 3, "need at least 3 runs, got {n}");
    let raw = (n as f64 / (n as f64).ln()).round() as usize;
    raw.clamp(1, n - 2)
}

/// GCV(M) = best size-M RSS / (n·(1 − M/n)²).
pub fn gcv(
    x: &Matrix,
    y: &ResponseVector,
    m: usize,
    solver: &SubsetSolver,
) -> Result<f64, ScreenerError> {
    let n = x.n();
    if m < 1 || m >= n {
        return Err(ScreenerError::InvalidSubsetSize {
            m,
            min: 1,
            max: n.saturating_sub(1),
        });
    }
    let subset = match solver {
        SubsetSolver::Foss { init } => screeners::foss_screen(x, y, m, init)?.selected,
        SubsetSolver::Exhaustive => screeners::exhaustive_best_subset(x, y, m)?,
    };
    let rss = bla::rss(x, y, &subset)?;
    let nf = n as f64;
    Ok(rss / (nf * (1.0 - m as f64 / nf).powi(2)))
}

/// Outcome of the data-driven size search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MSelection {
    /// Chosen size; ties in GCV go to the smaller M.
    pub m: usize,
    /// GCV value at the chosen size.
    pub gcv: f64,
    /// Inclusive search interval.
    pub interval: (usize, usize),
    /// GCV per size, ascending over the interval.
    pub curve: Vec<f64>,
}

/// Minimizes GCV over the closed interval between `m0` (the lasso active-set
/// size) and `default_m(n)`, solving each size with the lasso-seeded local
/// search.
pub fn select_m_detailed(
    x: &Matrix,
    y: &ResponseVector,
    m0: usize,
    stream: SeededStream,
) -> Result<MSelection, ScreenerError> {
    let cv = screeners::lasso_cv(x, y, DEFAULT_FOLDS, stream)?;
    select_m_with_cv(x, y, m0, &cv)
}

/// Same search as [`select_m_detailed`], reusing an already-computed
/// cross-validation result to seed the per-size subset searches.
pub fn select_m_with_cv(
    x: &Matrix,
    y: &ResponseVector,
    m0: usize,
    cv: &LassoCvResult,
) -> Result<MSelection, ScreenerError> {
    let n = x.n();
    if m0 < 1 || m0 >= n {
        return Err(ScreenerError::InvalidSubsetSize {
            m: m0,
            min: 1,
            max: n.saturating_sub(1),
        });
    }
    let dm = default_m(n);
    let lo = m0.min(dm);
    let hi = m0.max(dm).min(x.p()).min(n - 1);
    if lo > hi {
        return Err(ScreenerError::InvalidSubsetSize {
            m: lo,
            min: 1,
            max: hi,
        });
    }

    let curve: Vec<f64> = (lo..=hi)
        .into_par_iter()
        .map(|m| {
            let solver = SubsetSolver::Foss {
                init: screeners::trim_to_m(&cv.one_se_fit, m),
            };
            gcv(x, y, m, &solver)
        })
        .collect::<Result<_, _>>()?;

    let mut best = 0usize;
    for (i, &g) in curve.iter().enumerate() {
        if g < curve[best] {
            best = i;
        }
    }
    Ok(MSelection {
        m: lo + best,
        gcv: curve[best],
        interval: (lo, hi),
        curve,
    })
}

/// `select_m_detailed` reduced to the chosen size.
pub fn select_m(
    x: &Matrix,
    y: &ResponseVector,
    m0: usize,
    stream: SeededStream,
) -> Result<usize, ScreenerError> {
    Ok(select_m_detailed(x, y, m0, stream)?.m)
}
