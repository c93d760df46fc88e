//! ℓ1-penalized least squares by cyclic coordinate descent, with a
//! warm-started penalty path and K-fold cross-validation.
//!
//! The objective is (1/2n)‖y − b₀ − Xb‖² + λ‖b‖₁ on columns standardized to
//! mean 0, variance 1; reported coefficients are mapped back to the original
//! scale. The CV grid is computed once on the full data and shared across
//! folds; each fold re-centers its training rows but keeps the full-data
//! column scaling.

use super::{ScreenerError, ScreenerId, ScreeningOutcome};
use crate::basis::BasisLabel;
use crate::core::{Matrix, ResponseVector, VariableSet};
use crate::sampling::{SeededStream, PURPOSE_FOLDS};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

const CD_TOL: f64 = 1e-7;
const MAX_SWEEPS: usize = 100_000;
pub const GRID_COUNT: usize = 100;
pub const GRID_RATIO: f64 = 1e-3;

/// One point on the lasso path, reported on the original column scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LassoFit {
    pub lambda: f64,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub active: VariableSet,
}

/// Cross-validation summary: the chosen fit plus the full error curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LassoCvResult {
    /// Penalty grid, strictly decreasing.
    pub grid: Vec<f64>,
    /// Mean held-out squared error per grid point.
    pub cv_mean: Vec<f64>,
    /// Standard error of the fold errors per grid point.
    pub cv_se: Vec<f64>,
    /// Index of the minimal mean error (ties broken toward larger λ).
    pub min_index: usize,
    /// Largest λ whose mean error is within one standard error of the minimum.
    pub one_se_index: usize,
    /// Full-data fit at `grid[min_index]`.
    pub fit: LassoFit,
    /// Full-data fit at `grid[one_se_index]` — the sparser model used for
    /// screening and for sizing the subset-search interval.
    pub one_se_fit: LassoFit,
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

struct Standardized {
    /// Columns on the standardized scale (mean 0, variance 1; constants → 0).
    cols: Vec<Vec<f64>>,
    means: Vec<f64>,
    sds: Vec<f64>,
}

fn standardize(x: &Matrix) -> Standardized {
    let n = x.n() as f64;
    let p = x.p();
    let mut cols = Vec::with_capacity(p);
    let mut means = Vec::with_capacity(p);
    let mut sds = Vec::with_capacity(p);
    for j in 0..p {
        let col = x.column(j);
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
        cols.push(col.iter().map(|v| (v - mean) / sd).collect());
        means.push(mean);
        sds.push(sd);
    }
    Standardized { cols, means, sds }
}

/// Log-spaced decreasing grid from λ_max down to ratio·λ_max, inclusive.
/// Empty when the response is constant (λ_max = 0).
pub fn lambda_grid(x: &Matrix, y: &ResponseVector, count: usize, ratio: f64) -> Vec<f64> {
    assert!(count >= 2 && ratio > 0.0 && ratio < 1.0);
    let std = standardize(x);
    let n = x.n() as f64;
    let y_mean = y.values().iter().sum::<f64>() / n;
    let lambda_max = std
        .cols
        .iter()
        .map(|col| {
            col.iter()
                .zip(y.values())
                .map(|(&xi, &yi)| xi * (yi - y_mean))
                .sum::<f64>()
                .abs()
                / n
        })
        .fold(0.0, f64::max);
    if lambda_max <= 0.0 {
        return Vec::new();
    }
    (0..count)
        .map(|i| lambda_max * ratio.powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Coordinate descent over a decreasing grid with warm starts. `cols` may use
/// any centering; `col_norms[j]` must equal colⱼ·colⱼ/n. Returns one
/// working-scale coefficient vector per grid point.
fn descend_path(
    cols: &[Vec<f64>],
    col_norms: &[f64],
    yc: &[f64],
    grid: &[f64],
) -> Result<Vec<Vec<f64>>, ScreenerError> {
    let n = yc.len() as f64;
    let p = cols.len();
    let mut beta = vec![0.0; p];
    let mut resid = yc.to_vec();
    let mut path = Vec::with_capacity(grid.len());

    let update = |j: usize, lambda: f64, beta: &mut [f64], resid: &mut [f64]| -> f64 {
        let cj = col_norms[j];
        if cj <= 0.0 {
            return 0.0;
        }
        let old = beta[j];
        let grad = cols[j]
            .iter()
            .zip(resid.iter())
            .map(|(&xi, &ri)| xi * ri)
            .sum::<f64>()
            / n;
        let new = soft_threshold(grad + cj * old, lambda) / cj;
        if new != old {
            let delta = new - old;
            for (ri, &xi) in resid.iter_mut().zip(cols[j].iter()) {
                *ri -= delta * xi;
            }
            beta[j] = new;
        }
        (new - old).abs()
    };

    for &lambda in grid {
        let mut sweeps = 0usize;
        loop {
            let mut max_change = 0.0f64;
            for j in 0..p {
                max_change = max_change.max(update(j, lambda, &mut beta, &mut resid));
            }
            sweeps += 1;
            if max_change < CD_TOL {
                break;
            }
            if sweeps >= MAX_SWEEPS {
                return Err(ScreenerError::NoConvergence { lambda });
            }
            // converge on the current active set before the next full sweep
            let active: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
            loop {
                let mut inner_change = 0.0f64;
                for &j in &active {
                    inner_change = inner_change.max(update(j, lambda, &mut beta, &mut resid));
                }
                sweeps += 1;
                if inner_change < CD_TOL {
                    break;
                }
                if sweeps >= MAX_SWEEPS {
                    return Err(ScreenerError::NoConvergence { lambda });
                }
            }
        }
        path.push(beta.clone());
    }
    Ok(path)
}

fn to_original_scale(
    beta_std: &[f64],
    std: &Standardized,
    y_mean: f64,
    lambda: f64,
) -> LassoFit {
    let coefficients: Vec<f64> = beta_std
        .iter()
        .zip(&std.sds)
        .map(|(&b, &sd)| b / sd)
        .collect();
    let intercept = y_mean
        - coefficients
            .iter()
            .zip(&std.means)
            .map(|(&c, &m)| c * m)
            .sum::<f64>();
    let active = VariableSet::from_indices(
        beta_std
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0.0)
            .map(|(j, _)| j + 1),
    )
    .expect("indices are 1-based and distinct");
    LassoFit {
        lambda,
        intercept,
        coefficients,
        active,
    }
}

/// Full-data lasso fits along a strictly decreasing penalty grid.
pub fn lasso_path(
    x: &Matrix,
    y: &ResponseVector,
    grid: &[f64],
) -> Result<Vec<LassoFit>, ScreenerError> {
    assert!(
        grid.windows(2).all(|w| w[0] > w[1]),
        "penalty grid must be strictly decreasing"
    );
    assert!(grid.iter().all(|&l| l > 0.0), "penalties must be positive");
    let std = standardize(x);
    let n = x.n() as f64;
    let y_mean = y.values().iter().sum::<f64>() / n;
    let yc: Vec<f64> = y.values().iter().map(|v| v - y_mean).collect();
    let norms: Vec<f64> = std
        .cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>() / n)
        .collect();
    let path = descend_path(&std.cols, &norms, &yc, grid)?;
    Ok(path
        .iter()
        .zip(grid)
        .map(|(beta, &lambda)| to_original_scale(beta, &std, y_mean, lambda))
        .collect())
}

/// Round-robin fold labels over a shuffled index permutation.
pub(crate) fn fold_ids(n: usize, folds: usize, stream: SeededStream) -> Vec<usize> {
    let mut rng = stream.rng_for(PURPOSE_FOLDS);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut ids = vec![0usize; n];
    for (pos, &i) in perm.iter().enumerate() {
        ids[i] = pos % folds;
    }
    ids
}

fn zero_fit(p: usize, y_mean: f64) -> LassoFit {
    LassoFit {
        lambda: 1.0,
        intercept: y_mean,
        coefficients: vec![0.0; p],
        active: VariableSet::empty(),
    }
}

/// K-fold cross-validation over the standard grid; picks the λ with minimal
/// mean held-out error (no one-standard-error rule) and also records where
/// the one-standard-error point sits.
pub fn lasso_cv(
    x: &Matrix,
    y: &ResponseVector,
    folds: usize,
    stream: SeededStream,
) -> Result<LassoCvResult, ScreenerError> {
    if folds < 2 {
        return Err(ScreenerError::TooFewFolds { folds });
    }
    let n = x.n();
    let folds = folds.min(n);
    let grid = lambda_grid(x, y, GRID_COUNT, GRID_RATIO);
    let nf = n as f64;
    let y_mean = y.values().iter().sum::<f64>() / nf;
    if grid.is_empty() {
        return Ok(LassoCvResult {
            grid: vec![1.0],
            cv_mean: vec![0.0],
            cv_se: vec![0.0],
            min_index: 0,
            one_se_index: 0,
            fit: zero_fit(x.p(), y_mean),
            one_se_fit: zero_fit(x.p(), y_mean),
        });
    }

    let std = standardize(x);
    let yv = y.values();
    let ids = fold_ids(n, folds, stream);

    let fold_errors: Vec<Vec<f64>> = (0..folds)
        .into_par_iter()
        .map(|f| fold_mse(&std.cols, yv, &ids, f, &grid))
        .collect::<Result<_, _>>()?;

    let k = folds as f64;
    let mut cv_mean = Vec::with_capacity(grid.len());
    let mut cv_se = Vec::with_capacity(grid.len());
    for li in 0..grid.len() {
        let mean = fold_errors.iter().map(|e| e[li]).sum::<f64>() / k;
        let var = fold_errors
            .iter()
            .map(|e| (e[li] - mean).powi(2))
            .sum::<f64>()
            / (k - 1.0);
        cv_mean.push(mean);
        cv_se.push((var / k).sqrt());
    }

    let min_index = cv_mean
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .unwrap();
    let threshold = cv_mean[min_index] + cv_se[min_index];
    let one_se_index = (0..grid.len())
        .find(|&i| cv_mean[i] <= threshold)
        .unwrap_or(min_index);

    // one full-data path pass covers both chosen indices
    let yc: Vec<f64> = yv.iter().map(|v| v - y_mean).collect();
    let norms: Vec<f64> = std
        .cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>() / nf)
        .collect();
    let upto = min_index.max(one_se_index) + 1;
    let path = descend_path(&std.cols, &norms, &yc, &grid[..upto])?;
    let fit = to_original_scale(&path[min_index], &std, y_mean, grid[min_index]);
    let one_se_fit = to_original_scale(&path[one_se_index], &std, y_mean, grid[one_se_index]);

    Ok(LassoCvResult {
        grid,
        cv_mean,
        cv_se,
        min_index,
        one_se_index,
        fit,
        one_se_fit,
    })
}

fn fold_mse(
    xs_cols: &[Vec<f64>],
    yv: &[f64],
    ids: &[usize],
    fold: usize,
    grid: &[f64],
) -> Result<Vec<f64>, ScreenerError> {
    let n = yv.len();
    let train: Vec<usize> = (0..n).filter(|&i| ids[i] != fold).collect();
    let test: Vec<usize> = (0..n).filter(|&i| ids[i] == fold).collect();
    let ntr = train.len() as f64;
    let p = xs_cols.len();

    let mut cols = Vec::with_capacity(p);
    let mut col_means = Vec::with_capacity(p);
    let mut norms = Vec::with_capacity(p);
    for xs in xs_cols {
        let vals: Vec<f64> = train.iter().map(|&i| xs[i]).collect();
        let mean = vals.iter().sum::<f64>() / ntr;
        let centered: Vec<f64> = vals.iter().map(|v| v - mean).collect();
        norms.push(centered.iter().map(|v| v * v).sum::<f64>() / ntr);
        cols.push(centered);
        col_means.push(mean);
    }
    let y_train_mean = train.iter().map(|&i| yv[i]).sum::<f64>() / ntr;
    let yc: Vec<f64> = train.iter().map(|&i| yv[i] - y_train_mean).collect();

    let path = descend_path(&cols, &norms, &yc, grid)?;
    Ok(path
        .iter()
        .map(|beta| {
            let nonzero: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
            test.iter()
                .map(|&i| {
                    let pred = y_train_mean
                        + nonzero
                            .iter()
                            .map(|&j| beta[j] * (xs_cols[j][i] - col_means[j]))
                            .sum::<f64>();
                    (yv[i] - pred).powi(2)
                })
                .sum::<f64>()
                / test.len() as f64
        })
        .collect())
}

/// The ≤ M largest-|coefficient| nonzero variables of a fit, for seeding the
/// subset search.
pub(crate) fn trim_to_m(fit: &LassoFit, m: usize) -> VariableSet {
    let mut order: Vec<usize> = fit
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(j, _)| j)
        .collect();
    order.sort_by(|&a, &b| {
        fit.coefficients[b]
            .abs()
            .partial_cmp(&fit.coefficients[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    order.truncate(m);
    VariableSet::from_indices(order.into_iter().map(|j| j + 1)).expect("distinct 1-based")
}

/// Lasso screening: cross-validate λ, screen with the sparser
/// one-standard-error fit, and keep at most the M largest-|coefficient|
/// variables. The selection is never padded, so it can have fewer than M
/// indices when the cross-validated model is sparser than the budget —
/// an inactive response yields a near-empty selection instead of M
/// spuriously correlated fillers.
pub fn lasso_screen(
    x: &Matrix,
    y: &ResponseVector,
    m: usize,
    folds: usize,
    stream: SeededStream,
) -> Result<ScreeningOutcome, ScreenerError> {
    let cv = lasso_cv(x, y, folds, stream)?;
    Ok(lasso_outcome_from_cv(&cv, m))
}

/// The same selection as [`lasso_screen`], from an already-computed
/// cross-validation result.
pub fn lasso_outcome_from_cv(cv: &LassoCvResult, m: usize) -> ScreeningOutcome {
    let scores: Vec<f64> = cv.one_se_fit.coefficients.iter().map(|c| c.abs()).collect();
    let selected = trim_to_m(&cv.one_se_fit, m);
    ScreeningOutcome {
        scores,
        selected,
        method: ScreenerId::Lasso,
        basis: BasisLabel::Linear,
        two_stage: None,
    }
}
