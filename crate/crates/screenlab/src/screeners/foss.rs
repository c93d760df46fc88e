//! Size-constrained least squares by local search: greedy forward fill from
//! an initial subset, then best-improvement single swaps until no exchange
//! lowers the RSS. An exhaustive enumerator serves as the small-p oracle.

use super::{marginal, ScreenerError, ScreenerId, ScreeningOutcome};
use crate::basis::BasisLabel;
use crate::bla::{self, BlaError};
use crate::core::{expand_to_full, Matrix, ResponseVector, VariableSet};
use nalgebra::{DMatrix, DVector};

const SWAP_GAIN_EPS: f64 = 1e-10;
const MAX_SWAP_ROUNDS: usize = 1000;
pub const EXHAUSTIVE_CAP: u128 = 1_000_000;

/// Inverse bordered Gram matrix, coefficients, residuals, and RSS for the
/// intercept-plus-subset model. Subset holds 0-based column ids.
struct FitState {
    h: DMatrix<f64>,
    beta: DVector<f64>,
    resid: Vec<f64>,
    rss: f64,
}

fn fit_state(cols: &[Vec<f64>], yv: &[f64], subset: &[usize]) -> Result<FitState, BlaError> {
    let n = yv.len();
    let q = subset.len();
    let mut g = DMatrix::zeros(q + 1, q + 1);
    let mut zy = DVector::zeros(q + 1);
    g[(0, 0)] = n as f64;
    zy[0] = yv.iter().sum::<f64>();
    for (a, &ja) in subset.iter().enumerate() {
        let ca = &cols[ja];
        g[(0, a + 1)] = ca.iter().sum::<f64>();
        g[(a + 1, 0)] = g[(0, a + 1)];
        zy[a + 1] = ca.iter().zip(yv).map(|(&x, &y)| x * y).sum::<f64>();
        for (b, &jb) in subset.iter().enumerate().skip(a) {
            let dot = ca.iter().zip(&cols[jb]).map(|(&x, &z)| x * z).sum::<f64>();
            g[(a + 1, b + 1)] = dot;
            g[(b + 1, a + 1)] = dot;
        }
    }
    let h = g.try_inverse().ok_or(BlaError::SingularGram)?;
    let beta = &h * &zy;
    let mut resid = Vec::with_capacity(n);
    let mut rss = 0.0;
    for i in 0..n {
        let mut pred = beta[0];
        for (a, &ja) in subset.iter().enumerate() {
            pred += beta[a + 1] * cols[ja][i];
        }
        let r = yv[i] - pred;
        resid.push(r);
        rss += r * r;
    }
    Ok(FitState {
        h,
        beta,
        resid,
        rss,
    })
}

/// Per-outsider projections against the current model: t = Z′xⱼ, e′y, ‖e‖².
struct OutsiderStats {
    ids: Vec<usize>,
    t: Vec<DVector<f64>>,
    ey: Vec<f64>,
    en2: Vec<f64>,
}

fn outsider_stats(
    cols: &[Vec<f64>],
    subset: &[usize],
    state: &FitState,
) -> OutsiderStats {
    let q = subset.len();
    let inside: std::collections::HashSet<usize> = subset.iter().copied().collect();
    let ids: Vec<usize> = (0..cols.len()).filter(|j| !inside.contains(j)).collect();
    let mut t = Vec::with_capacity(ids.len());
    let mut ey = Vec::with_capacity(ids.len());
    let mut en2 = Vec::with_capacity(ids.len());
    for &j in &ids {
        let cj = &cols[j];
        let mut tj = DVector::zeros(q + 1);
        tj[0] = cj.iter().sum::<f64>();
        for (a, &ja) in subset.iter().enumerate() {
            tj[a + 1] = cj.iter().zip(&cols[ja]).map(|(&x, &z)| x * z).sum::<f64>();
        }
        let xx = cj.iter().map(|&x| x * x).sum::<f64>();
        let proj = (&state.h * &tj).dot(&tj);
        en2.push(xx - proj);
        ey.push(cj.iter().zip(&state.resid).map(|(&x, &r)| x * r).sum::<f64>());
        t.push(tj);
    }
    OutsiderStats { ids, t, ey, en2 }
}

/// Greedy forward fill: repeatedly add the outside column with the largest
/// marginal RSS reduction (x′r)²/‖e‖² until the subset reaches size m.
fn greedy_fill(
    cols: &[Vec<f64>],
    yv: &[f64],
    subset: &mut Vec<usize>,
    m: usize,
) -> Result<(), BlaError> {
    while subset.len() < m {
        let state = fit_state(cols, yv, subset)?;
        let out = outsider_stats(cols, subset, &state);
        let mut best: Option<(f64, usize)> = None;
        for (pos, &j) in out.ids.iter().enumerate() {
            let scale = cols[j].iter().map(|&x| x * x).sum::<f64>().max(1.0);
            if out.en2[pos] <= 1e-12 * scale {
                continue;
            }
            let gain = out.ey[pos] * out.ey[pos] / out.en2[pos];
            if best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, j));
            }
        }
        let j = best
            .map(|(_, j)| j)
            .or_else(|| out.ids.first().copied())
            .ok_or(BlaError::SingularGram)?;
        subset.push(j);
        subset.sort_unstable();
    }
    Ok(())
}

/// Best-improvement swap search. Mutates `subset` in place; returns final RSS.
fn swap_descent(
    cols: &[Vec<f64>],
    yv: &[f64],
    subset: &mut Vec<usize>,
) -> Result<f64, BlaError> {
    let mut rounds = 0;
    loop {
        let state = fit_state(cols, yv, subset)?;
        if subset.len() == cols.len() || rounds >= MAX_SWAP_ROUNDS {
            return Ok(state.rss);
        }
        let out = outsider_stats(cols, subset, &state);
        let q = subset.len();
        // ΔRSS of swapping inside position k for outsider j is α²_k − gain_kj;
        // α² is the RSS increase of dropping k, gain the decrease of adding j.
        let mut best: Option<(f64, usize, usize)> = None;
        for k in 1..=q {
            let hkk = state.h[(k, k)];
            if hkk <= 0.0 {
                continue;
            }
            let alpha2 = state.beta[k] * state.beta[k] / hkk;
            let hrow = state.h.row(k);
            for (pos, &j) in out.ids.iter().enumerate() {
                let u = hrow.transpose().dot(&out.t[pos]) / hkk;
                let den = out.en2[pos] + u * u * hkk;
                if den <= 1e-12 {
                    continue;
                }
                let num = out.ey[pos] + u * state.beta[k];
                let delta = alpha2 - num * num / den;
                if best.map_or(true, |(d, _, _)| delta < d) {
                    best = Some((delta, k, j));
                }
            }
        }
        match best {
            Some((delta, k, j)) if delta < -SWAP_GAIN_EPS => {
                subset[k - 1] = j;
                subset.sort_unstable();
                rounds += 1;
            }
            _ => return Ok(state.rss),
        }
    }
}

/// Initial subset padded to size m with the largest-|marginal correlation|
/// non-members, in score order.
fn pad_by_marginal_correlation(
    x: &Matrix,
    y: &ResponseVector,
    init: &VariableSet,
    m: usize,
) -> Vec<usize> {
    let mut subset: Vec<usize> = init.zero_based().collect();
    if subset.len() < m {
        let scores = marginal::sis_scores(x, y);
        let mut order: Vec<usize> = (0..x.p()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        let inside: std::collections::HashSet<usize> = subset.iter().copied().collect();
        for j in order {
            if subset.len() == m {
                break;
            }
            if !inside.contains(&j) {
                subset.push(j);
            }
        }
    }
    subset.sort_unstable();
    subset
}

/// Local search for the best size-m subset, seeded by `init` (at most m
/// indices). The result's RSS never exceeds that of `init` padded to size m
/// by marginal correlation, and no single swap can improve it by more than
/// 1e-10.
pub fn foss_screen(
    x: &Matrix,
    y: &ResponseVector,
    m: usize,
    init: &VariableSet,
) -> Result<ScreeningOutcome, ScreenerError> {
    let n = x.n();
    let p = x.p();
    if m < 1 || m > p || m >= n {
        return Err(ScreenerError::InvalidSubsetSize {
            m,
            min: 1,
            max: p.min(n.saturating_sub(1)),
        });
    }
    if init.len() > m {
        return Err(ScreenerError::InitTooLarge {
            init: init.len(),
            m,
        });
    }
    if let Some(mx) = init.max() {
        if mx > p {
            return Err(ScreenerError::Fit(BlaError::IndexExceedsDimension {
                index: mx,
                p,
            }));
        }
    }

    let cols = x.columns();
    let yv = y.values();

    let mut searched: Vec<usize> = init.zero_based().collect();
    greedy_fill(&cols, yv, &mut searched, m)?;
    let mut searched_rss = swap_descent(&cols, yv, &mut searched)?;

    // the padded baseline bounds the result's RSS; if the search start lost
    // to it, restart the descent from the baseline itself
    let padded = pad_by_marginal_correlation(x, y, init, m);
    if padded != searched {
        let padded_rss = fit_state(&cols, yv, &padded)?.rss;
        if searched_rss > padded_rss {
            let mut alt = padded;
            let alt_rss = swap_descent(&cols, yv, &mut alt)?;
            if alt_rss < searched_rss {
                searched = alt;
                searched_rss = alt_rss;
            }
        }
    }
    let _ = searched_rss;

    let selected = VariableSet::from_indices(searched.iter().map(|&j| j + 1))
        .expect("distinct 1-based indices");
    let model = bla::ls_fit(x, y, &selected)?;
    let scores = expand_to_full(&model, p)
        .expect("model subset indices lie within p")
        .iter()
        .map(|c| c.abs())
        .collect();
    Ok(ScreeningOutcome {
        scores,
        selected,
        method: ScreenerId::Foss,
        basis: BasisLabel::Linear,
        two_stage: None,
    })
}

fn binomial(p: u128, m: u128) -> u128 {
    let m = m.min(p - m);
    let mut acc: u128 = 1;
    for i in 0..m {
        acc = acc.saturating_mul(p - i) / (i + 1);
        if acc > EXHAUSTIVE_CAP.saturating_mul(1000) {
            return u128::MAX;
        }
    }
    acc
}

/// Globally best size-m subset by enumeration in lexicographic order; ties
/// keep the lexicographically first subset.
pub fn exhaustive_best_subset(
    x: &Matrix,
    y: &ResponseVector,
    m: usize,
) -> Result<VariableSet, ScreenerError> {
    let p = x.p();
    let n = x.n();
    if m < 1 || m > p || m >= n {
        return Err(ScreenerError::InvalidSubsetSize {
            m,
            min: 1,
            max: p.min(n.saturating_sub(1)),
        });
    }
    let combinations = binomial(p as u128, m as u128);
    if combinations > EXHAUSTIVE_CAP {
        return Err(ScreenerError::TooManySubsets {
            combinations,
            cap: EXHAUSTIVE_CAP,
        });
    }
    let cols = x.columns();
    let yv = y.values();
    let mut subset: Vec<usize> = (0..m).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let rss = fit_state(&cols, yv, &subset)
            .map(|s| s.rss)
            .unwrap_or(f64::INFINITY);
        if best.as_ref().map_or(true, |(b, _)| rss < *b) {
            best = Some((rss, subset.clone()));
        }
        // advance to the next combination in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                let (_, s) = best.unwrap();
                return Ok(VariableSet::from_indices(s.iter().map(|&j| j + 1))
                    .expect("distinct 1-based indices"));
            }
            i -= 1;
            if subset[i] != i + p - m {
                break;
            }
        }
        subset[i] += 1;
        for k in i + 1..m {
            subset[k] = subset[k - 1] + 1;
        }
    }
}
