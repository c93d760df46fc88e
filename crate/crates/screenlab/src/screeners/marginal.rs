//! Marginal screening scores: Pearson correlation, standardized rank
//! indicators, and distance correlation. Each returns one nonnegative score
//! per column; constant columns (or a constant response) score 0.

use crate::core::{Matrix, ResponseVector};

/// Absolute Pearson correlation between each column and the response.
pub fn sis_scores(x: &Matrix, y: &ResponseVector) -> Vec<f64> {
    let n = x.n() as f64;
    let yv = y.values();
    let y_mean = yv.iter().sum::<f64>() / n;
    let y_var = yv.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n;
    if y_var <= 0.0 {
        return vec![0.0; x.p()];
    }
    let y_sd = y_var.sqrt();
    (0..x.p())
        .map(|j| {
            let col = x.column(j);
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            if var <= 0.0 {
                return 0.0;
            }
            let cov = col
                .iter()
                .zip(yv)
                .map(|(&xi, &yi)| (xi - mean) * (yi - y_mean))
                .sum::<f64>()
                / n;
            (cov / (var.sqrt() * y_sd)).abs()
        })
        .collect()
}

/// Rank-indicator score: mean over k of [mean over i of x̃ᵢⱼ·1{yᵢ < y_k}]²,
/// with x̃ the column standardized to mean 0, variance 1.
///
/// Sorting y once turns the inner indicator sum into a prefix-sum lookup, so
/// each column costs O(n log n) instead of O(n²).
pub fn sirs_scores(x: &Matrix, y: &ResponseVector) -> Vec<f64> {
    let n = x.n();
    let nf = n as f64;
    let yv = y.values();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| yv[a].partial_cmp(&yv[b]).unwrap());
    let sorted_y: Vec<f64> = order.iter().map(|&i| yv[i]).collect();
    // strict_below[k] = #{i : y_i < y_k}, also the prefix-sum cutoff for k
    let strict_below: Vec<usize> = (0..n)
        .map(|k| sorted_y.partition_point(|&v| v < yv[k]))
        .collect();

    (0..x.p())
        .map(|j| {
            let col = x.column(j);
            let mean = col.iter().sum::<f64>() / nf;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
            if var <= 0.0 {
                return 0.0;
            }
            let sd = var.sqrt();
            let mut prefix = vec![0.0; n + 1];
            for (t, &i) in order.iter().enumerate() {
                prefix[t + 1] = prefix[t] + (col[i] - mean) / sd;
            }
            strict_below
                .iter()
                .map(|&cut| (prefix[cut] / nf).powi(2))
                .sum::<f64>()
                / nf
        })
        .collect()
}

/// Empirical distance correlation between each column and the response.
pub fn dcsis_scores(x: &Matrix, y: &ResponseVector) -> Vec<f64> {
    let yv = y.values();
    let (y_rm, y_gm) = distance_row_means(yv);
    (0..x.p())
        .map(|j| distance_correlation(&x.column(j), yv, &y_rm, y_gm))
        .collect()
}

/// Row means and grand mean of the pairwise-distance matrix |uₖ − uₗ|,
/// via sorting: Σₗ|uₖ−uₗ| = uₖ·(2r−n) − 2·prefix(r) + total for rank r.
fn distance_row_means(u: &[f64]) -> (Vec<f64>, f64) {
    let n = u.len();
    let nf = n as f64;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| u[a].partial_cmp(&u[b]).unwrap());
    let mut prefix = vec![0.0; n + 1];
    for (t, &i) in order.iter().enumerate() {
        prefix[t + 1] = prefix[t] + u[i];
    }
    let total = prefix[n];
    let mut row_means = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        let r = rank as f64;
        let sum_abs = u[i] * (2.0 * r - nf) - 2.0 * prefix[rank] + total;
        row_means[i] = sum_abs / nf;
    }
    let grand = row_means.iter().sum::<f64>() / nf;
    (row_means, grand)
}

fn distance_correlation(u: &[f64], v: &[f64], v_rm: &[f64], v_gm: f64) -> f64 {
    let n = u.len();
    let (u_rm, u_gm) = distance_row_means(u);
    let mut suv = 0.0;
    let mut suu = 0.0;
    let mut svv = 0.0;
    for k in 0..n {
        for l in 0..n {
            let a = (u[k] - u[l]).abs() - u_rm[k] - u_rm[l] + u_gm;
            let b = (v[k] - v[l]).abs() - v_rm[k] - v_rm[l] + v_gm;
            suv += a * b;
            suu += a * a;
            svv += b * b;
        }
    }
    if suu <= 0.0 || svv <= 0.0 {
        return 0.0;
    }
    (suv.max(0.0) / (suu * svv).sqrt()).sqrt()
}
