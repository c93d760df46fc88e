//! Verification utilities: exact L∞ star discrepancy for tiny point sets and
//! pick-freeze Monte Carlo Sobol indices.

use crate::bla::IntegrableFunction;
use crate::sampling::{SeededStream, PURPOSE_MONTE_CARLO};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

pub const STAR_MAX_POINTS: usize = 200;
pub const STAR_MAX_DIM: usize = 3;
pub const SOBOL_MIN_SAMPLES: usize = 1 << 10;
const VARIANCE_FLOOR: f64 = 1e-14;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagnosticsError {
    #[error("exact discrepancy handles at most {max_m} points in dimension {max_d}, got {m} in {d}")]
    TooLarge {
        m: usize,
        d: usize,
        max_m: usize,
        max_d: usize,
    },
    #[error("need at least {min} samples, got {given}")]
    TooFewSamples { given: usize, min: usize },
    #[error("function variance is numerically zero")]
    ZeroVariance,
}

/// Exact L∞ star discrepancy: the sup over anchored boxes [0,g) and their
/// closures of |empirical mass − volume|, evaluated on the grid of realized
/// coordinates plus 1.
pub fn star_discrepancy(points: &[Vec<f64>]) -> Result<f64, DiagnosticsError> {
    let m = points.len();
    assert!(m >= 1, "point set is empty");
    let d = points[0].len();
    assert!(d >= 1, "points have dimension zero");
    if m > STAR_MAX_POINTS || d > STAR_MAX_DIM {
        return Err(DiagnosticsError::TooLarge {
            m,
            d,
            max_m: STAR_MAX_POINTS,
            max_d: STAR_MAX_DIM,
        });
    }
    for pt in points {
        assert_eq!(pt.len(), d, "ragged point set");
        assert!(
            pt.iter().all(|&v| (0.0..1.0).contains(&v)),
            "points must lie in [0,1)"
        );
    }

    let mut grids: Vec<Vec<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut coords: Vec<f64> = points.iter().map(|pt| pt[j]).collect();
        coords.push(1.0);
        coords.sort_by(|a, b| a.partial_cmp(b).unwrap());
        coords.dedup();
        grids.push(coords);
    }

    let mf = m as f64;
    let mut worst = 0.0f64;
    let mut idx = vec![0usize; d];
    loop {
        let g: Vec<f64> = idx.iter().zip(&grids).map(|(&i, c)| c[i]).collect();
        let vol: f64 = g.iter().product();
        let mut closed = 0usize;
        let mut open = 0usize;
        for pt in points {
            if pt.iter().zip(&g).all(|(&x, &gj)| x <= gj) {
                closed += 1;
            }
            if pt.iter().zip(&g).all(|(&x, &gj)| x < gj) {
                open += 1;
            }
        }
        worst = worst
            .max(closed as f64 / mf - vol)
            .max(vol - open as f64 / mf);

        let mut dim = 0;
        loop {
            idx[dim] += 1;
            if idx[dim] < grids[dim].len() {
                break;
            }
            idx[dim] = 0;
            dim += 1;
            if dim == d {
                return Ok(worst);
            }
        }
    }
}

/// Per-coordinate Sobol sensitivity estimates from one pick-freeze panel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SobolEstimate {
    /// Sⱼ = Var(E[f|xⱼ])/Var(f), clamped to [0,1].
    pub first_order: Vec<f64>,
    /// Tⱼ = E[Var(f|x₋ⱼ)]/Var(f) (Jansen form), clamped to [0,1].
    pub total_effect: Vec<f64>,
    /// The variance estimate in the denominators.
    pub variance: f64,
    /// Base sample count N; the function is evaluated N·(dim+2) times.
    pub samples: usize,
}

/// Pick-freeze Sobol estimation with two independent N×dim sample matrices.
pub fn sobol_indices(
    f: &IntegrableFunction,
    n: usize,
    stream: SeededStream,
) -> Result<SobolEstimate, DiagnosticsError> {
    if n < SOBOL_MIN_SAMPLES {
        return Err(DiagnosticsError::TooFewSamples {
            given: n,
            min: SOBOL_MIN_SAMPLES,
        });
    }
    let d = f.dim();
    let mut rng = stream.rng_for(PURPOSE_MONTE_CARLO);
    let mut sample = |rows: usize| -> Vec<Vec<f64>> {
        (0..rows)
            .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
            .collect()
    };
    let a = sample(n);
    let b = sample(n);

    let fa: Vec<f64> = a.iter().map(|x| f.eval(x)).collect();
    let fb: Vec<f64> = b.iter().map(|x| f.eval(x)).collect();

    let nf = n as f64;
    let mean = (fa.iter().sum::<f64>() + fb.iter().sum::<f64>()) / (2.0 * nf);
    let variance = (fa.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
        + fb.iter().map(|v| (v - mean).powi(2)).sum::<f64>())
        / (2.0 * nf);
    if variance < VARIANCE_FLOOR {
        return Err(DiagnosticsError::ZeroVariance);
    }

    let mut first_order = Vec::with_capacity(d);
    let mut total_effect = Vec::with_capacity(d);
    let mut point = vec![0.0; d];
    for j in 0..d {
        let mut cov = 0.0;
        let mut jansen = 0.0;
        for i in 0..n {
            point.copy_from_slice(&a[i]);
            point[j] = b[i][j];
            let fab = f.eval(&point);
            cov += fb[i] * (fab - fa[i]);
            jansen += (fa[i] - fab).powi(2);
        }
        first_order.push((cov / nf / variance).clamp(0.0, 1.0));
        total_effect.push((jansen / (2.0 * nf) / variance).clamp(0.0, 1.0));
    }
    Ok(SobolEstimate {
        first_order,
        total_effect,
        variance,
        samples: n,
    })
}

/// First-order indices only.
pub fn sobol_first_order(
    f: &IntegrableFunction,
    n: usize,
    stream: SeededStream,
) -> Result<Vec<f64>, DiagnosticsError> {
    Ok(sobol_indices(f, n, stream)?.first_order)
}
