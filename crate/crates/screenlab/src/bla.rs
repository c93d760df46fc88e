//! Best linear approximation of a black-box function over [0,1)^d:
//! closed-form coefficients via quadrature, the exact inverse of the
//! moment matrix, and data-driven subset least squares.

use crate::core::{Matrix, ResponseVector, SubsetModel, VariableSet};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BlaError {
    #[error("function returned a non-finite value at a quadrature node")]
    NonFiniteEvaluation,
    #[error("bordered Gram matrix is numerically singular")]
    SingularGram,
    #[error("subset size {m} must be smaller than the number of runs {n}")]
    SubsetTooLarge { m: usize, n: usize },
    #[error("subset index {index} exceeds dimension {p}")]
    IndexExceedsDimension { index: usize, p: usize },
    #[error("response length {len} does not match the design's {n} rows")]
    LengthMismatch { len: usize, n: usize },
    #[error("quadrature budget {given} is below the minimum {min}")]
    QuadratureTooSmall { given: usize, min: usize },
}

/// Deterministic black-box function on [0,1)^dim.
#[derive(Clone)]
pub struct IntegrableFunction {
    dim: usize,
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl IntegrableFunction {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        IntegrableFunction { dim, f: Arc::new(f) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.f)(x)
    }
}

impl std::fmt::Debug for IntegrableFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntegrableFunction").field("dim", &self.dim).finish()
    }
}

/// Intercept and slopes of the least-squares affine approximation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlaResult {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub quadrature_points: usize,
}

const MIN_QUAD: usize = 1024;
const HALTON_POINTS: usize = 1 << 16;
const HALTON_SCRAMBLE_SEED: u64 = 0x5eed_4a17_0e5d_1ce5;

/// Quadrature nodes over [0,1)^dim: a tensor midpoint rule for dim <= 3,
/// a scrambled Halton sequence (fixed size, fixed scramble) for dim >= 4.
pub(crate) fn quadrature_nodes(dim: usize, n_quad: usize) -> Vec<Vec<f64>> {
    if dim <= 3 {
        let k = (n_quad as f64).powf(1.0 / dim as f64).ceil() as usize;
        let k = k.max(2);
        let mut nodes = Vec::with_capacity(k.pow(dim as u32));
        let mut idx = vec![0usize; dim];
        loop {
            nodes.push(idx.iter().map(|&i| (i as f64 + 0.5) / k as f64).collect());
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < k {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == dim {
                    return nodes;
                }
            }
        }
    } else {
        scrambled_halton(dim, HALTON_POINTS)
    }
}

fn first_primes(count: usize) -> Vec<usize> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2usize;
    while primes.len() < count {
        if primes.iter().all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn scrambled_halton(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let primes = first_primes(dim);
    let mut rng = ChaCha12Rng::seed_from_u64(HALTON_SCRAMBLE_SEED);
    // One digit permutation per base, fixing 0 so trailing zeros stay zero.
    let perms: Vec<Vec<usize>> = primes
        .iter()
        .map(|&b| {
            let mut perm: Vec<usize> = (1..b).collect();
            perm.shuffle(&mut rng);
            let mut full = vec![0usize];
            full.extend(perm);
            full
        })
        .collect();
    (1..=count)
        .map(|i| {
            primes
                .iter()
                .zip(&perms)
                .map(|(&b, perm)| {
                    let mut x = 0.0f64;
                    let mut denom = 1.0f64;
                    let mut k = i;
                    while k > 0 {
                        denom *= b as f64;
                        x += perm[k % b] as f64 / denom;
                        k /= b;
                    }
                    x
                })
                .collect()
        })
        .collect()
}

/// Closed-form affine approximation: slope_j = 12 (int x_j f - int f / 2),
/// intercept = int f - sum(slopes) / 2, with integrals by quadrature.
pub fn bla_closed_form(f: &IntegrableFunction, n_quad: usize) -> Result<BlaResult, BlaError> {
    if n_quad < MIN_QUAD {
        return Err(BlaError::QuadratureTooSmall {
            given: n_quad,
            min: MIN_QUAD,
        });
    }
    let nodes = quadrature_nodes(f.dim(), n_quad);
    let count = nodes.len();
    let mut total = 0.0;
    let mut moments = vec![0.0; f.dim()];
    for x in &nodes {
        let v = f.eval(x);
        if !v.is_finite() {
            return Err(BlaError::NonFiniteEvaluation);
        }
        total += v;
        for (m, &xi) in moments.iter_mut().zip(x.iter()) {
            *m += xi * v;
        }
    }
    let mean = total / count as f64;
    let coefficients: Vec<f64> = moments
        .iter()
        .map(|&m| 12.0 * (m / count as f64 - 0.5 * mean))
        .collect();
    let intercept = mean - 0.5 * coefficients.iter().sum::<f64>();
    Ok(BlaResult {
        intercept,
        coefficients,
        quadrature_points: count,
    })
}

/// Smallest detectability margin |int x_j f - int f / 2| over the declared
/// active set; equals min |slope_j| / 12. None for an empty set.
pub fn active_margin(result: &BlaResult, active: &VariableSet) -> Option<f64> {
    active
        .zero_based()
        .map(|j| result.coefficients[j].abs() / 12.0)
        .min_by(|a, b| a.partial_cmp(b).unwrap())
}

/// Exact inverse of the (m+1) x (m+1) moment matrix
/// U = [[1, 1/2 row], [1/2 col, I/12 + J/4]] of the affine model:
/// 12 * [[(1+3m)/12, -1/2 row], [-1/2 col, I]].
pub fn precision_inverse(m: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m + 1, m + 1);
    out[(0, 0)] = 1.0 + 3.0 * m as f64;
    for k in 1..=m {
        out[(0, k)] = -6.0;
        out[(k, 0)] = -6.0;
        out[(k, k)] = 12.0;
    }
    out
}

const SINGULARITY_RATIO: f64 = 1e-10;

/// Least squares of y on an intercept plus the subset's columns.
///
/// Solves the bordered normal equations through a symmetric
/// eigendecomposition, rejecting Gram matrices whose smallest eigenvalue
/// magnitude is below 1e-10 of the largest. (The Gram matrix is symmetric
/// positive definite whenever the columns are independent, so its
/// eigenvalues are its singular values; nalgebra's general SVD can return
/// an inconsistent factorization on some well-conditioned inputs, while the
/// symmetric path is stable.)
pub fn ls_fit(x: &Matrix, y: &ResponseVector, a: &VariableSet) -> Result<SubsetModel, BlaError> {
    let n = x.n();
    let p = x.p();
    if y.len() != n {
        return Err(BlaError::LengthMismatch { len: y.len(), n });
    }
    if let Some(max) = a.max() {
        if max > p {
            return Err(BlaError::IndexExceedsDimension { index: max, p });
        }
    }
    let m = a.len();
    if m >= n {
        return Err(BlaError::SubsetTooLarge { m, n });
    }
    let cols: Vec<Vec<f64>> = a.zero_based().map(|j| x.column(j)).collect();
    let yv = y.values();

    let mut gram = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    gram[(0, 0)] = n as f64;
    rhs[0] = yv.iter().sum();
    for (k, ck) in cols.iter().enumerate() {
        gram[(0, k + 1)] = ck.iter().sum();
        gram[(k + 1, 0)] = gram[(0, k + 1)];
        rhs[k + 1] = ck.iter().zip(yv).map(|(a, b)| a * b).sum();
        for (l, cl) in cols.iter().enumerate().take(k + 1) {
            let dot: f64 = ck.iter().zip(cl).map(|(a, b)| a * b).sum();
            gram[(k + 1, l + 1)] = dot;
            gram[(l + 1, k + 1)] = dot;
        }
    }

    let eig = gram.symmetric_eigen();
    let smax = eig.eigenvalues.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let smin = eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v.abs()));
    if !(smax > 0.0) || smin < SINGULARITY_RATIO * smax {
        return Err(BlaError::SingularGram);
    }
    let mut projected = eig.eigenvectors.transpose() * &rhs;
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        projected[k] /= lambda;
    }
    let theta = &eig.eigenvectors * projected;

    let intercept = theta[0];
    let coefficients: Vec<f64> = (0..m).map(|k| theta[k + 1]).collect();
    let mut rss = 0.0;
    for i in 0..n {
        let mut fit = intercept;
        for (k, ck) in cols.iter().enumerate() {
            fit += coefficients[k] * ck[i];
        }
        let r = yv[i] - fit;
        rss += r * r;
    }
    Ok(SubsetModel {
        subset: a.clone(),
        intercept,
        coefficients,
        rss,
    })
}

/// Residual sum of squares of the subset fit.
pub fn rss(x: &Matrix, y: &ResponseVector, a: &VariableSet) -> Result<f64, BlaError> {
    ls_fit(x, y, a).map(|m| m.rss)
}
