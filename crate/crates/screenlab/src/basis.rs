//! Coordinate-wise basis transforms, the detectability margin of a variable
//! under a basis, and the two-stage linear/quadratic screening combiner.

use crate::bla::{self, BlaError, IntegrableFunction};
use crate::core::{DesignMatrix, Matrix, ResponseVector};
use crate::sampling::SeededStream;
use crate::screeners::{self, ScreenerId, ScreenerError, ScreeningOutcome, TwoStageInfo};
use serde::Serialize;
use std::sync::Arc;

/// Scalar basis applied entry-wise to a design before linear screening.
#[derive(Clone)]
pub enum BasisKind {
    /// b(x) = x.
    Linear,
    /// b(x) = -4x^2 + 4x - 2/3, mean-zero and orthogonal to x on [0,1].
    Quadratic,
    /// Caller-supplied scalar map on [0,1].
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Serializable tag identifying which basis produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisLabel {
    Linear,
    Quadratic,
    Custom,
}

impl BasisKind {
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        BasisKind::Custom(Arc::new(f))
    }

    #[inline]
    pub fn apply(&self, t: f64) -> f64 {
        match self {
            BasisKind::Linear => t,
            BasisKind::Quadratic => -4.0 * t * t + 4.0 * t - 2.0 / 3.0,
            BasisKind::Custom(f) => f(t),
        }
    }

    pub fn label(&self) -> BasisLabel {
        match self {
            BasisKind::Linear => BasisLabel::Linear,
            BasisKind::Quadratic => BasisLabel::Quadratic,
            BasisKind::Custom(_) => BasisLabel::Custom,
        }
    }
}

impl std::fmt::Debug for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.label())
    }
}

/// Entry-wise b(x_ij); Linear copies the design through unchanged.
pub fn apply_basis(x: &DesignMatrix, b: &BasisKind) -> Result<Matrix, BlaError> {
    if matches!(b, BasisKind::Linear) {
        return Ok(x.matrix().clone());
    }
    let mut values = Vec::with_capacity(x.n() * x.p());
    for i in 0..x.n() {
        for &v in x.row(i) {
            let t = b.apply(v);
            if !t.is_finite() {
                return Err(BlaError::NonFiniteEvaluation);
            }
            values.push(t);
        }
    }
    Ok(Matrix::from_row_major(x.n(), x.p(), values).expect("shape preserved"))
}

/// Detectability margin of variable j under basis b:
/// int b(x_j) f(x) dx - (int_0^1 b) (int f dx), by quadrature.
///
/// A variable with zero margin is invisible to screening in this basis.
pub fn general_bla_coefficient(
    f: &IntegrableFunction,
    j: usize,
    b: &BasisKind,
    n_quad: usize,
) -> Result<f64, BlaError> {
    assert!(j >= 1 && j <= f.dim(), "variable index {j} outside 1..={}", f.dim());
    let nodes = bla::quadrature_nodes(f.dim(), n_quad);
    let mut joint = 0.0;
    let mut total = 0.0;
    for x in &nodes {
        let v = f.eval(x);
        if !v.is_finite() {
            return Err(BlaError::NonFiniteEvaluation);
        }
        let t = b.apply(x[j - 1]);
        if !t.is_finite() {
            return Err(BlaError::NonFiniteEvaluation);
        }
        joint += t * v;
        total += v;
    }
    let count = nodes.len() as f64;
    let b_mean = basis_mean(b, n_quad)?;
    Ok(joint / count - b_mean * (total / count))
}

/// int_0^1 b(t) dt by a one-dimensional midpoint rule.
fn basis_mean(b: &BasisKind, n_quad: usize) -> Result<f64, BlaError> {
    let k = n_quad.max(1024);
    let mut sum = 0.0;
    for i in 0..k {
        let t = b.apply((i as f64 + 0.5) / k as f64);
        if !t.is_finite() {
            return Err(BlaError::NonFiniteEvaluation);
        }
        sum += t;
    }
    Ok(sum / k as f64)
}

/// RSS tie tolerance below which the linear stage wins by convention.
pub const TWO_STAGE_TIE_EPS: f64 = 1e-12;

/// Runs the screener under the linear and the quadratic basis, fits each
/// selected subset against its own transformed design, and keeps the stage
/// with the smaller residual sum of squares (ties go to linear).
pub fn two_stage_screen(
    x: &DesignMatrix,
    y: &ResponseVector,
    m: usize,
    method: ScreenerId,
    folds: usize,
    stream: SeededStream,
) -> Result<ScreeningOutcome, ScreenerError> {
    let linear = screeners::run_screener(x.matrix(), y, m, method, folds, stream)?;
    let quad_design = apply_basis(x, &BasisKind::Quadratic)?;
    let quadratic = screeners::run_screener(&quad_design, y, m, method, folds, stream)?;

    let rss_linear = bla::rss(x.matrix(), y, &linear.selected)?;
    let rss_quadratic = bla::rss(&quad_design, y, &quadratic.selected)?;

    let tie = (rss_linear - rss_quadratic).abs() <= TWO_STAGE_TIE_EPS;
    let info = TwoStageInfo {
        linear_rss: rss_linear,
        quadratic_rss: rss_quadratic,
        tie_broken: tie,
    };
    let mut outcome = if tie || rss_linear < rss_quadratic {
        ScreeningOutcome {
            basis: BasisLabel::Linear,
            ..linear
        }
    } else {
        ScreeningOutcome {
            basis: BasisLabel::Quadratic,
            ..quadratic
        }
    };
    outcome.two_stage = Some(info);
    Ok(outcome)
}
