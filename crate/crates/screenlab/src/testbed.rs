//! Benchmark simulators: the weighted-sphere, Ackley, and Yang test
//! functions, the borehole flow model, two screening counterexamples, and
//! inert-coordinate augmentation for p > p₀ studies.

use crate::bla::IntegrableFunction;
use crate::core::VariableSet;
use serde::Serialize;
use std::f64::consts::{E, PI};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TestbedError {
    #[error("point has dimension {given}, function expects {expected}")]
    DimensionMismatch { given: usize, expected: usize },
    #[error("ambient dimension {p} is below the active block size {min}")]
    DimensionTooSmall { p: usize, min: usize },
    #[error("{id} does not admit p0 = {p0}")]
    InvalidActiveCount { id: FunctionId, p0: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionId {
    WeightedSphere,
    Ackley,
    Yang,
    Borehole,
    Interaction,
    Quad1d,
}

impl FunctionId {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionId::WeightedSphere => "sphere",
            FunctionId::Ackley => "ackley",
            FunctionId::Yang => "yang",
            FunctionId::Borehole => "borehole",
            FunctionId::Interaction => "interaction",
            FunctionId::Quad1d => "quad1d",
        }
    }
}

impl std::fmt::Display for FunctionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FunctionId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Ok(FunctionId::WeightedSphere),
            "ackley" => Ok(FunctionId::Ackley),
            "yang" => Ok(FunctionId::Yang),
            "borehole" => Ok(FunctionId::Borehole),
            "interaction" => Ok(FunctionId::Interaction),
            "quad1d" => Ok(FunctionId::Quad1d),
            other => Err(format!("unknown test function '{other}'")),
        }
    }
}

/// Physical input ranges for the borehole model, in input order
/// (r_w, r, T_u, H_u, T_l, H_l, L, K_w).
pub const BOREHOLE_LO: [f64; 8] = [0.05, 100.0, 63070.0, 990.0, 63.1, 700.0, 1120.0, 1500.0];
pub const BOREHOLE_HI: [f64; 8] = [0.15, 50000.0, 115600.0, 1110.0, 116.0, 820.0, 1680.0, 15000.0];

/// Water flow rate (m³/yr) at a physical borehole input point.
pub fn borehole_physical(x: &[f64; 8]) -> f64 {
    let [rw, r, tu, hu, tl, hl, l, kw] = *x;
    let lg = (r / rw).ln();
    2.0 * PI * tu * (hu - hl) / (lg * (1.0 + 2.0 * l * tu / (lg * rw * rw * kw) + tu / tl))
}

/// Borehole flow at a unit-cube point, affinely mapped to the physical ranges.
pub fn eval_borehole(u: &[f64; 8]) -> f64 {
    let mut x = [0.0; 8];
    for i in 0..8 {
        x[i] = BOREHOLE_LO[i] + u[i] * (BOREHOLE_HI[i] - BOREHOLE_LO[i]);
    }
    borehole_physical(&x)
}

/// A benchmark function with `p0` active and `p - active_block` inert
/// coordinates. Only the leading active block enters the formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TestFunction {
    id: FunctionId,
    p0: usize,
    p: usize,
    /// Normalize Ackley's two averages by the ambient p instead of p0.
    ambient_normalizer: bool,
}

impl TestFunction {
    pub fn new(id: FunctionId, p0: usize, p: usize) -> Result<Self, TestbedError> {
        match id {
            FunctionId::Interaction if p0 != 2 => {
                return Err(TestbedError::InvalidActiveCount { id, p0 })
            }
            FunctionId::Quad1d if p0 != 1 => {
                return Err(TestbedError::InvalidActiveCount { id, p0 })
            }
            FunctionId::Borehole if !matches!(p0, 2 | 5 | 8) => {
                return Err(TestbedError::InvalidActiveCount { id, p0 })
            }
            _ => {}
        }
        if p0 < 1 {
            return Err(TestbedError::InvalidActiveCount { id, p0 });
        }
        let tf = TestFunction {
            id,
            p0,
            p,
            ambient_normalizer: false,
        };
        if p < tf.active_block() {
            return Err(TestbedError::DimensionTooSmall {
                p,
                min: tf.active_block(),
            });
        }
        Ok(tf)
    }

    pub fn id(&self) -> FunctionId {
        self.id
    }

    pub fn p0(&self) -> usize {
        self.p0
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn with_ambient_normalizer(mut self, on: bool) -> Self {
        self.ambient_normalizer = on;
        self
    }

    /// Leading coordinates the formula reads: 8 for the borehole (its truth
    /// set may still be a subset), p0 otherwise.
    pub fn active_block(&self) -> usize {
        match self.id {
            FunctionId::Borehole => 8,
            _ => self.p0,
        }
    }

    /// Ground-truth active set used for coverage counting.
    pub fn truth(&self) -> VariableSet {
        let ids: Vec<usize> = match (self.id, self.p0) {
            (FunctionId::Borehole, 2) => vec![1, 8],
            (FunctionId::Borehole, 5) => vec![1, 4, 6, 7, 8],
            (FunctionId::Borehole, _) => (1..=8).collect(),
            _ => (1..=self.p0).collect(),
        };
        VariableSet::from_indices(ids).expect("distinct 1-based indices")
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, TestbedError> {
        if x.len() != self.p {
            return Err(TestbedError::DimensionMismatch {
                given: x.len(),
                expected: self.p,
            });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match self.id {
            FunctionId::WeightedSphere => x[..self.p0]
                .iter()
                .enumerate()
                .map(|(j, &v)| (j + 1) as f64 * v * v)
                .sum(),
            FunctionId::Ackley => {
                let d = if self.ambient_normalizer {
                    self.p as f64
                } else {
                    self.p0 as f64
                };
                let sq: f64 = x[..self.p0].iter().map(|&v| v * v).sum();
                let lin: f64 = x[..self.p0].iter().map(|&v| 2.0 * PI * v).sum();
                -20.0 * (-(sq / d).sqrt() / 5.0).exp() - (lin / d).exp() + 20.0 + E
            }
            FunctionId::Yang => {
                let s: f64 = x[..self.p0].iter().sum();
                let damp: f64 = x[..self.p0].iter().map(|&v| (v * v).sin()).sum();
                s * (-damp).exp()
            }
            FunctionId::Borehole => {
                let mut u = [0.0; 8];
                u.copy_from_slice(&x[..8]);
                eval_borehole(&u)
            }
            FunctionId::Interaction => (x[0] - 0.5) * (x[1] - 0.5),
            FunctionId::Quad1d => 10.0 * (x[0] - 0.5) * (x[0] - 0.5),
        }
    }

    /// The same function viewed as a black box on [0,1)^p.
    pub fn to_integrable(&self) -> IntegrableFunction {
        let tf = *self;
        IntegrableFunction::new(self.p, move |x| tf.eval_unchecked(x))
    }
}

/// Widens the ambient dimension to `p`; the added coordinates are inert.
pub fn augment_with_noise(tf: &TestFunction, p: usize) -> Result<TestFunction, TestbedError> {
    if p < tf.active_block() {
        return Err(TestbedError::DimensionTooSmall {
            p,
            min: tf.active_block(),
        });
    }
    let mut wide = *tf;
    wide.p = p;
    Ok(wide)
}
