//! Coverage-rate benchmark harness: repeated designs, shared per-repetition
//! data across methods, exact aggregation, and CSV/JSON report emission.

use crate::basis::{apply_basis, two_stage_screen, BasisKind};
use crate::core::{DesignMatrix, Matrix, ResponseVector, VariableSet};
use crate::modelsel;
use crate::sampling::{sample_uniform_design, spawn_rep_stream};
use crate::screeners::{self, ScreenerId};
use crate::testbed::TestFunction;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("repetition {rep} failed: {message}")]
    RepFailed { rep: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Column transform applied to the design before screening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPolicy {
    Linear,
    Quadratic,
    TwoStage,
}

impl std::str::FromStr for BasisPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(BasisPolicy::Linear),
            "quadratic" => Ok(BasisPolicy::Quadratic),
            "two-stage" | "two_stage" | "twostage" => Ok(BasisPolicy::TwoStage),
            other => Err(format!("unknown basis policy '{other}'")),
        }
    }
}

/// Screening size: fixed M, or per-repetition GCV selection seeded by the
/// lasso active-set size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SizePolicy {
    Fixed(usize),
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub function: TestFunction,
    pub n: usize,
    pub size: SizePolicy,
    pub methods: Vec<ScreenerId>,
    pub basis: BasisPolicy,
    pub folds: usize,
    pub reps: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    /// Fixed-M config with the shared defaults (10 folds).
    pub fn fixed(
        function: TestFunction,
        n: usize,
        m: usize,
        methods: Vec<ScreenerId>,
        reps: usize,
        master_seed: u64,
    ) -> Self {
        ExperimentConfig {
            function,
            n,
            size: SizePolicy::Fixed(m),
            methods,
            basis: BasisPolicy::Linear,
            folds: screeners::DEFAULT_FOLDS,
            reps,
            master_seed,
        }
    }

    pub fn p(&self) -> usize {
        self.function.p()
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |msg: String| Err(ExperimentError::InvalidConfig(msg));
        if self.reps < 1 {
            return fail("reps must be at least 1".into());
        }
        if self.methods.is_empty() {
            return fail("no screening methods configured".into());
        }
        if self.n < 3 {
            return fail(format!("need n >= 3 runs, got {}", self.n));
        }
        if self.folds < 2 {
            return fail(format!("need at least 2 folds, got {}", self.folds));
        }
        if let SizePolicy::Fixed(m) = self.size {
            if m < 1 || m > self.p() || m >= self.n {
                return fail(format!(
                    "M = {m} must satisfy 1 <= M <= p = {} and M < n = {}",
                    self.p(),
                    self.n
                ));
            }
            if m < self.function.truth().len() {
                return fail(format!(
                    "M = {m} cannot cover the {} active variables",
                    self.function.truth().len()
                ));
            }
        }
        Ok(())
    }
}

/// Fraction of selections that contain every truth index.
pub fn coverage_rate(selections: &[VariableSet], truth: &VariableSet) -> f64 {
    assert!(!selections.is_empty(), "no selections to aggregate");
    let hits = selections.iter().filter(|s| truth.is_subset_of(s)).count();
    hits as f64 / selections.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodReport {
    pub method: ScreenerId,
    /// Fraction of repetitions whose selection covered the whole truth set.
    pub coverage: f64,
    /// Per-variable selection frequency, length p.
    pub inclusion_rates: Vec<f64>,
    /// Selected subset size per repetition (constant unless size = auto).
    pub selected_sizes: Vec<usize>,
    pub mean_selected_m: f64,
    pub sd_selected_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub config: ExperimentConfig,
    pub truth: VariableSet,
    pub reps: usize,
    pub methods: Vec<MethodReport>,
    /// FNV-1a digest over every repetition's (X, y) bits; identical seeds and
    /// config must reproduce it exactly.
    pub data_hash: String,
    /// Not reproducible across runs; excluded from the CSV emission.
    pub wall_seconds: f64,
}

struct RepResult {
    selections: Vec<VariableSet>,
    size: usize,
    hash: u64,
}

fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = seed ^ 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn hash_data(x: &DesignMatrix, y: &ResponseVector) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325;
    for v in x.matrix().values() {
        h = fnv1a(h, &v.to_bits().to_le_bytes());
    }
    for v in y.values() {
        h = fnv1a(h, &v.to_bits().to_le_bytes());
    }
    h
}

fn run_single_rep(cfg: &ExperimentConfig, rep: usize) -> Result<RepResult, String> {
    let stream = spawn_rep_stream(cfg.master_seed, rep as u64);
    let design =
        sample_uniform_design(cfg.n, cfg.p(), stream).map_err(|e| e.to_string())?;
    let mut y = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        y.push(cfg.function.eval(design.row(i)).map_err(|e| e.to_string())?);
    }
    let y = ResponseVector::new(y).map_err(|e| e.to_string())?;
    let hash = hash_data(&design, &y);

    let quadratic = if cfg.basis == BasisPolicy::Quadratic {
        Some(apply_basis(&design, &BasisKind::Quadratic).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let screen_matrix: &Matrix = match &quadratic {
        Some(q) => q,
        None => design.matrix(),
    };

    // One cross-validation per repetition serves the lasso and FOSS arms
    // and, on the raw design, the auto-size search. The two-stage combiner
    // runs its own per-basis cross-validations.
    let wants_cv = cfg.basis != BasisPolicy::TwoStage
        && cfg
            .methods
            .iter()
            .any(|&mm| matches!(mm, ScreenerId::Lasso | ScreenerId::Foss));
    let mut cv_screen = None;

    // auto size comes from the GCV search on the raw design, seeded by the
    // sparse (one-standard-error) lasso active count
    let m = match cfg.size {
        SizePolicy::Fixed(m) => m,
        SizePolicy::Auto => {
            let cv = screeners::lasso_cv(design.matrix(), &y, cfg.folds, stream)
                .map_err(|e| e.to_string())?;
            let m0 = cv.one_se_fit.active.len().max(1);
            let chosen = modelsel::select_m_with_cv(design.matrix(), &y, m0, &cv)
                .map_err(|e| e.to_string())?
                .m;
            if cfg.basis == BasisPolicy::Linear {
                cv_screen = Some(cv);
            }
            chosen
        }
    };
    if wants_cv && cv_screen.is_none() {
        cv_screen = Some(
            screeners::lasso_cv(screen_matrix, &y, cfg.folds, stream)
                .map_err(|e| e.to_string())?,
        );
    }

    let mut selections = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let outcome = match (cfg.basis, method) {
            (BasisPolicy::TwoStage, _) => {
                two_stage_screen(&design, &y, m, method, cfg.folds, stream)
            }
            (_, ScreenerId::Lasso) => Ok(screeners::lasso_outcome_from_cv(
                cv_screen.as_ref().expect("cross-validation precomputed"),
                m,
            )),
            (_, ScreenerId::Foss) => screeners::foss_outcome_from_cv(
                screen_matrix,
                &y,
                m,
                cv_screen.as_ref().expect("cross-validation precomputed"),
            ),
            _ => screeners::run_screener(screen_matrix, &y, m, method, cfg.folds, stream),
        }
        .map_err(|e| format!("{method}: {e}"))?;
        selections.push(outcome.selected);
    }
    Ok(RepResult {
        selections,
        size: m,
        hash,
    })
}

/// Runs every repetition (in parallel, reduced in repetition order), then
/// aggregates coverage and per-variable inclusion exactly.
pub fn run_coverage_experiment(cfg: &ExperimentConfig) -> Result<CoverageReport, ExperimentError> {
    cfg.validate()?;
    let started = Instant::now();
    let results: Vec<RepResult> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            run_single_rep(cfg, rep).map_err(|message| ExperimentError::RepFailed { rep, message })
        })
        .collect::<Result<_, _>>()?;

    let truth = cfg.function.truth();
    let p = cfg.p();
    let repsf = cfg.reps as f64;
    let mut methods = Vec::with_capacity(cfg.methods.len());
    for (mi, &method) in cfg.methods.iter().enumerate() {
        let selections: Vec<VariableSet> =
            results.iter().map(|r| r.selections[mi].clone()).collect();
        let coverage = coverage_rate(&selections, &truth);
        let mut inclusion = vec![0.0; p];
        for sel in &selections {
            for j in sel.zero_based() {
                inclusion[j] += 1.0;
            }
        }
        for v in &mut inclusion {
            *v /= repsf;
        }
        let sizes: Vec<usize> = results.iter().map(|r| r.size).collect();
        let mean = sizes.iter().sum::<usize>() as f64 / repsf;
        let sd = if cfg.reps > 1 {
            (sizes
                .iter()
                .map(|&s| (s as f64 - mean).powi(2))
                .sum::<f64>()
                / (repsf - 1.0))
                .sqrt()
        } else {
            0.0
        };
        methods.push(MethodReport {
            method,
            coverage,
            inclusion_rates: inclusion,
            selected_sizes: sizes,
            mean_selected_m: mean,
            sd_selected_m: sd,
        });
    }

    let mut data_hash = 0u64;
    for r in &results {
        data_hash = fnv1a(data_hash, &r.hash.to_le_bytes());
    }

    Ok(CoverageReport {
        config: cfg.clone(),
        truth,
        reps: cfg.reps,
        methods,
        data_hash: format!("{data_hash:016x}"),
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// One row per method: coverage, size stats, and the truth variables'
/// inclusion rates. Deterministic given the report (no wall time).
pub fn write_csv_report<W: Write>(report: &CoverageReport, mut out: W) -> std::io::Result<()> {
    write!(out, "method,reps,coverage,mean_selected_m,sd_selected_m")?;
    for &t in report.truth.indices() {
        write!(out, ",incl_{t}")?;
    }
    writeln!(out)?;
    for m in &report.methods {
        write!(
            out,
            "{},{},{},{},{}",
            m.method, report.reps, m.coverage, m.mean_selected_m, m.sd_selected_m
        )?;
        for &t in report.truth.indices() {
            write!(out, ",{}", m.inclusion_rates[t - 1])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes `<stem>.csv` and `<stem>.json` under `dir`.
pub fn emit_report(
    report: &CoverageReport,
    dir: &Path,
    stem: &str,
) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    write_csv_report(report, std::fs::File::create(csv_path)?)?;
    let json_path = dir.join(format!("{stem}.json"));
    serde_json::to_writer_pretty(std::fs::File::create(json_path)?, report)?;
    Ok(())
}
