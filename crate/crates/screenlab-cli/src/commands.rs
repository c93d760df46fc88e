//! The six subcommands: dataset screening, coverage benchmarks, dataset
//! generation, closed-form affine coefficients, and design diagnostics.

use crate::dataset;
use crate::CliError;
use clap::Args;
use screenlab::basis::{apply_basis, two_stage_screen, BasisKind, BasisLabel};
use screenlab::bla::bla_closed_form;
use screenlab::core::{validate_design, ResponseVector};
use screenlab::diagnostics::{sobol_indices, star_discrepancy, SobolEstimate};
use screenlab::experiments::{
    emit_report, run_coverage_experiment, BasisPolicy, CoverageReport, ExperimentConfig,
    SizePolicy,
};
use screenlab::modelsel;
use screenlab::sampling::{sample_uniform_design, spawn_rep_stream, SeededStream};
use screenlab::screeners::{self, run_screener, ScreenerId, TwoStageInfo};
use screenlab::testbed::{FunctionId, TestFunction};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// `--m`: a fixed subset size, or GCV selection seeded by the lasso.
#[derive(Debug, Clone, Copy)]
pub enum SizeArg {
    Fixed(usize),
    Auto,
}

impl std::str::FromStr for SizeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SizeArg::Auto);
        }
        s.parse::<usize>()
            .map(SizeArg::Fixed)
            .map_err(|_| format!("expected a positive integer or 'auto', got '{s}'"))
    }
}

/// `--method`: a single method or the whole battery.
#[derive(Debug, Clone, Copy)]
pub enum MethodArg {
    One(ScreenerId),
    All,
}

impl std::str::FromStr for MethodArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(MethodArg::All);
        }
        s.parse::<ScreenerId>().map(MethodArg::One)
    }
}

fn basis_name(label: BasisLabel) -> &'static str {
    match label {
        BasisLabel::Linear => "linear",
        BasisLabel::Quadratic => "quadratic",
        BasisLabel::Custom => "custom",
    }
}

fn policy_name(policy: BasisPolicy) -> &'static str {
    match policy {
        BasisPolicy::Linear => "linear",
        BasisPolicy::Quadratic => "quadratic",
        BasisPolicy::TwoStage => "two_stage",
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Args)]
pub struct ScreenArgs {
    /// CSV dataset with a header row; predictors must lie in [0,1).
    pub dataset: PathBuf,

    /// Screening method: sis, sirs, dcsis, lasso, foss, or all.
    #[arg(long)]
    pub method: MethodArg,

    /// Subset size M, or 'auto' to pick it by generalized cross-validation.
    #[arg(long, default_value = "auto")]
    pub m: SizeArg,

    /// Basis transform: linear, quadratic, or two-stage.
    #[arg(long, default_value = "linear")]
    pub basis: BasisPolicy,

    /// Fold count for the lasso cross-validation.
    #[arg(long, default_value_t = screeners::DEFAULT_FOLDS)]
    pub folds: usize,

    /// Name of the response column.
    #[arg(long, default_value = "y")]
    pub response: String,

    /// Pull predictor values exactly equal to 1.0 down to 1 − 2⁻⁵².
    #[arg(long)]
    pub clip_eps: bool,

    /// Seed for the cross-validation fold shuffle.
    #[arg(long, env = "SCREENLAB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct MethodResult {
    method: &'static str,
    basis: &'static str,
    /// 1-based positions among the predictor columns, in file order.
    selected: Vec<usize>,
    scores: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_stage: Option<TwoStageInfo>,
}

#[derive(Serialize)]
struct ScreenReport {
    /// Method name, or "all" when every method ran.
    method: String,
    /// Basis that produced the selection; the requested policy for "all".
    basis: &'static str,
    m: usize,
    n: usize,
    p: usize,
    seed: u64,
    columns: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    selected_m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gcv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    selected: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scores: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_stage: Option<TwoStageInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    results: Option<Vec<MethodResult>>,
}

pub fn screen(args: &ScreenArgs) -> Result<(), CliError> {
    let data = dataset::read_dataset(&args.dataset, &args.response, args.clip_eps)?;
    let design = validate_design(&data.rows)?;
    let y = ResponseVector::new(data.response.clone())?;
    let stream = SeededStream::new(args.seed, 0);
    if let SizeArg::Fixed(m) = args.m {
        if m < 1 || m > design.p() || m >= design.n() {
            return Err(CliError::Input(format!(
                "M = {m} must satisfy 1 <= M <= p = {} and M < n = {}",
                design.p(),
                design.n()
            )));
        }
    }

    let methods: Vec<ScreenerId> = match args.method {
        MethodArg::One(id) => vec![id],
        MethodArg::All => ScreenerId::ALL.to_vec(),
    };
    let quadratic = if args.basis == BasisPolicy::Quadratic {
        Some(apply_basis(&design, &BasisKind::Quadratic)?)
    } else {
        None
    };
    let screen_matrix = quadratic.as_ref().unwrap_or_else(|| design.matrix());

    // one cross-validation serves the lasso and FOSS arms and, on the raw
    // design, the auto-size search; the two-stage combiner re-validates
    // per basis internally
    let wants_cv = args.basis != BasisPolicy::TwoStage
        && methods
            .iter()
            .any(|&mm| matches!(mm, ScreenerId::Lasso | ScreenerId::Foss));
    let mut cv_screen = None;

    // auto-M always searches on the untransformed design, seeded by the
    // sparse cross-validated lasso active count
    let (m, selected_m, gcv) = match args.m {
        SizeArg::Fixed(m) => (m, None, None),
        SizeArg::Auto => {
            let cv = screeners::lasso_cv(design.matrix(), &y, args.folds, stream)?;
            let m0 = cv.one_se_fit.active.len().max(1);
            let sel = modelsel::select_m_with_cv(design.matrix(), &y, m0, &cv)?;
            if args.basis == BasisPolicy::Linear {
                cv_screen = Some(cv);
            }
            (sel.m, Some(sel.m), Some(sel.gcv))
        }
    };
    if wants_cv && cv_screen.is_none() {
        cv_screen = Some(screeners::lasso_cv(screen_matrix, &y, args.folds, stream)?);
    }

    let mut outcomes = Vec::with_capacity(methods.len());
    for &method in &methods {
        let outcome = match (args.basis, method) {
            (BasisPolicy::TwoStage, _) => {
                two_stage_screen(&design, &y, m, method, args.folds, stream)?
            }
            (_, ScreenerId::Lasso) => screeners::lasso_outcome_from_cv(
                cv_screen.as_ref().expect("cross-validation precomputed"),
                m,
            ),
            (_, ScreenerId::Foss) => screeners::foss_outcome_from_cv(
                screen_matrix,
                &y,
                m,
                cv_screen.as_ref().expect("cross-validation precomputed"),
            )?,
            _ => run_screener(screen_matrix, &y, m, method, args.folds, stream)?,
        };
        outcomes.push(outcome);
    }

    let (n, p) = (design.n(), design.p());
    let report = if let [outcome] = &mut outcomes[..] {
        ScreenReport {
            method: outcome.method.name().into(),
            basis: basis_name(outcome.basis),
            m,
            n,
            p,
            seed: args.seed,
            columns: data.columns,
            selected_m,
            gcv,
            selected: Some(outcome.selected.indices().to_vec()),
            scores: Some(std::mem::take(&mut outcome.scores)),
            two_stage: outcome.two_stage,
            results: None,
        }
    } else {
        ScreenReport {
            method: "all".into(),
            basis: policy_name(args.basis),
            m,
            n,
            p,
            seed: args.seed,
            columns: data.columns,
            selected_m,
            gcv,
            selected: None,
            scores: None,
            two_stage: None,
            results: Some(
                outcomes
                    .into_iter()
                    .map(|o| MethodResult {
                        method: o.method.name(),
                        basis: basis_name(o.basis),
                        selected: o.selected.indices().to_vec(),
                        scores: o.scores,
                        two_stage: o.two_stage,
                    })
                    .collect(),
            ),
        }
    };
    emit_json(&report, args.out.as_deref())
}

#[derive(Args)]
pub struct BenchArgs {
    /// TOML benchmark configuration.
    pub config: PathBuf,

    /// Override the configured repetition count (bundled configs use 200;
    /// 1000 reproduces the full published tables).
    #[arg(long)]
    pub reps: Option<usize>,

    /// Override the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Directory for the CSV and JSON reports.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchToml {
    function: String,
    p0: usize,
    p: usize,
    n: usize,
    m: TomlSize,
    methods: Vec<String>,
    #[serde(default)]
    basis: Option<String>,
    #[serde(default)]
    folds: Option<usize>,
    reps: usize,
    master_seed: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TomlSize {
    Fixed(usize),
    Named(String),
}

fn build_config(raw: &BenchToml) -> Result<ExperimentConfig, CliError> {
    let id: FunctionId = raw.function.parse().map_err(CliError::Input)?;
    let function = TestFunction::new(id, raw.p0, raw.p)?;
    let size = match &raw.m {
        TomlSize::Fixed(m) => SizePolicy::Fixed(*m),
        TomlSize::Named(s) if s.eq_ignore_ascii_case("auto") => SizePolicy::Auto,
        TomlSize::Named(s) => {
            return Err(CliError::Input(format!(
                "m must be a positive integer or 'auto', got '{s}'"
            )))
        }
    };
    let mut methods = Vec::new();
    for name in &raw.methods {
        if name.eq_ignore_ascii_case("all") {
            methods.extend(ScreenerId::ALL);
        } else {
            methods.push(name.parse::<ScreenerId>().map_err(CliError::Input)?);
        }
    }
    let basis = match &raw.basis {
        Some(s) => s.parse::<BasisPolicy>().map_err(CliError::Input)?,
        None => BasisPolicy::Linear,
    };
    Ok(ExperimentConfig {
        function,
        n: raw.n,
        size,
        methods,
        basis,
        folds: raw.folds.unwrap_or(screeners::DEFAULT_FOLDS),
        reps: raw.reps,
        master_seed: raw.master_seed,
    })
}

fn print_coverage_table(report: &CoverageReport) {
    let cfg = &report.config;
    let size = match cfg.size {
        SizePolicy::Fixed(m) => m.to_string(),
        SizePolicy::Auto => "auto".into(),
    };
    println!(
        "function={} p0={} p={} n={} M={} basis={} reps={} seed={}",
        cfg.function.id().name(),
        cfg.function.p0(),
        cfg.function.p(),
        cfg.n,
        size,
        policy_name(cfg.basis),
        cfg.reps,
        cfg.master_seed
    );
    print!("{:<10}", "method");
    for m in &report.methods {
        print!("{:>10}", m.method.name());
    }
    println!();
    print!("{:<10}", "coverage");
    for m in &report.methods {
        print!("{:>10.4}", m.coverage);
    }
    println!();
    if matches!(cfg.size, SizePolicy::Auto) {
        print!("{:<10}", "mean_m");
        for m in &report.methods {
            print!("{:>10.3}", m.mean_selected_m);
        }
        println!();
        print!("{:<10}", "sd_m");
        for m in &report.methods {
            print!("{:>10.3}", m.sd_selected_m);
        }
        println!();
    }
}

pub fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    let raw: BenchToml = toml::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    let mut cfg = build_config(&raw)?;
    if let Some(reps) = args.reps {
        cfg.reps = reps;
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }

    let report = run_coverage_experiment(&cfg)?;
    let stem = args
        .config
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("benchmark");
    emit_report(&report, &args.out, stem)?;
    print_coverage_table(&report);
    println!(
        "wrote {stem}.csv and {stem}.json to {} (data hash {}, {:.1} s)",
        args.out.display(),
        report.data_hash,
        report.wall_seconds
    );
    Ok(())
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Test function: sphere, ackley, yang, borehole, interaction, quad1d.
    #[arg(long)]
    pub function: FunctionId,

    /// Number of active variables.
    #[arg(long)]
    pub p0: usize,

    /// Ambient dimension (number of predictor columns).
    #[arg(long)]
    pub p: usize,

    /// Number of rows.
    #[arg(long)]
    pub n: usize,

    /// Seed for the design draw.
    #[arg(long, env = "SCREENLAB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn generate(args: &GenerateArgs) -> Result<(), CliError> {
    let function = TestFunction::new(args.function, args.p0, args.p)?;
    let design = sample_uniform_design(args.n, args.p, spawn_rep_stream(args.seed, 0))?;
    let mut y = Vec::with_capacity(args.n);
    for i in 0..args.n {
        y.push(function.eval(design.row(i))?);
    }
    match &args.out {
        Some(path) => dataset::write_dataset(std::fs::File::create(path)?, &design, &y),
        None => dataset::write_dataset(std::io::stdout().lock(), &design, &y),
    }
}

#[derive(Args)]
pub struct BlaArgs {
    /// Test function: sphere, ackley, yang, borehole, interaction, quad1d.
    #[arg(long)]
    pub function: FunctionId,

    /// Number of active variables.
    #[arg(long)]
    pub p0: usize,

    /// Ambient dimension.
    #[arg(long)]
    pub p: usize,

    /// Quadrature budget: tensor midpoint nodes for p <= 3, a fixed
    /// scrambled low-discrepancy set above that.
    #[arg(long, default_value_t = 1 << 20)]
    pub quad: usize,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BlaReport {
    function: &'static str,
    p0: usize,
    p: usize,
    intercept: f64,
    coefficients: Vec<f64>,
    quadrature_points: usize,
}

pub fn bla(args: &BlaArgs) -> Result<(), CliError> {
    let function = TestFunction::new(args.function, args.p0, args.p)?;
    let result = bla_closed_form(&function.to_integrable(), args.quad)?;
    let report = BlaReport {
        function: args.function.name(),
        p0: args.p0,
        p: args.p,
        intercept: result.intercept,
        coefficients: result.coefficients,
        quadrature_points: result.quadrature_points,
    };
    emit_json(&report, args.out.as_deref())
}

#[derive(Args)]
pub struct DiscrepancyArgs {
    /// CSV of points with a header row; every column is a coordinate.
    pub points: PathBuf,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct DiscrepancyReport {
    points: usize,
    dim: usize,
    star_discrepancy: f64,
}

pub fn discrepancy(args: &DiscrepancyArgs) -> Result<(), CliError> {
    let points = dataset::read_points(&args.points)?;
    if points.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no data rows",
            args.points.display()
        )));
    }
    for (i, pt) in points.iter().enumerate() {
        for (j, &v) in pt.iter().enumerate() {
            if !(0.0..1.0).contains(&v) {
                return Err(CliError::Input(format!(
                    "row {}: coordinate {} = {v} lies outside [0,1)",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let value = star_discrepancy(&points)?;
    let report = DiscrepancyReport {
        points: points.len(),
        dim: points[0].len(),
        star_discrepancy: value,
    };
    emit_json(&report, args.out.as_deref())
}

#[derive(Args)]
pub struct SobolArgs {
    /// Test function: sphere, ackley, yang, borehole, interaction, quad1d.
    #[arg(long)]
    pub function: FunctionId,

    /// Number of active variables.
    #[arg(long)]
    pub p0: usize,

    /// Ambient dimension; the estimator costs N(p + 2) evaluations.
    #[arg(long)]
    pub p: usize,

    /// Base sample count N.
    #[arg(long, default_value_t = 1 << 14)]
    pub samples: usize,

    /// Seed for the two sample matrices.
    #[arg(long, env = "SCREENLAB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SobolReport {
    function: &'static str,
    p0: usize,
    p: usize,
    #[serde(flatten)]
    estimate: SobolEstimate,
}

pub fn sobol(args: &SobolArgs) -> Result<(), CliError> {
    let function = TestFunction::new(args.function, args.p0, args.p)?;
    let estimate = sobol_indices(
        &function.to_integrable(),
        args.samples,
        SeededStream::new(args.seed, 0),
    )?;
    let report = SobolReport {
        function: args.function.name(),
        p0: args.p0,
        p: args.p,
        estimate,
    };
    emit_json(&report, args.out.as_deref())
}
