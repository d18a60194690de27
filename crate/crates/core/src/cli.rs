//! Command-line front end: `estimate`, `test`, `simulate` and `qq`.
//!
//! Exit codes: 0 success, 2 invalid input or arguments, 3 estimation failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{estimate, test_null, InferenceConfig, SolverConfig};
use crate::io::{
    qq_data, qq_points, qq_sup_deviation, read_csv, read_result, write_document, write_qq_csv,
    Dataset, ResultDocument, TOOL_VERSION,
};
use crate::lasso::{fit, LassoConfig};
use crate::nuisance::NuisanceEstimator;
use crate::simulate::{read_study, run_study, write_detail, write_table};
use crate::transform::{FamilyKind, TransformationFamily};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ESTIMATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hdtransform",
    version,
    about = "Transformation-parameter estimation in high-dimensional transformation models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate theta with a bootstrap confidence interval.
    ///
    /// The interval is centered at theta_hat; a null value lies outside it
    /// exactly when the level-alpha test rejects.
    Estimate(EstimateArgs),
    /// Estimate theta and test H0: theta0 = NULL.
    Test(TestArgs),
    /// Run a Monte Carlo study from a JSON configuration file.
    Simulate(SimulateArgs),
    /// Write Q-Q plot data of standardized residuals at theta, at theta = 0
    /// and on the untransformed scale.
    Qq(QqArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    pub response: String,
    /// Columns to ignore.
    #[arg(long, value_delimiter = ',')]
    pub drop: Vec<String>,
    /// Transformation family.
    #[arg(long, default_value = "box-cox", value_parser = parse_family)]
    pub family: FamilyKind,
}

fn parse_family(s: &str) -> std::result::Result<FamilyKind, String> {
    s.parse::<FamilyKind>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub theta_min: Option<f64>,
    #[arg(long)]
    pub theta_max: Option<f64>,
    /// Grid points of the score scan.
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    /// Bootstrap replicates; 0 skips the bootstrap and the interval.
    #[arg(long, default_value_t = 100)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Result JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub theta_min: Option<f64>,
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    #[arg(long, default_value_t = 100)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Hypothesized theta0.
    #[arg(long = "null", allow_hyphen_values = true)]
    pub null: f64,
    /// Optional result JSON including the test.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Override the replication count of every configuration.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Override the base seed of every configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Table CSV, one row per configuration.
    #[arg(long)]
    pub out: PathBuf,
    /// Detail JSON (default: the table path with a .json extension).
    #[arg(long)]
    pub detail: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct QqArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Take theta from a result JSON written by `estimate`.
    #[arg(long)]
    pub theta_hat_from: Option<PathBuf>,
    /// Writes PREFIX_theta.csv, PREFIX_zero.csv and PREFIX_raw.csv.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

/// A failure tagged with the stage it happened in.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub code: i32,
    pub error: Error,
}

fn input(stage: &'static str) -> impl Fn(Error) -> Failure {
    move |error| Failure {
        stage,
        code: EXIT_INPUT,
        error,
    }
}

fn estimation(stage: &'static str) -> impl Fn(Error) -> Failure {
    move |error| Failure {
        stage,
        code: EXIT_ESTIMATION,
        error,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error [{}]: {}", f.stage, f.error);
            f.code
        }
    }
}

pub fn execute(command: &Command) -> std::result::Result<(), Failure> {
    let threads = match command {
        Command::Estimate(a) => a.threads,
        Command::Test(a) => a.threads,
        Command::Simulate(a) => a.threads,
        Command::Qq(_) => None,
    };
    let pool = build_pool(threads).map_err(input("arguments"))?;
    pool.install(|| match command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Test(a) => cmd_test(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Qq(a) => cmd_qq(a),
    })
}

fn build_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidConfig("--threads must be at least 1".into()));
        }
        b = b.num_threads(t);
    }
    b.build().map_err(|e| Error::InvalidConfig(e.to_string()))
}

#[derive(Debug, Clone, Serialize)]
struct EstimateEcho<'a> {
    data: &'a Path,
    response: &'a str,
    drop: &'a [String],
    family: FamilyKind,
    theta_bounds: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    null: Option<f64>,
    solver: &'a SolverConfig,
    lasso: &'a LassoConfig,
    inference: &'a InferenceConfig,
}

struct Prepared {
    data: Dataset,
    family: TransformationFamily,
    solver: SolverConfig,
    lasso: LassoConfig,
    inference: InferenceConfig,
}

#[allow(clippy::too_many_arguments)]
fn prepare(
    d: &DataArgs,
    theta_min: Option<f64>,
    theta_max: Option<f64>,
    grid: usize,
    bootstrap: usize,
    alpha: f64,
    seed: u64,
) -> std::result::Result<Prepared, Failure> {
    let base = TransformationFamily::new(d.family);
    let (lo, hi) = base.domain();
    let bounds = (theta_min.unwrap_or(lo), theta_max.unwrap_or(hi));
    let solver = SolverConfig {
        grid_points: grid,
        theta_bounds: Some(bounds),
        ..SolverConfig::default()
    };
    solver.validate(&base).map_err(input("arguments"))?;
    if bootstrap == 1 {
        return Err(input("arguments")(Error::InvalidConfig(
            "--bootstrap must be 0 or at least 2".into(),
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(input("arguments")(Error::InvalidConfig(
            "--alpha must lie in (0, 1)".into(),
        )));
    }
    let family = solver.family(&base).map_err(input("arguments"))?;
    let data = read_csv(&d.data, &d.response, &d.drop).map_err(input("read data"))?;
    if let Some(bad) = data.y.iter().find(|y| !family.contains_y(**y)) {
        return Err(input("read data")(
            crate::error::TransformError::YOutOfDomain {
                family: family.kind,
                y: *bad,
            }
            .into(),
        ));
    }
    Ok(Prepared {
        data,
        family,
        solver,
        lasso: LassoConfig::default(),
        inference: InferenceConfig {
            n_boot: bootstrap,
            alpha,
            seed,
            plugin: true,
        },
    })
}

fn run_estimation(
    d: &DataArgs,
    prep: &Prepared,
    null: Option<f64>,
) -> std::result::Result<(ResultDocument, crate::estimator::Estimate), Failure> {
    let echo = EstimateEcho {
        data: &d.data,
        response: &d.response,
        drop: &d.drop,
        family: prep.family.kind,
        theta_bounds: prep.family.domain(),
        null,
        solver: &prep.solver,
        lasso: &prep.lasso,
        inference: &prep.inference,
    };
    let config =
        serde_json::to_value(&echo).map_err(|e| input("config")(Error::Json(e.to_string())))?;
    log::info!("{TOOL_VERSION} configuration: {config}");
    let est = estimate(
        &prep.data,
        &prep.family,
        &prep.lasso,
        &prep.solver,
        &prep.inference,
    )
    .map_err(estimation("estimate"))?;
    let doc = ResultDocument {
        tool_version: TOOL_VERSION.to_string(),
        result: est.result.clone(),
        test: None,
        config: Some(config),
    };
    Ok((doc, est))
}

fn print_summary(doc: &ResultDocument) {
    let r = &doc.result;
    println!("family      {}", r.family);
    println!("theta_hat   {:.8}", r.theta_hat);
    println!("mean_psi    {:.3e}", r.mean_psi_at_hat);
    if let Some(ci) = r.ci {
        println!(
            "ci          [{:.8}, {:.8}] (level {:.3}, centered at theta_hat)",
            ci.lo,
            ci.hi,
            1.0 - ci.alpha
        );
    }
    if let Some(s) = r.sigma_boot {
        println!(
            "sigma_boot  {:.6e} ({} replicates, {} failed)",
            s, r.n_boot, r.boot_failures
        );
    }
    if let Some(s) = r.sigma_plug {
        println!("sigma_plug  {s:.6e}");
    }
    if r.multi_root {
        println!("warning: the score changes sign more than once on the grid");
    }
}

fn cmd_estimate(a: &EstimateArgs) -> std::result::Result<(), Failure> {
    let prep = prepare(
        &a.data,
        a.theta_min,
        a.theta_max,
        a.grid,
        a.bootstrap,
        a.alpha,
        a.seed,
    )?;
    let (doc, _) = run_estimation(&a.data, &prep, None)?;
    print_summary(&doc);
    write_document(&doc, &a.out).map_err(input("write result"))?;
    Ok(())
}

fn cmd_test(a: &TestArgs) -> std::result::Result<(), Failure> {
    let prep = prepare(
        &a.data,
        a.theta_min,
        a.theta_max,
        a.grid,
        a.bootstrap,
        a.alpha,
        a.seed,
    )?;
    if a.bootstrap == 0 {
        return Err(input("arguments")(Error::InvalidConfig(
            "test needs --bootstrap of at least 2".into(),
        )));
    }
    if !prep.family.contains_theta(a.null) {
        let (lo, hi) = prep.family.domain();
        return Err(input("arguments")(Error::InvalidConfig(format!(
            "--null {} is outside the theta bounds [{lo}, {hi}]",
            a.null
        ))));
    }
    let (mut doc, _) = run_estimation(&a.data, &prep, Some(a.null))?;
    let t = test_null(&doc.result, a.null).map_err(estimation("test"))?;
    doc.test = Some(t);
    print_summary(&doc);
    println!("null        {}", a.null);
    println!("decision    {}", if t.reject { "reject" } else { "accept" });
    println!("z_stat      {:.6}", t.z_stat);
    println!("p_value     {:.6}", t.p_value);
    if let Some(out) = &a.out {
        write_document(&doc, out).map_err(input("write result"))?;
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> std::result::Result<(), Failure> {
    let mut study = read_study(&a.config).map_err(input("read config"))?;
    for c in &mut study.configurations {
        if let Some(r) = a.reps {
            c.reps = r;
        }
        if let Some(s) = a.seed {
            c.base_seed = s;
        }
        c.validate().map_err(input("read config"))?;
    }
    let mut reports = Vec::new();
    for (i, c) in study.configurations.iter().enumerate() {
        log::info!(
            "{TOOL_VERSION} configuration {i}: {}",
            serde_json::to_string(c).unwrap_or_default()
        );
        let r = run_study(c).map_err(estimation("simulate"))?;
        println!(
            "{:<12} mean {:+.6}  acceptance {}  mae {:.4}  rel_mse {:.4}  failures {}",
            c.name.as_deref().unwrap_or("-"),
            r.mean_estimator,
            r.acceptance_rate
                .map_or("-".to_string(), |v| format!("{v:.3}")),
            r.mae,
            r.rel_mse,
            r.failures
        );
        reports.push(r);
    }
    write_table(&reports, &a.out).map_err(input("write table"))?;
    let detail = a
        .detail
        .clone()
        .unwrap_or_else(|| a.out.with_extension("json"));
    write_detail(&reports, &detail).map_err(input("write detail"))?;
    Ok(())
}

/// Output paths of the qq command.
pub fn qq_paths(prefix: &Path) -> [PathBuf; 3] {
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    [with("_theta.csv"), with("_zero.csv"), with("_raw.csv")]
}

fn cmd_qq(a: &QqArgs) -> std::result::Result<(), Failure> {
    let theta = match (a.theta, &a.theta_hat_from) {
        (Some(t), _) => t,
        (None, Some(path)) => {
            read_result(path)
                .map_err(input("read result"))?
                .result
                .theta_hat
        }
        (None, None) => {
            return Err(input("arguments")(Error::InvalidConfig(
                "qq needs --theta or --theta-hat-from".into(),
            )))
        }
    };
    let family = TransformationFamily::new(a.data.family);
    if !family.contains_theta(theta) {
        return Err(input("arguments")(Error::InvalidConfig(format!(
            "theta {theta} outside the family domain"
        ))));
    }
    let data =
        read_csv(&a.data.data, &a.data.response, &a.data.drop).map_err(input("read data"))?;
    let lasso = LassoConfig::default();
    let est = NuisanceEstimator::new(&data, family, &lasso).map_err(input("read data"))?;
    let at_theta = est.fit_at(theta, None).map_err(estimation("fit"))?;
    let at_zero = est.fit_at(0.0, None).map_err(estimation("fit"))?;
    let raw_fit = fit(&data.x, &data.y, &lasso).map_err(|e| estimation("fit")(e.into()))?;
    let pred = raw_fit.predict(&data.x);
    let raw_resid: Vec<f64> = data.y.iter().zip(&pred).map(|(y, p)| y - p).collect();
    let raw_s2 = raw_resid.iter().map(|r| r * r).sum::<f64>() / raw_resid.len() as f64;

    let q_theta = qq_data(&at_theta).map_err(estimation("qq"))?;
    let q_zero = qq_data(&at_zero).map_err(estimation("qq"))?;
    let q_raw = qq_points(&raw_resid, raw_s2).map_err(estimation("qq"))?;
    let paths = qq_paths(&a.out_prefix);
    for (points, path) in [&q_theta, &q_zero, &q_raw].into_iter().zip(&paths) {
        write_qq_csv(points, path).map_err(input("write qq"))?;
    }
    println!(
        "sup_dev theta={theta:.8}  {:.6}",
        qq_sup_deviation(&q_theta)
    );
    println!("sup_dev theta=0           {:.6}", qq_sup_deviation(&q_zero));
    println!("sup_dev untransformed     {:.6}", qq_sup_deviation(&q_raw));
    Ok(())
}
