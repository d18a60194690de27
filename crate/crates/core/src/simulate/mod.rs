//! Data-generating processes and the Monte Carlo harness.
//!
//! `y = Lambda_theta0^{-1}(x beta0 + eps)` with `x ~ N(0, Sigma)`,
//! `beta0 = (1, .., 1, 0, .., 0)` (s ones) and `sigma^2` calibrated to a
//! signal-to-noise ratio.

pub mod oracle;
pub mod quadrature;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, TransformError};
use crate::estimator::{estimate, solve, test_null, InferenceConfig, SolverConfig};
use crate::io::{Dataset, TOOL_VERSION};
use crate::lasso::LassoConfig;
use crate::nuisance::NuisanceEstimator;
use crate::stats::derive_seed;
use crate::transform::{FamilyKind, TransformationFamily};
use oracle::OracleModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovKind {
    /// `I_p`
    Identity,
    /// `c^{|i-j|}`
    Toeplitz,
    /// `(1 - c^p) I_p + c^{p - |i-j|}`
    Equi,
}

fn default_n_test() -> usize {
    200
}
fn default_s() -> usize {
    5
}
fn default_c() -> f64 {
    0.35
}
fn default_n_boot() -> usize {
    100
}
fn default_alpha() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub family: FamilyKind,
    pub theta0: f64,
    pub n: usize,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    pub p: usize,
    #[serde(default = "default_s")]
    pub s: usize,
    pub snr: f64,
    pub cov_kind: CovKind,
    #[serde(default = "default_c")]
    pub c: f64,
    pub reps: usize,
    #[serde(default = "default_n_boot")]
    pub n_boot: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub lasso: LassoConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl SimConfig {
    /// Box-Cox, theta0 = 0, n = 200, p = 20, s = 5, SNR = 1, identity covariance.
    pub fn table1() -> Self {
        Self {
            name: Some("table1".into()),
            family: FamilyKind::BoxCox,
            theta0: 0.0,
            n: 200,
            n_test: 200,
            p: 20,
            s: 5,
            snr: 1.0,
            cov_kind: CovKind::Identity,
            c: 0.35,
            reps: 200,
            n_boot: 100,
            alpha: 0.05,
            base_seed: 1,
            lasso: LassoConfig::default(),
            solver: SolverConfig::default(),
        }
    }

    pub fn family(&self) -> TransformationFamily {
        TransformationFamily::new(self.family)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.p == 0 || self.s == 0 || self.s > self.p {
            return bad("need 1 <= s <= p");
        }
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return bad("snr must be positive");
        }
        if self.reps == 0 {
            return bad("reps must be at least 1");
        }
        if self.n < 2 || self.n_test < 1 {
            return bad("need n >= 2 and n_test >= 1");
        }
        if !(self.c.abs() < 1.0) {
            return bad("|c| must be below 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if self.n_boot == 1 {
            return bad("n_boot must be 0 or at least 2");
        }
        if !self.family().contains_theta(self.theta0) {
            return bad("theta0 outside the family domain");
        }
        self.lasso.validate()?;
        self.solver.validate(&self.family())?;
        Ok(())
    }

    pub fn beta0(&self) -> Vec<f64> {
        (0..self.p)
            .map(|j| if j < self.s { 1.0 } else { 0.0 })
            .collect()
    }
}

pub fn make_covariance(kind: CovKind, p: usize, c: f64) -> Result<DMatrix<f64>> {
    if p == 0 {
        return Err(Error::Matrix(
            "covariance dimension must be positive".into(),
        ));
    }
    if !(c.abs() < 1.0) {
        return Err(Error::Matrix(format!("|c| = {} must be below 1", c.abs())));
    }
    let cov = match kind {
        CovKind::Identity => DMatrix::identity(p, p),
        CovKind::Toeplitz => DMatrix::from_fn(p, p, |i, j| c.powi(i.abs_diff(j) as i32)),
        CovKind::Equi => {
            let cp = c.powi(p as i32);
            DMatrix::from_fn(p, p, |i, j| {
                let off = c.powi((p - i.abs_diff(j)) as i32);
                if i == j {
                    1.0 - cp + off
                } else {
                    off
                }
            })
        }
    };
    if cov.clone().cholesky().is_none() {
        return Err(Error::Matrix(format!(
            "{kind:?} covariance is not positive definite"
        )));
    }
    Ok(cov)
}

/// `beta' Sigma beta / snr`
pub fn calibrate_sigma(beta: &[f64], cov: &DMatrix<f64>, snr: f64) -> Result<f64> {
    if !(snr > 0.0) {
        return Err(Error::InvalidConfig("snr must be positive".into()));
    }
    let b = DVector::from_column_slice(beta);
    let signal = (b.transpose() * cov * &b)[(0, 0)];
    if !(signal > 0.0) {
        return Err(Error::ZeroSignal);
    }
    Ok(signal / snr)
}

/// Precomputed pieces of one configuration's DGP.
#[derive(Debug, Clone)]
pub struct Dgp {
    pub family: TransformationFamily,
    pub theta0: f64,
    pub beta0: Vec<f64>,
    pub cov: DMatrix<f64>,
    pub sigma2: f64,
    chol: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct Draw {
    pub data: Dataset,
    /// `x_i beta0` for each row.
    pub mu: Vec<f64>,
    pub redraws: usize,
}

impl Dgp {
    pub fn new(config: &SimConfig) -> Result<Self> {
        let cov = make_covariance(config.cov_kind, config.p, config.c)?;
        let beta0 = config.beta0();
        let sigma2 = calibrate_sigma(&beta0, &cov, config.snr)?;
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Matrix("covariance is not positive definite".into()))?
            .l();
        Ok(Self {
            family: config.family(),
            theta0: config.theta0,
            beta0,
            cov,
            sigma2,
            chol,
        })
    }

    /// Draws `n` rows; rows whose latent value is outside the range of the
    /// transform are redrawn.
    pub fn draw(&self, rng: &mut ChaCha8Rng, n: usize) -> Result<Draw> {
        let p = self.beta0.len();
        let sd = self.sigma2.sqrt();
        let max_redraws = n / 10;
        let mut x = DMatrix::zeros(n, p);
        let mut y = Vec::with_capacity(n);
        let mut mu = Vec::with_capacity(n);
        let mut redraws = 0;
        let mut z = DVector::zeros(p);
        for i in 0..n {
            loop {
                z.iter_mut().for_each(|v| *v = StandardNormal.sample(rng));
                let row = &self.chol * &z;
                let m: f64 = row.iter().zip(&self.beta0).map(|(a, b)| a * b).sum();
                let e: f64 = StandardNormal.sample(rng);
                let eps = sd * e;
                match self.family.inverse(self.theta0, m + eps) {
                    Ok(v) => {
                        x.row_mut(i).tr_copy_from(&row);
                        y.push(v);
                        mu.push(m);
                        break;
                    }
                    Err(TransformError::OutOfRange { .. } | TransformError::Overflow { .. }) => {
                        redraws += 1;
                        if redraws > max_redraws {
                            return Err(Error::DgpInfeasible { redraws, n });
                        }
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(Draw {
            data: Dataset::from_matrix(y, x)?,
            mu,
            redraws,
        })
    }
}

#[derive(Debug, Clone)]
pub struct DrawnData {
    pub train: Dataset,
    pub test: Dataset,
    pub redraws: usize,
}

/// Training and test sets for one replication; deterministic in `rep_seed`.
pub fn draw_dataset(config: &SimConfig, rep_seed: u64) -> Result<DrawnData> {
    let dgp = Dgp::new(config)?;
    draw_with(&dgp, config, rep_seed)
}

fn draw_with(dgp: &Dgp, config: &SimConfig, rep_seed: u64) -> Result<DrawnData> {
    let mut rng = ChaCha8Rng::seed_from_u64(rep_seed);
    let train = dgp.draw(&mut rng, config.n)?;
    let test = dgp.draw(&mut rng, config.n_test)?;
    Ok(DrawnData {
        train: train.data,
        test: test.data,
        redraws: train.redraws + test.redraws,
    })
}

/// Seed of replication `rep`.
pub fn rep_seed(base_seed: u64, rep: usize) -> u64 {
    derive_seed(base_seed, rep as u64)
}

/// What an estimator hands back for one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RepEstimate {
    pub theta_hat: f64,
    /// `None` when no test was run.
    pub accepted: Option<bool>,
    pub intercept: f64,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep: usize,
    pub theta_hat: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<bool>,
    pub mse: f64,
    pub redraws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimConfig,
    pub sigma2: f64,
    pub mean_estimator: f64,
    /// Accepted / tested replications; `None` without a bootstrap.
    pub acceptance_rate: Option<f64>,
    pub mae: f64,
    pub mse: f64,
    pub rel_mse: f64,
    pub successes: usize,
    pub failures: usize,
    pub records: Vec<RepRecord>,
}

/// Default per-replication estimator: solve, bootstrap-test `theta = theta0`,
/// and return the conditional-mean fit at the estimate.
pub fn default_rep_estimator(
    train: &Dataset,
    config: &SimConfig,
    seed: u64,
) -> Result<RepEstimate> {
    let family = config.family();
    let inference = InferenceConfig {
        n_boot: config.n_boot,
        alpha: config.alpha,
        seed,
        plugin: false,
    };
    let est = estimate(train, &family, &config.lasso, &config.solver, &inference)?;
    let accepted = if config.n_boot > 0 {
        Some(!test_null(&est.result, config.theta0)?.reject)
    } else {
        None
    };
    let (intercept, beta) = est.solution.nuis_at_hat.fit_m.coefficients();
    Ok(RepEstimate {
        theta_hat: est.result.theta_hat,
        accepted,
        intercept,
        beta: beta.to_vec(),
    })
}

/// Out-of-sample `E_{n_t}[(Lambda_theta0(y) - a - x b)^2]`.
pub fn out_of_sample_mse(
    test: &Dataset,
    family: &TransformationFamily,
    theta0: f64,
    intercept: f64,
    beta: &[f64],
) -> Result<f64> {
    if beta.len() != test.p() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} columns",
            beta.len(),
            test.p()
        )));
    }
    let mut acc = 0.0;
    for (i, &y) in test.y.iter().enumerate() {
        let pred = intercept
            + test
                .x
                .row(i)
                .iter()
                .zip(beta)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        acc += (family.eval(theta0, y)? - pred).powi(2);
    }
    Ok(acc / test.n() as f64)
}

pub fn run_study(config: &SimConfig) -> Result<SimulationReport> {
    run_study_with(config, default_rep_estimator)
}

/// Runs `config.reps` replications in parallel with an injected estimator.
pub fn run_study_with<F>(config: &SimConfig, estimator: F) -> Result<SimulationReport>
where
    F: Fn(&Dataset, &SimConfig, u64) -> Result<RepEstimate> + Sync,
{
    config.validate()?;
    let dgp = Dgp::new(config)?;
    let family = config.family();
    let outcomes: Vec<Result<RepRecord>> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let seed = rep_seed(config.base_seed, rep);
            let drawn = draw_with(&dgp, config, seed)?;
            let est = estimator(&drawn.train, config, derive_seed(seed, u64::MAX))?;
            let mse = out_of_sample_mse(
                &drawn.test,
                &family,
                config.theta0,
                est.intercept,
                &est.beta,
            )?;
            Ok(RepRecord {
                rep,
                theta_hat: est.theta_hat,
                accepted: est.accepted,
                mse,
                redraws: drawn.redraws,
            })
        })
        .collect();
    let mut records = Vec::with_capacity(outcomes.len());
    let mut failures = 0;
    for (rep, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(r) => records.push(r),
            Err(e) => {
                log::warn!("replication {rep} failed: {e}");
                failures += 1;
            }
        }
    }
    summarize(config, dgp.sigma2, records, failures)
}

/// Aggregates replication records into the table metrics.
pub fn summarize(
    config: &SimConfig,
    sigma2: f64,
    records: Vec<RepRecord>,
    failures: usize,
) -> Result<SimulationReport> {
    let total = records.len() + failures;
    if records.is_empty() || failures * 5 > total {
        return Err(Error::StudyFailed {
            failed: failures,
            reps: total,
        });
    }
    let k = records.len() as f64;
    let mean_estimator = records.iter().map(|r| r.theta_hat).sum::<f64>() / k;
    let mae = records
        .iter()
        .map(|r| (r.theta_hat - config.theta0).abs())
        .sum::<f64>()
        / k;
    let mse = records.iter().map(|r| r.mse).sum::<f64>() / k;
    let tested: Vec<bool> = records.iter().filter_map(|r| r.accepted).collect();
    let acceptance_rate = if tested.is_empty() {
        None
    } else {
        Some(tested.iter().filter(|a| **a).count() as f64 / tested.len() as f64)
    };
    Ok(SimulationReport {
        config: config.clone(),
        sigma2,
        mean_estimator,
        acceptance_rate,
        mae,
        mse,
        rel_mse: mse / sigma2,
        successes: records.len(),
        failures,
        records,
    })
}

/// Raw estimates (no bootstrap) for `reps` replications.
pub fn estimator_histogram(config: &SimConfig, reps: usize) -> Result<Vec<f64>> {
    let config = SimConfig {
        reps,
        n_boot: 0,
        ..config.clone()
    };
    config.validate()?;
    let dgp = Dgp::new(&config)?;
    let family = config.family();
    let out: Vec<Result<f64>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let drawn = draw_with(&dgp, &config, rep_seed(config.base_seed, rep))?;
            Ok(solve(&drawn.train, &family, &config.lasso, &config.solver)?.theta_hat)
        })
        .collect();
    let failures = out.iter().filter(|r| r.is_err()).count();
    if failures * 5 > reps {
        return Err(Error::StudyFailed {
            failed: failures,
            reps,
        });
    }
    Ok(out.into_iter().filter_map(|r| r.ok()).collect())
}

/// `sup_theta ||X (beta_hat_theta - kappa_theta beta0)||_{P_n,2}` over
/// `grid` on one training draw of `config`, where `kappa_theta beta0` is the
/// population best linear predictor of `Lambda_theta(Y)`.
pub fn nuisance_prediction_error(config: &SimConfig, seed: u64, grid: &[f64]) -> Result<f64> {
    let dgp = Dgp::new(config)?;
    let draw = dgp.draw(&mut ChaCha8Rng::seed_from_u64(seed), config.n)?;
    let x = &draw.data.x;
    let fits = NuisanceEstimator::new(&draw.data, dgp.family, &config.lasso)?.fit_grid(grid);
    let oracle = OracleModel::new(dgp.family, dgp.theta0, dgp.sigma2.sqrt());
    let b0 = DVector::from_column_slice(&dgp.beta0);
    let signal_var = (b0.transpose() * &dgp.cov * &b0)[(0, 0)];
    let mut sup: f64 = 0.0;
    for (fit, &theta) in fits.into_iter().zip(grid) {
        let fit = fit?;
        let kappa = oracle.projection_slope(theta, signal_var)?;
        let (_, beta) = fit.fit_m.coefficients();
        let diff = DVector::from_iterator(
            beta.len(),
            beta.iter().zip(&dgp.beta0).map(|(b, t)| b - kappa * t),
        );
        let pred = x * diff;
        sup = sup.max((pred.norm_squared() / x.nrows() as f64).sqrt());
    }
    Ok(sup)
}

/// Study file: several configurations run in sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyFile {
    pub configurations: Vec<SimConfig>,
}

pub fn read_study(path: impl AsRef<Path>) -> Result<StudyFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_study(&text)
}

/// Parses a study file; errors name the offending field path.
pub fn parse_study(text: &str) -> Result<StudyFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let study: StudyFile = serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Json(format!("{}: {}", e.path(), e.inner())))?;
    if study.configurations.is_empty() {
        return Err(Error::InvalidConfig("no configurations".into()));
    }
    for (i, c) in study.configurations.iter().enumerate() {
        c.validate()
            .map_err(|e| Error::InvalidConfig(format!("configurations[{i}]: {e}")))?;
    }
    Ok(study)
}

#[derive(Debug, Serialize)]
struct TableRow<'a> {
    name: &'a str,
    family: FamilyKind,
    theta0: f64,
    n: usize,
    p: usize,
    s: usize,
    snr: f64,
    cov_kind: CovKind,
    reps: usize,
    mean_estimator: f64,
    acceptance_rate: Option<f64>,
    mae: f64,
    rel_mse: f64,
    mse: f64,
    sigma2: f64,
    failures: usize,
}

/// One CSV row per configuration.
pub fn write_table(reports: &[SimulationReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in reports {
        let c = &r.config;
        w.serialize(TableRow {
            name: c.name.as_deref().unwrap_or(""),
            family: c.family,
            theta0: c.theta0,
            n: c.n,
            p: c.p,
            s: c.s,
            snr: c.snr,
            cov_kind: c.cov_kind,
            reps: c.reps,
            mean_estimator: r.mean_estimator,
            acceptance_rate: r.acceptance_rate,
            mae: r.mae,
            rel_mse: r.rel_mse,
            mse: r.mse,
            sigma2: r.sigma2,
            failures: r.failures,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Detail<'a> {
    tool_version: &'a str,
    reports: &'a [SimulationReport],
}

/// Full reports, per-replication records included.
pub fn write_detail(reports: &[SimulationReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(
        BufWriter::new(file),
        &Detail {
            tool_version: TOOL_VERSION,
            reports,
        },
    )
    .map_err(|e| Error::Json(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn covariance_examples() {
        assert_eq!(
            make_covariance(CovKind::Identity, 3, 0.35).unwrap(),
            DMatrix::identity(3, 3)
        );
        let t = make_covariance(CovKind::Toeplitz, 2, 0.35).unwrap();
        assert_eq!(t, DMatrix::from_row_slice(2, 2, &[1.0, 0.35, 0.35, 1.0]));
        let e = make_covariance(CovKind::Equi, 2, 0.35).unwrap();
        assert_relative_eq!(e[(0, 0)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(e[(1, 1)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(e[(0, 1)], 0.35, epsilon = 1e-15);
        assert!(make_covariance(CovKind::Toeplitz, 3, 1.0).is_err());
        assert!(make_covariance(CovKind::Identity, 0, 0.1).is_err());
        for kind in [CovKind::Identity, CovKind::Toeplitz, CovKind::Equi] {
            let m = make_covariance(kind, 30, 0.35).unwrap();
            assert_eq!(m, m.transpose());
        }
    }

    #[test]
    fn calibration_examples() {
        let beta: Vec<f64> = (0..20).map(|j| if j < 5 { 1.0 } else { 0.0 }).collect();
        let id = DMatrix::identity(20, 20);
        assert_relative_eq!(
            calibrate_sigma(&beta, &id, 1.0).unwrap(),
            5.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            calibrate_sigma(&beta, &id, 3.0).unwrap(),
            5.0 / 3.0,
            epsilon = 1e-14
        );
        let mut e1 = vec![0.0; 4];
        e1[0] = 1.0;
        let t = make_covariance(CovKind::Toeplitz, 4, 0.35).unwrap();
        assert_relative_eq!(calibrate_sigma(&e1, &t, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(
            calibrate_sigma(&[0.0; 4], &t, 1.0),
            Err(Error::ZeroSignal)
        ));
    }

    #[test]
    fn box_cox_log_draws_are_positive() {
        let cfg = SimConfig::table1();
        let d = draw_dataset(&cfg, 11).unwrap();
        assert_eq!(d.redraws, 0);
        assert!(d.train.y.iter().all(|y| *y > 0.0));
        assert_eq!(d.train.n(), 200);
        assert_eq!(d.test.n(), 200);
        let again = draw_dataset(&cfg, 11).unwrap();
        assert_eq!(d.train, again.train);
        assert_eq!(d.test, again.test);
    }

    #[test]
    fn yeo_johnson_identity_draws() {
        let cfg = SimConfig {
            family: FamilyKind::YeoJohnson,
            theta0: 1.0,
            ..SimConfig::table1()
        };
        let dgp = Dgp::new(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = dgp.draw(&mut rng, 50).unwrap();
        // Lambda_1 is the identity for Yeo-Johnson, so y = x beta0 + eps
        let fam = TransformationFamily::yeo_johnson();
        for (i, y) in d.data.y.iter().enumerate() {
            assert_relative_eq!(fam.eval(1.0, *y).unwrap(), *y, epsilon = 1e-12);
            let _ = d.mu[i];
        }
    }

    #[test]
    fn infeasible_box_cox_is_reported() {
        // theta0 = 2 needs latent > -1/2, but the noise sd is large
        let cfg = SimConfig {
            theta0: 2.0,
            snr: 0.1,
            ..SimConfig::table1()
        };
        assert!(matches!(
            draw_dataset(&cfg, 1),
            Err(Error::DgpInfeasible { .. })
        ));
    }

    #[test]
    fn moderate_box_cox_redraws_are_counted() {
        let cfg = SimConfig {
            theta0: 0.05,
            ..SimConfig::table1()
        };
        // latent must exceed -20; with sd ~ 3.2 this essentially never fails
        let d = draw_dataset(&cfg, 5).unwrap();
        assert!(d.train.y.iter().all(|y| *y > 0.0));
    }

    #[test]
    fn oracle_estimator_metrics() {
        let cfg = SimConfig {
            reps: 1,
            ..SimConfig::table1()
        };
        let rep = run_study_with(&cfg, |train, c, _| {
            Ok(RepEstimate {
                theta_hat: c.theta0,
                accepted: Some(true),
                intercept: 0.0,
                beta: vec![0.0; train.p()],
            })
        })
        .unwrap();
        assert_eq!(rep.mae, 0.0);
        assert_eq!(rep.acceptance_rate, Some(1.0));
        assert_eq!(rep.failures, 0);
    }

    #[test]
    fn summarize_hand_records() {
        let cfg = SimConfig::table1();
        let rec = |rep, theta_hat, accepted, mse| RepRecord {
            rep,
            theta_hat,
            accepted,
            mse,
            redraws: 0,
        };
        let records = vec![
            rec(0, 0.1, Some(true), 4.0),
            rec(1, -0.3, Some(false), 6.0),
            rec(2, 0.05, Some(true), 5.0),
            rec(3, 0.0, Some(true), 5.0),
        ];
        let r = summarize(&cfg, 5.0, records.clone(), 1).unwrap();
        assert_relative_eq!(r.mean_estimator, -0.0375, epsilon = 1e-15);
        assert_relative_eq!(r.mae, 0.1125, epsilon = 1e-15);
        assert_eq!(r.acceptance_rate, Some(0.75));
        assert_relative_eq!(r.mse, 5.0, epsilon = 1e-15);
        assert_relative_eq!(r.rel_mse, 1.0, epsilon = 1e-15);
        assert!(matches!(
            summarize(&cfg, 5.0, records[..3].to_vec(), 1),
            Err(Error::StudyFailed { failed: 1, reps: 4 })
        ));
        let untested: Vec<RepRecord> = records
            .iter()
            .map(|r| RepRecord {
                accepted: None,
                ..r.clone()
            })
            .collect();
        assert_eq!(
            summarize(&cfg, 5.0, untested, 0).unwrap().acceptance_rate,
            None
        );
    }

    #[test]
    fn failures_are_counted() {
        let cfg = SimConfig {
            reps: 10,
            ..SimConfig::table1()
        };
        let out = run_study_with(&cfg, |train, c, seed| {
            if seed % 7 == 0 {
                Err(Error::EmptyData)
            } else {
                Ok(RepEstimate {
                    theta_hat: c.theta0,
                    accepted: None,
                    intercept: 0.0,
                    beta: vec![0.0; train.p()],
                })
            }
        })
        .unwrap();
        assert_eq!(out.successes + out.failures, 10);
        let all_fail = run_study_with(&cfg, |_, _, _| Err(Error::EmptyData));
        assert!(matches!(
            all_fail,
            Err(Error::StudyFailed {
                failed: 10,
                reps: 10
            })
        ));
    }

    #[test]
    fn study_file_errors_name_the_field() {
        let text = r#"{"configurations": [{"family": "box-cox", "theta0": 0.0, "n": "many",
            "p": 20, "snr": 1.0, "cov_kind": "identity", "reps": 10}]}"#;
        match parse_study(text) {
            Err(Error::Json(m)) => assert!(m.contains("configurations[0].n"), "{m}"),
            other => panic!("{other:?}"),
        }
        let text = r#"{"configurations": [{"family": "box-cox", "theta0": 0.0, "n": 200,
            "p": 20, "snr": 1.0, "cov_kind": "identity", "reps": 10}]}"#;
        let s = parse_study(text).unwrap();
        assert_eq!(s.configurations[0].n_boot, 100);
        assert_eq!(s.configurations[0].c, 0.35);
    }
}
