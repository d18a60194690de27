//! Z-estimation of the transformation parameter and bootstrap inference.
//!
//! The empirical score `theta -> E_n psi(theta, h_hat(theta))` is scanned on
//! a grid; a bracketing sign change is refined by bisection (refitting the
//! nuisance at each midpoint) and the estimate is the evaluated point with
//! the smallest absolute score.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Dataset;
use crate::lasso::LassoConfig;
use crate::moment::empirical_moment;
use crate::nuisance::{NuisanceAtTheta, NuisanceEstimator};
use crate::stats::{derive_seed, normal_cdf, normal_quantile, sample_variance};
use crate::transform::{FamilyKind, TransformationFamily};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub grid_points: usize,
    pub refine_tol: f64,
    pub epsilon_n: f64,
    pub theta_bounds: Option<(f64, f64)>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_points: 41,
            refine_tol: 1e-8,
            epsilon_n: 1e-8,
            theta_bounds: None,
        }
    }
}

impl SolverConfig {
    /// Family restricted to `theta_bounds` when they are set.
    pub fn family(&self, family: &TransformationFamily) -> Result<TransformationFamily> {
        match self.theta_bounds {
            Some((lo, hi)) => Ok(TransformationFamily::with_domain(family.kind, lo, hi)?),
            None => Ok(*family),
        }
    }

    pub fn validate(&self, family: &TransformationFamily) -> Result<()> {
        let (lo, hi) = self.family(family)?.domain();
        if self.grid_points < 9 {
            return Err(Error::InvalidConfig(
                "grid_points must be at least 9".into(),
            ));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol < hi - lo) {
            return Err(Error::InvalidConfig(
                "refine_tol must be positive and smaller than the theta interval".into(),
            ));
        }
        if !(self.epsilon_n > 0.0) {
            return Err(Error::InvalidConfig("epsilon_n must be positive".into()));
        }
        Ok(())
    }

    /// Same search at half resolution, used for bootstrap replicates.
    pub fn half_resolution(&self) -> SolverConfig {
        SolverConfig {
            grid_points: self.grid_points.div_ceil(2).max(9),
            ..self.clone()
        }
    }

    pub fn grid(&self, family: &TransformationFamily) -> Result<Vec<f64>> {
        let (lo, hi) = self.family(family)?.domain();
        Ok(linspace(lo, hi, self.grid_points))
    }
}

pub fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let step = (hi - lo) / (k - 1) as f64;
    (0..k)
        .map(|i| if i + 1 == k { hi } else { lo + step * i as f64 })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<S> {
    pub theta_hat: f64,
    pub score_hat: f64,
    pub state_hat: S,
    /// Every evaluated `(theta, score)` in evaluation order: grid first, then refinements.
    pub trace: Vec<(f64, f64)>,
    pub multi_root: bool,
    /// `|score_hat| - min |score|` over the trace.
    pub realized_eps: f64,
}

/// Grid scan plus bisection on an abstract score.
///
/// `eval(theta, warm)` returns the score and a state that is offered as the
/// warm start of the next evaluation.
pub fn root_search<S, F>(grid: &[f64], refine_tol: f64, mut eval: F) -> Result<SearchOutcome<S>>
where
    F: FnMut(f64, Option<&S>) -> Result<(f64, S)>,
{
    let mut trace: Vec<(f64, f64)> = Vec::new();
    let mut states: Vec<S> = Vec::new();
    let mut last_error = None;
    for &theta in grid {
        let warm = states.last();
        match eval(theta, warm) {
            Ok((s, st)) if s.is_finite() => {
                trace.push((theta, s));
                states.push(st);
            }
            Ok(_) => last_error = Some("non-finite score".to_string()),
            Err(e) => last_error = Some(e.to_string()),
        }
    }
    if trace.is_empty() {
        return Err(Error::EstimationInfeasible(format!(
            "score failed at every grid point ({})",
            last_error.unwrap_or_default()
        )));
    }
    let n_grid = trace.len();
    let mut brackets = Vec::new();
    let mut roots = trace.iter().filter(|(_, s)| *s == 0.0).count();
    for k in 0..n_grid.saturating_sub(1) {
        let (s0, s1) = (trace[k].1, trace[k + 1].1);
        if s0 * s1 < 0.0 {
            brackets.push(k);
        }
    }
    roots += brackets.len();

    for k in brackets {
        let (mut a, mut sa) = trace[k];
        let (mut b, _) = trace[k + 1];
        let mut warm_idx = k;
        while b - a > refine_tol {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            match eval(mid, Some(&states[warm_idx])) {
                Ok((s, st)) if s.is_finite() => {
                    trace.push((mid, s));
                    states.push(st);
                    warm_idx = states.len() - 1;
                    if s == 0.0 {
                        break;
                    }
                    if s.signum() == sa.signum() {
                        a = mid;
                        sa = s;
                    } else {
                        b = mid;
                    }
                }
                _ => break,
            }
        }
    }

    let best = trace.iter().enumerate().fold(0, |best, (i, (_, s))| {
        if s.abs() < trace[best].1.abs() {
            i
        } else {
            best
        }
    });
    let (theta_hat, score_hat) = trace[best];
    let min_abs = trace
        .iter()
        .map(|(_, s)| s.abs())
        .fold(f64::INFINITY, f64::min);
    let state_hat = states.swap_remove(best);
    Ok(SearchOutcome {
        theta_hat,
        score_hat,
        state_hat,
        trace,
        multi_root: roots > 1,
        realized_eps: score_hat.abs() - min_abs,
    })
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub theta_hat: f64,
    pub mean_psi_at_hat: f64,
    pub per_obs_at_hat: Vec<f64>,
    pub nuis_at_hat: NuisanceAtTheta,
    pub trace: Vec<(f64, f64)>,
    pub multi_root: bool,
    pub realized_eps: f64,
    pub grid_step: f64,
}

/// Solves `|E_n psi(theta)| = inf |E_n psi| + eps_n` over the configured grid.
pub fn solve(
    data: &Dataset,
    family: &TransformationFamily,
    lasso: &LassoConfig,
    solver: &SolverConfig,
) -> Result<Solution> {
    solver.validate(family)?;
    let family = solver.family(family)?;
    let est = NuisanceEstimator::new(data, family, lasso)?;
    let grid = solver.grid(&family)?;
    let outcome = root_search(
        &grid,
        solver.refine_tol,
        |theta, warm: Option<&NuisanceAtTheta>| {
            let nuis = est.fit_at(theta, warm)?;
            let m = empirical_moment(&data.y, &family, theta, &nuis.h)?;
            Ok((m.mean, nuis))
        },
    )?;
    let theta_hat = outcome.theta_hat;
    let moment = empirical_moment(&data.y, &family, theta_hat, &outcome.state_hat.h)?;
    Ok(Solution {
        theta_hat,
        mean_psi_at_hat: outcome.score_hat,
        per_obs_at_hat: moment.per_obs,
        nuis_at_hat: outcome.state_hat,
        trace: outcome.trace,
        multi_root: outcome.multi_root,
        realized_eps: outcome.realized_eps,
        grid_step: grid[1] - grid[0],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapOutcome {
    pub variance: f64,
    /// Successful replicate estimates, sorted ascending.
    pub replicates: Vec<f64>,
    pub failures: usize,
    pub grid_points: usize,
}

/// Sample variance (denominator `k - 1`) of sorted replicates.
pub fn replicate_variance(replicates: &[f64]) -> Result<f64> {
    if replicates.len() < 2 {
        return Err(Error::InvalidConfig(
            "need at least two bootstrap replicates".into(),
        ));
    }
    let mut sorted = replicates.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sample_variance(&sorted))
}

/// Nonparametric pairs bootstrap of the whole estimator, nuisance fits included.
pub fn bootstrap_variance(
    data: &Dataset,
    family: &TransformationFamily,
    lasso: &LassoConfig,
    solver: &SolverConfig,
    n_boot: usize,
    seed: u64,
) -> Result<BootstrapOutcome> {
    if n_boot < 2 {
        return Err(Error::InvalidConfig("n_boot must be at least 2".into()));
    }
    let boot_solver = solver.half_resolution();
    let n = data.n();
    let results: Vec<Result<f64>> = (0..n_boot as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, b));
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let resampled = data.resample(&idx);
            solve(&resampled, family, lasso, &boot_solver).map(|s| s.theta_hat)
        })
        .collect();
    let mut replicates: Vec<f64> = results
        .iter()
        .filter_map(|r| r.as_ref().ok().copied())
        .collect();
    let failures = n_boot - replicates.len();
    if failures * 10 > n_boot {
        return Err(Error::BootstrapUnstable {
            failed: failures,
            total: n_boot,
        });
    }
    replicates.sort_by(f64::total_cmp);
    let variance = replicate_variance(&replicates)?;
    Ok(BootstrapOutcome {
        variance,
        replicates,
        failures,
        grid_points: boot_solver.grid_points,
    })
}

/// `center -+ sqrt(sigma) z_{1 - alpha/2}`
pub fn confidence_interval(center: f64, sigma: f64, alpha: f64) -> (f64, f64) {
    let w = sigma.sqrt() * normal_quantile(1.0 - alpha / 2.0);
    (center - w, center + w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub family: FamilyKind,
    pub theta_hat: f64,
    pub mean_psi_at_hat: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_boot: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_plug: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci: Option<ConfidenceInterval>,
    pub alpha: f64,
    pub n_boot: usize,
    pub boot_failures: usize,
    pub boot_grid_points: usize,
    pub grid_points: usize,
    pub epsilon_n: f64,
    pub realized_eps: f64,
    pub multi_root: bool,
    pub seed: u64,
    pub solver_trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InferenceConfig {
    /// Zero disables the bootstrap (no interval, no test).
    pub n_boot: usize,
    pub alpha: f64,
    pub seed: u64,
    pub plugin: bool,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            n_boot: 100,
            alpha: 0.05,
            seed: 0,
            plugin: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Estimate {
    pub result: EstimationResult,
    pub solution: Solution,
    pub replicates: Vec<f64>,
}

/// Point estimate, bootstrap variance and interval, and the plug-in variance.
pub fn estimate(
    data: &Dataset,
    family: &TransformationFamily,
    lasso: &LassoConfig,
    solver: &SolverConfig,
    inference: &InferenceConfig,
) -> Result<Estimate> {
    if !(inference.alpha > 0.0 && inference.alpha < 1.0) {
        return Err(Error::InvalidConfig("alpha must lie in (0, 1)".into()));
    }
    let solution = solve(data, family, lasso, solver)?;
    let (sigma_boot, replicates, boot_failures, boot_grid_points) = if inference.n_boot > 0 {
        let b = bootstrap_variance(
            data,
            family,
            lasso,
            solver,
            inference.n_boot,
            inference.seed,
        )?;
        (Some(b.variance), b.replicates, b.failures, b.grid_points)
    } else {
        (None, Vec::new(), 0, 0)
    };
    let ci = sigma_boot.map(|s| {
        let (lo, hi) = confidence_interval(solution.theta_hat, s, inference.alpha);
        ConfidenceInterval {
            lo,
            hi,
            alpha: inference.alpha,
        }
    });
    let sigma_plug = if inference.plugin {
        plugin_variance(data, family, lasso, solver, &solution).ok()
    } else {
        None
    };
    let result = EstimationResult {
        family: family.kind,
        theta_hat: solution.theta_hat,
        mean_psi_at_hat: solution.mean_psi_at_hat,
        sigma_boot,
        sigma_plug,
        ci,
        alpha: inference.alpha,
        n_boot: inference.n_boot,
        boot_failures,
        boot_grid_points,
        grid_points: solver.grid_points,
        epsilon_n: solver.epsilon_n,
        realized_eps: solution.realized_eps,
        multi_root: solution.multi_root,
        seed: inference.seed,
        solver_trace: solution.trace.clone(),
    };
    Ok(Estimate {
        result,
        solution,
        replicates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullTest {
    pub reject: bool,
    pub z_stat: f64,
    pub p_value: f64,
}

/// Two-sided level-alpha test of `H0: theta0 = theta_null`.
pub fn test_null(result: &EstimationResult, theta_null: f64) -> Result<NullTest> {
    let sigma = match result.sigma_boot {
        Some(s) if s > 0.0 => s,
        _ => return Err(Error::DegenerateTest),
    };
    let sd = sigma.sqrt();
    let z_stat = (result.theta_hat - theta_null) / sd;
    let (lo, hi) = confidence_interval(result.theta_hat, sigma, result.alpha);
    Ok(NullTest {
        reject: theta_null < lo || theta_null > hi,
        z_stat,
        p_value: 2.0 * (1.0 - normal_cdf(z_stat.abs())),
    })
}

/// `E_n[psi^2] / (Gamma^2 n)` from a score slope and the per-observation scores.
pub fn plugin_from_slope(gamma: f64, per_obs: &[f64]) -> Result<f64> {
    if per_obs.is_empty() {
        return Err(Error::EmptyData);
    }
    if !(gamma.abs() >= 1e-8) {
        return Err(Error::FlatScore(gamma));
    }
    let n = per_obs.len() as f64;
    let m2 = per_obs.iter().map(|v| v * v).sum::<f64>() / n;
    Ok(m2 / (gamma * gamma * n))
}

/// Central difference of the score around `theta_hat` with step `step`,
/// one-sided at the domain boundary.
pub fn score_slope<F>(theta_hat: f64, step: f64, bounds: (f64, f64), mut score: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let up = theta_hat + step;
    let down = theta_hat - step;
    match (up <= bounds.1, down >= bounds.0) {
        (true, true) => Ok((score(up)? - score(down)?) / (2.0 * step)),
        (true, false) => Ok((score(up)? - score(theta_hat)?) / step),
        (false, true) => Ok((score(theta_hat)? - score(down)?) / step),
        (false, false) => Err(Error::InvalidConfig("step exceeds theta interval".into())),
    }
}

pub fn plugin_variance(
    data: &Dataset,
    family: &TransformationFamily,
    lasso: &LassoConfig,
    solver: &SolverConfig,
    solution: &Solution,
) -> Result<f64> {
    let family = solver.family(family)?;
    let est = NuisanceEstimator::new(data, family, lasso)?;
    let gamma = score_slope(
        solution.theta_hat,
        solution.grid_step,
        family.domain(),
        |t| {
            let nuis = est.fit_at(t, Some(&solution.nuis_at_hat))?;
            Ok(empirical_moment(&data.y, &family, t, &nuis.h)?.mean)
        },
    )?;
    plugin_from_slope(gamma, &solution.per_obs_at_hat)
}
