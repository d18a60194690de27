//! Lasso with data-driven penalty loadings.
//!
//! Minimizes
//!
//! ```text
//! (1/n) ||y - a 1 - X b||^2 + (lambda/n) sum_j psi_j |b_j|
//! ```
//!
//! by cyclic coordinate descent on the Gram matrix ("covariance updates")
//! with an active-set inner loop. The loadings `psi_j = sqrt(E_n[x_j^2 e^2])`
//! start from the centered response and are refreshed from the residuals of
//! the previous fit.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::LassoError;
use crate::stats::normal_quantile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LassoConfig {
    pub lambda_override: Option<f64>,
    pub c_mult: f64,
    /// `None` selects `0.1 / ln(max(p, n))`.
    pub gamma: Option<f64>,
    pub max_iter: usize,
    pub tol: f64,
    /// Upper bound on penalty-loading refinements.
    pub loading_iters: usize,
    /// Stop refining once no loading moves by more than this (relative).
    pub loading_tol: f64,
    pub penalize_intercept: bool,
    /// Refit least squares on the selected support; the penalized solution
    /// is kept in [`LassoFit::beta`].
    pub post_lasso: bool,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            lambda_override: None,
            c_mult: 1.1,
            gamma: None,
            max_iter: 10_000,
            tol: 1e-9,
            loading_iters: 15,
            loading_tol: 1e-5,
            penalize_intercept: false,
            post_lasso: true,
        }
    }
}

impl LassoConfig {
    pub fn validate(&self) -> Result<(), LassoError> {
        let bad = |m: &str| Err(LassoError::InvalidConfig(m.to_string()));
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if self.loading_iters == 0 {
            return bad("loading_iters must be at least 1");
        }
        if !(self.loading_tol >= 0.0) {
            return bad("loading_tol must be nonnegative");
        }
        if !(self.c_mult > 0.0 && self.c_mult.is_finite()) {
            return bad("c_mult must be positive");
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g <= 1.0) {
                return bad("gamma must lie in (0, 1]");
            }
        }
        if let Some(l) = self.lambda_override {
            if !(l >= 0.0 && l.is_finite()) {
                return bad("lambda_override must be nonnegative");
            }
        }
        Ok(())
    }

    pub fn ols() -> Self {
        Self {
            lambda_override: Some(0.0),
            loading_iters: 1,
            post_lasso: false,
            ..Self::default()
        }
    }
}

/// `lambda = 2 c sqrt(n) Phi^{-1}(1 - gamma / (2p))`.
pub fn default_lambda(n: usize, p: usize, config: &LassoConfig) -> f64 {
    let gamma = config.gamma.unwrap_or_else(|| 0.1 / (p.max(n) as f64).ln());
    2.0 * config.c_mult * (n as f64).sqrt() * normal_quantile(1.0 - gamma / (2.0 * p as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostFit {
    pub intercept: f64,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoFit {
    pub beta: Vec<f64>,
    pub intercept: f64,
    pub active_set: Vec<usize>,
    pub lambda_used: f64,
    pub loadings: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Least-squares refit on `active_set`, when requested.
    pub post: Option<PostFit>,
}

impl LassoFit {
    /// Coefficients used for prediction: the refit when present.
    pub fn coefficients(&self) -> (f64, &[f64]) {
        match &self.post {
            Some(p) => (p.intercept, &p.beta),
            None => (self.intercept, &self.beta),
        }
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let (a, b) = self.coefficients();
        predict_with(x, a, b)
    }

    pub fn n_nonzero(&self) -> usize {
        self.active_set.len()
    }
}

pub(crate) fn predict_with(x: &DMatrix<f64>, intercept: f64, beta: &[f64]) -> Vec<f64> {
    let mut out = vec![intercept; x.nrows()];
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            for (o, v) in out.iter_mut().zip(x.column(j).iter()) {
                *o += b * v;
            }
        }
    }
    out
}

/// Precomputed design quantities reused across responses.
#[derive(Debug, Clone)]
pub struct Design {
    n: usize,
    p: usize,
    /// Working columns: centered `X`, or `[1, X]` when the intercept is penalized.
    cols: DMatrix<f64>,
    means: Vec<f64>,
    gram: DMatrix<f64>,
    intercept_col: bool,
}

impl Design {
    pub fn new(x: &DMatrix<f64>, penalize_intercept: bool) -> Result<Self, LassoError> {
        let (n, p) = x.shape();
        if n < 2 {
            return Err(LassoError::TooFewObservations(n));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(LassoError::NonFinite);
        }
        let (cols, means) = if penalize_intercept {
            let mut cols = DMatrix::from_element(n, p + 1, 1.0);
            cols.columns_mut(1, p).copy_from(x);
            (cols, vec![0.0; p])
        } else {
            let means: Vec<f64> = (0..p).map(|j| x.column(j).mean()).collect();
            let mut cols = x.clone();
            for (j, m) in means.iter().enumerate() {
                cols.column_mut(j).add_scalar_mut(-m);
            }
            (cols, means)
        };
        let gram = cols.tr_mul(&cols) / n as f64;
        Ok(Self {
            n,
            p,
            cols,
            means,
            gram,
            intercept_col: penalize_intercept,
        })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.p
    }

    fn offset(&self) -> usize {
        usize::from(self.intercept_col)
    }
}

pub fn fit(x: &DMatrix<f64>, y: &[f64], config: &LassoConfig) -> Result<LassoFit, LassoError> {
    let design = Design::new(x, config.penalize_intercept)?;
    fit_design(&design, y, config, None)
}

/// Fits on a prepared design, optionally warm-started from `warm` (length p).
pub fn fit_design(
    design: &Design,
    y: &[f64],
    config: &LassoConfig,
    warm: Option<&[f64]>,
) -> Result<LassoFit, LassoError> {
    config.validate()?;
    let n = design.n;
    let p = design.p;
    if y.len() != n {
        return Err(LassoError::DimensionMismatch {
            rows: n,
            len: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(LassoError::NonFinite);
    }
    if config.penalize_intercept != design.intercept_col {
        return Err(LassoError::InvalidConfig(
            "design was prepared with a different intercept treatment".into(),
        ));
    }
    let nf = n as f64;
    let y_mean = y.iter().sum::<f64>() / nf;
    let off = design.offset();
    let q = p + off;

    let y_work: Vec<f64> = if design.intercept_col {
        y.to_vec()
    } else {
        y.iter().map(|v| v - y_mean).collect()
    };
    let y_vec = DVector::from_column_slice(&y_work);
    let c: Vec<f64> = (design.cols.tr_mul(&y_vec) / nf).iter().copied().collect();
    let yy = y_work.iter().map(|v| v * v).sum::<f64>() / nf;

    let lambda = config
        .lambda_override
        .unwrap_or_else(|| default_lambda(n, p, config));

    let max_g = (0..q).map(|j| design.gram[(j, j)]).fold(0.0f64, f64::max);
    let scale = (yy.sqrt() * max_g.sqrt()).max(1.0);
    let tol = config.tol * scale;

    let mut beta = vec![0.0; q];
    if let Some(w) = warm {
        if w.len() == p {
            beta[off..].copy_from_slice(w);
            if design.intercept_col {
                beta[0] = y_mean;
            }
        }
    }

    let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut loadings = vec![1.0; q];
    let mut iterations = 0;
    let mut converged = false;
    let mut post = None;

    for k in 0..config.loading_iters {
        let next = compute_loadings(&design.cols, &resid);
        if k > 0
            && next
                .iter()
                .zip(&loadings)
                .all(|(a, b)| (a - b).abs() <= config.loading_tol * b.abs())
        {
            break;
        }
        loadings = next;
        let pen: Vec<f64> = loadings.iter().map(|l| lambda * l / nf).collect();
        let (it, conv) =
            coordinate_descent(&design.gram, &c, &pen, &mut beta, config.max_iter, tol, yy);
        iterations += it;
        converged = conv;
        post = if config.post_lasso {
            refit_support(design, &c, &beta)
        } else {
            None
        };
        let b_work = post.as_deref().unwrap_or(&beta);
        resid = working_residuals(design, &y_work, b_work);
    }

    let (intercept, slope) = split_coefficients(design, &beta, y_mean);
    let active_set: Vec<usize> = slope
        .iter()
        .enumerate()
        .filter(|(_, b)| **b != 0.0)
        .map(|(j, _)| j)
        .collect();
    let post = post.map(|b| {
        let (intercept, beta) = split_coefficients(design, &b, y_mean);
        PostFit { intercept, beta }
    });

    Ok(LassoFit {
        beta: slope,
        intercept,
        active_set,
        lambda_used: lambda,
        loadings: loadings[off..].to_vec(),
        iterations,
        converged,
        post,
    })
}

fn split_coefficients(design: &Design, beta: &[f64], y_mean: f64) -> (f64, Vec<f64>) {
    if design.intercept_col {
        (beta[0], beta[1..].to_vec())
    } else {
        let slope = beta.to_vec();
        let shift: f64 = slope.iter().zip(&design.means).map(|(b, m)| b * m).sum();
        (y_mean - shift, slope)
    }
}

/// Residuals on the working scale; the centered response already absorbs the intercept.
fn working_residuals(design: &Design, y_work: &[f64], beta: &[f64]) -> Vec<f64> {
    let mut r = y_work.to_vec();
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            for (ri, xi) in r.iter_mut().zip(design.cols.column(j).iter()) {
                *ri -= b * xi;
            }
        }
    }
    r
}

fn compute_loadings(cols: &DMatrix<f64>, resid: &[f64]) -> Vec<f64> {
    let n = resid.len() as f64;
    let r2: Vec<f64> = resid.iter().map(|r| r * r).collect();
    cols.column_iter()
        .map(|col| {
            let s: f64 = col.iter().zip(&r2).map(|(x, e)| x * x * e).sum();
            let l = (s / n).sqrt();
            // zero spread carries no information about scale
            if l > 0.0 && l.is_finite() {
                l
            } else {
                1.0
            }
        })
        .collect()
}

/// Least squares on the support of `beta`; returns working-scale coefficients.
fn refit_support(design: &Design, c: &[f64], beta: &[f64]) -> Option<Vec<f64>> {
    let support: Vec<usize> = beta
        .iter()
        .enumerate()
        .filter(|(_, b)| **b != 0.0)
        .map(|(j, _)| j)
        .collect();
    let mut out = vec![0.0; beta.len()];
    if support.is_empty() {
        return Some(out);
    }
    let k = support.len();
    let g = DMatrix::from_fn(k, k, |a, b| design.gram[(support[a], support[b])]);
    let rhs = DVector::from_iterator(k, support.iter().map(|&j| c[j]));
    let chol = g.cholesky()?;
    let sol = chol.solve(&rhs);
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    for (idx, &j) in support.iter().enumerate() {
        out[j] = sol[idx];
    }
    Some(out)
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Objective on the working scale, `yy - 2 c'b + b'Gb + sum pen |b|`.
fn objective(gram: &DMatrix<f64>, c: &[f64], pen: &[f64], beta: &[f64], yy: f64) -> f64 {
    let b = DVector::from_column_slice(beta);
    let gb = gram * &b;
    let quad = b.dot(&gb);
    let lin: f64 = c.iter().zip(beta).map(|(ci, bi)| ci * bi).sum();
    let l1: f64 = pen.iter().zip(beta).map(|(p, b)| p * b.abs()).sum();
    yy - 2.0 * lin + quad + l1
}

fn fresh_gradient(gram: &DMatrix<f64>, c: &[f64], beta: &[f64]) -> Vec<f64> {
    let b = DVector::from_column_slice(beta);
    let gb = gram * b;
    c.iter().zip(gb.iter()).map(|(ci, g)| ci - g).collect()
}

fn kkt_ok(gram: &DMatrix<f64>, c: &[f64], pen: &[f64], beta: &[f64], tol: f64) -> bool {
    let grad = fresh_gradient(gram, c, beta);
    grad.iter().enumerate().all(|(j, g)| {
        let g2 = 2.0 * g;
        if gram[(j, j)] <= 0.0 {
            true
        } else if beta[j] != 0.0 {
            (g2 - beta[j].signum() * pen[j]).abs() <= tol
        } else {
            g2.abs() <= pen[j] + tol
        }
    })
}

/// Returns `(sweeps, converged)`.
fn coordinate_descent(
    gram: &DMatrix<f64>,
    c: &[f64],
    pen: &[f64],
    beta: &mut [f64],
    max_iter: usize,
    tol: f64,
    yy: f64,
) -> (usize, bool) {
    let q = beta.len();
    let mut grad = fresh_gradient(gram, c, beta);
    let mut sweeps = 0;
    let step_tol = 0.25 * tol;

    let update = |j: usize, beta: &mut [f64], grad: &mut [f64]| -> f64 {
        let gjj = gram[(j, j)];
        if gjj <= 0.0 {
            beta[j] = 0.0;
            return 0.0;
        }
        let rho = grad[j] + gjj * beta[j];
        let new = soft_threshold(rho, 0.5 * pen[j]) / gjj;
        let delta = new - beta[j];
        if delta != 0.0 {
            for (g, gk) in grad.iter_mut().zip(gram.column(j).iter()) {
                *g -= delta * gk;
            }
            beta[j] = new;
        }
        (delta * gjj).abs()
    };

    let mut last_obj = if cfg!(debug_assertions) {
        objective(gram, c, pen, beta, yy)
    } else {
        0.0
    };

    while sweeps < max_iter {
        // full sweep
        let mut max_step = 0.0f64;
        for j in 0..q {
            max_step = max_step.max(update(j, beta, &mut grad));
        }
        sweeps += 1;
        if cfg!(debug_assertions) {
            let obj = objective(gram, c, pen, beta, yy);
            debug_assert!(
                obj <= last_obj + 1e-10 * (1.0 + last_obj.abs()),
                "lasso objective increased: {last_obj} -> {obj}"
            );
            last_obj = obj;
        }
        if max_step <= step_tol {
            if kkt_ok(gram, c, pen, beta, tol) {
                return (sweeps, true);
            }
            grad = fresh_gradient(gram, c, beta);
            continue;
        }
        // active-set sweeps
        let active: Vec<usize> = (0..q).filter(|&j| beta[j] != 0.0).collect();
        while sweeps < max_iter {
            let mut max_step = 0.0f64;
            for &j in &active {
                max_step = max_step.max(update(j, beta, &mut grad));
            }
            sweeps += 1;
            if max_step <= step_tol {
                break;
            }
        }
    }
    (sweeps, kkt_ok(gram, c, pen, beta, tol))
}

/// `g_j = (2/n) x_j'(y - a 1 - X b)` at the penalized solution.
pub fn kkt_residuals(fit: &LassoFit, x: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    let pred = predict_with(x, fit.intercept, &fit.beta);
    let r: Vec<f64> = y.iter().zip(&pred).map(|(a, b)| a - b).collect();
    x.column_iter()
        .map(|col| 2.0 / n * col.iter().zip(&r).map(|(xi, ri)| xi * ri).sum::<f64>())
        .collect()
}

/// Checks the stationarity conditions of `fit` with absolute tolerance `tol`.
pub fn kkt_holds(fit: &LassoFit, x: &DMatrix<f64>, y: &[f64], tol: f64) -> bool {
    let n = y.len() as f64;
    kkt_residuals(fit, x, y)
        .iter()
        .zip(&fit.beta)
        .zip(&fit.loadings)
        .all(|((g, b), l)| {
            let bound = fit.lambda_used * l / n;
            if *b != 0.0 {
                (g - b.signum() * bound).abs() <= tol
            } else {
                g.abs() <= bound + tol
            }
        })
}

/// Penalized objective of the lasso solution stored in `fit`.
pub fn penalized_objective(fit: &LassoFit, x: &DMatrix<f64>, y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let pred = predict_with(x, fit.intercept, &fit.beta);
    let rss: f64 = y.iter().zip(&pred).map(|(a, b)| (a - b).powi(2)).sum();
    let l1: f64 = fit
        .beta
        .iter()
        .zip(&fit.loadings)
        .map(|(b, l)| l * b.abs())
        .sum();
    rss / n + fit.lambda_used / n * l1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_problem(n: usize, p: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = (0..n)
            .map(|i| {
                let signal: f64 = (0..p.min(3)).map(|j| x[(i, j)]).sum();
                signal + rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        (x, y)
    }

    fn pure() -> LassoConfig {
        LassoConfig {
            post_lasso: false,
            ..LassoConfig::default()
        }
    }

    #[test]
    fn lambda_examples() {
        let cfg = LassoConfig {
            gamma: Some(0.05),
            ..LassoConfig::default()
        };
        // oracle: Phi^{-1}(0.975) = 1.959963984540054
        assert_relative_eq!(
            default_lambda(100, 1, &cfg),
            2.0 * 1.1 * 10.0 * 1.959963984540054,
            max_relative = 1e-12
        );
        let cfg = LassoConfig {
            gamma: Some(1.0),
            c_mult: 0.5,
            ..LassoConfig::default()
        };
        assert_eq!(default_lambda(4, 1, &cfg), 0.0);
        let cfg = LassoConfig::default();
        let l50 = default_lambda(200, 50, &cfg);
        assert!(l50 > 0.0);
        assert!(default_lambda(200, 100, &cfg) > l50);
        assert!(default_lambda(200, 20, &cfg) < l50);
    }

    #[test]
    fn zero_column_gives_mean() {
        let x = DMatrix::zeros(10, 1);
        let y: Vec<f64> = (0..10).map(|i| i as f64 * 0.3 + 1.0).collect();
        let fit = fit(&x, &y, &pure()).unwrap();
        assert_eq!(fit.beta, vec![0.0]);
        assert_relative_eq!(fit.intercept, y.iter().sum::<f64>() / 10.0, epsilon = 1e-14);
        assert!(fit.loadings.iter().all(|l| *l > 0.0));
        assert!(kkt_residuals(&fit, &x, &y)[0].abs() < 1e-14);
    }

    #[test]
    fn lambda_zero_matches_normal_equations() {
        let (x, y) = random_problem(50, 2, 11);
        let fit = fit(&x, &y, &LassoConfig::ols()).unwrap();
        assert!(fit.converged);
        // normal equations with an explicit intercept column
        let mut xa = DMatrix::from_element(50, 3, 1.0);
        xa.columns_mut(1, 2).copy_from(&x);
        let xtx = xa.tr_mul(&xa);
        let xty = xa.tr_mul(&DVector::from_column_slice(&y));
        let sol = xtx.lu().solve(&xty).unwrap();
        assert_relative_eq!(fit.intercept, sol[0], epsilon = 1e-8);
        assert_relative_eq!(fit.beta[0], sol[1], epsilon = 1e-8);
        assert_relative_eq!(fit.beta[1], sol[2], epsilon = 1e-8);
        assert!(kkt_residuals(&fit, &x, &y).iter().all(|g| g.abs() <= 1e-8));
    }

    #[test]
    fn orthonormal_design_soft_thresholds() {
        // columns +-1 patterns orthogonal with mean zero: X'X/n = I
        let n = 8;
        let x = DMatrix::from_fn(n, 3, |i, j| {
            let bit = (i >> j) & 1;
            if bit == 1 {
                1.0
            } else {
                -1.0
            }
        });
        let y = vec![3.0, -1.0, 2.5, 0.2, -0.7, 1.1, 4.0, -2.0];
        let lambda = 6.0;
        let mut cfg = pure();
        cfg.lambda_override = Some(lambda);
        let fit = fit(&x, &y, &cfg).unwrap();
        let ybar = y.iter().sum::<f64>() / n as f64;
        for j in 0..3 {
            let ols: f64 = (0..n).map(|i| x[(i, j)] * (y[i] - ybar)).sum::<f64>() / n as f64;
            let t = lambda * fit.loadings[j] / (2.0 * n as f64);
            let expect = soft_threshold(ols, t);
            assert_relative_eq!(fit.beta[j], expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn random_instance_passes_kkt() {
        for p in [20, 200] {
            let (x, y) = random_problem(60, p, 5);
            let f = fit(&x, &y, &pure()).unwrap();
            assert!(f.converged);
            assert!(kkt_holds(&f, &x, &y, 1e-8));
            assert_eq!(
                f.active_set.len(),
                f.beta.iter().filter(|b| **b != 0.0).count()
            );
        }
    }

    #[test]
    fn large_lambda_gives_zero() {
        let (x, y) = random_problem(40, 10, 3);
        let f = fit(&x, &y, &pure()).unwrap();
        let ybar = y.iter().sum::<f64>() / 40.0;
        let bound = (0..10)
            .map(|j| {
                let s: f64 = (0..40).map(|i| x[(i, j)] * (y[i] - ybar)).sum();
                2.0 * s.abs() / f.loadings[j]
            })
            .fold(0.0, f64::max);
        let mut cfg = pure();
        cfg.lambda_override = Some(bound);
        let fz = fit(&x, &y, &cfg).unwrap();
        assert!(fz.beta.iter().all(|b| *b == 0.0));
        assert!(fz.active_set.is_empty());
    }

    #[test]
    fn warm_start_reaches_same_objective() {
        let (x, y) = random_problem(60, 30, 9);
        let cfg = pure();
        let cold = fit(&x, &y, &cfg).unwrap();
        let design = Design::new(&x, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let start: Vec<f64> = (0..30).map(|_| rng.random_range(-2.0..2.0)).collect();
        let warm = fit_design(&design, &y, &cfg, Some(&start)).unwrap();
        assert!(warm.converged);
        let oc = penalized_objective(&cold, &x, &y);
        let ow = penalized_objective(&warm, &x, &y);
        assert!((oc - ow).abs() <= 1e-8 * (1.0 + oc), "{oc} vs {ow}");
    }

    #[test]
    fn post_lasso_refits_support() {
        let (x, y) = random_problem(100, 10, 21);
        let f = fit(&x, &y, &LassoConfig::default()).unwrap();
        let post = f.post.as_ref().unwrap();
        // residuals orthogonal to the selected columns
        let pred = predict_with(&x, post.intercept, &post.beta);
        for &j in &f.active_set {
            let s: f64 = (0..100).map(|i| x[(i, j)] * (y[i] - pred[i])).sum();
            assert!(s.abs() < 1e-8);
        }
        for j in 0..10 {
            if !f.active_set.contains(&j) {
                assert_eq!(post.beta[j], 0.0);
            }
        }
    }

    #[test]
    fn penalized_intercept_variant_runs() {
        let (x, y) = random_problem(60, 5, 2);
        let cfg = LassoConfig {
            penalize_intercept: true,
            post_lasso: false,
            ..LassoConfig::default()
        };
        let f = fit(&x, &y, &cfg).unwrap();
        assert!(f.converged);
        assert_eq!(f.beta.len(), 5);
        assert!(kkt_holds(&f, &x, &y, 1e-8));
    }

    #[test]
    fn rejects_bad_input() {
        let x = DMatrix::from_element(5, 2, 1.0);
        assert!(matches!(
            fit(&x, &[1.0, 2.0], &pure()),
            Err(LassoError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            fit(&x, &[1.0, f64::NAN, 0.0, 0.0, 0.0], &pure()),
            Err(LassoError::NonFinite)
        ));
        let bad = LassoConfig {
            tol: 0.0,
            ..LassoConfig::default()
        };
        assert!(fit(&x, &[1.0; 5], &bad).is_err());
    }
}
