//! Population nuisance of the simulation model, computed by quadrature.
//!
//! Given `Lambda_theta0(Y) = mu + eps`, `eps ~ N(0, sigma^2)`, the true
//! `m_theta(x)`, `m_dot_theta(x)` and the conditional (co)variances are
//! expectations over `eps` for each linear index `mu = x beta0`.

use rayon::prelude::*;

use super::quadrature::{standard, GaussHermite};
use crate::error::{Error, Result};
use crate::moment::{compose_variant, quadratic_fit, ProbeFit, ScoreVariant};
use crate::nuisance::EvaluatedNuisance;
use crate::transform::TransformationFamily;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalMoments {
    pub mean: f64,
    pub mean_dot: f64,
    /// `Var(Lambda_theta(Y) | x)`
    pub var: f64,
    /// `Cov(Lambda_theta(Y), Lambda_dot_theta(Y) | x)`
    pub cov_dot: f64,
}

#[derive(Debug, Clone)]
pub struct OracleModel {
    pub family: TransformationFamily,
    pub theta0: f64,
    pub noise_sd: f64,
    rule: &'static GaussHermite,
}

impl OracleModel {
    pub fn new(family: TransformationFamily, theta0: f64, noise_sd: f64) -> Self {
        Self {
            family,
            theta0,
            noise_sd,
            rule: standard(),
        }
    }

    fn response_at(&self, mu: f64, z: f64) -> Result<f64> {
        Ok(self.family.inverse(self.theta0, mu + self.noise_sd * z)?)
    }

    pub fn conditional(&self, theta: f64, mu: f64) -> Result<ConditionalMoments> {
        let q = self.rule;
        let mut lam = Vec::with_capacity(q.nodes.len());
        let mut dot = Vec::with_capacity(q.nodes.len());
        for &z in &q.nodes {
            let v = self.family.values(theta, self.response_at(mu, z)?)?;
            lam.push(v.value);
            dot.push(v.dtheta);
        }
        let wsum =
            |f: &dyn Fn(usize) -> f64| (0..lam.len()).map(|k| q.weights[k] * f(k)).sum::<f64>();
        let mean = wsum(&|k| lam[k]);
        let mean_dot = wsum(&|k| dot[k]);
        Ok(ConditionalMoments {
            mean,
            mean_dot,
            var: wsum(&|k| (lam[k] - mean).powi(2)),
            cov_dot: wsum(&|k| (lam[k] - mean) * (dot[k] - mean_dot)),
        })
    }

    /// True `h(theta)` at the given linear indices; variances are averaged
    /// over the sample of `mu`.
    pub fn nuisance(&self, theta: f64, mu: &[f64]) -> Result<EvaluatedNuisance> {
        let cond = mu
            .par_iter()
            .map(|&m| self.conditional(theta, m))
            .collect::<Result<Vec<_>>>()?;
        let n = cond.len() as f64;
        Ok(EvaluatedNuisance {
            theta,
            m: cond.iter().map(|c| c.mean).collect(),
            mdot: cond.iter().map(|c| c.mean_dot).collect(),
            sigma2: cond.iter().map(|c| c.var).sum::<f64>() / n,
            sigma2dot: 2.0 * cond.iter().map(|c| c.cov_dot).sum::<f64>() / n,
        })
    }

    /// `E_n[ E[psi(Y, theta, h(x_i)) | x_i] ]`: the empirical mean over the
    /// linear indices, with the noise integrated out by quadrature.
    pub fn expected_moment(
        &self,
        theta: f64,
        mu: &[f64],
        h: &EvaluatedNuisance,
        variant: ScoreVariant,
    ) -> Result<f64> {
        if h.len() != mu.len() {
            return Err(Error::Dimension(format!(
                "nuisance has {} rows, mu has {}",
                h.len(),
                mu.len()
            )));
        }
        if !(h.sigma2 > 0.0) {
            return Err(Error::NonPositiveVariance(h.sigma2));
        }
        let q = self.rule;
        let total = (0..mu.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for (&z, &w) in q.nodes.iter().zip(&q.weights) {
                    let v = self.family.values(theta, self.response_at(mu[i], z)?)?;
                    let parts = compose_variant(
                        v.value - h.m[i],
                        v.dtheta - h.mdot[i],
                        h.sigma2,
                        h.sigma2dot,
                        v.c_ratio,
                        variant,
                    );
                    acc += w * parts.psi;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(total.iter().sum::<f64>() / mu.len() as f64)
    }

    /// Orthogonality probe on [`expected_moment`](Self::expected_moment)
    /// instead of the sample mean, so that `a` carries no noise from `Y`.
    pub fn population_probe(
        &self,
        theta0: f64,
        mu: &[f64],
        h_true: &EvaluatedNuisance,
        h_pert: &EvaluatedNuisance,
        r_grid: &[f64],
        variant: ScoreVariant,
    ) -> Result<ProbeFit> {
        if r_grid.len() < 3 {
            return Err(Error::InvalidConfig(
                "r grid needs at least 3 points".into(),
            ));
        }
        let values = r_grid
            .iter()
            .map(|&r| self.expected_moment(theta0, mu, &h_true.interpolate(h_pert, r), variant))
            .collect::<Result<Vec<f64>>>()?;
        let (intercept, linear, quadratic) = quadratic_fit(r_grid, &values)?;
        Ok(ProbeFit {
            linear,
            quadratic,
            intercept,
            values,
        })
    }

    /// `Cov(mu, m_theta(mu)) / Var(mu)` for `mu ~ N(0, signal_var)`.
    ///
    /// With Gaussian regressors the best linear predictor of
    /// `Lambda_theta(Y)` given `X` is `kappa * X beta0` plus a constant.
    pub fn projection_slope(&self, theta: f64, signal_var: f64) -> Result<f64> {
        let sd = signal_var.sqrt();
        let q = self.rule;
        let mut acc = 0.0;
        for (&u, &w) in q.nodes.iter().zip(&q.weights) {
            let mu = sd * u;
            acc += w * mu * self.conditional(theta, mu)?.mean;
        }
        Ok(acc / signal_var)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_normal_closed_form() {
        // Box-Cox theta0 = 0: Y = exp(mu + s Z),
        // E[(Y^t - 1)/t] = (exp(t mu + t^2 s^2 / 2) - 1) / t
        let s = 1.3;
        let model = OracleModel::new(TransformationFamily::box_cox(), 0.0, s);
        for (t, mu) in [(0.5, 0.2), (-0.7, 1.0), (1.2, -0.4)] {
            let c = model.conditional(t, mu).unwrap();
            let expected = ((t * mu + t * t * s * s / 2.0f64).exp() - 1.0) / t;
            assert_relative_eq!(c.mean, expected, max_relative = 1e-10);
            let ey2t = (2.0 * t * mu + 2.0 * t * t * s * s).exp();
            let eyt = (t * mu + t * t * s * s / 2.0f64).exp();
            assert_relative_eq!(c.var, (ey2t - eyt * eyt) / (t * t), max_relative = 1e-9);
        }
    }

    #[test]
    fn truth_at_theta0() {
        let model = OracleModel::new(TransformationFamily::yeo_johnson(), 1.0, 0.8);
        let c = model.conditional(1.0, 0.3).unwrap();
        assert_relative_eq!(c.mean, 0.3, epsilon = 1e-12);
        assert_relative_eq!(c.var, 0.64, epsilon = 1e-12);
        let h = model.nuisance(1.0, &[0.3, -0.2]).unwrap();
        assert_relative_eq!(h.sigma2, 0.64, epsilon = 1e-12);
    }

    #[test]
    fn slope_is_one_at_theta0() {
        let model = OracleModel::new(TransformationFamily::box_cox(), 0.0, 2.0);
        assert_relative_eq!(
            model.projection_slope(0.0, 5.0).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        // theta = 1: E[Y | mu] = exp(mu + 2), slope = E[mu e^mu] e^2 / 5 = e^{2 + 2.5}
        let k = model.projection_slope(1.0, 5.0).unwrap();
        assert_relative_eq!(k, (4.5f64).exp(), max_relative = 1e-8);
    }
}
