//! Nuisance estimation at a fixed transformation parameter.
//!
//! For each theta the transformed response and its theta-derivative are
//! regressed on `X` with the lasso; the residual variance and its derivative
//! are the raw `1/n` averages `E_n[e^2]` and `2 E_n[e e_dot]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Dataset;
use crate::lasso::{fit_design, Design, LassoConfig, LassoFit};
use crate::transform::TransformationFamily;

/// Nuisance values as the score consumes them: per-observation conditional
/// means and the two scalar variance components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedNuisance {
    pub theta: f64,
    /// `h1 = m_theta(x_i)`
    pub m: Vec<f64>,
    /// `h3 = m_dot_theta(x_i)`
    pub mdot: Vec<f64>,
    /// `h2 = sigma^2_theta`
    pub sigma2: f64,
    /// `h4 = d sigma^2_theta / d theta`
    pub sigma2dot: f64,
}

impl EvaluatedNuisance {
    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// `self + r (other - self)`, componentwise.
    pub fn interpolate(&self, other: &EvaluatedNuisance, r: f64) -> EvaluatedNuisance {
        let lerp = |a: f64, b: f64| a + r * (b - a);
        EvaluatedNuisance {
            theta: self.theta,
            m: self
                .m
                .iter()
                .zip(&other.m)
                .map(|(a, b)| lerp(*a, *b))
                .collect(),
            mdot: self
                .mdot
                .iter()
                .zip(&other.mdot)
                .map(|(a, b)| lerp(*a, *b))
                .collect(),
            sigma2: lerp(self.sigma2, other.sigma2),
            sigma2dot: lerp(self.sigma2dot, other.sigma2dot),
        }
    }
}

/// One of the four nuisance components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    M,
    Sigma2,
    MDot,
    Sigma2Dot,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::M,
        Component::Sigma2,
        Component::MDot,
        Component::Sigma2Dot,
    ];
}

impl EvaluatedNuisance {
    /// Copy of `self` with component `c` taken from `other`.
    pub fn with_component(&self, other: &EvaluatedNuisance, c: Component) -> EvaluatedNuisance {
        let mut out = self.clone();
        match c {
            Component::M => out.m = other.m.clone(),
            Component::Sigma2 => out.sigma2 = other.sigma2,
            Component::MDot => out.mdot = other.mdot.clone(),
            Component::Sigma2Dot => out.sigma2dot = other.sigma2dot,
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NuisanceAtTheta {
    pub theta: f64,
    pub fit_m: LassoFit,
    pub fit_mdot: LassoFit,
    pub h: EvaluatedNuisance,
    /// `Lambda_theta(y_i) - m_hat(x_i)`
    pub resid: Vec<f64>,
    /// `Lambda_dot_theta(y_i) - m_dot_hat(x_i)`
    pub resid_dot: Vec<f64>,
}

impl NuisanceAtTheta {
    pub fn sigma2(&self) -> f64 {
        self.h.sigma2
    }

    pub fn sigma2dot(&self) -> f64 {
        self.h.sigma2dot
    }
}

/// Reusable nuisance fitter bound to one dataset (the Gram matrix is shared
/// by every theta).
#[derive(Debug, Clone)]
pub struct NuisanceEstimator<'a> {
    data: &'a Dataset,
    family: TransformationFamily,
    config: LassoConfig,
    design: Design,
}

impl<'a> NuisanceEstimator<'a> {
    pub fn new(
        data: &'a Dataset,
        family: TransformationFamily,
        config: &LassoConfig,
    ) -> Result<Self> {
        config.validate()?;
        if let Some(bad) = data.y.iter().find(|y| !family.contains_y(**y)) {
            return Err(crate::error::TransformError::YOutOfDomain {
                family: family.kind,
                y: *bad,
            }
            .into());
        }
        let design = Design::new(&data.x, config.penalize_intercept)?;
        Ok(Self {
            data,
            family,
            config: config.clone(),
            design,
        })
    }

    pub fn family(&self) -> &TransformationFamily {
        &self.family
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    pub fn fit_at(&self, theta: f64, warm: Option<&NuisanceAtTheta>) -> Result<NuisanceAtTheta> {
        let n = self.data.n();
        let mut lam = Vec::with_capacity(n);
        let mut lam_dot = Vec::with_capacity(n);
        for &y in &self.data.y {
            let v = self.family.values(theta, y)?;
            lam.push(v.value);
            lam_dot.push(v.dtheta);
        }
        let nf = n as f64;
        let mean_sq = lam.iter().map(|v| v * v).sum::<f64>() / nf;
        let lam_mean = lam.iter().sum::<f64>() / nf;
        if lam.iter().all(|v| *v == lam_mean) {
            return Err(Error::DegenerateModel { theta, sigma2: 0.0 });
        }

        let fit_m = fit_design(
            &self.design,
            &lam,
            &self.config,
            warm.map(|w| w.fit_m.beta.as_slice()),
        )?;
        let fit_mdot = fit_design(
            &self.design,
            &lam_dot,
            &self.config,
            warm.map(|w| w.fit_mdot.beta.as_slice()),
        )?;
        let m = fit_m.predict(&self.data.x);
        let mdot = fit_mdot.predict(&self.data.x);
        let resid: Vec<f64> = lam.iter().zip(&m).map(|(a, b)| a - b).collect();
        let resid_dot: Vec<f64> = lam_dot.iter().zip(&mdot).map(|(a, b)| a - b).collect();

        let sigma2 = resid.iter().map(|e| e * e).sum::<f64>() / nf;
        let sigma2dot = 2.0
            * resid
                .iter()
                .zip(&resid_dot)
                .map(|(a, b)| a * b)
                .sum::<f64>()
            / nf;
        if !(sigma2 >= 1e-14 * (1.0 + mean_sq)) || !sigma2dot.is_finite() {
            return Err(Error::DegenerateModel { theta, sigma2 });
        }

        Ok(NuisanceAtTheta {
            theta,
            fit_m,
            fit_mdot,
            h: EvaluatedNuisance {
                theta,
                m,
                mdot,
                sigma2,
                sigma2dot,
            },
            resid,
            resid_dot,
        })
    }

    /// Sweeps `thetas` in the given order, warm-starting each fit from the
    /// last successful neighbor. Failures are recorded per entry.
    pub fn fit_grid(&self, thetas: &[f64]) -> Vec<Result<NuisanceAtTheta>> {
        let mut out: Vec<Result<NuisanceAtTheta>> = Vec::with_capacity(thetas.len());
        let mut last_ok: Option<usize> = None;
        for (i, &theta) in thetas.iter().enumerate() {
            let warm = last_ok.and_then(|k| out[k].as_ref().ok());
            let res = self.fit_at(theta, warm);
            if res.is_ok() {
                last_ok = Some(i);
            }
            out.push(res);
        }
        out
    }
}

pub fn fit_at_theta(
    data: &Dataset,
    family: &TransformationFamily,
    theta: f64,
    config: &LassoConfig,
    warm: Option<&NuisanceAtTheta>,
) -> Result<NuisanceAtTheta> {
    NuisanceEstimator::new(data, *family, config)?.fit_at(theta, warm)
}

pub fn fit_grid(
    data: &Dataset,
    family: &TransformationFamily,
    thetas: &[f64],
    config: &LassoConfig,
) -> Result<Vec<Result<NuisanceAtTheta>>> {
    if thetas.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig("theta grid must be sorted".into()));
    }
    Ok(NuisanceEstimator::new(data, *family, config)?.fit_grid(thetas))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn zero_design_gives_population_variance() {
        let n = 50;
        let z = noise(n, 1);
        let fam = TransformationFamily::box_cox();
        let y: Vec<f64> = z.iter().map(|v| v.exp()).collect();
        let data = Dataset::from_matrix(y, DMatrix::zeros(n, 1)).unwrap();
        let nu = fit_at_theta(&data, &fam, 0.0, &LassoConfig::default(), None).unwrap();
        // log y = z exactly; mean squared centered value
        let mean = z.iter().sum::<f64>() / n as f64;
        let v = z.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        approx::assert_relative_eq!(
            nu.sigma2(),
            v * (n - 1) as f64 / n as f64,
            max_relative = 1e-12
        );
    }

    #[test]
    fn exact_linear_data_is_degenerate() {
        let n = 30;
        let z = noise(2 * n, 2);
        let x = DMatrix::from_fn(n, 2, |i, j| z[i * 2 + j]);
        let fam = TransformationFamily::box_cox();
        let y: Vec<f64> = (0..n)
            .map(|i| {
                fam.inverse(0.0, 0.5 * x[(i, 0)] - 0.25 * x[(i, 1)])
                    .unwrap()
            })
            .collect();
        let data = Dataset::from_matrix(y, x).unwrap();
        let err = fit_at_theta(&data, &fam, 0.0, &LassoConfig::ols(), None).unwrap_err();
        match err {
            Error::DegenerateModel { sigma2, .. } => assert!(sigma2 <= 1e-16),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn residual_identities_hold() {
        let n = 80;
        let z = noise(n * 4, 3);
        let x = DMatrix::from_fn(n, 3, |i, j| z[i * 3 + j]);
        let fam = TransformationFamily::yeo_johnson();
        let y: Vec<f64> = (0..n).map(|i| x[(i, 0)] + z[3 * n + i]).collect();
        let data = Dataset::from_matrix(y.clone(), x.clone()).unwrap();
        let nu = fit_at_theta(&data, &fam, 0.8, &LassoConfig::default(), None).unwrap();
        let m = nu.fit_m.predict(&x);
        let md = nu.fit_mdot.predict(&x);
        for i in 0..n {
            assert_eq!(nu.resid[i], fam.eval(0.8, y[i]).unwrap() - m[i]);
            assert_eq!(nu.resid_dot[i], fam.dtheta(0.8, y[i]).unwrap() - md[i]);
        }
        let s2 = nu.resid.iter().map(|e| e * e).sum::<f64>() / n as f64;
        assert_eq!(nu.sigma2(), s2);
        let s2d = 2.0
            * nu.resid
                .iter()
                .zip(&nu.resid_dot)
                .map(|(a, b)| a * b)
                .sum::<f64>()
            / n as f64;
        assert_eq!(nu.sigma2dot(), s2d);
        // substituting resid for resid_dot doubles the variance
        let same = 2.0 * nu.resid.iter().map(|e| e * e).sum::<f64>() / n as f64;
        assert_eq!(same, 2.0 * nu.sigma2());
    }

    #[test]
    fn grid_edge_cases() {
        let n = 60;
        let z = noise(n * 3, 4);
        let x = DMatrix::from_fn(n, 2, |i, j| z[i * 2 + j]);
        let y: Vec<f64> = (0..n).map(|i| (x[(i, 0)] + z[2 * n + i]).exp()).collect();
        let data = Dataset::from_matrix(y, x).unwrap();
        let fam = TransformationFamily::box_cox();
        let cfg = LassoConfig::default();
        let single = fit_grid(&data, &fam, &[0.1], &cfg).unwrap();
        let direct = fit_at_theta(&data, &fam, 0.1, &cfg, None).unwrap();
        assert_eq!(single[0].as_ref().unwrap().h, direct.h);
        let twice = fit_grid(&data, &fam, &[0.1, 0.1], &cfg).unwrap();
        let a = twice[0].as_ref().unwrap();
        let b = twice[1].as_ref().unwrap();
        assert_eq!(a.fit_m.active_set, b.fit_m.active_set);
        approx::assert_relative_eq!(a.sigma2(), b.sigma2(), max_relative = 1e-9);
        assert!(fit_grid(&data, &fam, &[0.2, 0.1], &cfg).is_err());
    }

    #[test]
    fn domain_errors_propagate() {
        let x = DMatrix::from_element(3, 1, 1.0);
        let data = Dataset::from_matrix(vec![1.0, -1.0, 2.0], x).unwrap();
        let err = fit_at_theta(
            &data,
            &TransformationFamily::box_cox(),
            0.0,
            &LassoConfig::default(),
            None,
        );
        assert!(matches!(err, Err(Error::Transform(_))));
    }
}
