//! The orthogonalized profile-likelihood score.
//!
//! With `e = Lambda_theta(y) - h1`, `e_dot = Lambda_dot_theta(y) - h3`:
//!
//! ```text
//! psi = - h4 / (2 h2)                  (I)
//!       - e e_dot / h2                 (II)
//!       + h4 e^2 / (2 h2^2)            (III)
//!       + c_theta(y)
//! ```

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nuisance::EvaluatedNuisance;
use crate::stats::compensated_sum;
use crate::transform::TransformationFamily;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreParts {
    pub part_i: f64,
    pub part_ii: f64,
    pub part_iii: f64,
    pub part_c: f64,
    pub psi: f64,
}

/// Nuisance evaluated at one observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValue {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
}

/// Which score to evaluate. `WithoutPartIII` is a deliberately
/// non-orthogonal variant used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreVariant {
    #[default]
    Orthogonal,
    WithoutPartIII,
}

/// Composes the score from residuals; `h2` must be positive.
pub fn compose(eps: f64, eps_dot: f64, h2: f64, h4: f64, c: f64) -> ScoreParts {
    compose_variant(eps, eps_dot, h2, h4, c, ScoreVariant::Orthogonal)
}

pub fn compose_variant(
    eps: f64,
    eps_dot: f64,
    h2: f64,
    h4: f64,
    c: f64,
    variant: ScoreVariant,
) -> ScoreParts {
    let part_i = h4 / (2.0 * h2);
    let part_ii = eps * eps_dot / h2;
    let part_iii = match variant {
        ScoreVariant::Orthogonal => h4 * eps * eps / (2.0 * h2 * h2),
        ScoreVariant::WithoutPartIII => 0.0,
    };
    let psi = -part_i - part_ii + part_iii + c;
    ScoreParts {
        part_i,
        part_ii,
        part_iii,
        part_c: c,
        psi,
    }
}

pub fn psi_single(
    family: &TransformationFamily,
    theta: f64,
    y: f64,
    h: HValue,
) -> Result<ScoreParts> {
    if !(h.h2 > 0.0) {
        return Err(Error::NonPositiveVariance(h.h2));
    }
    let v = family.values(theta, y)?;
    Ok(compose(
        v.value - h.h1,
        v.dtheta - h.h3,
        h.h2,
        h.h4,
        v.c_ratio,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentEval {
    pub mean: f64,
    pub per_obs: Vec<f64>,
}

/// `E_n[psi(y_i, theta, h(x_i))]` together with the per-observation scores.
pub fn empirical_moment(
    y: &[f64],
    family: &TransformationFamily,
    theta: f64,
    h: &EvaluatedNuisance,
) -> Result<MomentEval> {
    empirical_moment_variant(y, family, theta, h, ScoreVariant::Orthogonal)
}

pub fn empirical_moment_variant(
    y: &[f64],
    family: &TransformationFamily,
    theta: f64,
    h: &EvaluatedNuisance,
    variant: ScoreVariant,
) -> Result<MomentEval> {
    if y.is_empty() {
        return Err(Error::EmptyData);
    }
    if h.len() != y.len() || h.mdot.len() != y.len() {
        return Err(Error::Dimension(format!(
            "nuisance has {} rows, data has {}",
            h.len(),
            y.len()
        )));
    }
    if !(h.sigma2 > 0.0) {
        return Err(Error::NonPositiveVariance(h.sigma2));
    }
    let per_obs = y
        .iter()
        .zip(h.m.iter().zip(&h.mdot))
        .map(|(&yi, (&m, &md))| {
            let v = family.values(theta, yi)?;
            Ok(compose_variant(
                v.value - m,
                v.dtheta - md,
                h.sigma2,
                h.sigma2dot,
                v.c_ratio,
                variant,
            )
            .psi)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = compensated_sum(per_obs.iter().copied()) / per_obs.len() as f64;
    Ok(MomentEval { mean, per_obs })
}

/// `{0, 0.05, ..., 0.5}`
pub fn default_r_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 * 0.05).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFit {
    /// Slope at `r = 0` of the fitted quadratic.
    pub linear: f64,
    pub quadratic: f64,
    pub intercept: f64,
    /// `g(r)` at each grid point.
    pub values: Vec<f64>,
}

impl ProbeFit {
    /// `|a| <= rel * max(|b|, floor)`
    pub fn is_orthogonal(&self, rel: f64, floor: f64) -> bool {
        self.linear.abs() <= rel * self.quadratic.abs().max(floor)
    }
}

/// Evaluates `g(r) = E_n psi(theta0, h_true + r (h_pert - h_true))` on
/// `r_grid` and fits `g(r) ~ g0 + a r + b r^2` by least squares.
pub fn orthogonality_probe(
    y: &[f64],
    family: &TransformationFamily,
    theta0: f64,
    h_true: &EvaluatedNuisance,
    h_pert: &EvaluatedNuisance,
    r_grid: &[f64],
) -> Result<ProbeFit> {
    orthogonality_probe_variant(
        y,
        family,
        theta0,
        h_true,
        h_pert,
        r_grid,
        ScoreVariant::Orthogonal,
    )
}

pub fn orthogonality_probe_variant(
    y: &[f64],
    family: &TransformationFamily,
    theta0: f64,
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
    if r_grid.iter().any(|r| !(0.0..1.0).contains(r)) {
        return Err(Error::InvalidConfig("r grid must lie in [0, 1)".into()));
    }
    let values = r_grid
        .iter()
        .map(|&r| {
            let h = h_true.interpolate(h_pert, r);
            empirical_moment_variant(y, family, theta0, &h, variant).map(|m| m.mean)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (intercept, linear, quadratic) = quadratic_fit(r_grid, &values)?;
    Ok(ProbeFit {
        linear,
        quadratic,
        intercept,
        values,
    })
}

/// Lasso rate `sqrt(s ln(max(p, n)) / n)`.
pub fn lasso_rate(n: usize, p: usize, s: usize) -> f64 {
    (s as f64 * (n.max(p) as f64).ln() / n as f64).sqrt()
}

/// Moves `h_true` along the direction of `h_dir - h_true`, rescaled so that
/// each component's deviation has size `rho` relative to its natural scale:
/// `rho sqrt(h2)` for `m`, `rho sqrt(E_n[e_dot^2])` for `m_dot` (both in the
/// empirical `L2` norm), `rho h2` for `sigma^2` and
/// `2 rho sqrt(h2 E_n[e_dot^2])` for its derivative.
pub fn rate_scaled_perturbation(
    y: &[f64],
    family: &TransformationFamily,
    h_true: &EvaluatedNuisance,
    h_dir: &EvaluatedNuisance,
    rho: f64,
) -> Result<EvaluatedNuisance> {
    let theta = h_true.theta;
    let n = y.len() as f64;
    let mut edot2 = 0.0;
    for (yi, md) in y.iter().zip(&h_true.mdot) {
        edot2 += (family.dtheta(theta, *yi)? - md).powi(2);
    }
    let scale_md = (edot2 / n).sqrt();
    let shift = |a: &[f64], b: &[f64], target: f64| -> Vec<f64> {
        let norm = (a.iter().zip(b).map(|(x, y)| (y - x).powi(2)).sum::<f64>() / n).sqrt();
        let k = if norm > 0.0 { target / norm } else { 0.0 };
        a.iter().zip(b).map(|(x, y)| x + k * (y - x)).collect()
    };
    let sign = |d: f64| if d < 0.0 { -1.0 } else { 1.0 };
    Ok(EvaluatedNuisance {
        theta,
        m: shift(&h_true.m, &h_dir.m, rho * h_true.sigma2.sqrt()),
        mdot: shift(&h_true.mdot, &h_dir.mdot, rho * scale_md),
        sigma2: h_true.sigma2 * (1.0 + rho * sign(h_dir.sigma2 - h_true.sigma2)),
        sigma2dot: h_true.sigma2dot
            + 2.0
                * rho
                * (h_true.sigma2 * edot2 / n).sqrt()
                * sign(h_dir.sigma2dot - h_true.sigma2dot),
    })
}

/// Monte Carlo standard error of the probe slope at `r = 0`: the standard
/// deviation of the per-observation path derivatives over `sqrt(n)`.
pub fn probe_slope_se(
    y: &[f64],
    family: &TransformationFamily,
    theta0: f64,
    h_true: &EvaluatedNuisance,
    h_pert: &EvaluatedNuisance,
    variant: ScoreVariant,
) -> Result<f64> {
    let d = 1e-6;
    let lo = empirical_moment_variant(y, family, theta0, h_true, variant)?;
    let hi = empirical_moment_variant(y, family, theta0, &h_true.interpolate(h_pert, d), variant)?;
    let g: Vec<f64> = lo
        .per_obs
        .iter()
        .zip(&hi.per_obs)
        .map(|(a, b)| (b - a) / d)
        .collect();
    Ok((crate::stats::sample_variance(&g) / g.len() as f64).sqrt())
}

/// Least-squares `(c0, c1, c2)` for `v ~ c0 + c1 r + c2 r^2`.
pub fn quadratic_fit(r: &[f64], v: &[f64]) -> Result<(f64, f64, f64)> {
    let k = r.len();
    let a = DMatrix::from_fn(k, 3, |i, j| r[i].powi(j as i32));
    let b = DVector::from_column_slice(v);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Matrix(e.to_string()))?;
    Ok((sol[0], sol[1], sol[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn hand_evaluated_scores() {
        let p = compose(2.0, 1.0, 1.0, 0.0, 0.0);
        assert_eq!(p.psi, -2.0);
        let p = compose(0.0, 0.0, 1.0, 2.0, 0.0);
        assert_eq!(p.psi, -1.0);
    }

    #[test]
    fn box_cox_at_e() {
        let fam = TransformationFamily::box_cox();
        let h = HValue {
            h1: 0.0,
            h2: 1.0,
            h3: 0.0,
            h4: 0.0,
        };
        let p = psi_single(&fam, 0.0, E, h).unwrap();
        assert_relative_eq!(p.part_ii, 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.part_c, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.psi, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn composition_is_exact() {
        let p = compose(0.37, -1.2, 0.8, 0.45, 0.11);
        assert_eq!(p.psi, -p.part_i - p.part_ii + p.part_iii + p.part_c);
    }

    #[test]
    fn variance_error() {
        let fam = TransformationFamily::box_cox();
        let h = HValue {
            h1: 0.0,
            h2: 0.0,
            h3: 0.0,
            h4: 0.0,
        };
        assert!(matches!(
            psi_single(&fam, 0.0, 1.0, h),
            Err(Error::NonPositiveVariance(_))
        ));
    }

    fn h_for(m: Vec<f64>) -> EvaluatedNuisance {
        let n = m.len();
        EvaluatedNuisance {
            theta: 0.0,
            m,
            mdot: vec![0.1; n],
            sigma2: 1.3,
            sigma2dot: 0.2,
        }
    }

    #[test]
    fn single_observation_mean() {
        let fam = TransformationFamily::box_cox();
        let h = h_for(vec![0.4]);
        let m = empirical_moment(&[2.0], &fam, 0.0, &h).unwrap();
        let single = psi_single(
            &fam,
            0.0,
            2.0,
            HValue {
                h1: 0.4,
                h2: 1.3,
                h3: 0.1,
                h4: 0.2,
            },
        )
        .unwrap();
        assert_eq!(m.mean, single.psi);
        assert_eq!(m.per_obs, vec![single.psi]);
        assert!(matches!(
            empirical_moment(&[], &fam, 0.0, &h_for(vec![])),
            Err(Error::EmptyData)
        ));
    }

    #[test]
    fn constant_path_has_zero_coefficients() {
        let fam = TransformationFamily::box_cox();
        let y = [0.5, 1.5, 2.5, 4.0];
        let h = h_for(vec![0.1, 0.2, 0.3, 0.4]);
        let fit = orthogonality_probe(&y, &fam, 0.0, &h, &h, &default_r_grid()).unwrap();
        assert!(fit.linear.abs() < 1e-12);
        assert!(fit.quadratic.abs() < 1e-12);
    }

    #[test]
    fn quadratic_fit_recovers_polynomial() {
        let r = default_r_grid();
        let v: Vec<f64> = r.iter().map(|x| 1.0 - 2.0 * x + 3.0 * x * x).collect();
        let (c0, c1, c2) = quadratic_fit(&r, &v).unwrap();
        assert_relative_eq!(c0, 1.0, epsilon = 1e-12);
        assert_relative_eq!(c1, -2.0, epsilon = 1e-11);
        assert_relative_eq!(c2, 3.0, epsilon = 1e-10);
    }
}
