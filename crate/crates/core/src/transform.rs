//! Box-Cox and Yeo-Johnson transformation families.
//!
//! Every branch of both families reduces to the power kernel
//!
//! ```text
//! G(p, t) = (exp(p t) - 1) / p        (= t at p = 0)
//! ```
//!
//! evaluated at `t = ln y` (Box-Cox), `t = ln(1 + y)` (Yeo-Johnson, `y >= 0`)
//! or `t = ln(1 - y)` with `p = 2 - theta` (Yeo-Johnson, `y < 0`). The
//! `p`-derivatives of the kernel are `t^k E_k(p t)` where `E_k` are entire
//! functions, so the removable singularities at `theta = 0` (and `theta = 2`)
//! are handled by switching `E_k` to its power series near the origin.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TransformError;

/// `|p t|` below which the kernel functions are summed as power series.
pub const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    BoxCox,
    YeoJohnson,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::BoxCox => f.write_str("box-cox"),
            FamilyKind::YeoJohnson => f.write_str("yeo-johnson"),
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "boxcox" | "box-cox" => Ok(FamilyKind::BoxCox),
            "yeojohnson" | "yeo-johnson" => Ok(FamilyKind::YeoJohnson),
            other => Err(format!("unknown transformation family {other:?}")),
        }
    }
}

impl FamilyKind {
    pub fn default_domain(self) -> (f64, f64) {
        match self {
            FamilyKind::BoxCox => (-2.0, 2.0),
            FamilyKind::YeoJohnson => (-1.0, 3.0),
        }
    }
}

/// A parametric transformation family together with its compact parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformationFamily {
    pub kind: FamilyKind,
    theta_lo: f64,
    theta_hi: f64,
}

/// Transform quantities needed by the score at a single `(theta, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValues {
    pub value: f64,
    pub dtheta: f64,
    pub c_ratio: f64,
}

impl TransformationFamily {
    pub fn new(kind: FamilyKind) -> Self {
        let (theta_lo, theta_hi) = kind.default_domain();
        Self {
            kind,
            theta_lo,
            theta_hi,
        }
    }

    pub fn box_cox() -> Self {
        Self::new(FamilyKind::BoxCox)
    }

    pub fn yeo_johnson() -> Self {
        Self::new(FamilyKind::YeoJohnson)
    }

    pub fn with_domain(kind: FamilyKind, lo: f64, hi: f64) -> Result<Self, TransformError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(TransformError::InvalidDomain { lo, hi });
        }
        Ok(Self {
            kind,
            theta_lo: lo,
            theta_hi: hi,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.theta_lo, self.theta_hi)
    }

    pub fn contains_theta(&self, theta: f64) -> bool {
        theta >= self.theta_lo && theta <= self.theta_hi
    }

    pub fn contains_y(&self, y: f64) -> bool {
        match self.kind {
            FamilyKind::BoxCox => y.is_finite() && y > 0.0,
            FamilyKind::YeoJohnson => y.is_finite(),
        }
    }

    fn check(&self, theta: f64, y: f64) -> Result<(), TransformError> {
        if !self.contains_theta(theta) {
            return Err(TransformError::ThetaOutOfDomain {
                theta,
                lo: self.theta_lo,
                hi: self.theta_hi,
            });
        }
        if !self.contains_y(y) {
            return Err(TransformError::YOutOfDomain {
                family: self.kind,
                y,
            });
        }
        Ok(())
    }

    fn finite(&self, theta: f64, y: f64, v: f64) -> Result<f64, TransformError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(TransformError::Overflow {
                family: self.kind,
                theta,
                y,
            })
        }
    }

    /// Branch decomposition: `(sign, power, log_base)` with
    /// `Lambda = sign * G(power, log_base)` and `d power / d theta = sign`.
    fn branch(&self, theta: f64, y: f64) -> (f64, f64, f64) {
        match self.kind {
            FamilyKind::BoxCox => (1.0, theta, y.ln()),
            FamilyKind::YeoJohnson if y >= 0.0 => (1.0, theta, y.ln_1p()),
            FamilyKind::YeoJohnson => (-1.0, 2.0 - theta, (-y).ln_1p()),
        }
    }

    /// `Lambda_theta(y)`.
    pub fn eval(&self, theta: f64, y: f64) -> Result<f64, TransformError> {
        self.check(theta, y)?;
        let (sign, p, t) = self.branch(theta, y);
        let v = sign * t * kernel(1, p * t);
        self.finite(theta, y, v)
    }

    /// `d Lambda_theta(y) / d theta`.
    pub fn dtheta(&self, theta: f64, y: f64) -> Result<f64, TransformError> {
        self.check(theta, y)?;
        let (_, p, t) = self.branch(theta, y);
        // sign * dG/dp * dp/dtheta = sign * sign * ... = dG/dp
        let v = t * t * kernel(2, p * t);
        self.finite(theta, y, v)
    }

    /// `d^2 Lambda_theta(y) / d theta^2`.
    pub fn ddtheta2(&self, theta: f64, y: f64) -> Result<f64, TransformError> {
        self.check(theta, y)?;
        let (sign, p, t) = self.branch(theta, y);
        let v = sign * t * t * t * kernel(3, p * t);
        self.finite(theta, y, v)
    }

    /// `d Lambda_theta(y) / d y`, strictly positive on the domain.
    pub fn dy(&self, theta: f64, y: f64) -> Result<f64, TransformError> {
        self.check(theta, y)?;
        let (_, p, t) = self.branch(theta, y);
        let v = ((p - 1.0) * t).exp();
        self.finite(theta, y, v)
    }

    /// Mixed derivative `d^2 Lambda_theta(y) / d theta d y`.
    pub fn dtheta_dy(&self, theta: f64, y: f64) -> Result<f64, TransformError> {
        let c = self.c_ratio(theta, y)?;
        let d = self.dy(theta, y)?;
        self.finite(theta, y, c * d)
    }

    /// `c_theta(y)`: mixed derivative divided by `dy`.
    ///
    /// Both families give `c = sign(y) ln(1 + |y|)` style closed forms that do
    /// not depend on theta.
    pub fn c_ratio(&self, theta: f64, y: f64) -> Result<f64, TransformError> {
        self.check(theta, y)?;
        let (sign, _, t) = self.branch(theta, y);
        Ok(sign * t)
    }

    /// Value, theta-derivative and `c_theta` in one pass.
    pub fn values(&self, theta: f64, y: f64) -> Result<TransformValues, TransformError> {
        self.check(theta, y)?;
        let (sign, p, t) = self.branch(theta, y);
        let z = p * t;
        let value = self.finite(theta, y, sign * t * kernel(1, z))?;
        let dtheta = self.finite(theta, y, t * t * kernel(2, z))?;
        Ok(TransformValues {
            value,
            dtheta,
            c_ratio: sign * t,
        })
    }

    /// `Lambda_theta^{-1}(z)`; fails with a range error when `z` is not attained.
    pub fn inverse(&self, theta: f64, z: f64) -> Result<f64, TransformError> {
        if !self.contains_theta(theta) {
            return Err(TransformError::ThetaOutOfDomain {
                theta,
                lo: self.theta_lo,
                hi: self.theta_hi,
            });
        }
        let out_of_range = || TransformError::OutOfRange {
            family: self.kind,
            theta,
            z,
        };
        if !z.is_finite() {
            return Err(out_of_range());
        }
        let y = match self.kind {
            FamilyKind::BoxCox => {
                let t = inverse_kernel(theta, z).ok_or_else(out_of_range)?;
                t.exp()
            }
            FamilyKind::YeoJohnson if z >= 0.0 => {
                let t = inverse_kernel(theta, z).ok_or_else(out_of_range)?;
                t.exp_m1()
            }
            FamilyKind::YeoJohnson => {
                let s = inverse_kernel(2.0 - theta, -z).ok_or_else(out_of_range)?;
                -s.exp_m1()
            }
        };
        if !y.is_finite() || (self.kind == FamilyKind::BoxCox && y <= 0.0) {
            return Err(out_of_range());
        }
        Ok(y)
    }
}

/// Solves `G(p, t) = z` for `t`, i.e. `t = ln(1 + p z) / p`.
fn inverse_kernel(p: f64, z: f64) -> Option<f64> {
    let w = p * z;
    if w <= -1.0 {
        return None;
    }
    let ratio = if w == 0.0 { 1.0 } else { w.ln_1p() / w };
    Some(z * ratio)
}

/// `E_k(z)` for `k` in 1..=3:
///
/// ```text
/// E_1(z) = (e^z - 1) / z
/// E_2(z) = (z e^z - e^z + 1) / z^2
/// E_3(z) = (z^2 e^z - 2 z e^z + 2 e^z - 2) / z^3
/// ```
pub(crate) fn kernel(order: u32, z: f64) -> f64 {
    if z.abs() < SERIES_RADIUS {
        kernel_series(order, z)
    } else {
        kernel_closed(order, z)
    }
}

pub(crate) fn kernel_closed(order: u32, z: f64) -> f64 {
    let ez = z.exp();
    let em1 = z.exp_m1();
    match order {
        1 => em1 / z,
        2 => (z * ez - em1) / (z * z),
        3 => (z * z * ez - 2.0 * z * ez + 2.0 * em1) / (z * z * z),
        _ => unreachable!("kernel order {order}"),
    }
}

/// `E_k(z) = sum_j (j+1)...(j+k-1) z^j / (j+k)!`.
pub(crate) fn kernel_series(order: u32, z: f64) -> f64 {
    let k = order as usize;
    // z^j / (j + k)!
    let mut pow_over_fact = 1.0 / (1..=k).map(|i| i as f64).product::<f64>();
    let mut sum = 0.0;
    for j in 0..SERIES_TERMS {
        let rising: f64 = (1..k).map(|i| (j + i) as f64).product();
        sum += rising * pow_over_fact;
        pow_over_fact *= z / (j + k + 1) as f64;
    }
    sum
}
