//! Gauss-Hermite rules for expectations under the standard normal.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights with `sum w_k f(z_k) ~ E f(Z)`, `Z ~ N(0, 1)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub-Welsch starting nodes, polished by Newton steps on the
    /// orthonormal Hermite polynomial; weights are Christoffel numbers.
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "need at least one node");
        let jacobi = DMatrix::from_fn(k, k, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        nodes.sort_by(f64::total_cmp);
        let mut weights = Vec::with_capacity(k);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (pk, pk1, _) = orthonormal_hermite(k, *x);
                // p_k' = sqrt(k) p_{k-1}
                let step = pk / ((k as f64).sqrt() * pk1);
                if step.is_finite() {
                    *x -= step;
                }
            }
            weights.push(1.0 / orthonormal_hermite(k, *x).2);
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self { nodes, weights }
    }

    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| w * f(*z))
            .sum()
    }
}

/// `(p_k(x), p_{k-1}(x), sum_{j<k} p_j(x)^2)` for the orthonormal
/// probabilists' Hermite polynomials.
fn orthonormal_hermite(k: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sumsq = 0.0;
    for j in 0..k {
        sumsq += cur * cur;
        let next = (x * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev, sumsq)
}

pub const DEFAULT_NODES: usize = 96;

/// Shared 96-node rule.
pub fn standard() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(DEFAULT_NODES))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_moments() {
        let q = standard();
        assert_relative_eq!(q.expect(|_| 1.0), 1.0, epsilon = 1e-14);
        assert!(q.expect(|z| z).abs() < 1e-13);
        assert_relative_eq!(q.expect(|z| z * z), 1.0, epsilon = 1e-12);
        assert_relative_eq!(q.expect(|z| z.powi(4)), 3.0, epsilon = 1e-11);
        assert_relative_eq!(q.expect(|z| z.powi(6)), 15.0, epsilon = 1e-10);
    }

    #[test]
    fn lognormal_mean() {
        // E exp(a Z) = exp(a^2 / 2)
        let q = standard();
        for a in [0.5, 2.0, 4.5] {
            assert_relative_eq!(
                q.expect(|z| (a * z).exp()),
                (a * a / 2.0f64).exp(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn small_rule_is_exact_for_low_degree() {
        let q = GaussHermite::new(3);
        assert_relative_eq!(q.expect(|z| z.powi(4)), 3.0, epsilon = 1e-12);
        assert_relative_eq!(q.nodes[2], 3f64.sqrt(), epsilon = 1e-12);
    }
}
