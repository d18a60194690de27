//! Heteroscedasticity-adapted lasso with data-driven penalty and loadings,
//! its post-lasso refit, and the KKT certificate.

use hdtransform::lasso::{default_lambda, fit, kkt_holds, kkt_residuals, LassoConfig};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> hdtransform::Result<()> {
    let (n, p) = (100, 50);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = DMatrix::from_fn(n, p, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let e: f64 = StandardNormal.sample(&mut rng);
            1.0 + 2.0 * x[(i, 0)] - 1.5 * x[(i, 1)] + x[(i, 2)] + (1.0 + x[(i, 3)].abs()) * e
        })
        .collect();

    let config = LassoConfig::default();
    println!("lambda = {:.3}", default_lambda(n, p, &config));
    let f = fit(&x, &y, &config)?;
    println!(
        "active set {:?} after {} iterations",
        f.active_set, f.iterations
    );
    let (a, b) = f.coefficients();
    println!(
        "post-lasso intercept {a:.3}, first coefficients {:.3?}",
        &b[..4]
    );
    println!("penalized coefficients {:.3?}", &f.beta[..4]);
    println!("loadings {:.3?}", &f.loadings[..4]);

    let worst = kkt_residuals(&f, &x, &y)
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    println!(
        "max |KKT gradient| = {worst:.3}, conditions hold: {}",
        kkt_holds(&f, &x, &y, 1e-6)
    );

    let ols = fit(&x, &y, &LassoConfig::ols())?;
    println!("lambda = 0 keeps {} of {p} regressors", ols.n_nonzero());
    Ok(())
}
