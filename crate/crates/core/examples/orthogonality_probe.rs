//! Neyman orthogonality, numerically: move the true nuisance toward a lasso
//! estimate and fit `g(r) = g0 + a r + b r^2` along the path.
//!
//! The direction is the nuisance a lasso fit on a 200-row training draw
//! produces, evaluated on 50000 fresh rows with known oracle nuisance.
//!
//! The step along that direction is shrunk to the lasso rate at 50000 rows.
//!
//! `pop`: noise integrated out by quadrature, so `a` is exact up to
//! higher-order terms of the path. `sample`: plain `E_n` over the rows;
//! `se` is the Monte Carlo error of its `a`.

use hdtransform::moment::{
    default_r_grid, lasso_rate, orthogonality_probe_variant, probe_slope_se,
    rate_scaled_perturbation, ScoreVariant,
};
use hdtransform::nuisance::{fit_at_theta, Component, EvaluatedNuisance};
use hdtransform::simulate::oracle::OracleModel;
use hdtransform::simulate::{Dgp, SimConfig};
use hdtransform::transform::FamilyKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const VARIANTS: [ScoreVariant; 2] = [ScoreVariant::Orthogonal, ScoreVariant::WithoutPartIII];

fn main() -> hdtransform::Result<()> {
    let big_n = 50_000;
    let r_grid = default_r_grid();
    for config in [
        SimConfig::table1(),
        SimConfig {
            family: FamilyKind::YeoJohnson,
            theta0: 1.0,
            ..SimConfig::table1()
        },
    ] {
        let dgp = Dgp::new(&config)?;
        let fam = config.family();
        let theta0 = config.theta0;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let big = dgp.draw(&mut rng, big_n)?;
        let train = dgp.draw(&mut rng, config.n)?;

        let oracle = OracleModel::new(fam, theta0, dgp.sigma2.sqrt());
        let h0 = oracle.nuisance(theta0, &big.mu)?;
        let fit = fit_at_theta(&train.data, &fam, theta0, &config.lasso, None)?;
        let h_dir = EvaluatedNuisance {
            theta: theta0,
            m: fit.fit_m.predict(&big.data.x),
            mdot: fit.fit_mdot.predict(&big.data.x),
            sigma2: fit.sigma2(),
            sigma2dot: fit.sigma2dot(),
        };
        let rho = lasso_rate(big_n, config.p, config.s);
        let h_small = rate_scaled_perturbation(&big.data.y, &fam, &h0, &h_dir, rho)?;

        let mut cases: Vec<(String, Component)> = Component::ALL
            .iter()
            .map(|c| (format!("{c:?}"), *c))
            .collect();
        cases.push(("joint".into(), Component::M));

        println!("{} theta0 = {theta0}, rate {rho:.4}", config.family);
        println!(
            "{:>10} {:>15} | {:>11} {:>11} {:>5} | {:>11} {:>11} {:>5}",
            "component", "score", "pop a", "pop b", "ok", "sample a", "se", "ok"
        );
        for (i, (label, c)) in cases.iter().enumerate() {
            let joint = i == Component::ALL.len();
            let pert = if joint {
                h_small.clone()
            } else {
                h0.with_component(&h_small, *c)
            };
            for variant in VARIANTS {
                let pop = oracle.population_probe(theta0, &big.mu, &h0, &pert, &r_grid, variant)?;
                let smp = orthogonality_probe_variant(
                    &big.data.y,
                    &fam,
                    theta0,
                    &h0,
                    &pert,
                    &r_grid,
                    variant,
                )?;
                let se = probe_slope_se(&big.data.y, &fam, theta0, &h0, &pert, variant)?;
                println!(
                    "{:>10} {:>15} | {:>11.3e} {:>11.3e} {:>5} | {:>11.3e} {:>11.3e} {:>5}",
                    label,
                    format!("{variant:?}"),
                    pop.linear,
                    pop.quadratic,
                    pop.is_orthogonal(0.05, 0.01),
                    smp.linear,
                    se,
                    smp.is_orthogonal(0.05, 0.01)
                );
            }
        }
        println!();
    }
    Ok(())
}
