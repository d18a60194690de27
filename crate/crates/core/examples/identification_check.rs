//! Identification: with the true nuisance plugged in, the score's sample
//! mean crosses zero once on the solver grid, next to the true parameter.

use hdtransform::estimator::SolverConfig;
use hdtransform::moment::empirical_moment;
use hdtransform::simulate::oracle::OracleModel;
use hdtransform::simulate::{Dgp, SimConfig};
use hdtransform::stats::sample_variance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hdtransform::Result<()> {
    let n = 50_000;
    let config = SimConfig::table1();
    let dgp = Dgp::new(&config)?;
    let fam = config.family();
    let draw = dgp.draw(&mut ChaCha8Rng::seed_from_u64(5), n)?;
    let oracle = OracleModel::new(fam, config.theta0, dgp.sigma2.sqrt());

    let grid = SolverConfig::default().grid(&fam)?;
    let mut scores = Vec::with_capacity(grid.len());
    for &theta in &grid {
        let h = oracle.nuisance(theta, &draw.mu)?;
        let m = empirical_moment(&draw.data.y, &fam, theta, &h)?.mean;
        println!("{theta:>6.2} {m:>14.6e}");
        scores.push(m);
    }
    let changes: Vec<usize> = (0..grid.len() - 1)
        .filter(|&k| scores[k] * scores[k + 1] < 0.0)
        .collect();
    for k in &changes {
        println!("sign change in [{:.2}, {:.2}]", grid[*k], grid[k + 1]);
    }

    let at_truth = empirical_moment(
        &draw.data.y,
        &fam,
        config.theta0,
        &oracle.nuisance(config.theta0, &draw.mu)?,
    )?;
    let bound = 3.0 * sample_variance(&at_truth.per_obs).sqrt() / (n as f64).sqrt();
    println!(
        "E_n psi(theta0) = {:.3e}, 3 sd / sqrt(n) = {bound:.3e}",
        at_truth.mean
    );
    Ok(())
}
