//! Monte Carlo rows in the format of the simulation tables. Pass the number
//! of replications as the first argument (default 20).
//!
//! ```text
//! cargo run --release --example simulation_table -- 200
//! ```

use hdtransform::simulate::{run_study, CovKind, SimConfig};
use hdtransform::transform::FamilyKind;

fn main() -> hdtransform::Result<()> {
    let reps: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(20);
    let rows = [
        SimConfig {
            reps,
            ..SimConfig::table1()
        },
        SimConfig {
            name: Some("toeplitz".into()),
            cov_kind: CovKind::Toeplitz,
            reps,
            ..SimConfig::table1()
        },
        SimConfig {
            name: Some("yeo-johnson".into()),
            family: FamilyKind::YeoJohnson,
            theta0: 1.0,
            reps,
            ..SimConfig::table1()
        },
    ];
    println!(
        "{:>12} {:>10} {:>10} {:>8} {:>8}",
        "design", "estimator", "accept", "MAE", "rel.MSE"
    );
    for config in &rows {
        let r = run_study(config)?;
        println!(
            "{:>12} {:>10.5} {:>10.3} {:>8.4} {:>8.4}",
            config.name.as_deref().unwrap_or("-"),
            r.mean_estimator,
            r.acceptance_rate.unwrap_or(f64::NAN),
            r.mae,
            r.rel_mse
        );
    }
    Ok(())
}
