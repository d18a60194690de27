//! Normal Q-Q diagnostics of the residuals at the estimate, at the log
//! transform, and on the raw scale. Writes CSVs next to the system temp dir.

use hdtransform::estimator::{solve, SolverConfig};
use hdtransform::io::{qq_data, qq_points, qq_sup_deviation, read_csv, write_qq_csv};
use hdtransform::lasso::{fit, LassoConfig};
use hdtransform::nuisance::fit_at_theta;
use hdtransform::transform::TransformationFamily;

fn main() -> hdtransform::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/wages.csv");
    let data = read_csv(path, "wage", &[])?;
    let family = TransformationFamily::box_cox();
    let lasso = LassoConfig::default();
    let sol = solve(&data, &family, &lasso, &SolverConfig::default())?;

    let at_hat = qq_data(&sol.nuis_at_hat)?;
    let at_log = qq_data(&fit_at_theta(&data, &family, 0.0, &lasso, None)?)?;
    let raw_fit = fit(&data.x, &data.y, &lasso)?;
    let raw_resid: Vec<f64> = data
        .y
        .iter()
        .zip(raw_fit.predict(&data.x))
        .map(|(y, f)| y - f)
        .collect();
    let s2 = raw_resid.iter().map(|r| r * r).sum::<f64>() / raw_resid.len() as f64;
    let raw = qq_points(&raw_resid, s2)?;

    let dir = std::env::temp_dir();
    for (label, pts) in [
        (format!("theta_hat = {:.3}", sol.theta_hat), &at_hat),
        ("log".into(), &at_log),
        ("raw".into(), &raw),
    ] {
        println!("{label:<18} sup deviation {:.3}", qq_sup_deviation(pts));
    }
    write_qq_csv(&at_hat, dir.join("qq_theta_hat.csv"))?;
    write_qq_csv(&raw, dir.join("qq_raw.csv"))?;
    println!("wrote {}", dir.join("qq_theta_hat.csv").display());
    Ok(())
}
