//! Point estimate, bootstrap and plug-in variances, and the confidence
//! interval of the transformation parameter on the bundled wage data.

use hdtransform::estimator::{estimate, InferenceConfig, SolverConfig};
use hdtransform::io::read_csv;
use hdtransform::lasso::LassoConfig;
use hdtransform::transform::TransformationFamily;

fn main() -> hdtransform::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/wages.csv");
    let data = read_csv(path, "wage", &[])?;
    println!("{} rows, {} regressors", data.n(), data.p());

    let family = TransformationFamily::box_cox();
    let inference = InferenceConfig {
        n_boot: 50,
        seed: 7,
        ..InferenceConfig::default()
    };
    let est = estimate(
        &data,
        &family,
        &LassoConfig::default(),
        &SolverConfig::default(),
        &inference,
    )?;
    let r = &est.result;
    println!(
        "theta_hat = {:.4} (score there {:.2e})",
        r.theta_hat, r.mean_psi_at_hat
    );
    if let Some(s) = r.sigma_boot {
        println!(
            "bootstrap sd {:.4} from {} replicates",
            s.sqrt(),
            est.replicates.len()
        );
    }
    if let Some(s) = r.sigma_plug {
        println!("plug-in sd   {:.4}", s.sqrt());
    }
    if let Some(ci) = r.ci {
        println!(
            "{:.0}% interval [{:.4}, {:.4}]",
            100.0 * (1.0 - ci.alpha),
            ci.lo,
            ci.hi
        );
    }
    println!("multiple roots: {}", r.multi_root);
    println!(
        "selected for m at theta_hat: {:?}",
        est.solution.nuis_at_hat.fit_m.active_set
    );
    Ok(())
}
