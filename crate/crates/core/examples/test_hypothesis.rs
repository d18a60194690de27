//! Level-alpha tests of H0: theta = theta_null. The data are Yeo-Johnson with
//! theta0 = 1, so the null at 1 should stand and the null at 0 should fall.

use hdtransform::estimator::{estimate, test_null, InferenceConfig, SolverConfig};
use hdtransform::io::read_csv;
use hdtransform::lasso::LassoConfig;
use hdtransform::transform::TransformationFamily;

fn main() -> hdtransform::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/yeojohnson_theta1.csv");
    let data = read_csv(path, "y", &[])?;
    let inference = InferenceConfig {
        n_boot: 100,
        seed: 3,
        ..InferenceConfig::default()
    };
    let est = estimate(
        &data,
        &TransformationFamily::yeo_johnson(),
        &LassoConfig::default(),
        &SolverConfig::default(),
        &inference,
    )?;
    println!("theta_hat = {:.4}", est.result.theta_hat);
    for null in [0.0, 0.5, 1.0, 1.5] {
        let t = test_null(&est.result, null)?;
        println!(
            "H0: theta = {null:<4} z = {:>8.3}  p = {:.4}  {}",
            t.z_stat,
            t.p_value,
            if t.reject { "reject" } else { "accept" }
        );
    }
    Ok(())
}
