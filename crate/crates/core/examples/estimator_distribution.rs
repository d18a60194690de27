//! Sampling distribution of the standardized estimator, with a text
//! histogram against the standard normal.

use hdtransform::simulate::{estimator_histogram, CovKind, SimConfig};
use hdtransform::stats::{excess_kurtosis, mean, normal_cdf, sample_variance, skewness};

fn main() -> hdtransform::Result<()> {
    let reps: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(200);
    let config = SimConfig {
        p: 50,
        cov_kind: CovKind::Toeplitz,
        ..SimConfig::table1()
    };
    let est = estimator_histogram(&config, reps)?;
    let (m, sd) = (mean(&est), sample_variance(&est).sqrt());
    let z: Vec<f64> = est.iter().map(|t| (t - m) / sd).collect();
    println!("{} estimates, mean {m:.5}, sd {sd:.5}", est.len());
    println!(
        "skewness {:.3}, excess kurtosis {:.3}",
        skewness(&z),
        excess_kurtosis(&z)
    );

    let edges: Vec<f64> = (-6..=6).map(|k| k as f64 * 0.5).collect();
    for w in edges.windows(2) {
        let count = z.iter().filter(|v| **v >= w[0] && **v < w[1]).count();
        let expect = (normal_cdf(w[1]) - normal_cdf(w[0])) * z.len() as f64;
        println!(
            "[{:>5.1}, {:>5.1}) {:>4} {:>6.1} {}",
            w[0],
            w[1],
            count,
            expect,
            "#".repeat(count * 60 / z.len().max(1))
        );
    }
    Ok(())
}
