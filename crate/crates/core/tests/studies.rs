use hdtransform::simulate::{run_study, run_study_with, RepEstimate, SimConfig};
use hdtransform::transform::FamilyKind;

/// Yeo-Johnson design at SNR = 3.
#[test]
fn yeo_johnson_snr3_row() {
    let config = SimConfig {
        family: FamilyKind::YeoJohnson,
        theta0: 1.0,
        snr: 3.0,
        n_boot: 0,
        ..SimConfig::table1()
    };
    let r = run_study(&config).unwrap();
    assert_eq!(r.successes + r.failures, 200);
    assert!(
        (r.mean_estimator - 1.0).abs() <= 0.01,
        "{}",
        r.mean_estimator
    );
    assert!((0.022..=0.042).contains(&r.mae), "{}", r.mae);
    assert!(r.acceptance_rate.is_none());
}

#[test]
fn injected_oracle_estimator_is_exact() {
    let config = SimConfig {
        reps: 1,
        ..SimConfig::table1()
    };
    let r = run_study_with(&config, |_, c, _| {
        Ok(RepEstimate {
            theta_hat: c.theta0,
            accepted: Some(true),
            intercept: 0.0,
            beta: c.beta0(),
        })
    })
    .unwrap();
    assert_eq!(r.mae, 0.0);
    assert_eq!(r.acceptance_rate, Some(1.0));
    assert!(r.mse > 0.0);
}
