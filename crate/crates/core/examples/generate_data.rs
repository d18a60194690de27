//! Regenerates the bundled datasets under `data/`.
//!
//! ```text
//! cargo run --release --example generate_data
//! ```

use std::path::Path;

use hdtransform::io::{write_csv, Dataset};
use hdtransform::simulate::{draw_dataset, SimConfig};
use hdtransform::transform::{FamilyKind, TransformationFamily};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SEED: u64 = 20_240_617;

/// Hourly wages from a Box-Cox model with theta0 = 0.5 and Mincer-style
/// regressors: schooling, experience and its square, demographic and
/// region/industry dummies, plus pure-noise controls.
fn synthetic_wages(n: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x77);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let n_industry = 8;
    let n_region = 4;
    let n_noise = 10;
    let mut names: Vec<String> = ["educ", "exper", "exper2", "female", "married", "parttime"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    names.extend((1..n_region).map(|k| format!("region{k}")));
    names.extend((1..n_industry).map(|k| format!("industry{k}")));
    names.extend((1..=n_noise).map(|k| format!("z{k}")));
    let p = names.len();
    let mut x = DMatrix::zeros(n, p);
    let mut wage = Vec::with_capacity(n);
    let fam = TransformationFamily::box_cox();
    let region_effect = [0.0, 0.25, -0.2, 0.1];
    let industry_effect = [0.0, 0.4, -0.3, 0.2, 0.0, 0.6, -0.5, 0.1];
    let mut i = 0;
    while i < n {
        let e: f64 = noise.sample(&mut rng);
        let educ = (12.0 + 2.5 * e).round().clamp(6.0, 21.0);
        let exper: f64 = rng.random_range(0.0..40.0f64).floor();
        let female = f64::from(rng.random_bool(0.48));
        let married = f64::from(rng.random_bool(0.55));
        let parttime = f64::from(rng.random_bool(0.15));
        let region = rng.random_range(0..n_region);
        let industry = rng.random_range(0..n_industry);
        let mut row = vec![
            educ,
            exper,
            exper * exper / 100.0,
            female,
            married,
            parttime,
        ];
        row.extend((1..n_region).map(|k| f64::from(k == region)));
        row.extend((1..n_industry).map(|k| f64::from(k == industry)));
        row.extend((0..n_noise).map(|_| noise.sample(&mut rng)));
        let latent = 1.2 + 0.2 * educ + 0.07 * exper - 0.12 * exper * exper / 100.0 - 0.45 * female
            + 0.15 * married
            - 0.3 * parttime
            + region_effect[region]
            + industry_effect[industry]
            + 0.9 * noise.sample(&mut rng);
        let Ok(w) = fam.inverse(0.5, latent) else {
            continue;
        };
        for (j, v) in row.into_iter().enumerate() {
            x[(i, j)] = v;
        }
        wage.push((w * 100.0).round() / 100.0);
        i += 1;
    }
    Dataset::new(wage, x, "wage", names).unwrap()
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::create_dir_all(&dir).unwrap();

    let boxcox = SimConfig {
        name: Some("boxcox_theta0".into()),
        ..SimConfig::table1()
    };
    write_csv(
        &draw_dataset(&boxcox, SEED).unwrap().train,
        dir.join("boxcox_theta0.csv"),
    )
    .unwrap();

    let yj = SimConfig {
        name: Some("yeojohnson_theta1".into()),
        family: FamilyKind::YeoJohnson,
        theta0: 1.0,
        ..SimConfig::table1()
    };
    write_csv(
        &draw_dataset(&yj, SEED).unwrap().train,
        dir.join("yeojohnson_theta1.csv"),
    )
    .unwrap();

    write_csv(&synthetic_wages(2000), dir.join("wages.csv")).unwrap();

    // study files list only the non-default fields
    let row = |name: &str, cov: &str| {
        serde_json::json!({
            "name": name, "family": "box-cox", "theta0": 0.0, "n": 200, "p": 20, "s": 5,
            "snr": 1.0, "cov_kind": cov, "reps": 200, "n_boot": 100, "base_seed": 1
        })
    };
    let write = |file: &str, rows: Vec<serde_json::Value>| {
        let text =
            serde_json::to_string_pretty(&serde_json::json!({ "configurations": rows })).unwrap();
        std::fs::write(dir.join(file), text + "\n").unwrap();
    };
    write("table1.json", vec![row("table1", "identity")]);
    write(
        "tables_1_2.json",
        vec![row("table1", "identity"), row("table2", "toeplitz")],
    );
    println!("wrote bundled data to {}", dir.display());
}
