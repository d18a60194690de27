//! Box-Cox and Yeo-Johnson values, derivatives and inverses.

use hdtransform::transform::TransformationFamily;

fn main() -> hdtransform::Result<()> {
    let bc = TransformationFamily::box_cox();
    let yj = TransformationFamily::yeo_johnson();

    println!(
        "{:>12} {:>6} {:>6} {:>12} {:>12} {:>12} {:>12}",
        "family", "theta", "y", "value", "d/dtheta", "d/dy", "c_theta"
    );
    let cases = [
        (&bc, 0.0, 2.0),
        (&bc, 0.5, 2.0),
        (&bc, -1.0, 0.3),
        (&yj, 1.0, -2.0),
        (&yj, 0.0, 3.0),
        (&yj, 2.0, -1.5),
    ];
    for (fam, theta, y) in cases {
        let v = fam.values(theta, y)?;
        println!(
            "{:>12} {:>6} {:>6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            fam.kind.to_string(),
            theta,
            y,
            v.value,
            v.dtheta,
            fam.dy(theta, y)?,
            v.c_ratio
        );
    }

    // the inverse recovers y
    for (fam, theta, y) in cases {
        let z = fam.eval(theta, y)?;
        println!(
            "{} inverse({theta}, {z:.6}) = {:.12}",
            fam.kind,
            fam.inverse(theta, z)?
        );
    }

    // out-of-domain inputs are errors, not NaN
    println!("box-cox at y = -1: {}", bc.eval(0.5, -1.0).unwrap_err());
    println!(
        "box-cox inverse out of range: {}",
        bc.inverse(0.5, -5.0).unwrap_err()
    );
    Ok(())
}
