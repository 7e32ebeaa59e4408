//! Rotation of a device and the GCS/LCS field transformation.
//!
//! `cargo run --example orientation -- [theta0_deg] [phi0_deg]`

use std::f64::consts::FRAC_PI_2;

use cran_rf::channel::rotation::{
    compose_rotation, lcs_angles, orientation_transform, OrientationTransform,
};
use cran_rf::codebook::array_steering_angle;
use cran_rf::OrientationAngles;

fn main() {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let theta0 = args.first().copied().unwrap_or(90.0).to_radians();
    let phi0 = args.get(1).copied().unwrap_or(30.0).to_radians();
    let o = OrientationAngles::new(theta0, phi0);
    let r = compose_rotation(o);
    println!("R = R_z(phi0) R_y(theta0):");
    for row in r.0.row_iter() {
        println!("  {:>9.5} {:>9.5} {:>9.5}", row[0], row[1], row[2]);
    }
    println!(
        "det {:.15}, orthonormality error {:.2e}",
        r.determinant(),
        r.orthonormality_error()
    );

    println!(
        "{:>8} {:>10} {:>10} {:>9} {:>9} {:>12}",
        "phi_deg", "theta'", "phi'", "cos psi", "sin psi", "steer_deg"
    );
    for k in 0..12 {
        let phi = (k as f64 * 30.0).to_radians();
        let lcs = lcs_angles(&r, FRAC_PI_2, phi);
        let t = orientation_transform((FRAC_PI_2, phi), lcs, &r);
        let closed = OrientationTransform::closed_form((FRAC_PI_2, phi), lcs, o);
        assert!(
            (t.cos_psi - closed.cos_psi).abs() < 1e-9 && (t.sin_psi - closed.sin_psi).abs() < 1e-9
        );
        let dir = nalgebra::Vector3::new(phi.cos(), phi.sin(), 0.0);
        let steer = array_steering_angle(&r.to_local(&dir));
        println!(
            "{:>8.0} {:>10.2} {:>10.2} {:>9.4} {:>9.4} {:>12.2}",
            phi.to_degrees(),
            lcs.0.to_degrees(),
            lcs.1.to_degrees(),
            t.cos_psi,
            t.sin_psi,
            steer.to_degrees()
        );
    }
}
