use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

use cran_rf::channel::rotation::{
    basic_rotations, compose_rotation, lcs_angles, orientation_transform, spherical_basis,
    OrientationTransform, RotationMatrix,
};
use cran_rf::channel::{pathloss, synthesize_channel, LinkRays, SPEED_OF_LIGHT};
use cran_rf::scenario::{
    inject_position_noise, sample_orientation, with_orientations, LosMode, OrientationMode,
    ScattererField, Scenario,
};
use cran_rf::{Error, OrientationAngles, ScenarioConfig};

fn scenario() -> Scenario {
    Scenario::new(ScenarioConfig::default()).unwrap()
}

#[test]
fn drops_are_deterministic_and_distinct() {
    let s = scenario();
    assert_eq!(s.sample_drop(3), s.sample_drop(3));
    let a = s.sample_drop(0);
    let b = s.sample_drop(1);
    assert_ne!(a.true_positions, b.true_positions);
    assert_eq!(a.reported_positions, a.true_positions);
}

#[test]
fn drop_users_lie_inside_the_domain() {
    let s = scenario();
    let cfg = &s.cfg;
    let d = cfg.geometry.domain_size_m;
    for k in 0..200 {
        let drop = s.sample_drop(k);
        assert_eq!(drop.n_users(), 4);
        for (user, p) in drop.true_positions.iter().enumerate() {
            assert!(
                (0.0..=d).contains(&p.x) && (0.0..=d).contains(&p.y),
                "{p:?}"
            );
            assert_eq!(cfg.nearest_rrh(p), user);
            for r in 0..cfg.geometry.rrh_positions.len() {
                let q = cfg.rrh_position(r);
                assert!((p.x - q.x).hypot(p.y - q.y) >= cfg.geometry.exclusion_radius_m);
            }
        }
    }
}

#[test]
fn zero_noise_reports_truth() {
    let drop = scenario().sample_drop(5);
    let noisy = inject_position_noise(&drop, 0.0, 1).unwrap();
    assert_eq!(noisy.reported_positions, drop.true_positions);
}

#[test]
fn negative_noise_radius_is_rejected() {
    let drop = scenario().sample_drop(5);
    assert!(matches!(
        inject_position_noise(&drop, -1.0, 1),
        Err(Error::Argument(_))
    ));
}

#[test]
fn noise_keeps_truth_and_heights() {
    let s = scenario();
    for k in 0..100 {
        let drop = s.sample_drop(k);
        let noisy = inject_position_noise(&drop, 2.0, 9).unwrap();
        assert_eq!(noisy.true_positions, drop.true_positions);
        for (r, t) in noisy.reported_positions.iter().zip(&drop.true_positions) {
            assert!((r.x - t.x).hypot(r.y - t.y) <= 2.0 + 1e-12);
            assert_eq!(r.z, t.z);
        }
    }
}

#[test]
fn mean_noise_displacement_is_two_thirds_of_radius() {
    let s = scenario();
    let radius = 3.0;
    let mut sum = 0.0;
    let mut n = 0usize;
    for k in 0..25_000u64 {
        let mut drop = s.sample_drop(0);
        drop.index = k;
        let noisy = inject_position_noise(&drop, radius, 4).unwrap();
        for (r, t) in noisy.reported_positions.iter().zip(&drop.true_positions) {
            sum += (r.x - t.x).hypot(r.y - t.y);
            n += 1;
        }
    }
    let mean = sum / n as f64;
    let expected = 2.0 / 3.0 * radius;
    assert!(
        (mean - expected).abs() <= 0.01 * expected,
        "{mean} vs {expected}"
    );
}

#[test]
fn aligned_orientation_is_zero() {
    assert_eq!(
        sample_orientation(OrientationMode::Aligned, (0.0, 1.0), 3),
        OrientationAngles::new(0.0, 0.0)
    );
}

#[test]
fn random_orientation_is_reproducible_and_centred() {
    let band = (60f64.to_radians(), 120f64.to_radians());
    assert_eq!(
        sample_orientation(OrientationMode::Random, band, 11),
        sample_orientation(OrientationMode::Random, band, 11)
    );
    let n = 10_000;
    let phis: Vec<f64> = (0..n)
        .map(|s| sample_orientation(OrientationMode::Random, band, s).phi0)
        .collect();
    let mean = phis.iter().sum::<f64>() / n as f64;
    // Uniform on [0, 2π): standard deviation 2π/√12.
    let se = TAU / 12f64.sqrt() / (n as f64).sqrt();
    assert!((mean - PI).abs() <= 3.0 * se, "{mean}");
    for s in 0..n {
        let o = sample_orientation(OrientationMode::Random, band, s);
        assert!(o.is_valid());
        assert!((band.0..band.1).contains(&o.theta0));
    }
}

#[test]
fn drop_orientations_are_per_user() {
    let drop = scenario().sample_drop(2);
    let o = with_orientations(&drop, OrientationMode::Random, [60.0, 120.0], 5);
    assert_ne!(o.orientations[0], o.orientations[1]);
    assert_eq!(
        o,
        with_orientations(&drop, OrientationMode::Random, [60.0, 120.0], 5)
    );
}

#[test]
fn basic_rotation_examples() {
    for r in basic_rotations(0.0) {
        assert_eq!(r.0, Matrix3::identity());
    }
    let v = RotationMatrix::about_z(FRAC_PI_2).apply(&Vector3::new(1.0, 0.0, 0.0));
    assert!((v - Vector3::new(0.0, 1.0, 0.0)).amax() < 1e-15);
}

#[test]
fn composed_rotation_examples() {
    assert_eq!(
        compose_rotation(OrientationAngles::aligned()).0,
        Matrix3::identity()
    );
    let r = compose_rotation(OrientationAngles::new(FRAC_PI_2, 0.0));
    let row = r.0.row(0);
    assert!(row[0].abs() < 1e-15 && row[1] == 0.0 && (row[2] - 1.0).abs() < 1e-15);
}

#[test]
fn basis_at_horizon() {
    let (et, ep) = spherical_basis(FRAC_PI_2, 0.0);
    assert!((et - Vector3::new(0.0, 0.0, -1.0)).amax() < 1e-15);
    assert!((ep - Vector3::new(0.0, 1.0, 0.0)).amax() < 1e-15);
}

#[test]
fn aligned_frames_have_unit_transform() {
    let t = orientation_transform((1.1, 0.4), (1.1, 0.4), &RotationMatrix::identity());
    assert!((t.cos_psi - 1.0).abs() < 1e-15 && t.sin_psi.abs() < 1e-15);
}

#[test]
fn pathloss_at_one_metre() {
    let h = pathloss(1.0, 3.5e9, LosMode::Los, 0.2).unwrap();
    let expected = SPEED_OF_LIGHT / (4.0 * PI * 3.5e9);
    assert_eq!(h, expected);
    assert!((h - 6.82e-3).abs() < 5e-6);
}

#[test]
fn doubling_distance_costs_six_db() {
    let a = pathloss(10.0, 3.5e9, LosMode::Los, 0.2).unwrap();
    let b = pathloss(20.0, 3.5e9, LosMode::Los, 0.2).unwrap();
    let db = 20.0 * (a / b).log10();
    assert!((db - 6.0206).abs() < 1e-4, "{db}");
}

#[test]
fn single_ray_norm_ignores_orientation() {
    let mut cfg = ScenarioConfig::default();
    cfg.channel.scatterer_density = 0.0;
    let user = Vector3::new(120.0, 90.0, 1.5);
    let field = ScattererField::empty();
    let a = synthesize_channel(&cfg, 0, &user, OrientationAngles::aligned(), &field, 0.0).unwrap();
    let b = synthesize_channel(
        &cfg,
        0,
        &user,
        OrientationAngles::new(1.2, 2.5),
        &field,
        0.0,
    )
    .unwrap();
    assert!((a.frobenius_norm() - b.frobenius_norm()).abs() <= 1e-12 * a.frobenius_norm());
    assert!((&a.entries - &b.entries).iter().any(|x| x.norm() > 1e-6));
    assert_eq!(a.rank(1e-9), 1);
}

#[test]
fn channel_is_deterministic() {
    let cfg = ScenarioConfig::default();
    let field = ScattererField::generate(&cfg, cfg.channel.scatterer_density).unwrap();
    let user = Vector3::new(150.0, 100.0, 1.5);
    let o = OrientationAngles::new(0.3, 4.0);
    let a = synthesize_channel(&cfg, 0, &user, o, &field, 0.01).unwrap();
    let b = synthesize_channel(&cfg, 0, &user, o, &field, 0.01).unwrap();
    assert_eq!(a, b);
}

fn angle() -> impl Strategy<Value = f64> {
    -10.0f64..10.0
}

proptest! {
    #[test]
    fn rotations_are_proper(theta in angle()) {
        for r in basic_rotations(theta) {
            prop_assert!(r.orthonormality_error() <= 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() <= 1e-12);
        }
        let back = RotationMatrix::about_x(theta).compose(&RotationMatrix::about_x(-theta));
        prop_assert!((back.0 - Matrix3::identity()).amax() <= 1e-12);
    }

    #[test]
    fn composed_rotation_matches_product(theta0 in 0.0..PI, phi0 in 0.0..TAU) {
        let o = OrientationAngles::new(theta0, phi0);
        let r = compose_rotation(o);
        let p = RotationMatrix::about_z(phi0).compose(&RotationMatrix::about_y(theta0));
        prop_assert!((r.0 - p.0).amax() <= 1e-12);
        prop_assert!(r.orthonormality_error() <= 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn basis_is_orthonormal(theta in angle(), phi in angle()) {
        let (et, ep) = spherical_basis(theta, phi);
        prop_assert!(et.dot(&ep).abs() <= 1e-12);
        prop_assert!((et.norm() - 1.0).abs() <= 1e-12);
        prop_assert!((ep.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn closed_form_matches_bilinear(
        theta0 in 0.0..PI, phi0 in 0.0..TAU,
        theta in 0.0..PI, phi in angle(),
        theta_l in 0.0..PI, phi_l in angle(),
    ) {
        let o = OrientationAngles::new(theta0, phi0);
        let a = orientation_transform((theta, phi), (theta_l, phi_l), &compose_rotation(o));
        let b = OrientationTransform::closed_form((theta, phi), (theta_l, phi_l), o);
        prop_assert!((a.cos_psi - b.cos_psi).abs() <= 1e-9);
        prop_assert!((a.sin_psi - b.sin_psi).abs() <= 1e-9);
    }

    #[test]
    fn transform_is_a_rotation_for_consistent_angles(
        theta0 in 0.0..PI, phi0 in 0.0..TAU, theta in 0.05..3.09, phi in angle(),
    ) {
        let r = compose_rotation(OrientationAngles::new(theta0, phi0));
        let lcs = lcs_angles(&r, theta, phi);
        let t = orientation_transform((theta, phi), lcs, &r);
        prop_assert!((t.cos_psi.powi(2) + t.sin_psi.powi(2) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn pathloss_decreases_and_nlos_is_weaker(d in 1.0f64..1000.0, step in 0.01f64..100.0) {
        let near = pathloss(d, 3.5e9, LosMode::Los, 0.2).unwrap();
        let far = pathloss(d + step, 3.5e9, LosMode::Los, 0.2).unwrap();
        prop_assert!(far < near);
        prop_assert!(pathloss(d, 3.5e9, LosMode::Nlos, 0.2).unwrap() < near);
    }

    #[test]
    fn los_channel_carries_more_expected_energy(x in 60.0f64..190.0, y in 60.0f64..190.0, t in 0.0f64..1.0) {
        let los = ScenarioConfig::default();
        let mut nlos = los.clone();
        nlos.channel.los_mode = LosMode::Nlos;
        nlos.channel.nlos_excess_exponent = 0.0;
        let field = ScattererField::generate(&los, los.channel.scatterer_density).unwrap();
        let p = Vector3::new(x, y, 1.5);
        let o = OrientationAngles::aligned();
        let a = synthesize_channel(&los, 0, &p, o, &field, t).unwrap();
        let b = synthesize_channel(&nlos, 0, &p, o, &field, t).unwrap();
        prop_assert!(a.pathloss_amplitude == b.pathloss_amplitude);
        // The coherent norm can drop when the direct ray cancels scatterer
        // paths; the phase-averaged power E‖H‖² = N_tx·N_rx·Σ|α|² cannot.
        let rays = |cfg: &ScenarioConfig| LinkRays::new(cfg, 0, &p, o, &field, t).unwrap();
        let power = |r: &LinkRays| r.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        prop_assert!(power(&rays(&los)) > power(&rays(&nlos)));
    }
}
