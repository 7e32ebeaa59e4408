use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cran_rf::codebook::{
    beamformed_power, build_codebook, nearest_beam, steering_vector, wrapped_distance,
};
use cran_rf::harness::{default_grid, forest_params, generate_training_data, TrainingSpec};
use cran_rf::link::cqi_from_sinr;
use cran_rf::scenario::inject_position_noise;
use cran_rf::schemes::{
    csi_allocate, csi_allocate_drop, expected_random_goodput, geometric_allocate, geometric_beams,
    joint_search, learning_allocate, orientation_solution2, random_packet_allocate, sum_goodput,
    DropChannels, LearningOptions, Propagation, SearchSpace,
};
use cran_rf::{forest, Error, OrientationAngles, ScenarioConfig, System};

fn system() -> System {
    System::new(ScenarioConfig::default()).unwrap()
}

#[test]
fn codebook_examples() {
    let v = steering_vector(8, 0.0);
    for x in v.iter() {
        assert!((x - Complex64::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-15);
    }
    let cb = build_codebook(8, 3f64.to_radians(), (0.0, TAU)).unwrap();
    assert_eq!(cb.len(), 120);
    for v in &cb.vectors {
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn nearest_beam_examples() {
    let cb = build_codebook(8, 3f64.to_radians(), (0.0, TAU)).unwrap();
    for k in [0, 7, 119] {
        assert_eq!(nearest_beam(&cb, cb.angles[k]), k);
    }
    let mid = (cb.angles[10] + cb.angles[11]) / 2.0;
    assert_eq!(nearest_beam(&cb, mid), 10);
}

#[test]
fn beamformed_power_examples() {
    // H with a known dominant singular pair.
    let h = DMatrix::from_fn(2, 3, |i, j| {
        Complex64::new(if i == j { [3.0, 1.0][i] } else { 0.0 }, 0.0)
    });
    let v = DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ]);
    let u = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    assert!((beamformed_power(&h, &v, &u, 2.0, 0.5).unwrap() - 2.0 * 0.25 * 9.0).abs() < 1e-12);
    let u_perp = DVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
    assert_eq!(beamformed_power(&h, &v, &u_perp, 2.0, 0.5).unwrap(), 0.0);
    let short = DVector::from_vec(vec![Complex64::new(1.0, 0.0)]);
    assert!(matches!(
        beamformed_power(&h, &short, &u, 1.0, 1.0),
        Err(Error::Argument(_))
    ));
}

#[test]
fn beamformed_power_matches_scalar_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    for _ in 0..100 {
        let h = DMatrix::from_fn(2, 4, |_, _| c());
        let v = DVector::from_fn(4, |_, _| c());
        let u = DVector::from_fn(2, |_, _| c());
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..4 {
                acc += u[i].conj() * h[(i, j)] * v[j];
            }
        }
        let expected = 1.5 * 0.1f64.powi(2) * acc.norm_sqr();
        let got = beamformed_power(&h, &v, &u, 1.5, 0.1).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected.max(1e-30));
    }
}

#[test]
fn solution2_examples() {
    let sys = system();
    let cb = &sys.rx_codebook;
    for f in [0, 5, 17] {
        assert_eq!(
            orientation_solution2(f, OrientationAngles::aligned(), cb),
            f
        );
        let step = OrientationAngles::new(0.0, cb.angular_step);
        let shifted = orientation_solution2(f, step, cb);
        assert_eq!((shifted + 1) % cb.len(), f);
        let back = orientation_solution2(
            shifted,
            OrientationAngles::new(0.0, TAU - cb.angular_step),
            cb,
        );
        assert_eq!(back, f);
    }
}

#[test]
fn geometric_beams_follow_bearings() {
    let sys = system();
    let drop = sys.scenario.sample_drop(4);
    let (tx, _) = geometric_beams(&sys, &drop);
    for (m, &b) in tx.iter().enumerate() {
        let bearing = sys.tx_bearing(m, &drop.true_positions[m]);
        let d = wrapped_distance(sys.tx_codebook.angles[b], bearing);
        assert!(d <= sys.tx_codebook.angular_step / 2.0 + 1e-9);
    }
}

fn brute_force_goodput(sys: &System, ch: &DropChannels, space: &SearchSpace) -> f64 {
    let n = ch.n_users();
    let mut best = f64::NEG_INFINITY;
    let tx_count: usize = space.tx.iter().map(Vec::len).product();
    let rx_count: usize = space.rx.iter().map(Vec::len).product();
    for t in 0..tx_count {
        let mut rest = t;
        let tx: Vec<usize> = (0..n)
            .map(|m| {
                let k = space.tx[m].len();
                let i = rest % k;
                rest /= k;
                space.tx[m][i]
            })
            .collect();
        for r in 0..rx_count {
            let mut rest = r;
            let rx: Vec<usize> = (0..n)
                .map(|u| {
                    let k = space.rx[u].len();
                    let i = rest % k;
                    rest /= k;
                    space.rx[u][i]
                })
                .collect();
            let total: f64 = ch
                .sinrs_db(sys, &tx, &rx)
                .iter()
                .map(|&s| sys.goodput(cqi_from_sinr(s, &sys.mcs), s))
                .sum();
            best = best.max(total);
        }
    }
    best
}

#[test]
fn joint_search_matches_brute_force() {
    let sys = system();
    for k in 0..5 {
        let drop = sys.scenario.sample_drop(k);
        let ch = DropChannels::of_drop(&sys, &drop).unwrap();
        let space =
            SearchSpace::around_geometry(&sys, &drop.true_positions, &drop.orientations, 3, 2);
        let choice = joint_search(&sys, &ch, &space, Propagation::Coherent);
        let oracle = brute_force_goodput(&sys, &ch, &space);
        assert!(
            (choice.objective.goodput - oracle).abs() <= 1e-9 * oracle.max(1.0),
            "drop {k}"
        );
        let realized = sum_goodput(&csi_allocate(&sys, &ch, &space));
        assert!((realized - oracle).abs() <= 1e-9 * oracle.max(1.0));
    }
}

#[test]
fn single_link_search_picks_the_matched_pair() {
    let mut cfg = ScenarioConfig::default();
    cfg.geometry.rrh_positions = vec![[40.0, 40.0, 10.0]];
    cfg.geometry.n_users = 1;
    let sys = System::new(cfg).unwrap();
    let drop = sys.scenario.sample_drop(0);
    let ch = DropChannels::of_drop(&sys, &drop).unwrap();
    let space = SearchSpace::full(&sys);
    let choice = joint_search(&sys, &ch, &space, Propagation::Coherent);
    let mut best = 0.0f64;
    for t in 0..sys.tx_codebook.len() {
        for r in 0..sys.rx_codebook.len() {
            best = best.max(ch.power(&sys, 0, 0, t, r, Propagation::Coherent));
        }
    }
    let chosen = ch.power(
        &sys,
        0,
        0,
        choice.tx[0],
        choice.rx[0],
        Propagation::Coherent,
    );
    let s = sys.noise_power_w;
    // Equal goodput can come from a slightly weaker pair; the Shannon
    // tie-break then picks the strongest.
    assert!(
        (chosen - best).abs() <= 1e-9 * best,
        "{chosen} vs {best} (noise {s})"
    );
}

#[test]
fn baselines_are_deterministic_and_graded_on_true_channels() {
    let sys = system();
    let grid = default_grid(&sys).unwrap();
    let drop = inject_position_noise(&sys.scenario.sample_drop(7), 4.0, 2).unwrap();
    let ch = DropChannels::of_drop(&sys, &drop).unwrap();
    let a = random_packet_allocate(&grid, &drop, &sys, &ch, 5).unwrap();
    assert_eq!(
        a,
        random_packet_allocate(&grid, &drop, &sys, &ch, 5).unwrap()
    );
    assert_eq!(
        geometric_allocate(&drop, &sys, &ch, 5),
        geometric_allocate(&drop, &sys, &ch, 5)
    );
    let tx: Vec<usize> = a.iter().map(|d| d.tx_beam).collect();
    let rx: Vec<usize> = a.iter().map(|d| d.rx_filter).collect();
    let truth = ch.sinrs_db(&sys, &tx, &rx);
    for (d, s) in a.iter().zip(truth) {
        assert_eq!(d.sinr_db, s);
        assert!((1..=15).contains(&d.cqi));
    }
}

#[test]
fn schemes_are_ordered_in_expectation() {
    let sys = system();
    let grid = default_grid(&sys).unwrap();
    let e = &sys.cfg().experiment;
    let ds =
        generate_training_data(&sys, &grid, &TrainingSpec::clean(4_000, e.train_seed)).unwrap();
    let model = forest::train(&ds, &forest_params(sys.cfg(), e.train_seed)).unwrap();
    let (mut csi, mut learning, mut random, mut geometric) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..30 {
        let drop = sys.scenario.sample_drop(k);
        let ch = DropChannels::of_drop(&sys, &drop).unwrap();
        let c = sum_goodput(&csi_allocate_drop(&sys, &drop, &ch));
        let g = sum_goodput(&geometric_allocate(&drop, &sys, &ch, 1));
        assert!(c >= g, "drop {k}: CSI {c} below geometric {g}");
        csi += c;
        geometric += g;
        learning += sum_goodput(
            &learning_allocate(&model, &grid, &drop, &sys, &ch, LearningOptions::default())
                .unwrap(),
        );
        let entry = grid.lookup(&sys, &drop.reported_positions).unwrap();
        random += expected_random_goodput(&sys, &ch, &entry.tx, &entry.rx);
    }
    assert!(csi >= learning, "{csi} vs {learning}");
    assert!(learning >= random, "{learning} vs {random}");
    assert!(csi >= geometric);
}

#[test]
fn grid_lookup_uses_the_nearest_lattice_point() {
    let sys = system();
    let grid = default_grid(&sys).unwrap();
    let drop = sys.scenario.sample_drop(9);
    let snapped: Vec<_> = drop
        .reported_positions
        .iter()
        .map(|p| grid.snap(&sys, p))
        .collect();
    let a = grid.lookup(&sys, &drop.reported_positions).unwrap();
    let b = grid.lookup(&sys, &snapped).unwrap();
    assert_eq!(*a, *b);
    for (p, q) in drop.reported_positions.iter().zip(&snapped) {
        let s = sys.cfg().scheduler.grid_spacing_m;
        assert!((p.x - q.x).abs() <= s / 2.0 + 1e-9 && (p.y - q.y).abs() <= s / 2.0 + 1e-9);
    }
}

proptest! {
    #[test]
    fn nearest_beam_is_within_half_a_step(target in -20.0f64..20.0) {
        let cb = build_codebook(8, 3f64.to_radians(), (0.0, TAU)).unwrap();
        let k = nearest_beam(&cb, target);
        prop_assert!(wrapped_distance(cb.angles[k], target) <= cb.angular_step / 2.0 + 1e-9);
        prop_assert_eq!(nearest_beam(&cb, cb.angles[k]), k);
        for (i, &a) in cb.angles.iter().enumerate() {
            prop_assert!(wrapped_distance(a, target) + 1e-9 >= wrapped_distance(cb.angles[k], target), "beam {}", i);
        }
    }

    #[test]
    fn solution2_round_trips_on_grid_steps(f in 0usize..36, steps in 0usize..36) {
        let sys = System::new(ScenarioConfig::default()).unwrap();
        let cb = &sys.rx_codebook;
        let a = steps as f64 * cb.angular_step;
        let there = orientation_solution2(f % cb.len(), OrientationAngles::new(0.0, a), cb);
        let back = orientation_solution2(there, OrientationAngles::new(0.0, (TAU - a) % TAU), cb);
        prop_assert_eq!(back, f % cb.len());
    }
}
