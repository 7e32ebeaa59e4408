use proptest::prelude::*;

use cran_rf::link::{
    bler, cqi_from_sinr, goodput, overhead_csi, overhead_position, packet_size, sinr, LinkBudget,
    McsTable, OverheadConfig, LTE_SPECTRAL_EFFICIENCY, SHANNON_FRACTION,
};
use cran_rf::Error;

#[test]
fn sinr_examples() {
    assert_eq!(sinr(&LinkBudget::new(2.0, vec![1.0], 1.0).unwrap()), 1.0);
    assert_eq!(sinr(&LinkBudget::new(4.0, vec![], 2.0).unwrap()), 2.0);
}

#[test]
fn thresholds_follow_the_shannon_fraction() {
    // Independent oracle: the SINR at which 0.75·log2(1 + γ) reaches the
    // level's spectral efficiency.
    let t = McsTable::default();
    for (row, se) in t.rows().iter().zip(LTE_SPECTRAL_EFFICIENCY) {
        let gamma = 2f64.powf(se / SHANNON_FRACTION) - 1.0;
        let db = 10.0 * gamma.log10();
        assert!(
            (row.sinr_threshold_db - db).abs() <= 5e-5,
            "CQI {}",
            row.cqi
        );
        assert_eq!(row.spectral_efficiency, se);
    }
}

#[test]
fn payload_examples() {
    let t = McsTable::default();
    assert_eq!(packet_size(0, &t, 200e6, 0.2e-3, 0.0).unwrap(), 0.0);
    let full = packet_size(9, &t, 200e6, 0.2e-3, 0.0).unwrap();
    let half = packet_size(9, &t, 200e6, 0.2e-3, 0.5).unwrap();
    assert!((half - full / 2.0).abs() <= 1e-9 * full);
    assert!(matches!(
        packet_size(9, &t, 200e6, 0.2e-3, 1.0),
        Err(Error::Argument(_))
    ));
}

#[test]
fn bler_limits() {
    let t = McsTable::default();
    let th = t.row(5).unwrap().sinr_threshold_db;
    assert!((bler(5, th, &t) - 0.1).abs() < 1e-12);
    assert!(bler(5, th + 100.0, &t) < 1e-50);
    assert_eq!(bler(5, th - 20.0, &t), 1.0);
}

#[test]
fn goodput_examples() {
    assert!((goodput(10_000.0, 0.1, 0.2e-3).unwrap() - 45e6).abs() < 1e-6);
    assert_eq!(goodput(10_000.0, 1.0, 0.2e-3).unwrap(), 0.0);
    assert_eq!(goodput(10_000.0, 0.0, 0.2e-3).unwrap(), 5e7);
}

#[test]
fn overhead_examples() {
    let cfg = OverheadConfig::default();
    assert!((overhead_position(&cfg, 1).unwrap() - 24.0 / 84_000.0).abs() < 1e-15);
    assert_eq!(
        overhead_position(&cfg, 1).unwrap(),
        overhead_position(&cfg, 12).unwrap()
    );
    assert!((overhead_csi(&cfg, 1).unwrap() - 1.0 / 70.0).abs() < 1e-15);
    let oh25 = overhead_csi(&cfg, 25).unwrap();
    assert!((0.40..=0.50).contains(&oh25), "{oh25}");
}

#[test]
fn overheads_are_bounded_and_ordered() {
    let cfg = OverheadConfig::default();
    let mut prev = (0.0, 0.0);
    for n in 1..=30 {
        let p = overhead_position(&cfg, n).unwrap();
        let c = overhead_csi(&cfg, n).unwrap();
        assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&c));
        assert!(c >= p, "n = {n}");
        assert!(p >= prev.0 && c >= prev.1);
        prev = (p, c);
    }
    // CSI grows at least one symbol per user; positioning only per group.
    let slope_csi = overhead_csi(&cfg, 30).unwrap() - overhead_csi(&cfg, 1).unwrap();
    let slope_pos = overhead_position(&cfg, 30).unwrap() - overhead_position(&cfg, 1).unwrap();
    assert!(slope_csi >= 29.0 / 70.0 && slope_csi > 10.0 * slope_pos);
}

#[test]
fn table_round_trip_and_version() {
    let t = McsTable::default();
    let back = McsTable::parse(&t.to_text(), "mem").unwrap();
    assert_eq!(t, back);
    let bumped = t.to_text().replacen("version=1", "version=2", 1);
    assert!(matches!(
        McsTable::parse(&bumped, "mem"),
        Err(Error::Version { found: 2, .. })
    ));
    let extra = t.to_text().replacen("version=1", "version=1 colour=3", 1);
    assert!(matches!(
        McsTable::parse(&extra, "mem"),
        Err(Error::Parse { .. })
    ));
}

proptest! {
    #[test]
    fn removing_an_interferer_never_lowers_sinr(
        p in 0.0f64..10.0,
        inter in proptest::collection::vec(0.0f64..5.0, 1..6),
        noise in 0.01f64..3.0,
        drop in 0usize..6,
    ) {
        let full = sinr(&LinkBudget::new(p, inter.clone(), noise).unwrap());
        let mut fewer = inter.clone();
        fewer.remove(drop % inter.len());
        prop_assert!(sinr(&LinkBudget::new(p, fewer, noise).unwrap()) >= full);
    }

    #[test]
    fn cqi_is_monotone(a in -30.0f64..40.0, b in -30.0f64..40.0) {
        let t = McsTable::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(cqi_from_sinr(lo, &t) <= cqi_from_sinr(hi, &t));
        prop_assert!(cqi_from_sinr(hi, &t) <= 15);
    }

    #[test]
    fn goodput_never_exceeds_payload_rate(ps in 0.0f64..1e6, b in 0.0f64..=1.0, tti in 1e-4f64..1e-2) {
        let g = goodput(ps, b, tti).unwrap();
        prop_assert!(g <= ps / tti);
        if b == 0.0 {
            prop_assert_eq!(g, ps / tti);
        }
    }

    #[test]
    fn bler_is_a_probability_decreasing_in_sinr(cqi in 1u8..=15, s in -30.0f64..40.0, m in 0.0f64..10.0) {
        let t = McsTable::default();
        let a = bler(cqi, s, &t);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(bler(cqi, s + m, &t) <= a);
    }
}
