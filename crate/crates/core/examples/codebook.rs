//! Steering-vector codebooks and the beamformed power of every beam toward
//! one user.
//!
//! `cargo run --example codebook -- [x] [y]`

use nalgebra::Vector3;

use cran_rf::channel::synthesize_channel;
use cran_rf::codebook::{beamformed_power, nearest_beam};
use cran_rf::{OrientationAngles, ScenarioConfig, System};

fn main() -> cran_rf::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let sys = System::new(ScenarioConfig::default())?;
    let cfg = sys.cfg();
    let user = Vector3::new(
        args.first().copied().unwrap_or(150.0),
        args.get(1).copied().unwrap_or(70.0),
        cfg.geometry.user_height_m,
    );
    println!(
        "{} transmit beams ({} antennas), {} receive filters ({} antennas)",
        sys.tx_codebook.len(),
        sys.tx_codebook.n_antennas(),
        sys.rx_codebook.len(),
        sys.rx_codebook.n_antennas()
    );
    let h = synthesize_channel(cfg, 0, &user, OrientationAngles::aligned(), &sys.field, 0.0)?;
    let geometric = nearest_beam(&sys.tx_codebook, sys.tx_bearing(0, &user));
    let u = &sys.rx_codebook.vectors[nearest_beam(&sys.rx_codebook, h.aoa_azimuth)];
    let powers: Vec<f64> = sys
        .tx_codebook
        .vectors
        .iter()
        .map(|v| beamformed_power(&h.entries, v, u, cfg.radio.tx_power_w, h.pathloss_amplitude))
        .collect::<cran_rf::Result<_>>()?;
    let best = (0..powers.len())
        .max_by(|&a, &b| powers[a].total_cmp(&powers[b]))
        .unwrap_or(0);
    println!("geometric beam {geometric}, strongest beam {best}");
    for (k, p) in powers
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.01 * powers[best])
    {
        let dbm = 10.0 * (p * 1e3).log10();
        println!(
            "beam {k:>3} at {:>7.2} deg: {dbm:>8.2} dBm",
            sys.tx_codebook.angles[k].to_degrees()
        );
    }
    Ok(())
}
