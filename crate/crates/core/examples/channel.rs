//! Ray channel of one link: pathloss, rays and the resulting gain matrix.
//!
//! `cargo run --example channel -- [x] [y] [LOS|NLOS]`

use nalgebra::Vector3;

use cran_rf::channel::{synthesize_channel, LinkRays};
use cran_rf::scenario::{LosMode, ScattererField};
use cran_rf::{OrientationAngles, ScenarioConfig};

fn main() -> cran_rf::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let x: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(120.0);
    let y: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(90.0);
    let mut cfg = ScenarioConfig::default();
    if args.get(2).map(String::as_str) == Some("NLOS") {
        cfg.channel.los_mode = LosMode::Nlos;
    }
    let field = ScattererField::generate(&cfg, cfg.channel.scatterer_density)?;
    let user = Vector3::new(x, y, cfg.geometry.user_height_m);
    let o = OrientationAngles::aligned();

    let rays = LinkRays::new(&cfg, 0, &user, o, &field, 0.0)?;
    println!(
        "{} scatterers, {} rays, pathloss amplitude {:.3e}",
        field.len(),
        rays.len(),
        rays.pathloss_amplitude
    );
    println!(
        "{:>4} {:>10} {:>10} {:>10}",
        "ray", "|alpha|", "tx_cos", "rx_deg"
    );
    let mut order: Vec<usize> = (0..rays.len()).collect();
    order.sort_by(|&a, &b| {
        rays.amplitudes[b]
            .norm()
            .total_cmp(&rays.amplitudes[a].norm())
    });
    for &i in order.iter().take(8) {
        println!(
            "{i:>4} {:>10.4} {:>10.4} {:>10.2}",
            rays.amplitudes[i].norm(),
            rays.tx_cosines[i],
            rays.rx_angles[i].to_degrees()
        );
    }

    let h = synthesize_channel(&cfg, 0, &user, o, &field, 0.0)?;
    println!(
        "H is {}x{}, Frobenius norm {:.4}, rank {}",
        h.entries.nrows(),
        h.entries.ncols(),
        h.frobenius_norm(),
        h.rank(1e-6)
    );
    println!(
        "AoD {:.2} deg, AoA {:.2} deg",
        h.aod_azimuth.to_degrees(),
        h.aoa_azimuth.to_degrees()
    );
    Ok(())
}
