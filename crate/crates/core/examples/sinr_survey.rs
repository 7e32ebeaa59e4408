//! SINR and CQI statistics of the CSI scheme over evaluation drops.
//!
//! `cargo run --release --example sinr_survey -- [config.toml] [drops]`

use cran_rf::schemes::{csi_allocate_drop, DropChannels};
use cran_rf::{ScenarioConfig, System};

fn main() -> cran_rf::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let cfg = match args.get(1) {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    let drops: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let sys = System::new(cfg)?;
    let mut hist = [0usize; 16];
    let mut rows = Vec::new();
    for k in 0..drops {
        let drop = sys.scenario.sample_drop(k);
        let ch = DropChannels::of_drop(&sys, &drop)?;
        for d in csi_allocate_drop(&sys, &drop, &ch) {
            hist[d.cqi as usize] += 1;
            let p = drop.true_positions[d.user];
            let dist = (p - sys.cfg().rrh_position(d.rrh)).norm();
            rows.push((dist, d.sinr_db));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!("CQI histogram: {hist:?}");
    println!("{:>10} {:>12}", "distance_m", "mean_sinr_db");
    for chunk in rows.chunks(rows.len().div_ceil(10).max(1)) {
        let d = chunk.iter().map(|r| r.0).sum::<f64>() / chunk.len() as f64;
        let s = chunk.iter().map(|r| r.1).sum::<f64>() / chunk.len() as f64;
        println!("{d:>10.2} {s:>12.2}");
    }
    Ok(())
}
