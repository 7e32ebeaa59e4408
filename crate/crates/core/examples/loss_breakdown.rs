//! Splits the learning scheme's loss under position noise into the part
//! caused by grid beams looked up at the reported position and the part
//! caused by CQI prediction.
//!
//! `cargo run --release --example loss_breakdown -- [config.toml] [drops]`

use cran_rf::harness::{condition_drop, default_grid};
use cran_rf::scenario::FilterDeploy;
use cran_rf::scenario::OrientationMode;
use cran_rf::schemes::{csi_allocate_drop, deployed_filters, sum_goodput, DropChannels};
use cran_rf::{ScenarioConfig, System};

fn main() -> cran_rf::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let cfg = match args.get(1) {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    let drops: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let sys = System::new(cfg)?;
    let grid = default_grid(&sys)?;
    println!("{:>8} {:>14}", "radius_m", "grid_exact/csi");
    for radius in [0.0, 0.5, 1.0, 2.0, 3.0, 5.0] {
        let (mut csi, mut exact) = (0.0, 0.0);
        for k in 0..drops {
            let drop = condition_drop(
                &sys,
                &sys.scenario.sample_drop(k),
                radius,
                OrientationMode::Aligned,
                1,
            )?;
            let ch = DropChannels::of_drop(&sys, &drop)?;
            csi += sum_goodput(&csi_allocate_drop(&sys, &drop, &ch));
            let entry = grid.lookup(&sys, &drop.reported_positions)?;
            let cqi = ch.exact_cqis(&sys, &entry.tx, &entry.rx);
            exact += sum_goodput(&ch.realize(&sys, &entry.tx, &entry.rx, &cqi));
        }
        println!("{radius:>8} {:>14.4}", exact / csi);
    }
    println!("random orientation, exact positions");
    for deploy in [FilterDeploy::Grid, FilterDeploy::Reaimed] {
        let (mut csi, mut exact) = (0.0, 0.0);
        for k in 0..drops {
            let drop = condition_drop(
                &sys,
                &sys.scenario.sample_drop(k),
                0.0,
                OrientationMode::Random,
                1,
            )?;
            let ch = DropChannels::of_drop(&sys, &drop)?;
            csi += sum_goodput(&csi_allocate_drop(&sys, &drop, &ch));
            let entry = grid.lookup(&sys, &drop.reported_positions)?;
            let rx = deployed_filters(&sys, &entry, &drop, deploy);
            let cqi = ch.exact_cqis(&sys, &entry.tx, &rx);
            exact += sum_goodput(&ch.realize(&sys, &entry.tx, &rx, &cqi));
        }
        println!("{deploy:?} {:>14.4}", exact / csi);
    }
    Ok(())
}
