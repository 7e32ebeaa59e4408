//! All four schedulers on a single drop, user by user.
//!
//! `cargo run --release --example allocate_drop -- [drop_index] [noise_radius_m]`

use cran_rf::harness::{default_grid, train_model, TrainingSpec};
use cran_rf::scenario::inject_position_noise;
use cran_rf::schemes::{
    csi_allocate_drop, geometric_allocate, learning_allocate, random_packet_allocate, sum_goodput,
    AllocationDecision, DropChannels, LearningOptions,
};
use cran_rf::{ScenarioConfig, System};

fn show(name: &str, decisions: &[AllocationDecision]) {
    println!("{name} ({:.1} Mbit/s)", sum_goodput(decisions) / 1e6);
    for d in decisions {
        println!(
            "  user {} beam {:>3} filter {:>3} cqi {:>2} sinr {:>7.2} dB goodput {:>8.2} Mbit/s",
            d.user,
            d.tx_beam,
            d.rx_filter,
            d.cqi,
            d.sinr_db,
            d.realized_goodput / 1e6
        );
    }
}

fn main() -> cran_rf::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let index: u64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0);
    let radius: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let sys = System::new(ScenarioConfig::default())?;
    let grid = default_grid(&sys)?;
    let model = train_model(&sys, &grid, &TrainingSpec::clean(8_000, 1))?;

    let drop = inject_position_noise(&sys.scenario.sample_drop(index), radius, 1)?;
    for (u, (t, r)) in drop
        .true_positions
        .iter()
        .zip(&drop.reported_positions)
        .enumerate()
    {
        println!(
            "user {u}: true ({:.1}, {:.1}) reported ({:.1}, {:.1})",
            t.x, t.y, r.x, r.y
        );
    }
    let ch = DropChannels::of_drop(&sys, &drop)?;
    show("csi", &csi_allocate_drop(&sys, &drop, &ch));
    show(
        "learning",
        &learning_allocate(&model, &grid, &drop, &sys, &ch, LearningOptions::default())?,
    );
    show(
        "random_packet",
        &random_packet_allocate(&grid, &drop, &sys, &ch, 1)?,
    );
    show("geometric", &geometric_allocate(&drop, &sys, &ch, 1));
    Ok(())
}
