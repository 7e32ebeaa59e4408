//! Runs one experiment of the matrix and prints its report and checks.
//!
//! `cargo run --release --example experiment -- <mode> [config.toml]`
//!
//! Modes: scheme_comparison, overhead_sweep, position_noise,
//! scatterer_sweep, orientation, nlos, dimensioning.

use cran_rf::harness::{self, checks, dimensioning_table, ExperimentMode, ExperimentSpec};
use cran_rf::{ScenarioConfig, System};

fn main() -> cran_rf::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mode: ExperimentMode = args
        .first()
        .map_or("scheme_comparison", String::as_str)
        .parse()?;
    let cfg = match args.get(1) {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    let sys = System::new(cfg)?;
    let spec = ExperimentSpec::from_config(sys.cfg(), mode);
    let found = if mode == ExperimentMode::Dimensioning {
        let rows = harness::run_dimensioning(&sys, &spec)?;
        print!("{}", dimensioning_table(&rows));
        checks::dimensioning(&rows)
    } else {
        let report = harness::run(&sys, &spec)?;
        print!("{}", report.to_table());
        match mode {
            ExperimentMode::SchemeComparison => checks::scheme_comparison(&report),
            ExperimentMode::OverheadSweep => {
                checks::overhead_sweep(&report, &sys.overhead, &sys.cfg().experiment.user_counts)
            }
            ExperimentMode::PositionNoise => checks::position_noise(&report),
            ExperimentMode::ScattererSweep => checks::scatterer_sweep(&report),
            ExperimentMode::Orientation => checks::orientation(&report),
            ExperimentMode::Nlos => checks::nlos(&report),
            ExperimentMode::Dimensioning => unreachable!(),
        }
    };
    for c in found {
        println!("{c}");
    }
    Ok(())
}
