use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cran_rf::forest::{self, Dataset, ForestModel};
use cran_rf::harness::{
    self, checks, default_grid, dimensioning_table, forest_params, generate_training_data,
    ExperimentMode, ExperimentSpec, OrientationTraining, TrainingSpec,
};
use cran_rf::{Error, Result, ScenarioConfig, System};

#[derive(Parser)]
#[command(
    name = "cran-rf",
    version,
    about = "Cloud-RAN resource-allocation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario configuration file (TOML); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the geometry and training seeds.
    #[arg(long)]
    seed: Option<u64>,
    /// Training samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Evaluation drops.
    #[arg(long)]
    drops: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled training dataset.
    GenData {
        #[command(flatten)]
        common: Common,
        /// Position-noise radius of the reported positions, metres.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// aligned, embedded or explicit.
        #[arg(long, default_value = "aligned")]
        orientation: String,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a forest, from a dataset file or from freshly generated data.
    Train {
        #[command(flatten)]
        common: Common,
        /// Dataset CSV from gen-data; generated in memory when omitted.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Output model file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Four-scheme comparison, optionally with a saved model.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Saved model; trained in memory when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Output directory for the report.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one experiment of the matrix.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Experiment name, e.g. scheme_comparison or position_noise.
        #[arg(long)]
        mode: String,
        /// Report directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Forest dimensioning study.
    Dimension {
        #[command(flatten)]
        common: Common,
        /// Report directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run experiments, write reports and check them; nonzero exit when a
    /// check fails.
    Report {
        #[command(flatten)]
        common: Common,
        /// Single experiment; all of them when omitted.
        #[arg(long)]
        mode: Option<String>,
        /// Report directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(c: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &c.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.geometry.rng_seed = s;
        cfg.experiment.train_seed = s;
    }
    if let Some(n) = c.samples {
        cfg.experiment.training_samples = n;
    }
    if let Some(d) = c.drops {
        cfg.experiment.eval_drops = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_orientation(s: &str) -> Result<OrientationTraining> {
    match s {
        "aligned" => Ok(OrientationTraining::Aligned),
        "embedded" => Ok(OrientationTraining::Embedded),
        "explicit" => Ok(OrientationTraining::ExplicitFeature),
        _ => Err(Error::Argument(format!(
            "unknown orientation training '{s}'"
        ))),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

/// Runs `mode`, writes its report and returns the checks.
fn run_mode(sys: &System, mode: ExperimentMode, out: &Path) -> Result<Vec<checks::Check>> {
    let spec = ExperimentSpec::from_config(sys.cfg(), mode);
    if mode == ExperimentMode::Dimensioning {
        let rows = harness::run_dimensioning(sys, &spec)?;
        create_dir(out)?;
        let path = out.join("dimensioning.txt");
        std::fs::write(&path, dimensioning_table(&rows))
            .map_err(|e| Error::Io { path, source: e })?;
        return Ok(checks::dimensioning(&rows));
    }
    let report = harness::run(sys, &spec)?;
    report.write(out)?;
    print!("{}", report.to_table());
    Ok(match mode {
        ExperimentMode::SchemeComparison => checks::scheme_comparison(&report),
        ExperimentMode::OverheadSweep => {
            checks::overhead_sweep(&report, &sys.overhead, &sys.cfg().experiment.user_counts)
        }
        ExperimentMode::PositionNoise => checks::position_noise(&report),
        ExperimentMode::ScattererSweep => checks::scatterer_sweep(&report),
        ExperimentMode::Orientation => checks::orientation(&report),
        ExperimentMode::Nlos => checks::nlos(&report),
        ExperimentMode::Dimensioning => unreachable!(),
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenData {
            common,
            noise,
            orientation,
            out,
        } => {
            let cfg = load_config(&common)?;
            let sys = System::new(cfg)?;
            let grid = default_grid(&sys)?;
            let e = &sys.cfg().experiment;
            let spec = TrainingSpec {
                noise_radius: noise,
                orientation: parse_orientation(&orientation)?,
                ..TrainingSpec::clean(e.training_samples, e.train_seed)
            };
            let ds = generate_training_data(&sys, &grid, &spec)?;
            ds.save_csv(&out)?;
            println!("wrote {} samples to {}", ds.len(), out.display());
        }
        Command::Train { common, data, out } => {
            let cfg = load_config(&common)?;
            let ds = match data {
                Some(p) => Dataset::load_csv(p)?,
                None => {
                    let sys = System::new(cfg.clone())?;
                    let grid = default_grid(&sys)?;
                    let e = &cfg.experiment;
                    generate_training_data(
                        &sys,
                        &grid,
                        &TrainingSpec::clean(e.training_samples, e.train_seed),
                    )?
                }
            };
            let model = forest::train(&ds, &forest_params(&cfg, cfg.experiment.train_seed))?;
            model.save(&out)?;
            println!(
                "trained {} trees on {} samples -> {}",
                model.t_n,
                ds.len(),
                out.display()
            );
        }
        Command::Eval { common, model, out } => {
            let sys = System::new(load_config(&common)?)?;
            let spec = ExperimentSpec::from_config(sys.cfg(), ExperimentMode::SchemeComparison);
            let model = model.map(ForestModel::load).transpose()?;
            let report = harness::run_scheme_comparison(&sys, &spec, model.as_ref())?;
            report.write(&out)?;
            print!("{}", report.to_table());
        }
        Command::Sweep { common, mode, out } => {
            let sys = System::new(load_config(&common)?)?;
            run_mode(&sys, mode.parse()?, &out)?;
        }
        Command::Dimension { common, out } => {
            let sys = System::new(load_config(&common)?)?;
            run_mode(&sys, ExperimentMode::Dimensioning, &out)?;
            print!(
                "{}",
                std::fs::read_to_string(out.join("dimensioning.txt")).unwrap_or_default()
            );
        }
        Command::Report { common, mode, out } => {
            let sys = System::new(load_config(&common)?)?;
            let modes = match mode {
                Some(m) => vec![m.parse()?],
                None => ExperimentMode::ALL.to_vec(),
            };
            let mut all_passed = true;
            let mut summary = String::new();
            for m in modes {
                for c in run_mode(&sys, m, &out)? {
                    all_passed &= c.passed;
                    summary.push_str(&format!("[{m}] {c}\n"));
                }
            }
            print!("{summary}");
            let path = out.join("checks.txt");
            std::fs::write(&path, &summary).map_err(|e| Error::Io { path, source: e })?;
            return Ok(all_passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
