//! Generates labelled samples from the scenario, trains a forest, reports
//! its accuracy and round-trips it through a model file.
//!
//! `cargo run --release --example forest -- [samples] [trees] [depth]`

use cran_rf::forest::{self, accuracy, ForestModel, TrainParams};
use cran_rf::harness::{default_grid, generate_training_data, TrainingSpec};
use cran_rf::{ScenarioConfig, System};

fn main() -> cran_rf::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let samples = args.first().copied().unwrap_or(8_000);
    let t_n = args.get(1).copied().unwrap_or(50);
    let t_d = args.get(2).copied().unwrap_or(10);
    let sys = System::new(ScenarioConfig::default())?;
    let grid = default_grid(&sys)?;
    let ds = generate_training_data(&sys, &grid, &TrainingSpec::clean(samples, 1))?;
    println!("{} samples, features {:?}", ds.len(), ds.feature_names);
    println!("label histogram {:?}", ds.class_histogram());
    let (train, test) = ds.split(0.8);
    let model = forest::train(
        &train,
        &TrainParams::new(t_n, t_d, sys.cfg().forest.m_try, 1),
    )?;
    println!(
        "train accuracy {:.4}, test accuracy {:.4}",
        accuracy(&model, &train)?,
        accuracy(&model, &test)?
    );
    let path = std::env::temp_dir().join("cran-rf-example-model.txt");
    model.save(&path)?;
    let back = ForestModel::load(&path)?;
    println!(
        "reloaded {} trees from {}: identical = {}",
        back.trees.len(),
        path.display(),
        back == model
    );
    for x in test.features.iter().take(5) {
        println!("{x:?} -> CQI {}", back.predict(x)?);
    }
    Ok(())
}
