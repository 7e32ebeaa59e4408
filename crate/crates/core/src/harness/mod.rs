//! Experiment orchestration: training-data generation, paired evaluation of
//! all schemes over common drops, and the sweeps of the experiment matrix.

pub mod checks;
pub mod report;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forest::{self, dimensioning_sweep, Dataset, DimensionRow, ForestModel, TrainParams};
use crate::link::{overhead_csi, overhead_position};
use crate::rng::derive_seed;
use crate::scenario::{
    inject_position_noise, with_orientations, FilterDeploy, LosMode, OrientationMode,
    ScenarioConfig, UserDrop,
};
use crate::schemes::{
    build_beam_grid, csi_allocate_drop, deployed_filters, drop_features, geometric_allocate,
    learning_allocate, random_packet_allocate, sum_goodput, BeamGrid, DropChannels, FeatureMode,
    GridMode, LearningOptions,
};
use crate::system::System;

pub use report::{Report, ReportRow};

const TRAIN_DROP_FLAG: u64 = 1 << 63;
const NOISE_TAG: u64 = 0x6e6f;
const ORIENTATION_TAG: u64 = 0x6f72;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    SchemeComparison,
    OverheadSweep,
    PositionNoise,
    ScattererSweep,
    Orientation,
    Nlos,
    Dimensioning,
}

impl ExperimentMode {
    pub const ALL: [ExperimentMode; 7] = [
        ExperimentMode::SchemeComparison,
        ExperimentMode::OverheadSweep,
        ExperimentMode::PositionNoise,
        ExperimentMode::ScattererSweep,
        ExperimentMode::Orientation,
        ExperimentMode::Nlos,
        ExperimentMode::Dimensioning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentMode::SchemeComparison => "scheme_comparison",
            ExperimentMode::OverheadSweep => "overhead_sweep",
            ExperimentMode::PositionNoise => "position_noise",
            ExperimentMode::ScattererSweep => "scatterer_sweep",
            ExperimentMode::Orientation => "orientation",
            ExperimentMode::Nlos => "nlos",
            ExperimentMode::Dimensioning => "dimensioning",
        }
    }
}

impl fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentMode::ALL
            .into_iter()
            .find(|m| m.name() == s.replace('-', "_"))
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentMode::ALL.iter().map(|m| m.name()).collect();
                Error::Argument(format!(
                    "unknown mode '{s}', expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// How UE orientation enters training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationTraining {
    Aligned,
    /// Random orientations in the data, not in the features.
    Embedded,
    /// Random orientations, with the angles as features.
    ExplicitFeature,
}

impl OrientationTraining {
    pub fn feature_mode(self) -> FeatureMode {
        match self {
            OrientationTraining::ExplicitFeature => FeatureMode::WithOrientation,
            _ => FeatureMode::Position,
        }
    }

    pub fn orientation_mode(self) -> OrientationMode {
        match self {
            OrientationTraining::Aligned => OrientationMode::Aligned,
            _ => OrientationMode::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingSpec {
    pub samples: usize,
    pub noise_radius: f64,
    pub orientation: OrientationTraining,
    pub deploy: FilterDeploy,
    pub seed: u64,
}

impl TrainingSpec {
    pub fn clean(samples: usize, seed: u64) -> Self {
        TrainingSpec {
            samples,
            noise_radius: 0.0,
            orientation: OrientationTraining::Aligned,
            deploy: FilterDeploy::Grid,
            seed,
        }
    }
}

/// Everything a run needs beyond the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub mode: ExperimentMode,
    pub sweep_values: Vec<f64>,
    pub training: TrainingSpec,
    pub eval_drops: usize,
    pub seed: u64,
}

impl ExperimentSpec {
    /// Spec for `mode` with the sweep values and counts of `cfg`.
    pub fn from_config(cfg: &ScenarioConfig, mode: ExperimentMode) -> Self {
        let e = &cfg.experiment;
        let sweep_values = match mode {
            ExperimentMode::PositionNoise => e.noise_radii_m.clone(),
            ExperimentMode::Nlos => e.nlos_radii_m.clone(),
            ExperimentMode::ScattererSweep => e.scatterer_densities.clone(),
            ExperimentMode::OverheadSweep => e.user_counts.iter().map(|&n| n as f64).collect(),
            ExperimentMode::Dimensioning => e.dimension_depths.iter().map(|&d| d as f64).collect(),
            ExperimentMode::SchemeComparison | ExperimentMode::Orientation => vec![0.0],
        };
        ExperimentSpec {
            mode,
            sweep_values,
            training: TrainingSpec::clean(e.training_samples, e.train_seed),
            eval_drops: e.eval_drops,
            seed: cfg.geometry.rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep_values.is_empty() {
            return Err(Error::Config(format!("{} needs sweep values", self.mode)));
        }
        if self.training.samples == 0 || self.eval_drops == 0 {
            return Err(Error::Config(
                "sample and drop counts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Index of the `k`-th training drop of a training set. Disjoint from the
/// evaluation drops `0..eval_drops`.
pub fn training_drop_index(seed: u64, k: u64) -> u64 {
    TRAIN_DROP_FLAG | (derive_seed(seed, &[k]) >> 1)
}

/// Applies position noise and orientation draws to a sampled drop.
pub fn condition_drop(
    sys: &System,
    drop: &UserDrop,
    radius: f64,
    orientation: OrientationMode,
    seed: u64,
) -> Result<UserDrop> {
    let noisy = inject_position_noise(drop, radius, derive_seed(seed, &[NOISE_TAG]))?;
    Ok(with_orientations(
        &noisy,
        orientation,
        sys.cfg().geometry.elevation_band_deg,
        derive_seed(seed, &[ORIENTATION_TAG]),
    ))
}

/// Grid built with the configured spacing.
pub fn default_grid(sys: &System) -> Result<BeamGrid> {
    build_beam_grid(sys, sys.cfg().scheduler.grid_spacing_m, GridMode::Lazy)
}

/// Samples labelled with the exact CQI that the grid beams (and the
/// deployed filters) achieve on the true channel.
pub fn generate_training_data(
    sys: &System,
    grid: &BeamGrid,
    spec: &TrainingSpec,
) -> Result<Dataset> {
    let n = sys.n_users();
    let features = spec.orientation.feature_mode();
    let drops = spec.samples.div_ceil(n);
    let per_drop: Vec<Vec<(Vec<f64>, u8)>> = (0..drops as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<(Vec<f64>, u8)>> {
            let base = sys.scenario.sample_drop(training_drop_index(spec.seed, k));
            let drop = condition_drop(
                sys,
                &base,
                spec.noise_radius,
                spec.orientation.orientation_mode(),
                spec.seed,
            )?;
            let entry = grid.lookup(sys, &drop.reported_positions)?;
            let rx = deployed_filters(sys, &entry, &drop, spec.deploy);
            let ch = DropChannels::of_drop(sys, &drop)?;
            let labels = ch.exact_cqis(sys, &entry.tx, &rx);
            Ok(drop_features(&drop, &entry, features)
                .into_iter()
                .zip(labels)
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut ds = Dataset::new(features.names(n));
    for (x, y) in per_drop.into_iter().flatten().take(spec.samples) {
        ds.push(x, y)?;
    }
    ds.log_class_support(sys.cfg().forest.class_support_floor);
    Ok(ds)
}

pub fn forest_params(cfg: &ScenarioConfig, seed: u64) -> TrainParams {
    TrainParams {
        t_n: cfg.forest.t_n,
        t_d: cfg.forest.t_d,
        m_try: cfg.forest.m_try,
        min_samples_split: cfg.forest.min_samples_split,
        seed,
    }
}

/// Generates data for `spec` and trains the configured forest on it.
pub fn train_model(sys: &System, grid: &BeamGrid, spec: &TrainingSpec) -> Result<ForestModel> {
    let ds = generate_training_data(sys, grid, spec)?;
    let model = forest::train(&ds, &forest_params(sys.cfg(), spec.seed))?;
    log::info!(
        "trained {} trees on {} samples (noise {} m, orientation {:?})",
        model.t_n,
        ds.len(),
        spec.noise_radius,
        spec.orientation
    );
    Ok(model)
}

/// A trained forest with the scheduler options it is deployed with.
#[derive(Debug, Clone, Copy)]
pub struct Variant<'a> {
    pub model: &'a ForestModel,
    pub opts: LearningOptions,
}

impl<'a> Variant<'a> {
    /// Position features with grid-deployed filters.
    pub fn plain(model: &'a ForestModel) -> Self {
        Variant {
            model,
            opts: LearningOptions::default(),
        }
    }
}

/// Conditions applied to every evaluation drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalCondition {
    pub radius: f64,
    pub orientation: OrientationMode,
    pub baselines: bool,
}

impl EvalCondition {
    pub fn exact() -> Self {
        EvalCondition {
            radius: 0.0,
            orientation: OrientationMode::Aligned,
            baselines: true,
        }
    }
}

/// Mean system goodput per scheme over the evaluation drops.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTotals {
    pub drops: usize,
    pub csi: f64,
    pub random: f64,
    pub geometric: f64,
    pub learning: Vec<f64>,
}

impl EvalTotals {
    pub fn learning_ratio(&self, i: usize) -> f64 {
        self.learning[i] / self.csi
    }
}

/// Paired evaluation: every scheme sees the same drops. `grid_sys` is the
/// deployment the grid and forests were built for; `sys` supplies the true
/// channels.
pub fn evaluate(
    sys: &System,
    grid_sys: &System,
    grid: &BeamGrid,
    drops: usize,
    cond: EvalCondition,
    variants: &[Variant<'_>],
    seed: u64,
) -> Result<EvalTotals> {
    let per_drop: Vec<Vec<f64>> = (0..drops as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<f64>> {
            let drop = condition_drop(
                sys,
                &sys.scenario.sample_drop(k),
                cond.radius,
                cond.orientation,
                seed,
            )?;
            let ch = DropChannels::of_drop(sys, &drop)?;
            let mut out = vec![sum_goodput(&csi_allocate_drop(sys, &drop, &ch))];
            if cond.baselines {
                out.push(sum_goodput(&random_packet_allocate(
                    grid, &drop, grid_sys, &ch, seed,
                )?));
                out.push(sum_goodput(&geometric_allocate(&drop, grid_sys, &ch, seed)));
            } else {
                out.extend([0.0, 0.0]);
            }
            for v in variants {
                out.push(sum_goodput(&learning_allocate(
                    v.model, grid, &drop, grid_sys, &ch, v.opts,
                )?));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut sums = vec![0.0; 3 + variants.len()];
    for row in &per_drop {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    let mean = |s: f64| s / drops as f64;
    Ok(EvalTotals {
        drops,
        csi: mean(sums[0]),
        random: mean(sums[1]),
        geometric: mean(sums[2]),
        learning: sums[3..].iter().map(|&s| mean(s)).collect(),
    })
}

fn interval(sys: &System) -> crate::scenario::GoodputInterval {
    sys.cfg().radio.goodput_interval
}

/// Four-scheme comparison with exact positions and aligned devices.
pub fn run_scheme_comparison(
    sys: &System,
    spec: &ExperimentSpec,
    model: Option<&ForestModel>,
) -> Result<Report> {
    spec.validate()?;
    let grid = default_grid(sys)?;
    let trained;
    let model = match model {
        Some(m) => m,
        None => {
            trained = train_model(sys, &grid, &spec.training)?;
            &trained
        }
    };
    let variant = Variant {
        model,
        opts: LearningOptions::default(),
    };
    let t = evaluate(
        sys,
        sys,
        &grid,
        spec.eval_drops,
        EvalCondition::exact(),
        &[variant],
        spec.seed,
    )?;
    let mut r = Report::new(spec.mode.name(), "system goodput per scheme", interval(sys));
    r.notes.push(format!("{} evaluation drops", t.drops));
    r.push("csi", "exact", t.csi, t.csi, t.csi);
    r.push("learning", "exact", t.learning[0], t.learning[0], t.csi);
    r.push("random_packet", "exact", t.random, t.random, t.csi);
    r.push("geometric", "exact", t.geometric, t.geometric, t.csi);
    Ok(r)
}

/// Raw and overhead-adjusted goodput of the learning and CSI schemes over
/// user counts. Raw goodput comes from one paired evaluation.
pub fn run_overhead_sweep(
    sys: &System,
    spec: &ExperimentSpec,
    user_counts: &[u32],
) -> Result<Report> {
    if user_counts.is_empty() {
        return Err(Error::Config("overhead sweep needs user counts".into()));
    }
    let grid = default_grid(sys)?;
    let model = train_model(sys, &grid, &spec.training)?;
    let variant = Variant {
        model: &model,
        opts: LearningOptions::default(),
    };
    let cond = EvalCondition {
        baselines: false,
        ..EvalCondition::exact()
    };
    let t = evaluate(
        sys,
        sys,
        &grid,
        spec.eval_drops,
        cond,
        &[variant],
        spec.seed,
    )?;
    let mut r = Report::new(
        spec.mode.name(),
        "effect of acquisition overhead",
        interval(sys),
    );
    for &n in user_counts {
        let oh_csi = overhead_csi(&sys.overhead, n)?;
        let oh_pos = overhead_position(&sys.overhead, n)?;
        r.push("csi", n, t.csi, t.csi * (1.0 - oh_csi), t.csi);
        r.push(
            "learning",
            n,
            t.learning[0],
            t.learning[0] * (1.0 - oh_pos),
            t.csi,
        );
        r.notes
            .push(format!("n={n}: OH_pos={oh_pos:.6} OH_CSI={oh_csi:.6}"));
    }
    Ok(r)
}

/// Clean- and noisy-trained forests under reported-position noise.
pub fn run_position_noise(sys: &System, spec: &ExperimentSpec, radii: &[f64]) -> Result<Report> {
    noise_study(sys, spec, radii, "learning under position noise")
}

fn noise_study(sys: &System, spec: &ExperimentSpec, radii: &[f64], title: &str) -> Result<Report> {
    if radii.is_empty() {
        return Err(Error::Config("noise study needs radii".into()));
    }
    let grid = default_grid(sys)?;
    let clean = train_model(sys, &grid, &spec.training)?;
    let mut r = Report::new(spec.mode.name(), title, interval(sys));
    let cond = |radius| EvalCondition {
        radius,
        orientation: OrientationMode::Aligned,
        baselines: false,
    };
    let t0 = evaluate(
        sys,
        sys,
        &grid,
        spec.eval_drops,
        cond(0.0),
        &[Variant::plain(&clean)],
        spec.seed,
    )?;
    r.push("csi", 0, t0.csi, t0.csi, t0.csi);
    r.push("learning_clean", 0, t0.learning[0], t0.learning[0], t0.csi);
    for &radius in radii {
        let noisy = train_model(
            sys,
            &grid,
            &TrainingSpec {
                noise_radius: radius,
                ..spec.training
            },
        )?;
        let t = evaluate(
            sys,
            sys,
            &grid,
            spec.eval_drops,
            cond(radius),
            &[Variant::plain(&clean), Variant::plain(&noisy)],
            spec.seed,
        )?;
        r.push("csi", radius, t.csi, t.csi, t.csi);
        r.push(
            "learning_clean",
            radius,
            t.learning[0],
            t.learning[0],
            t.csi,
        );
        r.push(
            "learning_noisy",
            radius,
            t.learning[1],
            t.learning[1],
            t.csi,
        );
    }
    Ok(r)
}

/// One forest trained at the configured density, evaluated over densities.
/// The grid stays the one built for the training deployment.
pub fn run_scatterer_sweep(
    sys: &System,
    spec: &ExperimentSpec,
    densities: &[f64],
) -> Result<Report> {
    if densities.is_empty() {
        return Err(Error::Config("scatterer sweep needs densities".into()));
    }
    let grid = default_grid(sys)?;
    let model = train_model(sys, &grid, &spec.training)?;
    let variant = Variant {
        model: &model,
        opts: LearningOptions::default(),
    };
    let cond = EvalCondition {
        baselines: false,
        ..EvalCondition::exact()
    };
    let mut r = Report::new(
        spec.mode.name(),
        "learning across scatterer densities",
        interval(sys),
    );
    for &rho in densities {
        let mut cfg = sys.cfg().clone();
        cfg.channel.scatterer_density = rho;
        let eval_sys = System::new(cfg)?;
        let t = evaluate(
            &eval_sys,
            sys,
            &grid,
            spec.eval_drops,
            cond,
            &[variant],
            spec.seed,
        )?;
        r.push("csi", rho, t.csi, t.csi, t.csi);
        r.push("learning", rho, t.learning[0], t.learning[0], t.csi);
    }
    Ok(r)
}

/// Random UE orientation: unmitigated and the three mitigations.
pub fn run_orientation_study(sys: &System, spec: &ExperimentSpec) -> Result<Report> {
    let grid = default_grid(sys)?;
    let clean = train_model(sys, &grid, &spec.training)?;
    let deploy = sys.cfg().experiment.embedded_orientation_deploy;
    let embedded = train_model(
        sys,
        &grid,
        &TrainingSpec {
            orientation: OrientationTraining::Embedded,
            deploy,
            ..spec.training
        },
    )?;
    let explicit = train_model(
        sys,
        &grid,
        &TrainingSpec {
            orientation: OrientationTraining::ExplicitFeature,
            deploy,
            ..spec.training
        },
    )?;
    let variants = [
        Variant {
            model: &clean,
            opts: LearningOptions::default(),
        },
        Variant {
            model: &embedded,
            opts: LearningOptions {
                features: FeatureMode::Position,
                deploy,
            },
        },
        Variant {
            model: &clean,
            opts: LearningOptions {
                features: FeatureMode::Position,
                deploy: FilterDeploy::Reaimed,
            },
        },
        Variant {
            model: &explicit,
            opts: LearningOptions {
                features: FeatureMode::WithOrientation,
                deploy,
            },
        },
    ];
    let cond = EvalCondition {
        radius: 0.0,
        orientation: OrientationMode::Random,
        baselines: false,
    };
    let t = evaluate(sys, sys, &grid, spec.eval_drops, cond, &variants, spec.seed)?;
    let mut r = Report::new(spec.mode.name(), "random UE orientation", interval(sys));
    r.push("csi", "random", t.csi, t.csi, t.csi);
    for (name, g) in ["unmitigated", "solution1", "solution2", "solution3"]
        .iter()
        .zip(&t.learning)
    {
        r.push(name, "random", *g, *g, t.csi);
    }
    Ok(r)
}

/// The noise study with the specular ray removed.
pub fn run_nlos(sys: &System, spec: &ExperimentSpec, radii: &[f64]) -> Result<Report> {
    let mut cfg = sys.cfg().clone();
    cfg.channel.los_mode = LosMode::Nlos;
    let nlos = System::new(cfg)?;
    noise_study(&nlos, spec, radii, "NLOS learning under position noise")
}

/// Training data for the dimensioning study, split into train, validation
/// and test parts.
pub fn dimensioning_data(
    sys: &System,
    spec: &ExperimentSpec,
) -> Result<(Dataset, Dataset, Dataset)> {
    let grid = default_grid(sys)?;
    let ds = generate_training_data(sys, &grid, &spec.training)?;
    let f = sys.cfg().experiment.dimension_test_fraction;
    let (train, rest) = ds.split(1.0 - 2.0 * f);
    let (validation, test) = rest.split(0.5);
    Ok((train, validation, test))
}

/// Accuracy over the configured grid of tree counts and depths.
pub fn run_dimensioning(sys: &System, spec: &ExperimentSpec) -> Result<Vec<DimensionRow>> {
    let (train, validation, test) = dimensioning_data(sys, spec)?;
    let e = &sys.cfg().experiment;
    dimensioning_sweep(
        &train,
        &validation,
        &test,
        &e.dimension_trees,
        &e.dimension_depths,
        sys.cfg().forest.m_try,
        spec.training.seed,
    )
}

/// Dimensioning rows as a fixed-width table.
pub fn dimensioning_table(rows: &[DimensionRow]) -> String {
    let mut out = format!(
        "{:>5} {:>5} {:>10} {:>10} {:>10} {:>10}\n",
        "t_n", "t_d", "train", "valid", "test", "seconds"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>5} {:>5} {:>10.4} {:>10.4} {:>10.4} {:>10.3}\n",
            r.t_n, r.t_d, r.train_accuracy, r.validation_accuracy, r.test_accuracy, r.train_seconds
        ));
    }
    out
}

/// Runs `spec.mode` and returns its report. Dimensioning results are
/// rendered as report rows with accuracies in the goodput columns.
pub fn run(sys: &System, spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    match spec.mode {
        ExperimentMode::SchemeComparison => run_scheme_comparison(sys, spec, None),
        ExperimentMode::OverheadSweep => {
            let counts: Vec<u32> = spec.sweep_values.iter().map(|&v| v as u32).collect();
            run_overhead_sweep(sys, spec, &counts)
        }
        ExperimentMode::PositionNoise => run_position_noise(sys, spec, &spec.sweep_values),
        ExperimentMode::ScattererSweep => run_scatterer_sweep(sys, spec, &spec.sweep_values),
        ExperimentMode::Orientation => run_orientation_study(sys, spec),
        ExperimentMode::Nlos => run_nlos(sys, spec, &spec.sweep_values),
        ExperimentMode::Dimensioning => {
            let rows = run_dimensioning(sys, spec)?;
            let mut r = Report::new(
                spec.mode.name(),
                "forest dimensioning (accuracy)",
                interval(sys),
            );
            r.notes
                .push("goodput columns hold train and test accuracy".into());
            for row in rows {
                r.rows.push(ReportRow {
                    scheme: format!("forest_{}", row.t_n),
                    condition: row.t_d.to_string(),
                    mean_system_goodput: row.train_accuracy,
                    effective_goodput: row.test_accuracy,
                    ratio_to_csi: row.test_accuracy,
                });
            }
            Ok(r)
        }
    }
}
