//! Antenna-domain description: configuration schema, RRH and user geometry,
//! scatterer fields and seeded sampling of evaluation drops.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::OverheadConfig;
use crate::rng::{derive_rng, stream};

/// Version of the configuration file schema accepted by [`ScenarioConfig::load`].
pub const SCHEMA_VERSION: u32 = 1;

/// Cartesian position in metres.
pub type Position = Vector3<f64>;

const MAX_PLACEMENT_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LosMode {
    Los,
    Nlos,
}

/// Time base used as the goodput denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoodputInterval {
    /// One TDD frame.
    Frame,
    /// The scheduling super-interval of several frames.
    Tti,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Side of the square antenna domain.
    pub domain_size_m: f64,
    pub rrh_positions: Vec<[f64; 3]>,
    pub n_users: usize,
    pub user_height_m: f64,
    /// No user is placed closer than this (in the plane) to an RRH.
    pub exclusion_radius_m: f64,
    /// Candidate positions per user; drops pick from this pool. 0 draws
    /// fresh positions for every drop.
    pub position_pool: usize,
    /// Zenith band for random UE tilt, degrees.
    pub elevation_band_deg: [f64; 2],
    pub rng_seed: u64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            domain_size_m: 400.0,
            rrh_positions: vec![
                [40.0, 40.0, 10.0],
                [360.0, 40.0, 10.0],
                [40.0, 360.0, 10.0],
                [360.0, 360.0, 10.0],
            ],
            n_users: 4,
            user_height_m: 1.5,
            exclusion_radius_m: 1.0,
            position_pool: 100,
            elevation_band_deg: [60.0, 120.0],
            rng_seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub n_tx: usize,
    pub n_rx: usize,
    pub tx_power_w: f64,
    /// TDD frame duration.
    pub frame_s: f64,
    /// Scheduling super-interval (several frames).
    pub tti_s: f64,
    pub goodput_interval: GoodputInterval,
    pub user_speed_mps: f64,
    /// Direction of travel in the plane, degrees from the x axis.
    pub user_heading_deg: f64,
    pub noise_figure_db: f64,
    /// Aggregate power received from outside the domain, dBm over the band.
    pub external_interference_dbm: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            carrier_hz: 3.5e9,
            bandwidth_hz: 200e6,
            n_tx: 8,
            n_rx: 2,
            tx_power_w: 1e-3,
            frame_s: 0.2e-3,
            tti_s: 1e-3,
            goodput_interval: GoodputInterval::Frame,
            user_speed_mps: 30.0,
            user_heading_deg: 0.0,
            noise_figure_db: 9.0,
            external_interference_dbm: -75.0,
        }
    }
}

impl RadioConfig {
    /// Denominator of the goodput formula.
    pub fn goodput_interval_s(&self) -> f64 {
        match self.goodput_interval {
            GoodputInterval::Frame => self.frame_s,
            GoodputInterval::Tti => self.tti_s,
        }
    }

    /// Thermal noise plus receiver noise figure plus external interference, W.
    pub fn noise_power_w(&self) -> f64 {
        let thermal_dbm = -174.0 + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db;
        let dbm_to_w = |dbm: f64| 10f64.powf((dbm - 30.0) / 10.0);
        dbm_to_w(thermal_dbm) + dbm_to_w(self.external_interference_dbm)
    }

    pub fn wavelength_m(&self) -> f64 {
        crate::channel::SPEED_OF_LIGHT / self.carrier_hz
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub los_mode: LosMode,
    /// Scatterers per square metre.
    pub scatterer_density: f64,
    pub scatterer_gain_range: [f64; 2],
    pub scatterer_height_range_m: [f64; 2],
    /// Extra distance exponent applied in NLOS mode.
    pub nlos_excess_exponent: f64,
    /// Drop time instants are uniform in `[0, window)`, seconds.
    pub drop_time_window_s: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            los_mode: LosMode::Los,
            scatterer_density: 0.000125,
            scatterer_gain_range: [0.1, 0.5],
            scatterer_height_range_m: [1.0, 10.0],
            nlos_excess_exponent: 0.2,
            drop_time_window_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodebookConfig {
    pub tx_step_deg: f64,
    pub rx_step_deg: f64,
    /// Steering span `[start, end)` shared by both codebooks, degrees.
    pub span_deg: [f64; 2],
}

impl Default for CodebookConfig {
    fn default() -> Self {
        CodebookConfig {
            tx_step_deg: 3.0,
            rx_step_deg: 12.0,
            span_deg: [-180.0, 180.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerConfig {
    /// Transmit-beam candidates per link in the joint search.
    pub k_tx: usize,
    /// Receive-filter candidates per link in the joint search.
    pub k_rx: usize,
    pub grid_spacing_m: f64,
    pub grid_memory_budget_bytes: u64,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            k_tx: 5,
            k_rx: 3,
            grid_spacing_m: 2.0,
            grid_memory_budget_bytes: 1 << 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    /// MCS table file; the compiled-in table is used when absent.
    pub mcs_table: Option<PathBuf>,
    /// Numerology file; the `[overhead]` section is used when absent.
    pub overhead_table: Option<PathBuf>,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            mcs_table: None,
            overhead_table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub t_n: usize,
    pub t_d: usize,
    pub m_try: usize,
    pub min_samples_split: usize,
    /// Warn when a label class holds less than this share of the samples.
    pub class_support_floor: f64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            t_n: 100,
            t_d: 10,
            m_try: 3,
            min_samples_split: 2,
            class_support_floor: 0.005,
        }
    }
}

/// How the UE receive filter is aimed after the grid lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterDeploy {
    /// Grid filter used as is.
    Grid,
    /// Grid filter re-aimed through the UE orientation.
    Reaimed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub training_samples: usize,
    pub eval_drops: usize,
    pub train_seed: u64,
    pub noise_radii_m: Vec<f64>,
    pub nlos_radii_m: Vec<f64>,
    pub scatterer_densities: Vec<f64>,
    pub user_counts: Vec<u32>,
    pub dimension_trees: Vec<usize>,
    pub dimension_depths: Vec<usize>,
    pub dimension_test_fraction: f64,
    /// Filter handling for forests trained with random orientation.
    pub embedded_orientation_deploy: FilterDeploy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            training_samples: 20_000,
            eval_drops: 100,
            train_seed: 7,
            noise_radii_m: vec![0.5, 1.0, 2.0, 3.0, 5.0],
            nlos_radii_m: vec![0.5, 1.0, 2.0],
            scatterer_densities: vec![0.0000625, 0.000125, 0.00025],
            user_counts: vec![1, 5, 10, 15, 20, 25],
            dimension_trees: vec![5, 10, 50, 100, 200, 300],
            dimension_depths: vec![3, 5, 10],
            dimension_test_fraction: 0.2,
            embedded_orientation_deploy: FilterDeploy::Reaimed,
        }
    }
}

/// Complete configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub radio: RadioConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub codebook: CodebookConfig,
    #[serde(default)]
    pub scheduler: SchedulerConfig,
    #[serde(default)]
    pub link: LinkConfig,
    #[serde(default)]
    pub overhead: OverheadConfig,
    #[serde(default)]
    pub forest: ForestConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            geometry: GeometryConfig::default(),
            radio: RadioConfig::default(),
            channel: ChannelConfig::default(),
            codebook: CodebookConfig::default(),
            scheduler: SchedulerConfig::default(),
            link: LinkConfig::default(),
            overhead: OverheadConfig::default(),
            forest: ForestConfig::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = ScenarioConfig::from_toml(&text)?;
        // Relative table paths are resolved against the config file.
        let base = path.parent().unwrap_or(Path::new("."));
        for table in [&mut cfg.link.mcs_table, &mut cfg.link.overhead_table] {
            if let Some(p) = table.as_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Version {
                found: cfg.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        let r = &self.radio;
        let c = &self.channel;
        let bad = |msg: String| Err(Error::Config(msg));
        if g.n_users != g.rrh_positions.len() {
            return bad(format!(
                "{} users for {} RRHs; each RRH serves exactly one user",
                g.n_users,
                g.rrh_positions.len()
            ));
        }
        if g.n_users == 0 {
            return bad("at least one RRH is required".into());
        }
        let positive = [
            ("domain_size_m", g.domain_size_m),
            ("user_height_m", g.user_height_m),
            ("carrier_hz", r.carrier_hz),
            ("bandwidth_hz", r.bandwidth_hz),
            ("tx_power_w", r.tx_power_w),
            ("frame_s", r.frame_s),
            ("tti_s", r.tti_s),
            ("grid_spacing_m", self.scheduler.grid_spacing_m),
            ("tx_step_deg", self.codebook.tx_step_deg),
            ("rx_step_deg", self.codebook.rx_step_deg),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if r.n_tx == 0 || r.n_rx == 0 {
            return bad("antenna counts must be at least 1".into());
        }
        if r.user_speed_mps < 0.0 || g.exclusion_radius_m < 0.0 {
            return bad("speed and exclusion radius must be non-negative".into());
        }
        for p in &g.rrh_positions {
            if p.iter().any(|v| !v.is_finite()) || p[2] <= 0.0 {
                return bad(format!("invalid RRH position {p:?}"));
            }
            if p[0] < 0.0 || p[1] < 0.0 || p[0] > g.domain_size_m || p[1] > g.domain_size_m {
                return bad(format!("RRH {p:?} lies outside the domain"));
            }
        }
        let [lo, hi] = g.elevation_band_deg;
        if !(0.0..=180.0).contains(&lo) || !(lo..=180.0).contains(&hi) {
            return bad(format!("elevation band {lo}..{hi} outside [0, 180]"));
        }
        if !(c.scatterer_density >= 0.0) {
            return bad("scatterer density must be non-negative".into());
        }
        let [gmin, gmax] = c.scatterer_gain_range;
        if !(0.0 <= gmin && gmin <= gmax && gmax <= 1.0) {
            return bad(format!(
                "scatterer gain range {gmin}..{gmax} outside [0, 1]"
            ));
        }
        let [zmin, zmax] = c.scatterer_height_range_m;
        if !(0.0 <= zmin && zmin <= zmax) {
            return bad("invalid scatterer height range".into());
        }
        if !(c.nlos_excess_exponent > 0.0) {
            return bad("NLOS excess exponent must be positive".into());
        }
        if !(c.drop_time_window_s >= 0.0 && c.drop_time_window_s.is_finite()) {
            return bad("drop time window must be finite and non-negative".into());
        }
        if self.scheduler.k_tx == 0 || self.scheduler.k_rx == 0 {
            return bad("candidate counts must be at least 1".into());
        }
        let f = &self.forest;
        if f.t_n == 0 || f.t_d == 0 || f.m_try == 0 {
            return bad("forest t_n, t_d and m_try must be positive".into());
        }
        let e = &self.experiment;
        if e.training_samples == 0 || e.eval_drops == 0 {
            return bad("experiment counts must be positive".into());
        }
        if !(0.0 < e.dimension_test_fraction && e.dimension_test_fraction < 1.0) {
            return bad("dimension_test_fraction must lie in (0, 1)".into());
        }
        self.overhead.validate()
    }

    pub fn rrh_position(&self, rrh: usize) -> Position {
        let p = self.geometry.rrh_positions[rrh];
        Vector3::new(p[0], p[1], p[2])
    }

    pub fn n_users(&self) -> usize {
        self.geometry.n_users
    }

    pub fn domain_center(&self) -> Position {
        let h = self.geometry.domain_size_m / 2.0;
        Vector3::new(h, h, 0.0)
    }

    /// Broadside azimuth of each RRH array, pointing at the domain centre.
    pub fn rrh_broadside(&self, rrh: usize) -> f64 {
        let d = self.domain_center() - self.rrh_position(rrh);
        d.y.atan2(d.x)
    }

    /// Horizontal ULA axis of an RRH, perpendicular to its broadside.
    pub fn rrh_array_axis(&self, rrh: usize) -> Vector3<f64> {
        let b = self.rrh_broadside(rrh) + PI / 2.0;
        Vector3::new(b.cos(), b.sin(), 0.0)
    }

    /// RRH with the smallest planar distance to `p`; ties go to the lower index.
    pub fn nearest_rrh(&self, p: &Position) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, r) in self.geometry.rrh_positions.iter().enumerate() {
            let d = (p.x - r[0]).hypot(p.y - r[1]);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }
}

/// UE antenna orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationAngles {
    /// Tilt about the y axis, in `[0, π]`.
    pub theta0: f64,
    /// Rotation about the z axis, in `[0, 2π)`.
    pub phi0: f64,
}

impl OrientationAngles {
    pub fn new(theta0: f64, phi0: f64) -> Self {
        OrientationAngles { theta0, phi0 }
    }

    pub fn aligned() -> Self {
        OrientationAngles {
            theta0: 0.0,
            phi0: 0.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=PI).contains(&self.theta0) && (0.0..TAU).contains(&self.phi0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationMode {
    Aligned,
    Random,
}

/// Draws one orientation. Random mode is uniform in azimuth and uniform in
/// zenith over `band` (radians).
pub fn sample_orientation(mode: OrientationMode, band: (f64, f64), seed: u64) -> OrientationAngles {
    match mode {
        OrientationMode::Aligned => OrientationAngles::aligned(),
        OrientationMode::Random => {
            let mut rng = derive_rng(seed, &[stream::ORIENTATION]);
            let theta0 = if band.1 > band.0 {
                rng.gen_range(band.0..band.1)
            } else {
                band.0
            };
            OrientationAngles::new(theta0, rng.gen_range(0.0..TAU))
        }
    }
}

/// Point scatterers shared by every link of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererField {
    pub points: Vec<Position>,
    pub reflection_gains: Vec<Complex64>,
}

impl ScattererField {
    pub fn empty() -> Self {
        ScattererField {
            points: Vec::new(),
            reflection_gains: Vec::new(),
        }
    }

    /// Number of scatterers for `density` over the configured domain.
    pub fn count_for(cfg: &ScenarioConfig, density: f64) -> usize {
        (density * cfg.geometry.domain_size_m.powi(2)).round() as usize
    }

    /// Draws the field for `density`. Points are generated sequentially from
    /// one stream, so a sparser field is a prefix of a denser one.
    pub fn generate(cfg: &ScenarioConfig, density: f64) -> Result<Self> {
        if !(density >= 0.0 && density.is_finite()) {
            return Err(Error::Argument(format!(
                "invalid scatterer density {density}"
            )));
        }
        let n = ScattererField::count_for(cfg, density);
        let mut rng = derive_rng(cfg.geometry.rng_seed, &[stream::SCATTERERS]);
        let d = cfg.geometry.domain_size_m;
        let [zmin, zmax] = cfg.channel.scatterer_height_range_m;
        let [gmin, gmax] = cfg.channel.scatterer_gain_range;
        let mut points = Vec::with_capacity(n);
        let mut reflection_gains = Vec::with_capacity(n);
        for _ in 0..n {
            let x = rng.gen::<f64>() * d;
            let y = rng.gen::<f64>() * d;
            let z = zmin + rng.gen::<f64>() * (zmax - zmin);
            let mag = gmin + rng.gen::<f64>() * (gmax - gmin);
            let phase = rng.gen::<f64>() * TAU;
            points.push(Vector3::new(x, y, z));
            reflection_gains.push(Complex64::from_polar(mag, phase));
        }
        Ok(ScattererField {
            points,
            reflection_gains,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One placement of all users.
#[derive(Debug, Clone, PartialEq)]
pub struct UserDrop {
    pub index: u64,
    pub true_positions: Vec<Position>,
    pub reported_positions: Vec<Position>,
    pub orientations: Vec<OrientationAngles>,
    /// Time instant of the drop, used for the Doppler phase.
    pub time_s: f64,
}

impl UserDrop {
    pub fn n_users(&self) -> usize {
        self.true_positions.len()
    }
}

/// Sampled geometry that stays fixed over all drops of a scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cfg: ScenarioConfig,
    pools: Vec<Vec<Position>>,
}

impl Scenario {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let pool = cfg.geometry.position_pool;
        let mut pools = Vec::with_capacity(cfg.n_users());
        for user in 0..cfg.n_users() {
            let mut rng = derive_rng(cfg.geometry.rng_seed, &[stream::POOL, user as u64]);
            let mut points = Vec::with_capacity(pool);
            for _ in 0..pool {
                points.push(place_user(&cfg, user, &mut rng)?);
            }
            pools.push(points);
        }
        if pool == 0 {
            // Verify that every cell can host a user before any drop is drawn.
            let mut rng = derive_rng(cfg.geometry.rng_seed, &[stream::POOL]);
            for user in 0..cfg.n_users() {
                place_user(&cfg, user, &mut rng)?;
            }
        }
        Ok(Scenario { cfg, pools })
    }

    pub fn pool(&self, user: usize) -> &[Position] {
        &self.pools[user]
    }

    /// Drop `drop_index` with exact reports and aligned orientations.
    pub fn sample_drop(&self, drop_index: u64) -> UserDrop {
        sample_drop_from(self, drop_index)
    }
}

/// Uniform placement inside the cell of `rrh`: domain points for which it is
/// the nearest RRH, outside its exclusion disc.
fn place_user(cfg: &ScenarioConfig, rrh: usize, rng: &mut impl Rng) -> Result<Position> {
    let d = cfg.geometry.domain_size_m;
    let r = cfg.rrh_position(rrh);
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let p = Vector3::new(
            rng.gen::<f64>() * d,
            rng.gen::<f64>() * d,
            cfg.geometry.user_height_m,
        );
        let clear = cfg.geometry.rrh_positions.iter().all(|q| {
            (p.x - q[0]).hypot(p.y - q[1]) >= cfg.geometry.exclusion_radius_m.max(f64::MIN_POSITIVE)
        });
        if clear && cfg.nearest_rrh(&p) == rrh {
            return Ok(p);
        }
    }
    Err(Error::Config(format!(
        "no room to place a user for RRH {rrh} at ({}, {}) outside the exclusion discs",
        r.x, r.y
    )))
}

/// Deterministic in `(rng_seed, drop_index)`.
pub fn sample_drop(scenario: &Scenario, drop_index: u64) -> UserDrop {
    sample_drop_from(scenario, drop_index)
}

fn sample_drop_from(scenario: &Scenario, drop_index: u64) -> UserDrop {
    let cfg = &scenario.cfg;
    let mut rng = derive_rng(cfg.geometry.rng_seed, &[stream::DROP, drop_index]);
    let n = cfg.n_users();
    let mut true_positions = Vec::with_capacity(n);
    for user in 0..n {
        let pool = scenario.pool(user);
        let p = if pool.is_empty() {
            place_user(cfg, user, &mut rng).expect("cells checked at construction")
        } else {
            pool[rng.gen_range(0..pool.len())]
        };
        true_positions.push(p);
    }
    let time_s = rng.gen::<f64>() * cfg.channel.drop_time_window_s;
    UserDrop {
        index: drop_index,
        reported_positions: true_positions.clone(),
        true_positions,
        orientations: vec![OrientationAngles::aligned(); n],
        time_s,
    }
}

/// Offsets every reported position by a planar error uniform in a disc of
/// `radius`. True positions and heights are untouched.
pub fn inject_position_noise(drop: &UserDrop, radius: f64, seed: u64) -> Result<UserDrop> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::Argument(format!(
            "noise radius must be non-negative, got {radius}"
        )));
    }
    let mut out = drop.clone();
    if radius == 0.0 {
        out.reported_positions = drop.true_positions.clone();
        return Ok(out);
    }
    let mut rng = derive_rng(seed, &[stream::NOISE, drop.index]);
    for (rep, tru) in out.reported_positions.iter_mut().zip(&drop.true_positions) {
        let rho = radius * rng.gen::<f64>().sqrt();
        let a = rng.gen::<f64>() * TAU;
        *rep = Vector3::new(tru.x + rho * a.cos(), tru.y + rho * a.sin(), tru.z);
    }
    Ok(out)
}

/// Replaces the drop's orientations with per-user draws.
pub fn with_orientations(
    drop: &UserDrop,
    mode: OrientationMode,
    band_deg: [f64; 2],
    seed: u64,
) -> UserDrop {
    let band = (band_deg[0].to_radians(), band_deg[1].to_radians());
    let mut out = drop.clone();
    for (user, o) in out.orientations.iter_mut().enumerate() {
        let s = crate::rng::derive_seed(seed, &[drop.index, user as u64]);
        *o = sample_orientation(mode, band, s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_roundtrip() {
        let cfg = ScenarioConfig::default();
        let back = ScenarioConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ScenarioConfig::from_toml("schema_version = 1\nbogus = 3\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err =
            ScenarioConfig::from_toml("schema_version = 1\n[radio]\nwatts = 3\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn wrong_version_rejected() {
        let err = ScenarioConfig::from_toml("schema_version = 9\n").unwrap_err();
        assert!(matches!(err, Error::Version { found: 9, .. }));
    }

    #[test]
    fn user_rrh_mismatch_rejected() {
        let mut cfg = ScenarioConfig::default();
        cfg.geometry.n_users = 3;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn default_rrhs_face_centre() {
        let cfg = ScenarioConfig::default();
        let b = cfg.rrh_broadside(0);
        assert!((b - PI / 4.0).abs() < 1e-12);
        let axis = cfg.rrh_array_axis(0);
        let to_centre = (cfg.domain_center() - cfg.rrh_position(0)).xy().normalize();
        assert!(axis.xy().dot(&to_centre).abs() < 1e-12);
    }

    #[test]
    fn nested_scatterer_fields() {
        let cfg = ScenarioConfig::default();
        let sparse = ScattererField::generate(&cfg, 5.625e-5).unwrap();
        let dense = ScattererField::generate(&cfg, 2.25e-4).unwrap();
        assert_eq!(sparse.len(), 9);
        assert_eq!(dense.len(), 36);
        assert_eq!(&dense.points[..9], &sparse.points[..]);
    }
}
