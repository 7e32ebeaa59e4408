//! Everything a scheduler needs about one deployment, built once from a
//! configuration: geometry, scatterers, codebooks, link tables and noise.

use std::f64::consts::PI;

use crate::codebook::{build_codebook, Codebook};
use crate::error::Result;
use crate::link::{realized_goodput, McsTable, OverheadConfig};
use crate::scenario::{ScattererField, Scenario, ScenarioConfig};

#[derive(Debug, Clone)]
pub struct System {
    pub scenario: Scenario,
    pub field: ScattererField,
    pub tx_codebook: Codebook,
    pub rx_codebook: Codebook,
    pub mcs: McsTable,
    pub overhead: OverheadConfig,
    pub noise_power_w: f64,
    tx_cosines: Vec<f64>,
    rx_cosines: Vec<f64>,
}

impl System {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        let scenario = Scenario::new(cfg)?;
        let cfg = &scenario.cfg;
        let field = ScattererField::generate(cfg, cfg.channel.scatterer_density)?;
        let span = (
            cfg.codebook.span_deg[0].to_radians(),
            cfg.codebook.span_deg[1].to_radians(),
        );
        let tx_codebook =
            build_codebook(cfg.radio.n_tx, cfg.codebook.tx_step_deg.to_radians(), span)?;
        let rx_codebook =
            build_codebook(cfg.radio.n_rx, cfg.codebook.rx_step_deg.to_radians(), span)?;
        let mcs = match &cfg.link.mcs_table {
            Some(p) => McsTable::load(p)?,
            None => McsTable::default(),
        };
        let overhead = match &cfg.link.overhead_table {
            Some(p) => OverheadConfig::load(p)?,
            None => cfg.overhead.clone(),
        };
        let noise_power_w = cfg.radio.noise_power_w();
        let tx_cosines = tx_codebook.direction_cosines();
        let rx_cosines = rx_codebook.direction_cosines();
        Ok(System {
            field,
            tx_codebook,
            rx_codebook,
            mcs,
            overhead,
            noise_power_w,
            tx_cosines,
            rx_cosines,
            scenario,
        })
    }

    pub fn cfg(&self) -> &ScenarioConfig {
        &self.scenario.cfg
    }

    pub fn n_users(&self) -> usize {
        self.cfg().n_users()
    }

    pub fn tx_cosine(&self, beam: usize) -> f64 {
        self.tx_cosines[beam]
    }

    pub fn rx_cosine(&self, filter: usize) -> f64 {
        self.rx_cosines[filter]
    }

    /// Goodput in bit/s for `cqi` at `sinr_db`, without overhead.
    pub fn goodput(&self, cqi: u8, sinr_db: f64) -> f64 {
        let r = &self.cfg().radio;
        realized_goodput(
            cqi,
            sinr_db,
            &self.mcs,
            r.bandwidth_hz,
            r.frame_s,
            r.goodput_interval_s(),
        )
    }

    /// Steering angle from RRH broadside toward a point, for the transmit
    /// codebook.
    pub fn tx_steering_angle(&self, rrh: usize, target: &crate::scenario::Position) -> f64 {
        let dir = (target - self.cfg().rrh_position(rrh)).normalize();
        dir.dot(&self.cfg().rrh_array_axis(rrh))
            .clamp(-1.0, 1.0)
            .asin()
    }

    /// Planar bearing from RRH broadside toward a point, wrapped to `(−π, π]`.
    pub fn tx_bearing(&self, rrh: usize, target: &crate::scenario::Position) -> f64 {
        let d = target - self.cfg().rrh_position(rrh);
        wrap_angle(d.y.atan2(d.x) - self.cfg().rrh_broadside(rrh))
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}
