//! Geometric MIMO channel: a specular ray plus single-bounce scatterer rays
//! per RRH-user link, free-space pathloss and the UE orientation transform.

pub mod rotation;

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

use crate::codebook::{array_response, array_steering_angle};
use crate::error::{Error, Result};
use crate::scenario::{LosMode, OrientationAngles, Position, ScattererField, ScenarioConfig};

pub use rotation::{
    basic_rotations, compose_rotation, orientation_transform, spherical_basis,
    OrientationTransform, RotationMatrix,
};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Amplitude pathloss. Free space in LOS; NLOS multiplies by `(1 + d)^{−η/2}`.
pub fn pathloss(
    distance_m: f64,
    carrier_hz: f64,
    mode: LosMode,
    nlos_excess_exponent: f64,
) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::Argument(format!(
            "distance must be positive, got {distance_m}"
        )));
    }
    let free_space = SPEED_OF_LIGHT / (4.0 * PI * distance_m * carrier_hz);
    Ok(match mode {
        LosMode::Los => free_space,
        LosMode::Nlos => free_space * (1.0 + distance_m).powf(-nlos_excess_exponent / 2.0),
    })
}

/// One propagation path. Directions are unit GCS vectors: `departure` leaves
/// the RRH, `arrival` points from the user back along the incoming path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub amplitude: Complex64,
    pub departure: Vector3<f64>,
    pub arrival: Vector3<f64>,
}

/// Rays between an RRH and a user at time `t`. Amplitudes are relative to
/// the direct-path pathloss.
pub fn trace_rays(
    cfg: &ScenarioConfig,
    rrh_pos: &Position,
    user_pos: &Position,
    field: &ScattererField,
    t: f64,
) -> Result<Vec<Ray>> {
    let los = user_pos - rrh_pos;
    let d = los.norm();
    if !(d > 0.0) {
        return Err(Error::Argument("user coincides with the RRH".into()));
    }
    let lambda = cfg.radio.wavelength_m();
    let heading = cfg.radio.user_heading_deg.to_radians();
    let velocity = Vector3::new(heading.cos(), heading.sin(), 0.0) * cfg.radio.user_speed_mps;
    let doppler_phase = |arrival: &Vector3<f64>| TAU * velocity.dot(arrival) / lambda * t;

    let mut rays = Vec::with_capacity(field.len() + 1);
    if cfg.channel.los_mode == LosMode::Los {
        let departure = los / d;
        let arrival = -departure;
        let phase = -TAU * d / lambda + doppler_phase(&arrival);
        rays.push(Ray {
            amplitude: Complex64::from_polar(1.0, phase),
            departure,
            arrival,
        });
    }
    for (s, g) in field.points.iter().zip(&field.reflection_gains) {
        let out = s - rrh_pos;
        let back = s - user_pos;
        let d1 = out.norm();
        let d2 = back.norm();
        if d1 == 0.0 || d2 == 0.0 {
            continue;
        }
        let arrival = back / d2;
        let phase = -TAU * (d1 + d2) / lambda + doppler_phase(&arrival);
        rays.push(Ray {
            amplitude: g * (d / (d1 + d2)) * Complex64::from_polar(1.0, phase),
            departure: out / d1,
            arrival,
        });
    }
    Ok(rays)
}

/// Rays of one link projected onto the two array axes.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRays {
    pub pathloss_amplitude: f64,
    pub amplitudes: Vec<Complex64>,
    /// Direction cosine of each departure along the RRH array axis.
    pub tx_cosines: Vec<f64>,
    /// Direction cosine of each arrival along the UE array axis (local y).
    pub rx_cosines: Vec<f64>,
    /// Steering angle of each arrival in the UE frame.
    pub rx_angles: Vec<f64>,
}

impl LinkRays {
    pub fn new(
        cfg: &ScenarioConfig,
        rrh: usize,
        user_pos: &Position,
        orientation: OrientationAngles,
        field: &ScattererField,
        t: f64,
    ) -> Result<Self> {
        let rrh_pos = cfg.rrh_position(rrh);
        let rays = trace_rays(cfg, &rrh_pos, user_pos, field, t)?;
        let hpl = pathloss(
            (user_pos - rrh_pos).norm(),
            cfg.radio.carrier_hz,
            cfg.channel.los_mode,
            cfg.channel.nlos_excess_exponent,
        )?;
        let axis = cfg.rrh_array_axis(rrh);
        let r = compose_rotation(orientation);
        Ok(LinkRays {
            pathloss_amplitude: hpl,
            amplitudes: rays.iter().map(|r| r.amplitude).collect(),
            tx_cosines: rays.iter().map(|r| r.departure.dot(&axis)).collect(),
            rx_cosines: rays.iter().map(|ray| r.to_local(&ray.arrival).y).collect(),
            rx_angles: rays
                .iter()
                .map(|ray| array_steering_angle(&r.to_local(&ray.arrival)))
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// Complex `N_Rx × N_Tx` gain matrix of one link at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: DMatrix<Complex64>,
    /// LCS azimuth of the direct path seen from the user.
    pub aoa_azimuth: f64,
    /// GCS azimuth of the direct path leaving the RRH.
    pub aod_azimuth: f64,
    pub pathloss_amplitude: f64,
}

impl ChannelMatrix {
    /// `H = Σ α · a_Rx · a_Txᴴ`.
    pub fn from_rays(rays: &LinkRays, n_tx: usize, n_rx: usize) -> DMatrix<Complex64> {
        let mut h = DMatrix::zeros(n_rx, n_tx);
        for ((a, &stx), &srx) in rays
            .amplitudes
            .iter()
            .zip(&rays.tx_cosines)
            .zip(&rays.rx_cosines)
        {
            let at = array_response(n_tx, stx);
            let ar = array_response(n_rx, srx);
            h += (ar * at.adjoint()) * *a;
        }
        h
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Numerical rank with relative tolerance `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.entries
            .clone()
            .svd(false, false)
            .rank(tol * self.frobenius_norm().max(f64::MIN_POSITIVE))
    }
}

/// Channel from `rrh` to a user at `user_pos` with the given orientation.
pub fn synthesize_channel(
    cfg: &ScenarioConfig,
    rrh: usize,
    user_pos: &Position,
    orientation: OrientationAngles,
    field: &ScattererField,
    t: f64,
) -> Result<ChannelMatrix> {
    let rays = LinkRays::new(cfg, rrh, user_pos, orientation, field, t)?;
    if rays.is_empty() {
        log::warn!("link RRH {rrh} has no rays; channel is zero");
    }
    let rrh_pos = cfg.rrh_position(rrh);
    let los = user_pos - rrh_pos;
    let local_back = compose_rotation(orientation).to_local(&(-los));
    Ok(ChannelMatrix {
        entries: ChannelMatrix::from_rays(&rays, cfg.radio.n_tx, cfg.radio.n_rx),
        aoa_azimuth: local_back.y.atan2(local_back.x),
        aod_azimuth: los.y.atan2(los.x),
        pathloss_amplitude: rays.pathloss_amplitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pathloss_one_metre() {
        let h = pathloss(1.0, 3.5e9, LosMode::Los, 2.0).unwrap();
        assert!((h - 6.816e-3).abs() < 1e-5);
        assert!(pathloss(0.0, 3.5e9, LosMode::Los, 2.0).is_err());
    }

    #[test]
    fn doubling_distance_costs_six_db() {
        let a = pathloss(10.0, 3.5e9, LosMode::Los, 2.0).unwrap();
        let b = pathloss(20.0, 3.5e9, LosMode::Los, 2.0).unwrap();
        assert!((20.0 * (a / b).log10() - 6.0206).abs() < 1e-3);
    }

    #[test]
    fn los_without_scatterers_is_rank_one() {
        let cfg = ScenarioConfig::default();
        let user = Vector3::new(20.0, 12.0, 1.5);
        let h = synthesize_channel(
            &cfg,
            0,
            &user,
            OrientationAngles::aligned(),
            &ScattererField::empty(),
            0.0,
        )
        .unwrap();
        assert_eq!(h.rank(1e-9), 1);
    }

    #[test]
    fn nlos_without_scatterers_is_zero() {
        let mut cfg = ScenarioConfig::default();
        cfg.channel.los_mode = LosMode::Nlos;
        let user = Vector3::new(20.0, 12.0, 1.5);
        let h = synthesize_channel(
            &cfg,
            0,
            &user,
            OrientationAngles::aligned(),
            &ScattererField::empty(),
            0.0,
        )
        .unwrap();
        assert_eq!(h.frobenius_norm(), 0.0);
    }
}
