//! Fixed steering-vector codebooks for the RRH transmit beams and the UE
//! receive filters.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const TIE_TOLERANCE: f64 = 1e-9;

/// Steering vectors on a uniform angular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub vectors: Vec<DVector<Complex64>>,
    pub angles: Vec<f64>,
    pub angular_step: f64,
}

/// ULA response `[e^{−jπ·i·s}]` for direction cosine `s` along the array axis.
pub fn array_response(n_antennas: usize, s: f64) -> DVector<Complex64> {
    DVector::from_iterator(
        n_antennas,
        (0..n_antennas).map(|i| Complex64::from_polar(1.0, -PI * i as f64 * s)),
    )
}

/// Steering angle of a local-frame unit direction for the UE array along
/// local y: its sine is the axis cosine and its side (front or back)
/// follows local x.
pub fn array_steering_angle(v: &nalgebra::Vector3<f64>) -> f64 {
    let s = v.y.clamp(-1.0, 1.0);
    let c = (1.0 - s * s).max(0.0).sqrt();
    s.atan2(if v.x < 0.0 { -c } else { c })
}

/// Unit-norm steering vector toward `angle` from broadside.
pub fn steering_vector(n_antennas: usize, angle: f64) -> DVector<Complex64> {
    array_response(n_antennas, angle.sin()).unscale((n_antennas as f64).sqrt())
}

/// One steering vector per grid angle `span.0 + k·step` below `span.1`.
pub fn build_codebook(n_antennas: usize, angular_step: f64, span: (f64, f64)) -> Result<Codebook> {
    if n_antennas == 0 {
        return Err(Error::Config("codebook needs at least one antenna".into()));
    }
    let width = span.1 - span.0;
    if !(angular_step > 0.0) || !(width > 0.0) {
        return Err(Error::Config(format!(
            "codebook step {angular_step} and span width {width} must be positive"
        )));
    }
    if angular_step > width {
        return Err(Error::Config(format!(
            "codebook step {angular_step} exceeds span width {width}"
        )));
    }
    let count = ((width / angular_step) - TIE_TOLERANCE).floor() as usize + 1;
    let angles: Vec<f64> = (0..count)
        .map(|k| span.0 + k as f64 * angular_step)
        .collect();
    let vectors = angles
        .iter()
        .map(|&a| steering_vector(n_antennas, a))
        .collect();
    Ok(Codebook {
        vectors,
        angles,
        angular_step,
    })
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn n_antennas(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    /// Sine of each grid angle, the direction cosine the beam is matched to.
    pub fn direction_cosines(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.sin()).collect()
    }

    /// Indices of the `k` grid angles closest to `target`, nearest first.
    pub fn nearest_k(&self, target: f64, k: usize) -> Vec<usize> {
        let mut order: Vec<(f64, usize)> = self
            .angles
            .iter()
            .enumerate()
            .map(|(i, &a)| (wrapped_distance(a, target), i))
            .collect();
        order.sort_by(|a, b| {
            if (a.0 - b.0).abs() <= TIE_TOLERANCE {
                a.1.cmp(&b.1)
            } else {
                a.0.total_cmp(&b.0)
            }
        });
        order.into_iter().take(k).map(|(_, i)| i).collect()
    }
}

/// Absolute angular distance on the circle, in `[0, π]`.
pub fn wrapped_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Index minimizing the wrapped distance to `target`; ties go to the lower index.
pub fn nearest_beam(codebook: &Codebook, target: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &a) in codebook.angles.iter().enumerate() {
        let d = wrapped_distance(a, target);
        if d < best_d - TIE_TOLERANCE {
            best = i;
            best_d = d;
        }
    }
    best
}

/// `P_Tx · h_PL² · |u† H v|²`.
pub fn beamformed_power(
    h: &DMatrix<Complex64>,
    v: &DVector<Complex64>,
    u: &DVector<Complex64>,
    tx_power_w: f64,
    pathloss_amplitude: f64,
) -> Result<f64> {
    if h.ncols() != v.len() || h.nrows() != u.len() {
        return Err(Error::Argument(format!(
            "channel is {}x{} but filters have lengths {} (rx) and {} (tx)",
            h.nrows(),
            h.ncols(),
            u.len(),
            v.len()
        )));
    }
    let y = u.dotc(&(h * v));
    Ok(tx_power_w * pathloss_amplitude.powi(2) * y.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broadside_vector_is_flat() {
        let v = steering_vector(8, 0.0);
        for x in v.iter() {
            assert!((x - Complex64::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn full_circle_counts() {
        let tx = build_codebook(8, 3f64.to_radians(), (-PI, PI)).unwrap();
        let rx = build_codebook(2, 12f64.to_radians(), (-PI, PI)).unwrap();
        assert_eq!(tx.len(), 120);
        assert_eq!(rx.len(), 30);
        for v in &tx.vectors {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn step_wider_than_span_rejected() {
        assert!(build_codebook(4, 1.0, (0.0, 0.5)).is_err());
    }

    #[test]
    fn nearest_on_grid_and_midway() {
        let cb = build_codebook(4, 0.1, (0.0, 1.0)).unwrap();
        assert_eq!(nearest_beam(&cb, cb.angles[4]), 4);
        let mid = (cb.angles[4] + cb.angles[5]) / 2.0;
        assert_eq!(nearest_beam(&cb, mid), 4);
    }

    #[test]
    fn nearest_wraps_around() {
        let cb = build_codebook(4, 3f64.to_radians(), (-PI, PI)).unwrap();
        assert_eq!(nearest_beam(&cb, PI - 0.001), 0);
        assert_eq!(cb.nearest_k(0.0, 3), vec![60, 59, 61]);
    }

    #[test]
    fn orthogonal_filter_gives_zero_power() {
        let h = DMatrix::from_element(2, 1, Complex64::new(1.0, 0.0));
        let v = DVector::from_element(1, Complex64::new(1.0, 0.0));
        let u = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert!(beamformed_power(&h, &v, &u, 1.0, 1.0).unwrap().abs() < 1e-30);
        let w = DVector::from_element(3, Complex64::new(1.0, 0.0));
        assert!(beamformed_power(&h, &v, &w, 1.0, 1.0).is_err());
    }
}
