//! Antenna orientation algebra: basic rotations, the composed UE orientation
//! matrix, spherical basis vectors and the GCS/LCS field transformation.

use nalgebra::{Matrix3, Vector3};

use crate::scenario::OrientationAngles;

/// Real 3×3 rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(pub Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        RotationMatrix(Matrix3::identity())
    }

    /// Right-hand rotation about the x axis.
    pub fn about_x(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        RotationMatrix(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    /// Right-hand rotation about the y axis.
    pub fn about_y(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        RotationMatrix(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    /// Right-hand rotation about the z axis.
    pub fn about_z(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        RotationMatrix(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    pub fn transpose(&self) -> Self {
        RotationMatrix(self.0.transpose())
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// Maps a GCS vector into the local frame (Rᵀ v).
    pub fn to_local(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0.transpose() * v
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Largest absolute entry of RᵀR − I.
    pub fn orthonormality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).amax()
    }

    pub fn compose(&self, other: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * other.0)
    }
}

/// The three basic rotations `(R_x, R_y, R_z)` for the same angle.
pub fn basic_rotations(theta: f64) -> [RotationMatrix; 3] {
    [
        RotationMatrix::about_x(theta),
        RotationMatrix::about_y(theta),
        RotationMatrix::about_z(theta),
    ]
}

/// UE orientation matrix `R_z(φ₀)·R_y(θ₀)`, written out entrywise.
pub fn compose_rotation(o: OrientationAngles) -> RotationMatrix {
    let (st, ct) = o.theta0.sin_cos();
    let (sp, cp) = o.phi0.sin_cos();
    RotationMatrix(Matrix3::new(
        cp * ct,
        -sp,
        cp * st,
        sp * ct,
        cp,
        sp * st,
        -st,
        0.0,
        ct,
    ))
}

/// Unit basis vectors `(e_θ, e_φ)` at zenith angle `theta`, azimuth `phi`.
pub fn spherical_basis(theta: f64, phi: f64) -> (Vector3<f64>, Vector3<f64>) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    (
        Vector3::new(ct * cp, ct * sp, -st),
        Vector3::new(-sp, cp, 0.0),
    )
}

/// Unit propagation direction for zenith angle `theta`, azimuth `phi`.
pub fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// Zenith and azimuth angles of a (not necessarily unit) vector.
pub fn angles_of(v: &Vector3<f64>) -> (f64, f64) {
    let r = v.norm();
    let theta = (v.z / r).clamp(-1.0, 1.0).acos();
    let phi = v.y.atan2(v.x);
    (theta, phi)
}

/// LCS angles `(θ′, φ′)` seen by a device with orientation `r` for a GCS
/// direction `(θ, φ)`.
pub fn lcs_angles(r: &RotationMatrix, theta: f64, phi: f64) -> (f64, f64) {
    angles_of(&r.to_local(&direction(theta, phi)))
}

/// Field-pattern rotation between GCS and LCS for one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationTransform {
    pub cos_psi: f64,
    pub sin_psi: f64,
}

impl OrientationTransform {
    /// Rotates an LCS field pattern `(F_θ′, F_φ′)` into GCS `(F_θ, F_φ)`.
    pub fn to_gcs(&self, f_theta_lcs: f64, f_phi_lcs: f64) -> (f64, f64) {
        (
            self.cos_psi * f_theta_lcs - self.sin_psi * f_phi_lcs,
            self.sin_psi * f_theta_lcs + self.cos_psi * f_phi_lcs,
        )
    }

    /// Expanded scalar form of the two bilinear products for
    /// `R = R_z(φ₀)·R_y(θ₀)`. Depends on the GCS azimuth only through φ − φ₀.
    pub fn closed_form(gcs: (f64, f64), lcs: (f64, f64), o: OrientationAngles) -> Self {
        let (theta, phi) = gcs;
        let (theta_l, phi_l) = lcs;
        let rel = phi - o.phi0;
        let (st, ct) = theta.sin_cos();
        let (st0, ct0) = o.theta0.sin_cos();
        let (sr, cr) = rel.sin_cos();
        let (stl, ctl) = theta_l.sin_cos();
        let (spl, cpl) = phi_l.sin_cos();
        let cos_psi = (ct * ct0 * cr + st * st0) * ctl * cpl + ct * sr * ctl * spl
            - stl * (ct * st0 * cr - st * ct0);
        let sin_psi = -ct0 * sr * ctl * cpl + cr * ctl * spl + st0 * sr * stl;
        OrientationTransform { cos_psi, sin_psi }
    }
}

/// `cos ψ = e_θ(θ,φ)ᵀ R e_θ(θ′,φ′)` and `sin ψ = e_φ(θ,φ)ᵀ R e_θ(θ′,φ′)`.
pub fn orientation_transform(
    gcs: (f64, f64),
    lcs: (f64, f64),
    r: &RotationMatrix,
) -> OrientationTransform {
    let (e_theta, e_phi) = spherical_basis(gcs.0, gcs.1);
    let (e_theta_l, _) = spherical_basis(lcs.0, lcs.1);
    let rotated = r.apply(&e_theta_l);
    OrientationTransform {
        cos_psi: e_theta.dot(&rotated),
        sin_psi: e_phi.dot(&rotated),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &Matrix3<f64>, b: &Matrix3<f64>, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    #[test]
    fn zero_angle_is_identity() {
        for r in basic_rotations(0.0) {
            assert!(close(&r.0, &Matrix3::identity(), 0.0));
        }
        let r = compose_rotation(OrientationAngles::aligned());
        assert!(close(&r.0, &Matrix3::identity(), 0.0));
    }

    #[test]
    fn quarter_turn_about_z() {
        let v = RotationMatrix::about_z(FRAC_PI_2).apply(&Vector3::new(1.0, 0.0, 0.0));
        assert!((v - Vector3::new(0.0, 1.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn rotation_and_inverse_cancel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(-PI..PI);
            for axis in 0..3 {
                let fwd = basic_rotations(t)[axis];
                let back = basic_rotations(-t)[axis];
                assert!(close(&fwd.compose(&back).0, &Matrix3::identity(), 1e-14));
            }
        }
    }

    #[test]
    fn tilted_orientation_first_row() {
        let r = compose_rotation(OrientationAngles::new(FRAC_PI_2, 0.0));
        let row = r.0.row(0);
        assert!((row[0]).abs() < 1e-15);
        assert!((row[1]).abs() < 1e-15);
        assert!((row[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn basis_at_horizon() {
        let (et, ep) = spherical_basis(FRAC_PI_2, 0.0);
        assert!((et - Vector3::new(0.0, 0.0, -1.0)).amax() < 1e-15);
        assert!((ep - Vector3::new(0.0, 1.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn basis_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (et, ep) = spherical_basis(rng.gen_range(0.0..PI), rng.gen_range(-PI..PI));
            assert!(et.dot(&ep).abs() < 1e-14);
            assert!((et.norm() - 1.0).abs() < 1e-14);
            assert!((ep.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn aligned_frames_have_no_rotation() {
        let t = orientation_transform((1.1, 0.4), (1.1, 0.4), &RotationMatrix::identity());
        assert!((t.cos_psi - 1.0).abs() < 1e-14);
        assert!(t.sin_psi.abs() < 1e-14);
    }

    #[test]
    fn to_gcs_rotates_pattern() {
        let t = OrientationTransform {
            cos_psi: 0.0,
            sin_psi: 1.0,
        };
        let (ft, fp) = t.to_gcs(1.0, 0.0);
        assert!(ft.abs() < 1e-15 && (fp - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lcs_angles_roundtrip_identity() {
        let (t, p) = lcs_angles(&RotationMatrix::identity(), 1.2, -0.7);
        assert!((t - 1.2).abs() < 1e-12 && (p + 0.7).abs() < 1e-12);
    }
}
