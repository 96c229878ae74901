//! Jones matrices of ideal half- and quarter-wave plates.
//!
//! Angles are the optic axis measured from horizontal, in degrees. In the
//! `|H⟩ = |0⟩`, `|V⟩ = |1⟩` basis both plates are rotations of the Poincaré
//! sphere about an axis in the linear-polarization plane: a HWP by π, a QWP
//! by π/2.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{cos_sin_deg, Mat2};

/// `[[cos2θ, sin2θ], [sin2θ, −cos2θ]]`.
pub fn hwp_matrix(theta_deg: f64) -> Mat2 {
    let (c, s) = cos_sin_deg(2.0 * theta_deg);
    Mat2::real(c, s, s, -c)
}

/// `[[cos²θ + i·sin²θ, (1−i)·sinθ·cosθ], [(1−i)·sinθ·cosθ, sin²θ + i·cos²θ]]`.
pub fn qwp_matrix(theta_deg: f64) -> Mat2 {
    let (c, s) = cos_sin_deg(theta_deg);
    let off = Complex64::new(s * c, -s * c);
    Mat2::new(
        Complex64::new(c * c, s * s),
        off,
        off,
        Complex64::new(s * s, c * c),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PlateKind {
    Hwp,
    Qwp,
}

impl fmt::Display for PlateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlateKind::Hwp => f.write_str("HWP"),
            PlateKind::Qwp => f.write_str("QWP"),
        }
    }
}

/// HWP angles are reported in `[−90°, 90°)`.
pub fn normalize_hwp_angle(deg: f64) -> f64 {
    (deg + 90.0).rem_euclid(180.0) - 90.0
}

/// QWP angles are reported in `[−180°, 180°)`.
pub fn normalize_qwp_angle(deg: f64) -> f64 {
    (deg + 180.0).rem_euclid(360.0) - 180.0
}

/// A wave plate of a given kind and axis angle, not yet tied to a mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waveplate {
    pub kind: PlateKind,
    pub angle_deg: f64,
}

impl Waveplate {
    pub fn hwp(angle_deg: f64) -> Self {
        Self {
            kind: PlateKind::Hwp,
            angle_deg: normalize_hwp_angle(angle_deg),
        }
    }

    pub fn qwp(angle_deg: f64) -> Self {
        Self {
            kind: PlateKind::Qwp,
            angle_deg: normalize_qwp_angle(angle_deg),
        }
    }

    pub fn new(kind: PlateKind, angle_deg: f64) -> Self {
        match kind {
            PlateKind::Hwp => Self::hwp(angle_deg),
            PlateKind::Qwp => Self::qwp(angle_deg),
        }
    }

    pub fn matrix(&self) -> Mat2 {
        match self.kind {
            PlateKind::Hwp => hwp_matrix(self.angle_deg),
            PlateKind::Qwp => qwp_matrix(self.angle_deg),
        }
    }

    /// Same plate with its axis rotated by `delta_deg`.
    pub fn rotated(&self, delta_deg: f64) -> Self {
        Self::new(self.kind, self.angle_deg + delta_deg)
    }
}

/// Jones matrix of plates traversed in the given order (first plate acts first).
pub fn compose<'a, It>(plates: It) -> Mat2
where
    It: IntoIterator<Item = &'a Waveplate>,
{
    plates
        .into_iter()
        .fold(Mat2::identity(), |acc, p| p.matrix() * acc)
}
