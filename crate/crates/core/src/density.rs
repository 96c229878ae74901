//! Single-qubit density matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Spinor};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// Hermitian, unit-trace 2×2 matrix. Positivity is not enforced; raw
/// linear-inversion estimates can dip slightly below zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(m.hermiticity_defect()));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr));
        }
        Ok(Self(m))
    }

    pub fn pure(psi: &Spinor) -> Result<Self> {
        let n = psi.norm_sqr();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::TargetNotNormalized);
        }
        Self::new(psi.projector())
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat2::identity().scale_real(0.5))
    }

    /// `½(I + r·σ)` for a Bloch vector `r`.
    pub fn from_bloch(r: [f64; 3]) -> Self {
        let [x, y, z] = r;
        Self(Mat2::new(
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ))
    }

    pub fn bloch(&self) -> [f64; 3] {
        let m = &self.0 .0;
        [2.0 * m[0][1].re, -2.0 * m[0][1].im, (m[0][0] - m[1][1]).re]
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        self.0.hermitian_eigenvalues()
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }
}

/// `F = ⟨target|ρ|target⟩`.
///
/// Fails with [`Error::NotHermitian`] when `rho` is not Hermitian and
/// [`Error::TargetNotNormalized`] when the target has norm ≠ 1.
pub fn state_fidelity(rho: &Mat2, target: &Spinor) -> Result<f64> {
    if !rho.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian(rho.hermiticity_defect()));
    }
    if (target.norm_sqr() - 1.0).abs() > 1e-9 {
        return Err(Error::TargetNotNormalized);
    }
    Ok(rho.expectation(target).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_has_unit_fidelity() {
        let psi = Spinor::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let rho = DensityMatrix::pure(&psi).unwrap();
        assert!((state_fidelity(rho.matrix(), &psi).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_gives_one_half() {
        let rho = DensityMatrix::maximally_mixed();
        let psi = Spinor::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        assert!((state_fidelity(rho.matrix(), &psi).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn supplementary_rho_one() {
        // ρ₁ = Re + i·Im as printed for input |1⟩.
        let rho = Mat2::new(
            Complex64::new(0.0299, 0.0),
            Complex64::new(0.0093, 0.0038),
            Complex64::new(0.0093, -0.0038),
            Complex64::new(0.9701, 0.0),
        );
        let f = state_fidelity(&rho, &Spinor::down()).unwrap();
        assert!((f - 0.9701).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = Mat2::real(0.5, 0.2, 0.0, 0.5);
        assert!(matches!(
            state_fidelity(&m, &Spinor::up()),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian(_))));
        assert!(matches!(
            DensityMatrix::new(Mat2::real(0.7, 0.0, 0.0, 0.7)),
            Err(Error::BadTrace(_))
        ));
    }

    #[test]
    fn bloch_round_trip() {
        let r = [0.3, -0.4, 0.5];
        let rho = DensityMatrix::from_bloch(r);
        let back = rho.bloch();
        for k in 0..3 {
            assert!((back[k] - r[k]).abs() < 1e-15);
        }
        assert!(DensityMatrix::new(*rho.matrix()).is_ok());
    }
}
