//! Linear-inversion state tomography with the qubit SIC-POVM.
//!
//! With `E_i = ½|ξ^i⟩⟨ξ^i|` the outcome probabilities of a state `ρ` are
//! `p_i = ½⟨ξ^i|ρ|ξ^i⟩`, and the frame identity `Σ_i |ξ^i⟩⟨ξ^i| = 2I` inverts
//! this to `ρ = Σ_i (3p_i − ½)|ξ^i⟩⟨ξ^i|`.

use serde::{Deserialize, Serialize};

use crate::density::{state_fidelity, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Spinor};
use crate::protocols::sic::{sic_inputs, sic_vectors, ELEMENT_SITES};
use crate::walk::PositionDistribution;

/// Accepted deviation of `Σ p_i` from 1 for measured rows.
pub const SUM_TOL: f64 = 2e-2;

/// Outcome probabilities `p_1 … p_4`, indexed by SIC element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct SicOutcome([f64; 4]);

impl SicOutcome {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        for v in p {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidOutcome(format!(
                    "probability {v} outside [0, 1]"
                )));
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidOutcome(format!(
                "probabilities sum to {total}, expected 1 within {SUM_TOL}"
            )));
        }
        Ok(Self(p))
    }

    /// From walker probabilities listed as `[P(0), P(2), P(4), P(6)]`.
    pub fn from_positions(p: [f64; 4]) -> Result<Self> {
        let [p0, p2, p4, p6] = p;
        Self::new([p6, p4, p0, p2])
    }

    pub fn from_distribution(dist: &PositionDistribution) -> Result<Self> {
        Self::new(ELEMENT_SITES.map(|x| dist.get(x)))
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Rescaled to sum exactly to 1.
    pub fn normalized(&self) -> [f64; 4] {
        let t = self.total();
        self.0.map(|p| p / t)
    }
}

impl TryFrom<[f64; 4]> for SicOutcome {
    type Error = Error;
    fn try_from(p: [f64; 4]) -> Result<Self> {
        SicOutcome::new(p)
    }
}

impl From<SicOutcome> for [f64; 4] {
    fn from(o: SicOutcome) -> [f64; 4] {
        o.0
    }
}

/// `Σ_i (3p_i − ½)|ξ^i⟩⟨ξ^i|` without renormalizing; trace is `3Σp_i − 2`.
pub fn reconstruct_raw(p: [f64; 4]) -> Mat2 {
    sic_vectors()
        .iter()
        .zip(p)
        .map(|(xi, pi)| xi.projector().scale_real(3.0 * pi - 0.5))
        .sum()
}

/// Linear-inversion estimate from a renormalized outcome row. The result may
/// have a slightly negative eigenvalue; see [`project_psd`].
pub fn reconstruct(outcome: &SicOutcome) -> DensityMatrix {
    DensityMatrix::new(reconstruct_raw(outcome.normalized()))
        .expect("inversion of a normalized row is Hermitian with unit trace")
}

/// `p_i = ½⟨ξ^i|ρ|ξ^i⟩`.
pub fn forward_probabilities(rho: &Mat2) -> [f64; 4] {
    sic_vectors().map(|xi| 0.5 * rho.expectation(&xi).re)
}

/// Clips negative eigenvalues to zero and rescales to unit trace.
pub fn project_psd(rho: &DensityMatrix) -> DensityMatrix {
    let [x, y, z] = rho.bloch();
    let r = (x * x + y * y + z * z).sqrt();
    if r <= 1.0 {
        return *rho;
    }
    // eigenvalues (1 ± r)/2: clipping the negative one and renormalizing
    // leaves the pure state along the Bloch direction
    DensityMatrix::from_bloch([x / r, y / r, z / r])
}

/// Fidelity `⟨ψ^i|ρ_i|ψ^i⟩` of each raw reconstruction with its prepared input.
pub fn fidelity_report(outcomes: &[SicOutcome; 4]) -> [f64; 4] {
    let inputs = sic_inputs();
    let mut out = [0.0; 4];
    for (i, (o, psi)) in outcomes.iter().zip(inputs.iter()).enumerate() {
        out[i] = fidelity(o, psi);
    }
    out
}

fn fidelity(outcome: &SicOutcome, psi: &Spinor) -> f64 {
    state_fidelity(reconstruct(outcome).matrix(), psi).expect("SIC inputs are normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{SIC_DISTRIBUTIONS, SIC_FIDELITIES};

    #[test]
    fn uniform_outcome_is_maximally_mixed() {
        let rho = reconstruct(&SicOutcome::new([0.25; 4]).unwrap());
        assert!(rho.matrix().max_abs_diff(&Mat2::identity().scale_real(0.5)) < 1e-15);
        let report = fidelity_report(&[SicOutcome::new([0.25; 4]).unwrap(); 4]);
        for f in report {
            assert!((f - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_state_round_trip() {
        let psi = Spinor::real(0.6, 0.8);
        let p = forward_probabilities(&psi.projector());
        let rho = reconstruct(&SicOutcome::new(p).unwrap());
        assert!(rho.matrix().max_abs_diff(&psi.projector()) < 1e-12);
    }

    #[test]
    fn first_measured_row() {
        let o = SicOutcome::new([0.0149, 0.3327, 0.3246, 0.3277]).unwrap();
        let rho = reconstruct(&o);
        assert!((rho.matrix().0[0][0].re - 0.0299).abs() < 5e-3);
        assert!((rho.matrix().0[1][1].re - 0.9701).abs() < 5e-3);
        assert_eq!(o, SicOutcome::from_positions(SIC_DISTRIBUTIONS[0]).unwrap());
        let f = fidelity(&o, &sic_inputs()[0]);
        assert!((f - SIC_FIDELITIES[0]).abs() < 5e-3);
    }

    #[test]
    fn raw_trace() {
        let p = [0.3, 0.3, 0.3, 0.3];
        assert!((reconstruct_raw(p).trace().re - (3.0 * 1.2 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn projection_clips() {
        let over = DensityMatrix::new(Mat2::real(1.1, 0.0, 0.0, -0.1)).unwrap();
        let p = project_psd(&over);
        assert!(p.matrix().max_abs_diff(&Mat2::real(1.0, 0.0, 0.0, 0.0)) < 1e-12);
        let fine = DensityMatrix::from_bloch([0.1, -0.2, 0.3]);
        assert_eq!(project_psd(&fine), fine);
        assert_eq!(project_psd(&p), p);
    }

    #[test]
    fn invalid_rows() {
        assert!(SicOutcome::new([0.5, 0.5, 0.5, 0.5]).is_err());
        assert!(SicOutcome::new([-0.1, 0.4, 0.4, 0.3]).is_err());
        assert!(SicOutcome::new([0.26, 0.25, 0.25, 0.25]).is_ok());
    }
}
