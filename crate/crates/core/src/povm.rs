//! Measurement operators induced on the coin by walking and then measuring
//! the walker's position.
//!
//! Column `b` of the Kraus operator `K_x` is the spinor found at site `x`
//! after evolving the basis coin `|b⟩`, so by linearity the final spinor at
//! `x` for any input `ψ` is `K_x ψ`, and `P(x) = ⟨ψ|K_x†K_x|ψ⟩`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Spinor};
use crate::walk::{evolve_state, CoinSchedule, Position, WalkerCoinState};

/// Kraus operators whose norm falls below this are reported as exact zeros.
pub const ZERO_KRAUS_NORM: f64 = 1e-12;
/// Default tolerance for [`match_rank1`].
pub const RANK1_TOL: f64 = 1e-8;

/// Per-site coin-in → coin-out amplitude transfer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausSet {
    operators: BTreeMap<Position, Mat2>,
}

impl KrausSet {
    pub fn get(&self, position: Position) -> Option<&Mat2> {
        self.operators.get(&position)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Position, &Mat2)> {
        self.operators.iter().map(|(x, k)| (*x, k))
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Max-entry deviation of `Σ K_x†K_x` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        self.operators
            .values()
            .map(|k| k.adjoint() * *k)
            .sum::<Mat2>()
            .max_abs_diff(&Mat2::identity())
    }
}

/// One POVM element `E_x = K_x†K_x` labelled by its final site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmElement {
    pub position: Position,
    pub operator: Mat2,
}

impl PovmElement {
    pub fn probability(&self, psi: &Spinor) -> f64 {
        self.operator.expectation(psi).re
    }

    pub fn trace(&self) -> f64 {
        self.operator.trace().re
    }
}

/// Kraus operators of an `steps`-step walk starting at `initial_position`.
///
/// Every site in the light cone `initial_position + {−N, −N+2, …, N}` is
/// listed, with an exact zero where no amplitude can arrive.
pub fn kraus_from_walk(
    schedule: &CoinSchedule,
    steps: u32,
    initial_position: Position,
) -> KrausSet {
    let columns: Vec<WalkerCoinState> = (0..2)
        .map(|b| {
            let start = WalkerCoinState::localized(initial_position, Spinor::basis(b));
            evolve_state(&start, schedule, 1, steps)
        })
        .collect();
    let reach = steps as Position;
    let operators = (-reach..=reach)
        .step_by(2)
        .map(|offset| {
            let x = initial_position + offset;
            let k = Mat2::from_columns(&columns[0].get(x), &columns[1].get(x));
            let k = if k.frobenius_sqr().sqrt() < ZERO_KRAUS_NORM {
                Mat2::zeros()
            } else {
                k
            };
            (x, k)
        })
        .collect();
    KrausSet { operators }
}

/// `E_x = K_x†K_x` for every listed site, ordered by position.
pub fn povm_from_kraus(kraus: &KrausSet) -> Vec<PovmElement> {
    kraus
        .iter()
        .map(|(position, k)| {
            let e = k.adjoint() * *k;
            // symmetrize away rounding so the element is Hermitian to the last bit
            let operator = (e + e.adjoint()).scale_real(0.5);
            PovmElement { position, operator }
        })
        .collect()
}

pub fn povm_sum(elements: &[PovmElement]) -> Mat2 {
    elements.iter().map(|e| e.operator).sum()
}

/// Result of comparing an element with `weight·|target⟩⟨target|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank1Match {
    pub matches: bool,
    /// Max-entry residual `‖E − w·|t⟩⟨t|‖_max`.
    pub residual: f64,
}

/// Checks `E ≈ weight·|target⟩⟨target|` entrywise within [`RANK1_TOL`].
pub fn match_rank1(element: &PovmElement, target: &Spinor, weight: f64) -> Result<Rank1Match> {
    if (target.norm_sqr() - 1.0).abs() > 1e-9 {
        return Err(Error::TargetNotNormalized);
    }
    if !(weight > 0.0 && weight <= 1.0) {
        return Err(Error::InvalidWeight(weight));
    }
    let residual = element
        .operator
        .max_abs_diff(&target.projector().scale_real(weight));
    Ok(Rank1Match {
        matches: residual <= RANK1_TOL,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_gives_identity() {
        let k = kraus_from_walk(&CoinSchedule::new(), 0, 4);
        assert_eq!(k.len(), 1);
        assert_eq!(k.get(4), Some(&Mat2::identity()));
    }

    #[test]
    fn one_identity_step_splits_basis() {
        let k = kraus_from_walk(&CoinSchedule::new(), 1, 0);
        assert_eq!(k.get(1), Some(&Spinor::up().projector()));
        assert_eq!(k.get(-1), Some(&Spinor::down().projector()));
        let e = povm_from_kraus(&k);
        assert_eq!(e[0].position, -1);
        assert_eq!(e[0].operator, Spinor::down().projector());
        assert_eq!(e[1].operator, Spinor::up().projector());
    }

    #[test]
    fn unreachable_sites_listed_as_zero() {
        // identity coins: after two steps nothing is at 0
        let k = kraus_from_walk(&CoinSchedule::new(), 2, 0);
        assert_eq!(k.len(), 3);
        assert_eq!(k.get(0), Some(&Mat2::zeros()));
        assert!(k.completeness_defect() < 1e-15);
    }

    #[test]
    fn rank1_examples() {
        let e = PovmElement {
            position: 0,
            operator: Spinor::up().projector().scale_real(0.5),
        };
        let m = match_rank1(&e, &Spinor::up(), 0.5).unwrap();
        assert!(m.matches);
        assert_eq!(m.residual, 0.0);
        assert!(!match_rank1(&e, &Spinor::down(), 0.5).unwrap().matches);
        assert_eq!(
            match_rank1(&e, &Spinor::up(), 0.0).unwrap_err(),
            Error::InvalidWeight(0.0)
        );
        assert_eq!(
            match_rank1(&e, &Spinor::real(1.0, 1.0), 0.5).unwrap_err(),
            Error::TargetNotNormalized
        );
    }
}
