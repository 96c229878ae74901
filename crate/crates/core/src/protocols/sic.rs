//! Qubit SIC-POVM from a six-step walk.
//!
//! The four SIC vectors are `|ξ¹⟩ = |0⟩` and `|ξ^k⟩ = (|0⟩ + c_k√2|1⟩)/√3`
//! with `c = 1, λ, λ*` and `λ = e^{2πi/3}`. Each input `|ψ^i⟩` is orthogonal to
//! `|ξ^i⟩`, so after the walk it never reaches the site carrying `E ∝ |ξ^i⟩⟨ξ^i|`
//! and is spread evenly over the other three.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Spinor, ONE, ZERO};
use crate::walk::{CoinSchedule, Position, PositionDistribution, WalkSpec, WalkerCoinState};

pub const STEPS: u32 = 6;

/// Site of SIC element `i` (1-based): `ξ¹ ↔ 6, ξ² ↔ 4, ξ³ ↔ 0, ξ⁴ ↔ 2`.
pub const ELEMENT_SITES: [Position; 4] = [6, 4, 0, 2];

/// Sites the walk can end on with nonzero probability.
pub const OUTPUT_SITES: [Position; 4] = [0, 2, 4, 6];

pub fn lambda() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// `|ξ¹⟩ … |ξ⁴⟩`.
pub fn sic_vectors() -> [Spinor; 4] {
    let s3 = 3f64.sqrt();
    let amp = (2f64 / 3.0).sqrt();
    let l = lambda();
    [
        Spinor::up(),
        Spinor::new(Complex64::new(1.0 / s3, 0.0), Complex64::new(amp, 0.0)),
        Spinor::new(Complex64::new(1.0 / s3, 0.0), l * amp),
        Spinor::new(Complex64::new(1.0 / s3, 0.0), l.conj() * amp),
    ]
}

/// Input coins `|ψ¹⟩ … |ψ⁴⟩`, with `⟨ξ^i|ψ^i⟩ = 0`.
pub fn sic_inputs() -> [Spinor; 4] {
    let s3 = 3f64.sqrt();
    let amp = (2f64 / 3.0).sqrt();
    let l = lambda();
    [
        Spinor::down(),
        Spinor::new(Complex64::new(amp, 0.0), Complex64::new(-1.0 / s3, 0.0)),
        Spinor::new(Complex64::new(amp, 0.0), -l / s3),
        Spinor::new(Complex64::new(amp, 0.0), -l.conj() / s3),
    ]
}

/// Coin schedule shared by all four inputs.
pub fn sic_schedule() -> CoinSchedule {
    let h = FRAC_1_SQRT_2;
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let e = |angle: f64| Complex64::from_polar(h, angle);
    let step5 = Mat2::new(e(-PI / 3.0), e(PI / 6.0), e(PI / 3.0), e(-PI / 6.0));
    let coins = [
        (2, 1, Mat2::real(h, -h, -h, -h)),
        (2, -1, Mat2::pauli_x()),
        (3, 0, Mat2::real(-h, h, h, h)),
        (4, 1, Mat2::real(s2 / s3, 1.0 / s3, 1.0 / s3, -s2 / s3)),
        (4, -1, Mat2::pauli_x()),
        (5, 0, step5),
        (6, -1, Mat2::pauli_x()),
    ];
    let mut schedule = CoinSchedule::new();
    for (n, x, c) in coins {
        schedule
            .set(n, x, c)
            .expect("SIC coins are unitary by construction");
    }
    schedule
}

/// Which of the four SIC inputs is prepared (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct SicSpec(usize);

impl SicSpec {
    pub fn new(index: usize) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(Self(index))
        } else {
            Err(Error::SicIndexOutOfRange(index))
        }
    }

    pub fn all() -> [SicSpec; 4] {
        [SicSpec(1), SicSpec(2), SicSpec(3), SicSpec(4)]
    }

    pub fn index(&self) -> usize {
        self.0
    }

    pub fn input_coin(&self) -> Spinor {
        sic_inputs()[self.0 - 1]
    }

    pub fn target_vector(&self) -> Spinor {
        sic_vectors()[self.0 - 1]
    }

    /// Site this input can never reach.
    pub fn forbidden_site(&self) -> Position {
        ELEMENT_SITES[self.0 - 1]
    }

    pub fn walk_spec(&self) -> WalkSpec {
        WalkSpec::new(STEPS, 0, self.input_coin(), sic_schedule())
            .expect("SIC inputs are normalized")
    }
}

impl TryFrom<usize> for SicSpec {
    type Error = Error;
    fn try_from(index: usize) -> Result<Self> {
        SicSpec::new(index)
    }
}

impl From<SicSpec> for usize {
    fn from(spec: SicSpec) -> usize {
        spec.0
    }
}

/// Six-step walk for input `index`.
pub fn sic_walk(index: usize) -> Result<WalkSpec> {
    Ok(SicSpec::new(index)?.walk_spec())
}

/// Uniform `1/3` over the three allowed sites.
pub fn sic_expected(index: usize) -> Result<PositionDistribution> {
    let forbidden = SicSpec::new(index)?.forbidden_site();
    Ok(OUTPUT_SITES
        .iter()
        .filter(|&&x| x != forbidden)
        .map(|&x| (x, 1.0 / 3.0))
        .collect())
}

/// Closed-form final states, all with coin `|0⟩`:
///
/// - `ψ¹ → (−|4⟩ − i|2⟩ + i|0⟩)/√3`
/// - `ψ² → (|6⟩ − e^{−iπ/3}|2⟩ − e^{iπ/3}|0⟩)/√3`
/// - `ψ³ → (|6⟩ − e^{−iπ/6}|4⟩ − |2⟩)/√3`
/// - `ψ⁴ → (|6⟩ − e^{iπ/6}|4⟩ − |0⟩)/√3`
pub fn expected_final_state(index: usize) -> Result<WalkerCoinState> {
    SicSpec::new(index)?;
    let a = 1.0 / 3f64.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let phase = |angle: f64| Complex64::from_polar(1.0, angle);
    let terms: Vec<(Position, Complex64)> = match index {
        1 => vec![(4, -ONE), (2, -i), (0, i)],
        2 => vec![(6, ONE), (2, -phase(-PI / 3.0)), (0, -phase(PI / 3.0))],
        3 => vec![(6, ONE), (4, -phase(-PI / 6.0)), (2, -ONE)],
        _ => vec![(6, ONE), (4, -phase(PI / 6.0)), (0, -ONE)],
    };
    let mut state = WalkerCoinState::empty();
    for (x, c) in terms {
        state.add(x, Spinor::new(c * a, ZERO));
    }
    Ok(state)
}
