//! Unambiguous discrimination of `|φ±⟩ = cos(φ/2)|0⟩ ± sin(φ/2)|1⟩` with a
//! three-step walk.
//!
//! Step 2 applies a φ-dependent reflection at `x = +1` and `σ_x` at `x = −1`;
//! step 3 applies a Hadamard at `x = 0`. The walker then ends at `x = +1`
//! only for `|φ+⟩`, at `x = −1` only for `|φ−⟩`, and at `x = 3` (inconclusive)
//! with probability `cos φ` for either.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cos_deg, cos_sin_deg, Mat2, Spinor};
use crate::walk::{CoinSchedule, Position, PositionDistribution, WalkSpec, WalkerCoinState};

pub const STEPS: u32 = 3;
pub const PLUS_SITE: Position = 1;
pub const MINUS_SITE: Position = -1;
pub const INCONCLUSIVE_SITE: Position = 3;

fn check_phi(phi_deg: f64) -> Result<()> {
    if phi_deg.is_finite() && phi_deg > 0.0 && phi_deg <= 90.0 {
        Ok(())
    } else {
        Err(Error::PhiOutOfDomain(phi_deg))
    }
}

/// `tan(φ/2)` and `√(1 − tan²(φ/2))`, exact at φ = 90°.
fn half_angle_terms(phi_deg: f64) -> (f64, f64) {
    let (c, s) = cos_sin_deg(phi_deg);
    let tan_half = s / (1.0 + c);
    // 1 − tan²(φ/2) = cos φ / cos²(φ/2)
    let root = c.max(0.0).sqrt() / cos_deg(phi_deg / 2.0);
    (tan_half, root)
}

/// The pair `(|φ+⟩, |φ−⟩)`.
pub fn phi_states(phi_deg: f64) -> (Spinor, Spinor) {
    let (c, s) = cos_sin_deg(phi_deg / 2.0);
    (Spinor::real(c, s), Spinor::real(c, -s))
}

/// Reflection `[[√(1−t²), t], [t, −√(1−t²)]]` with `t = tan(φ/2)`.
pub fn discrimination_coin(phi_deg: f64) -> Result<Mat2> {
    check_phi(phi_deg)?;
    let (t, r) = half_angle_terms(phi_deg);
    Ok(Mat2::real(r, t, t, -r))
}

/// Three-step coin schedule for angle `phi_deg`.
pub fn usd_schedule(phi_deg: f64) -> Result<CoinSchedule> {
    CoinSchedule::new()
        .with(2, PLUS_SITE, discrimination_coin(phi_deg)?)?
        .with(2, MINUS_SITE, Mat2::pauli_x())?
        .with(3, 0, Mat2::hadamard())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum UsdInput {
    Plus,
    Minus,
    /// Unnormalized `a|φ+⟩ + b|φ−⟩`.
    Superposition {
        a: f64,
        b: f64,
    },
}

impl UsdInput {
    fn weights(&self) -> (f64, f64) {
        match *self {
            UsdInput::Plus => (1.0, 0.0),
            UsdInput::Minus => (0.0, 1.0),
            UsdInput::Superposition { a, b } => (a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UsdSpec {
    phi_deg: f64,
    input: UsdInput,
}

impl UsdSpec {
    pub fn new(phi_deg: f64, input: UsdInput) -> Result<Self> {
        check_phi(phi_deg)?;
        if let UsdInput::Superposition { a, b } = input {
            if !(a.is_finite() && b.is_finite()) || (a == 0.0 && b == 0.0) {
                return Err(Error::ZeroSuperposition);
            }
        }
        Ok(Self { phi_deg, input })
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi_deg
    }

    pub fn input(&self) -> UsdInput {
        self.input
    }

    /// Normalized input coin.
    pub fn input_coin(&self) -> Spinor {
        let (plus, minus) = phi_states(self.phi_deg);
        let (a, b) = self.input.weights();
        let raw = Spinor::new(
            plus.0[0] * a + minus.0[0] * b,
            plus.0[1] * a + minus.0[1] * b,
        );
        raw.normalized().expect("validated nonzero superposition")
    }

    pub fn walk_spec(&self) -> Result<WalkSpec> {
        WalkSpec::new(STEPS, 0, self.input_coin(), usd_schedule(self.phi_deg)?)
    }
}

/// Conclusive and inconclusive probabilities of one discrimination run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UsdOutcome {
    /// `P(1)`: conclusively `|φ+⟩`.
    pub conclusive_plus: f64,
    /// `P(−1)`: conclusively `|φ−⟩`.
    pub conclusive_minus: f64,
    /// `P(3) = η_err`.
    pub inconclusive: f64,
}

impl UsdOutcome {
    /// `P(1)/P(−1)`; `f64::INFINITY` when `P(−1) = 0`.
    pub fn conclusive_ratio(&self) -> f64 {
        if self.conclusive_minus == 0.0 {
            f64::INFINITY
        } else {
            self.conclusive_plus / self.conclusive_minus
        }
    }

    pub fn total(&self) -> f64 {
        self.conclusive_plus + self.conclusive_minus + self.inconclusive
    }

    pub fn to_distribution(&self) -> PositionDistribution {
        [
            (MINUS_SITE, self.conclusive_minus),
            (PLUS_SITE, self.conclusive_plus),
            (INCONCLUSIVE_SITE, self.inconclusive),
        ]
        .into_iter()
        .filter(|(_, p)| *p > 0.0)
        .collect()
    }

    pub fn from_distribution(dist: &PositionDistribution) -> Self {
        Self {
            conclusive_plus: dist.get(PLUS_SITE),
            conclusive_minus: dist.get(MINUS_SITE),
            inconclusive: dist.get(INCONCLUSIVE_SITE),
        }
    }
}

/// Closed-form outcome probabilities.
///
/// For `a|φ+⟩ + b|φ−⟩` with norm `N = a² + b² + 2ab·cos φ`:
/// `P(1) = 2a²sin²(φ/2)/N`, `P(−1) = 2b²sin²(φ/2)/N`, `P(3) = (a+b)²cos φ/N`.
pub fn usd_expected(spec: &UsdSpec) -> UsdOutcome {
    let (a, b) = spec.input.weights();
    let cos_phi = cos_deg(spec.phi_deg);
    let norm = a * a + b * b + 2.0 * a * b * cos_phi;
    UsdOutcome {
        conclusive_plus: a * a * (1.0 - cos_phi) / norm,
        conclusive_minus: b * b * (1.0 - cos_phi) / norm,
        inconclusive: (a + b) * (a + b) * cos_phi / norm,
    }
}

/// Optimal inconclusive probability for equal priors, `cos φ`.
pub fn inconclusive_bound(phi_deg: f64) -> f64 {
    cos_deg(phi_deg)
}

/// `|⟨φ+|φ−⟩|`, computed from the states themselves.
pub fn state_overlap(phi_deg: f64) -> f64 {
    let (plus, minus) = phi_states(phi_deg);
    plus.inner(&minus).norm()
}

/// Closed-form final walker-coin state for `|φ+⟩` (`sign = +1`) or `|φ−⟩`:
/// `√cos φ |3⟩|0⟩ + √2 sin(φ/2) |1⟩|0⟩` and
/// `√cos φ |3⟩|0⟩ − √2 sin(φ/2) |−1⟩|1⟩`.
pub fn expected_final_state(phi_deg: f64, input: UsdInput) -> Result<WalkerCoinState> {
    check_phi(phi_deg)?;
    let inconclusive = cos_deg(phi_deg).max(0.0).sqrt();
    let conclusive = 2f64.sqrt() * cos_sin_deg(phi_deg / 2.0).1;
    let mut state = WalkerCoinState::empty();
    state.add(INCONCLUSIVE_SITE, Spinor::real(inconclusive, 0.0));
    match input {
        UsdInput::Plus => state.add(PLUS_SITE, Spinor::real(conclusive, 0.0)),
        UsdInput::Minus => state.add(MINUS_SITE, Spinor::real(0.0, -conclusive)),
        UsdInput::Superposition { a, b } => {
            UsdSpec::new(phi_deg, input)?;
            let plus = expected_final_state(phi_deg, UsdInput::Plus)?;
            let minus = expected_final_state(phi_deg, UsdInput::Minus)?;
            let scale = 1.0 / (a * a + b * b + 2.0 * a * b * cos_deg(phi_deg)).sqrt();
            return Ok(plus.linear_combination(
                Complex64::new(a * scale, 0.0),
                &minus,
                Complex64::new(b * scale, 0.0),
            ));
        }
    }
    Ok(state)
}
