//! Published experimental settings and measurements, kept for comparison.
//!
//! Values are transcribed as printed; uncertainties are one standard error
//! in the last quoted digits.

/// One wave-plate setting row of the discrimination experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsdRow {
    pub phi_deg: f64,
    /// `+1` for `|φ+⟩`, `−1` for `|φ−⟩`.
    pub sign: i8,
    /// HWP angle at `x = −1`, step 2.
    pub hwp_minus1_step2: f64,
    /// HWP angle at `x = +1`, step 2.
    pub hwp_plus1_step2: f64,
    /// HWP angle at `x = 0`, step 3.
    pub hwp_0_step3: f64,
    pub inconclusive: f64,
    pub inconclusive_err: f64,
    pub distance: f64,
    pub distance_err: f64,
}

const fn usd(phi: f64, sign: i8, plus1: f64, eta: f64, eta_err: f64, d: f64, d_err: f64) -> UsdRow {
    UsdRow {
        phi_deg: phi,
        sign,
        hwp_minus1_step2: 45.0,
        hwp_plus1_step2: plus1,
        hwp_0_step3: 22.5,
        inconclusive: eta,
        inconclusive_err: eta_err,
        distance: d,
        distance_err: d_err,
    }
}

pub const USD_ROWS: [UsdRow; 12] = [
    usd(45.0, 1, 12.23, 0.7139, 0.0030, 0.0171, 0.0046),
    usd(54.0, 1, 15.32, 0.5963, 0.0038, 0.0184, 0.0047),
    usd(63.0, 1, 18.9, 0.4638, 0.0045, 0.0192, 0.0047),
    usd(72.0, 1, 23.3, 0.3166, 0.0054, 0.0127, 0.0046),
    usd(81.0, 1, 29.33, 0.1616, 0.0062, 0.0066, 0.0044),
    usd(90.0, 1, 45.0, 0.0060, 0.0070, 0.0060, 0.0035),
    usd(45.0, -1, 12.23, 0.7125, 0.0031, 0.0152, 0.0045),
    usd(54.0, -1, 15.32, 0.5934, 0.0039, 0.0156, 0.0047),
    usd(63.0, -1, 18.9, 0.4635, 0.0045, 0.0183, 0.0046),
    usd(72.0, -1, 23.3, 0.3146, 0.0055, 0.0136, 0.0049),
    usd(81.0, -1, 29.33, 0.1606, 0.0063, 0.0071, 0.0043),
    usd(90.0, -1, 45.0, 0.0080, 0.0071, 0.0080, 0.0036),
];

/// Conclusive probabilities measured for the equal-weight superposition at 45°:
/// `(P(1), P(−1), σ)`.
pub const USD_SUPERPOSITION_45: (f64, f64, f64) = (0.0854, 0.0850, 0.0015);

/// Wave plate used for a SIC coin: `(step, mode, hwp, qwp)` angles in degrees.
/// When both are present the HWP is traversed first.
pub const SIC_PLATES: [(u32, i64, Option<f64>, Option<f64>); 7] = [
    (2, 1, Some(-22.5), None),
    (2, -1, Some(45.0), None),
    (3, 0, Some(67.5), None),
    (4, 1, Some(17.63), None),
    (4, -1, Some(45.0), None),
    (5, 0, Some(52.5), Some(45.0)),
    (6, -1, Some(45.0), None),
];

/// Measured SIC distributions `[P(0), P(2), P(4), P(6)]` for inputs 1..=4.
pub const SIC_DISTRIBUTIONS: [[f64; 4]; 4] = [
    [0.3246, 0.3277, 0.3327, 0.0149],
    [0.3398, 0.3135, 0.0345, 0.3123],
    [0.0335, 0.3137, 0.3432, 0.3104],
    [0.3158, 0.0329, 0.3419, 0.3094],
];

/// Reported distances of those distributions from theory.
pub const SIC_DISTANCES: [f64; 4] = [0.0149, 0.0401, 0.0425, 0.0415];

/// Reported reconstructed density matrices, `([[Re]], [[Im]])` per input.
/// Real and imaginary parts of a 2×2 matrix.
pub type SplitMatrix = ([[f64; 2]; 2], [[f64; 2]; 2]);

pub const SIC_DENSITY_MATRICES: [SplitMatrix; 4] = [
    (
        [[0.0299, 0.0093], [0.0093, 0.9701]],
        [[0.0, 0.0038], [-0.0038, 0.0]],
    ),
    (
        [[0.6247, -0.4132], [-0.4132, 0.3753]],
        [[0.0, -0.0322], [0.0322, 0.0]],
    ),
    (
        [[0.6209, 0.2386], [0.2386, 0.3791]],
        [[0.0, 0.3432], [-0.3432, 0.0]],
    ),
    (
        [[0.6188, 0.2370], [0.2370, 0.3812]],
        [[0.0, -0.3465], [0.3465, 0.0]],
    ),
];

/// Reported fidelities of those matrices with the prepared inputs.
pub const SIC_FIDELITIES: [f64; 4] = [0.9701, 0.9311, 0.9330, 0.9342];

/// Reported interferometric visibility per step.
pub const VISIBILITY: f64 = 0.992;
