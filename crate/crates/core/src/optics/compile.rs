//! Synthesis of a coin operator from at most three wave plates.
//!
//! Write a target, up to global phase, as `u0·I − i(ux·X + uy·Y + uz·Z)` with
//! real unit `(u0, ux, uy, uz)`. A HWP at θ is `sin2θ·X + cos2θ·Z` and a
//! QWP at θ is `e^{iπ/4}(I − i(sin2θ·X + cos2θ·Z))/√2`, so all plate axes lie
//! in the X–Z plane. That gives closed forms for each family:
//!
//! - HWP alone: `u0 = uy = 0`, `2θ = atan2(ux, uz)`.
//! - QWP alone: `|u0| = 1/√2`, `uy = 0`.
//! - HWP then QWP: solvable iff `u0² + uy² = ½`.
//! - QWP, HWP, QWP: always solvable; the first QWP is fixed by
//!   `u0·cos t = uy·sin t` with `t = 2θ − atan2(ux, uz)`, which reduces the rest
//!   to the two-plate case.
//!
//! Every candidate is checked numerically; the shortest valid sequence wins,
//! then the one whose product is closest to the target without a phase, then
//! the smallest total `|θ|`.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::optics::waveplate::{compose, Waveplate};
use crate::walk::UNITARY_TOL;

/// Accepted phase distance between a compiled sequence and its target.
pub const COMPILE_TOL: f64 = 1e-9;
/// Relative phases closer than this (radians) count as tied.
const PHASE_TIE: f64 = 1e-6;

/// Real SU(2) coordinates `(u0, ux, uy, uz)` of `m` with its phase removed.
fn su2_coordinates(m: &Mat2) -> [f64; 4] {
    let root = m.det().sqrt();
    let v = m.scale(root.inv());
    let a = &v.0;
    [
        0.5 * (a[0][0] + a[1][1]).re,
        -0.5 * (a[1][0] + a[0][1]).im,
        0.5 * (a[1][0] - a[0][1]).re,
        0.5 * (a[1][1] - a[0][0]).im,
    ]
}

fn deg(rad: f64) -> f64 {
    rad.to_degrees()
}

fn hwp_candidates(target: &Mat2) -> Vec<Waveplate> {
    let [_, ux, _, uz] = su2_coordinates(target);
    let theta = 0.5 * deg(ux.atan2(uz));
    vec![Waveplate::hwp(theta), Waveplate::hwp(theta + 90.0)]
}

fn qwp_candidate(target: &Mat2) -> Waveplate {
    let [u0, ux, _, uz] = su2_coordinates(target);
    let sign = if u0 < 0.0 { -1.0 } else { 1.0 };
    Waveplate::qwp(0.5 * deg((sign * ux).atan2(sign * uz)))
}

/// Sequences `[HWP, QWP]` (HWP traversed first).
fn hwp_then_qwp(target: &Mat2) -> Vec<Vec<Waveplate>> {
    let [u0, ux, uy, uz] = su2_coordinates(target);
    let mu = ux.atan2(uz);
    let q = Waveplate::qwp(0.5 * deg(mu + (-uy).atan2(-u0)));
    let q_inv = q.matrix().adjoint();
    hwp_candidates(&(q_inv * *target))
        .into_iter()
        .map(|h| vec![h, q])
        .collect()
}

/// Sequences `[QWP, HWP]` (QWP traversed first).
fn qwp_then_hwp(target: &Mat2) -> Vec<Vec<Waveplate>> {
    let [u0, ux, uy, uz] = su2_coordinates(target);
    let mu = ux.atan2(uz);
    let q = Waveplate::qwp(0.5 * deg(mu + uy.atan2(-u0)));
    let q_inv = q.matrix().adjoint();
    hwp_candidates(&(*target * q_inv))
        .into_iter()
        .map(|h| vec![q, h])
        .collect()
}

/// Sequences `[QWP, HWP, QWP]`.
fn qwp_hwp_qwp(target: &Mat2) -> Vec<Vec<Waveplate>> {
    let [u0, ux, uy, uz] = su2_coordinates(target);
    let mu = ux.atan2(uz);
    let t = u0.atan2(uy);
    [t, t + std::f64::consts::PI]
        .into_iter()
        .flat_map(|t| {
            let first = Waveplate::qwp(0.5 * deg(mu + t));
            let rest = *target * first.matrix().adjoint();
            hwp_then_qwp(&rest).into_iter().map(move |mut seq| {
                seq.insert(0, first);
                seq
            })
        })
        .collect()
}

struct Candidate {
    plates: Vec<Waveplate>,
    residual: f64,
    phase: f64,
    angle_sum: f64,
}

impl Candidate {
    fn new(plates: Vec<Waveplate>, target: &Mat2) -> Self {
        let product = compose(&plates);
        Self {
            residual: product.phase_distance(target),
            phase: product.relative_phase(target).abs(),
            angle_sum: plates.iter().map(|p| p.angle_deg.abs()).sum(),
            plates,
        }
    }

    fn preference(&self, other: &Self) -> Ordering {
        self.plates
            .len()
            .cmp(&other.plates.len())
            .then_with(|| {
                if (self.phase - other.phase).abs() <= PHASE_TIE {
                    Ordering::Equal
                } else {
                    self.phase.total_cmp(&other.phase)
                }
            })
            .then_with(|| self.angle_sum.total_cmp(&other.angle_sum))
    }
}

/// Shortest wave-plate sequence (traversal order) realizing `target` up to a
/// global phase.
pub fn compile_coin(target: &Mat2) -> Result<Vec<Waveplate>> {
    if !target.is_unitary(UNITARY_TOL) {
        return Err(Error::NonUnitaryTarget(target.unitarity_defect()));
    }
    let mut sequences: Vec<Vec<Waveplate>> = vec![Vec::new()];
    sequences.extend(hwp_candidates(target).into_iter().map(|h| vec![h]));
    sequences.push(vec![qwp_candidate(target)]);
    sequences.extend(hwp_then_qwp(target));
    sequences.extend(qwp_then_hwp(target));
    sequences.extend(qwp_hwp_qwp(target));

    let mut best: Option<Candidate> = None;
    let mut closest = f64::INFINITY;
    for plates in sequences {
        let cand = Candidate::new(plates, target);
        closest = closest.min(cand.residual);
        if cand.residual > COMPILE_TOL {
            continue;
        }
        if best
            .as_ref()
            .is_none_or(|b| cand.preference(b) == Ordering::Less)
        {
            best = Some(cand);
        }
    }
    best.map(|c| c.plates).ok_or(Error::Compilation(closest))
}

/// Global phase `γ` with `compose(plates) = e^{iγ}·target` (approximately).
pub fn realized_phase(plates: &[Waveplate], target: &Mat2) -> Complex64 {
    Complex64::from_polar(1.0, compose(plates).relative_phase(target))
}
