//! Discrete-time coined walk on the integer line.
//!
//! Step `n` applies `U_n = T · Σ_x |x⟩⟨x| ⊗ C_{x,n}`: every position rotates
//! its coin with the scheduled operator (identity when none is scheduled),
//! then the shift `T` moves the `|0⟩` component one site right and the `|1⟩`
//! component one site left. Steps are numbered from 1.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CoinOperator, Mat2, Spinor};

/// Tolerance for accepting a scheduled coin as unitary.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance for accepting an input spinor or state as normalized.
pub const NORM_TOL: f64 = 1e-9;
/// Spinors with squared norm below this are dropped from a state.
pub const PRUNE_NORM_SQR: f64 = 1e-30;

pub type Position = i64;

/// Sparse walker ⊗ coin state: position → coin spinor.
///
/// Only spinors with non-negligible norm are stored. The representation is
/// linear; nothing here forces normalization, so unnormalized superpositions
/// can be evolved too.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkerCoinState {
    amplitudes: BTreeMap<Position, Spinor>,
}

impl WalkerCoinState {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `|position⟩ ⊗ coin`.
    pub fn localized(position: Position, coin: Spinor) -> Self {
        let mut state = Self::empty();
        state.add(position, coin);
        state
    }

    pub fn from_map(amplitudes: BTreeMap<Position, Spinor>) -> Self {
        let mut state = Self { amplitudes };
        state.prune();
        state
    }

    /// Adds `coin` to the spinor at `position`.
    pub fn add(&mut self, position: Position, coin: Spinor) {
        let entry = self.amplitudes.entry(position).or_insert_with(Spinor::zero);
        *entry = *entry + coin;
        if entry.norm_sqr() < PRUNE_NORM_SQR {
            self.amplitudes.remove(&position);
        }
    }

    pub fn get(&self, position: Position) -> Spinor {
        self.amplitudes
            .get(&position)
            .copied()
            .unwrap_or_else(Spinor::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Position, &Spinor)> {
        self.amplitudes.iter().map(|(x, s)| (*x, s))
    }

    pub fn support(&self) -> BTreeSet<Position> {
        self.amplitudes.keys().copied().collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(Spinor::norm_sqr).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `α·self + β·other`.
    pub fn linear_combination(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Self {
        let mut out = Self::empty();
        for (x, s) in self.iter() {
            out.add(x, s.scale(alpha));
        }
        for (x, s) in other.iter() {
            out.add(x, s.scale(beta));
        }
        out
    }

    /// Largest entrywise deviation over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.support()
            .union(&other.support())
            .map(|&x| self.get(x).max_abs_diff(&other.get(x)))
            .fold(0.0, f64::max)
    }

    /// Deviation from `other` after removing the best global phase.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let overlap: Complex64 = self.iter().map(|(x, s)| other.get(x).inner(s)).sum();
        let phase = if overlap.norm() > 0.0 {
            overlap.conj() / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let rotated = Self::from_map(
            self.amplitudes
                .iter()
                .map(|(x, s)| (*x, s.scale(phase)))
                .collect(),
        );
        rotated.max_abs_diff(other)
    }

    fn prune(&mut self) {
        self.amplitudes
            .retain(|_, s| s.norm_sqr() >= PRUNE_NORM_SQR);
    }
}

/// Site- and step-dependent coin assignments. Unlisted sites use the identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<ScheduledCoin>", try_from = "Vec<ScheduledCoin>")]
pub struct CoinSchedule {
    coins: BTreeMap<(u32, Position), CoinOperator>,
}

/// One `(step, position, operator)` record of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledCoin {
    pub step: u32,
    pub position: Position,
    pub matrix: CoinOperator,
}

impl CoinSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns `coin` to `(step, position)`, replacing any previous entry.
    pub fn set(&mut self, step: u32, position: Position, coin: CoinOperator) -> Result<()> {
        if step == 0 {
            return Err(Error::InvalidStep(step));
        }
        if !coin.is_unitary(UNITARY_TOL) {
            return Err(Error::NonUnitaryCoin {
                step,
                position,
                defect: coin.unitarity_defect(),
            });
        }
        self.coins.insert((step, position), coin);
        Ok(())
    }

    pub fn with(mut self, step: u32, position: Position, coin: CoinOperator) -> Result<Self> {
        self.set(step, position, coin)?;
        Ok(self)
    }

    pub fn get(&self, step: u32, position: Position) -> Option<&CoinOperator> {
        self.coins.get(&(step, position))
    }

    /// The operator acting at `(step, position)`, identity when unscheduled.
    pub fn coin(&self, step: u32, position: Position) -> CoinOperator {
        self.get(step, position)
            .copied()
            .unwrap_or_else(Mat2::identity)
    }

    /// Scheduled `(position, operator)` pairs for one step, ordered by position.
    pub fn at_step(&self, step: u32) -> impl Iterator<Item = (Position, &CoinOperator)> {
        self.coins
            .range((step, Position::MIN)..=(step, Position::MAX))
            .map(|((_, x), c)| (*x, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, Position, &CoinOperator)> {
        self.coins.iter().map(|((n, x), c)| (*n, *x, c))
    }

    pub fn len(&self) -> usize {
        self.coins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coins.is_empty()
    }

    pub fn last_step(&self) -> u32 {
        self.coins.keys().map(|(n, _)| *n).max().unwrap_or(0)
    }
}

impl From<CoinSchedule> for Vec<ScheduledCoin> {
    fn from(schedule: CoinSchedule) -> Self {
        schedule
            .coins
            .into_iter()
            .map(|((step, position), matrix)| ScheduledCoin {
                step,
                position,
                matrix,
            })
            .collect()
    }
}

impl TryFrom<Vec<ScheduledCoin>> for CoinSchedule {
    type Error = Error;

    fn try_from(records: Vec<ScheduledCoin>) -> Result<Self> {
        let mut schedule = CoinSchedule::new();
        for r in records {
            schedule.set(r.step, r.position, r.matrix)?;
        }
        Ok(schedule)
    }
}

/// A complete walk: step count, starting site and coin, and coin schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWalkSpec", into = "RawWalkSpec")]
pub struct WalkSpec {
    steps: u32,
    initial_position: Position,
    initial_coin: Spinor,
    schedule: CoinSchedule,
}

#[derive(Serialize, Deserialize)]
struct RawWalkSpec {
    steps: u32,
    #[serde(default)]
    initial_position: Position,
    initial_coin: Spinor,
    #[serde(default)]
    schedule: CoinSchedule,
}

impl TryFrom<RawWalkSpec> for WalkSpec {
    type Error = Error;
    fn try_from(raw: RawWalkSpec) -> Result<Self> {
        WalkSpec::new(
            raw.steps,
            raw.initial_position,
            raw.initial_coin,
            raw.schedule,
        )
    }
}

impl From<WalkSpec> for RawWalkSpec {
    fn from(spec: WalkSpec) -> Self {
        RawWalkSpec {
            steps: spec.steps,
            initial_position: spec.initial_position,
            initial_coin: spec.initial_coin,
            schedule: spec.schedule,
        }
    }
}

impl WalkSpec {
    pub fn new(
        steps: u32,
        initial_position: Position,
        initial_coin: Spinor,
        schedule: CoinSchedule,
    ) -> Result<Self> {
        let norm = initial_coin.norm_sqr();
        if !initial_coin.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            steps,
            initial_position,
            initial_coin,
            schedule,
        })
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn initial_position(&self) -> Position {
        self.initial_position
    }

    pub fn initial_coin(&self) -> Spinor {
        self.initial_coin
    }

    pub fn schedule(&self) -> &CoinSchedule {
        &self.schedule
    }

    /// Same walk with a different starting coin.
    pub fn with_coin(&self, coin: Spinor) -> Result<Self> {
        Self::new(
            self.steps,
            self.initial_position,
            coin,
            self.schedule.clone(),
        )
    }

    pub fn initial_state(&self) -> WalkerCoinState {
        WalkerCoinState::localized(self.initial_position, self.initial_coin)
    }

    /// Sites that can carry amplitude at the start of each step `1..=N`,
    /// for any initial coin (union over both basis coins).
    pub fn occupancy(&self) -> Vec<BTreeSet<Position>> {
        let mut states = [
            WalkerCoinState::localized(self.initial_position, Spinor::up()),
            WalkerCoinState::localized(self.initial_position, Spinor::down()),
        ];
        let mut out = Vec::with_capacity(self.steps as usize);
        for n in 1..=self.steps {
            let occupied: BTreeSet<Position> =
                states.iter().flat_map(WalkerCoinState::support).collect();
            out.push(occupied);
            for s in states.iter_mut() {
                *s = apply_step(s, &self.schedule, n);
            }
        }
        out
    }
}

/// One step `U_n` of the walk.
///
/// # Panics
/// If `n` is 0; steps are numbered from 1.
pub fn apply_step(state: &WalkerCoinState, schedule: &CoinSchedule, n: u32) -> WalkerCoinState {
    assert!(n >= 1, "walk steps are numbered from 1");
    let mut next = BTreeMap::<Position, Spinor>::new();
    for (x, spinor) in state.iter() {
        let rotated = schedule.coin(n, x).apply(spinor);
        let right = next.entry(x + 1).or_insert_with(Spinor::zero);
        right.0[0] += rotated.0[0];
        let left = next.entry(x - 1).or_insert_with(Spinor::zero);
        left.0[1] += rotated.0[1];
    }
    WalkerCoinState::from_map(next)
}

/// Runs steps `first..first+count` starting from `state`.
pub fn evolve_state(
    state: &WalkerCoinState,
    schedule: &CoinSchedule,
    first: u32,
    count: u32,
) -> WalkerCoinState {
    (first..first + count).fold(state.clone(), |s, n| apply_step(&s, schedule, n))
}

/// Final state of `spec` after all of its steps.
pub fn evolve(spec: &WalkSpec) -> WalkerCoinState {
    evolve_state(&spec.initial_state(), &spec.schedule, 1, spec.steps)
}

/// Probability of finding the walker at each site.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PositionDistribution {
    probabilities: BTreeMap<Position, f64>,
}

impl PositionDistribution {
    pub fn from_map(probabilities: BTreeMap<Position, f64>) -> Self {
        Self { probabilities }
    }

    pub fn get(&self, position: Position) -> f64 {
        self.probabilities.get(&position).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Position, f64)> + '_ {
        self.probabilities.iter().map(|(x, p)| (*x, *p))
    }

    pub fn support(&self) -> BTreeSet<Position> {
        self.probabilities.keys().copied().collect()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    pub fn as_map(&self) -> &BTreeMap<Position, f64> {
        &self.probabilities
    }

    /// True when every value lies in `[0, 1]` and the total is 1 within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.probabilities
            .values()
            .all(|p| p.is_finite() && (-tol..=1.0 + tol).contains(p))
            && (self.total() - 1.0).abs() <= tol
    }
}

impl FromIterator<(Position, f64)> for PositionDistribution {
    fn from_iter<It: IntoIterator<Item = (Position, f64)>>(iter: It) -> Self {
        let mut probabilities = BTreeMap::new();
        for (x, p) in iter {
            *probabilities.entry(x).or_insert(0.0) += p;
        }
        Self { probabilities }
    }
}

/// Projective position measurement statistics: `P(x) = ‖ψ_x‖²`.
pub fn position_distribution(state: &WalkerCoinState) -> PositionDistribution {
    state.iter().map(|(x, s)| (x, s.norm_sqr())).collect()
}

/// `d = ½ Σ_x |p(x) − q(x)|` over the union of supports.
pub fn l1_distance(p: &PositionDistribution, q: &PositionDistribution) -> f64 {
    let sites: BTreeSet<Position> = p.support().union(&q.support()).copied().collect();
    0.5 * sites
        .into_iter()
        .map(|x| (p.get(x) - q.get(x)).abs())
        .sum::<f64>()
}

/// Bhattacharyya overlap `Σ_x √(p(x)·q(x))`.
pub fn classical_fidelity(p: &PositionDistribution, q: &PositionDistribution) -> f64 {
    p.iter()
        .map(|(x, px)| (px.max(0.0) * q.get(x).max(0.0)).sqrt())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cos_deg, sin_deg};

    fn dist(pairs: &[(Position, f64)]) -> PositionDistribution {
        pairs.iter().copied().collect()
    }

    #[test]
    fn identity_step_shifts_up_component_right() {
        let s = WalkerCoinState::localized(0, Spinor::up());
        let out = apply_step(&s, &CoinSchedule::new(), 1);
        assert_eq!(out, WalkerCoinState::localized(1, Spinor::up()));
    }

    #[test]
    fn pauli_x_then_shift() {
        let schedule = CoinSchedule::new().with(1, 0, Mat2::pauli_x()).unwrap();
        let s = WalkerCoinState::localized(0, Spinor::down());
        let out = apply_step(&s, &schedule, 1);
        assert_eq!(out, WalkerCoinState::localized(1, Spinor::up()));
    }

    #[test]
    fn zero_steps_is_identity() {
        let coin = Spinor::real(0.6, 0.8);
        let spec = WalkSpec::new(0, 5, coin, CoinSchedule::new()).unwrap();
        assert_eq!(evolve(&spec), WalkerCoinState::localized(5, coin));
    }

    #[test]
    fn non_unitary_coin_rejected() {
        let err = CoinSchedule::new()
            .with(2, 1, Mat2::real(1.0, 1.0, 0.0, 1.0))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::NonUnitaryCoin {
                step: 2,
                position: 1,
                ..
            }
        ));
        assert_eq!(
            CoinSchedule::new()
                .with(0, 0, Mat2::identity())
                .unwrap_err(),
            Error::InvalidStep(0)
        );
    }

    #[test]
    fn unnormalized_initial_coin_rejected() {
        let err = WalkSpec::new(1, 0, Spinor::real(1.0, 1.0), CoinSchedule::new()).unwrap_err();
        assert!(matches!(err, Error::NotNormalized(_)));
    }

    #[test]
    fn localized_distribution() {
        let d = position_distribution(&WalkerCoinState::localized(0, Spinor::up()));
        assert_eq!(d, dist(&[(0, 1.0)]));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn usd_distribution_at_45_degrees() {
        // Squared amplitudes of √cos φ |3⟩ and √2 sin(φ/2) |1⟩.
        let t = sin_deg(45.0) / (1.0 + cos_deg(45.0));
        let r = (1.0 - t * t).sqrt();
        let schedule = CoinSchedule::new()
            .with(2, 1, Mat2::real(r, t, t, -r))
            .unwrap()
            .with(2, -1, Mat2::pauli_x())
            .unwrap()
            .with(3, 0, Mat2::hadamard())
            .unwrap();
        let spec =
            WalkSpec::new(3, 0, Spinor::real(cos_deg(22.5), sin_deg(22.5)), schedule).unwrap();
        let d = position_distribution(&evolve(&spec));
        let expected_3 = 0.5f64.sqrt();
        let expected_1 = 2.0 * sin_deg(22.5).powi(2);
        assert!((d.get(3) - expected_3).abs() < 1e-12);
        assert!((d.get(1) - expected_1).abs() < 1e-12);
        assert_eq!(d.get(-1), 0.0);
        assert!((expected_3 - 0.7071).abs() < 1e-4 && (expected_1 - 0.2929).abs() < 1e-4);
    }

    #[test]
    fn l1_examples() {
        let p = dist(&[(0, 0.5), (2, 0.5)]);
        assert_eq!(l1_distance(&p, &p), 0.0);
        assert_eq!(l1_distance(&p, &dist(&[(1, 1.0)])), 1.0);
        let measured = dist(&[(0, 0.3246), (2, 0.3277), (4, 0.3327), (6, 0.0149)]);
        let theory = dist(&[(0, 1.0 / 3.0), (2, 1.0 / 3.0), (4, 1.0 / 3.0)]);
        assert!((l1_distance(&measured, &theory) - 0.0149).abs() < 5e-4);
    }

    #[test]
    fn occupancy_tracks_reachable_sites() {
        let spec = WalkSpec::new(3, 0, Spinor::up(), CoinSchedule::new()).unwrap();
        let occ = spec.occupancy();
        assert_eq!(occ.len(), 3);
        assert_eq!(occ[0], BTreeSet::from([0]));
        assert_eq!(occ[1], BTreeSet::from([-1, 1]));
        // identity coins never mix, so the walk splits into two ballistic arms
        assert_eq!(occ[2], BTreeSet::from([-2, 2]));
    }

    #[test]
    fn schedule_serde_round_trip() {
        let schedule = CoinSchedule::new()
            .with(1, 0, Mat2::hadamard())
            .unwrap()
            .with(3, -2, Mat2::pauli_x())
            .unwrap();
        let records: Vec<ScheduledCoin> = schedule.clone().into();
        assert_eq!(CoinSchedule::try_from(records).unwrap(), schedule);
    }
}
