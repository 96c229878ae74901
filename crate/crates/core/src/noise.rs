//! Monte Carlo model of experimental imperfections.
//!
//! Three effects are modelled:
//!
//! - **Angle jitter.** Every physical wave plate of the placement plan gets
//!   one Gaussian angle error per trial. The perturbed coin at a mode is
//!   `P(θ+ε)·P(θ)⁻¹·C`, so a zero error reproduces the scheduled coin exactly
//!   and a plate shared by two modes moves both.
//! - **Visibility.** At every step where some output mode receives both a
//!   `|0⟩` amplitude (from the left) and a `|1⟩` amplitude (from the right),
//!   the coherence between the two shift directions is multiplied by `V`.
//!   This is a dephasing of the coin after the shift, so it is completely
//!   positive and trace preserving.
//! - **Counting.** Detector counts at each site are Poisson with mean
//!   `N_c·P(x)`; estimated probabilities are counts over the realized total.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::optics::plan::{plan_isolated, plan_placement, WaveplatePlan};
use crate::walk::{
    classical_fidelity, evolve, l1_distance, position_distribution, CoinSchedule, Position,
    PositionDistribution, WalkSpec, WalkerCoinState,
};

/// Blocks with squared Frobenius norm below this are dropped.
const PRUNE: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Coherence retained at each interfering step, in `[0, 1]`.
    pub visibility: f64,
    /// Standard deviation of each plate's angle error, degrees.
    pub angle_jitter_deg: f64,
    /// Expected total number of detected photons per configuration.
    pub expected_counts: f64,
    pub seed: u64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            visibility: crate::reference::VISIBILITY,
            angle_jitter_deg: 0.3,
            expected_counts: 1e4,
            seed: 0,
        }
    }
}

impl NoiseParams {
    pub fn noiseless(expected_counts: f64, seed: u64) -> Self {
        Self {
            visibility: 1.0,
            angle_jitter_deg: 0.0,
            expected_counts,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::InvalidNoise(format!(
                "visibility {} outside [0, 1]",
                self.visibility
            )));
        }
        if !(self.angle_jitter_deg >= 0.0 && self.angle_jitter_deg.is_finite()) {
            return Err(Error::InvalidNoise(format!(
                "angle jitter {} must be finite and non-negative",
                self.angle_jitter_deg
            )));
        }
        if !(self.expected_counts > 0.0 && self.expected_counts.is_finite()) {
            return Err(Error::InvalidNoise(format!(
                "expected counts {} must be positive",
                self.expected_counts
            )));
        }
        Ok(())
    }
}

/// Density operator on position ⊗ coin, stored as 2×2 coin blocks
/// `ρ_{x,y} = ⟨x|ρ|y⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    blocks: BTreeMap<(Position, Position), Mat2>,
}

impl DensityOperator {
    pub fn pure(state: &WalkerCoinState) -> Self {
        let mut blocks = BTreeMap::new();
        for (x, a) in state.iter() {
            for (y, b) in state.iter() {
                blocks.insert((x, y), Mat2::outer(a, b));
            }
        }
        Self { blocks }
    }

    pub fn block(&self, x: Position, y: Position) -> Mat2 {
        self.blocks
            .get(&(x, y))
            .copied()
            .unwrap_or_else(Mat2::zeros)
    }

    pub fn trace(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|((x, y), _)| x == y)
            .map(|(_, b)| b.trace().re)
            .sum()
    }

    pub fn positions(&self) -> Vec<Position> {
        let mut xs: Vec<Position> = self.blocks.keys().flat_map(|(x, y)| [*x, *y]).collect();
        xs.sort_unstable();
        xs.dedup();
        xs
    }

    pub fn position_distribution(&self) -> PositionDistribution {
        self.blocks
            .iter()
            .filter(|((x, y), _)| x == y)
            .map(|((x, _), b)| (*x, b.trace().re))
            .filter(|(_, p)| *p > 0.0)
            .collect()
    }

    /// Dense matrix over `positions() ⊗ {0, 1}`.
    pub fn to_dense(&self) -> (Vec<Position>, DMatrix<Complex64>) {
        let xs = self.positions();
        let index: BTreeMap<Position, usize> =
            xs.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let dim = 2 * xs.len();
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for ((x, y), b) in &self.blocks {
            let (i, j) = (index[x], index[y]);
            for a in 0..2 {
                for c in 0..2 {
                    m[(2 * i + a, 2 * j + c)] = b.0[a][c];
                }
            }
        }
        (xs, m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (_, m) = self.to_dense();
        if m.nrows() == 0 {
            return 0.0;
        }
        let hermitian = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        hermitian
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        let mut keys: Vec<_> = self
            .blocks
            .keys()
            .chain(other.blocks.keys())
            .copied()
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|(x, y)| self.block(x, y).max_abs_diff(&other.block(x, y)))
            .fold(0.0, f64::max)
    }

    fn step(&self, schedule: &CoinSchedule, n: u32, visibility: f64) -> Self {
        let shift = |x: Position, a: usize| if a == 0 { x + 1 } else { x - 1 };
        let mut next: BTreeMap<(Position, Position), Mat2> = BTreeMap::new();
        for ((x, y), b) in &self.blocks {
            let rotated = schedule.coin(n, *x) * *b * schedule.coin(n, *y).adjoint();
            for a in 0..2 {
                for c in 0..2 {
                    let entry = next
                        .entry((shift(*x, a), shift(*y, c)))
                        .or_insert_with(Mat2::zeros);
                    entry.0[a][c] += rotated.0[a][c];
                }
            }
        }
        next.retain(|_, b| b.frobenius_sqr() >= PRUNE);

        let merges = next.iter().any(|((x, y), b)| {
            x == y && b.0[0][0].re > PRUNE.sqrt() && b.0[1][1].re > PRUNE.sqrt()
        });
        if merges && visibility < 1.0 {
            for b in next.values_mut() {
                b.0[0][1] *= visibility;
                b.0[1][0] *= visibility;
            }
        }
        Self { blocks: next }
    }
}

/// Noiseless walk as a density operator.
pub fn pure_density(spec: &WalkSpec) -> DensityOperator {
    DensityOperator::pure(&evolve(spec))
}

/// Placement plan used for angle jitter; falls back to one plate stack per
/// mode when the neighbour constraints cannot be met.
pub fn jitter_plan(spec: &WalkSpec) -> Result<WaveplatePlan> {
    plan_placement(spec).or_else(|_| plan_isolated(spec.schedule()))
}

/// Coins realized by `plan` after rotating each plate by a Gaussian error.
pub fn jittered_schedule<R: Rng + ?Sized>(
    schedule: &CoinSchedule,
    plan: &WaveplatePlan,
    sigma_deg: f64,
    rng: &mut R,
) -> CoinSchedule {
    if sigma_deg == 0.0 {
        return schedule.clone();
    }
    let normal = Normal::new(0.0, sigma_deg).expect("validated jitter");
    let perturbed = plan.perturbed(|_, _| normal.sample(rng));
    let mut out = schedule.clone();
    for (n, x) in plan.covered() {
        let nominal = plan.mode_operator(n, x);
        let actual = perturbed.mode_operator(n, x);
        let coin = actual * nominal.adjoint() * schedule.coin(n, x);
        out.set(n, x, coin)
            .expect("products of unitaries are unitary");
    }
    out
}

/// Evolution under a given (possibly jittered) schedule with visibility loss.
pub fn evolve_density(
    spec: &WalkSpec,
    schedule: &CoinSchedule,
    visibility: f64,
) -> DensityOperator {
    let start = DensityOperator::pure(&spec.initial_state());
    (1..=spec.steps()).fold(start, |rho, n| rho.step(schedule, n, visibility))
}

/// Noisy evolution with the angle errors drawn from `params.seed`.
pub fn noisy_evolve(spec: &WalkSpec, params: &NoiseParams) -> Result<DensityOperator> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    noisy_evolve_with(spec, params, None, &mut rng)
}

/// As [`noisy_evolve`], with an explicit RNG and optionally a precomputed plan.
pub fn noisy_evolve_with<R: Rng + ?Sized>(
    spec: &WalkSpec,
    params: &NoiseParams,
    plan: Option<&WaveplatePlan>,
    rng: &mut R,
) -> Result<DensityOperator> {
    let schedule = if params.angle_jitter_deg > 0.0 {
        let owned;
        let plan = match plan {
            Some(p) => p,
            None => {
                owned = jitter_plan(spec)?;
                &owned
            }
        };
        jittered_schedule(spec.schedule(), plan, params.angle_jitter_deg, rng)
    } else {
        spec.schedule().clone()
    };
    Ok(evolve_density(spec, &schedule, params.visibility))
}

/// Counts and estimated distribution from one simulated acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub counts: BTreeMap<Position, u64>,
    pub sampled: PositionDistribution,
    /// `l1_distance` between `sampled` and the distribution that was sampled.
    pub distance: f64,
}

impl TrialResult {
    pub fn total_counts(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Poisson counts with mean `N_c·P(x)` per site, seeded from `params.seed`.
pub fn sample_counts(dist: &PositionDistribution, params: &NoiseParams) -> Result<TrialResult> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    sample_counts_with(dist, params.expected_counts, &mut rng)
}

pub fn sample_counts_with<R: Rng + ?Sized>(
    dist: &PositionDistribution,
    expected_counts: f64,
    rng: &mut R,
) -> Result<TrialResult> {
    let draw = |rng: &mut R| -> BTreeMap<Position, u64> {
        dist.iter()
            .map(|(x, p)| {
                let mean = expected_counts * p;
                let n = if mean > 0.0 {
                    Poisson::new(mean)
                        .map(|d| d.sample(rng) as u64)
                        .unwrap_or(0)
                } else {
                    0
                };
                (x, n)
            })
            .collect()
    };
    let mut counts = draw(rng);
    if counts.values().sum::<u64>() == 0 {
        counts = draw(rng);
    }
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::NoCounts);
    }
    let sampled: PositionDistribution = counts
        .iter()
        .map(|(x, n)| (*x, *n as f64 / total as f64))
        .collect();
    let distance = l1_distance(&sampled, dist);
    Ok(TrialResult {
        counts,
        sampled,
        distance,
    })
}

/// One trial of an error budget, scored against the noiseless theory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetTrial {
    pub index: u64,
    pub distance: f64,
    pub fidelity: f64,
    pub counts: BTreeMap<Position, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub params: NoiseParams,
    pub theory: PositionDistribution,
    pub median_distance: f64,
    pub p90_distance: f64,
    pub mean_distance: f64,
    pub mean_fidelity: f64,
    pub trials: Vec<BudgetTrial>,
}

/// Independent random stream for trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_trial(
    spec: &WalkSpec,
    params: &NoiseParams,
    plan: Option<&WaveplatePlan>,
    theory: &PositionDistribution,
    index: u64,
) -> Result<BudgetTrial> {
    let mut rng = trial_rng(params.seed, index);
    let rho = noisy_evolve_with(spec, params, plan, &mut rng)?;
    let trial = sample_counts_with(
        &rho.position_distribution(),
        params.expected_counts,
        &mut rng,
    )?;
    Ok(BudgetTrial {
        index,
        distance: l1_distance(&trial.sampled, theory),
        fidelity: classical_fidelity(&trial.sampled, theory),
        counts: trial.counts,
    })
}

/// Value at quantile `q ∈ [0, 1]` of sorted data, linear interpolation.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Runs `trials` independent noisy acquisitions and summarizes their
/// distance from the noiseless distribution. Trials run in parallel;
/// results are ordered by trial index, so the summary is reproducible.
pub fn error_budget(spec: &WalkSpec, params: &NoiseParams, trials: usize) -> Result<ErrorBudget> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let theory = position_distribution(&evolve(spec));
    let plan = if params.angle_jitter_deg > 0.0 {
        Some(jitter_plan(spec)?)
    } else {
        None
    };
    let results: Vec<BudgetTrial> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(spec, params, plan.as_ref(), &theory, i))
        .collect::<Result<_>>()?;

    let mut distances: Vec<f64> = results.iter().map(|t| t.distance).collect();
    distances.sort_by(f64::total_cmp);
    let n = results.len() as f64;
    Ok(ErrorBudget {
        params: *params,
        theory,
        median_distance: quantile(&distances, 0.5),
        p90_distance: quantile(&distances, 0.9),
        mean_distance: distances.iter().sum::<f64>() / n,
        mean_fidelity: results.iter().map(|t| t.fidelity).sum::<f64>() / n,
        trials: results,
    })
}
