//! Assigning compiled wave plates to spatial modes.
//!
//! Adjacent occupied modes at a step sit one beam separation apart (`x` and
//! `x ± 2`). A plate can be slid into mode `x` alone only if one of those
//! neighbours is empty. When both are occupied, the plate is made wide
//! enough to also cover one neighbour `y`, and `y` then receives extra plates
//! that turn the spurious action back into `y`'s own coin. For an
//! identity coin and a HWP this is just a second HWP at the same angle.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::optics::compile::compile_coin;
use crate::optics::waveplate::{compose, PlateKind, Waveplate};
use crate::walk::{CoinSchedule, Position, WalkSpec};

/// Plates any single mode may traverse in one step.
pub const MAX_PLATES_PER_MODE: usize = 3;
/// Per-mode composition must match the scheduled coin within this, up to phase.
pub const PLAN_TOL: f64 = 1e-8;

/// A wave plate and the set of modes it physically covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedPlate {
    pub plate: Waveplate,
    /// Sorted, non-empty.
    pub modes: Vec<Position>,
}

impl PlacedPlate {
    pub fn covers(&self, mode: Position) -> bool {
        self.modes.contains(&mode)
    }
}

/// Plates of one step in traversal order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    pub step: u32,
    pub plates: Vec<PlacedPlate>,
}

/// One exported plate record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateRecord {
    pub step: u32,
    pub modes: Vec<Position>,
    pub kind: PlateKind,
    pub angle_deg: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WaveplatePlan {
    steps: Vec<StepPlan>,
}

impl WaveplatePlan {
    pub fn steps(&self) -> &[StepPlan] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn step(&self, step: u32) -> Option<&StepPlan> {
        self.steps.iter().find(|s| s.step == step)
    }

    /// Plates crossed by `mode` at `step`, in traversal order.
    pub fn plates_on(&self, step: u32, mode: Position) -> Vec<Waveplate> {
        self.step(step)
            .map(|s| {
                s.plates
                    .iter()
                    .filter(|p| p.covers(mode))
                    .map(|p| p.plate)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Jones matrix seen by `mode` at `step`.
    pub fn mode_operator(&self, step: u32, mode: Position) -> Mat2 {
        compose(&self.plates_on(step, mode))
    }

    /// Every `(step, mode)` pair touched by a plate.
    pub fn covered(&self) -> BTreeSet<(u32, Position)> {
        self.steps
            .iter()
            .flat_map(|s| {
                s.plates
                    .iter()
                    .flat_map(move |p| p.modes.iter().map(move |m| (s.step, *m)))
            })
            .collect()
    }

    /// Largest phase distance between the realized and scheduled coins over
    /// all scheduled or plate-covered sites.
    pub fn max_deviation(&self, schedule: &CoinSchedule) -> f64 {
        let mut sites = self.covered();
        sites.extend(schedule.iter().map(|(n, x, _)| (n, x)));
        sites
            .into_iter()
            .map(|(n, x)| {
                self.mode_operator(n, x)
                    .phase_distance(&schedule.coin(n, x))
            })
            .fold(0.0, f64::max)
    }

    /// Same layout with every plate rotated by `offset(step, plate_index)`.
    pub fn perturbed<F>(&self, mut offset: F) -> WaveplatePlan
    where
        F: FnMut(u32, usize) -> f64,
    {
        let steps = self
            .steps
            .iter()
            .map(|s| StepPlan {
                step: s.step,
                plates: s
                    .plates
                    .iter()
                    .enumerate()
                    .map(|(i, p)| PlacedPlate {
                        plate: p.plate.rotated(offset(s.step, i)),
                        modes: p.modes.clone(),
                    })
                    .collect(),
            })
            .collect();
        WaveplatePlan { steps }
    }

    pub fn records(&self) -> Vec<PlateRecord> {
        self.steps
            .iter()
            .flat_map(|s| {
                s.plates.iter().map(move |p| PlateRecord {
                    step: s.step,
                    modes: p.modes.clone(),
                    kind: p.plate.kind,
                    angle_deg: p.plate.angle_deg,
                })
            })
            .collect()
    }

    /// Comma-separated export: `step,modes,kind,angle_deg`, with modes joined
    /// by `;` and angles to 0.01°.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,modes,kind,angle_deg\n");
        for r in self.records() {
            let modes: Vec<String> = r.modes.iter().map(ToString::to_string).collect();
            // normalize -0.00 so that output is stable
            let angle = if r.angle_deg.abs() < 0.005 {
                0.0
            } else {
                r.angle_deg
            };
            writeln!(
                out,
                "{},{},{},{:.2}",
                r.step,
                modes.join(";"),
                r.kind,
                angle
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Plan with every coin in its own mode, ignoring neighbour constraints.
pub fn plan_isolated(schedule: &CoinSchedule) -> Result<WaveplatePlan> {
    let mut steps: Vec<StepPlan> = Vec::new();
    for (n, x, coin) in schedule.iter() {
        let plates = compile_coin(coin)?;
        if plates.is_empty() {
            continue;
        }
        if steps.last().is_none_or(|s| s.step != n) {
            steps.push(StepPlan {
                step: n,
                plates: Vec::new(),
            });
        }
        let current = steps.last_mut().expect("pushed above");
        current
            .plates
            .extend(plates.into_iter().map(|plate| PlacedPlate {
                plate,
                modes: vec![x],
            }));
    }
    Ok(WaveplatePlan { steps })
}

struct Sharing {
    neighbour: Position,
    shared: Vec<Waveplate>,
    correction: Vec<Waveplate>,
    cost: isize,
}

/// Places plates for every scheduled coin of `spec`, respecting which modes
/// are occupied at each step.
pub fn plan_placement(spec: &WalkSpec) -> Result<WaveplatePlan> {
    let schedule = spec.schedule();
    let occupancy = spec.occupancy();
    let mut steps = Vec::new();

    for (idx, occupied) in occupancy.iter().enumerate() {
        let n = idx as u32 + 1;
        let mut compiled = std::collections::BTreeMap::new();
        for (x, coin) in schedule.at_step(n) {
            let plates = compile_coin(coin)?;
            if !plates.is_empty() {
                compiled.insert(x, plates);
            }
        }
        if compiled.is_empty() {
            continue;
        }
        let occ = |x: Position| occupied.contains(&x);
        let isolable = |x: Position| !occ(x) || !occ(x - 2) || !occ(x + 2);

        let mut handled = BTreeSet::new();
        let mut groups: Vec<(Position, Vec<PlacedPlate>)> = Vec::new();

        let crowded: Vec<Position> = compiled.keys().copied().filter(|&x| !isolable(x)).collect();
        for x in crowded {
            if handled.contains(&x) {
                continue;
            }
            let shared = compiled[&x].clone();
            let shared_op = compose(&shared);
            let mut best: Option<Sharing> = None;
            for y in [x + 2, x - 2] {
                if handled.contains(&y) || !isolable(y) {
                    continue;
                }
                let residual = schedule.coin(n, y) * shared_op.adjoint();
                let correction = compile_coin(&residual)?;
                if shared.len() + correction.len() > MAX_PLATES_PER_MODE {
                    continue;
                }
                let own = compiled.get(&y).map_or(0, Vec::len);
                let cost = (shared.len() + correction.len()) as isize - own as isize;
                if best.as_ref().is_none_or(|b| cost < b.cost) {
                    best = Some(Sharing {
                        neighbour: y,
                        shared: shared.clone(),
                        correction,
                        cost,
                    });
                }
            }
            let Some(choice) = best else {
                return Err(Error::Planning {
                    step: n,
                    mode: x,
                    reason: format!(
                        "both neighbours occupied and no cancelling arrangement fits {MAX_PLATES_PER_MODE} plates"
                    ),
                });
            };
            let y = choice.neighbour;
            let pair = if x < y { vec![x, y] } else { vec![y, x] };
            let mut placed: Vec<PlacedPlate> = choice
                .shared
                .into_iter()
                .map(|plate| PlacedPlate {
                    plate,
                    modes: pair.clone(),
                })
                .collect();
            placed.extend(choice.correction.into_iter().map(|plate| PlacedPlate {
                plate,
                modes: vec![y],
            }));
            handled.insert(x);
            handled.insert(y);
            groups.push((x.min(y), placed));
        }

        for (x, plates) in &compiled {
            if handled.contains(x) {
                continue;
            }
            groups.push((
                *x,
                plates
                    .iter()
                    .map(|&plate| PlacedPlate {
                        plate,
                        modes: vec![*x],
                    })
                    .collect(),
            ));
        }
        groups.sort_by_key(|(x, _)| *x);
        steps.push(StepPlan {
            step: n,
            plates: groups.into_iter().flat_map(|(_, g)| g).collect(),
        });
    }

    let plan = WaveplatePlan { steps };
    let deviation = plan.max_deviation(schedule);
    if deviation > PLAN_TOL {
        return Err(Error::Compilation(deviation));
    }
    Ok(plan)
}
