//! Wave-plate realization of coin operators.

pub mod compile;
pub mod plan;
pub mod waveplate;

pub use compile::{compile_coin, COMPILE_TOL};
pub use plan::{plan_isolated, plan_placement, PlacedPlate, PlateRecord, StepPlan, WaveplatePlan};
pub use waveplate::{compose, hwp_matrix, qwp_matrix, PlateKind, Waveplate};
