//! Discrete-time quantum walks with site- and step-dependent coins, read as
//! generalized measurements on the coin qubit.
//!
//! The walk engine ([`walk`]) evolves a walker-coin state; [`povm`] turns a
//! coin schedule into the measurement it induces on the initial coin;
//! [`protocols`] builds the unambiguous-discrimination and SIC schedules;
//! [`optics`] maps coins to half- and quarter-wave plates; [`noise`]
//! simulates imperfect hardware; [`tomography`] inverts SIC statistics.

pub mod density;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod optics;
pub mod povm;
pub mod protocols;
pub mod reference;
pub mod tomography;
pub mod walk;

pub use density::{state_fidelity, DensityMatrix};
pub use error::{Error, Result};
pub use linalg::{CoinOperator, Mat2, Spinor};
pub use noise::{error_budget, noisy_evolve, sample_counts, ErrorBudget, NoiseParams, TrialResult};
pub use povm::{kraus_from_walk, povm_from_kraus, KrausSet, PovmElement};
pub use tomography::{fidelity_report, project_psd, reconstruct, SicOutcome};
pub use walk::{
    classical_fidelity, evolve, l1_distance, position_distribution, CoinSchedule, Position,
    PositionDistribution, WalkSpec, WalkerCoinState,
};

/// Crate version, recorded in result files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
