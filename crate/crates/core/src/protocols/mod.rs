//! The two concrete measurement protocols: unambiguous state discrimination
//! and the qubit SIC-POVM.

pub mod sic;
pub mod usd;

pub use sic::{sic_expected, sic_schedule, sic_walk, SicSpec};
pub use usd::{usd_expected, usd_schedule, UsdInput, UsdOutcome, UsdSpec};
