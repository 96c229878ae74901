use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coin at step {step}, position {position} is not unitary (defect {defect:.3e})")]
    NonUnitaryCoin {
        step: u32,
        position: i64,
        defect: f64,
    },

    #[error("step index must be at least 1, got {0}")]
    InvalidStep(u32),

    #[error("initial coin is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("density matrix trace must be 1, got {0}")]
    BadTrace(f64),

    #[error("target operator is not unitary (defect {0:.3e})")]
    NonUnitaryTarget(f64),

    #[error("phi must lie in (0°, 90°], got {0}°")]
    PhiOutOfDomain(f64),

    #[error("superposition weights must not both be zero")]
    ZeroSuperposition,

    #[error("SIC input index must be 1..=4, got {0}")]
    SicIndexOutOfRange(usize),

    #[error("target spinor must be normalized")]
    TargetNotNormalized,

    #[error("weight must lie in (0, 1], got {0}")]
    InvalidWeight(f64),

    #[error("invalid outcome probabilities: {0}")]
    InvalidOutcome(String),

    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),

    #[error("no counts registered after resampling")]
    NoCounts,

    #[error("trial count must be at least 1")]
    NoTrials,

    #[error("cannot place wave plates for step {step}, mode {mode}: {reason}")]
    Planning {
        step: u32,
        mode: i64,
        reason: String,
    },

    #[error("wave-plate compilation failed: residual {0:.3e}")]
    Compilation(f64),
}
