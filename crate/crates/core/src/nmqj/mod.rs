//! Non-Markovian quantum jump unraveling.
//!
//! The ensemble is tracked as four occupation numbers: the deterministically
//! evolving initial state `ψ₀`, its phase-flipped partner `σ_zψ₀`, and the
//! eigenstates `ψ₊`, `ψ₋`. Positive rates produce ordinary jumps
//! (`σ₋: → ψ₋`, `σ₊: → ψ₊`, `σ_z: ψ₀ ↔ σ_zψ₀`). While a rate is negative,
//! members sitting in the target of that channel jump back to one of its
//! sources with a probability proportional to the source population.
//!
//! Only one representative `ψ₀` is stored: the drift is diagonal in the
//! eigenbasis, so evolving `σ_zψ₀` gives `σ_z` of the evolved `ψ₀`.

mod run;
mod state;
mod step;

pub use run::{
    count_difference_series, run_unraveling, CountDifference, DensityErrors, Snapshot, UnravelConfig, Unraveling,
    MIN_TRAJECTORIES,
};
pub use state::{ensemble_density, EnsembleState, PureState, Slot, SlotCounts};
pub use step::{
    deterministic_step, step_ensemble, StepStats, MAX_JUMP_PROBABILITY, MAX_RATE_STEP_PRODUCT, MIN_DRIFT_NORM,
};

pub use rand_chacha::ChaCha8Rng;
