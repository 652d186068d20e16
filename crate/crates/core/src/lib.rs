//! Open-system dynamics of a biased spin-boson qubit coupled to an Ohmic
//! bath at zero temperature, in the weak-coupling time-convolutionless
//! approximation.
//!
//! * [`specfun`]: complex exponential, sine and cosine integrals.
//! * [`model`]: system parameters and the time-dependent decay rates.
//! * [`dynamics`]: the analytic dynamical map, a master-equation oracle,
//!   recoherence regions and the trace-distance non-Markovianity measure.
//! * [`nmqj`]: a quantum jump unraveling that stays valid when rates turn
//!   negative, using reversed jumps.
//! * [`cli`]: the `spinboson` command-line tool.
//!
//! Frequencies and times are in units of the bath cutoff, so `ω_c = 1`
//! unless [`model::SystemParams::with_cutoff`] says otherwise.
//!
//! ```text
//! let p = SystemParams::from_ratios(0.3, 10.0, 0.01)?;
//! let table = build_kernels(&p, 10.0, 1e-3)?;
//! let rho = table.apply_at(table.len() - 1, &DensityMatrix::equal_superposition());
//! ```

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod nmqj;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
