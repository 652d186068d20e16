//! Reduced dynamics of the spin in the interaction picture.
//!
//! States are written in the system eigenbasis `{ψ₊, ψ₋}`. Because the
//! coherences of the analytic map carry no `e^{-iω₀t}` phase, everything in
//! this module (and in the unraveling) lives in the interaction picture.

mod density;
mod kernels;
mod measure;
mod oracle;
mod recoherence;

pub use density::DensityMatrix;
pub use kernels::{build_kernels, DynamicalMap, KernelTable};
pub use measure::{
    blp_measure, blp_measure_on, fibonacci_pairs, trace_distance, BlpResult, DEFAULT_BLP_PAIRS, MIN_BLP_PAIRS,
};
pub use oracle::ode_oracle;
pub use recoherence::{recoherence_mask, RecoherenceMap};

use crate::error::{Error, Result};

/// Number of steps `n` with `n * h = t_max`, failing unless `h` divides
/// `t_max` to within `1e-9` steps.
pub fn grid_steps(t_max: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Grid(format!("step must be finite and > 0, got {h}")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Grid(format!("t_max must be finite and > 0, got {t_max}")));
    }
    let ratio = t_max / h;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::Grid(format!(
            "step {h} does not divide t_max = {t_max} (ratio {ratio})"
        )));
    }
    Ok(n as usize)
}

/// Largest step not exceeding `h_max` that divides `t_max` exactly.
pub fn fitting_step(t_max: f64, h_max: f64) -> f64 {
    t_max / (t_max / h_max).ceil()
}
