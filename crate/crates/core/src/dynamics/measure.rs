use rayon::prelude::*;

use super::{build_kernels, fitting_step, DensityMatrix, KernelTable};
use crate::error::{Error, Result};
use crate::model::SystemParams;

pub const DEFAULT_BLP_PAIRS: usize = 64;
pub const MIN_BLP_PAIRS: usize = 32;

/// Trace distance `½‖a − b‖₁ = sqrt(d² + |c|²)` with `d` the population
/// difference and `c` the coherence difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let d = a.rho_pp() - b.rho_pp();
    let c = a.rho_pm() - b.rho_pm();
    (d * d + c.norm_sqr()).sqrt()
}

/// Antipodal Bloch-vector pairs `(r, -r)` on a Fibonacci lattice of the
/// upper hemisphere, from the pole `r_z = 1` down to the equator.
pub fn fibonacci_pairs(count: usize) -> Vec<[f64; 3]> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = if count > 1 {
                1.0 - i as f64 / (count - 1) as f64
            } else {
                1.0
            };
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlpResult {
    pub measure: f64,
    /// Bloch vector of the maximising pair (its partner is the antipode).
    pub bloch: [f64; 3],
}

fn backflow(table: &KernelTable, r: [f64; 3]) -> f64 {
    let neg = [-r[0], -r[1], -r[2]];
    let (a, b) = (
        DensityMatrix::from_bloch(r).expect("unit Bloch vector"),
        DensityMatrix::from_bloch(neg).expect("unit Bloch vector"),
    );
    let distance: Vec<f64> = (0..table.len())
        .map(|k| trace_distance(&table.apply_at(k, &a), &table.apply_at(k, &b)))
        .collect();
    let h = table.step();
    distance
        .windows(3)
        .map(|w| ((w[2] - w[0]) / (2.0 * h)).max(0.0) * h)
        .sum()
}

/// Information backflow `max_pairs ∫ max(σ, 0) dt` with `σ = d/dt D(ρ₁, ρ₂)`
/// over the grid of an existing kernel table.
pub fn blp_measure_on(table: &KernelTable, pair_samples: usize) -> Result<BlpResult> {
    if pair_samples < MIN_BLP_PAIRS {
        return Err(Error::Domain(format!(
            "need at least {MIN_BLP_PAIRS} state pairs, got {pair_samples}"
        )));
    }
    let best = fibonacci_pairs(pair_samples)
        .into_par_iter()
        .map(|r| BlpResult {
            measure: backflow(table, r),
            bloch: r,
        })
        .reduce(
            || BlpResult {
                measure: f64::NEG_INFINITY,
                bloch: [0.0, 0.0, 1.0],
            },
            // ties resolved towards the pole so the result is schedule independent
            |x, y| {
                if y.measure > x.measure || (y.measure == x.measure && y.bloch[2] > x.bloch[2]) {
                    y
                } else {
                    x
                }
            },
        );
    Ok(best)
}

/// Non-Markovianity measure on `[0, t_max]`, using the default rate step
/// shrunk to divide `t_max`.
pub fn blp_measure(p: &SystemParams, t_max: f64, pair_samples: usize) -> Result<f64> {
    let h = fitting_step(t_max, p.default_rate_step());
    let table = build_kernels(p, t_max, h)?;
    blp_measure_on(&table, pair_samples).map(|r| r.measure)
}
