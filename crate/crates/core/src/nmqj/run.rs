use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::state::{density_from_counts, EnsembleState, PureState, Slot, SlotCounts};
use super::step::{step_ensemble, StepStats};
use crate::dynamics::{grid_steps, DensityMatrix};
use crate::error::{Error, Result};
use crate::model::{rates_closed_form, SystemParams};

pub const MIN_TRAJECTORIES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct UnravelConfig {
    pub n_traj: usize,
    pub t_max: f64,
    pub dt: f64,
    pub seed: u64,
    /// Keep every `stride`-th step (the final step is always kept).
    pub stride: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    pub initial: PureState,
}

impl Default for UnravelConfig {
    fn default() -> Self {
        Self {
            n_traj: 10_000,
            t_max: 10.0,
            dt: 1e-3,
            seed: 0,
            stride: 10,
            workers: None,
            initial: PureState::equal_superposition(),
        }
    }
}

/// One-sigma Monte Carlo errors of the ensemble estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityErrors {
    pub rho_pp: f64,
    pub rho_pm_re: f64,
    pub rho_pm_im: f64,
    pub rho_pm_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub counts: SlotCounts,
    pub psi0: PureState,
    pub density: DensityMatrix,
    pub errors: DensityErrors,
    /// Jumps accumulated since `t = 0`.
    pub jumps: StepStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unraveling {
    pub params: SystemParams,
    pub config: UnravelConfig,
    pub snapshots: Vec<Snapshot>,
}

/// Standard error of the mean of a variable taking value `v_i` with
/// probability `p_i`, from `n` samples.
fn standard_error(values_probs: &[(f64, f64)], n: f64) -> f64 {
    let mean: f64 = values_probs.iter().map(|(v, p)| v * p).sum();
    let second: f64 = values_probs.iter().map(|(v, p)| v * v * p).sum();
    ((second - mean * mean).max(0.0) / n).sqrt()
}

fn density_errors(counts: &SlotCounts, psi0: &PureState) -> DensityErrors {
    let n = counts.total() as f64;
    let frac = |s| counts[s] as f64 / n;
    let (p0, pph, pp, pm) = (
        frac(Slot::Psi0),
        frac(Slot::Psi0Ph),
        frac(Slot::Plus),
        frac(Slot::Minus),
    );
    let up = psi0.a_plus().norm_sqr();
    let rho_pp = standard_error(&[(up, p0 + pph), (1.0, pp), (0.0, pm)], n);
    // each member contributes ±c (ψ₀ or its flip) or 0 to the coherence
    let sign_error = standard_error(&[(1.0, p0), (-1.0, pph), (0.0, pp + pm)], n);
    let c = psi0.coherence();
    DensityErrors {
        rho_pp,
        rho_pm_re: c.re.abs() * sign_error,
        rho_pm_im: c.im.abs() * sign_error,
        rho_pm_abs: c.norm() * sign_error,
    }
}

fn snapshot(step: usize, t: f64, e: &EnsembleState, jumps: StepStats) -> Snapshot {
    Snapshot {
        step,
        t,
        counts: e.counts(),
        psi0: *e.psi0(),
        density: density_from_counts(&e.counts(), e.psi0()),
        errors: density_errors(&e.counts(), e.psi0()),
        jumps,
    }
}

/// Unravels the master equation on `[0, t_max]` with `n_traj` members.
///
/// Output is a pure function of `(p, config)` minus `workers`: the worker
/// count changes only the speed.
pub fn run_unraveling(p: &SystemParams, config: &UnravelConfig) -> Result<Unraveling> {
    if config.n_traj < MIN_TRAJECTORIES {
        return Err(Error::param(
            "n_traj",
            format!("need at least {MIN_TRAJECTORIES} trajectories, got {}", config.n_traj),
        ));
    }
    if config.stride == 0 {
        return Err(Error::param("stride", "must be at least 1"));
    }
    let steps = grid_steps(config.t_max, config.dt).map_err(|e| Error::param("dt", e.to_string()))?;
    match config.workers {
        None => run_steps(p, config, steps),
        Some(0) => Err(Error::param("workers", "must be at least 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {w} worker threads: {e}")))?
            .install(|| run_steps(p, config, steps)),
    }
}

fn run_steps(p: &SystemParams, config: &UnravelConfig, steps: usize) -> Result<Unraveling> {
    let rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ensemble = EnsembleState::new(config.n_traj, config.initial)?;
    let mut jumps = StepStats::default();
    let mut snapshots = vec![snapshot(0, 0.0, &ensemble, jumps)];
    for k in 0..steps {
        let t = k as f64 * config.dt;
        let rates = rates_closed_form(p, t)?;
        let stats = step_ensemble(&mut ensemble, &rates, config.dt, &rng).map_err(|e| e.at(t))?;
        jumps.add(&stats);
        let done = k + 1;
        if done % config.stride == 0 || done == steps {
            snapshots.push(snapshot(done, done as f64 * config.dt, &ensemble, jumps));
        }
    }
    log::debug!(
        "unraveled {} members over {steps} steps: forward {:?}, reversed {:?}",
        config.n_traj,
        jumps.forward,
        jumps.reversed
    );
    Ok(Unraveling {
        params: *p,
        config: config.clone(),
        snapshots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountDifference {
    pub t: f64,
    /// `(N₀ - N₀^PH)/N`
    pub value: f64,
    pub std_error: f64,
}

/// `(N₀(t) - N₀^PH(t))/N` at every snapshot. Each member contributes
/// `+1`, `-1` or `0`, which fixes the standard error.
pub fn count_difference_series(run: &Unraveling) -> Vec<CountDifference> {
    run.snapshots
        .iter()
        .map(|s| {
            let n = s.counts.total() as f64;
            let (p0, pph) = (s.counts.fraction(Slot::Psi0), s.counts.fraction(Slot::Psi0Ph));
            CountDifference {
                t: s.t,
                value: p0 - pph,
                std_error: standard_error(&[(1.0, p0), (-1.0, pph), (0.0, 1.0 - p0 - pph)], n),
            }
        })
        .collect()
}
