//! Acceptance checks for the `spinboson` crate.
//!
//! Each check returns an [`Outcome`] instead of panicking so that a single
//! driver can report all of them, red or green.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use spinboson::dynamics::{blp_measure, build_kernels, ode_oracle, DensityMatrix};
use spinboson::model::{rates_closed_form, rates_quadrature, sign_changes, Channel, Frequency, SystemParams};
use spinboson::nmqj::{
    count_difference_series, run_unraveling, step_ensemble, ChaCha8Rng, EnsembleState, PureState, Slot, UnravelConfig,
};
use spinboson::specfun::{expint_e1, sin_cos_integral};

const SPECFUN_REFERENCE: &str = include_str!("../../core/tests/fixtures/specfun_reference.csv");

pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} ({}): {} | {} | {:.2} s of {} s",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )
    }
}

type Check = std::result::Result<(bool, String), String>;

fn timed(id: u8, name: &'static str, limit_secs: u64, check: impl FnOnce() -> Check) -> Outcome {
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_secs);
    let (ok, mut detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    if elapsed > limit {
        detail.push_str("; over the time budget");
    }
    Outcome {
        id,
        name,
        pass: ok && elapsed <= limit,
        detail,
        elapsed,
        limit,
    }
}

fn e<T: fmt::Display>(err: T) -> String {
    err.to_string()
}

fn reference_ratio() -> f64 {
    1.0 / (2.0 * 3f64.sqrt())
}

fn recoherent_ratio() -> f64 {
    1.0 / (2.0 * 7f64.sqrt())
}

pub fn special_functions() -> Outcome {
    timed(1, "special functions", 1, || {
        let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
        let mut worst = 0.0f64;
        let mut points = 0;
        for line in SPECFUN_REFERENCE.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let v: Vec<f64> = line
                .split(',')
                .map(|x| x.parse().map_err(e))
                .collect::<Result<_, _>>()?;
            let z = Complex64::new(v[0], v[1]);
            let e1 = expint_e1(z).map_err(e)?;
            let (si, ci) = sin_cos_integral(z).map_err(e)?;
            worst = worst
                .max(rel(e1, Complex64::new(v[2], v[3])))
                .max(rel(si, Complex64::new(v[4], v[5])))
                .max(rel(ci, Complex64::new(v[6], v[7])));
            points += 1;
        }
        Ok((
            points == 200 && worst <= 1e-10,
            format!("{points} points, worst relative error {worst:.1e} (limit 1e-10)"),
        ))
    })
}

pub fn rate_equivalence() -> Outcome {
    timed(2, "closed-form rates vs quadrature", 30, || {
        let p = SystemParams::from_ratios(reference_ratio(), 10.0, 0.01).map_err(e)?;
        let mut worst = 0.0f64;
        for k in 1..=500 {
            let t = 0.1 * k as f64;
            let r = rates_closed_form(&p, t).map_err(e)?;
            for (f, closed) in [
                (Frequency::Plus, r.gamma_plus),
                (Frequency::Minus, r.gamma_minus),
                (Frequency::Zero, r.gamma_zero),
            ] {
                if closed.abs() > 1e-8 {
                    let q = rates_quadrature(&p, f, t).map_err(e)?;
                    worst = worst.max((q - closed).abs() / closed.abs());
                }
            }
        }
        Ok((
            worst <= 1e-6,
            format!("500 times, worst relative deviation {worst:.1e} (limit 1e-6)"),
        ))
    })
}

pub fn markov_limit() -> Outcome {
    timed(3, "Markov limit", 1, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for w0 in [5.0, 10.0] {
            let p = SystemParams::from_ratios(reference_ratio(), w0, 0.01).map_err(e)?;
            let r = rates_closed_form(&p, 200.0).map_err(e)?;
            let limit = std::f64::consts::PI * p.alpha() * w0 * (-w0).exp();
            let rel = (r.gamma_plus - limit).abs() / limit;
            let minus = r.gamma_minus.abs() / limit;
            ok &= rel <= 0.01 && minus < 0.02;
            parts.push(format!(
                "w0={w0}: gamma_plus off by {rel:.1e}, |gamma_minus|/limit {minus:.1e}"
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub fn sign_structure() -> Outcome {
    timed(4, "sign structure", 5, || {
        let p = SystemParams::from_ratios(reference_ratio(), 10.0, 0.01).map_err(e)?;
        let (mut min_g3, mut min_g1, mut min_g2) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for k in 0..=10_000 {
            let r = rates_closed_form(&p, k as f64 * 0.005).map_err(e)?;
            min_g3 = min_g3.min(r.gamma3);
            min_g1 = min_g1.min(r.gamma1);
            min_g2 = min_g2.min(r.gamma2);
        }
        let crossings = [0.0, 0.1, 0.3]
            .iter()
            .map(|&ratio| {
                let q = SystemParams::from_ratios(ratio, 10.0, 0.01).map_err(e)?;
                sign_changes(&q, Channel::Lowering, 50.0).map_err(e)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let same = crossings
            .iter()
            .all(|c| c.len() == crossings[0].len() && c.iter().zip(&crossings[0]).all(|(a, b)| (a - b).abs() <= 1e-8));
        Ok((
            min_g3 >= 0.0 && min_g1 < 0.0 && min_g2 < 0.0 && same,
            format!(
                "min gamma3 {min_g3:.1e}, min gamma1 {min_g1:.2e}, min gamma2 {min_g2:.2e}, {} crossings of gamma_plus, identical across eps/Delta: {same}",
                crossings[0].len()
            ),
        ))
    })
}

pub fn map_vs_ode() -> Outcome {
    timed(5, "analytic map vs master equation", 30, || {
        let initial = [
            DensityMatrix::equal_superposition(),
            DensityMatrix::excited(),
            DensityMatrix::new(0.3, 0.7, Complex64::new(0.2, -0.35)).map_err(e)?,
        ];
        let mut worst = 0.0f64;
        for ratio in [reference_ratio(), 0.0, 1.0] {
            let p = SystemParams::from_ratios(ratio, 10.0, 0.01).map_err(e)?;
            let table = build_kernels(&p, 50.0, 1e-3).map_err(e)?;
            for rho0 in &initial {
                let ode = ode_oracle(&p, rho0, 50.0, 1e-3).map_err(e)?;
                for (k, rho) in ode.iter().enumerate() {
                    let m = table.apply_at(k, rho0);
                    worst = worst
                        .max((m.rho_pp() - rho.rho_pp()).abs())
                        .max((m.rho_mm() - rho.rho_mm()).abs())
                        .max((m.rho_pm().re - rho.rho_pm().re).abs())
                        .max((m.rho_pm().im - rho.rho_pm().im).abs());
                }
            }
        }
        Ok((
            worst <= 1e-6,
            format!(
                "3 parameter sets x 3 initial states on [0, 50], worst elementwise deviation {worst:.1e} (limit 1e-6)"
            ),
        ))
    })
}

pub fn monte_carlo_consistency() -> Outcome {
    timed(6, "Monte Carlo vs analytic map", 600, || {
        let n = 100_000;
        let p = SystemParams::from_ratios(reference_ratio(), 10.0, 0.01).map_err(e)?;
        let cfg = UnravelConfig {
            n_traj: n,
            t_max: 50.0,
            dt: 1e-3,
            seed: 2024,
            stride: 100,
            ..UnravelConfig::default()
        };
        let run = run_unraveling(&p, &cfg).map_err(e)?;
        let table = build_kernels(&p, 50.0, 1e-3).map_err(e)?;
        let rho0 = DensityMatrix::equal_superposition();
        let band = 5.0 / (n as f64).sqrt();
        let floor = 1.0 / n as f64;
        let (mut worst, mut within) = (0.0f64, 0usize);
        for s in &run.snapshots {
            let exact = table.apply_at(s.step, &rho0);
            let pairs = [
                (s.density.rho_pp(), exact.rho_pp(), s.errors.rho_pp),
                (s.density.rho_pm().re, exact.rho_pm().re, s.errors.rho_pm_re),
                (s.density.rho_pm().im, exact.rho_pm().im, s.errors.rho_pm_im),
            ];
            let mut inside = true;
            for (mc, an, se) in pairs {
                worst = worst.max((mc - an).abs());
                inside &= (mc - an).abs() <= 3.0 * se.max(floor);
            }
            within += usize::from(inside);
        }
        let fraction = within as f64 / run.snapshots.len() as f64;
        Ok((
            worst <= band && fraction >= 0.99,
            format!(
                "N = {n}, {} snapshots: worst deviation {worst:.1e} (band {band:.3}), {:.1}% of snapshots within 3 sigma",
                run.snapshots.len(),
                100.0 * fraction
            ),
        ))
    })
}

/// Maximal runs `[start, end]` of indices over which `v` strictly
/// increases (`sign = 1`) or does not increase (`sign = -1`).
fn monotone_runs(v: &[f64]) -> Vec<(usize, usize, bool)> {
    let mut runs: Vec<(usize, usize, bool)> = Vec::new();
    for k in 0..v.len() - 1 {
        let up = v[k + 1] > v[k];
        match runs.last_mut() {
            Some(last) if last.2 == up => last.1 = k + 1,
            _ => runs.push((k, k + 1, up)),
        }
    }
    runs
}

pub fn recoherence() -> Outcome {
    timed(7, "recoherence", 600, || {
        // analytic coherence of the equal superposition on a fine grid
        let mut increasing = Vec::new();
        for ratio in [recoherent_ratio(), reference_ratio()] {
            let p = SystemParams::from_ratios(ratio, 10.0, 0.01).map_err(e)?;
            let table = build_kernels(&p, 50.0, 1e-3).map_err(e)?;
            let re: Vec<f64> = (0..table.len()).map(|k| table.superposition_coherence(k).re).collect();
            let up: Vec<(f64, f64)> = monotone_runs(&re)
                .into_iter()
                .filter(|r| r.2)
                .map(|(a, b, _)| (table.time(a), table.time(b)))
                .collect();
            increasing.push(up);
        }
        let analytic_ok = !increasing[0].is_empty() && increasing[1].is_empty();

        // count difference from the unraveling, with member-level increments
        let n = 100_000usize;
        let (dt, t_max, stride) = (1e-3, 2.0, 25usize);
        let steps = 2000usize;
        let p = SystemParams::from_ratios(recoherent_ratio(), 10.0, 0.01).map_err(e)?;
        let cfg = UnravelConfig {
            n_traj: n,
            t_max,
            dt,
            seed: 77,
            stride,
            ..UnravelConfig::default()
        };
        let series = count_difference_series(&run_unraveling(&p, &cfg).map_err(e)?);
        let rng = ChaCha8Rng::seed_from_u64(77);
        let mut ensemble = EnsembleState::new(n, PureState::equal_superposition()).map_err(e)?;
        let sign = |s: &Slot| match s {
            Slot::Psi0 => 1i8,
            Slot::Psi0Ph => -1,
            _ => 0,
        };
        let mut members: Vec<Vec<i8>> = vec![ensemble.members().iter().map(sign).collect()];
        let mut expected = vec![1.0];
        let table = build_kernels(&p, t_max, dt).map_err(e)?;
        for k in 0..steps {
            let rates = rates_closed_form(&p, k as f64 * dt).map_err(e)?;
            step_ensemble(&mut ensemble, &rates, dt, &rng).map_err(e)?;
            if (k + 1) % stride == 0 {
                members.push(ensemble.members().iter().map(sign).collect());
                let c = ensemble.psi0().coherence().re;
                expected.push(table.superposition_coherence(k + 1).re / c);
            }
        }
        let observed: Vec<f64> = members
            .iter()
            .map(|m| m.iter().map(|&s| s as f64).sum::<f64>() / n as f64)
            .collect();
        if observed.len() != series.len() || observed.iter().zip(&series).any(|(o, s)| (o - s.value).abs() > 1e-12) {
            return Err("manual stepping disagrees with the driver".into());
        }
        let analytic: Vec<f64> = (0..series.len())
            .map(|i| table.superposition_coherence(i * stride).re)
            .collect();
        let mut runs_ok = true;
        let mut up_runs = Vec::new();
        for (a, b, up) in monotone_runs(&analytic) {
            let increments: Vec<f64> = members[a]
                .iter()
                .zip(&members[b])
                .map(|(x, y)| (y - x) as f64)
                .collect();
            let mean = increments.iter().sum::<f64>() / n as f64;
            let var = increments.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let sigma = (var / n as f64).sqrt().max(1.0 / n as f64);
            let want = expected[b] - expected[a];
            runs_ok &= (mean - want).abs() <= 3.0 * sigma;
            if up {
                up_runs.push(format!(
                    "[{:.3}, {:.3}]: count difference change {mean:+.1e} vs expected {want:+.1e} (sigma {sigma:.1e})",
                    series[a].t, series[b].t
                ));
            }
        }
        Ok((
            analytic_ok && runs_ok,
            format!(
                "eps/Delta = 1/(2 sqrt 7) increases on {:?}, 1/(2 sqrt 3) on {} intervals; count difference consistent within 3 sigma on every monotone run: {runs_ok}; increasing runs {}",
                increasing[0]
                    .iter()
                    .map(|(a, b)| format!("[{a:.3}, {b:.3}]"))
                    .collect::<Vec<_>>(),
                increasing[1].len(),
                up_runs.join(", ")
            ),
        ))
    })
}

pub fn blp_properties() -> Outcome {
    timed(8, "BLP measure", 120, || {
        let t_max = 50.0;
        let pairs = spinboson::dynamics::DEFAULT_BLP_PAIRS;
        let low = blp_measure(
            &SystemParams::from_ratios(reference_ratio(), 0.5, 0.01).map_err(e)?,
            t_max,
            pairs,
        )
        .map_err(e)?;
        let high = blp_measure(
            &SystemParams::from_ratios(reference_ratio(), 10.0, 0.01).map_err(e)?,
            t_max,
            pairs,
        )
        .map_err(e)?;
        let values = [0.0, 0.1, 0.2, 0.3]
            .iter()
            .map(|&r| blp_measure(&SystemParams::from_ratios(r, 10.0, 0.01).map_err(e)?, t_max, pairs).map_err(e))
            .collect::<Result<Vec<f64>, _>>()?;
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let spread = (max - min) / mean;
        Ok((
            low <= 1e-9 && high > 0.0 && spread <= 0.05,
            format!(
                "w0/wc = 0.5: {low:.1e}; w0/wc = 10: {high:.3e}; eps/Delta 0, 0.1, 0.2, 0.3: {} so (max - min)/mean = {:.1}% (limit 5%)",
                values.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>().join(", "),
                100.0 * spread
            ),
        ))
    })
}

pub fn determinism() -> Outcome {
    timed(9, "determinism across worker counts", 120, || {
        let dir = tempfile::tempdir().map_err(e)?;
        let mut outputs = Vec::new();
        for (i, workers) in ["1", "2", "4", "1"].iter().enumerate() {
            let path = dir.path().join(format!("run{i}.csv"));
            let code = spinboson::cli::main_with_args([
                "spinboson",
                "unravel",
                "--n-traj",
                "20000",
                "--t-max",
                "2",
                "--seed",
                "31337",
                "--stride",
                "5",
                "--workers",
                workers,
                "--out",
                path.to_str().ok_or("non-UTF-8 temporary path")?,
            ]);
            if code != 0 {
                return Err(format!("unravel exited with {code}"));
            }
            outputs.push(std::fs::read(&path).map_err(e)?);
        }
        let same = outputs.iter().all(|o| *o == outputs[0]);
        Ok((
            same,
            format!(
                "workers 1, 2, 4, 1: {} bytes each, byte-identical: {same}",
                outputs[0].len()
            ),
        ))
    })
}

pub fn run_all() -> Vec<Outcome> {
    vec![
        special_functions(),
        rate_equivalence(),
        markov_limit(),
        sign_structure(),
        map_vs_ode(),
        monte_carlo_consistency(),
        recoherence(),
        blp_properties(),
        determinism(),
    ]
}
