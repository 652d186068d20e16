use std::io::Write;

use super::config::RunConfig;
use crate::dynamics::{blp_measure_on, build_kernels, grid_steps, recoherence_mask, KernelTable};
use crate::error::{Error, Result};
use crate::model::{rates_closed_form, RateSet};
use crate::nmqj::{count_difference_series, run_unraveling, Slot};

fn io_error(e: std::io::Error) -> Error {
    Error::Config(format!("cannot write output: {e}"))
}

/// Comma-separated rows with every number at 12 significant digits.
struct CsvWriter<'a> {
    out: &'a mut dyn Write,
}

impl<'a> CsvWriter<'a> {
    fn new(out: &'a mut dyn Write, header: &[&str]) -> Result<Self> {
        writeln!(out, "{}", header.join(",")).map_err(io_error)?;
        Ok(Self { out })
    }

    fn row(&mut self, values: &[f64]) -> Result<()> {
        let line: Vec<String> = values.iter().map(|v| format!("{v:.11e}")).collect();
        writeln!(self.out, "{}", line.join(",")).map_err(io_error)
    }

    fn row_with_flag(&mut self, values: &[f64], flag: bool) -> Result<()> {
        let mut line: Vec<String> = values.iter().map(|v| format!("{v:.11e}")).collect();
        line.push(u8::from(flag).to_string());
        writeln!(self.out, "{}", line.join(",")).map_err(io_error)
    }
}

/// Grid indices `0, s, 2s, ...` plus the last one.
fn strided(n: usize, stride: usize) -> impl Iterator<Item = usize> {
    (0..=n).filter(move |k| k % stride == 0 || *k == n)
}

pub const RATES_HEADER: [&str; 8] = [
    "t",
    "omega0_t",
    "gamma_plus",
    "gamma_minus",
    "gamma_zero",
    "gamma1",
    "gamma2",
    "gamma3",
];

pub fn rates(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let p = cfg.params()?;
    let h = cfg.rate_step()?;
    let n = grid_steps(cfg.t_max, h)?;
    let mut csv = CsvWriter::new(out, &RATES_HEADER)?;
    for k in strided(n, cfg.emit_stride) {
        let t = k as f64 * h;
        let r = rates_closed_form(&p, t).map_err(|e| e.at(t))?;
        csv.row(&[
            t,
            p.omega0() * t,
            r.gamma_plus,
            r.gamma_minus,
            r.gamma_zero,
            r.gamma1,
            r.gamma2,
            r.gamma3,
        ])?;
    }
    Ok(())
}

pub const EVOLVE_HEADER: [&str; 6] = ["t", "omega0_t", "rho_pp", "re_rho_pm", "im_rho_pm", "abs_rho_pm"];

pub fn evolve(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let p = cfg.params()?;
    let h = cfg.rate_step()?;
    let table = build_kernels(&p, cfg.t_max, h)?;
    let rho0 = cfg.initial_state()?.density();
    let mut csv = CsvWriter::new(out, &EVOLVE_HEADER)?;
    for k in strided(table.len() - 1, cfg.emit_stride) {
        let t = table.time(k);
        let rho = table.apply_at(k, &rho0);
        let c = rho.rho_pm();
        csv.row(&[t, p.omega0() * t, rho.rho_pp(), c.re, c.im, c.norm()])?;
    }
    Ok(())
}

pub const UNRAVEL_HEADER: [&str; 16] = [
    "t",
    "omega0_t",
    "rho_pp",
    "re_rho_pm",
    "im_rho_pm",
    "abs_rho_pm",
    "n_psi0",
    "n_psi0_ph",
    "n_plus",
    "n_minus",
    "count_difference",
    "stderr_rho_pp",
    "stderr_re_rho_pm",
    "stderr_im_rho_pm",
    "stderr_abs_rho_pm",
    "stderr_count_difference",
];

pub fn unravel(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let p = cfg.params()?;
    let run = run_unraveling(&p, &cfg.unravel_config()?)?;
    let differences = count_difference_series(&run);
    let mut csv = CsvWriter::new(out, &UNRAVEL_HEADER)?;
    for (s, d) in run.snapshots.iter().zip(differences) {
        let c = s.density.rho_pm();
        csv.row(&[
            s.t,
            p.omega0() * s.t,
            s.density.rho_pp(),
            c.re,
            c.im,
            c.norm(),
            s.counts.fraction(Slot::Psi0),
            s.counts.fraction(Slot::Psi0Ph),
            s.counts.fraction(Slot::Plus),
            s.counts.fraction(Slot::Minus),
            d.value,
            s.errors.rho_pp,
            s.errors.rho_pm_re,
            s.errors.rho_pm_im,
            s.errors.rho_pm_abs,
            d.std_error,
        ])?;
    }
    Ok(())
}

pub const RECOHERENCE_HEADER: [&str; 4] = ["t", "omega0_t", "epsilon_over_delta", "in_region"];

pub fn recoherence_map(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let p = cfg.params()?;
    let h = cfg.rate_step()?;
    let n = grid_steps(cfg.t_max, h)?;
    let times: Vec<f64> = strided(n, cfg.emit_stride).map(|k| k as f64 * h).collect();
    let map = recoherence_mask(&p, &times, &cfg.ratio_grid())?;
    let mut csv = CsvWriter::new(out, &RECOHERENCE_HEADER)?;
    for (ratio, row) in map.ratios.iter().zip(&map.mask) {
        for (&t, &inside) in map.times.iter().zip(row) {
            csv.row_with_flag(&[t, p.omega0() * t, *ratio], inside)?;
        }
    }
    Ok(())
}

pub const BLP_HEADER: [&str; 5] = ["epsilon_over_delta", "blp_measure", "pair_x", "pair_y", "pair_z"];

/// Writes the per-`ε/Δ` table and returns the measure at the configured
/// `ε/Δ`.
pub fn blp(cfg: &RunConfig, out: &mut dyn Write) -> Result<f64> {
    let p = cfg.params()?;
    let h = cfg.rate_step()?;
    let n = grid_steps(cfg.t_max, h)?;
    let bare: Vec<RateSet> = (0..=n)
        .map(|k| rates_closed_form(&p, k as f64 * h))
        .collect::<Result<_>>()?;
    let measure_at = |ratio: f64| -> Result<_> {
        let q = p.with_bias_ratio(ratio)?;
        let table = KernelTable::from_rates(q, h, bare.iter().map(|r| r.reweighted(&q)).collect())?;
        blp_measure_on(&table, cfg.blp_pairs)
    };
    let mut csv = CsvWriter::new(out, &BLP_HEADER)?;
    for ratio in cfg.ratio_grid() {
        let r = measure_at(ratio)?;
        csv.row(&[ratio, r.measure, r.bloch[0], r.bloch[1], r.bloch[2]])?;
    }
    Ok(measure_at(cfg.epsilon_over_delta)?.measure)
}
