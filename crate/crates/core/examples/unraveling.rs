//! Jump unraveling compared with the analytic map, with the count difference
//! between the two deterministic branches.

use spinboson::dynamics::{build_kernels, DensityMatrix};
use spinboson::model::SystemParams;
use spinboson::nmqj::{count_difference_series, run_unraveling, UnravelConfig};

fn main() -> spinboson::Result<()> {
    let p = SystemParams::from_ratios(0.5, 10.0, 0.2)?;
    let config = UnravelConfig {
        n_traj: 20_000,
        t_max: 3.0,
        stride: 250,
        seed: 1,
        ..UnravelConfig::default()
    };
    let run = run_unraveling(&p, &config)?;
    let table = build_kernels(&p, config.t_max, config.dt)?;
    let rho0 = DensityMatrix::equal_superposition();
    let series = count_difference_series(&run);
    println!(
        "{:>5} {:>11} {:>11} {:>11} {:>11} {:>9} {:>15}",
        "t", "rho_pp", "exact", "Re rho_pm", "exact", "stderr", "reversed jumps"
    );
    for (s, d) in run.snapshots.iter().zip(&series) {
        let exact = table.apply_at(s.step, &rho0);
        println!(
            "{:>5.2} {:>11.6} {:>11.6} {:>11.6} {:>11.6} {:>9.1e} {:>15}  count difference {:.4}",
            s.t,
            s.density.rho_pp(),
            exact.rho_pp(),
            s.density.rho_pm().re,
            exact.rho_pm().re,
            s.errors.rho_pm_re,
            s.jumps.reversed.iter().sum::<u64>(),
            d.value
        );
    }
    Ok(())
}
