//! Reduced dynamics from the analytic map, checked against a direct
//! integration of the master equation.

use spinboson::dynamics::{build_kernels, ode_oracle, DensityMatrix};
use spinboson::model::SystemParams;

fn main() -> spinboson::Result<()> {
    let p = SystemParams::from_ratios(0.3, 10.0, 0.01)?;
    let (t_max, h) = (10.0, 1e-3);
    let table = build_kernels(&p, t_max, h)?;
    let rho0 = DensityMatrix::equal_superposition();
    let ode = ode_oracle(&p, &rho0, t_max, h)?;
    println!(
        "{:>6} {:>14} {:>14} {:>14} {:>10}",
        "t", "rho_pp", "|rho_pm|", "arg rho_pm", "ode diff"
    );
    for k in (0..table.len()).step_by(1000) {
        let rho = table.apply_at(k, &rho0);
        let diff = (rho.rho_pm() - ode[k].rho_pm())
            .norm()
            .max((rho.rho_pp() - ode[k].rho_pp()).abs());
        println!(
            "{:>6.2} {:>14.10} {:>14.10} {:>14.6e} {diff:>10.1e}",
            table.time(k),
            rho.rho_pp(),
            rho.rho_pm().norm(),
            rho.rho_pm().arg()
        );
    }
    Ok(())
}
