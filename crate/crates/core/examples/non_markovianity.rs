//! Trace-distance non-Markovianity measure against bias and qubit frequency.

use spinboson::dynamics::{blp_measure, blp_measure_on, build_kernels, DEFAULT_BLP_PAIRS};
use spinboson::model::SystemParams;

fn main() -> spinboson::Result<()> {
    let t_max = 50.0;
    for w0 in [0.5, 2.0, 10.0] {
        let p = SystemParams::from_ratios(0.1, w0, 0.01)?;
        println!(
            "omega0/omega_c = {w0:>4}: {:.4e}",
            blp_measure(&p, t_max, DEFAULT_BLP_PAIRS)?
        );
    }
    for ratio in [0.0, 0.1, 0.2, 0.3] {
        let p = SystemParams::from_ratios(ratio, 10.0, 0.01)?;
        let table = build_kernels(&p, t_max, p.default_rate_step())?;
        let best = blp_measure_on(&table, DEFAULT_BLP_PAIRS)?;
        println!(
            "eps/Delta = {ratio:.1}: {:.4e} from Bloch pair {:?}",
            best.measure, best.bloch
        );
    }
    Ok(())
}
