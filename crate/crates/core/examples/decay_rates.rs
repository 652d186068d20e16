//! Time-dependent decay rates and the times where the lowering rate changes sign.

use spinboson::model::{rates_closed_form, sign_changes, Channel, SystemParams};

fn main() -> spinboson::Result<()> {
    let p = SystemParams::from_ratios(1.0 / (2.0 * 3f64.sqrt()), 10.0, 0.01)?;
    println!("omega0 = {:.4}, alpha = {}", p.omega0(), p.alpha());
    println!("{:>6} {:>14} {:>14} {:>14}", "t", "gamma1", "gamma2", "gamma3");
    for k in 0..=20 {
        let t = 0.1 * k as f64;
        let r = rates_closed_form(&p, t)?;
        println!("{t:>6.2} {:>14.6e} {:>14.6e} {:>14.6e}", r.gamma1, r.gamma2, r.gamma3);
    }
    let markov = std::f64::consts::PI * p.alpha() * p.omega0() * (-p.omega0()).exp();
    let late = rates_closed_form(&p, 200.0)?;
    println!("gamma_plus(200) = {:.6e}, Markov limit {markov:.6e}", late.gamma_plus);
    let crossings = sign_changes(&p, Channel::Lowering, 5.0)?;
    println!(
        "gamma_plus changes sign {} times before t = 5: {crossings:.4?}",
        crossings.len()
    );
    Ok(())
}
