//! Exponential, sine and cosine integrals at a few points of the right half-plane.

use num_complex::Complex64;
use spinboson::specfun::{expint_e1, sin_cos_integral};

fn main() -> spinboson::Result<()> {
    let points = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5, 3.0),
        Complex64::new(4.0, -0.5),
        Complex64::new(30.0, -40.0),
    ];
    println!("{:>22} {:>44} {:>44} {:>44}", "z", "E1(z)", "Si(z)", "Ci(z)");
    for z in points {
        let (si, ci) = sin_cos_integral(z)?;
        println!("{z:>22.4} {:>44.15e} {si:>44.15e} {ci:>44.15e}", expint_e1(z)?);
    }
    Ok(())
}
