//! Complex exponential, sine and cosine integrals.
//!
//! `E1` is evaluated by its power series close to the origin and near the
//! negative real axis, and by the even continued fraction
//!
//! ```text
//! E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(z + 7 - ...))))
//! ```
//!
//! elsewhere. `Si` and `Ci` use their Taylor series for `|z| <= 1.5` and the
//! `E1(±iz)` representation outside that disc.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Radius of the disc on which `Si`/`Ci` are summed directly.
pub const SERIES_RADIUS: f64 = 1.5;

// E1 series is used in the left half-plane while |z| + Re z stays below this.
// The cancellation loss is bounded by |z| * exp(NEAR_CUT_MARGIN).
const NEAR_CUT_MARGIN: f64 = 4.0;

const MAX_SERIES_TERMS: usize = 20_000;
const MAX_CF_TERMS: usize = 200_000;
const TINY: f64 = 1e-300;

pub type ComplexValue = Complex64;

fn check_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what}: non-finite value {z}")))
    }
}

/// Principal-branch exponential integral `E1(z)`.
///
/// Fails for `z = 0` and on the branch cut (negative real axis).
pub fn expint_e1(z: Complex64) -> Result<Complex64> {
    check_finite(z, "E1 argument")?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("E1 is singular at z = 0".into()));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::Domain(format!("E1 evaluated on its branch cut at z = {z}")));
    }
    let value = e1_unchecked(z);
    check_finite(value, "E1")?;
    Ok(value)
}

/// `e^z E1(z)`, free of the exponential growth or decay of `E1`.
///
/// Same domain as [`expint_e1`].
pub fn expint_e1_scaled(z: Complex64) -> Result<Complex64> {
    check_finite(z, "E1 argument")?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("E1 is singular at z = 0".into()));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::Domain(format!("E1 evaluated on its branch cut at z = {z}")));
    }
    let value = if use_e1_series(z) {
        z.exp() * e1_series(z)
    } else {
        e1_continued_fraction_scaled(z)
    };
    check_finite(value, "scaled E1")?;
    Ok(value)
}

fn use_e1_series(z: Complex64) -> bool {
    let r = z.norm();
    r <= SERIES_RADIUS || (z.re < 0.0 && r + z.re < NEAR_CUT_MARGIN)
}

/// E1 without domain checks. On the negative real axis the sign of the
/// imaginary zero selects the side of the cut.
fn e1_unchecked(z: Complex64) -> Complex64 {
    if use_e1_series(z) {
        e1_series(z)
    } else {
        (-z).exp() * e1_continued_fraction_scaled(z)
    }
}

fn e1_series(z: Complex64) -> Complex64 {
    // E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
    let minus_z = -z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let r = z.norm();
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= minus_z / kf;
        let contrib = term / kf;
        sum += contrib;
        if kf > r && contrib.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// Modified Lentz evaluation of the continued fraction for `e^z E1(z)`.
fn e1_continued_fraction_scaled(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let tiny = Complex64::new(TINY, 0.0);
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..MAX_CF_TERMS {
        let a = -((i * i) as f64);
        b += 2.0;
        d = b + a * d;
        if d.norm() < TINY {
            d = tiny;
        }
        d = one / d;
        c = b + a / c;
        if c.norm() < TINY {
            c = tiny;
        }
        let delta = c * d;
        h *= delta;
        if (delta - one).norm() < 1e-16 {
            break;
        }
    }
    h
}

fn si_ci_series(z: Complex64) -> (Complex64, Complex64) {
    // Si = sum (-1)^k z^{2k+1} / ((2k+1)(2k+1)!)
    // Ci = gamma + ln z + sum_{k>=1} (-1)^k z^{2k} / (2k (2k)!)
    let mut si = z;
    let mut ci = Complex64::new(0.0, 0.0);
    // p_n = z^n / n!
    let mut p = z;
    let mut n = 1usize;
    let mut sign = 1.0;
    loop {
        // advance p from z^n/n! to z^(n+1)/(n+1)!
        p = p * z / ((n + 1) as f64);
        sign = -sign;
        let even = p * sign / ((n + 1) as f64);
        ci += even;
        p = p * z / ((n + 2) as f64);
        let odd = p * sign / ((n + 2) as f64);
        si += odd;
        n += 2;
        let scale = si.norm().max(ci.norm()).max(1e-300);
        if even.norm().max(odd.norm()) <= 1e-17 * scale || n > 400 {
            break;
        }
    }
    (si, EULER_GAMMA + z.ln() + ci)
}

fn si_ci_from_e1(z: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let minus_i = Complex64::new(0.0, -1.0);
    // The products keep signed zeros, which selects the side of the cut
    // consistent with approaching the imaginary axis from Re z > 0.
    let a = e1_unchecked(i * z);
    let b = e1_unchecked(minus_i * z);
    let si = (a - b) / (2.0 * i) + FRAC_PI_2;
    let ci = -(a + b) / 2.0;
    (si, ci)
}

fn check_right_half_plane(z: Complex64) -> Result<()> {
    check_finite(z, "Si/Ci argument")?;
    if z.re < 0.0 {
        return Err(Error::Domain(format!("Si/Ci are only provided for Re z >= 0, got {z}")));
    }
    Ok(())
}

/// Sine and cosine integrals `(Si(z), Ci(z))` for `Re z >= 0`, `z != 0`.
pub fn sin_cos_integral(z: Complex64) -> Result<(Complex64, Complex64)> {
    check_right_half_plane(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("Ci has a logarithmic singularity at z = 0".into()));
    }
    let (si, ci) = if z.norm() <= SERIES_RADIUS {
        si_ci_series(z)
    } else {
        si_ci_from_e1(z)
    };
    check_finite(si, "Si")?;
    check_finite(ci, "Ci")?;
    Ok((si, ci))
}

/// Sine integral alone; defined at the origin where `Si(0) = 0`.
pub fn sin_integral(z: Complex64) -> Result<Complex64> {
    check_right_half_plane(z)?;
    if z.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    sin_cos_integral(z).map(|(si, _)| si)
}

pub fn cos_integral(z: Complex64) -> Result<Complex64> {
    sin_cos_integral(z).map(|(_, ci)| ci)
}

/// Direct-summation and `E1`-based paths, exposed for the seam check.
#[doc(hidden)]
pub fn si_ci_paths(z: Complex64) -> ((Complex64, Complex64), (Complex64, Complex64)) {
    (si_ci_series(z), si_ci_from_e1(z))
}
