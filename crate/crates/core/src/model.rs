//! Spin-boson parameters, the Ohmic spectral density and the second-order
//! time-convolutionless decay rates.
//!
//! Frequencies are in units of the cutoff `ω_c` and times in units of
//! `1/ω_c`; the constructors taking ratios fix `ω_c = 1`.
//!
//! The system couples to the bath through three eigenoperator channels:
//! relaxation `σ₋` at `+ω₀`, excitation `σ₊` at `-ω₀` (both with weight
//! `Δ²/4ω₀²`) and pure dephasing `σ_z` at zero frequency (weight `ε²/4ω₀²`).

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::specfun::expint_e1_scaled;

/// Largest accepted `ω₀/ω_c`; beyond it `e^{ω₀/ω_c}` factors stop being
/// representable in the unscaled rate formulas.
pub const MAX_OMEGA0_OVER_CUTOFF: f64 = 300.0;

/// Below this `ω₀/ω_c` the secular approximation becomes questionable.
pub const SECULAR_WARNING_RATIO: f64 = 5.0;

/// Absolute tolerance of the quadrature rate oracle, in units of `ω_c`.
pub const QUADRATURE_ABS_TOL: f64 = 1e-10;
pub const QUADRATURE_MAX_EVALS: usize = 1_000_000;

/// Grid step used to bracket zero crossings, in units of `1/ω_c`.
pub const SIGN_SCAN_STEP: f64 = 0.01;
/// Bisection stops once the bracket is narrower than this (units of `1/ω_c`).
pub const SIGN_ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    epsilon: f64,
    delta: f64,
    alpha: f64,
    omega_c: f64,
    omega0: f64,
}

impl SystemParams {
    /// Bias `ε`, tunnelling amplitude `Δ` and coupling `α` with `ω_c = 1`.
    pub fn new(epsilon: f64, delta: f64, alpha: f64) -> Result<Self> {
        Self::with_cutoff(epsilon, delta, alpha, 1.0)
    }

    pub fn with_cutoff(epsilon: f64, delta: f64, alpha: f64, omega_c: f64) -> Result<Self> {
        for (name, v) in [
            ("epsilon", epsilon),
            ("delta", delta),
            ("alpha", alpha),
            ("omega_c", omega_c),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {v}")));
            }
        }
        if epsilon < 0.0 {
            return Err(Error::param("epsilon", format!("must be >= 0, got {epsilon}")));
        }
        if delta < 0.0 {
            return Err(Error::param("delta", format!("must be >= 0, got {delta}")));
        }
        if alpha < 0.0 {
            return Err(Error::param("alpha", format!("must be >= 0, got {alpha}")));
        }
        if omega_c <= 0.0 {
            return Err(Error::param("omega_c", format!("must be > 0, got {omega_c}")));
        }
        let omega0 = epsilon.hypot(delta);
        if omega0 == 0.0 {
            return Err(Error::param("delta", "epsilon and delta cannot both vanish"));
        }
        let ratio = omega0 / omega_c;
        if ratio > MAX_OMEGA0_OVER_CUTOFF {
            return Err(Error::param(
                "omega0_over_omegac",
                format!("{ratio} exceeds the supported maximum {MAX_OMEGA0_OVER_CUTOFF}"),
            ));
        }
        if ratio < SECULAR_WARNING_RATIO {
            log::warn!(
                "omega0/omega_c = {ratio:.3} < {SECULAR_WARNING_RATIO}: secular approximation may be inaccurate"
            );
        }
        Ok(Self {
            epsilon,
            delta,
            alpha,
            omega_c,
            omega0,
        })
    }

    /// Parameters from `ε/Δ`, `ω₀/ω_c` and `α`, with `ω_c = 1`.
    pub fn from_ratios(epsilon_over_delta: f64, omega0_over_omegac: f64, alpha: f64) -> Result<Self> {
        if !(epsilon_over_delta.is_finite() && epsilon_over_delta >= 0.0) {
            return Err(Error::param(
                "epsilon_over_delta",
                format!("must be finite and >= 0, got {epsilon_over_delta}"),
            ));
        }
        if !(omega0_over_omegac.is_finite() && omega0_over_omegac > 0.0) {
            return Err(Error::param(
                "omega0_over_omegac",
                format!("must be finite and > 0, got {omega0_over_omegac}"),
            ));
        }
        let norm = epsilon_over_delta.hypot(1.0);
        Self::new(
            omega0_over_omegac * epsilon_over_delta / norm,
            omega0_over_omegac / norm,
            alpha,
        )
    }

    /// Same `ω₀`, `ω_c` and `α`, with the bias/tunnelling split moved to a new `ε/Δ`.
    pub fn with_bias_ratio(&self, epsilon_over_delta: f64) -> Result<Self> {
        let norm = epsilon_over_delta.hypot(1.0);
        if !(epsilon_over_delta.is_finite() && epsilon_over_delta >= 0.0) {
            return Err(Error::param(
                "epsilon_over_delta",
                format!("must be finite and >= 0, got {epsilon_over_delta}"),
            ));
        }
        Self::with_cutoff(
            self.omega0 * epsilon_over_delta / norm,
            self.omega0 / norm,
            self.alpha,
            self.omega_c,
        )
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::with_cutoff(self.epsilon, self.delta, alpha, self.omega_c)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn spectral_density(&self) -> OhmicSpectralDensity {
        OhmicSpectralDensity {
            alpha: self.alpha,
            omega_c: self.omega_c,
        }
    }

    /// `Δ²/4ω₀²`, the weight of the `σ∓` channels.
    pub fn transition_weight(&self) -> f64 {
        let r = self.delta / self.omega0;
        0.25 * r * r
    }

    /// `ε²/4ω₀²`, the weight of the `σ_z` channel.
    pub fn dephasing_weight(&self) -> f64 {
        let r = self.epsilon / self.omega0;
        0.25 * r * r
    }

    /// Rate sampling step that resolves the `ω₀` oscillation with at least
    /// 20 points per period.
    pub fn default_rate_step(&self) -> f64 {
        0.005 / self.omega_c * (self.omega_c / self.omega0 * 10.0).min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicSpectralDensity {
    pub alpha: f64,
    pub omega_c: f64,
}

impl OhmicSpectralDensity {
    /// `J(ω) = (α/2) ω e^{-ω/ω_c}`.
    pub fn value(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!("spectral density needs omega >= 0, got {omega}")));
        }
        Ok(0.5 * self.alpha * omega * (-omega / self.omega_c).exp())
    }
}

pub fn spectral_density(sd: &OhmicSpectralDensity, omega: f64) -> Result<f64> {
    sd.value(omega)
}

/// The three TCL2 rates at one time, plus their channel-weighted forms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateSet {
    pub t: f64,
    /// `γ_{+ω₀}(t)`
    pub gamma_plus: f64,
    /// `γ_{-ω₀}(t)`
    pub gamma_minus: f64,
    /// `γ_0(t)`
    pub gamma_zero: f64,
    /// `σ₋` channel rate `(Δ²/4ω₀²) γ_{+ω₀}`.
    pub gamma1: f64,
    /// `σ₊` channel rate `(Δ²/4ω₀²) γ_{-ω₀}`.
    pub gamma2: f64,
    /// `σ_z` channel rate `(ε²/4ω₀²) γ_0`.
    pub gamma3: f64,
}

impl RateSet {
    fn weighted(p: &SystemParams, t: f64, gamma_plus: f64, gamma_minus: f64, gamma_zero: f64) -> Self {
        let w = p.transition_weight();
        Self {
            t,
            gamma_plus,
            gamma_minus,
            gamma_zero,
            gamma1: w * gamma_plus,
            gamma2: w * gamma_minus,
            gamma3: p.dephasing_weight() * gamma_zero,
        }
    }

    /// Same bare rates with the channel weights of another parameter set
    /// sharing `ω₀`, `ω_c` and `α`.
    pub fn reweighted(&self, p: &SystemParams) -> Self {
        Self::weighted(p, self.t, self.gamma_plus, self.gamma_minus, self.gamma_zero)
    }

    pub fn channel(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Lowering => self.gamma1,
            Channel::Raising => self.gamma2,
            Channel::Dephasing => self.gamma3,
        }
    }

    /// Coherence decay rate `dζ/dt = (γ₁ + γ₂)/2 + 2γ₃`.
    pub fn coherence_decay_rate(&self) -> f64 {
        0.5 * (self.gamma1 + self.gamma2) + 2.0 * self.gamma3
    }
}

/// Jump channel of the master equation: `1 ↔ σ₋`, `2 ↔ σ₊`, `3 ↔ σ_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Lowering = 1,
    Raising = 2,
    Dephasing = 3,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Lowering, Channel::Raising, Channel::Dephasing];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Channel::Lowering),
            2 => Ok(Channel::Raising),
            3 => Ok(Channel::Dephasing),
            _ => Err(Error::Domain(format!("no jump channel with id {id}"))),
        }
    }

    pub fn operator_name(self) -> &'static str {
        match self {
            Channel::Lowering => "sigma_minus",
            Channel::Raising => "sigma_plus",
            Channel::Dephasing => "sigma_z",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{} = {}", self.id(), self.operator_name())
    }
}

/// Transition frequency selecting one of the three rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frequency {
    Plus,
    Minus,
    Zero,
}

impl Frequency {
    pub fn value(self, p: &SystemParams) -> f64 {
        match self {
            Frequency::Plus => p.omega0,
            Frequency::Minus => -p.omega0,
            Frequency::Zero => 0.0,
        }
    }
}

/// Closed-form rates at time `t >= 0`.
///
/// With `z = ω₀t + iω₀/ω_c` the `Si`/`Ci` combinations reduce to single
/// exponential integrals:
///
/// ```text
/// e^{-c}[Re Si(z) - Im Ci(z) + π/2] = π e^{-c} + Im[e^{-ix} e^{w}E1(w)],  w = -c + ix
/// e^{+c}[Re Si(z) + Im Ci(z) - π/2] = -Im[e^{+ix} e^{v}E1(v)],           v = c - ix
/// ```
///
/// with `x = ω₀t`, `c = ω₀/ω_c`. Evaluating the scaled `E1` avoids the
/// `e^{2c}` cancellation the literal form suffers in `γ_{-ω₀}`.
pub fn rates_closed_form(p: &SystemParams, t: f64) -> Result<RateSet> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("rates need finite t >= 0, got {t}")));
    }
    if t == 0.0 || p.alpha == 0.0 {
        return Ok(RateSet::weighted(p, t, 0.0, 0.0, 0.0));
    }
    let wc = p.omega_c;
    let w0 = p.omega0;
    let alpha = p.alpha;
    let x = w0 * t;
    let c = w0 / wc;
    let (sin_x, cos_x) = x.sin_cos();
    let wct = wc * t;
    let prefactor = alpha * wc / (1.0 + wct * wct);

    let phase = Complex64::new(cos_x, sin_x);
    let u_left = expint_e1_scaled(Complex64::new(-c, x))?;
    let u_right = expint_e1_scaled(Complex64::new(c, -x))?;

    let gamma_plus = prefactor * (wct * cos_x - sin_x) + alpha * w0 * (PI * (-c).exp() + (phase.conj() * u_left).im);
    let gamma_minus = prefactor * (wct * cos_x + sin_x) - alpha * w0 * (phase * u_right).im;
    let gamma_zero = alpha * wc * wc * t / (1.0 + wct * wct);
    Ok(RateSet::weighted(p, t, gamma_plus, gamma_minus, gamma_zero))
}

/// Inner frequency integral `∫_0^∞ J(ω') cos[(ω - ω')s] dω'`, doubled.
///
/// For the Ohmic density it equals `α Re[e^{iωs} / (1/ω_c + is)²]`.
fn rate_kernel(alpha: f64, omega_c: f64, omega: f64, s: f64) -> f64 {
    let a = 1.0 / omega_c;
    let norm = a * a + s * s;
    let (sin_ws, cos_ws) = (omega * s).sin_cos();
    alpha * (cos_ws * (a * a - s * s) + sin_ws * 2.0 * a * s) / (norm * norm)
}

/// Rate `γ_ω(t)` from its double-integral definition, with the frequency
/// integral done analytically and the time integral by adaptive quadrature.
pub fn rates_quadrature(p: &SystemParams, omega: Frequency, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("rates need finite t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let w = omega.value(p);
    let (alpha, wc) = (p.alpha, p.omega_c);
    let r = quadrature::integrate(
        |s| rate_kernel(alpha, wc, w, s),
        0.0,
        t,
        QUADRATURE_ABS_TOL * wc,
        QUADRATURE_MAX_EVALS,
    )?;
    Ok(r.value)
}

/// Zero crossings of a channel rate on `(0, t_max]`, in increasing order.
pub fn sign_changes(p: &SystemParams, channel: Channel, t_max: f64) -> Result<Vec<f64>> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("t_max must be finite and > 0, got {t_max}")));
    }
    let rate = |t: f64| rates_closed_form(p, t).map(|r| r.channel(channel));
    let step = SIGN_SCAN_STEP / p.omega_c;
    let tol = SIGN_ROOT_TOL / p.omega_c;
    let n = (t_max / step).ceil() as usize;
    let mut crossings = Vec::new();
    // t = 0 is a zero of every rate and is not a crossing
    let mut prev_t = (step.min(t_max)) * 1e-3;
    let mut prev = rate(prev_t)?;
    for k in 1..=n {
        let t = (k as f64 * step).min(t_max);
        let cur = rate(t)?;
        if cur == 0.0 {
            crossings.push(t);
        } else if prev != 0.0 && prev.signum() != cur.signum() {
            let (mut lo, mut hi, mut f_lo) = (prev_t, t, prev);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                let f_mid = rate(mid)?;
                if f_mid == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if f_mid.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
        prev_t = t;
        prev = cur;
    }
    Ok(crossings)
}
