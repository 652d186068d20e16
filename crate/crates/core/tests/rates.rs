use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use spinboson::model::{rates_closed_form, rates_quadrature, sign_changes, Channel, Frequency, SystemParams};
use spinboson::specfun::sin_cos_integral;

fn reference() -> SystemParams {
    SystemParams::from_ratios(1.0 / (2.0 * 3f64.sqrt()), 10.0, 0.01).unwrap()
}

/// Rates evaluated term by term from `Re Si(z)` and `Im Ci(z)`.
fn literal_rates(p: &SystemParams, t: f64) -> (f64, f64) {
    let (w0, a) = (p.omega0(), p.alpha());
    let (si, ci) = sin_cos_integral(Complex64::new(w0 * t, w0)).unwrap();
    let first = a / (1.0 + t * t);
    let (s, c) = (w0 * t).sin_cos();
    let plus = first * (t * c - s) + a * w0 * (-w0).exp() * (si.re - ci.im + FRAC_PI_2);
    let minus = first * (t * c + s) + a * w0 * w0.exp() * (si.re + ci.im - FRAC_PI_2);
    (plus, minus)
}

#[test]
fn closed_form_agrees_with_literal_si_ci_expression() {
    let p = reference();
    for k in 1..=40 {
        let t = 0.05 * k as f64;
        let r = rates_closed_form(&p, t).unwrap();
        let (plus, minus) = literal_rates(&p, t);
        // the literal gamma_minus carries an e^{2 omega0/omega_c} cancellation
        assert!((r.gamma_plus - plus).abs() < 1e-12, "t = {t}");
        assert!((r.gamma_minus - minus).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn closed_form_matches_double_integral_definition() {
    let p = reference();
    let mut worst = 0.0f64;
    for k in 1..=500 {
        let t = 0.1 * k as f64;
        let r = rates_closed_form(&p, t).unwrap();
        for (f, closed) in [
            (Frequency::Plus, r.gamma_plus),
            (Frequency::Minus, r.gamma_minus),
            (Frequency::Zero, r.gamma_zero),
        ] {
            let q = rates_quadrature(&p, f, t).unwrap();
            if closed.abs() > 1e-8 {
                let e = (q - closed).abs() / closed.abs();
                worst = worst.max(e);
                assert!(e <= 1e-6, "{f:?} at t = {t}: {closed} vs {q}");
            }
        }
    }
    println!("worst relative deviation {worst:e}");
}

#[test]
fn markov_limit() {
    for w0 in [5.0, 10.0] {
        let p = SystemParams::from_ratios(0.2, w0, 0.01).unwrap();
        let limit = PI * p.alpha() * w0 * (-w0).exp();
        let sd = p.spectral_density().value(w0).unwrap();
        assert!((limit - 2.0 * PI * sd).abs() < 1e-18);
        let r = rates_closed_form(&p, 200.0).unwrap();
        assert!((r.gamma_plus / limit - 1.0).abs() < 0.01, "w0 = {w0}");
        assert!(r.gamma_minus.abs() < 0.02 * limit, "w0 = {w0}");
        let q = rates_quadrature(&p, Frequency::Plus, 200.0).unwrap();
        assert!((q / r.gamma_plus - 1.0).abs() < 1e-6);
    }
}

#[test]
fn crossings_depend_only_on_omega0() {
    let base = sign_changes(
        &SystemParams::from_ratios(0.0, 10.0, 0.01).unwrap(),
        Channel::Lowering,
        20.0,
    )
    .unwrap();
    assert!(!base.is_empty());
    for ratio in [0.1, 0.3] {
        let p = SystemParams::from_ratios(ratio, 10.0, 0.01).unwrap();
        assert_eq!(sign_changes(&p, Channel::Lowering, 20.0).unwrap(), base);
    }
    let p = reference();
    assert!(!sign_changes(&p, Channel::Raising, 20.0).unwrap().is_empty());
}

#[test]
fn dephasing_rate_never_negative() {
    let p = reference();
    for k in 0..=40_000 {
        let r = rates_closed_form(&p, k as f64 * 0.005).unwrap();
        assert!(r.gamma3 >= 0.0 && r.gamma_zero >= 0.0);
    }
}

proptest! {
    #[test]
    fn rates_scale_linearly_with_alpha(t in 0.0f64..60.0, scale in 0.1f64..10.0) {
        let p = reference();
        let q = p.with_alpha(p.alpha() * scale).unwrap();
        let a = rates_closed_form(&p, t).unwrap();
        let b = rates_closed_form(&q, t).unwrap();
        for (x, y) in [(a.gamma_plus, b.gamma_plus), (a.gamma_minus, b.gamma_minus), (a.gamma_zero, b.gamma_zero)] {
            // bounded by the rate scale alpha, not the (possibly vanishing) value
            prop_assert!((y - scale * x).abs() <= 1e-13 * scale * p.alpha());
        }
    }

    #[test]
    fn rates_finite(t in 0.0f64..500.0, w0 in 0.5f64..300.0) {
        let p = SystemParams::from_ratios(0.3, w0, 0.01).unwrap();
        let r = rates_closed_form(&p, t).unwrap();
        prop_assert!(r.gamma_plus.is_finite() && r.gamma_minus.is_finite() && r.gamma_zero >= 0.0);
    }
}
