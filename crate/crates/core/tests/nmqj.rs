use proptest::prelude::*;
use spinboson::dynamics::{build_kernels, DensityMatrix};
use spinboson::model::{rates_closed_form, SystemParams};
use spinboson::nmqj::{
    count_difference_series, deterministic_step, ensemble_density, run_unraveling, step_ensemble, ChaCha8Rng,
    EnsembleState, PureState, Slot, UnravelConfig,
};

use rand_chacha::rand_core::SeedableRng;

type Component = (&'static str, fn(&DensityMatrix) -> f64);

fn strong() -> SystemParams {
    SystemParams::from_ratios(0.5, 10.0, 0.2).unwrap()
}

#[test]
fn estimator_is_unbiased_over_independent_seeds() {
    let p = strong();
    let seeds = 60;
    let cfg = |seed| UnravelConfig {
        n_traj: 200,
        t_max: 2.0,
        dt: 1e-3,
        seed,
        stride: 500,
        ..UnravelConfig::default()
    };
    let runs: Vec<_> = (0..seeds).map(|s| run_unraveling(&p, &cfg(s)).unwrap()).collect();
    let table = build_kernels(&p, 2.0, 1e-3).unwrap();
    let rho0 = DensityMatrix::equal_superposition();
    for (i, snapshot) in runs[0].snapshots.iter().enumerate().skip(1) {
        let exact = table.apply_at(snapshot.step, &rho0);
        let pick: [Component; 3] = [
            ("rho_pp", |r| r.rho_pp()),
            ("re rho_pm", |r| r.rho_pm().re),
            ("im rho_pm", |r| r.rho_pm().im),
        ];
        for (name, f) in pick {
            let samples: Vec<f64> = runs.iter().map(|r| f(&r.snapshots[i].density)).collect();
            let mean = samples.iter().sum::<f64>() / seeds as f64;
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
            let sem = (var / seeds as f64).sqrt().max(1.0 / (200.0 * seeds as f64));
            assert!(
                (mean - f(&exact)).abs() <= 3.0 * sem,
                "{name} at t = {}: mean {mean} vs {} (sem {sem:e})",
                snapshot.t,
                f(&exact)
            );
        }
    }
}

#[test]
fn counts_are_conserved_and_match_density() {
    let p = strong();
    let run = run_unraveling(
        &p,
        &UnravelConfig {
            n_traj: 3000,
            t_max: 3.0,
            stride: 100,
            seed: 17,
            ..UnravelConfig::default()
        },
    )
    .unwrap();
    let mut reversed = 0;
    for s in &run.snapshots {
        assert_eq!(s.counts.total(), 3000);
        let n = 3000.0;
        let c = s.psi0.coherence() * ((s.counts[Slot::Psi0] as f64 - s.counts[Slot::Psi0Ph] as f64) / n);
        assert!((s.density.rho_pm() - c).norm() < 1e-15);
        reversed = s.jumps.reversed.iter().sum();
        assert_eq!(s.jumps.reversed[2], 0);
    }
    assert!(reversed > 0, "strong coupling should produce reversed jumps");
}

#[test]
fn manual_stepping_reproduces_the_driver() {
    let p = strong();
    let cfg = UnravelConfig {
        n_traj: 500,
        t_max: 1.0,
        stride: 1000,
        seed: 3,
        ..UnravelConfig::default()
    };
    let run = run_unraveling(&p, &cfg).unwrap();
    let rng = ChaCha8Rng::seed_from_u64(3);
    let mut e = EnsembleState::new(500, PureState::equal_superposition()).unwrap();
    for k in 0..1000 {
        let rates = rates_closed_form(&p, k as f64 * 1e-3).unwrap();
        step_ensemble(&mut e, &rates, 1e-3, &rng).unwrap();
    }
    let last = run.snapshots.last().unwrap();
    assert_eq!(e.counts(), last.counts);
    assert_eq!(ensemble_density(&e), last.density);
}

#[test]
fn count_difference_starts_at_one() {
    let p = SystemParams::from_ratios(0.3, 10.0, 0.01).unwrap();
    let run = run_unraveling(
        &p,
        &UnravelConfig {
            n_traj: 1000,
            t_max: 0.5,
            ..UnravelConfig::default()
        },
    )
    .unwrap();
    let series = count_difference_series(&run);
    assert_eq!((series[0].value, series[0].std_error), (1.0, 0.0));
    assert!(series.iter().all(|d| d.value <= 1.0 && d.value >= -1.0));
}

#[test]
fn step_errors_carry_the_time() {
    let p = SystemParams::from_ratios(0.3, 10.0, 0.01).unwrap();
    let cfg = UnravelConfig {
        n_traj: 100,
        t_max: 1.0,
        dt: 0.5,
        ..UnravelConfig::default()
    };
    // with alpha = 20 a step of 0.5 violates the rate-step bound once the rates grow
    let err = run_unraveling(&p.with_alpha(20.0).unwrap(), &cfg).unwrap_err();
    assert!(err.to_string().starts_with("at t = "), "{err}");
    assert_eq!(err.exit_code(), 3);
}

proptest! {
    #[test]
    fn drift_commutes_with_phase_flip(
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
        g1 in -5.0f64..5.0,
        g2 in -5.0f64..5.0,
        g3 in 0.0f64..5.0,
    ) {
        let s = PureState::from_angles(theta, phi).unwrap();
        let rates = spinboson::model::RateSet { gamma1: g1, gamma2: g2, gamma3: g3, ..Default::default() };
        let a = deterministic_step(&s.phase_flipped(), &rates, 1e-3).unwrap();
        let b = deterministic_step(&s, &rates, 1e-3).unwrap().phase_flipped();
        prop_assert_eq!(a, b);
        prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
