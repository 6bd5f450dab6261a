use approx::assert_relative_eq;
use normsol::nonlinearity::Regime;
use normsol::scaling::{
    beta, critical_model, critical_model_level, max_relative_gap, rescale_ground_state,
    PowerScalingLaw,
};
use normsol::{ground_state, NonlinearitySpec, SolverOptions};
use proptest::prelude::*;

#[test]
fn rescaled_profiles_match_fresh_solves() {
    let opts = SolverOptions::default();
    for p in [2.5, 3.0, 3.5] {
        let spec = NonlinearitySpec::pure_power(p);
        let base = ground_state(&spec, 3, 1.0, &opts).unwrap();
        let law = PowerScalingLaw::new(p, 3).unwrap();
        for mu in [0.25, 1.0, 4.0] {
            let fresh = ground_state(&spec, 3, mu, &opts).unwrap();
            let predicted = rescale_ground_state(&base, p, mu).unwrap();
            assert!(
                max_relative_gap(&fresh.profile, &predicted) <= 1e-3,
                "p={p} mu={mu}"
            );
            assert_relative_eq!(
                fresh.mass(),
                law.mass_factor(mu) * base.mass(),
                max_relative = 1e-3
            );
            assert_relative_eq!(
                fresh.action(),
                law.level_factor(mu) * base.action(),
                max_relative = 1e-3
            );
            assert_relative_eq!(
                predicted.mass(),
                law.mass_factor(mu) * base.mass(),
                max_relative = 1e-9
            );
        }
    }
}

#[test]
fn rescale_rejects_other_families() {
    let spec = NonlinearitySpec::cubic_quintic(1.0, 1.0);
    let base = ground_state(&spec, 3, 0.1, &SolverOptions::default()).unwrap();
    assert!(rescale_ground_state(&base, 3.0, 2.0).is_err());
}

#[test]
fn critical_model_level_predicts_solver() {
    let opts = SolverOptions::default();
    let beta0 = ground_state(&critical_model(1.0, 3), 3, 1.0, &opts)
        .unwrap()
        .action();
    for (delta, mu) in [(2.0, 1.0), (1.0, 2.0), (0.5, 0.3)] {
        let solved = ground_state(&critical_model(delta, 3), 3, mu, &opts)
            .unwrap()
            .action();
        assert_relative_eq!(
            solved,
            critical_model_level(delta, mu, 3, beta0),
            max_relative = 1e-3
        );
    }
}

#[test]
fn beta_sign_agrees_with_classification() {
    for &(p, dim) in &[
        (2.0, 3),
        (2.5, 3),
        (3.0, 3),
        (4.0, 3),
        (2.5, 2),
        (4.0, 2),
        (1.5, 4),
    ] {
        let spec = NonlinearitySpec::pure_power(p);
        let report = spec.classify(dim).unwrap();
        assert_eq!(beta(p, dim) < 0.0, report.p0_supercritical, "p={p} N={dim}");
        if report.p0_supercritical {
            assert_eq!(report.regime, Regime::SupercriticalAtInfinity);
        } else {
            assert_eq!(report.regime, Regime::OutsideSupercriticalAtZero);
        }
    }
}

proptest! {
    #[test]
    fn beta_sign_regimes(p in 1.05f64..6.0, dim in 2usize..6) {
        let b = beta(p, dim);
        let critical = 1.0 + 4.0 / dim as f64;
        if (p - critical).abs() > 1e-9 {
            prop_assert_eq!(b < 0.0, p > critical);
            prop_assert_eq!(b > 0.0, p < critical);
        }
        if dim > 2 && p < (dim as f64 + 2.0) / (dim as f64 - 2.0) {
            prop_assert!(b > -1.0);
        }
    }

    #[test]
    fn critical_level_is_linear_in_mu(delta in 0.1f64..10.0, mu in 0.01f64..10.0, dim in 2usize..5) {
        let one = critical_model_level(delta, mu, dim, 3.0);
        let two = critical_model_level(delta, 2.0 * mu, dim, 3.0);
        prop_assert!((two / one - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_factors_compose(p in 1.5f64..5.0, a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let law = PowerScalingLaw::new(p, 3).unwrap();
        let lhs = law.mass_factor(a * b);
        let rhs = law.mass_factor(a) * law.mass_factor(b);
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }
}
