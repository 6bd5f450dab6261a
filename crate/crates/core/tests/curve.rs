use approx::assert_relative_eq;
use normsol::curve::{
    c_star, check_asymptotics, check_derivative, default_mu_grid, find_normalized, scan,
    Classification, CurveEnd, ScanOptions,
};
use normsol::roots::geomspace;
use normsol::{Error, NonlinearitySpec};
use proptest::prelude::*;

fn opts() -> ScanOptions {
    ScanOptions::default()
}

#[test]
fn pure_power_curve_follows_power_laws() {
    let spec = NonlinearitySpec::pure_power(3.0);
    let curve = scan(&spec, 3, &geomspace(0.01, 100.0, 12), &opts()).unwrap();
    assert!(curve.gaps.is_empty());
    assert!(curve.is_level_increasing());
    let zero = check_asymptotics(&curve, CurveEnd::ZeroPlus).unwrap();
    assert_eq!(zero.predicted_level_slope, Some(0.5));
    assert_eq!(zero.predicted_mass_slope, Some(-0.5));
    assert!((zero.level_slope - 0.5).abs() < 0.02);
    assert!((zero.mass_slope + 0.5).abs() < 0.02);
    let top = check_asymptotics(&curve, CurveEnd::MuStarMinus).unwrap();
    assert_eq!(top.level_diverging, Some(true));
    assert_eq!(top.mass_diverging, Some(false));
    assert!(top.level_over_mu_slope.unwrap() < 0.0);
}

#[test]
fn cubic_quintic_curve_has_single_well() {
    let spec = NonlinearitySpec::cubic_quintic(1.0, 1.0);
    let curve = scan(&spec, 3, &geomspace(0.004, 0.17, 16), &opts()).unwrap();
    assert!(curve.gaps.is_empty());
    assert!(curve.is_level_increasing());
    assert_eq!(curve.interior_minima_count(), 1);
    assert!(curve
        .samples
        .iter()
        .all(|s| s.n_states == 1 && s.c_minus == s.c_plus));
    let cs = c_star(&curve, &opts()).unwrap();
    assert!(!cs.boundary);
    assert!(
        cs.c_star
            <= curve
                .samples
                .iter()
                .map(|s| s.c_minus)
                .fold(f64::INFINITY, f64::min)
    );
    assert!(cs.mu > 0.015 && cs.mu < 0.04);
    let top = check_asymptotics(&curve, CurveEnd::MuStarMinus).unwrap();
    assert_eq!(top.mass_diverging, Some(true));
    assert_eq!(top.level_diverging, Some(true));
}

#[test]
fn derivative_of_level_is_mass() {
    let check =
        check_derivative(&NonlinearitySpec::pure_power(3.0), 3, 1.0, 1e-3, &opts()).unwrap();
    assert!(check.rel_err < 1e-2);
    assert!(check.central_rel_err < 1e-5);
    assert!(
        check.fd_minus > check.fd_plus,
        "a is concave for pure powers"
    );
    let check = check_derivative(
        &NonlinearitySpec::cubic_quintic(1.0, 1.0),
        3,
        0.05,
        1e-4,
        &opts(),
    )
    .unwrap();
    assert!(check.rel_err < 1e-2);
    assert!(matches!(
        check_derivative(
            &NonlinearitySpec::cubic_quintic(1.0, 1.0),
            3,
            0.187,
            1e-3,
            &opts()
        ),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn normalized_solutions_straddle_the_well() {
    let spec = NonlinearitySpec::cubic_quintic(1.0, 1.0);
    let curve = scan(&spec, 3, &geomspace(0.003, 0.15, 20), &opts()).unwrap();
    let found = find_normalized(&curve, 150.0, 1e-4, &opts()).unwrap();
    let sols = &found.solutions;
    assert_eq!(sols.len(), 2);
    assert!(sols[0].mu < sols[1].mu);
    assert_eq!(sols[0].classification, Classification::BmLocalMax);
    assert_eq!(sols[1].classification, Classification::BmLocalMin);
    for s in sols {
        assert!(s.mass_error <= 1e-4);
        assert_relative_eq!(s.j_m, s.state.action() - 150.0 * s.mu, max_relative = 1e-12);
        assert!(s.state.residuals.pohozaev_rel <= 1e-6);
    }
    assert!(sols[0].j_m > 0.0 && sols[0].j_m > sols[1].j_m);
    assert!(matches!(
        find_normalized(&curve, 50.0, 1e-3, &opts()),
        Err(Error::NoSolution { .. })
    ));
}

#[test]
fn pure_power_has_one_normalized_solution() {
    let spec = NonlinearitySpec::pure_power(3.0);
    let curve = scan(&spec, 3, &default_mu_grid(&spec).unwrap(), &opts()).unwrap();
    let found = find_normalized(&curve, 5.0, 1e-6, &opts()).unwrap();
    assert_eq!(found.solutions.len(), 1);
    let sol = &found.solutions[0];
    let c0 = 9.448_625_651;
    assert_relative_eq!(sol.mu, (5.0f64 / c0).powi(-2), max_relative = 1e-5);
    assert_eq!(sol.classification, Classification::BmLocalMax);
    assert!(sol.j_m > 0.0);
}

#[test]
fn default_grid_respects_threshold() {
    let cq = default_mu_grid(&NonlinearitySpec::cubic_quintic(1.0, 1.0)).unwrap();
    assert_eq!(cq.len(), 32);
    assert_eq!(cq[0], 1e-3);
    assert_relative_eq!(cq[31], 0.98 * 0.1875, max_relative = 1e-15);
    let pp = default_mu_grid(&NonlinearitySpec::pure_power(3.0)).unwrap();
    assert_eq!((pp[0], pp[31]), (1e-3, 1e2));
}

#[test]
fn failed_points_become_gaps() {
    let spec = NonlinearitySpec::cubic_quintic(1.0, 1.0);
    let curve = scan(&spec, 3, &[0.05, 0.1, 0.2, 0.3], &opts()).unwrap();
    assert_eq!(curve.samples.len(), 2);
    assert_eq!(curve.gaps.len(), 2);
    assert!(matches!(
        scan(&spec, 3, &[0.2, 0.3], &opts()),
        Err(Error::EmptyCurve)
    ));
}

#[test]
fn thread_cap_does_not_change_results() {
    let spec = NonlinearitySpec::cubic_quintic(1.0, 1.0);
    let grid = geomspace(0.01, 0.1, 5);
    let serial = ScanOptions {
        threads: Some(1),
        ..opts()
    };
    let a = scan(&spec, 3, &grid, &serial).unwrap().to_csv(Some(100.0));
    let b = scan(&spec, 3, &grid, &opts()).unwrap().to_csv(Some(100.0));
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn b_m_is_level_minus_m_mu(m in 0.0f64..1e3) {
        let spec = NonlinearitySpec::pure_power(3.0);
        let curve = scan(&spec, 3, &[0.5, 1.0, 2.0], &ScanOptions::default()).unwrap();
        for ((mu, b), s) in curve.b_m(m).into_iter().zip(&curve.samples) {
            prop_assert_eq!(mu, s.mu);
            prop_assert!((b - (s.a - m * s.mu)).abs() <= 1e-12 * s.a.max(m * s.mu));
        }
    }
}
