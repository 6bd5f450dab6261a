//! Acceptance checks for the solver stack, runnable from the CLI and the
//! integration tests. Each criterion reports pass/fail plus the measured
//! numbers; diagnostics are reported without a verdict.

use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::curve::{
    self, c_star, check_asymptotics, check_derivative, find_normalized, scan, CurveEnd,
    FrequencyCurve, ScanOptions,
};
use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;
use crate::roots;
use crate::scaling::{self, max_relative_gap, rescale_ground_state, PowerScalingLaw};
use crate::shooting::{ground_state, multi_start_ground_states, GroundState};

pub const POHOZAEV_TOL: f64 = 1e-6;
pub const SCALING_TOL: f64 = 1e-3;
pub const DERIVATIVE_TOL: f64 = 1e-2;
pub const DERIVATIVE_STEP: f64 = 1e-3;
pub const MASS_TOL: f64 = 1e-3;
pub const UNIQUENESS_MU_TOL: f64 = 1e-3;
pub const SLOPE_TOL: f64 = 0.05;
pub const ORACLE_TOL: f64 = 1e-3;
/// Cubic-quintic scan window `[0.002, 0.183]`, 32 log-spaced points.
pub const CQ_SCAN: (f64, f64, usize) = (0.002, 0.183, 32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Criterion {
    MuStar = 1,
    Pohozaev = 2,
    PowerScaling = 3,
    DerivativeLaw = 4,
    CurveShape = 5,
    Multiplicity = 6,
    Uniqueness = 7,
    AsymptoticSlope = 8,
    OracleAgreement = 9,
    Determinism = 10,
}

impl Criterion {
    pub const ALL: [Criterion; 10] = [
        Criterion::MuStar,
        Criterion::Pohozaev,
        Criterion::PowerScaling,
        Criterion::DerivativeLaw,
        Criterion::CurveShape,
        Criterion::Multiplicity,
        Criterion::Uniqueness,
        Criterion::AsymptoticSlope,
        Criterion::OracleAgreement,
        Criterion::Determinism,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::MuStar => "mu* exactness",
            Criterion::Pohozaev => "Pohozaev certification",
            Criterion::PowerScaling => "pure-power scaling",
            Criterion::DerivativeLaw => "derivative law",
            Criterion::CurveShape => "cubic-quintic mass-curve shape",
            Criterion::Multiplicity => "multiplicity",
            Criterion::Uniqueness => "uniqueness",
            Criterion::AsymptoticSlope => "asymptotic exponent fit",
            Criterion::OracleAgreement => "oracle agreement",
            Criterion::Determinism => "determinism",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    MuStar,
    Pohozaev,
    Scaling,
    Derivative,
    Curve,
    Multiplicity,
    Uniqueness,
    Determinism,
}

impl Suite {
    pub const NAMES: &'static [&'static str] = &[
        "all",
        "mu-star",
        "pohozaev",
        "scaling",
        "derivative",
        "curve",
        "multiplicity",
        "uniqueness",
        "determinism",
    ];

    pub fn criteria(self) -> Vec<Criterion> {
        use Criterion as C;
        match self {
            Suite::All => C::ALL.to_vec(),
            Suite::MuStar => vec![C::MuStar],
            Suite::Pohozaev => vec![C::Pohozaev],
            Suite::Scaling => vec![C::PowerScaling, C::OracleAgreement],
            Suite::Derivative => vec![C::DerivativeLaw],
            Suite::Curve => vec![C::CurveShape, C::AsymptoticSlope],
            Suite::Multiplicity => vec![C::Multiplicity],
            Suite::Uniqueness => vec![C::Uniqueness],
            Suite::Determinism => vec![C::Determinism],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "mu-star" => Suite::MuStar,
            "pohozaev" => Suite::Pohozaev,
            "scaling" => Suite::Scaling,
            "derivative" => Suite::Derivative,
            "curve" => Suite::Curve,
            "multiplicity" => Suite::Multiplicity,
            "uniqueness" => Suite::Uniqueness,
            "determinism" => Suite::Determinism,
            other => {
                return Err(Error::Parse(format!(
                    "unknown suite '{other}' (expected one of {})",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub results: Vec<CriterionResult>,
    pub diagnostics: Vec<String>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

/// Shared state for a verification run: cached solves plus the running
/// Pohozaev tally over every ground state produced.
pub struct Verifier {
    opts: ScanOptions,
    cq_curve: OnceLock<Result<FrequencyCurve>>,
    power_base: Mutex<Vec<(f64, GroundState)>>,
    pohozaev: Mutex<(usize, f64)>,
    diagnostics: Mutex<Vec<String>>,
}

impl Verifier {
    pub fn new(opts: ScanOptions) -> Self {
        Verifier {
            opts,
            cq_curve: OnceLock::new(),
            power_base: Mutex::new(Vec::new()),
            pohozaev: Mutex::new((0, 0.0)),
            diagnostics: Mutex::new(Vec::new()),
        }
    }

    fn record(&self, state: &GroundState) {
        let mut tally = self.pohozaev.lock().unwrap();
        tally.0 += 1;
        tally.1 = tally.1.max(state.residuals.pohozaev_rel);
    }

    fn note(&self, line: String) {
        self.diagnostics.lock().unwrap().push(line);
    }

    fn solve(&self, spec: &NonlinearitySpec, mu: f64) -> Result<GroundState> {
        let state = ground_state(spec, 3, mu, &self.opts.solver)?;
        self.record(&state);
        Ok(state)
    }

    /// Pure-power ground state at `μ = 1`, `N = 3`.
    fn power_base(&self, p: f64) -> Result<GroundState> {
        if let Some((_, s)) = self
            .power_base
            .lock()
            .unwrap()
            .iter()
            .find(|(q, _)| *q == p)
        {
            return Ok(s.clone());
        }
        let state = self.solve(&NonlinearitySpec::pure_power(p), 1.0)?;
        self.power_base.lock().unwrap().push((p, state.clone()));
        Ok(state)
    }

    pub fn cq_grid() -> Vec<f64> {
        roots::geomspace(CQ_SCAN.0, CQ_SCAN.1, CQ_SCAN.2)
    }

    fn cq_curve(&self) -> Result<&FrequencyCurve> {
        self.cq_curve
            .get_or_init(|| {
                scan(
                    &NonlinearitySpec::cubic_quintic(1.0, 1.0),
                    3,
                    &Self::cq_grid(),
                    &self.opts,
                )
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Runs `criteria` in order; Pohozaev certification is evaluated last
    /// so that it covers every state the other checks produced.
    pub fn run(&self, criteria: &[Criterion]) -> Report {
        let mut results: Vec<CriterionResult> = criteria
            .iter()
            .filter(|&&c| c != Criterion::Pohozaev)
            .map(|&c| self.evaluate(c))
            .collect();
        if criteria.contains(&Criterion::Pohozaev) {
            results.push(self.evaluate(Criterion::Pohozaev));
        }
        results.sort_by_key(|r| r.id);
        Report {
            results,
            diagnostics: self.diagnostics.lock().unwrap().clone(),
        }
    }

    pub fn evaluate(&self, criterion: Criterion) -> CriterionResult {
        let outcome = match criterion {
            Criterion::MuStar => self.mu_star(),
            Criterion::Pohozaev => self.pohozaev(),
            Criterion::PowerScaling => self.power_scaling(),
            Criterion::DerivativeLaw => self.derivative_law(),
            Criterion::CurveShape => self.curve_shape(),
            Criterion::Multiplicity => self.multiplicity(),
            Criterion::Uniqueness => self.uniqueness(),
            Criterion::AsymptoticSlope => self.asymptotic_slope(),
            Criterion::OracleAgreement => self.oracle_agreement(),
            Criterion::Determinism => self.determinism(),
        };
        let (passed, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionResult {
            id: criterion.id(),
            name: criterion.name(),
            passed,
            detail,
        }
    }

    fn mu_star(&self) -> Result<(bool, String)> {
        let spec = NonlinearitySpec::cubic_quintic(1.0, 1.0);
        let closed = spec.mu_star()?;
        let numeric = spec.mu_star_numeric()?;
        let err = (numeric - 0.1875).abs();
        Ok((
            closed == 0.1875 && err <= 1e-10,
            format!("closed form {closed}, numeric {numeric:.15} (|err| {err:.1e} <= 1e-10)"),
        ))
    }

    fn pohozaev(&self) -> Result<(bool, String)> {
        let spec = NonlinearitySpec::cubic_quintic(1.0, 1.0);
        for mu in roots::geomspace(CQ_SCAN.0, CQ_SCAN.1, 8) {
            for state in
                multi_start_ground_states(&spec, 3, mu, self.opts.n_starts, &self.opts.solver)?
            {
                self.record(&state);
            }
        }
        for p in [2.5, 3.0, 3.5] {
            self.power_base(p)?;
        }
        let mut gaps = 0;
        if let Some(Ok(curve)) = self.cq_curve.get() {
            gaps = curve.gaps.len();
        }
        let (count, worst) = *self.pohozaev.lock().unwrap();
        Ok((
            worst <= POHOZAEV_TOL && gaps == 0,
            format!("{count} states, max |P|/|grad u|^2 = {worst:.2e} (<= {POHOZAEV_TOL:.0e}), {gaps} failed scan points"),
        ))
    }

    fn power_scaling(&self) -> Result<(bool, String)> {
        let spec = NonlinearitySpec::pure_power(3.0);
        let base = self.power_base(3.0)?;
        let law = PowerScalingLaw::new(3.0, 3)?;
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for mu in [0.25, 4.0] {
            let state = self.solve(&spec, mu)?;
            let mass_err = (state.mass() / (law.mass_factor(mu) * base.mass()) - 1.0).abs();
            let action_err = (state.action() / (law.level_factor(mu) * base.action()) - 1.0).abs();
            worst = worst.max(mass_err).max(action_err);
            parts.push(format!(
                "mu={mu}: mass {mass_err:.1e}, action {action_err:.1e}"
            ));
        }
        Ok((
            worst <= SCALING_TOL,
            format!("{} (<= {SCALING_TOL:.0e})", parts.join("; ")),
        ))
    }

    fn derivative_law(&self) -> Result<(bool, String)> {
        let cases = [
            (NonlinearitySpec::pure_power(3.0), 1.0),
            (NonlinearitySpec::cubic_quintic(1.0, 1.0), 0.1),
        ];
        let mut passed = true;
        let mut parts = Vec::new();
        for (spec, mu) in cases {
            let check = check_derivative(&spec, 3, mu, DERIVATIVE_STEP, &self.opts)?;
            passed &= check.central_rel_err <= DERIVATIVE_TOL;
            parts.push(format!(
                "{spec} mu={mu}: central {:.1e}, one-sided {:.1e}",
                check.central_rel_err, check.rel_err
            ));
        }
        Ok((
            passed,
            format!("{} (central <= {DERIVATIVE_TOL:.0e})", parts.join("; ")),
        ))
    }

    fn curve_shape(&self) -> Result<(bool, String)> {
        let curve = self.cq_curve()?;
        let s = &curve.samples;
        if s.len() < 3 {
            return Err(Error::InsufficientSamples {
                needed: 3,
                have: s.len(),
            });
        }
        let interior_min = s[1..s.len() - 1]
            .iter()
            .map(|x| x.c_minus)
            .fold(f64::INFINITY, f64::min);
        let left = s[0].c_minus / interior_min;
        let right = s[s.len() - 1].c_minus / interior_min;
        let increasing = curve.is_level_increasing();
        self.note(format!(
            "cubic-quintic scan: {} interior local minima of c (single-well shape {})",
            curve.interior_minima_count(),
            if curve.interior_minima_count() == 1 {
                "observed"
            } else {
                "not observed"
            }
        ));
        Ok((
            left > 3.0 && right > 3.0 && increasing && curve.gaps.is_empty(),
            format!(
                "c(left)/min = {left:.3}, c(right)/min = {right:.1} (both > 3), a increasing: {increasing}, gaps: {}",
                curve.gaps.len()
            ),
        ))
    }

    fn multiplicity(&self) -> Result<(bool, String)> {
        let curve = self.cq_curve()?;
        let cs = c_star(curve, &self.opts)?;
        self.note(format!(
            "cubic-quintic c* = {:.6} at mu = {:.6}{}",
            cs.c_star,
            cs.mu,
            if cs.boundary { " (boundary)" } else { "" }
        ));
        let m = 2.0 * cs.c_star;
        let found = find_normalized(curve, m, MASS_TOL, &self.opts)?;
        for s in &found.solutions {
            self.record(&s.state);
            if let Ok((tau, value)) = s.state.dilation_path_max(0.5, 2.0) {
                self.note(format!(
                    "dilation path at mu = {:.6}: max at tau = {tau:.6}, I = {value:.9} vs a = {:.9}",
                    s.mu,
                    s.state.level()
                ));
            }
        }
        let sols = &found.solutions;
        let two = sols.len() == 2 && sols.iter().all(|s| s.mass_error <= MASS_TOL);
        let ordered = two && sols[0].j_m > 0.0 && sols[0].j_m > sols[1].j_m;
        let below = find_normalized(curve, 0.5 * cs.c_star, MASS_TOL, &self.opts);
        let none_below = matches!(below, Err(Error::NoSolution { .. }));
        let listing: Vec<String> = sols
            .iter()
            .map(|s| format!("mu={:.6} J={:.6} err={:.1e}", s.mu, s.j_m, s.mass_error))
            .collect();
        Ok((
            two && ordered && none_below,
            format!(
                "m=2c*={m:.4}: {} solutions [{}]; m=c*/2: {}",
                sols.len(),
                listing.join(", "),
                if none_below {
                    "NoSolution".to_string()
                } else {
                    format!("{below:?}")
                }
            ),
        ))
    }

    fn uniqueness(&self) -> Result<(bool, String)> {
        let spec = NonlinearitySpec::pure_power(3.0);
        let base = self.power_base(3.0)?;
        let curve = scan(&spec, 3, &curve::default_mu_grid(&spec)?, &self.opts)?;
        let m = 1.0;
        // Tight mass tolerance: μ inherits |1/β| = 2 times the mass error.
        let found = find_normalized(&curve, m, 1e-6, &self.opts)?;
        let law = PowerScalingLaw::new(3.0, 3)?;
        let predicted = (m / base.mass()).powf(1.0 / law.beta);
        let sols = &found.solutions;
        for s in sols {
            self.record(&s.state);
        }
        let (passed, detail) = match sols.as_slice() {
            [s] => {
                let err = (s.mu / predicted - 1.0).abs();
                (
                    err <= UNIQUENESS_MU_TOL && s.j_m > 0.0,
                    format!(
                        "1 solution, mu = {:.6} vs (m/c0)^(1/beta) = {predicted:.6} (rel {err:.1e}), J = {:.4}",
                        s.mu, s.j_m
                    ),
                )
            }
            _ => (false, format!("{} solutions", sols.len())),
        };
        Ok((passed, detail))
    }

    fn asymptotic_slope(&self) -> Result<(bool, String)> {
        let curve = self.cq_curve()?;
        let report = check_asymptotics(curve, CurveEnd::ZeroPlus)?;
        let predicted = scaling::beta(3.0, 3);
        let err = (report.mass_slope - predicted).abs();
        Ok((
            err <= SLOPE_TOL,
            format!(
                "slope of ln c over mu in [{:.4}, {:.4}] = {:.4} vs beta = {predicted} (|diff| {err:.3} <= {SLOPE_TOL})",
                report.mu_range.0, report.mu_range.1, report.mass_slope
            ),
        ))
    }

    fn oracle_agreement(&self) -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for p in [2.5, 3.0, 3.5] {
            let spec = NonlinearitySpec::pure_power(p);
            let base = self.power_base(p)?;
            let law = PowerScalingLaw::new(p, 3)?;
            let mut local: f64 = 0.0;
            for mu in [0.25, 4.0] {
                let fresh = self.solve(&spec, mu)?;
                let predicted = rescale_ground_state(&base, p, mu)?;
                let pointwise = max_relative_gap(&fresh.profile, &predicted);
                let mass = (fresh.mass() / (law.mass_factor(mu) * base.mass()) - 1.0).abs();
                let action = (fresh.action() / (law.level_factor(mu) * base.action()) - 1.0).abs();
                local = local.max(pointwise).max(mass).max(action);
            }
            worst = worst.max(local);
            parts.push(format!("p={p}: {local:.1e}"));
        }
        Ok((
            worst <= ORACLE_TOL,
            format!(
                "max pointwise/mass/action gap {} (<= {ORACLE_TOL:.0e})",
                parts.join(", ")
            ),
        ))
    }

    fn determinism(&self) -> Result<(bool, String)> {
        let spec = NonlinearitySpec::cubic_quintic(1.0, 1.0);
        let grid = roots::geomspace(0.01, 0.1, 8);
        let first = scan(&spec, 3, &grid, &self.opts)?.to_csv(Some(100.0));
        let second = scan(&spec, 3, &grid, &self.opts)?.to_csv(Some(100.0));
        Ok((
            first == second,
            format!(
                "two scans of {} bytes, identical: {}",
                first.len(),
                first == second
            ),
        ))
    }
}

/// Runs a named suite with default options.
pub fn run_suite(suite: Suite, opts: ScanOptions) -> Report {
    Verifier::new(opts).run(&suite.criteria())
}
