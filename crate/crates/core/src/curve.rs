//! Frequency curves `μ ↦ (a(μ), c₋(μ), c₊(μ))`, the Lagrangian level
//! `b_m(μ) = a(μ) - mμ`, and normalized solutions with prescribed mass.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;
use crate::profile::fmt17;
use crate::roots;
use crate::shooting::{multi_start_ground_states, GroundState, SolverOptions};

#[derive(Debug, Clone, Serialize)]
pub struct ScanOptions {
    pub n_starts: usize,
    /// Worker threads for independent frequency points; `None` uses the
    /// global rayon pool.
    pub threads: Option<usize>,
    pub solver: SolverOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            n_starts: 8,
            threads: None,
            solver: SolverOptions::default(),
        }
    }
}

impl ScanOptions {
    /// Runs `job` on a pool capped at `threads`.
    pub fn install<R: Send>(&self, job: impl FnOnce() -> R + Send) -> R {
        match self.threads {
            Some(n) => match rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
            {
                Ok(pool) => pool.install(job),
                Err(_) => job(),
            },
            None => job(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub mu: f64,
    /// Least-energy level, `(1/N) |∇u|²` of the minimal-action state.
    pub a: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub n_states: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveGap {
    pub mu: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyCurve {
    pub spec: NonlinearitySpec,
    pub dim: usize,
    pub n_starts: usize,
    pub samples: Vec<CurveSample>,
    pub gaps: Vec<CurveGap>,
}

/// Solves the minimal-action set at one frequency.
pub fn sample_at(
    spec: &NonlinearitySpec,
    dim: usize,
    mu: f64,
    opts: &ScanOptions,
) -> Result<(CurveSample, Vec<GroundState>)> {
    let states = multi_start_ground_states(spec, dim, mu, opts.n_starts, &opts.solver)?;
    let least = states
        .iter()
        .min_by(|x, y| x.action().total_cmp(&y.action()))
        .expect("multi-start returns at least one state");
    let sample = CurveSample {
        mu,
        a: least.level(),
        c_minus: states.first().map(|s| s.mass()).unwrap_or(f64::NAN),
        c_plus: states.last().map(|s| s.mass()).unwrap_or(f64::NAN),
        n_states: states.len(),
    };
    Ok((sample, states))
}

/// Default grid: 32 log-spaced frequencies over
/// `(max(1e-3, 1e-3 μ*), 0.98 μ*)`, or `[1e-3, 1e2]` when `μ* = ∞`.
pub fn default_mu_grid(spec: &NonlinearitySpec) -> Result<Vec<f64>> {
    let mu_star = spec.mu_star()?;
    Ok(if mu_star.is_finite() {
        roots::geomspace(
            (1e-3f64).max(1e-3 * mu_star).min(0.5 * mu_star),
            0.98 * mu_star,
            32,
        )
    } else {
        roots::geomspace(1e-3, 1e2, 32)
    })
}

/// Samples the curve on `mu_grid`; failed points become gaps.
pub fn scan(
    spec: &NonlinearitySpec,
    dim: usize,
    mu_grid: &[f64],
    opts: &ScanOptions,
) -> Result<FrequencyCurve> {
    spec.validate()?;
    let mut grid = mu_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let results: Vec<(f64, Result<CurveSample>)> = opts.install(|| {
        grid.par_iter()
            .map(|&mu| (mu, sample_at(spec, dim, mu, opts).map(|(s, _)| s)))
            .collect()
    });
    let mut samples = Vec::new();
    let mut gaps = Vec::new();
    for (mu, result) in results {
        match result {
            Ok(sample) => samples.push(sample),
            Err(e) => gaps.push(CurveGap {
                mu,
                reason: e.to_string(),
            }),
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptyCurve);
    }
    Ok(FrequencyCurve {
        spec: spec.clone(),
        dim,
        n_starts: opts.n_starts,
        samples,
        gaps,
    })
}

impl FrequencyCurve {
    /// `(μ, a(μ) - mμ)` at every sample.
    pub fn b_m(&self, m: f64) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .map(|s| (s.mu, s.a - m * s.mu))
            .collect()
    }

    pub fn is_level_increasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].a > w[0].a)
    }

    /// Number of strict interior local minima of `c₋` across samples.
    pub fn interior_minima_count(&self) -> usize {
        self.samples
            .windows(3)
            .filter(|w| w[1].c_minus < w[0].c_minus && w[1].c_minus < w[2].c_minus)
            .count()
    }

    fn gap_between(&self, lo: f64, hi: f64) -> Option<&CurveGap> {
        self.gaps.iter().find(|g| g.mu > lo && g.mu < hi)
    }

    /// CSV `mu,a,c_minus,c_plus[,b_m],n_states`, rows sorted by `mu`.
    pub fn to_csv(&self, mass: Option<f64>) -> String {
        let mut out = String::new();
        out.push_str(if mass.is_some() {
            "mu,a,c_minus,c_plus,b_m,n_states\n"
        } else {
            "mu,a,c_minus,c_plus,n_states\n"
        });
        for s in &self.samples {
            let _ = write!(
                out,
                "{},{},{},{},",
                fmt17(s.mu),
                fmt17(s.a),
                fmt17(s.c_minus),
                fmt17(s.c_plus)
            );
            if let Some(m) = mass {
                let _ = write!(out, "{},", fmt17(s.a - m * s.mu));
            }
            let _ = writeln!(out, "{}", s.n_states);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CStar {
    pub c_star: f64,
    pub mu: f64,
    /// The minimum sits at an end sample, so no interior minimum was found.
    pub boundary: bool,
}

/// `c* = inf c₋(μ)`, refined by golden section with fresh solves around
/// the discrete minimiser.
pub fn c_star(curve: &FrequencyCurve, opts: &ScanOptions) -> Result<CStar> {
    let samples = &curve.samples;
    let (k, best) = samples
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.c_minus.total_cmp(&y.1.c_minus))
        .ok_or(Error::EmptyCurve)?;
    if k == 0 || k + 1 == samples.len() {
        return Ok(CStar {
            c_star: best.c_minus,
            mu: best.mu,
            boundary: true,
        });
    }
    let (lo, hi) = (samples[k - 1].mu.ln(), samples[k + 1].mu.ln());
    let mut failure = None;
    let (t, neg) = roots::golden_max(lo, hi, 1e-4 * (hi - lo), |t| {
        match sample_at(&curve.spec, curve.dim, t.exp(), opts) {
            Ok((s, _)) => -s.c_minus,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if -neg <= best.c_minus {
        Ok(CStar {
            c_star: -neg,
            mu: t.exp(),
            boundary: false,
        })
    } else {
        Ok(CStar {
            c_star: best.c_minus,
            mu: best.mu,
            boundary: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// `c` increases through `m`: `b_m` has a local minimum here.
    BmLocalMin,
    /// `c` decreases through `m`: `b_m` has a local maximum here.
    BmLocalMax,
    Unclassified,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedSolution {
    pub mu: f64,
    pub state: GroundState,
    pub mass_target: f64,
    /// `|mass - m| / m`.
    pub mass_error: f64,
    /// `J_m(μ, u) = I(μ, u) - mμ`.
    pub j_m: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedSearch {
    pub solutions: Vec<NormalizedSolution>,
    /// Brackets abandoned because a solve failed inside them.
    pub aborted: Vec<String>,
}

#[derive(Clone, Copy)]
enum Branch {
    Minus,
    Plus,
}

impl Branch {
    fn pick(self, sample: &CurveSample) -> f64 {
        match self {
            Branch::Minus => sample.c_minus,
            Branch::Plus => sample.c_plus,
        }
    }

    fn state(self, states: Vec<GroundState>) -> GroundState {
        let mut states = states;
        match self {
            Branch::Minus => states.swap_remove(0),
            Branch::Plus => states.pop().expect("non-empty"),
        }
    }
}

/// Normalized solutions of mass `m`: sign changes of `c(μ) - m` along the
/// curve, each refined by bisection in `log μ` until `|mass - m|/m <= tol`.
pub fn find_normalized(
    curve: &FrequencyCurve,
    m: f64,
    tol: f64,
    opts: &ScanOptions,
) -> Result<NormalizedSearch> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidArgument(format!("mass {m} must be > 0")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mass tolerance {tol} must be > 0"
        )));
    }
    let samples = &curve.samples;
    let distinct_plus = samples.iter().any(|s| s.c_plus > s.c_minus * (1.0 + 1e-9));
    let mut branches = vec![Branch::Minus];
    if distinct_plus {
        branches.push(Branch::Plus);
    }

    let mut brackets = Vec::new();
    for &branch in &branches {
        for w in samples.windows(2) {
            let (f0, f1) = (branch.pick(&w[0]) - m, branch.pick(&w[1]) - m);
            if f0 == 0.0 || f0.signum() != f1.signum() {
                brackets.push((branch, w[0], w[1]));
            }
        }
        if let Some(last) = samples.last() {
            if branch.pick(last) == m {
                brackets.push((branch, *last, *last));
            }
        }
    }
    if brackets.is_empty() {
        return Err(Error::NoSolution { mass: m });
    }

    let refined: Vec<std::result::Result<NormalizedSolution, String>> = opts.install(|| {
        brackets
            .par_iter()
            .map(|&(branch, left, right)| {
                if let Some(gap) = curve.gap_between(left.mu, right.mu) {
                    return Err(format!(
                        "bracket [{}, {}] contains failed solve at mu = {}: {}",
                        left.mu, right.mu, gap.mu, gap.reason
                    ));
                }
                refine_root(curve, branch, left, right, m, tol, opts)
                    .map_err(|e| format!("bracket [{}, {}]: {e}", left.mu, right.mu))
            })
            .collect()
    });

    let mut solutions: Vec<NormalizedSolution> = Vec::new();
    let mut aborted = Vec::new();
    for r in refined {
        match r {
            Ok(sol) => {
                if !solutions
                    .iter()
                    .any(|s| (s.mu - sol.mu).abs() <= 1e-8 * sol.mu)
                {
                    solutions.push(sol);
                }
            }
            Err(msg) => aborted.push(msg),
        }
    }
    if solutions.is_empty() {
        return if aborted.is_empty() {
            Err(Error::NoSolution { mass: m })
        } else {
            Err(Error::NonConvergent(aborted.join("; ")))
        };
    }
    solutions.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    Ok(NormalizedSearch { solutions, aborted })
}

fn refine_root(
    curve: &FrequencyCurve,
    branch: Branch,
    left: CurveSample,
    right: CurveSample,
    m: f64,
    tol: f64,
    opts: &ScanOptions,
) -> Result<NormalizedSolution> {
    let classification = if right.mu == left.mu {
        Classification::Unclassified
    } else {
        let (c0, c1) = (branch.pick(&left), branch.pick(&right));
        if c1 > c0 {
            Classification::BmLocalMin
        } else if c1 < c0 {
            Classification::BmLocalMax
        } else {
            Classification::Unclassified
        }
    };
    let solve = |mu: f64| -> Result<GroundState> {
        let (_, states) = sample_at(&curve.spec, curve.dim, mu, opts)?;
        Ok(branch.state(states))
    };
    let finish = |state: GroundState| {
        let mass = state.mass();
        NormalizedSolution {
            mu: state.mu,
            mass_target: m,
            mass_error: (mass - m).abs() / m,
            j_m: state.action() - m * state.mu,
            classification,
            state,
        }
    };

    let f_left = branch.pick(&left) - m;
    let (mut lo, mut hi) = (left.mu.ln(), right.mu.ln());
    let mut best: Option<GroundState> = None;
    for _ in 0..200 {
        let t = 0.5 * (lo + hi);
        let state = solve(t.exp())?;
        let f = state.mass() - m;
        let done = f.abs() <= tol * m || (hi - lo) <= 1e-15 * t.abs().max(1.0);
        if best
            .as_ref()
            .map(|b| f.abs() < (b.mass() - m).abs())
            .unwrap_or(true)
        {
            best = Some(state);
        }
        if done {
            break;
        }
        if f.signum() == f_left.signum() {
            lo = t;
        } else {
            hi = t;
        }
    }
    let best = best.expect("at least one refinement solve");
    if (best.mass() - m).abs() > tol * m {
        return Err(Error::NonConvergent(format!(
            "mass error {:.3e} above tolerance",
            (best.mass() - m).abs() / m
        )));
    }
    Ok(finish(best))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub mu: f64,
    pub step: f64,
    /// `(a(μ+h) - a(μ)) / h`.
    pub fd_plus: f64,
    /// `(a(μ) - a(μ-h)) / h`.
    pub fd_minus: f64,
    pub fd_central: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    /// `max(|fd₊ - c₋|/c₋, |fd₋ - c₊|/c₊)`.
    pub rel_err: f64,
    /// `|fd_central - (c₋ + c₊)/2| / ((c₋ + c₊)/2)`.
    pub central_rel_err: f64,
}

/// One-sided difference quotients of `a` against `c∓` at `mu`.
pub fn check_derivative(
    spec: &NonlinearitySpec,
    dim: usize,
    mu: f64,
    step: f64,
    opts: &ScanOptions,
) -> Result<DerivativeCheck> {
    let mu_star = spec.mu_star()?;
    if !(step > 0.0 && mu - step > 0.0 && mu + step < mu_star) {
        return Err(Error::InvalidArgument(format!(
            "[{}, {}] must lie inside (0, mu*)",
            mu - step,
            mu + step
        )));
    }
    let points = [mu - step, mu, mu + step];
    let samples: Vec<Result<CurveSample>> = opts.install(|| {
        points
            .par_iter()
            .map(|&x| sample_at(spec, dim, x, opts).map(|(s, _)| s))
            .collect()
    });
    let mut it = samples.into_iter();
    let below = it.next().unwrap()?;
    let centre = it.next().unwrap()?;
    let above = it.next().unwrap()?;
    let fd_plus = (above.a - centre.a) / step;
    let fd_minus = (centre.a - below.a) / step;
    let fd_central = (above.a - below.a) / (2.0 * step);
    let rel_err = ((fd_plus - centre.c_minus).abs() / centre.c_minus)
        .max((fd_minus - centre.c_plus).abs() / centre.c_plus);
    let c_mid = 0.5 * (centre.c_minus + centre.c_plus);
    Ok(DerivativeCheck {
        mu,
        step,
        fd_plus,
        fd_minus,
        fd_central,
        c_minus: centre.c_minus,
        c_plus: centre.c_plus,
        rel_err,
        central_rel_err: (fd_central - c_mid).abs() / c_mid,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveEnd {
    ZeroPlus,
    MuStarMinus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub end: CurveEnd,
    pub mu_range: (f64, f64),
    /// Least-squares slope of `ln a` against `ln μ`.
    pub level_slope: f64,
    /// Least-squares slope of `ln c₋` against `ln μ`.
    pub mass_slope: f64,
    /// `β + 1` at the zero end.
    pub predicted_level_slope: Option<f64>,
    /// `β` at the zero end.
    pub predicted_mass_slope: Option<f64>,
    /// `a` strictly increasing over the end samples.
    pub level_diverging: Option<bool>,
    /// `c₋` strictly increasing over the end samples.
    pub mass_diverging: Option<bool>,
    /// Slope of `ln(a/μ)` against `ln μ` when `μ* = ∞` (no prescribed rate).
    pub level_over_mu_slope: Option<f64>,
}

/// Number of end samples used by [`check_asymptotics`].
pub const ASYMPTOTIC_SAMPLES: usize = 4;

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Log-log fits over the four samples nearest the requested end.
pub fn check_asymptotics(curve: &FrequencyCurve, end: CurveEnd) -> Result<AsymptoticReport> {
    let n = curve.samples.len();
    if n < ASYMPTOTIC_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: ASYMPTOTIC_SAMPLES,
            have: n,
        });
    }
    let window = match end {
        CurveEnd::ZeroPlus => &curve.samples[..ASYMPTOTIC_SAMPLES],
        CurveEnd::MuStarMinus => &curve.samples[n - ASYMPTOTIC_SAMPLES..],
    };
    let ln_mu: Vec<f64> = window.iter().map(|s| s.mu.ln()).collect();
    let ln_a: Vec<f64> = window.iter().map(|s| s.a.ln()).collect();
    let ln_c: Vec<f64> = window.iter().map(|s| s.c_minus.ln()).collect();
    let level_slope = ls_slope(&ln_mu, &ln_a);
    let mass_slope = ls_slope(&ln_mu, &ln_c);
    let increasing = |f: fn(&CurveSample) -> f64| window.windows(2).all(|w| f(&w[1]) > f(&w[0]));
    let mu_star = curve.spec.mu_star()?;

    let report = match end {
        CurveEnd::ZeroPlus => {
            let beta = crate::scaling::beta(curve.spec.p0(), curve.dim);
            AsymptoticReport {
                end,
                mu_range: (window[0].mu, window[ASYMPTOTIC_SAMPLES - 1].mu),
                level_slope,
                mass_slope,
                predicted_level_slope: Some(beta + 1.0),
                predicted_mass_slope: Some(beta),
                level_diverging: None,
                mass_diverging: None,
                level_over_mu_slope: None,
            }
        }
        CurveEnd::MuStarMinus => AsymptoticReport {
            end,
            mu_range: (window[0].mu, window[ASYMPTOTIC_SAMPLES - 1].mu),
            level_slope,
            mass_slope,
            predicted_level_slope: None,
            predicted_mass_slope: None,
            level_diverging: Some(increasing(|s| s.a)),
            mass_diverging: Some(increasing(|s| s.c_minus)),
            level_over_mu_slope: (!mu_star.is_finite()).then(|| {
                let ln_ratio: Vec<f64> = window.iter().map(|s| (s.a / s.mu).ln()).collect();
                ls_slope(&ln_mu, &ln_ratio)
            }),
        },
    };
    Ok(report)
}
