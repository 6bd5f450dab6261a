//! Positive radial ground states of `-Δu + μu = g(u)` by shooting.
//!
//! The radial ODE `u'' + (N-1)/r u' = μu - g(u)`, `u'(0) = 0`, is integrated
//! with fixed-step RK4 from a trial height. Trial heights are classified as
//! overshoots (u crosses zero) or undershoots (u' turns positive) and the
//! ground state is the boundary between the two, located by bisection.
//!
//! When `g(s) = μs` has a nonzero root `s2` above the ground-state height,
//! heights approach `s2` exponentially as `μ` grows and a plain `f64`
//! height cannot resolve them. Those cases shoot in the deficit
//! `d = s2 - u(0)` instead and start from the linearisation around `s2`
//! once `d` is small.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::{NonlinearitySpec, SCAN_MAX, SCAN_MIN};
use crate::profile::{gamma_half_integer, FunctionalReport, RadialProfile};
use crate::roots;

const OVERFLOW: f64 = 1e12;
/// Linearised start is used while the deficit profile stays below this
/// fraction of `s2`.
const LINEAR_CAP: f64 = 1e-6;
const HEIGHT_SWEEP: f64 = 1.1;
const DEFICIT_SWEEP: f64 = 0.75;
const MIN_DEFICIT: f64 = 1e-280;
const NEAR_ORIGIN_NODES: usize = 16;
const NEAR_ORIGIN_SUBSTEPS: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct SolverOptions {
    /// Relative bracket width at which height bisection stops. Zero means
    /// bisect until the bracket endpoints are adjacent floats.
    pub height_tol: f64,
    /// Relative action window defining the minimal-action set.
    pub action_tol: f64,
    /// Acceptance bound on `|P(μ,u)| / |∇u|²`.
    pub pohozaev_tol: f64,
    /// Decay funnel: `u < funnel_entry * u(0)`.
    pub funnel_entry: f64,
    /// Decay funnel: `|u' + (√μ + (N-1)/2r) u| < funnel_tol * u`.
    pub funnel_tol: f64,
    /// Grafted tail is extended until `u < tail_tol * u(0)`.
    pub tail_tol: f64,
    /// Height search gives up beyond `height_max_factor * s_G`.
    pub height_max_factor: f64,
    /// Overrides the default step rule when set.
    pub step: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            height_tol: 0.0,
            action_tol: 1e-6,
            pohozaev_tol: 1e-6,
            funnel_entry: 1e-4,
            funnel_tol: 1e-3,
            tail_tol: 1e-12,
            height_max_factor: 1e6,
            step: None,
        }
    }
}

/// Step rule `min(0.01, 0.1/√μ) / max(1, u0)`.
pub fn default_step(mu: f64, u0: f64) -> f64 {
    (0.01f64).min(0.1 / mu.sqrt()) / u0.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShootKind {
    Overshoot,
    Undershoot,
    Decay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootOutcome {
    pub kind: ShootKind,
    pub event_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `|P(μ,u)| / |∇u|²`.
    pub pohozaev_rel: f64,
    /// `|u(r_max)| / u(0)`.
    pub tail_rel: f64,
    /// Max finite-difference ODE residual over `μ u(0)`.
    pub ode_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundState {
    pub mu: f64,
    #[serde(skip)]
    pub spec: NonlinearitySpec,
    #[serde(skip)]
    pub profile: RadialProfile,
    pub report: FunctionalReport,
    pub shoot_height: f64,
    /// `s2 - u(0)` when the state was found in deficit coordinates.
    pub shoot_deficit: Option<f64>,
    /// Radius where the analytic tail was attached.
    pub graft_radius: f64,
    pub residuals: Residuals,
}

impl GroundState {
    pub fn dim(&self) -> usize {
        self.profile.dim()
    }

    pub fn mass(&self) -> f64 {
        self.report.mass
    }

    pub fn action(&self) -> f64 {
        self.report.action
    }

    /// Least-energy level `(1/N) |∇u|²`.
    pub fn level(&self) -> f64 {
        self.report.grad_sq / self.dim() as f64
    }

    /// Maximum of `τ ↦ I(μ, u(x/τ))` over `τ ∈ [lo, hi]`, via dilated profiles.
    pub fn dilation_path_max(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let mut failure = None;
        let (tau, value) = roots::golden_max(lo, hi, 1e-9, |tau| match self.profile.dilate(tau) {
            Ok(p) => p.action(&self.spec, self.mu),
            Err(e) => {
                failure = Some(e);
                f64::NEG_INFINITY
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok((tau, value)),
        }
    }
}

/// Radial right-hand side `F(u) = μu - g(u)`.
struct Rhs<'a> {
    spec: &'a NonlinearitySpec,
    mu: f64,
    friction: f64,
}

impl Rhs<'_> {
    #[inline]
    fn source(&self, u: f64) -> f64 {
        self.mu * u - self.spec.g(u)
    }

    #[inline]
    fn eval(&self, r: f64, u: f64, v: f64) -> (f64, f64) {
        (v, self.source(u) - self.friction / r * v)
    }

    fn rk4(&self, r: f64, h: f64, u: f64, v: f64) -> (f64, f64) {
        let (k1u, k1v) = self.eval(r, u, v);
        let hh = 0.5 * h;
        let (k2u, k2v) = self.eval(r + hh, u + hh * k1u, v + hh * k1v);
        let (k3u, k3v) = self.eval(r + hh, u + hh * k2u, v + hh * k2v);
        let (k4u, k4v) = self.eval(r + h, u + h * k3u, v + h * k3v);
        (
            u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        )
    }
}

/// Growing radial mode `φ` of `φ'' + (N-1)/r φ' = φ`, `φ(0) = 1`, i.e.
/// `Γ(ν+1) (2/x)^ν I_ν(x)` with `ν = (N-2)/2`.
///
/// Returns `(ln φ(x), φ'(x)/φ(x))`.
fn growing_mode(dim: usize, x: f64) -> (f64, f64) {
    let nu = 0.5 * (dim as f64 - 2.0);
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x <= 30.0 {
        let z = 0.25 * x * x;
        let (mut term, mut sum, mut weighted) = (1.0f64, 1.0f64, 0.0f64);
        let mut j = 0.0f64;
        loop {
            term *= z / ((j + 1.0) * (nu + 1.0 + j));
            j += 1.0;
            sum += term;
            weighted += j * term;
            if j > z && term < 1e-18 * sum {
                break;
            }
        }
        (sum.ln(), 2.0 / x * weighted / sum)
    } else {
        // Hankel expansion of I_ν and I_{ν+1}; e^x/√(2πx) cancels in the ratio.
        let series = |order: f64| {
            let m = 4.0 * order * order;
            let (mut term, mut sum) = (1.0f64, 1.0f64);
            for k in 1..40 {
                let kf = k as f64;
                let odd = 2.0 * kf - 1.0;
                let next = -term * (m - odd * odd) / (kf * 8.0 * x);
                if next.abs() >= term.abs() && k > 1 {
                    break;
                }
                term = next;
                sum += term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
            sum
        };
        let s_nu = series(nu);
        let s_next = series(nu + 1.0);
        let ln_phi = gamma_half_integer(dim).ln() + nu * (2.0 / x).ln() + x
            - 0.5 * (2.0 * std::f64::consts::PI * x).ln()
            + s_nu.ln();
        (ln_phi, s_next / s_nu)
    }
}

#[derive(Debug, Clone, Copy)]
enum Start {
    /// Taylor start `u0 + a r² + b r⁴` at `r = 0`.
    Series { u0: f64 },
    /// `u = top - d φ(k r)` while the deviation is below `LINEAR_CAP * top`.
    Linear { top: f64, rate: f64, deficit: f64 },
}

impl Start {
    fn height(&self) -> f64 {
        match *self {
            Start::Series { u0 } => u0,
            Start::Linear { top, deficit, .. } => top - deficit,
        }
    }
}

struct Trajectory {
    h: f64,
    u: Vec<f64>,
    v: Vec<f64>,
    outcome: ShootOutcome,
}

struct Integrator<'a> {
    rhs: Rhs<'a>,
    dim: usize,
    h: f64,
    r_max: f64,
    /// `(funnel_entry, funnel_tol)` when decay detection is enabled.
    funnel: Option<(f64, f64)>,
}

impl Integrator<'_> {
    fn run(&self, start: Start) -> Result<Trajectory> {
        let h = self.h;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::StepUnderflow { radius: 0.0 });
        }
        let n = self.dim as f64;
        let mu = self.rhs.mu;
        let height = start.height();
        let capacity = ((self.r_max / h).ceil() as usize)
            .saturating_add(2)
            .min(1 << 26);
        let mut u = Vec::with_capacity(capacity.min(1 << 20));
        let mut v = Vec::with_capacity(capacity.min(1 << 20));

        match start {
            Start::Series { u0 } => {
                if u0 == 0.0 {
                    return Ok(Trajectory {
                        h,
                        u: vec![0.0, 0.0],
                        v: vec![0.0, 0.0],
                        outcome: ShootOutcome {
                            kind: ShootKind::Undershoot,
                            event_radius: 0.0,
                        },
                    });
                }
                let f0 = self.rhs.source(u0);
                let df0 = mu - self.rhs.spec.dg(u0);
                let a = f0 / (2.0 * n);
                let b = df0 * f0 / (8.0 * n * (n + 2.0));
                u.push(u0);
                v.push(0.0);
                u.push(u0 + a * h * h + b * h.powi(4));
                v.push(2.0 * a * h + 4.0 * b * h.powi(3));
            }
            Start::Linear { top, rate, deficit } => {
                let ln_cap = (LINEAR_CAP * top).ln();
                let ln_d = deficit.ln();
                let x_end = roots::bisect(0.0, 2000.0, 1e-12, |x| {
                    ln_d + growing_mode(self.dim, x).0 - ln_cap
                })?;
                let last = ((x_end / rate) / h).floor().max(1.0) as usize;
                for i in 0..=last {
                    let r = i as f64 * h;
                    let (ln_phi, ratio) = growing_mode(self.dim, rate * r);
                    let w = (ln_d + ln_phi).exp();
                    u.push(top - w);
                    v.push(-w * rate * ratio);
                }
                v[0] = 0.0;
            }
        }

        let mut i = u.len() - 1;
        loop {
            let r = i as f64 * h;
            if r >= self.r_max {
                return Ok(Trajectory {
                    h,
                    u,
                    v,
                    outcome: ShootOutcome {
                        kind: ShootKind::Decay,
                        event_radius: r,
                    },
                });
            }
            let (un, vn) = if i < NEAR_ORIGIN_NODES {
                // the (N-1)/r coefficient is stiff next to the origin
                let sub = h / NEAR_ORIGIN_SUBSTEPS as f64;
                (0..NEAR_ORIGIN_SUBSTEPS).fold((u[i], v[i]), |(a, b), k| {
                    self.rhs.rk4(r + k as f64 * sub, sub, a, b)
                })
            } else {
                self.rhs.rk4(r, h, u[i], v[i])
            };
            let rn = (i + 1) as f64 * h;
            if rn <= r {
                return Err(Error::StepUnderflow { radius: r });
            }
            if !(un.abs() < OVERFLOW) || !vn.is_finite() {
                return Err(Error::Overflow { radius: rn });
            }
            let (up, vp) = (u[i], v[i]);
            u.push(un);
            v.push(vn);
            i += 1;

            if un < 0.0 || (un == 0.0 && vn < 0.0) {
                let t = up / (up - un);
                return Ok(Trajectory {
                    h,
                    u,
                    v,
                    outcome: ShootOutcome {
                        kind: ShootKind::Overshoot,
                        event_radius: r + t * h,
                    },
                });
            }
            if vn > 0.0 {
                let t = if vn > vp { -vp / (vn - vp) } else { 1.0 };
                return Ok(Trajectory {
                    h,
                    u,
                    v,
                    outcome: ShootOutcome {
                        kind: ShootKind::Undershoot,
                        event_radius: r + t.clamp(0.0, 1.0) * h,
                    },
                });
            }
            if let Some((entry, tol)) = self.funnel {
                if un < entry * height {
                    let kappa = mu.sqrt() + 0.5 * (n - 1.0) / rn;
                    if (vn + kappa * un).abs() < tol * un {
                        return Ok(Trajectory {
                            h,
                            u,
                            v,
                            outcome: ShootOutcome {
                                kind: ShootKind::Decay,
                                event_radius: rn,
                            },
                        });
                    }
                }
            }
        }
    }
}

/// Integrates the radial ODE from `u(0) = u0` with step `h` until the first
/// overshoot, undershoot or decay-funnel entry, or until `r_max`.
pub fn integrate_radial(
    spec: &NonlinearitySpec,
    dim: usize,
    mu: f64,
    u0: f64,
    r_max: f64,
    h: f64,
) -> Result<(RadialProfile, ShootOutcome)> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} must be >= 2"
        )));
    }
    if !(mu > 0.0) || !(u0 >= 0.0) {
        return Err(Error::InvalidArgument(
            "integrate_radial needs mu > 0, u0 >= 0".into(),
        ));
    }
    let opts = SolverOptions::default();
    let integrator = Integrator {
        rhs: Rhs {
            spec,
            mu,
            friction: dim as f64 - 1.0,
        },
        dim,
        h,
        r_max,
        funnel: Some((opts.funnel_entry, opts.funnel_tol)),
    };
    let traj = integrator.run(Start::Series { u0 })?;
    let grid = (0..traj.u.len()).map(|i| i as f64 * h).collect();
    let profile = RadialProfile::new(dim, grid, traj.u, traj.v)?;
    Ok((profile, traj.outcome))
}

/// Shooting parameterisation for one frequency.
#[derive(Debug, Clone, Copy)]
enum Coordinate {
    Height,
    Deficit { top: f64, rate: f64 },
}

struct Shooter<'a> {
    spec: &'a NonlinearitySpec,
    dim: usize,
    mu: f64,
    opts: &'a SolverOptions,
    coordinate: Coordinate,
    /// Smallest `s` with `G(s) > μ s²/2`.
    s_g: f64,
    r_limit: f64,
}

impl<'a> Shooter<'a> {
    fn new(
        spec: &'a NonlinearitySpec,
        dim: usize,
        mu: f64,
        opts: &'a SolverOptions,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} must be >= 2"
            )));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "frequency {mu} must be > 0"
            )));
        }
        let height_max_hint = SCAN_MAX;
        let s_g = roots::first_crossing(SCAN_MIN, height_max_hint, 600, |s| {
            spec.antiderivative(s) - 0.5 * mu * s * s > 0.0
        })
        .ok_or(Error::NoBracket {
            mu,
            height_max: height_max_hint,
        })?;
        let height_max = opts.height_max_factor * s_g;
        let coordinate =
            match roots::first_crossing(s_g, height_max, 600, |s| spec.g(s) - mu * s <= 0.0) {
                Some(top) => {
                    let rate_sq = mu - spec.dg(top);
                    if rate_sq > 0.0 && top > s_g {
                        Coordinate::Deficit {
                            top,
                            rate: rate_sq.sqrt(),
                        }
                    } else {
                        Coordinate::Height
                    }
                }
                None => Coordinate::Height,
            };
        Ok(Shooter {
            spec,
            dim,
            mu,
            opts,
            coordinate,
            s_g,
            r_limit: 400.0 / mu.sqrt(),
        })
    }

    fn height_max(&self) -> f64 {
        self.opts.height_max_factor * self.s_g
    }

    fn start(&self, param: f64) -> Start {
        match self.coordinate {
            Coordinate::Height => Start::Series { u0: param },
            Coordinate::Deficit { top, rate } => {
                if param >= LINEAR_CAP * top {
                    Start::Series { u0: top - param }
                } else {
                    Start::Linear {
                        top,
                        rate,
                        deficit: param,
                    }
                }
            }
        }
    }

    fn integrator(&self, height: f64, funnel: bool) -> Integrator<'_> {
        Integrator {
            rhs: Rhs {
                spec: self.spec,
                mu: self.mu,
                friction: self.dim as f64 - 1.0,
            },
            dim: self.dim,
            h: self
                .opts
                .step
                .unwrap_or_else(|| default_step(self.mu, height)),
            r_max: self.r_limit,
            funnel: funnel.then_some((self.opts.funnel_entry, self.opts.funnel_tol)),
        }
    }

    fn shoot(&self, param: f64) -> Result<Trajectory> {
        let start = self.start(param);
        self.integrator(start.height(), false).run(start)
    }

    fn kind(&self, param: f64) -> Result<ShootKind> {
        Ok(self.shoot(param)?.outcome.kind)
    }

    /// Maps a seed height into the shooting coordinate; `None` when it is
    /// not representable (at or above `s2`).
    fn param_for_height(&self, height: f64) -> Option<f64> {
        match self.coordinate {
            Coordinate::Height => Some(height),
            Coordinate::Deficit { top, .. } => (height < top).then_some(top - height),
        }
    }

    /// Next parameter towards larger (`up`) or smaller heights.
    fn step_param(&self, param: f64, up: bool) -> Option<f64> {
        match self.coordinate {
            Coordinate::Height => {
                let next = if up {
                    param * HEIGHT_SWEEP
                } else {
                    param / HEIGHT_SWEEP
                };
                (next <= self.height_max() && next >= 1e-3 * self.s_g).then_some(next)
            }
            Coordinate::Deficit { top, .. } => {
                let next = if up {
                    param * DEFICIT_SWEEP
                } else {
                    param / DEFICIT_SWEEP
                };
                (next >= MIN_DEFICIT && next < top).then_some(next)
            }
        }
    }

    /// Undershoot/overshoot bracket `(under, over)` nearest to `seed`.
    fn bracket_from(&self, seed: f64) -> Result<(f64, f64)> {
        let no_bracket = || Error::NoBracket {
            mu: self.mu,
            height_max: self.height_max(),
        };
        let first = self.kind(seed)?;
        let up = first != ShootKind::Overshoot;
        let mut prev = seed;
        loop {
            let next = self.step_param(prev, up).ok_or_else(no_bracket)?;
            let kind = self.kind(next)?;
            match (up, kind) {
                (true, ShootKind::Overshoot) => return Ok((prev, next)),
                (false, ShootKind::Undershoot) => return Ok((next, prev)),
                _ => prev = next,
            }
        }
    }

    fn midpoint(&self, a: f64, b: f64) -> f64 {
        match self.coordinate {
            Coordinate::Height => 0.5 * (a + b),
            Coordinate::Deficit { .. } => {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                if hi > 2.0 * lo {
                    lo.sqrt() * hi.sqrt()
                } else {
                    0.5 * (a + b)
                }
            }
        }
    }

    fn bisect(&self, mut under: f64, mut over: f64) -> Result<(f64, f64)> {
        for _ in 0..4000 {
            let mid = self.midpoint(under, over);
            let (lo, hi) = if under < over {
                (under, over)
            } else {
                (over, under)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if self.opts.height_tol > 0.0 {
                let h_under = self.start(under).height();
                let h_over = self.start(over).height();
                if (h_under - h_over).abs() <= self.opts.height_tol * h_under.abs() {
                    break;
                }
            }
            match self.kind(mid)? {
                ShootKind::Overshoot => over = mid,
                ShootKind::Undershoot => under = mid,
                ShootKind::Decay => {
                    under = mid;
                    over = mid;
                    break;
                }
            }
        }
        Ok((under, over))
    }

    fn solve_from(&self, seed_height: f64) -> Result<GroundState> {
        let seed = self.param_for_height(seed_height).ok_or(Error::NoBracket {
            mu: self.mu,
            height_max: self.height_max(),
        })?;
        let (under, over) = self.bracket_from(seed)?;
        self.solve_bracket(under, over)
    }

    fn solve_bracket(&self, under: f64, over: f64) -> Result<GroundState> {
        let (under, over) = self.bisect(under, over)?;
        self.assemble(under, over)
    }

    /// Builds the state from the converged undershoot trajectory plus an
    /// analytic tail from the decay-funnel entry onwards.
    fn assemble(&self, under: f64, over: f64) -> Result<GroundState> {
        let start = self.start(under);
        let height = start.height();
        let traj = self.integrator(height, false).run(start)?;
        let other = self.shoot(over)?;
        let h = traj.h;
        let n = self.dim as f64;
        let sqrt_mu = self.mu.sqrt();
        let u_ref = traj.u[0];

        let event_index = traj.u.len() - 1;
        let mut graft = None;
        for i in 1..event_index {
            let u = traj.u[i];
            if u >= self.opts.funnel_entry * u_ref || u <= 0.0 {
                continue;
            }
            let r = i as f64 * h;
            let kappa = sqrt_mu + 0.5 * (n - 1.0) / r;
            if (traj.v[i] + kappa * u).abs() < self.opts.funnel_tol * u {
                let agree = other
                    .u
                    .get(i)
                    .map(|&w| (w - u).abs() <= self.opts.funnel_tol * u)
                    .unwrap_or(false);
                if agree {
                    graft = Some(i);
                }
                break;
            }
        }
        let graft = graft.ok_or_else(|| {
            Error::NonConvergent(format!(
                "mu = {}: trajectory left the decay funnel before the tail could be attached",
                self.mu
            ))
        })?;

        let r_d = graft as f64 * h;
        let u_d = traj.u[graft];
        let decades = (u_d / (self.opts.tail_tol * u_ref)).ln().max(0.0);
        let mut last = graft + (decades / sqrt_mu / h).ceil() as usize + 1;
        if last % 2 == 1 {
            last += 1;
        }
        let mut values = Vec::with_capacity(last + 1);
        let mut derivs = Vec::with_capacity(last + 1);
        values.extend_from_slice(&traj.u[..=graft]);
        derivs.extend_from_slice(&traj.v[..=graft]);
        let half = 0.5 * (n - 1.0);
        for i in graft + 1..=last {
            let r = i as f64 * h;
            let u = u_d * (r_d / r).powf(half) * (-sqrt_mu * (r - r_d)).exp();
            values.push(u);
            derivs.push(-u * (sqrt_mu + half / r));
        }
        derivs[0] = 0.0;
        let grid = (0..=last).map(|i| i as f64 * h).collect();
        let profile = RadialProfile::new(self.dim, grid, values, derivs)?;

        if profile.values().iter().any(|&u| u < 0.0) || profile.sign_changes() > 0 {
            return Err(Error::NonConvergent(format!(
                "mu = {}: profile is not positive",
                self.mu
            )));
        }

        let report = FunctionalReport::evaluate(self.spec, self.mu, &profile, None);
        let residuals = Residuals {
            pohozaev_rel: report.pohozaev.abs() / report.grad_sq,
            tail_rel: profile.values()[last].abs() / u_ref,
            ode_defect: ode_defect(self.spec, self.mu, &profile, graft),
        };
        let shoot_deficit = match self.coordinate {
            Coordinate::Deficit { .. } => Some(under),
            Coordinate::Height => None,
        };
        let state = GroundState {
            mu: self.mu,
            spec: self.spec.clone(),
            profile,
            report,
            shoot_height: height,
            shoot_deficit,
            graft_radius: r_d,
            residuals,
        };
        if !(state.residuals.pohozaev_rel <= self.opts.pohozaev_tol) {
            return Err(Error::NonConvergent(format!(
                "mu = {}: Pohozaev residual {:.3e} exceeds {:.1e}",
                self.mu, state.residuals.pohozaev_rel, self.opts.pohozaev_tol
            )));
        }
        if !(state.report.action > 0.0) {
            return Err(Error::NonConvergent(format!(
                "mu = {}: non-positive action",
                self.mu
            )));
        }
        Ok(state)
    }

    fn seeds(&self, n_starts: usize) -> Vec<f64> {
        roots::geomspace(0.5 * self.s_g, 50.0 * self.s_g, n_starts.max(1))
    }
}

/// Max over interior nodes of `|u'' + (N-1)/r u' - μu + g(u)| / (μ u(0))`,
/// with `u''` from a fourth-order central difference of the stored `u'`.
/// The origin, the last nodes and the graft neighbourhood are skipped.
fn ode_defect(spec: &NonlinearitySpec, mu: f64, profile: &RadialProfile, graft: usize) -> f64 {
    let h = profile.spacing();
    let n = profile.dim() as f64;
    let (u, v, grid) = (profile.values(), profile.derivs(), profile.grid());
    let scale = mu * u[0];
    let mut worst = 0.0f64;
    for i in 2..u.len().saturating_sub(2) {
        if i + 3 >= graft && i <= graft + 3 {
            continue;
        }
        let second = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
        let residual = second + (n - 1.0) / grid[i] * v[i] - (mu * u[i] - spec.g(u[i]));
        worst = worst.max(residual.abs() / scale);
    }
    worst
}

/// Positive radial ground state at frequency `mu`, bracketed upwards from
/// `0.5 s_G`.
pub fn ground_state(
    spec: &NonlinearitySpec,
    dim: usize,
    mu: f64,
    opts: &SolverOptions,
) -> Result<GroundState> {
    let shooter = Shooter::new(spec, dim, mu, opts)?;
    shooter.solve_from(0.5 * shooter.s_g)
}

/// Ground states from `n_starts` geometrically spaced seeds in
/// `[0.5 s_G, 50 s_G]`, deduplicated and restricted to the minimal-action
/// set, sorted by mass.
pub fn multi_start_ground_states(
    spec: &NonlinearitySpec,
    dim: usize,
    mu: f64,
    n_starts: usize,
    opts: &SolverOptions,
) -> Result<Vec<GroundState>> {
    let shooter = Shooter::new(spec, dim, mu, opts)?;
    let mut found: Vec<GroundState> = Vec::new();
    let mut roots_found: Vec<f64> = Vec::new();
    let mut first_error = None;
    for seed_height in shooter.seeds(n_starts) {
        let attempt = shooter
            .param_for_height(seed_height)
            .ok_or(Error::NoBracket {
                mu,
                height_max: shooter.height_max(),
            })
            .and_then(|seed| shooter.bracket_from(seed));
        let (under, over) = match attempt {
            Ok(b) => b,
            Err(e) => {
                first_error.get_or_insert(e);
                continue;
            }
        };
        let (lo, hi) = if under < over {
            (under, over)
        } else {
            (over, under)
        };
        // a root already inside this bracket is the one bisection would reach
        if roots_found.iter().any(|&root| lo <= root && root <= hi) {
            continue;
        }
        match shooter.solve_bracket(under, over) {
            Ok(state) => {
                roots_found.push(state.shoot_deficit.unwrap_or(state.shoot_height));
                let duplicate = found.iter().any(|s| {
                    let same_height = (s.shoot_height - state.shoot_height).abs()
                        <= 1e-6 * state.shoot_height.abs();
                    let same_deficit = match (s.shoot_deficit, state.shoot_deficit) {
                        (Some(a), Some(b)) => (a - b).abs() <= 1e-6 * a.max(b),
                        _ => true,
                    };
                    same_height && same_deficit
                });
                if !duplicate {
                    found.push(state);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if found.is_empty() {
        return Err(first_error.unwrap_or(Error::NoBracket {
            mu,
            height_max: shooter.height_max(),
        }));
    }
    let least = found
        .iter()
        .map(|s| s.action())
        .fold(f64::INFINITY, f64::min);
    found.retain(|s| s.action() <= least + opts.action_tol * least.abs());
    found.sort_by(|a, b| a.mass().total_cmp(&b.mass()));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growing_mode_matches_closed_form_in_three_dimensions() {
        for &x in &[0.0, 0.5, 3.0, 12.0, 29.9, 30.1, 45.0, 200.0] {
            let (ln_phi, ratio) = growing_mode(3, x);
            if x == 0.0 {
                assert_eq!(ln_phi, 0.0);
                continue;
            }
            // sinh(x)/x, computed in log form
            let expected = x + (0.5 * (1.0 - (-2.0 * x).exp())).ln() - x.ln();
            assert!(
                (ln_phi - expected).abs() < 1e-12 * expected.abs().max(1.0),
                "x={x}"
            );
            let expected_ratio = 1.0 / x.tanh() - 1.0 / x;
            assert!((ratio - expected_ratio).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn growing_mode_series_and_asymptotics_agree_in_two_dimensions() {
        // continuity across the switch at x = 30
        let (a, ra) = growing_mode(2, 30.0);
        let (b, rb) = growing_mode(2, 30.0 + 1e-9);
        assert!((a - b).abs() < 1e-8);
        assert!((ra - rb).abs() < 1e-9);
    }

    #[test]
    fn zero_height_is_degenerate_undershoot() {
        let spec = NonlinearitySpec::pure_power(3.0);
        let (profile, outcome) = integrate_radial(&spec, 3, 1.0, 0.0, 50.0, 0.01).unwrap();
        assert_eq!(outcome.kind, ShootKind::Undershoot);
        assert_eq!(outcome.event_radius, 0.0);
        assert!(profile.values().iter().all(|&u| u == 0.0));
    }

    #[test]
    fn default_step_rule() {
        assert_eq!(default_step(1.0, 0.5), 0.01);
        assert!((default_step(400.0, 2.0) - 0.0025).abs() < 1e-15);
    }
}
