//! Nonlinearities `g(s)` and their antiderivatives `G(s)`.
//!
//! Every family is extended to negative arguments by `g(s) = -s`, so the
//! radial solver always sees a globally defined right-hand side.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots;

/// Range scanned by every numeric search over heights `s`.
pub const SCAN_MIN: f64 = 1e-6;
pub const SCAN_MAX: f64 = 1e6;
const SCAN_POINTS: usize = 600;

/// One signed monomial `coefficient * s^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponent: f64,
}

impl Monomial {
    fn value(&self, s: f64) -> f64 {
        self.coefficient * pow(s, self.exponent)
    }

    fn derivative(&self, s: f64) -> f64 {
        self.coefficient * self.exponent * pow(s, self.exponent - 1.0)
    }

    fn antiderivative(&self, s: f64) -> f64 {
        self.coefficient * pow(s, self.exponent + 1.0) / (self.exponent + 1.0)
    }
}

#[inline]
fn pow(s: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < 64.0 {
        s.powi(p as i32)
    } else {
        s.powf(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum NonlinearitySpec {
    /// `g(s) = s^p`.
    PurePower { p: f64 },
    /// `g(s) = sum c_i s^{p_i}`.
    CombinedPowers { terms: Vec<Monomial> },
    /// `g(s) = a s^3 - b s^5`.
    CubicQuintic { a: f64, b: f64 },
    /// `inner.g` on `(-inf, s1]`, zero above `s1`.
    Truncated {
        inner: Box<NonlinearitySpec>,
        s1: f64,
    },
}

/// Behaviour of `g(s)` as `s -> inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthAtInfinity {
    /// `g(s) ~ c s^p` with `c > 0`.
    Power { p: f64 },
    /// `limsup g(s)/s < inf`.
    LinearOrSublinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Mass supercritical at zero with finite threshold `mu*` (cubic-quintic
    /// type, or any truncated nonlinearity).
    FiniteThreshold,
    /// Mass supercritical at zero and at infinity, `mu* = inf`.
    SupercriticalAtInfinity,
    /// `p0` outside `(1 + 4/N, 2* - 1)`.
    OutsideSupercriticalAtZero,
    /// Supercritical at zero but growth at infinity outside both cases above.
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub dim: usize,
    pub p0: f64,
    pub p_inf: GrowthAtInfinity,
    /// `1 + 4/N`.
    pub mass_critical: f64,
    /// `2* - 1`, infinite for `N = 2`.
    pub sobolev_critical: f64,
    pub p0_supercritical: bool,
    pub mu_star: f64,
    pub mu_star_finite: bool,
    pub regime: Regime,
}

impl NonlinearitySpec {
    pub fn pure_power(p: f64) -> Self {
        NonlinearitySpec::PurePower { p }
    }

    pub fn cubic_quintic(a: f64, b: f64) -> Self {
        NonlinearitySpec::CubicQuintic { a, b }
    }

    pub fn combined(terms: &[(f64, f64)]) -> Self {
        NonlinearitySpec::CombinedPowers {
            terms: terms
                .iter()
                .map(|&(coefficient, exponent)| Monomial {
                    coefficient,
                    exponent,
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64| x.is_finite();
        match self {
            NonlinearitySpec::PurePower { p } => {
                if !(finite(*p) && *p > 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "power exponent {p} must be > 1"
                    )));
                }
            }
            NonlinearitySpec::CubicQuintic { a, b } => {
                if !(finite(*a) && finite(*b) && *a > 0.0 && *b > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "cubic-quintic needs a > 0 and b > 0, got a={a}, b={b}"
                    )));
                }
            }
            NonlinearitySpec::CombinedPowers { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidSpec("combined: no terms".into()));
                }
                for t in terms {
                    if !(finite(t.exponent) && t.exponent > 1.0) {
                        return Err(Error::InvalidSpec(format!(
                            "combined: exponent {} must be > 1",
                            t.exponent
                        )));
                    }
                    if !finite(t.coefficient) {
                        return Err(Error::InvalidSpec(
                            "combined: non-finite coefficient".into(),
                        ));
                    }
                }
                if terms.iter().all(|t| t.coefficient == 0.0) {
                    return Err(Error::InvalidSpec(
                        "combined: all coefficients vanish".into(),
                    ));
                }
            }
            NonlinearitySpec::Truncated { inner, s1 } => {
                inner.validate()?;
                if !(finite(*s1) && *s1 > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "truncation point {s1} must be > 0"
                    )));
                }
                let scale = inner.g_scale(*s1);
                if inner.g(*s1).abs() > 1e-9 * scale {
                    return Err(Error::InvalidSpec(format!(
                        "truncation point {s1} is not a zero of g"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sum of absolute monomial magnitudes at `s`, used as a zero tolerance scale.
    fn g_scale(&self, s: f64) -> f64 {
        match self {
            NonlinearitySpec::PurePower { p } => pow(s, *p),
            NonlinearitySpec::CubicQuintic { a, b } => a * s.powi(3) + b * s.powi(5),
            NonlinearitySpec::CombinedPowers { terms } => {
                terms.iter().map(|t| t.value(s).abs()).sum()
            }
            NonlinearitySpec::Truncated { inner, .. } => inner.g_scale(s),
        }
        .max(f64::MIN_POSITIVE)
    }

    /// `g(s)`.
    pub fn g(&self, s: f64) -> f64 {
        if s < 0.0 {
            return -s;
        }
        if s == 0.0 {
            return 0.0;
        }
        match self {
            NonlinearitySpec::PurePower { p } => pow(s, *p),
            NonlinearitySpec::CubicQuintic { a, b } => {
                let s2 = s * s;
                s * s2 * (a - b * s2)
            }
            NonlinearitySpec::CombinedPowers { terms } => terms.iter().map(|t| t.value(s)).sum(),
            NonlinearitySpec::Truncated { inner, s1 } => {
                if s <= *s1 {
                    inner.g(s)
                } else {
                    0.0
                }
            }
        }
    }

    /// `g'(s)`; one-sided (left) at the truncation kink and at zero.
    pub fn dg(&self, s: f64) -> f64 {
        if s < 0.0 {
            return -1.0;
        }
        match self {
            NonlinearitySpec::PurePower { p } => p * pow(s, p - 1.0),
            NonlinearitySpec::CubicQuintic { a, b } => {
                let s2 = s * s;
                s2 * (3.0 * a - 5.0 * b * s2)
            }
            NonlinearitySpec::CombinedPowers { terms } => {
                terms.iter().map(|t| t.derivative(s)).sum()
            }
            NonlinearitySpec::Truncated { inner, s1 } => {
                if s <= *s1 {
                    inner.dg(s)
                } else {
                    0.0
                }
            }
        }
    }

    /// `G(s) = int_0^s g(t) dt`.
    pub fn antiderivative(&self, s: f64) -> f64 {
        if s < 0.0 {
            return -0.5 * s * s;
        }
        if s == 0.0 {
            return 0.0;
        }
        match self {
            NonlinearitySpec::PurePower { p } => pow(s, p + 1.0) / (p + 1.0),
            NonlinearitySpec::CubicQuintic { a, b } => {
                let s2 = s * s;
                let s4 = s2 * s2;
                s4 * (a / 4.0 - b * s2 / 6.0)
            }
            NonlinearitySpec::CombinedPowers { terms } => {
                terms.iter().map(|t| t.antiderivative(s)).sum()
            }
            NonlinearitySpec::Truncated { inner, s1 } => inner.antiderivative(s.min(*s1)),
        }
    }

    /// `mu* = sup_{s>0} 2 G(s) / s^2`, `f64::INFINITY` when unbounded.
    ///
    /// Closed forms for pure powers, cubic-quintic and combined powers with a
    /// positive top-order coefficient; numeric maximisation otherwise.
    pub fn mu_star(&self) -> Result<f64> {
        match self {
            NonlinearitySpec::PurePower { .. } => Ok(f64::INFINITY),
            NonlinearitySpec::CubicQuintic { a, b } => Ok(3.0 * a * a / (16.0 * b)),
            NonlinearitySpec::CombinedPowers { .. } => match self.growth_at_infinity() {
                GrowthAtInfinity::Power { .. } => Ok(f64::INFINITY),
                GrowthAtInfinity::LinearOrSublinear => self.mu_star_numeric(),
            },
            NonlinearitySpec::Truncated { .. } => self.mu_star_numeric(),
        }
    }

    /// Numeric `mu*`: log grid over `[1e-6, 1e6]` refined by golden section.
    ///
    /// Returns `f64::INFINITY` when the objective is still increasing at the
    /// top of the grid and exceeds ten times the maximum below the top decade.
    pub fn mu_star_numeric(&self) -> Result<f64> {
        let objective = |s: f64| 2.0 * self.antiderivative(s) / (s * s);
        let grid = roots::geomspace(SCAN_MIN, SCAN_MAX, SCAN_POINTS);
        let values: Vec<f64> = grid.iter().map(|&s| objective(s)).collect();
        let last = values.len() - 1;
        let (imax, vmax) =
            values
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
                );

        if imax == last {
            let top_decade = SCAN_MAX / 10.0;
            let interior = grid
                .iter()
                .zip(&values)
                .filter(|(s, _)| **s < top_decade)
                .map(|(_, v)| *v)
                .fold(f64::NEG_INFINITY, f64::max);
            if values[last] > values[last - 1] && values[last] > 10.0 * interior.max(0.0) {
                return Ok(f64::INFINITY);
            }
            return Err(Error::NonConvergent(
                "mu*: maximiser at the top of the scan range".into(),
            ));
        }
        if imax == 0 || vmax <= 0.0 {
            return Err(Error::NonConvergent(
                "mu*: no interior positive maximum of 2G(s)/s^2".into(),
            ));
        }
        let (lo, hi) = (grid[imax - 1].ln(), grid[imax + 1].ln());
        let (_, best) = roots::golden_max(lo, hi, 1e-10, |t| objective(t.exp()));
        Ok(best.max(vmax))
    }

    /// Smallest `s0` with `G(s0) > 0`.
    pub fn positivity_threshold(&self) -> Option<f64> {
        roots::first_crossing(SCAN_MIN, SCAN_MAX, SCAN_POINTS, |s| {
            self.antiderivative(s) > 0.0
        })
    }

    /// Replace `g` by zero above its smallest positive zero `s1 > s0`.
    pub fn truncate(&self) -> Result<NonlinearitySpec> {
        self.validate()?;
        if let NonlinearitySpec::Truncated { .. } = self {
            return Ok(self.clone());
        }
        let s0 = self.positivity_threshold().ok_or(Error::NoZeroFound)?;
        let s1 = roots::first_crossing(s0, SCAN_MAX, SCAN_POINTS, |s| self.g(s) <= 0.0)
            .ok_or(Error::NoZeroFound)?;
        if s1 <= s0 {
            return Err(Error::NoZeroFound);
        }
        let truncated = NonlinearitySpec::Truncated {
            inner: Box::new(self.clone()),
            s1,
        };
        truncated.validate()?;
        Ok(truncated)
    }

    /// Leading exponent at zero.
    pub fn p0(&self) -> f64 {
        match self {
            NonlinearitySpec::PurePower { p } => *p,
            NonlinearitySpec::CubicQuintic { .. } => 3.0,
            NonlinearitySpec::CombinedPowers { terms } => terms
                .iter()
                .filter(|t| t.coefficient != 0.0)
                .map(|t| t.exponent)
                .fold(f64::INFINITY, f64::min),
            NonlinearitySpec::Truncated { inner, .. } => inner.p0(),
        }
    }

    pub fn growth_at_infinity(&self) -> GrowthAtInfinity {
        match self {
            NonlinearitySpec::PurePower { p } => GrowthAtInfinity::Power { p: *p },
            NonlinearitySpec::CubicQuintic { .. } | NonlinearitySpec::Truncated { .. } => {
                GrowthAtInfinity::LinearOrSublinear
            }
            NonlinearitySpec::CombinedPowers { terms } => {
                let top = terms
                    .iter()
                    .map(|t| t.exponent)
                    .fold(f64::NEG_INFINITY, f64::max);
                let coefficient: f64 = terms
                    .iter()
                    .filter(|t| t.exponent == top)
                    .map(|t| t.coefficient)
                    .sum();
                if coefficient > 0.0 {
                    GrowthAtInfinity::Power { p: top }
                } else {
                    GrowthAtInfinity::LinearOrSublinear
                }
            }
        }
    }

    pub fn classify(&self, dim: usize) -> Result<RegimeReport> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} must be >= 2"
            )));
        }
        let p0 = self.p0();
        if !(p0 > 1.0) {
            return Err(Error::UnsupportedRegime(format!("p0 = {p0} <= 1")));
        }
        let n = dim as f64;
        let mass_critical = 1.0 + 4.0 / n;
        let sobolev_critical = if dim == 2 {
            f64::INFINITY
        } else {
            (n + 2.0) / (n - 2.0)
        };
        let in_window = |p: f64| p > mass_critical && p < sobolev_critical;
        let p_inf = self.growth_at_infinity();
        let mu_star = self.mu_star()?;
        let p0_supercritical = in_window(p0);
        let regime = if !p0_supercritical {
            Regime::OutsideSupercriticalAtZero
        } else if mu_star.is_finite() {
            Regime::FiniteThreshold
        } else {
            match p_inf {
                GrowthAtInfinity::Power { p } if in_window(p) => Regime::SupercriticalAtInfinity,
                _ => Regime::Unclassified,
            }
        };
        Ok(RegimeReport {
            dim,
            p0,
            p_inf,
            mass_critical,
            sobolev_critical,
            p0_supercritical,
            mu_star,
            mu_star_finite: mu_star.is_finite(),
            regime,
        })
    }
}

impl fmt::Display for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearitySpec::PurePower { p } => write!(f, "power:p={p}"),
            NonlinearitySpec::CubicQuintic { a, b } => write!(f, "cubic-quintic:a={a},b={b}"),
            NonlinearitySpec::CombinedPowers { terms } => {
                write!(f, "combined:")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    let sign = if t.coefficient < 0.0 { '-' } else { '+' };
                    write!(f, "{sign}{}*s^{}", t.coefficient.abs(), t.exponent)?;
                }
                Ok(())
            }
            NonlinearitySpec::Truncated { inner, s1 } => write!(f, "{inner} truncated at {s1}"),
        }
    }
}

/// Parses `power:p=3`, `cubic-quintic:a=1,b=1` and `combined:+1*s^3,-1*s^5`.
impl FromStr for NonlinearitySpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.split_once(':') {
            Some((n, a)) => (n.trim(), a.trim()),
            None => (text, ""),
        };
        let spec = match name {
            "power" => {
                let kv = parse_kv(args, &["p"])?;
                let p = kv
                    .iter()
                    .find(|(k, _)| k == "p")
                    .map(|(_, v)| *v)
                    .ok_or_else(|| Error::Parse("power needs p=<exponent>".into()))?;
                NonlinearitySpec::PurePower { p }
            }
            "cubic-quintic" => {
                let kv = parse_kv(args, &["a", "b"])?;
                let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
                NonlinearitySpec::CubicQuintic {
                    a: get("a").unwrap_or(1.0),
                    b: get("b").unwrap_or(1.0),
                }
            }
            "combined" => {
                let terms = args
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(parse_monomial)
                    .collect::<Result<Vec<_>>>()?;
                NonlinearitySpec::CombinedPowers { terms }
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown nonlinearity family '{other}'"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_kv(args: &str, allowed: &[&str]) -> Result<Vec<(String, f64)>> {
    args.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
            let k = k.trim();
            if !allowed.contains(&k) {
                return Err(Error::Parse(format!("unknown parameter '{k}'")));
            }
            let v = v
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{}'", v.trim())))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

/// `[+|-][coef*]s^exp`
fn parse_monomial(term: &str) -> Result<Monomial> {
    let term = term.trim();
    let bad = || Error::Parse(format!("bad monomial '{term}', expected e.g. +1*s^3"));
    let (sign, rest) = match term.as_bytes().first() {
        Some(b'+') => (1.0, &term[1..]),
        Some(b'-') => (-1.0, &term[1..]),
        _ => (1.0, term),
    };
    let (coef, power) = match rest.split_once('*') {
        Some((c, p)) => (c.trim().parse::<f64>().map_err(|_| bad())?, p.trim()),
        None => (1.0, rest.trim()),
    };
    let exponent = power
        .strip_prefix("s^")
        .ok_or_else(bad)?
        .trim()
        .parse::<f64>()
        .map_err(|_| bad())?;
    Ok(Monomial {
        coefficient: sign * coef,
        exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn families() -> Vec<NonlinearitySpec> {
        vec![
            NonlinearitySpec::pure_power(3.0),
            NonlinearitySpec::pure_power(2.5),
            NonlinearitySpec::cubic_quintic(1.0, 1.0),
            NonlinearitySpec::cubic_quintic(2.0, 0.5),
            NonlinearitySpec::combined(&[(1.0, 3.0), (-1.0, 5.0)]),
            NonlinearitySpec::combined(&[(1.0, 2.5), (0.3, 4.0)]),
            NonlinearitySpec::cubic_quintic(1.0, 1.0)
                .truncate()
                .unwrap(),
        ]
    }

    #[test]
    fn negative_extension_and_origin() {
        let cq = NonlinearitySpec::cubic_quintic(1.0, 1.0);
        assert_eq!(cq.g(-2.0), 2.0);
        assert_eq!(NonlinearitySpec::pure_power(3.0).g(0.0), 0.0);
        assert_eq!(cq.g(1.0), 0.0);
        for spec in families() {
            assert_eq!(spec.antiderivative(0.0), 0.0);
        }
    }

    #[test]
    fn antiderivative_closed_forms() {
        let cq = NonlinearitySpec::cubic_quintic(1.0, 1.0);
        assert!((cq.antiderivative(1.0) - 1.0 / 12.0).abs() < 1e-16);
        let p = NonlinearitySpec::pure_power(3.5);
        let s: f64 = 1.7;
        assert!((p.antiderivative(s) - s.powf(4.5) / 4.5).abs() < 1e-14);
    }

    #[test]
    fn antiderivative_matches_g_by_central_differences() {
        for spec in families() {
            let kink = match &spec {
                NonlinearitySpec::Truncated { s1, .. } => Some(*s1),
                _ => None,
            };
            for i in 1..=1000 {
                let s = 10.0 * i as f64 / 1000.0;
                if let Some(k) = kink {
                    if (s - k).abs() < 1e-3 {
                        continue;
                    }
                }
                let h = 1e-5 * s.max(1e-3);
                let fd = (spec.antiderivative(s + h) - spec.antiderivative(s - h)) / (2.0 * h);
                let g = spec.g(s);
                let scale = spec.g_scale(s).max(1e-12);
                assert!(
                    (fd - g).abs() <= 1e-8 * scale.max(g.abs()),
                    "{spec}: s={s} fd={fd} g={g}"
                );
            }
        }
    }

    #[test]
    fn mu_star_cubic_quintic_is_three_sixteenths() {
        let cq = NonlinearitySpec::cubic_quintic(1.0, 1.0);
        assert_eq!(cq.mu_star().unwrap(), 0.1875);
        let numeric = cq.mu_star_numeric().unwrap();
        assert!((numeric - 0.1875).abs() < 1e-10, "{numeric}");
    }

    #[test]
    fn mu_star_closed_form_matches_numeric_for_general_cubic_quintic() {
        for &(a, b) in &[(1.0, 1.0), (2.0, 0.5), (0.3, 4.0), (5.0, 5.0)] {
            let spec = NonlinearitySpec::cubic_quintic(a, b);
            let closed = 3.0 * a * a / (16.0 * b);
            let numeric = spec.mu_star_numeric().unwrap();
            assert!(
                (numeric - closed).abs() <= 1e-10 * closed.max(1.0),
                "a={a} b={b}"
            );
            assert_eq!(spec.mu_star().unwrap(), closed);
        }
    }

    #[test]
    fn mu_star_infinite_for_powers() {
        assert!(NonlinearitySpec::pure_power(3.0)
            .mu_star()
            .unwrap()
            .is_infinite());
        assert!(NonlinearitySpec::pure_power(3.0)
            .mu_star_numeric()
            .unwrap()
            .is_infinite());
        let combined = NonlinearitySpec::combined(&[(1.0, 2.5), (0.3, 4.0)]);
        assert!(combined.mu_star().unwrap().is_infinite());
    }

    #[test]
    fn truncated_mu_star_is_finite_and_bounds_g() {
        let t = NonlinearitySpec::cubic_quintic(1.0, 1.0)
            .truncate()
            .unwrap();
        let mu_star = t.mu_star().unwrap();
        assert!(mu_star.is_finite());
        // dense-grid cross-check of the maximiser
        let dense = (1..=200_000)
            .map(|i| {
                let s = 3.0 * i as f64 / 200_000.0;
                2.0 * t.antiderivative(s) / (s * s)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((mu_star - dense).abs() < 1e-9);
        for i in 0..=5000 {
            let s = 20.0 * i as f64 / 5000.0;
            assert!(t.antiderivative(s) <= 0.5 * mu_star * s * s * (1.0 + 1e-12));
        }
    }

    #[test]
    fn truncation_zeros() {
        match NonlinearitySpec::cubic_quintic(1.0, 1.0)
            .truncate()
            .unwrap()
        {
            NonlinearitySpec::Truncated { s1, .. } => assert!((s1 - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        match NonlinearitySpec::combined(&[(1.0, 3.0), (-1.0, 5.0)])
            .truncate()
            .unwrap()
        {
            NonlinearitySpec::Truncated { s1, .. } => assert!((s1 - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            NonlinearitySpec::pure_power(3.0).truncate(),
            Err(Error::NoZeroFound)
        );
    }

    #[test]
    fn truncated_is_flat_above_s1() {
        let t = NonlinearitySpec::cubic_quintic(1.0, 1.0)
            .truncate()
            .unwrap();
        assert_eq!(t.g(1.5), 0.0);
        assert!((t.antiderivative(7.0) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let r = NonlinearitySpec::cubic_quintic(1.0, 1.0)
            .classify(3)
            .unwrap();
        assert_eq!(r.p0, 3.0);
        assert!(r.p0_supercritical);
        assert!(r.mu_star_finite);
        assert_eq!(r.regime, Regime::FiniteThreshold);

        let r = NonlinearitySpec::pure_power(3.0).classify(3).unwrap();
        assert_eq!(r.p_inf, GrowthAtInfinity::Power { p: 3.0 });
        assert_eq!(r.regime, Regime::SupercriticalAtInfinity);

        let r = NonlinearitySpec::pure_power(2.0).classify(3).unwrap();
        assert!(!r.p0_supercritical);
        assert_eq!(r.regime, Regime::OutsideSupercriticalAtZero);
    }

    #[test]
    fn classify_rejects_bad_exponent() {
        let bogus = NonlinearitySpec::PurePower { p: 0.5 };
        assert!(matches!(
            bogus.classify(3),
            Err(Error::UnsupportedRegime(_))
        ));
        assert!(bogus.validate().is_err());
    }

    #[test]
    fn parse_grammar() {
        let cq: NonlinearitySpec = "cubic-quintic:a=1,b=1".parse().unwrap();
        assert_eq!(cq, NonlinearitySpec::cubic_quintic(1.0, 1.0));
        let p: NonlinearitySpec = "power:p=3".parse().unwrap();
        assert_eq!(p, NonlinearitySpec::pure_power(3.0));
        let c: NonlinearitySpec = "combined:+1*s^3,-1*s^5".parse().unwrap();
        assert_eq!(c, NonlinearitySpec::combined(&[(1.0, 3.0), (-1.0, 5.0)]));
        let c2: NonlinearitySpec = "combined:s^3,-0.5*s^4.5".parse().unwrap();
        assert_eq!(c2, NonlinearitySpec::combined(&[(1.0, 3.0), (-0.5, 4.5)]));
        assert!("power:q=3".parse::<NonlinearitySpec>().is_err());
        assert!("power:p=1".parse::<NonlinearitySpec>().is_err());
        assert!("quartic".parse::<NonlinearitySpec>().is_err());
        let back: NonlinearitySpec = c.to_string().parse().unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #[test]
        fn negative_arguments_use_linear_extension(s in -1e3f64..-1e-9, which in 0usize..7) {
            let spec = &families()[which];
            prop_assert_eq!(spec.g(s), -s);
            prop_assert_eq!(spec.antiderivative(s), -0.5 * s * s);
        }
    }
}
