//! Radial profiles `u(|x|)` on a uniform grid and the integral functionals
//! evaluated on them.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;

/// Area of the unit sphere `S^{N-1}`, `2 pi^{N/2} / Gamma(N/2)`.
pub fn sphere_area(dim: usize) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half_integer(dim)
}

/// `Gamma(n/2)` for a positive integer `n`.
pub(crate) fn gamma_half_integer(n: usize) -> f64 {
    let mut value = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < n as f64 / 2.0 - 1e-12 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Composite Simpson rule for samples on a uniform grid of spacing `h`.
/// An odd interval count closes with the 3/8 rule on the last three.
pub fn simpson(h: f64, f: &[f64]) -> f64 {
    let n = f.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * h * (f[0] + f[1]),
        2 => h / 3.0 * (f[0] + 4.0 * f[1] + f[2]),
        _ => {
            let even_end = if n.is_multiple_of(2) { n } else { n - 3 };
            let mut acc = 0.0;
            if even_end > 0 {
                let mut odd = 0.0;
                let mut even = 0.0;
                for i in (1..even_end).step_by(2) {
                    odd += f[i];
                }
                for i in (2..even_end).step_by(2) {
                    even += f[i];
                }
                acc += h / 3.0 * (f[0] + f[even_end] + 4.0 * odd + 2.0 * even);
            }
            if n % 2 == 1 {
                let k = n - 3;
                acc += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
            }
            acc
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    dim: usize,
    grid: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl RadialProfile {
    /// Builds a profile on a uniform grid starting at `r = 0`.
    pub fn new(dim: usize, grid: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidProfile(format!("dimension {dim} < 2")));
        }
        if grid.len() < 2 || values.len() != grid.len() || derivs.len() != grid.len() {
            return Err(Error::InvalidProfile(
                "grid, values and derivs must have equal length >= 2".into(),
            ));
        }
        if grid[0] != 0.0 {
            return Err(Error::InvalidProfile("grid must start at r = 0".into()));
        }
        if derivs[0] != 0.0 {
            return Err(Error::InvalidProfile("u'(0) must be 0".into()));
        }
        let h = grid[1];
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidProfile(
                "grid must be strictly increasing".into(),
            ));
        }
        for (i, w) in grid.windows(2).enumerate() {
            let step = w[1] - w[0];
            let tol = 1e-9 * h + 16.0 * f64::EPSILON * w[1].abs();
            if !(step > 0.0) || (step - h).abs() > tol {
                return Err(Error::InvalidProfile(format!(
                    "grid must be uniform and increasing (interval {i})"
                )));
            }
        }
        if values.iter().chain(&derivs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite sample".into()));
        }
        Ok(RadialProfile {
            dim,
            grid,
            values,
            derivs,
        })
    }

    /// Samples `u` and `u'` on `n + 1` uniform nodes over `[0, r_max]`.
    pub fn from_fn<U, D>(dim: usize, r_max: f64, n: usize, u: U, du: D) -> Result<Self>
    where
        U: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let h = r_max / n as f64;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let values = grid.iter().map(|&r| u(r)).collect();
        let mut derivs: Vec<f64> = grid.iter().map(|&r| du(r)).collect();
        derivs[0] = 0.0;
        RadialProfile::new(dim, grid, values, derivs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// `omega_{N-1} int_0^R f(r) r^{N-1} dr` for nodal samples of `f`.
    pub fn radial_integral<F>(&self, f: F) -> f64
    where
        F: Fn(usize) -> f64,
    {
        let power = self.dim as i32 - 1;
        let samples: Vec<f64> = self
            .grid
            .iter()
            .enumerate()
            .map(|(i, &r)| f(i) * r.powi(power))
            .collect();
        sphere_area(self.dim) * simpson(self.spacing(), &samples)
    }

    /// `1/2 int u^2 dx`.
    pub fn mass(&self) -> f64 {
        0.5 * self.radial_integral(|i| self.values[i] * self.values[i])
    }

    /// `int |grad u|^2 dx`.
    pub fn grad_norm_sq(&self) -> f64 {
        self.radial_integral(|i| self.derivs[i] * self.derivs[i])
    }

    /// `int G(u) dx`.
    pub fn potential(&self, spec: &NonlinearitySpec) -> f64 {
        self.radial_integral(|i| spec.antiderivative(self.values[i]))
    }

    /// `I(mu, u) = 1/2 |grad u|^2 + mu/2 |u|^2 - int G(u)`.
    pub fn action(&self, spec: &NonlinearitySpec, mu: f64) -> f64 {
        FunctionalReport::evaluate(spec, mu, self, None).action
    }

    /// Pohozaev functional `(N-2)/2 |grad u|^2 + N (mu/2 |u|^2 - int G(u))`.
    pub fn pohozaev(&self, spec: &NonlinearitySpec, mu: f64) -> f64 {
        FunctionalReport::evaluate(spec, mu, self, None).pohozaev
    }

    /// `J_m(mu, u) = 1/2 |grad u|^2 - int G(u) + mu (1/2 |u|^2 - m)`.
    pub fn j_m(&self, spec: &NonlinearitySpec, mu: f64, m: f64) -> f64 {
        FunctionalReport::evaluate(spec, mu, self, Some(m)).j_m
    }

    /// `u(x / t)`: grid stretched by `t`, derivatives divided by `t`.
    pub fn dilate(&self, t: f64) -> Result<RadialProfile> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dilation factor {t} must be > 0"
            )));
        }
        Ok(RadialProfile {
            dim: self.dim,
            grid: self.grid.iter().map(|r| r * t).collect(),
            values: self.values.clone(),
            derivs: self.derivs.iter().map(|d| d / t).collect(),
        })
    }

    /// `lambda * u(x * sigma)`.
    pub fn rescale(&self, amplitude: f64, sigma: f64) -> Result<RadialProfile> {
        let mut out = self.dilate(1.0 / sigma)?;
        for v in &mut out.values {
            *v *= amplitude;
        }
        for d in &mut out.derivs {
            *d *= amplitude;
        }
        Ok(out)
    }

    /// Cubic Hermite interpolant of `u` at `r`; zero beyond the grid.
    pub fn value_at(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.values[0];
        }
        let h = self.spacing();
        let pos = r / h;
        let i = pos.floor() as usize;
        if i + 1 >= self.grid.len() {
            return if i + 1 == self.grid.len() && (pos - i as f64) < 1e-12 {
                self.values[i]
            } else {
                0.0
            };
        }
        let t = pos - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.derivs[i] * h, self.derivs[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    /// Number of sign changes of `u` across the grid.
    pub fn sign_changes(&self) -> usize {
        let mut count = 0;
        let mut prev = 0.0f64;
        for &v in &self.values {
            if v == 0.0 {
                continue;
            }
            if prev != 0.0 && prev.signum() != v.signum() {
                count += 1;
            }
            prev = v;
        }
        count
    }

    /// CSV with header `r,u,du`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * self.grid.len());
        out.push_str("r,u,du\n");
        for i in 0..self.grid.len() {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt17(self.grid[i]),
                fmt17(self.values[i]),
                fmt17(self.derivs[i])
            );
        }
        out
    }

    pub fn from_csv(dim: usize, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "r,u,du" => {}
            _ => return Err(Error::Parse("profile CSV must start with 'r,u,du'".into())),
        }
        let (mut grid, mut values, mut derivs) = (Vec::new(), Vec::new(), Vec::new());
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected 3 columns", n + 1)));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: bad number '{s}'", n + 1)))
            };
            grid.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
            derivs.push(parse(cols[2])?);
        }
        RadialProfile::new(dim, grid, values, derivs)
    }
}

/// Round-trip exact formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalReport {
    /// `1/2 |u|_2^2`.
    pub mass: f64,
    /// `|grad u|_2^2`.
    pub grad_sq: f64,
    /// `int G(u) dx`.
    pub potential: f64,
    pub action: f64,
    pub pohozaev: f64,
    /// `J_m` for the supplied `m`, or for `m = mass` when none was given.
    pub j_m: f64,
}

impl FunctionalReport {
    /// Integrates the three base quantities once and assembles the rest.
    pub fn evaluate(
        spec: &NonlinearitySpec,
        mu: f64,
        profile: &RadialProfile,
        m: Option<f64>,
    ) -> FunctionalReport {
        let mass = profile.mass();
        let grad_sq = profile.grad_norm_sq();
        let potential = profile.potential(spec);
        Self::assemble(profile.dim(), mu, mass, grad_sq, potential, m)
    }

    pub fn assemble(
        dim: usize,
        mu: f64,
        mass: f64,
        grad_sq: f64,
        potential: f64,
        m: Option<f64>,
    ) -> FunctionalReport {
        let n = dim as f64;
        let action = 0.5 * grad_sq + mu * mass - potential;
        let pohozaev = 0.5 * (n - 2.0) * grad_sq + n * (mu * mass - potential);
        let m = m.unwrap_or(mass);
        let j_m = 0.5 * grad_sq - potential + mu * (mass - m);
        FunctionalReport {
            mass,
            grad_sq,
            potential,
            action,
            pohozaev,
            j_m,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian(dim: usize, n: usize) -> RadialProfile {
        RadialProfile::from_fn(
            dim,
            12.0,
            n,
            |r| (-0.5 * r * r).exp(),
            |r| -r * (-0.5 * r * r).exp(),
        )
        .unwrap()
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn simpson_exact_for_cubics_both_parities() {
        for n in [2usize, 3, 4, 5, 8, 9] {
            let h = 1.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3)).collect();
            assert!((simpson(h, &f) - 0.25).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn zero_profile_functionals() {
        let spec = NonlinearitySpec::pure_power(3.0);
        let zero = RadialProfile::from_fn(3, 10.0, 100, |_| 0.0, |_| 0.0).unwrap();
        assert_eq!(zero.mass(), 0.0);
        assert_eq!(zero.grad_norm_sq(), 0.0);
        assert_eq!(zero.action(&spec, 1.0), 0.0);
        assert_eq!(zero.pohozaev(&spec, 1.0), 0.0);
        assert_eq!(zero.j_m(&spec, 0.7, 2.0), -1.4);
    }

    #[test]
    fn gaussian_mass_and_gradient() {
        let u = gaussian(3, 2400);
        let mass = 0.5 * PI.powf(1.5);
        let grad = 1.5 * PI.powf(1.5);
        assert!((u.mass() - mass).abs() < 1e-10 * mass);
        assert!((u.grad_norm_sq() - grad).abs() < 1e-10 * grad);
        assert!((u.mass() - 2.784_163_998_415_854).abs() < 1e-9);
    }

    #[test]
    fn simpson_fourth_order_on_exponential() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|i| (i as f64 * h).exp()).collect();
            (simpson(h, &f) - (1f64.exp() - 1.0)).abs()
        };
        for (a, b) in [(20, 40), (21, 42)] {
            let ratio = err(a) / err(b);
            assert!(ratio > 12.0 && ratio < 24.0, "n={a}: ratio {ratio}");
        }
    }

    #[test]
    fn mass_additive_over_subintervals() {
        let u = gaussian(3, 400);
        let cut = 200;
        let left = RadialProfile::new(
            3,
            u.grid()[..=cut].to_vec(),
            u.values()[..=cut].to_vec(),
            u.derivs()[..=cut].to_vec(),
        )
        .unwrap();
        let h = u.spacing();
        let right: Vec<f64> = (cut..u.len())
            .map(|i| 0.5 * u.values()[i].powi(2) * u.grid()[i].powi(2))
            .collect();
        let total = left.mass() + sphere_area(3) * simpson(h, &right);
        assert!((total - u.mass()).abs() < 1e-13 * u.mass());
    }

    #[test]
    fn dilation_scaling() {
        let u = gaussian(3, 1200);
        let same = u.dilate(1.0).unwrap();
        assert_eq!(same, u);
        let t = 1.7;
        let d = u.dilate(t).unwrap();
        assert!((d.mass() - t.powi(3) * u.mass()).abs() < 1e-12 * d.mass());
        assert!((d.grad_norm_sq() - t * u.grad_norm_sq()).abs() < 1e-12 * d.grad_norm_sq());
        assert!(u.dilate(0.0).is_err());
    }

    #[test]
    fn j_m_identities() {
        let spec = NonlinearitySpec::cubic_quintic(1.0, 1.0);
        let u = gaussian(3, 800);
        let mu = 0.1;
        let r = FunctionalReport::evaluate(&spec, mu, &u, Some(3.0));
        assert!((r.j_m - (r.action - 3.0 * mu)).abs() < 1e-13);
        let at_mass = u.j_m(&spec, mu, u.mass());
        assert!((at_mass - (0.5 * r.grad_sq - r.potential)).abs() < 1e-13);
    }

    #[test]
    fn pohozaev_is_dilation_derivative() {
        let spec = NonlinearitySpec::pure_power(3.0);
        let u = RadialProfile::from_fn(
            3,
            14.0,
            2800,
            |r| 2.0 / r.cosh(),
            |r| -2.0 * r.tanh() / r.cosh(),
        )
        .unwrap();
        let mu = 1.3;
        let eps = 1e-4;
        let plus = u.dilate(1.0 + eps).unwrap().j_m(&spec, mu, 0.5);
        let minus = u.dilate(1.0 - eps).unwrap().j_m(&spec, mu, 0.5);
        let fd = (plus - minus) / (2.0 * eps);
        let p = u.pohozaev(&spec, mu);
        assert!((fd - p).abs() < 1e-6 * p.abs().max(1.0), "fd={fd} P={p}");
    }

    #[test]
    fn hermite_interpolation_is_accurate() {
        let u = gaussian(3, 1200);
        for &r in &[0.013, 1.234, 3.3333, 7.9] {
            assert!((u.value_at(r) - (-0.5 * r * r).exp()).abs() < 1e-9);
        }
        assert_eq!(u.value_at(100.0), 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let u = gaussian(2, 50);
        let text = u.to_csv();
        assert!(text.starts_with("r,u,du\n"));
        let back = RadialProfile::from_csv(2, &text).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn rejects_malformed_profiles() {
        assert!(RadialProfile::new(3, vec![0.0, 1.0], vec![1.0], vec![0.0, 0.0]).is_err());
        assert!(RadialProfile::new(3, vec![0.1, 1.0], vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(RadialProfile::new(3, vec![0.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.0]).is_err());
        assert!(RadialProfile::new(1, vec![0.0, 1.0], vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn assembly_identity(mass in 0.0f64..100.0, grad in 0.0f64..100.0, pot in -50.0f64..50.0,
                             mu in 1e-3f64..10.0, dim in 2usize..6) {
            let r = FunctionalReport::assemble(dim, mu, mass, grad, pot, None);
            let lhs = dim as f64 * r.action - r.pohozaev;
            prop_assert!((lhs - grad).abs() <= 1e-12 * (grad.abs() + dim as f64 * (mu * mass + pot.abs()) + 1.0));
        }

        #[test]
        fn dilations_compose(t in 0.1f64..10.0, s in 0.1f64..10.0) {
            let u = gaussian(3, 40);
            let twice = u.dilate(t).unwrap().dilate(s).unwrap();
            let once = u.dilate(t * s).unwrap();
            for (a, b) in twice.grid().iter().zip(once.grid()) {
                prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs());
            }
        }
    }
}
