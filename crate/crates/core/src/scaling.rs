//! Closed-form scaling predictions used as an independent check on the
//! shooting solver.
//!
//! For `g(s) = s^p` the ground state at frequency `μ` is exactly
//! `μ^{1/(p-1)} u_1(μ^{1/2} x)`, so one solve at `μ = 1` predicts every other
//! frequency without touching the bisection again.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;
use crate::profile::RadialProfile;
use crate::shooting::GroundState;

/// `β = 2/(p-1) - N/2`.
pub fn beta(p: f64, dim: usize) -> f64 {
    2.0 / (p - 1.0) - 0.5 * dim as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerScalingLaw {
    pub p: f64,
    pub dim: usize,
    pub beta: f64,
}

impl PowerScalingLaw {
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) || dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "scaling law needs p > 1 and N >= 2, got p={p}, N={dim}"
            )));
        }
        Ok(PowerScalingLaw {
            p,
            dim,
            beta: beta(p, dim),
        })
    }

    /// Mass ratio `c(μ)/c(1) = μ^β`.
    pub fn mass_factor(&self, mu: f64) -> f64 {
        mu.powf(self.beta)
    }

    /// Level ratio `a(μ)/a(1) = μ^{β+1}`.
    pub fn level_factor(&self, mu: f64) -> f64 {
        mu.powf(self.beta + 1.0)
    }

    pub fn amplitude(&self, mu: f64) -> f64 {
        mu.powf(1.0 / (self.p - 1.0))
    }

    pub fn is_mass_supercritical(&self) -> bool {
        self.beta < 0.0
    }
}

/// `μ^{1/(p-1)} u(μ^{1/2} r)` from a pure-power ground state solved at `μ = 1`.
pub fn rescale_ground_state(base: &GroundState, p: f64, mu: f64) -> Result<RadialProfile> {
    match base.spec {
        NonlinearitySpec::PurePower { p: q } if q == p => {}
        _ => return Err(Error::WrongFamily),
    }
    if base.mu != 1.0 {
        return Err(Error::InvalidArgument(format!(
            "base state must be solved at mu = 1, got {}",
            base.mu
        )));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "frequency {mu} must be > 0"
        )));
    }
    let law = PowerScalingLaw::new(p, base.dim())?;
    base.profile.rescale(law.amplitude(mu), mu.sqrt())
}

/// Least-energy level `β₀ δ^{-N/2} μ` of `-Δu + μu = δ u^{1+4/N}`.
pub fn critical_model_level(delta: f64, mu: f64, dim: usize, beta0: f64) -> f64 {
    beta0 * delta.powf(-0.5 * dim as f64) * mu
}

/// `g(s) = δ s^{1+4/N}`.
pub fn critical_model(delta: f64, dim: usize) -> NonlinearitySpec {
    NonlinearitySpec::combined(&[(delta, 1.0 + 4.0 / dim as f64)])
}

/// `max |a(r) - b(r)| / a(0)` over the nodes of `a`, with `b` interpolated.
pub fn max_relative_gap(a: &RadialProfile, b: &RadialProfile) -> f64 {
    let scale = a.values()[0].abs();
    a.grid()
        .iter()
        .zip(a.values())
        .map(|(&r, &u)| (u - b.value_at(r)).abs() / scale)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_values() {
        assert_eq!(beta(3.0, 3), -0.5);
        for dim in 2..6 {
            assert!(beta(1.0 + 4.0 / dim as f64, dim).abs() < 1e-15);
        }
        assert!(beta(7.0 / 3.0, 3).abs() < 1e-15);
    }

    #[test]
    fn beta_sign_matches_mass_criticality() {
        for &(p, dim) in &[(2.0, 3), (2.5, 3), (3.0, 3), (3.5, 3), (2.5, 2), (4.0, 2)] {
            let law = PowerScalingLaw::new(p, dim).unwrap();
            assert_eq!(law.is_mass_supercritical(), p > 1.0 + 4.0 / dim as f64);
        }
    }

    #[test]
    fn critical_level_scalings() {
        assert_eq!(critical_model_level(1.0, 1.0, 3, 2.5), 2.5);
        assert_eq!(critical_model_level(1.0, 2.0, 3, 2.5), 5.0);
        assert_eq!(critical_model_level(4.0, 1.0, 2, 2.5), 0.625);
    }

    #[test]
    fn rescale_is_identity_at_unit_frequency() {
        let spec = NonlinearitySpec::pure_power(3.0);
        let base = crate::shooting::ground_state(&spec, 3, 1.0, &Default::default()).unwrap();
        let same = rescale_ground_state(&base, 3.0, 1.0).unwrap();
        assert_eq!(same, base.profile);
        assert!(matches!(
            rescale_ground_state(&base, 2.5, 1.0),
            Err(Error::WrongFamily)
        ));
    }
}
