use super::{EmbeddedLattice, EnumerationLimits, Region};
use crate::error::{Error, Result};

/// Σ_{x ∈ εΛ} covol(εΛ)·φ(x) for φ supported in the ball of `support_radius`.
pub fn riemann_sum<F: Fn(&[f64]) -> f64>(
    lat: &EmbeddedLattice,
    phi: F,
    support_radius: f64,
    eps: f64,
) -> Result<f64> {
    riemann_sum_with(lat, phi, support_radius, eps, &EnumerationLimits::default())
}

pub fn riemann_sum_with<F: Fn(&[f64]) -> f64>(
    lat: &EmbeddedLattice,
    phi: F,
    support_radius: f64,
    eps: f64,
    limits: &EnumerationLimits,
) -> Result<f64> {
    if !support_radius.is_finite() {
        return Err(Error::Domain("test function must have bounded support".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("scale must be positive".into()));
    }
    let scaled = lat.scaled(eps);
    let mut acc = 0.0;
    scaled.for_each_point(&Region::ball(support_radius)?, limits, |p| acc += phi(p.coords))?;
    Ok(acc * scaled.covolume())
}
