use crate::error::{Error, Result};
use crate::special::ball_volume;

/// A closed region in ℝ^D centred at the origin (balls, annuli) or an
/// axis-parallel box.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Empty,
}

impl Region {
    pub fn ball(radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("invalid ball radius {radius}")));
        }
        Ok(Region::Ball { radius })
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        if !(0.0 <= inner && inner < outer) || !outer.is_finite() {
            return Err(Error::Domain(format!("invalid annulus radii {inner}, {outer}")));
        }
        Ok(Region::Annulus { inner, outer })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(vec![lo; dim], vec![hi; dim])
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::Domain("box bounds must satisfy lower ≤ upper".into()));
        }
        if lower.iter().chain(&upper).any(|x| !x.is_finite()) {
            return Err(Error::Domain("box bounds must be finite".into()));
        }
        Ok(Region::Box { lower, upper })
    }

    /// Parses `ball:R`, `annulus:R1,R2`, `box:lo,hi` (a cube) or `empty`.
    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        let (kind, params) = spec.split_once(':').unwrap_or((spec, ""));
        let nums: std::result::Result<Vec<f64>, _> = params
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>())
            .collect();
        let nums = nums.map_err(|_| Error::Config(format!("bad region parameters '{params}'")))?;
        match (kind.trim(), nums.as_slice()) {
            ("ball", [r]) => Self::ball(*r),
            ("annulus", [a, b]) => Self::annulus(*a, *b),
            ("box", [lo, hi]) => Self::cube(dim, *lo, *hi),
            ("empty", []) => Ok(Region::Empty),
            _ => Err(Error::Config(format!("unrecognised region '{spec}'"))),
        }
    }

    /// Lebesgue volume in dimension `dim`.
    pub fn volume(&self, dim: usize) -> f64 {
        match self {
            Region::Ball { radius } => ball_volume(dim) * radius.powi(dim as i32),
            Region::Annulus { inner, outer } => {
                ball_volume(dim) * (outer.powi(dim as i32) - inner.powi(dim as i32))
            }
            Region::Box { lower, upper } => lower.iter().zip(upper).map(|(l, u)| u - l).product(),
            Region::Empty => 0.0,
        }
    }

    /// Radius of a centred ball containing the region.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            Region::Ball { radius } => *radius,
            Region::Annulus { outer, .. } => *outer,
            Region::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| l.abs().max(u.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
            Region::Empty => 0.0,
        }
    }

    /// Squared-norm window `[lo, hi]` for radial regions.
    pub fn radial_window(&self) -> Option<(f64, f64)> {
        match self {
            Region::Ball { radius } => Some((0.0, radius * radius)),
            Region::Annulus { inner, outer } => Some((inner * inner, outer * outer)),
            _ => None,
        }
    }

    /// Closed membership with relative padding `pad` on the float test.
    pub fn contains(&self, x: &[f64], pad: f64) -> bool {
        match self {
            Region::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| *v >= l - pad * l.abs().max(1.0) && *v <= u + pad * u.abs().max(1.0)),
            Region::Empty => false,
            _ => {
                let (lo, hi) = self.radial_window().unwrap();
                let n2: f64 = x.iter().map(|v| v * v).sum();
                n2 >= lo - pad * lo.max(1.0) && n2 <= hi + pad * hi.max(1.0)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes() {
        let b = Region::ball(3.5).unwrap();
        assert!((b.volume(3) - 179.594380).abs() < 1e-5);
        let a = Region::annulus(1.0, 2.0).unwrap();
        assert!((a.volume(2) - 3.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(Region::cube(3, 0.0, 1.0).unwrap().volume(3), 1.0);
        assert_eq!(Region::Empty.volume(4), 0.0);
    }

    #[test]
    fn parsing() {
        assert_eq!(Region::parse("ball:3.5", 3).unwrap(), Region::Ball { radius: 3.5 });
        assert_eq!(
            Region::parse("annulus:1,1.5", 2).unwrap(),
            Region::Annulus { inner: 1.0, outer: 1.5 }
        );
        assert!(Region::parse("sphere:1", 2).is_err());
        assert!(Region::annulus(2.0, 1.0).is_err());
    }

    #[test]
    fn membership_is_closed() {
        let a = Region::annulus(1.0, 1.5).unwrap();
        assert!(a.contains(&[1.0, 0.0], 0.0));
        assert!(a.contains(&[1.5, 0.0], 0.0));
        assert!(!a.contains(&[0.5, 0.5], 0.0));
    }
}
