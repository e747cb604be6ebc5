use super::{EmbeddedLattice, Provenance, Region};
use crate::error::{Error, Result};
use crate::numberfield::NumberField;

/// Relative padding of floating membership tests.
pub const PAD: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EnumerationLimits {
    pub max_dim: usize,
    pub max_points: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self { max_dim: 12, max_points: 200_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFilter {
    None,
    Nonzero,
    /// Content ideal (1); requires the lattice to be ρ(𝒪_F^n).
    Primitive,
}

/// A lattice point: exact module coordinates (times `denom`) and its
/// real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub exact: Vec<i64>,
    pub coords: Vec<f64>,
    pub norm_sq: f64,
}

/// Borrowed view handed to enumeration callbacks.
pub struct PointRef<'a> {
    pub exact: &'a [i64],
    pub coords: &'a [f64],
    pub norm_sq: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt data: μ (lower triangular) and squared lengths of b*_i.
fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = b.len();
    let mut mu = vec![vec![0.0; k]; k];
    let mut r = vec![0.0; k];
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &star[j]) / r[j];
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= mu[i][j] * s;
            }
        }
        r[i] = dot(&v, &v);
        star.push(v);
    }
    (mu, r)
}

/// LLL reduction of the float rows, mirroring every step on the integer rows.
pub(super) fn lll_reduce(b: &mut [Vec<f64>], e: &mut [Vec<i64>], delta: f64) {
    let k = b.len();
    if k < 2 {
        return;
    }
    let mut i = 1;
    let mut guard = 0usize;
    while i < k {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        let (mu, _) = gram_schmidt(b);
        for j in (0..i).rev() {
            let q = mu[i][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let (head, tail) = b.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= q * y;
                }
                let (eh, et) = e.split_at_mut(i);
                for (x, y) in et[0].iter_mut().zip(&eh[j]) {
                    *x -= qi * y;
                }
            }
        }
        let (mu, r) = gram_schmidt(b);
        if r[i] < (delta - mu[i][i - 1] * mu[i][i - 1]) * r[i - 1] {
            b.swap(i, i - 1);
            e.swap(i, i - 1);
            i = (i - 1).max(1);
        } else {
            i += 1;
        }
    }
}

impl EmbeddedLattice {
    /// Visits every lattice point in the closed region, each exactly once.
    ///
    /// Returns the number of points visited.
    pub fn for_each_point<F: FnMut(&PointRef)>(
        &self,
        region: &Region,
        limits: &EnumerationLimits,
        mut f: F,
    ) -> Result<u64> {
        if self.dim() > limits.max_dim {
            return Err(Error::Resource(format!(
                "dimension {} exceeds the enumeration limit {}",
                self.dim(),
                limits.max_dim
            )));
        }
        if region.is_empty() {
            return Ok(0);
        }
        let red = self.reduced();
        let k = red.rank();
        if k == 0 {
            return Ok(0);
        }
        let (mu, r) = gram_schmidt(red.basis());
        let bound = region.bounding_radius().powi(2);
        let mut walk = Walk {
            lat: &red,
            region,
            limits,
            mu,
            r,
            search: bound * (1.0 + PAD) + PAD,
            exact_scale: (self.scale / self.denom as f64).powi(2),
            x: vec![0i64; k],
            exact: vec![0i64; self.exact_basis.first().map_or(0, |r| r.len())],
            visited: 0,
            emitted: 0,
        };
        walk.level(k - 1, 0.0, &mut f)?;
        Ok(walk.emitted)
    }

    /// All points in the closed region, sorted by exact coordinates.
    pub fn enumerate_points(&self, region: &Region) -> Result<Vec<LatticePoint>> {
        self.enumerate_points_with(region, &EnumerationLimits::default())
    }

    pub fn enumerate_points_with(
        &self,
        region: &Region,
        limits: &EnumerationLimits,
    ) -> Result<Vec<LatticePoint>> {
        let mut out = Vec::new();
        self.for_each_point(region, limits, |p| {
            out.push(LatticePoint {
                exact: p.exact.to_vec(),
                coords: p.coords.to_vec(),
                norm_sq: p.norm_sq,
            })
        })?;
        out.sort_by(|a, b| a.exact.cmp(&b.exact));
        Ok(out)
    }

    pub fn count_points(&self, region: &Region, filter: PointFilter) -> Result<u64> {
        let content = match filter {
            PointFilter::Primitive => Some(self.standard_module_field()?),
            _ => None,
        };
        let mut count = 0u64;
        self.for_each_point(region, &EnumerationLimits::default(), |p| {
            let keep = match filter {
                PointFilter::None => true,
                PointFilter::Nonzero => p.exact.iter().any(|&v| v != 0),
                PointFilter::Primitive => {
                    let (field, n) = content.as_ref().unwrap();
                    content_norm(field, *n, p.exact) == 1
                }
            };
            if keep {
                count += 1;
            }
        })?;
        Ok(count)
    }

    fn standard_module_field(&self) -> Result<(NumberField, usize)> {
        let unimodular = self.denom == 1
            && crate::intmat::det_i64(&self.exact_basis).magnitude() == &num_bigint::BigUint::from(1u32);
        match &self.provenance {
            Provenance::Module { field, n } if unimodular => Ok((field.clone(), *n)),
            Provenance::Integer if unimodular => Ok((crate::numberfield::NumberField::rational(), self.rank())),
            _ => Err(Error::Precondition("primitive filter requires the lattice ρ(𝒪_F^n)".into())),
        }
    }
}

struct Walk<'a> {
    lat: &'a EmbeddedLattice,
    region: &'a Region,
    limits: &'a EnumerationLimits,
    mu: Vec<Vec<f64>>,
    r: Vec<f64>,
    search: f64,
    exact_scale: f64,
    x: Vec<i64>,
    exact: Vec<i64>,
    visited: u64,
    emitted: u64,
}

impl Walk<'_> {
    fn level<F: FnMut(&PointRef)>(&mut self, i: usize, partial: f64, f: &mut F) -> Result<()> {
        let k = self.x.len();
        let mut c = 0.0;
        for j in i + 1..k {
            c -= self.mu[j][i] * self.x[j] as f64;
        }
        let room = (self.search - partial).max(0.0);
        let t = (room / self.r[i]).sqrt();
        let lo = (c - t).ceil() as i64;
        let hi = (c + t).floor() as i64;
        for xi in lo..=hi {
            let diff = xi as f64 - c;
            let val = partial + diff * diff * self.r[i];
            if val > self.search {
                continue;
            }
            self.x[i] = xi;
            if i == 0 {
                self.leaf(f)?;
            } else {
                self.level(i - 1, val, f)?;
            }
        }
        self.x[i] = 0;
        Ok(())
    }

    fn leaf<F: FnMut(&PointRef)>(&mut self, f: &mut F) -> Result<()> {
        self.visited += 1;
        if self.visited > self.limits.max_points {
            return Err(Error::Resource(format!(
                "more than {} candidate points",
                self.limits.max_points
            )));
        }
        self.exact.iter_mut().for_each(|v| *v = 0);
        for (xi, row) in self.x.iter().zip(&self.lat.exact_basis) {
            if *xi != 0 {
                for (e, b) in self.exact.iter_mut().zip(row) {
                    *e += xi * b;
                }
            }
        }
        let coords = self.lat.point(&self.exact);
        let norm_sq = match self.lat.exact_norm(&self.exact) {
            Some(nn) => nn as f64 * self.exact_scale,
            None => coords.iter().map(|v| v * v).sum(),
        };
        let inside = match self.region.radial_window() {
            Some((lo, hi)) => norm_sq >= lo - PAD * lo.max(1.0) && norm_sq <= hi + PAD * hi.max(1.0),
            None => self.region.contains(&coords, PAD),
        };
        if inside {
            self.emitted += 1;
            f(&PointRef { exact: &self.exact, coords: &coords, norm_sq });
        }
        Ok(())
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Norm of the content ideal generated by the coordinates x_1, …, x_n ∈ 𝒪_F
/// (the index of the ℤ-span of {x_j·ω_t} in 𝒪_F); 0 for the zero vector.
pub fn content_norm(field: &NumberField, n: usize, exact: &[i64]) -> i128 {
    let d = field.degree();
    if d == 1 {
        return exact.iter().fold(0i128, |g, &v| gcd(g, v as i128));
    }
    let mut gens: Vec<Vec<i64>> = Vec::with_capacity(n * d);
    for j in 0..n {
        let x = &exact[j * d..(j + 1) * d];
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        for t in 0..d {
            let mut w = vec![0i64; d];
            w[t] = 1;
            gens.push(field.mul_int(x, &w));
        }
    }
    if gens.is_empty() {
        return 0;
    }
    if d == 2 {
        let mut g = 0i128;
        for a in 0..gens.len() {
            for b in a + 1..gens.len() {
                let m = gens[a][0] as i128 * gens[b][1] as i128 - gens[a][1] as i128 * gens[b][0] as i128;
                g = gcd(g, m);
                if g == 1 {
                    return 1;
                }
            }
        }
        return g;
    }
    let h = crate::intmat::hnf_i64(&gens);
    h.iter().enumerate().map(|(i, r)| r[i] as i128).product()
}
