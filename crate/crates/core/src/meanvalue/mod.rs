//! Hecke averages of Siegel and Rogers transforms over the index-N℘
//! sublattice family, primitive densities, echelon forms and the second
//! moment series.

mod echelon;
mod moments;

pub use echelon::{
    echelon_decomposition_check, echelon_forms, EchelonCheck, EchelonForm, FiniteFunction,
};
pub use moments::{
    primitive_density, second_moment_prediction, second_moment_truncated, PrimitiveDensity, SecondMoment, PRIMITIVE_EXHAUSTIVE_LIMIT,
    PRIMITIVE_SAMPLES,
};

use crate::error::{Error, Result};
use crate::hecke::sublattice_bases;
use crate::lattices::{EmbeddedLattice, Region, PAD};
use crate::numberfield::{FieldElement, NumberField, PrimeIdeal};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::collections::HashMap;
use std::time::Instant;

/// A shifted congruence class v + η·𝒪_F^n.
#[derive(Debug, Clone)]
pub struct CongruenceShift {
    pub v: Vec<FieldElement>,
    pub eta: FieldElement,
}

/// f = f_f·f_∞: the indicator of ∏_℘ π_℘^{e_℘}𝒪_℘^n (optionally a shifted
/// class) times the indicator of an archimedean region in ℝ^{nd}.
#[derive(Debug, Clone)]
pub struct AdelicTestFunction {
    pub n: usize,
    pub conditions: Vec<(PrimeIdeal, u32)>,
    pub shift: Option<CongruenceShift>,
    pub region: Region,
}

impl AdelicTestFunction {
    /// Level one: integrality everywhere and the given region.
    pub fn level_one(n: usize, region: Region) -> Self {
        Self { n, conditions: Vec::new(), shift: None, region }
    }

    pub fn with_condition(mut self, prime: PrimeIdeal, e: u32) -> Self {
        self.conditions.push((prime, e));
        self
    }

    /// Rational primes dividing the finite support.
    pub fn support(&self, field: &NumberField) -> Vec<u64> {
        let mut out: Vec<u64> = self.conditions.iter().filter(|c| c.1 > 0).map(|c| c.0.p).collect();
        if let Some(s) = &self.shift {
            if let Ok(nm) = field.norm(&s.eta) {
                if let Some(v) = nm.numer().magnitude().to_u64() {
                    out.extend(crate::special::prime_factors(v as u128));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// ∏_℘ N℘^{−e·n}: the α_f-volume of the finite part.
    pub fn finite_volume(&self, field: &NumberField) -> Result<f64> {
        let mut v: f64 = self
            .conditions
            .iter()
            .map(|(p, e)| (p.norm as f64).powi(-((*e as usize * self.n) as i32)))
            .product();
        if let Some(s) = &self.shift {
            let nm = field.ideal_norm(&s.eta)?.to_f64().unwrap();
            v *= nm.powi(-(self.n as i32));
        }
        Ok(v)
    }

    /// α_F^n(f) = |Δ_F|^{−n/2}·(finite volume)·vol(region).
    pub fn volume(&self, field: &NumberField) -> Result<f64> {
        let nd = self.n * field.degree();
        let disc = (field.stored_discriminant().abs() as f64).powf(-(self.n as f64) / 2.0);
        Ok(disc * self.finite_volume(field)? * self.region.volume(nd))
    }

    /// ∏ π_℘^{e_℘}, the generator of the finite integrality condition.
    fn condition_generator(&self, field: &NumberField) -> Result<FieldElement> {
        let mut g = field.one();
        for (p, e) in &self.conditions {
            let pi = p.generator()?;
            g = field.mul(&g, &field.pow(pi, *e as i64)?);
        }
        Ok(g)
    }
}

/// A degree-one prime above p carrying its generator.
pub fn degree_one_prime(field: &NumberField, p: u64) -> Result<PrimeIdeal> {
    field.principal_prime_above(p)
}

/// One row of a convergence report.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub suite: String,
    pub field: String,
    pub n: usize,
    pub q: u64,
    pub average: f64,
    pub target: f64,
    pub gap: f64,
    pub seconds: f64,
}

impl ConvergenceRow {
    pub fn relative_gap(&self) -> f64 {
        if self.target == 0.0 {
            self.gap
        } else {
            self.gap / self.target.abs()
        }
    }
}

/// Rows plus the monotonicity of the gap column.
#[derive(Debug, Clone, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn gaps_decrease(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap < w[0].gap)
    }
}

/// The family q^{−1/(nd)}·ρ(Λ_γ ∩ f's finite conditions) over all γ.
pub fn hecke_family(
    field: &NumberField,
    n: usize,
    f: &AdelicTestFunction,
    prime: &PrimeIdeal,
) -> Result<Vec<EmbeddedLattice>> {
    if n < 2 {
        return Err(Error::Domain("the sublattice family needs n ≥ 2".into()));
    }
    if f.n != n {
        return Err(Error::Domain("test function has the wrong dimension".into()));
    }
    if f.shift.is_some() {
        return Err(Error::Config("Hecke averages are implemented for unshifted test functions".into()));
    }
    if f.support(field).contains(&prime.p) {
        return Err(Error::Precondition(format!("prime over {} meets the support of f", prime.p)));
    }
    let g = f.condition_generator(field)?;
    let scale = (prime.norm as f64).powf(-1.0 / (n * field.degree()) as f64);
    sublattice_bases(field, n, prime)?
        .into_par_iter()
        .map(|b| {
            let mut b = b;
            for row in b.matrix.iter_mut() {
                for x in row.iter_mut() {
                    *x = field.mul(&g, x);
                }
            }
            let lat = EmbeddedLattice::from_field_coordinates(field, n, b.z_basis(field), 1, None)?;
            Ok(lat.scaled(scale).reduced())
        })
        .collect()
}

/// Average, closed-form target and their gap.
#[derive(Debug, Clone, Copy)]
pub struct HeckeAverage {
    pub average: f64,
    pub target: f64,
    pub family_size: u64,
}

impl HeckeAverage {
    pub fn gap(&self) -> f64 {
        (self.average - self.target).abs()
    }

    pub fn relative_gap(&self) -> f64 {
        if self.target == 0.0 {
            self.gap()
        } else {
            self.gap() / self.target.abs()
        }
    }
}

/// (1/|𝓛|)·Σ_γ #{x ∈ q^{−1/(nd)}ρ(Λ_γ) ∖ 0 : x ∈ region}, with the origin
/// counted too when `include_origin` is set (then the target gains f(0)).
pub fn siegel_hecke_average(
    field: &NumberField,
    n: usize,
    f: &AdelicTestFunction,
    prime: &PrimeIdeal,
    include_origin: bool,
) -> Result<HeckeAverage> {
    let fam = hecke_family(field, n, f, prime)?;
    let counts: Result<Vec<u64>> = fam
        .par_iter()
        .map(|lat| {
            let mut c = 0u64;
            lat.for_each_point(&f.region, &Default::default(), |p| {
                if include_origin || p.exact.iter().any(|&v| v != 0) {
                    c += 1;
                }
            })?;
            Ok(c)
        })
        .collect();
    let total: u64 = counts?.iter().sum();
    let mut target = f.volume(field)?;
    if include_origin && f.region.contains(&vec![0.0; n * field.degree()], 0.0) {
        target += 1.0;
    }
    Ok(HeckeAverage { average: total as f64 / fam.len() as f64, target, family_size: fam.len() as u64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    IndependentPairs,
    FullSquare,
}

/// Closed membership, using the exact norm for radial regions.
fn member(region: &Region, p: &crate::lattices::PointRef) -> bool {
    match region.radial_window() {
        Some((lo, hi)) => p.norm_sq >= lo - PAD * lo.max(1.0) && p.norm_sq <= hi + PAD * hi.max(1.0),
        None => region.contains(p.coords, PAD),
    }
}

/// Canonical label of the F-line through a nonzero vector.
fn line_key(field: &NumberField, n: usize, exact: &[i64]) -> Vec<FieldElement> {
    let d = field.degree();
    let xs: Vec<FieldElement> = (0..n).map(|j| field.element(&exact[j * d..(j + 1) * d])).collect();
    let lead = xs.iter().find(|x| !x.is_zero()).expect("nonzero vector").clone();
    let inv = field.inv(&lead).expect("nonzero");
    xs.iter().map(|x| field.mul(x, &inv)).collect()
}

/// Hecke average of Σ_{x,y independent} f1(x)f2(y), or of (Σ_{x≠0} f1(x))²
/// in full-square mode.
pub fn rogers_pair_average(
    field: &NumberField,
    n: usize,
    f1: &AdelicTestFunction,
    f2: &AdelicTestFunction,
    prime: &PrimeIdeal,
    mode: PairMode,
) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain("pair averages need n ≥ 3".into()));
    }
    if !f1.conditions.is_empty() || !f2.conditions.is_empty() {
        return Err(Error::Config("pair averages are implemented at level one".into()));
    }
    let fam = hecke_family(field, n, f1, prime)?;
    hecke_family(field, n, f2, prime)?;
    let outer = Region::ball(f1.region.bounding_radius().max(f2.region.bounding_radius()))?;
    let sums: Result<Vec<f64>> = fam
        .par_iter()
        .map(|lat| {
            let (mut s1, mut s2) = (0u64, 0u64);
            let mut lines: HashMap<Vec<FieldElement>, (u64, u64)> = HashMap::new();
            lat.for_each_point(&outer, &Default::default(), |p| {
                if p.exact.iter().all(|&v| v == 0) {
                    return;
                }
                let a = member(&f1.region, p) as u64;
                let b = member(&f2.region, p) as u64;
                if a + b == 0 {
                    return;
                }
                s1 += a;
                s2 += b;
                if mode == PairMode::IndependentPairs {
                    let e = lines.entry(line_key(field, n, p.exact)).or_insert((0, 0));
                    e.0 += a;
                    e.1 += b;
                }
            })?;
            Ok(match mode {
                PairMode::FullSquare => (s1 * s1) as f64,
                PairMode::IndependentPairs => {
                    let dependent: u64 = lines.values().map(|(a, b)| a * b).sum();
                    (s1 * s2 - dependent) as f64
                }
            })
        })
        .collect();
    let sums = sums?;
    Ok(sums.iter().sum::<f64>() / sums.len() as f64)
}

/// Runs the Siegel average for several primes and reports the gaps.
pub fn siegel_convergence(
    field: &NumberField,
    n: usize,
    f: &AdelicTestFunction,
    primes: &[PrimeIdeal],
) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::default();
    for p in primes {
        let t0 = Instant::now();
        let a = siegel_hecke_average(field, n, f, p, false)?;
        report.rows.push(ConvergenceRow {
            suite: "siegel".into(),
            field: field.label().to_string(),
            n,
            q: p.norm,
            average: a.average,
            target: a.target,
            gap: a.gap(),
            seconds: t0.elapsed().as_secs_f64(),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ball_volume;

    #[test]
    fn volumes() {
        let q = NumberField::rational();
        let f = AdelicTestFunction::level_one(3, Region::ball(2.0).unwrap());
        assert!((f.volume(&q).unwrap() - 4.0 / 3.0 * std::f64::consts::PI * 8.0).abs() < 1e-9);
        let g = NumberField::quadratic(-1).unwrap();
        let f = AdelicTestFunction::level_one(2, Region::ball(1.0).unwrap());
        assert!((f.volume(&g).unwrap() - ball_volume(4) / 4.0).abs() < 1e-12);
        let p = degree_one_prime(&q, 3).unwrap();
        let f = AdelicTestFunction::level_one(2, Region::ball(1.0).unwrap()).with_condition(p, 1);
        assert!((f.volume(&q).unwrap() - std::f64::consts::PI / 9.0).abs() < 1e-12);
    }

    #[test]
    fn volume_matches_point_density() {
        // count in a large ball of the finite-condition lattice ≈ α-volume
        for (m, n, r) in [(0i64, 2usize, 60.0), (-1, 2, 14.0), (2, 2, 24.0)] {
            let field = if m == 0 { NumberField::rational() } else { NumberField::quadratic(m).unwrap() };
            let p = degree_one_prime(&field, if m == 0 { 3 } else { 7 }).unwrap_or_else(|_| degree_one_prime(&field, 5).unwrap());
            let f = AdelicTestFunction::level_one(n, Region::ball(r).unwrap()).with_condition(p.clone(), 1);
            let g = f.condition_generator(&field).unwrap();
            let gens: Vec<Vec<FieldElement>> =
                (0..n).map(|i| (0..n).map(|j| if i == j { g.clone() } else { field.zero() }).collect()).collect();
            let lat = crate::lattices::lattice_from_module(&crate::lattices::ModuleDescription::new(&field, gens)).unwrap();
            let c = lat.count_points(&f.region, crate::lattices::PointFilter::None).unwrap() as f64;
            let v = f.volume(&field).unwrap();
            assert!(c > 1e3, "too few points ({c}) for field {m}");
            assert!((c - v).abs() / v < 0.02, "field {m}: count {c} vs volume {v}");
        }
    }

    #[test]
    fn siegel_small_and_empty() {
        let q = NumberField::rational();
        let p = degree_one_prime(&q, 11).unwrap();
        let f = AdelicTestFunction::level_one(2, Region::Empty);
        assert_eq!(siegel_hecke_average(&q, 2, &f, &p, false).unwrap().average, 0.0);
        let f = AdelicTestFunction::level_one(2, Region::ball(3.0).unwrap());
        let a = siegel_hecke_average(&q, 2, &f, &p, false).unwrap();
        assert_eq!(a.family_size, 12);
        assert!(a.relative_gap() < 0.2, "{a:?}");
        let b = siegel_hecke_average(&q, 2, &f, &p, true).unwrap();
        assert!((b.average - a.average - 1.0).abs() < 1e-12);
        assert!((b.target - a.target - 1.0).abs() < 1e-12);
    }

    #[test]
    fn siegel_rejects_support_primes() {
        let q = NumberField::rational();
        let p = degree_one_prime(&q, 5).unwrap();
        let f = AdelicTestFunction::level_one(2, Region::ball(1.0).unwrap()).with_condition(p.clone(), 1);
        assert!(matches!(siegel_hecke_average(&q, 2, &f, &p, false), Err(Error::Precondition(_))));
    }

    #[test]
    fn siegel_gap_shrinks_over_q() {
        let q = NumberField::rational();
        let f = AdelicTestFunction::level_one(2, Region::ball(4.0).unwrap());
        let primes: Vec<PrimeIdeal> = [11, 101, 1009].iter().map(|&p| degree_one_prime(&q, p).unwrap()).collect();
        let r = siegel_convergence(&q, 2, &f, &primes).unwrap();
        assert!(r.gaps_decrease(), "{r:?}");
    }

    #[test]
    fn pair_average_trivialities() {
        let q = NumberField::rational();
        let p = degree_one_prime(&q, 5).unwrap();
        let f1 = AdelicTestFunction::level_one(3, Region::ball(1.5).unwrap());
        let f2 = AdelicTestFunction::level_one(3, Region::Empty);
        assert_eq!(rogers_pair_average(&q, 3, &f1, &f2, &p, PairMode::IndependentPairs).unwrap(), 0.0);
    }

    #[test]
    fn independent_pairs_on_z3() {
        // q = 2, ball of radius 1.01 scaled by 2^{1/3}: check against a direct
        // count of independent pairs on one lattice
        let lat = EmbeddedLattice::integer(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let pts = lat.enumerate_points(&Region::ball(1.5).unwrap()).unwrap();
        let nz: Vec<&Vec<i64>> = pts.iter().map(|p| &p.exact).filter(|e| e.iter().any(|&v| v != 0)).collect();
        let mut indep = 0;
        for x in &nz {
            for y in &nz {
                let cross = [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]];
                if cross.iter().any(|&c| c != 0) {
                    indep += 1;
                }
            }
        }
        let q = NumberField::rational();
        let mut lines: HashMap<Vec<FieldElement>, u64> = HashMap::new();
        for x in &nz {
            *lines.entry(line_key(&q, 3, x)).or_insert(0) += 1;
        }
        let dep: u64 = lines.values().map(|c| c * c).sum();
        assert_eq!(indep, (nz.len() * nz.len()) as u64 - dep);
    }
}
