//! 𝒪_F-modules realised as lattices in ℝ^{nd}: covolumes, point
//! enumeration in regions, and Riemann sums.

pub mod embedding;
mod enumerate;
mod region;
mod riemann;

pub use enumerate::{content_norm, EnumerationLimits, LatticePoint, PointFilter, PointRef, PAD};
pub use region::Region;
pub use riemann::{riemann_sum, riemann_sum_with};

use crate::error::{Error, Result};
use crate::intmat;
use crate::numberfield::{FieldElement, NumberField};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Generators of an 𝒪_F-submodule of F^n: the module is Σ_r 𝒪_F·α_r·x_r.
#[derive(Debug, Clone)]
pub struct ModuleDescription {
    pub field: NumberField,
    pub n: usize,
    pub generators: Vec<Vec<FieldElement>>,
    pub row_scales: Option<Vec<FieldElement>>,
}

impl ModuleDescription {
    pub fn new(field: &NumberField, generators: Vec<Vec<FieldElement>>) -> Self {
        let n = generators.first().map_or(0, |r| r.len());
        Self { field: field.clone(), n, generators, row_scales: None }
    }

    /// The standard module 𝒪_F^n.
    pub fn standard(field: &NumberField, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| field.int((i == j) as i64)).collect())
            .collect();
        Self::new(field, rows)
    }

    pub fn with_row_scales(mut self, scales: Vec<FieldElement>) -> Self {
        self.row_scales = Some(scales);
        self
    }
}

/// Where a lattice came from; module lattices remember their field so that
/// content and independence can be decided exactly.
#[derive(Debug, Clone)]
pub enum Provenance {
    Integer,
    Real,
    Module { field: NumberField, n: usize },
}

/// A full-rank (or lower-rank) lattice with an exact integer description.
///
/// Points are `(c · exact_basis / denom) · ambient_map · scale` for integer
/// row vectors `c`. When the ambient map has an integral Gram matrix, norms
/// are also available exactly.
#[derive(Debug, Clone)]
pub struct EmbeddedLattice {
    exact_basis: Vec<Vec<i64>>,
    denom: i64,
    ambient_map: Vec<Vec<f64>>,
    ambient_gram: Option<Vec<Vec<i64>>>,
    scale: f64,
    basis: Vec<Vec<f64>>,
    covolume: f64,
    provenance: Provenance,
}

fn apply_map(exact: &[i64], denom: i64, map: &[Vec<f64>], scale: f64) -> Vec<f64> {
    let dim = map.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; dim];
    for (c, row) in exact.iter().zip(map) {
        if *c == 0 {
            continue;
        }
        let c = *c as f64;
        for (o, m) in out.iter_mut().zip(row) {
            *o += c * m;
        }
    }
    let f = scale / denom as f64;
    out.iter_mut().for_each(|x| *x *= f);
    out
}

fn gram_f64(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|a| rows.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect()
}

impl EmbeddedLattice {
    pub fn new(
        exact_basis: Vec<Vec<i64>>,
        denom: i64,
        ambient_map: Vec<Vec<f64>>,
        ambient_gram: Option<Vec<Vec<i64>>>,
        provenance: Provenance,
    ) -> Result<Self> {
        if denom <= 0 {
            return Err(Error::Domain("denominator must be positive".into()));
        }
        let basis: Vec<Vec<f64>> = exact_basis
            .iter()
            .map(|c| apply_map(c, denom, &ambient_map, 1.0))
            .collect();
        let mut lat = Self {
            exact_basis,
            denom,
            ambient_map,
            ambient_gram,
            scale: 1.0,
            basis,
            covolume: 0.0,
            provenance,
        };
        lat.covolume = lat.compute_covolume();
        if !(lat.covolume > 0.0) {
            return Err(Error::Degeneracy("basis vectors are linearly dependent".into()));
        }
        Ok(lat)
    }

    /// Sublattice of ℤ^m spanned by integer rows.
    pub fn integer(basis: Vec<Vec<i64>>) -> Result<Self> {
        let m = basis.first().map_or(0, |r| r.len());
        let id: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| (i == j) as i64).collect()).collect();
        let map = id.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        Self::new(basis, 1, map, Some(id), Provenance::Integer)
    }

    /// Lattice spanned by arbitrary real rows.
    pub fn from_real_basis(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        let id = (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect();
        Self::new(id, 1, rows, None, Provenance::Real)
    }

    /// ρ of the module with the given ℤ-basis of 𝒪_F^n-coordinates
    /// (divided by `denom`), optionally twisted at the infinite places.
    pub fn from_field_coordinates(
        field: &NumberField,
        n: usize,
        exact_basis: Vec<Vec<i64>>,
        denom: i64,
        twist: Option<&[Vec<Vec<num_complex::Complex64>>]>,
    ) -> Result<Self> {
        let map = embedding::ambient_map(field, n);
        let (map, gram) = match twist {
            Some(g) => (embedding::twist_rows(field, n, &map, g), None),
            None => (map, embedding::ambient_gram(field, n)),
        };
        Self::new(
            exact_basis,
            denom,
            map,
            gram,
            Provenance::Module { field: field.clone(), n },
        )
    }

    /// ρ(𝒪_F^n).
    pub fn standard(field: &NumberField, n: usize) -> Result<Self> {
        let m = n * field.degree();
        let id = (0..m).map(|i| (0..m).map(|j| (i == j) as i64).collect()).collect();
        Self::from_field_coordinates(field, n, id, 1, None)
    }

    /// The same lattice multiplied by a positive scalar.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale *= s;
        out.basis.iter_mut().flatten().for_each(|x| *x *= s);
        out.covolume *= s.powi(self.rank() as i32);
        out
    }

    pub fn dim(&self) -> usize {
        self.ambient_map.first().map_or(0, |r| r.len())
    }

    pub fn rank(&self) -> usize {
        self.exact_basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn exact_basis(&self) -> &[Vec<i64>] {
        &self.exact_basis
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn ambient_map(&self) -> &[Vec<f64>] {
        &self.ambient_map
    }

    pub fn ambient_gram(&self) -> Option<&[Vec<i64>]> {
        self.ambient_gram.as_deref()
    }

    /// Real coordinates of the point with exact coordinates `c / denom`.
    pub fn point(&self, exact: &[i64]) -> Vec<f64> {
        apply_map(exact, self.denom, &self.ambient_map, self.scale)
    }

    /// `c^T G c` for the ambient Gram matrix (unscaled, times denom²).
    pub fn exact_norm(&self, exact: &[i64]) -> Option<i128> {
        let g = self.ambient_gram.as_ref()?;
        let mut s: i128 = 0;
        for (i, ci) in exact.iter().enumerate() {
            if *ci == 0 {
                continue;
            }
            let mut t: i128 = 0;
            for (j, cj) in exact.iter().enumerate() {
                if *cj != 0 && g[i][j] != 0 {
                    t += g[i][j] as i128 * *cj as i128;
                }
            }
            s += *ci as i128 * t;
        }
        Some(s)
    }

    /// Exact Gram matrix of the basis, times denom², when available.
    pub fn exact_gram(&self) -> Option<Vec<Vec<BigInt>>> {
        let g = intmat::to_big(self.ambient_gram.as_ref()?);
        let b = intmat::to_big(&self.exact_basis);
        Some(intmat::mat_mul(&intmat::mat_mul(&b, &g), &intmat::transpose(&b)))
    }

    fn compute_covolume(&self) -> f64 {
        let k = self.rank() as i32;
        if let Some(g) = self.exact_gram() {
            let det = intmat::det(&g);
            if det.is_zero() {
                return 0.0;
            }
            let d = det.to_f64().unwrap().sqrt();
            return d * (self.scale / self.denom as f64).powi(k);
        }
        let det = crate::special::det_f64(gram_f64(&self.basis));
        if det <= 0.0 {
            return 0.0;
        }
        det.sqrt()
    }

    /// Replaces the basis by an LLL-reduced one spanning the same lattice.
    pub fn reduced(&self) -> Self {
        let mut out = self.clone();
        enumerate::lll_reduce(&mut out.basis, &mut out.exact_basis, 0.99);
        out.basis = out
            .exact_basis
            .iter()
            .map(|c| apply_map(c, out.denom, &out.ambient_map, out.scale))
            .collect();
        out
    }

    /// Length of a shortest nonzero vector.
    pub fn shortest_vector_length(&self) -> Result<f64> {
        let red = self.reduced();
        let r = red
            .basis
            .iter()
            .map(|b| b.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min);
        let mut best = f64::INFINITY;
        red.for_each_point(&Region::ball(r)?, &EnumerationLimits::default(), |p| {
            if p.norm_sq > 0.0 {
                best = best.min(p.norm_sq);
            }
        })?;
        Ok(best.sqrt())
    }
}

/// ρ(M) for an 𝒪_F-module M given by generators.
pub fn lattice_from_module(desc: &ModuleDescription) -> Result<EmbeddedLattice> {
    let field = &desc.field;
    let d = field.degree();
    let n = desc.n;
    if desc.generators.iter().any(|r| r.len() != n) {
        return Err(Error::Domain("generator rows have inconsistent length".into()));
    }
    // ℤ-generators ω_t·α_r·x_r in rational coordinates
    let mut gens: Vec<Vec<num_rational::BigRational>> = Vec::new();
    for (r, row) in desc.generators.iter().enumerate() {
        let row: Vec<FieldElement> = match &desc.row_scales {
            Some(s) => row.iter().map(|x| field.mul(&s[r], x)).collect(),
            None => row.clone(),
        };
        for t in 0..d {
            let mut wt = vec![0i64; d];
            wt[t] = 1;
            let w = FieldElement::from_ints(&wt);
            let mut v = Vec::with_capacity(n * d);
            for x in &row {
                v.extend(field.mul(&w, x).coords().iter().cloned());
            }
            gens.push(v);
        }
    }
    let l = gens
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|v| v.iter().map(|c| (c * &l).to_integer()).collect())
        .collect();
    let h = intmat::hnf(&ints);
    if h.len() != n * d {
        return Err(Error::Degeneracy(format!(
            "module has rank {} over ℤ, expected {}",
            h.len(),
            n * d
        )));
    }
    let basis = intmat::to_i64(&h).ok_or_else(|| Error::Resource("coordinates exceed i64".into()))?;
    let denom = l.to_i64().ok_or_else(|| Error::Resource("denominator exceeds i64".into()))?;
    EmbeddedLattice::from_field_coordinates(field, n, basis, denom, None)
}

/// Covolume predicted from the finite-place density: |Δ|^{n/2}·[𝒪^n : M]
/// computed from the exact basis determinant.
pub fn density_covolume(lat: &EmbeddedLattice, field: &NumberField, n: usize) -> f64 {
    let det = intmat::det_i64(lat.exact_basis()).abs();
    let index = det.to_f64().unwrap() / (lat.denom() as f64).powi((n * field.degree()) as i32);
    (field.stored_discriminant().abs() as f64).powf(n as f64 / 2.0) * index * lat.scale().powi((n * field.degree()) as i32)
}
