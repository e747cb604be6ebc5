//! Exact arithmetic and invariants of the base field: embeddings, the Log
//! map, norms, discriminant, units, Dedekind zeta values and prime ideals.

mod element;
mod primes;
mod spec_file;
mod units;
mod zeta;

pub use element::{format_rational, parse_rational, FieldElement};
pub use primes::{PrimeIdeal, SplittingType, DEFAULT_PRIME_SEARCH_BOUND};
pub use spec_file::parse_field_spec;
pub use units::fundamental_unit_quadratic;
pub use zeta::{dedekind_zeta, dedekind_zeta_truncated, ZetaValue};

use crate::error::{Error, Result};
use crate::ratmat::{self, RatMatrix};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Imaginary quadratic radicands with class number one.
pub const IMAGINARY_CLASS_NUMBER_ONE: [i64; 9] = [-1, -2, -3, -7, -11, -19, -43, -67, -163];

/// Squarefree radicands 1 < m < 100 with ℚ(√m) of class number one.
pub const REAL_CLASS_NUMBER_ONE: [i64; 38] = [
    2, 3, 5, 6, 7, 11, 13, 14, 17, 19, 21, 22, 23, 29, 31, 33, 37, 38, 41, 43, 46, 47, 53, 57, 59,
    61, 62, 67, 69, 71, 73, 77, 83, 86, 89, 93, 94, 97,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    /// ℚ(√m) with the standard integral basis {1, ω}.
    Quadratic { m: i64 },
    /// Supplied entirely by a field spec file.
    Custom,
}

/// Exact field data: integral basis multiplication table, embeddings,
/// discriminant, and unit and class group invariants.
#[derive(Debug, Clone)]
pub struct NumberField {
    label: String,
    kind: FieldKind,
    degree: usize,
    r1: usize,
    r2: usize,
    /// `mult[i][j][k]`: coefficient of ω_k in ω_i·ω_j.
    mult: Vec<Vec<Vec<i64>>>,
    /// `emb[p][j]` = σ_p(ω_j), real places first.
    emb: Vec<Vec<Complex64>>,
    discriminant: i64,
    class_number: u32,
    roots_of_unity: u32,
    units: Vec<FieldElement>,
    regulator: f64,
}

fn is_squarefree(m: i64) -> bool {
    let a = m.unsigned_abs();
    let mut d = 2u64;
    while d * d <= a {
        if a.is_multiple_of(d * d) {
            return false;
        }
        d += 1;
    }
    true
}

impl NumberField {
    pub fn rational() -> Self {
        Self {
            label: "Q".into(),
            kind: FieldKind::Rational,
            degree: 1,
            r1: 1,
            r2: 0,
            mult: vec![vec![vec![1]]],
            emb: vec![vec![Complex64::new(1.0, 0.0)]],
            discriminant: 1,
            class_number: 1,
            roots_of_unity: 2,
            units: Vec::new(),
            regulator: 1.0,
        }
    }

    /// The built-in quadratic field ℚ(√m); m must be a supported radicand.
    pub fn quadratic(m: i64) -> Result<Self> {
        if !IMAGINARY_CLASS_NUMBER_ONE.contains(&m) && !REAL_CLASS_NUMBER_ONE.contains(&m) {
            return Err(Error::Config(format!(
                "Q(sqrt({m})) is not a built-in class-number-one field; supply a field spec"
            )));
        }
        Self::quadratic_with(m, 1, None, None)
    }

    pub(crate) fn quadratic_with(
        m: i64,
        class_number: u32,
        roots_of_unity: Option<u32>,
        regulator: Option<f64>,
    ) -> Result<Self> {
        if m == 0 || m == 1 || !is_squarefree(m) {
            return Err(Error::Config(format!("radicand {m} is not a squarefree integer ≠ 0, 1")));
        }
        let one_mod_four = m.rem_euclid(4) == 1;
        let (mult_w, discriminant) = if one_mod_four {
            (vec![(m - 1) / 4, 1], m)
        } else {
            (vec![m, 0], 4 * m)
        };
        let mult = vec![
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![0, 1], mult_w],
        ];
        let root = (m.abs() as f64).sqrt();
        let (r1, r2, emb) = if m > 0 {
            let w = |s: f64| if one_mod_four { (1.0 + s * root) / 2.0 } else { s * root };
            let one = Complex64::new(1.0, 0.0);
            (
                2,
                0,
                vec![
                    vec![one, Complex64::new(w(1.0), 0.0)],
                    vec![one, Complex64::new(w(-1.0), 0.0)],
                ],
            )
        } else {
            let w = if one_mod_four {
                Complex64::new(0.5, root / 2.0)
            } else {
                Complex64::new(0.0, root)
            };
            (0, 1, vec![vec![Complex64::new(1.0, 0.0), w]])
        };
        let label = match m {
            -1 => "Q(i)".to_string(),
            _ => format!("Q(sqrt({m}))"),
        };
        let w_default = match m {
            -1 => 4,
            -3 => 6,
            _ => 2,
        };
        let mut field = Self {
            label,
            kind: FieldKind::Quadratic { m },
            degree: 2,
            r1,
            r2,
            mult,
            emb,
            discriminant,
            class_number,
            roots_of_unity: roots_of_unity.unwrap_or(w_default),
            units: Vec::new(),
            regulator: 1.0,
        };
        if m > 0 {
            let eps = fundamental_unit_quadratic(&field)?;
            field.units = vec![eps];
        }
        field.regulator = match regulator {
            Some(r) => r,
            None => field.unit_regulator(),
        };
        Ok(field)
    }

    /// Parses labels such as `Q`, `Q(i)`, `Q(sqrt2)`, `Q(sqrt(-7))`.
    pub fn from_label(label: &str) -> Result<Self> {
        let s: String = label.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "Q" || s == "QQ" {
            return Ok(Self::rational());
        }
        if s == "Q(i)" {
            return Self::quadratic(-1);
        }
        let inner = s
            .strip_prefix("Q(sqrt")
            .and_then(|r| r.strip_suffix(')'))
            .map(|r| r.trim_start_matches('(').trim_end_matches(')'));
        match inner.and_then(|r| r.parse::<i64>().ok()) {
            Some(m) => Self::quadratic(m),
            None => Err(Error::Config(format!("unrecognised field label '{label}'"))),
        }
    }

    /// Builds a field from explicit data, validating every stored invariant.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        label: String,
        r1: usize,
        r2: usize,
        mult: Vec<Vec<Vec<i64>>>,
        emb: Vec<Vec<Complex64>>,
        discriminant: i64,
        class_number: u32,
        roots_of_unity: u32,
        units: Vec<FieldElement>,
        regulator: Option<f64>,
    ) -> Result<Self> {
        let degree = mult.len();
        if r1 + 2 * r2 != degree || emb.len() != r1 + r2 {
            return Err(Error::Config("signature does not match degree".into()));
        }
        if mult.iter().any(|r| r.len() != degree || r.iter().any(|c| c.len() != degree))
            || emb.iter().any(|e| e.len() != degree)
        {
            return Err(Error::Config("basis table dimensions are inconsistent".into()));
        }
        if units.len() != r1 + r2 - 1 || units.iter().any(|u| u.degree() != degree) {
            return Err(Error::Config(format!("expected {} fundamental units", r1 + r2 - 1)));
        }
        let mut field = Self {
            label,
            kind: FieldKind::Custom,
            degree,
            r1,
            r2,
            mult,
            emb,
            discriminant,
            class_number,
            roots_of_unity,
            units,
            regulator: 1.0,
        };
        for u in &field.units {
            if !u.is_integral() || field.norm(u)?.abs() != BigRational::from_integer(1.into()) {
                return Err(Error::Integrity(format!("{u} is not a unit")));
            }
        }
        field.check_discriminant()?;
        field.regulator = regulator.unwrap_or_else(|| field.unit_regulator());
        Ok(field)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.r1, self.r2)
    }

    pub fn places(&self) -> usize {
        self.r1 + self.r2
    }

    pub fn is_real_place(&self, p: usize) -> bool {
        p < self.r1
    }

    /// Local degree e_σ: 1 at real places, 2 at complex ones.
    pub fn local_degree(&self, p: usize) -> usize {
        if self.is_real_place(p) {
            1
        } else {
            2
        }
    }

    pub fn unit_rank(&self) -> usize {
        self.r1 + self.r2 - 1
    }

    pub fn class_number(&self) -> u32 {
        self.class_number
    }

    pub fn roots_of_unity(&self) -> u32 {
        self.roots_of_unity
    }

    pub fn fundamental_units(&self) -> &[FieldElement] {
        &self.units
    }

    pub fn regulator(&self) -> f64 {
        self.regulator
    }

    pub fn stored_discriminant(&self) -> i64 {
        self.discriminant
    }

    /// Radicand m for quadratic fields.
    pub fn radicand(&self) -> Option<i64> {
        match self.kind {
            FieldKind::Quadratic { m } => Some(m),
            _ => None,
        }
    }

    pub fn mult_table(&self) -> &[Vec<Vec<i64>>] {
        &self.mult
    }

    /// σ_p(ω_j) for each place p.
    pub fn basis_embeddings(&self) -> &[Vec<Complex64>] {
        &self.emb
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(self.degree)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::one(self.degree)
    }

    pub fn int(&self, c: i64) -> FieldElement {
        FieldElement::from_int(self.degree, c)
    }

    /// Element from integer coordinates in the integral basis.
    pub fn element(&self, coords: &[i64]) -> FieldElement {
        assert_eq!(coords.len(), self.degree);
        FieldElement::from_ints(coords)
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let d = self.degree;
        let mut out = vec![BigRational::zero(); d];
        for i in 0..d {
            if x.coords()[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y.coords()[j].is_zero() {
                    continue;
                }
                let xy = &x.coords()[i] * &y.coords()[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.mult[i][j][k];
                    if c != 0 {
                        *o += &xy * BigRational::from_integer(BigInt::from(c));
                    }
                }
            }
        }
        FieldElement::new(out)
    }

    /// Integer product of integral elements given by coordinates.
    pub fn mul_int(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let d = self.degree;
        let mut out = vec![0i64; d];
        for i in 0..d {
            if x[i] == 0 {
                continue;
            }
            for j in 0..d {
                if y[j] == 0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += x[i] * y[j] * self.mult[i][j][k];
                }
            }
        }
        out
    }

    /// Matrix of multiplication by x: column j holds the coordinates of x·ω_j.
    pub fn mult_matrix(&self, x: &FieldElement) -> RatMatrix {
        let d = self.degree;
        let mut m = vec![vec![BigRational::zero(); d]; d];
        for j in 0..d {
            let mut wj = vec![0i64; d];
            wj[j] = 1;
            let col = self.mul(x, &FieldElement::from_ints(&wj));
            for i in 0..d {
                m[i][j] = col.coords()[i].clone();
            }
        }
        m
    }

    /// Field norm N_{F/ℚ}(x), exactly, as the determinant of multiplication.
    pub fn norm(&self, x: &FieldElement) -> Result<BigRational> {
        if x.is_zero() {
            return Err(Error::Domain("norm of zero".into()));
        }
        Ok(ratmat::det(&self.mult_matrix(x)))
    }

    /// Ideal norm of the principal ideal (x).
    pub fn ideal_norm(&self, x: &FieldElement) -> Result<BigRational> {
        Ok(self.norm(x)?.abs())
    }

    /// Exact norm of an integral element given by integer coordinates.
    pub fn norm_int(&self, x: &[i64]) -> i128 {
        match self.degree {
            1 => x[0] as i128,
            2 => {
                // N(a + bω) = a² + ab·tr(ω) + b²·N(ω)
                let c0 = self.mult[1][1][0] as i128;
                let c1 = self.mult[1][1][1] as i128;
                let (a, b) = (x[0] as i128, x[1] as i128);
                a * a + a * b * c1 - b * b * c0
            }
            _ => {
                let n = self.norm(&FieldElement::from_ints(x)).expect("nonzero");
                n.to_integer().to_i128().expect("norm fits in i128")
            }
        }
    }

    pub fn trace(&self, x: &FieldElement) -> BigRational {
        let m = self.mult_matrix(x);
        (0..self.degree).map(|i| m[i][i].clone()).sum()
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let mut e = vec![BigRational::zero(); self.degree];
        e[0] = BigRational::from_integer(1.into());
        let y = ratmat::solve(&self.mult_matrix(x), &e)
            .ok_or_else(|| Error::Integrity("multiplication matrix is singular".into()))?;
        Ok(FieldElement::new(y))
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &FieldElement, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv(x)? } else { x.clone() };
        let mut out = self.one();
        for _ in 0..e.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        Ok(out)
    }

    /// Galois conjugate in a quadratic field.
    pub fn conjugate(&self, x: &FieldElement) -> Option<FieldElement> {
        if self.degree != 2 || matches!(self.kind, FieldKind::Custom) {
            return None;
        }
        // conj(ω) = tr(ω) − ω
        let t = BigRational::from_integer(BigInt::from(self.mult[1][1][1]));
        let a = &x.coords()[0] + &x.coords()[1] * &t;
        Some(FieldElement::new(vec![a, -x.coords()[1].clone()]))
    }

    /// (σ_1(x), …, σ_{r1+r2}(x)) with real places first.
    pub fn embed(&self, x: &FieldElement) -> Vec<Complex64> {
        let xf = x.to_f64();
        let mut out: Vec<Complex64> = self
            .emb
            .iter()
            .map(|e| e.iter().zip(&xf).map(|(w, c)| w * *c).sum())
            .collect();
        // the smaller real conjugate suffers cancellation; recover it from the norm
        if self.degree == 2 && self.r1 == 2 && !x.is_zero() {
            let big = if out[0].re.abs() >= out[1].re.abs() { 0 } else { 1 };
            let n = self.norm(x).ok().and_then(|v| v.to_f64()).unwrap_or(f64::NAN);
            out[1 - big] = Complex64::new(n / out[big].re, 0.0);
        }
        out
    }

    pub fn embed_ints(&self, x: &[i64]) -> Vec<Complex64> {
        self.emb
            .iter()
            .map(|e| e.iter().zip(x).map(|(w, &c)| w * c as f64).sum())
            .collect()
    }

    /// Squared length of ρ(x) over all d embeddings.
    pub fn embedding_length_sq(&self, x: &FieldElement) -> f64 {
        self.embed(x)
            .iter()
            .enumerate()
            .map(|(p, z)| self.local_degree(p) as f64 * z.norm_sqr())
            .sum()
    }

    /// Log map: log|σ(x)| at real places, 2·log|σ(x)| at complex places.
    pub fn log_embed(&self, x: &FieldElement) -> Result<Vec<f64>> {
        if x.is_zero() {
            return Err(Error::Domain("Log of zero".into()));
        }
        Ok(self
            .embed(x)
            .iter()
            .enumerate()
            .map(|(p, z)| self.local_degree(p) as f64 * z.norm().ln())
            .collect())
    }

    /// Discriminant recomputed from the embeddings and checked against the
    /// stored value.
    pub fn discriminant(&self) -> Result<i64> {
        self.check_discriminant()?;
        Ok(self.discriminant)
    }

    /// Square of the determinant of the full d×d embedding matrix.
    pub fn embedding_discriminant(&self) -> f64 {
        let d = self.degree;
        let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(d);
        for (p, e) in self.emb.iter().enumerate() {
            rows.push(e.clone());
            if !self.is_real_place(p) {
                rows.push(e.iter().map(|z| z.conj()).collect());
            }
        }
        let det = complex_det(rows);
        (det * det).re
    }

    fn check_discriminant(&self) -> Result<()> {
        let got = self.embedding_discriminant();
        let want = self.discriminant as f64;
        if (got - want).abs() > 1e-6 * want.abs().max(1.0) {
            return Err(Error::Integrity(format!(
                "discriminant {} disagrees with embeddings ({got})",
                self.discriminant
            )));
        }
        Ok(())
    }

    /// Covolume of Log of the fundamental units in the trace-zero
    /// hyperplane; 1 when the unit rank is zero.
    pub fn unit_regulator(&self) -> f64 {
        let r = self.unit_rank();
        if r == 0 {
            return 1.0;
        }
        let logs: Vec<Vec<f64>> = self
            .units
            .iter()
            .map(|u| self.log_embed(u).expect("unit is nonzero"))
            .collect();
        let gram: Vec<Vec<f64>> = (0..r)
            .map(|i| (0..r).map(|j| dot(&logs[i], &logs[j])).collect())
            .collect();
        crate::special::det_f64(gram).abs().sqrt()
    }

    /// Unit group data (fundamental units, regulator, w_F).
    pub fn unit_group(&self) -> (Vec<FieldElement>, f64, u32) {
        (self.units.clone(), self.regulator, self.roots_of_unity)
    }

    /// (c0, c1) with ω² = c0 + c1·ω.
    pub fn min_poly_quadratic(&self) -> Option<(i64, i64)> {
        (self.degree == 2).then(|| (self.mult[1][1][0], self.mult[1][1][1]))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn complex_det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut d = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].norm().partial_cmp(&m[j][c].norm()).unwrap())
            .unwrap();
        if m[p][c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                let s = f * m[c][j];
                m[i][j] -= s;
            }
        }
    }
    d
}
