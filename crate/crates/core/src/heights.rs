//! Local and global heights of vectors and matrices over F.
//!
//! Complex places use the squared modulus throughout, so a complex local
//! height of a vector is Σ|x_i|² and that of a matrix is det(X·X̄ᵀ).

use crate::error::{Error, Result};
use crate::lattices::EmbeddedLattice;
use crate::numberfield::{complex_det, FieldElement, NumberField, PrimeIdeal};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

/// An archimedean matrix: one m×n matrix per infinite place.
#[derive(Debug, Clone)]
pub struct ArchMatrix {
    /// `(is_real, rows)` per place.
    pub places: Vec<(bool, Vec<Vec<Complex64>>)>,
}

impl ArchMatrix {
    /// Single real place.
    pub fn real(rows: Vec<Vec<f64>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self { places: vec![(true, rows)] }
    }

    /// Single complex place.
    pub fn complex(rows: Vec<Vec<Complex64>>) -> Self {
        Self { places: vec![(false, rows)] }
    }

    /// ρ applied entrywise to a matrix over F.
    pub fn from_field(field: &NumberField, x: &[Vec<FieldElement>]) -> Self {
        let emb: Vec<Vec<Vec<Complex64>>> =
            x.iter().map(|r| r.iter().map(|e| field.embed(e)).collect()).collect();
        let places = (0..field.places())
            .map(|p| {
                let rows = emb.iter().map(|r| r.iter().map(|e| e[p]).collect()).collect();
                (field.is_real_place(p), rows)
            })
            .collect();
        Self { places }
    }

    pub fn rows(&self) -> usize {
        self.places.first().map_or(0, |p| p.1.len())
    }

    pub fn cols(&self) -> usize {
        self.places.first().and_then(|p| p.1.first()).map_or(0, |r| r.len())
    }

    /// X_σ·g_σ at every place.
    pub fn twisted(&self, g: &[Vec<Vec<Complex64>>]) -> Self {
        let places = self
            .places
            .iter()
            .zip(g)
            .map(|((real, x), g)| (*real, cmul(x, g)))
            .collect();
        Self { places }
    }

    /// Keeps the listed columns.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let places = self
            .places
            .iter()
            .map(|(real, x)| (*real, x.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect()))
            .collect();
        Self { places }
    }

    /// The i-th row as a 1×n matrix.
    pub fn row(&self, i: usize) -> Self {
        let places = self.places.iter().map(|(real, x)| (*real, vec![x[i].clone()])).collect();
        Self { places }
    }
}

fn cmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    a.iter()
        .map(|r| {
            (0..b[0].len())
                .map(|j| r.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

/// Archimedean height with a flag for rank-deficient input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchHeight {
    pub value: f64,
    pub degenerate: bool,
}

/// ‖x‖_ν at a finite place: N℘^{−min_i v_℘(x_i)}.
pub fn local_height_finite(field: &NumberField, ideal: &PrimeIdeal, x: &[FieldElement]) -> Result<BigRational> {
    let mut v = None;
    for xi in x.iter().filter(|xi| !xi.is_zero()) {
        let w = field.valuation(ideal, xi)?;
        v = Some(v.map_or(w, |u: i64| u.min(w)));
    }
    let v = v.ok_or_else(|| Error::Domain("height of the zero vector".into()))?;
    let q = BigRational::from_integer(ideal.norm.into());
    Ok(if v <= 0 { pow_rat(&q, (-v) as u32) } else { pow_rat(&q, v as u32).recip() })
}

fn pow_rat(q: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * q)
}

/// Euclidean length at a real place, squared length at a complex one.
pub fn local_height_arch(is_real: bool, x: &[Complex64]) -> f64 {
    let s: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if is_real {
        s.sqrt()
    } else {
        s
    }
}

fn place_matrix_height(is_real: bool, x: &[Vec<Complex64>]) -> (f64, bool) {
    let m = x.len();
    let gram: Vec<Vec<Complex64>> = (0..m)
        .map(|i| (0..m).map(|j| x[i].iter().zip(&x[j]).map(|(a, b)| a * b.conj()).sum()).collect())
        .collect();
    let scale: f64 = (0..m).map(|i| gram[i][i].re).product();
    let det = complex_det(gram).re;
    if !(det > 1e-12 * scale) {
        return (0.0, true);
    }
    (if is_real { det.sqrt() } else { det }, false)
}

/// H_∞(X) = ∏_σ |det|X_σ with |det|X = √det(X·X̄ᵀ), squared at complex places.
pub fn arch_matrix_height(x: &ArchMatrix) -> ArchHeight {
    let mut value = 1.0;
    for (real, rows) in &x.places {
        let (h, degenerate) = place_matrix_height(*real, rows);
        if degenerate {
            return ArchHeight { value: 0.0, degenerate: true };
        }
        value *= h;
    }
    ArchHeight { value, degenerate: false }
}

/// H_∞ through the wedge coordinates: per place √Σ|minors|², squared at
/// complex places.
pub fn arch_wedge_height(x: &ArchMatrix) -> f64 {
    let (m, n) = (x.rows(), x.cols());
    x.places
        .iter()
        .map(|(real, rows)| {
            let s: f64 = crate::intmat::combinations(n, m)
                .iter()
                .map(|cols| {
                    let sub = rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
                    complex_det(sub).norm_sqr()
                })
                .sum();
            if *real {
                s.sqrt()
            } else {
                s
            }
        })
        .product()
}

/// Determinant over F by elimination.
pub fn field_det(field: &NumberField, a: &[Vec<FieldElement>]) -> FieldElement {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = field.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return field.zero();
        };
        if p != c {
            m.swap(p, c);
            det = det.neg();
        }
        det = field.mul(&det, &m[c][c]);
        let inv = field.inv(&m[c][c]).expect("pivot is nonzero");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = field.mul(&m[i][c], &inv);
            for j in c..n {
                let t = field.mul(&f, &m[c][j]);
                m[i][j] = m[i][j].sub(&t);
            }
        }
    }
    det
}

/// All m×m minors of an m×n matrix over F, columns in lexicographic order.
pub fn field_minors(field: &NumberField, x: &[Vec<FieldElement>]) -> Vec<FieldElement> {
    let (m, n) = (x.len(), x.first().map_or(0, |r| r.len()));
    crate::intmat::combinations(n, m)
        .iter()
        .map(|cols| {
            let sub: Vec<Vec<FieldElement>> =
                x.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
            field_det(field, &sub)
        })
        .collect()
}

/// Finite and archimedean parts of a global height.
#[derive(Debug, Clone)]
pub struct GlobalHeight {
    pub finite: BigRational,
    pub arch: f64,
}

impl GlobalHeight {
    pub fn value(&self) -> f64 {
        self.finite.to_f64().unwrap_or(f64::NAN) * self.arch
    }
}

/// H(X) = ∏_ν H_ν(X), with an optional archimedean twist g (X_σ ↦ X_σ·g_σ).
///
/// The finite part is exact: ∏_℘ N℘^{−min v_℘(minors)} over the primes in
/// the support of the maximal minors.
pub fn global_height(
    field: &NumberField,
    x: &[Vec<FieldElement>],
    twist: Option<&[Vec<Vec<Complex64>>]>,
) -> Result<GlobalHeight> {
    let m = x.len();
    if m == 0 || x.iter().any(|r| r.len() != x[0].len()) || x[0].len() < m {
        return Err(Error::Domain("height needs an m×n matrix with m ≤ n".into()));
    }
    let minors: Vec<FieldElement> = field_minors(field, x).into_iter().filter(|v| !v.is_zero()).collect();
    if minors.is_empty() {
        return Err(Error::Degeneracy("rows are dependent over F".into()));
    }
    let mut finite = BigRational::one();
    for ideal in field.support_primes(&minors)? {
        finite *= local_height_finite(field, &ideal, &minors)?;
    }
    let mut a = ArchMatrix::from_field(field, x);
    if let Some(g) = twist {
        if g.len() != field.places() {
            return Err(Error::Domain("twist needs one matrix per infinite place".into()));
        }
        a = a.twisted(g);
    }
    let h = arch_matrix_height(&a);
    if h.degenerate {
        return Err(Error::Degeneracy("twisted rows are numerically dependent".into()));
    }
    Ok(GlobalHeight { finite, arch: h.value })
}

/// H_∞(X) ≤ ∏_i H_∞(x_i).
pub fn hadamard_holds(x: &ArchMatrix) -> bool {
    let h = arch_matrix_height(x).value;
    let rows: f64 = (0..x.rows()).map(|i| arch_matrix_height(&x.row(i)).value).product();
    h <= rows * (1.0 + 1e-9)
}

/// H_∞(Y) ≤ H_∞(X) for every column subset Y with at least m columns.
pub fn column_deletion_holds(x: &ArchMatrix) -> bool {
    let (m, n) = (x.rows(), x.cols());
    let h = arch_matrix_height(x).value;
    (m..n).all(|k| {
        crate::intmat::combinations(n, k)
            .iter()
            .all(|cols| arch_matrix_height(&x.select_columns(cols)).value <= h * (1.0 + 1e-9))
    })
}

/// ρ(α·𝒪_F·x) as a rank-d lattice in ℝ^{nd}.
pub fn rank_one_lattice(field: &NumberField, alpha: &FieldElement, x: &[FieldElement]) -> Result<EmbeddedLattice> {
    let d = field.degree();
    let ax: Vec<FieldElement> = x.iter().map(|xi| field.mul(alpha, xi)).collect();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for t in 0..d {
        let mut w = vec![0i64; d];
        w[t] = 1;
        let w = FieldElement::from_ints(&w);
        rows.push(ax.iter().flat_map(|e| field.mul(&w, e).coords().to_vec()).collect());
    }
    let den = rows
        .iter()
        .flatten()
        .fold(num_bigint::BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
    let exact: Option<Vec<Vec<i64>>> = rows
        .iter()
        .map(|r| r.iter().map(|c| (c * &den).to_integer().to_i64()).collect())
        .collect();
    let exact = exact.ok_or_else(|| Error::Resource("coordinates exceed i64".into()))?;
    let den = den.to_i64().ok_or_else(|| Error::Resource("denominator exceeds i64".into()))?;
    EmbeddedLattice::from_field_coordinates(field, x.len(), exact, den, None)
}

/// Both sides of the shortest-vector bound
/// √d·N(I)^{1/d}·H_∞(x)^{1/d} ≤ λ_1(ρ(I·x)) for I = (α).
#[derive(Debug, Clone, Copy)]
pub struct ShortestVectorBound {
    pub lower: f64,
    pub lambda1: f64,
}

impl ShortestVectorBound {
    pub fn holds(&self) -> bool {
        self.lower <= self.lambda1 * (1.0 + 1e-9)
    }
}

pub fn shortest_vector_bound(field: &NumberField, alpha: &FieldElement, x: &[FieldElement]) -> Result<ShortestVectorBound> {
    let d = field.degree() as f64;
    let n_i = field.ideal_norm(alpha)?.to_f64().unwrap();
    let h = arch_matrix_height(&ArchMatrix::from_field(field, &[x.to_vec()]));
    if h.degenerate {
        return Err(Error::Domain("x must be nonzero".into()));
    }
    let lat = rank_one_lattice(field, alpha, x)?;
    Ok(ShortestVectorBound {
        lower: d.sqrt() * n_i.powf(1.0 / d) * h.value.powf(1.0 / d),
        lambda1: lat.shortest_vector_length()?,
    })
}

/// Integral ideals of a quadratic field with norm ≤ `max_norm`, each as the
/// row-HNF ℤ-basis [[a, b], [0, c]] of its coordinate lattice.
pub fn quadratic_ideals(field: &NumberField, max_norm: i64) -> Result<Vec<[[i64; 2]; 2]>> {
    let (c0, c1) = field
        .min_poly_quadratic()
        .ok_or_else(|| Error::Config("ideal listing needs a quadratic field".into()))?;
    let mut out = Vec::new();
    for norm in 1..=max_norm {
        for a in 1..=norm {
            if norm % a != 0 {
                continue;
            }
            let c = norm / a;
            for b in 0..c {
                // lattice {(x, y)}: rows (a, b), (0, c). Stable under ω iff ω·rows lie in it.
                let contains = |x: i64, y: i64| -> bool {
                    x % a == 0 && {
                        let k = x / a;
                        (y - k * b).rem_euclid(c) == 0
                    }
                };
                // ω·(x + yω) = y·c0 + (x + y·c1)ω
                let stable = [(a, b), (0, c)]
                    .iter()
                    .all(|&(x, y)| contains(y * c0, x + y * c1));
                if stable {
                    out.push([[a, b], [0, c]]);
                }
            }
        }
    }
    Ok(out)
}

/// A generator of the principal ideal with the given HNF basis: the shortest
/// element whose norm has absolute value equal to the index.
pub fn ideal_generator(field: &NumberField, hnf: &[[i64; 2]; 2]) -> Result<FieldElement> {
    let norm = (hnf[0][0] * hnf[1][1]) as i128;
    let lat = EmbeddedLattice::from_field_coordinates(
        field,
        1,
        vec![hnf[0].to_vec(), hnf[1].to_vec()],
        1,
        None,
    )?;
    let mut r = lat.shortest_vector_length()?;
    for _ in 0..8 {
        let pts = lat.enumerate_points(&crate::lattices::Region::ball(r)?)?;
        let mut found: Vec<(f64, Vec<i64>)> = pts
            .iter()
            .filter(|p| field.norm_int(&p.exact).abs() == norm)
            .map(|p| (p.norm_sq, p.exact.clone()))
            .collect();
        found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.cmp(&a.1)));
        if let Some((_, c)) = found.first() {
            return Ok(field.element(c));
        }
        r *= 2.0;
    }
    Err(Error::Resource("no generator found; ideal may be non-principal".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn finite_local_heights() {
        let q = NumberField::rational();
        let two = &q.primes_above(2).unwrap()[0];
        let h = local_height_finite(&q, two, &[q.int(3), q.int(4)]).unwrap();
        assert!(h.is_one());
        let half = FieldElement::from_rational(1, BigRational::new(1.into(), 2.into()));
        let h = local_height_finite(&q, two, &[half, q.int(1)]).unwrap();
        assert_eq!(h, BigRational::from_integer(2.into()));
    }

    #[test]
    fn archimedean_local_heights() {
        assert_eq!(local_height_arch(true, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]), 1.0);
        assert!((local_height_arch(true, &[c(3.0, 0.0), c(4.0, 0.0)]) - 5.0).abs() < 1e-12);
        assert!((local_height_arch(false, &[c(1.0, 0.0), c(0.0, 1.0)]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_heights() {
        let x = ArchMatrix::real(vec![vec![3.0, 4.0]]);
        assert!((arch_matrix_height(&x).value - 5.0).abs() < 1e-12);
        let x = ArchMatrix::real(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!((arch_matrix_height(&x).value - 1.0).abs() < 1e-12);
        let x = ArchMatrix::real(vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]);
        assert!((arch_matrix_height(&x).value - 2.0).abs() < 1e-12);
        let x = ArchMatrix::real(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(arch_matrix_height(&x), ArchHeight { value: 0.0, degenerate: true });
    }

    fn random_arch(rng: &mut ChaCha8Rng, m: usize, n: usize, places: &[bool]) -> ArchMatrix {
        let places = places
            .iter()
            .map(|&real| {
                let rows = (0..m)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                let im = if real { 0.0 } else { rng.gen_range(-2.0..2.0) };
                                c(rng.gen_range(-2.0..2.0), im)
                            })
                            .collect()
                    })
                    .collect();
                (real, rows)
            })
            .collect();
        ArchMatrix { places }
    }

    #[test]
    fn wedge_and_gram_definitions_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(m..=5);
            let x = random_arch(&mut rng, m, n, &[true, false]);
            let a = arch_matrix_height(&x).value;
            let b = arch_wedge_height(&x);
            assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn hadamard_and_column_deletion() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let m = rng.gen_range(1..=4);
            let n = rng.gen_range(m..=6);
            let x = random_arch(&mut rng, m, n, &[true, false]);
            assert!(hadamard_holds(&x));
            assert!(column_deletion_holds(&x));
        }
    }

    #[test]
    fn global_heights_over_q() {
        let q = NumberField::rational();
        let h = global_height(&q, &[vec![q.int(3), q.int(4)]], None).unwrap();
        assert!(h.finite.is_one());
        assert!((h.value() - 5.0).abs() < 1e-12);
        let half = FieldElement::from_rational(1, BigRational::new(1.into(), 2.into()));
        let h = global_height(&q, &[vec![half, q.int(1)]], None).unwrap();
        assert_eq!(h.finite, BigRational::from_integer(2.into()));
        assert!((h.arch - 5f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((h.value() - 5f64.sqrt()).abs() < 1e-12);
        let e = global_height(&q, &[vec![q.int(1), q.int(2)], vec![q.int(2), q.int(4)]], None);
        assert!(matches!(e, Err(Error::Degeneracy(_))));
    }

    #[test]
    fn unit_vector_has_height_one() {
        for f in [NumberField::rational(), NumberField::quadratic(-1).unwrap(), NumberField::quadratic(2).unwrap()] {
            let x = vec![f.one(), f.zero(), f.zero()];
            let h = global_height(&f, &[x], None).unwrap();
            assert!((h.value() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [-1i64, -3, 2, 5] {
            let f = NumberField::quadratic(m).unwrap();
            for _ in 0..10 {
                let x: Vec<FieldElement> =
                    (0..3).map(|_| f.element(&[rng.gen_range(-9..10), rng.gen_range(-9..10)])).collect();
                if x.iter().all(|e| e.is_zero()) {
                    continue;
                }
                let h = global_height(&f, std::slice::from_ref(&x), None).unwrap().value();
                let mut s = f.element(&[rng.gen_range(-9..10), rng.gen_range(1..10)]);
                s = f.div(&s, &f.element(&[rng.gen_range(1..7), rng.gen_range(-3..4)])).unwrap();
                let y: Vec<FieldElement> = x.iter().map(|e| f.mul(&s, e)).collect();
                let h2 = global_height(&f, &[y], None).unwrap().value();
                assert!((h - h2).abs() < 1e-9 * h, "{h} vs {h2}");
            }
        }
    }

    #[test]
    fn twist_by_identity_is_neutral() {
        let f = NumberField::quadratic(2).unwrap();
        let x = vec![vec![f.element(&[1, 1]), f.element(&[3, -1])]];
        let id = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        let a = global_height(&f, &x, None).unwrap().value();
        let b = global_height(&f, &x, Some(&[id.clone(), id])).unwrap().value();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn ideals_of_gaussian_integers() {
        let f = NumberField::quadratic(-1).unwrap();
        let ideals = quadratic_ideals(&f, 10).unwrap();
        // norms 1, 2, 4, 5 (two), 8, 9, 10 (two)
        let count = |n: i64| ideals.iter().filter(|h| h[0][0] * h[1][1] == n).count();
        assert_eq!((count(1), count(2), count(3), count(5), count(9), count(10)), (1, 1, 0, 2, 1, 2));
        for h in &ideals {
            let g = ideal_generator(&f, h).unwrap();
            assert_eq!(f.norm_int(&g.to_ints().unwrap()), (h[0][0] * h[1][1]) as i128);
        }
    }

    #[test]
    fn shortest_vector_bound_small_cases() {
        let f = NumberField::quadratic(2).unwrap();
        let one = [f.one()];
        let b = shortest_vector_bound(&f, &f.element(&[3, 1]), &one).unwrap();
        assert!(b.holds());
        assert!((b.lower - 14f64.sqrt()).abs() < 1e-9);
        let q = NumberField::rational();
        let b = shortest_vector_bound(&q, &q.int(3), &[q.int(1), q.int(2)]).unwrap();
        assert!((b.lower - 3.0 * 5f64.sqrt()).abs() < 1e-9);
        assert!((b.lambda1 - 3.0 * 5f64.sqrt()).abs() < 1e-9);
    }
}
