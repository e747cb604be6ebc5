//! Double-coset combinatorics for the Hecke operators on GL_n and on m×n
//! matrices: coset representatives, degrees, the local zeta identity, the
//! inversion between integral and primitive indicators, and group orders.

mod local;
mod orders;

pub use local::{
    local_zeta_identity, smith_local, tamagawa_inversion_check, InversionReport, LocalZeta, SmithLocal,
    INVERSION_EXHAUSTIVE_LIMIT, INVERSION_SAMPLES,
};
pub use orders::{
    crux_equidistribution_check, crux_histogram, gl_order, gl_order_brute_force, group_orders,
    stabilizer_order, stabilizer_order_brute_force, GroupOrders,
};

use crate::error::{Error, Result};
use crate::intmat;
use crate::numberfield::{FieldElement, NumberField, PrimeIdeal};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;

/// One representative h(j; a) of the double coset of diag(q, 1, …, 1).
///
/// The matrix is the identity except for q at (j, j) and the offsets
/// a_1, …, a_{n−j−1} to its right in row j. Cosets are taken for right
/// multiplication by GL_n(ℤ), so each representative stands for its column
/// lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetRep {
    pub j: usize,
    pub offsets: Vec<i64>,
    pub matrix: Vec<Vec<i64>>,
}

impl CosetRep {
    /// Row-HNF of the transpose: a canonical label of the column lattice.
    pub fn canonical(&self) -> Vec<Vec<i64>> {
        intmat::hnf_i64(&intmat::transpose(&self.matrix))
    }
}

/// Calls `f` on every vector of length `len` with entries in `0..base`,
/// in lexicographic order.
pub(crate) fn for_each_tuple(len: usize, base: i64, mut f: impl FnMut(&[i64])) {
    let mut t = vec![0i64; len];
    loop {
        f(&t);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < base {
                break;
            }
            t[i] = 0;
        }
    }
}

/// The 1 + q + … + q^{n−1} representatives h(j; a), ordered by j and then
/// lexicographically by the offsets.
pub fn coset_reps_tp(n: usize, q: u64) -> Result<Vec<CosetRep>> {
    if n < 2 {
        return Err(Error::Domain("coset representatives need n ≥ 2".into()));
    }
    let f = crate::special::prime_factors(q as u128);
    if f.len() != 1 {
        return Err(Error::Domain(format!("{q} is not a prime power")));
    }
    let q = q as i64;
    let mut out = Vec::new();
    for j in 0..n {
        for_each_tuple(n - j - 1, q, |a| {
            let mut m: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| (r == c) as i64).collect()).collect();
            m[j][j] = q;
            for (i, &x) in a.iter().enumerate() {
                m[j][j + 1 + i] = x;
            }
            out.push(CosetRep { j, offsets: a.to_vec(), matrix: m });
        });
    }
    Ok(out)
}

/// Every m×m row-HNF matrix whose diagonal consists of powers of q with
/// total exponent k: upper triangular, entries above a pivot in [0, pivot).
pub fn hnf_matrices(m: usize, q: i64, k: u32) -> Vec<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; m];
    compositions(m, k, &mut exps, 0, &mut |e| {
        let diag: Vec<i64> = e.iter().map(|&x| q.pow(x)).collect();
        // free entries: (row r, column c) with r < c, reduced mod diag[c]
        let slots: Vec<(usize, usize)> = (0..m).flat_map(|c| (0..c).map(move |r| (r, c))).collect();
        let mut vals = vec![0i64; slots.len()];
        loop {
            let mut h: Vec<Vec<i64>> = vec![vec![0; m]; m];
            for i in 0..m {
                h[i][i] = diag[i];
            }
            for (&(r, c), &v) in slots.iter().zip(&vals) {
                h[r][c] = v;
            }
            out.push(h);
            let mut i = slots.len();
            let done = loop {
                if i == 0 {
                    break true;
                }
                i -= 1;
                vals[i] += 1;
                if vals[i] < diag[slots[i].1] {
                    break false;
                }
                vals[i] = 0;
            };
            if done {
                break;
            }
        }
    });
    out
}

fn compositions(m: usize, k: u32, e: &mut Vec<u32>, pos: usize, f: &mut impl FnMut(&[u32])) {
    if pos + 1 == m {
        e[pos] = k;
        f(e);
        return;
    }
    if m == 0 {
        return;
    }
    for x in 0..=k {
        e[pos] = x;
        compositions(m, k - x, e, pos + 1, f);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    ClosedForm,
    BruteForce,
}

/// deg 𝒯(ν^k) on m×m matrices: the number of sublattices of ℤ^m of index q^k.
pub fn hecke_degree(m: usize, q: u64, k: u32, mode: DegreeMode) -> Result<BigInt> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    match mode {
        DegreeMode::ClosedForm => {
            let q = BigInt::from(q);
            let mut num = BigInt::one();
            let mut den = BigInt::one();
            for i in 1..m as u32 {
                num *= q.pow(k + i) - 1;
                den *= q.pow(i) - 1;
            }
            Ok(num / den)
        }
        DegreeMode::BruteForce => {
            let q = i64::try_from(q).map_err(|_| Error::Resource("q too large".into()))?;
            let expected = hecke_degree(m, q as u64, k, DegreeMode::ClosedForm)?;
            if expected > BigInt::from(10_000_000) {
                return Err(Error::Resource("brute-force degree count too large".into()));
            }
            Ok(BigInt::from(hnf_matrices(m, q, k).len()))
        }
    }
}

/// Exponents (a_1 ≤ … ≤ a_m) of the elementary divisors of a nonsingular
/// integer matrix at the prime p.
pub fn elementary_exponents(a: &[Vec<i64>], p: u64) -> Vec<u32> {
    let s = intmat::smith(&intmat::to_big(a));
    s.diag.iter().map(|d| intmat::valuation(d, p)).collect()
}

/// deg 𝒯(ν^{a_1}, …, ν^{a_m}): HNF matrices of the given elementary divisor
/// type, counted by enumeration.
pub fn double_coset_degree(q: u64, exps: &[u32]) -> u64 {
    let mut sorted = exps.to_vec();
    sorted.sort_unstable();
    let k: u32 = sorted.iter().sum();
    hnf_matrices(sorted.len(), q as i64, k)
        .iter()
        .filter(|h| elementary_exponents(h, q) == sorted)
        .count() as u64
}

/// A formal ℤ-combination of operators 𝒯(ν^{a_1}, …, ν^{a_m}) at several primes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HeckeWord {
    pub terms: BTreeMap<(u64, Vec<u32>), i64>,
}

impl HeckeWord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff`·𝒯(ν_q^{a}); exponents are stored sorted.
    pub fn add(&mut self, q: u64, exps: &[u32], coeff: i64) {
        let mut e = exps.to_vec();
        e.sort_unstable();
        *self.terms.entry((q, e)).or_insert(0) += coeff;
        self.terms.retain(|_, c| *c != 0);
    }

    /// 𝒯^{(i)}(ν) = 𝒯(1, …, 1, ν, …, ν) with i copies of ν.
    pub fn elementary(q: u64, m: usize, i: usize) -> Self {
        let mut w = Self::new();
        let e: Vec<u32> = (0..m).map(|t| (t >= m - i) as u32).collect();
        w.add(q, &e, 1);
        w
    }

    /// deg is additive on combinations.
    pub fn degree(&self) -> i64 {
        self.terms
            .iter()
            .map(|((q, e), c)| c * double_coset_degree(*q, e) as i64)
            .sum()
    }
}

/// γ(j; a_1, …, a_{n−j−1}) over 𝒪_F with its exact ℤ-basis.
#[derive(Debug, Clone)]
pub struct SublatticeBasis {
    pub j: usize,
    pub offsets: Vec<FieldElement>,
    /// n×n rows over 𝒪_F.
    pub matrix: Vec<Vec<FieldElement>>,
}

impl SublatticeBasis {
    /// ℤ-basis of the row span: ω_t·row_r in integral-basis coordinates,
    /// ordered by row then t.
    pub fn z_basis(&self, field: &NumberField) -> Vec<Vec<i64>> {
        let d = field.degree();
        let mut out = Vec::new();
        for row in &self.matrix {
            for t in 0..d {
                let mut w = vec![0i64; d];
                w[t] = 1;
                let w = FieldElement::from_ints(&w);
                let v: Vec<i64> = row
                    .iter()
                    .flat_map(|x| field.mul(&w, x).to_ints().expect("integral entries"))
                    .collect();
                out.push(v);
            }
        }
        out
    }

    /// N(det γ) computed exactly.
    pub fn det_norm(&self, field: &NumberField) -> BigRational {
        let det = crate::heights::field_det(field, &self.matrix);
        field.norm(&det).unwrap_or_else(|_| BigRational::from_integer(0.into()))
    }
}

/// The 1 + q + … + q^{n−1} bases γ(j; a): rows 0..j−1 are e_0..e_{j−1},
/// row j is π̃·e_j, and row j+i is a_i·e_j + e_{j+i} with a_i running over a
/// transversal of 𝒪_F/℘.
pub fn sublattice_bases(field: &NumberField, n: usize, prime: &PrimeIdeal) -> Result<Vec<SublatticeBasis>> {
    if n < 1 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let pi = prime
        .generator
        .clone()
        .ok_or_else(|| Error::Config(format!("prime over {} is not known to be principal", prime.p)))?;
    let reps = field.residue_transversal(prime)?;
    let q = reps.len() as i64;
    let mut out = Vec::new();
    for j in 0..n {
        for_each_tuple(n - j - 1, q, |a| {
            let mut m: Vec<Vec<FieldElement>> = (0..n)
                .map(|r| (0..n).map(|c| field.int((r == c) as i64)).collect())
                .collect();
            m[j][j] = pi.clone();
            let offsets: Vec<FieldElement> = a.iter().map(|&x| reps[x as usize].clone()).collect();
            for (i, x) in offsets.iter().enumerate() {
                m[j + 1 + i][j] = x.clone();
            }
            out.push(SublatticeBasis { j, offsets, matrix: m });
        });
    }
    Ok(out)
}

/// Number of sublattices in the family: 1 + q + … + q^{n−1}.
pub fn family_size(n: usize, q: u64) -> u64 {
    (0..n as u32).map(|i| q.pow(i)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use std::collections::BTreeSet;

    /// Index-q sublattices of ℤ^n (q prime) are kernels of nonzero
    /// functionals mod q; label each by the HNF of its generators.
    fn hyperplane_lattices(n: usize, q: i64) -> BTreeSet<Vec<Vec<i64>>> {
        let mut out = BTreeSet::new();
        for_each_tuple(n, q, |phi| {
            if phi.iter().all(|&x| x == 0) {
                return;
            }
            let mut gens: Vec<Vec<i64>> = Vec::new();
            for_each_tuple(n, q, |x| {
                let s: i64 = x.iter().zip(phi).map(|(a, b)| a * b).sum();
                if s % q == 0 {
                    gens.push(x.to_vec());
                }
            });
            for i in 0..n {
                gens.push((0..n).map(|j| if i == j { q } else { 0 }).collect());
            }
            out.insert(intmat::hnf_i64(&gens));
        });
        out
    }

    #[test]
    fn coset_counts() {
        assert_eq!(coset_reps_tp(3, 2).unwrap().len(), 7);
        assert_eq!(coset_reps_tp(2, 3).unwrap().len(), 4);
        let reps = coset_reps_tp(3, 5).unwrap();
        assert_eq!(reps.len(), 31);
        for r in &reps {
            assert_eq!(intmat::det_i64(&r.matrix), BigInt::from(5));
        }
        assert!(coset_reps_tp(2, 6).is_err());
    }

    #[test]
    fn cosets_cover_every_index_q_sublattice_once() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (3, 5), (4, 2)] {
            let reps = coset_reps_tp(n, q as u64).unwrap();
            let labels: Vec<_> = reps.iter().map(|r| r.canonical()).collect();
            let set: BTreeSet<_> = labels.iter().cloned().collect();
            assert_eq!(set.len(), labels.len(), "n={n} q={q}: duplicate cosets");
            assert_eq!(set, hyperplane_lattices(n, q));
        }
    }

    #[test]
    fn degree_examples() {
        let d = |m, q, k, mode| hecke_degree(m, q, k, mode).unwrap();
        assert_eq!(d(1, 7, 5, DegreeMode::ClosedForm), BigInt::from(1));
        assert_eq!(d(2, 2, 1, DegreeMode::ClosedForm), BigInt::from(3));
        assert_eq!(d(3, 2, 1, DegreeMode::BruteForce), BigInt::from(7));
        for q in [2, 3, 5] {
            for m in 1..=3 {
                for k in 0..=3 {
                    assert_eq!(d(m, q, k, DegreeMode::ClosedForm), d(m, q, k, DegreeMode::BruteForce));
                }
            }
        }
    }

    /// Sublattices of index q^k are row spans of D·V with D a diagonal of
    /// q-powers and V ∈ GL_m(ℤ); sweeping V over all matrices mod q^k that
    /// are invertible mod q reaches each of them.
    #[test]
    fn brute_force_degree_matches_sublattice_sweep() {
        for (m, q, k) in [(2usize, 2i64, 1u32), (2, 2, 2), (2, 3, 1), (2, 3, 2), (3, 2, 1)] {
            let qk = q.pow(k);
            let mut seen = BTreeSet::new();
            let mut exps = vec![0u32; m];
            compositions(m, k, &mut exps, 0, &mut |e| {
                for_each_tuple(m * m, qk, |v| {
                    let vm: Vec<Vec<i64>> = v.chunks(m).map(|c| c.to_vec()).collect();
                    if intmat::rank_mod_p(&vm, q) < m {
                        return;
                    }
                    let mut gens: Vec<Vec<i64>> =
                        vm.iter().zip(e).map(|(r, &x)| r.iter().map(|y| y * q.pow(x)).collect()).collect();
                    for i in 0..m {
                        gens.push((0..m).map(|j| if i == j { qk } else { 0 }).collect());
                    }
                    seen.insert(intmat::hnf_i64(&gens));
                });
            });
            let shapes: BTreeSet<_> = hnf_matrices(m, q, k).into_iter().collect();
            assert_eq!(seen, shapes, "m={m} q={q} k={k}");
        }
    }

    #[test]
    fn double_coset_degrees_add_up() {
        // Σ over types of total exponent k of deg 𝒯(type) = deg 𝒯(ν^k)
        for q in [2u64, 3] {
            for k in 0..=3u32 {
                let mut total = 0;
                for a in 0..=k {
                    for b in a..=k {
                        if a + b == k {
                            total += double_coset_degree(q, &[a, b]);
                        }
                    }
                }
                let want = hecke_degree(2, q, k, DegreeMode::ClosedForm).unwrap();
                assert_eq!(BigInt::from(total), want);
            }
        }
        let w = HeckeWord::elementary(2, 3, 1);
        assert_eq!(w.degree(), 7);
        let mut w2 = HeckeWord::elementary(3, 2, 1);
        w2.add(3, &[0, 0], -1);
        assert_eq!(w2.degree(), 3);
    }

    #[test]
    fn every_hnf_is_in_reduced_shape() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let q = [2i64, 3, 5][rng.gen_range(0..3)];
            let m = rng.gen_range(1..=3);
            let k = rng.gen_range(0..=3u32);
            let shapes: BTreeSet<_> = hnf_matrices(m, q, k).into_iter().collect();
            // a random matrix of determinant ±q^k: diagonal of q-powers times unimodular
            let mut a: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| (i == j) as i64).collect()).collect();
            let mut rest = k;
            for i in 0..m {
                let e = if i + 1 == m { rest } else { rng.gen_range(0..=rest) };
                rest -= e;
                a[i][i] = q.pow(e);
            }
            for _ in 0..6 {
                let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..m));
                if i != j {
                    let c = rng.gen_range(-3..=3);
                    for r in 0..m {
                        let v = a[r][j];
                        a[r][i] += c * v;
                    }
                    let v = a[j].clone();
                    let c = rng.gen_range(-2..=2);
                    for (x, y) in a[i].iter_mut().zip(v) {
                        *x += c * y;
                    }
                }
            }
            let h = intmat::hnf_i64(&a);
            assert!(shapes.contains(&h), "{a:?} ↦ {h:?}");
        }
    }

    #[test]
    fn sublattice_families() {
        let q = NumberField::rational();
        let p2 = q.split_principal_primes(&[], 1, 100).unwrap().remove(0);
        let b = sublattice_bases(&q, 2, &p2).unwrap();
        let mats: Vec<Vec<Vec<i64>>> = b.iter().map(|s| s.z_basis(&q)).collect();
        assert_eq!(mats, vec![vec![vec![2, 0], vec![0, 1]], vec![vec![2, 0], vec![1, 1]], vec![vec![1, 0], vec![0, 2]]]);
        let p3 = q.split_principal_primes(&[2], 1, 100).unwrap().remove(0);
        assert_eq!(sublattice_bases(&q, 3, &p3).unwrap().len(), 13);

        let g = NumberField::quadratic(-1).unwrap();
        let p5 = g.split_principal_primes(&[], 1, 100).unwrap().remove(0);
        let b = sublattice_bases(&g, 2, &p5).unwrap();
        assert_eq!(b.len(), 6);
        let mut labels = BTreeSet::new();
        for s in &b {
            assert_eq!(s.det_norm(&g).abs(), BigRational::from_integer(5.into()));
            labels.insert(intmat::hnf_i64(&s.z_basis(&g)));
        }
        assert_eq!(labels.len(), 6);
    }

    #[test]
    fn quadratic_family_spans_are_distinct() {
        let f = NumberField::quadratic(2).unwrap();
        let p = f.split_principal_primes(&[], 1, 100).unwrap().remove(0);
        let b = sublattice_bases(&f, 3, &p).unwrap();
        assert_eq!(b.len() as u64, family_size(3, p.norm));
        let labels: BTreeSet<_> = b.iter().map(|s| intmat::hnf_i64(&s.z_basis(&f))).collect();
        assert_eq!(labels.len(), b.len());
        for l in &labels {
            assert_eq!(intmat::det_i64(l), BigInt::from(p.norm));
        }
    }
}
