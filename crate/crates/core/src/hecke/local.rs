use super::hnf_matrices;
use crate::error::{Error, Result};
use crate::intmat::{self, BigMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

/// Partial sum of Σ_k Q^{(m)}(k)·q^{−kn} against ∏_{i<m} (1 − q^{−(n−i)})^{−1}.
#[derive(Debug, Clone)]
pub struct LocalZeta {
    pub partial_sum: BigRational,
    pub target: BigRational,
    pub gap: f64,
    /// Analytic bound on the omitted tail Σ_{k>K}.
    pub tail_bound: f64,
    /// Gap after each k = 0..=K.
    pub gaps: Vec<f64>,
}

impl LocalZeta {
    pub fn gaps_decrease(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] < w[0])
    }
}

fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn local_zeta_identity(m: usize, n: usize, q: u64, big_k: u32) -> Result<LocalZeta> {
    if n <= m {
        return Err(Error::Domain(format!("the series diverges for n = {n} ≤ m = {m}")));
    }
    if m == 0 || big_k == 0 || q < 2 {
        return Err(Error::Domain("need m ≥ 1, K ≥ 1 and q ≥ 2".into()));
    }
    let qb = BigInt::from(q);
    let qr = BigRational::from_integer(qb.clone());
    let mut target = BigRational::one();
    for i in 0..m {
        let t = BigRational::one() - BigRational::new(BigInt::one(), qb.pow((n - i) as u32));
        target /= t;
    }
    let mut partial = BigRational::zero();
    let mut gaps = Vec::with_capacity(big_k as usize + 1);
    for k in 0..=big_k {
        let deg = super::hecke_degree(m, q, k, super::DegreeMode::ClosedForm)?;
        partial += BigRational::new(deg, qb.pow(k * n as u32));
        gaps.push(rat_to_f64(&(&target - &partial)));
    }
    // Q(k) ≤ C·q^{k(m−1)} with C = ∏_{i<m} q^i/(q^i − 1)
    let qf = q as f64;
    let c: f64 = (1..m).map(|i| qf.powi(i as i32) / (qf.powi(i as i32) - 1.0)).product();
    let r = (n - m + 1) as f64;
    let tail_bound = c * qf.powf(-(big_k as f64 + 1.0) * r) / (1.0 - qf.powf(-r));
    let _ = qr;
    Ok(LocalZeta {
        gap: rat_to_f64(&(&target - &partial)),
        partial_sum: partial,
        target,
        tail_bound,
        gaps,
    })
}

/// X = γ·diag(p^{a_1}, …, p^{a_m})·P with γ ∈ GL_m(ℤ) and P primitive at p.
#[derive(Debug, Clone)]
pub struct SmithLocal {
    /// a_1 ≤ … ≤ a_m; `None` stands for a zero elementary divisor.
    pub exponents: Vec<Option<u32>>,
    pub gamma: BigMatrix,
    pub primitive: BigMatrix,
}

impl SmithLocal {
    /// γ·diag(p^{a_i})·P.
    pub fn reassemble(&self, p: u64) -> BigMatrix {
        let scaled: BigMatrix = self
            .primitive
            .iter()
            .zip(&self.exponents)
            .map(|(row, a)| {
                let s = a.map_or(BigInt::zero(), |a| BigInt::from(p).pow(a));
                row.iter().map(|x| x * &s).collect()
            })
            .collect();
        intmat::mat_mul(&self.gamma, &scaled)
    }
}

pub fn smith_local(x: &[Vec<i64>], p: u64) -> Result<SmithLocal> {
    if !crate::special::is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let m = x.len();
    if m == 0 || x[0].len() < m {
        return Err(Error::Domain("need an m×n matrix with m ≤ n".into()));
    }
    if x.iter().flatten().all(|&v| v == 0) {
        return Err(Error::Domain("X must be nonzero".into()));
    }
    let s = intmat::smith(&intmat::to_big(x));
    let mut exponents = Vec::with_capacity(m);
    let mut primitive = Vec::with_capacity(m);
    for i in 0..m {
        let d = &s.diag[i];
        let (a, unit) = if d.is_zero() {
            (None, BigInt::one())
        } else {
            let a = intmat::valuation(d, p);
            (Some(a), d / BigInt::from(p).pow(a))
        };
        exponents.push(a);
        primitive.push(s.v_inv[i].iter().map(|v| v * &unit).collect());
    }
    Ok(SmithLocal { exponents, gamma: s.u_inv, primitive })
}

pub const INVERSION_EXHAUSTIVE_LIMIT: f64 = 1e7;
pub const INVERSION_SAMPLES: usize = 100_000;
const GAMMA_BUDGET: usize = 200_000;

/// Outcome of checking f_pr = Σ_i (−1)^i q^{i(i−1)/2} 𝒯^{(i)} f and
/// f = Σ_I 𝒯(I) f_pr on residue classes of m×n matrices mod q^e.
#[derive(Debug, Clone)]
pub struct InversionReport {
    pub m: usize,
    pub n: usize,
    pub q: u64,
    pub e: u32,
    pub classes: u64,
    pub exhaustive: bool,
    pub backward_failures: u64,
    pub forward_failures: u64,
    pub first_failure: Option<Vec<Vec<i64>>>,
}

impl InversionReport {
    pub fn passed(&self) -> bool {
        self.backward_failures == 0 && self.forward_failures == 0
    }
}

/// A column lattice γℤ^m stored as (adj γ, det γ).
struct Gamma {
    adj: Vec<Vec<i64>>,
    det: i64,
}

impl Gamma {
    fn from_row_hnf(h: &[Vec<i64>]) -> Self {
        let g = intmat::transpose(h);
        let adj = intmat::to_i64(&intmat::adjugate(&intmat::to_big(&g))).expect("small entries");
        let det = intmat::det_i64(&g).to_i64().expect("small determinant");
        Self { adj, det }
    }

    /// γ^{−1}·x when it is integral.
    fn divide(&self, x: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
        let m = self.adj.len();
        let n = x[0].len();
        let mut out = vec![vec![0i64; n]; m];
        for i in 0..m {
            for j in 0..n {
                let s: i64 = (0..m).map(|k| self.adj[i][k] * x[k][j]).sum();
                if s % self.det != 0 {
                    return None;
                }
                out[i][j] = s / self.det;
            }
        }
        Some(out)
    }
}

/// Row-HNFs of the lattices L with qℤ^m ⊆ L ⊆ ℤ^m and [ℤ^m : L] = q^i.
pub(crate) fn lattices_above(m: usize, q: i64, i: u32) -> Vec<Vec<Vec<i64>>> {
    hnf_matrices(m, q, i)
        .into_iter()
        .filter(|h| {
            let g = Gamma::from_row_hnf(h);
            (0..m).all(|k| {
                let col: Vec<Vec<i64>> = (0..m).map(|r| vec![if r == k { q } else { 0 }]).collect();
                g.divide(&col).is_some()
            })
        })
        .collect()
}

fn max_minor_valuation(x: &[Vec<i64>], q: u64) -> Option<u32> {
    let minors = intmat::maximal_minors(&intmat::to_big(x));
    minors.iter().filter(|v| !v.is_zero()).map(|v| intmat::valuation(v, q)).min()
}

/// A lift X + c·q^e·E of full rank with small minor valuation.
fn full_rank_lift(x: &[Vec<i64>], q: i64, e: u32) -> (Vec<Vec<i64>>, u32) {
    let (m, n) = (x.len(), x[0].len());
    let step = q.pow(e);
    let mut best: Option<(u32, Vec<Vec<i64>>)> = None;
    for shift in 0..n.min(m + 1) {
        for c in 0..4i64 {
            let mut y = x.to_vec();
            for i in 0..m {
                y[i][(i + shift) % n] += c * step;
            }
            if let Some(v) = max_minor_valuation(&y, q as u64) {
                if best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, y));
                }
            }
        }
    }
    let (v, y) = best.expect("some lift has full rank");
    (y, v)
}

pub fn tamagawa_inversion_check(m: usize, n: usize, q: u64, e: u32, seed: u64) -> Result<InversionReport> {
    if !(1 <= m && m < n) {
        return Err(Error::Domain("need 1 ≤ m < n".into()));
    }
    if !crate::special::is_prime(q) || e == 0 {
        return Err(Error::Domain("need a prime q and e ≥ 1".into()));
    }
    let qi = q as i64;
    let modulus = qi.checked_pow(e).ok_or_else(|| Error::Resource("q^e overflows".into()))?;
    let space = (modulus as f64).powi((m * n) as i32);
    let exhaustive = space <= INVERSION_EXHAUSTIVE_LIMIT;

    let classes: Vec<Vec<Vec<i64>>> = if exhaustive {
        let mut out = Vec::with_capacity(space as usize);
        super::for_each_tuple(m * n, modulus, |t| out.push(t.chunks(n).map(|r| r.to_vec()).collect()));
        out
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..INVERSION_SAMPLES)
            .map(|_| (0..m).map(|_| (0..n).map(|_| rng.gen_range(0..modulus)).collect()).collect())
            .collect()
    };

    let backward: Vec<Vec<Gamma>> = (0..=m as u32)
        .map(|i| lattices_above(m, qi, i).iter().map(|h| Gamma::from_row_hnf(h)).collect())
        .collect();

    let lifts: Vec<(Vec<Vec<i64>>, u32)> = classes.par_iter().map(|x| full_rank_lift(x, qi, e)).collect();
    let vmax = lifts.iter().map(|l| l.1).max().unwrap_or(0);
    let mut forward: Vec<Vec<Gamma>> = Vec::new();
    let mut total = 0usize;
    for k in 0..=vmax {
        let hs = hnf_matrices(m, qi, k);
        total += hs.len();
        if total > GAMMA_BUDGET {
            return Err(Error::Resource(format!(
                "more than {GAMMA_BUDGET} coset representatives needed up to index {q}^{k}"
            )));
        }
        forward.push(hs.iter().map(|h| Gamma::from_row_hnf(h)).collect());
    }

    let outcomes: Vec<(bool, bool)> = classes
        .par_iter()
        .zip(&lifts)
        .map(|(x, (lift, v))| {
            let fpr = intmat::rank_mod_p(x, qi) == m;
            let mut rhs: i64 = 0;
            for (i, gs) in backward.iter().enumerate() {
                let i = i as u32;
                let w = qi.pow(i * i.saturating_sub(1) / 2) * if i.is_multiple_of(2) { 1 } else { -1 };
                rhs += w * gs.iter().filter(|g| g.divide(x).is_some()).count() as i64;
            }
            let back_ok = rhs == fpr as i64;
            let mut hits = 0;
            for gs in &forward[..=*v as usize] {
                for g in gs {
                    if let Some(y) = g.divide(lift) {
                        if intmat::rank_mod_p(&y, qi) == m {
                            hits += 1;
                        }
                    }
                }
            }
            (back_ok, hits == 1)
        })
        .collect();

    let mut report = InversionReport {
        m,
        n,
        q,
        e,
        classes: classes.len() as u64,
        exhaustive,
        backward_failures: 0,
        forward_failures: 0,
        first_failure: None,
    };
    for (x, (b, f)) in classes.iter().zip(outcomes) {
        report.backward_failures += (!b) as u64;
        report.forward_failures += (!f) as u64;
        if (!b || !f) && report.first_failure.is_none() {
            report.first_failure = Some(x.clone());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_zeta_examples() {
        let z = local_zeta_identity(1, 2, 2, 20).unwrap();
        assert_eq!(z.target, BigRational::new(4.into(), 3.into()));
        assert!(z.gap > 0.0 && z.gap < 2f64.powi(-20));
        let z = local_zeta_identity(2, 3, 2, 25).unwrap();
        assert_eq!(z.target, BigRational::new(32.into(), 21.into()));
        assert!(z.gap < 1e-6 && z.gap <= z.tail_bound && z.gaps_decrease());
        let z = local_zeta_identity(2, 4, 3, 15).unwrap();
        assert!(z.gap < 1e-6 && z.gap <= z.tail_bound);
        assert!(matches!(local_zeta_identity(2, 2, 2, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn smith_local_examples() {
        let s = smith_local(&[vec![2, 0, 0], vec![0, 2, 0]], 2).unwrap();
        assert_eq!(s.exponents, vec![Some(1), Some(1)]);
        let s = smith_local(&[vec![2, 0, 0], vec![0, 1, 0]], 2).unwrap();
        assert_eq!(s.exponents, vec![Some(0), Some(1)]);
        let s = smith_local(&[vec![1, 2]], 5).unwrap();
        assert_eq!(s.exponents, vec![Some(0)]);
        let s = smith_local(&[vec![1, 2, 3], vec![2, 4, 6]], 3).unwrap();
        assert_eq!(s.exponents, vec![Some(0), None]);
    }

    fn unimodular(rng: &mut rand_chacha::ChaCha8Rng, k: usize) -> Vec<Vec<i64>> {
        let mut a: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect();
        for _ in 0..8 {
            let (i, j) = (rng.gen_range(0..k), rng.gen_range(0..k));
            if i != j {
                let c = rng.gen_range(-2..=2);
                let v = a[j].clone();
                for (x, y) in a[i].iter_mut().zip(v) {
                    *x += c * y;
                }
            }
        }
        a
    }

    fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        a.iter()
            .map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).map(|(x, br)| x * br[j]).sum()).collect())
            .collect()
    }

    #[test]
    fn smith_local_reassembles_and_is_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(m..=4);
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let x: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-12..=12)).collect()).collect();
            if x.iter().flatten().all(|&v| v == 0) {
                continue;
            }
            let s = smith_local(&x, p).unwrap();
            assert_eq!(s.reassemble(p), intmat::to_big(&x));
            let pi = intmat::to_i64(&s.primitive).unwrap();
            assert_eq!(intmat::rank_mod_p(&pi, p as i64), m);
            let y = mul(&mul(&unimodular(&mut rng, m), &x), &unimodular(&mut rng, n));
            assert_eq!(smith_local(&y, p).unwrap().exponents, s.exponents);
        }
    }

    #[test]
    fn exponents_match_minor_gcds() {
        // a_1 + … + a_i = v_p(gcd of i×i minors)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let x: Vec<Vec<i64>> = (0..2).map(|_| (0..3).map(|_| 2 * rng.gen_range(-6..=6)).collect()).collect();
            let s = smith_local(&x, 2).unwrap();
            let g1 = x.iter().flatten().filter(|&&v| v != 0).map(|&v| intmat::valuation_i64(v, 2)).min();
            let g2 = max_minor_valuation(&x, 2);
            assert_eq!(s.exponents[0], g1);
            if let (Some(a), Some(b)) = (s.exponents[0], s.exponents[1]) {
                assert_eq!(Some(a + b), g2);
            }
        }
    }

    #[test]
    fn inversion_small_cases() {
        for (m, n, q, e, classes) in [(1, 2, 2, 2, 16), (2, 3, 3, 1, 729)] {
            let r = tamagawa_inversion_check(m, n, q, e, 0).unwrap();
            assert!(r.exhaustive && r.passed(), "{r:?}");
            assert_eq!(r.classes, classes);
        }
    }

    /// Subspaces of 𝔽_q^m by dimension, from spans of all small generating sets.
    fn subspace_counts(m: usize, q: i64) -> Vec<usize> {
        let mut vecs = Vec::new();
        super::super::for_each_tuple(m, q, |v| vecs.push(v.to_vec()));
        let mut seen = std::collections::BTreeSet::new();
        let span = |gens: &[Vec<i64>]| {
            let mut out = std::collections::BTreeSet::new();
            super::super::for_each_tuple(gens.len(), q, |c| {
                let v: Vec<i64> =
                    (0..m).map(|j| gens.iter().zip(c).map(|(g, x)| g[j] * x).sum::<i64>() % q).collect();
                out.insert(v);
            });
            out
        };
        super::super::for_each_tuple(m, vecs.len() as i64, |idx| {
            let gens: Vec<Vec<i64>> = idx.iter().map(|&i| vecs[i as usize].clone()).collect();
            seen.insert(span(&gens));
        });
        let mut counts = vec![0; m + 1];
        for s in seen {
            let dim = (s.len() as f64).log(q as f64).round() as usize;
            counts[dim] += 1;
        }
        counts
    }

    #[test]
    fn lattices_above_match_subspaces() {
        for (m, q) in [(2usize, 2i64), (2, 3), (3, 2)] {
            let sub = subspace_counts(m, q);
            for i in 0..=m {
                // index q^i ↔ subspace of dimension m − i
                assert_eq!(lattices_above(m, q, i as u32).len(), sub[m - i], "m={m} q={q} i={i}");
            }
        }
    }
}
