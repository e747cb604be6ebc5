use crate::error::{Error, Result};
use crate::intmat::{combinations, smith};
use crate::ratmat::{rank, rref, RatMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::collections::{BTreeSet, HashMap, HashSet};

const BRUTE_DENSITY_LIMIT: f64 = 1e7;
const MAX_ECHELON_FORMS: f64 = 1e6;

/// A rank-m row-reduced echelon matrix over ℚ with the density N(D) of
/// x ∈ ℤ^m such that xD ∈ ℤ^k.
#[derive(Debug, Clone, PartialEq)]
pub struct EchelonForm {
    pub m: usize,
    pub k: usize,
    pub matrix: RatMatrix,
    pub pivots: Vec<usize>,
    pub density: BigRational,
}

fn common_denominator(a: &RatMatrix) -> BigInt {
    a.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

impl EchelonForm {
    pub fn new(matrix: RatMatrix) -> Result<Self> {
        let m = matrix.len();
        if m == 0 {
            return Err(Error::Domain("echelon form needs at least one row".into()));
        }
        let k = matrix[0].len();
        if matrix.iter().any(|r| r.len() != k) || m > k {
            return Err(Error::Domain(format!("bad echelon shape {m}×{k}")));
        }
        let (reduced, pivots) = rref(&matrix);
        if pivots.len() != m || reduced != matrix {
            return Err(Error::Domain("matrix is not a rank-m row-reduced echelon form".into()));
        }
        let density = density_snf(&matrix);
        Ok(Self { m, k, matrix, pivots, density })
    }

    /// Counts the box [0, L)^m, L the common denominator. None past the budget.
    pub fn density_brute_force(&self) -> Option<BigRational> {
        let l = common_denominator(&self.matrix).to_u64()?;
        if (l as f64).powi(self.m as i32) > BRUTE_DENSITY_LIMIT {
            return None;
        }
        let scaled: Vec<Vec<BigInt>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|x| x.numer() * (BigInt::from(l) / x.denom())).collect())
            .collect();
        let scaled: Vec<Vec<i64>> =
            scaled.iter().map(|r| r.iter().map(|x| x.to_i64().map(|v| v.rem_euclid(l as i64))).collect()).collect::<Option<_>>()?;
        let mut x = vec![0i64; self.m];
        let mut hits = 0u64;
        let l = l as i64;
        loop {
            let ok = (0..self.k).all(|c| (0..self.m).map(|i| x[i] as i128 * scaled[i][c] as i128).sum::<i128>() % l as i128 == 0);
            hits += ok as u64;
            let mut i = 0;
            while i < self.m {
                x[i] += 1;
                if x[i] < l {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i == self.m {
                break;
            }
        }
        Some(BigRational::new(BigInt::from(hits), BigInt::from(l).pow(self.m as u32)))
    }

    pub fn has_zero_column(&self) -> bool {
        (0..self.k).any(|c| self.matrix.iter().all(|r| r[c].is_zero()))
    }

    /// Random rref with the given pivots drawn uniformly, free entries a/b
    /// with 1 ≤ b ≤ max_den and |a| ≤ max_den.
    pub fn random<R: Rng>(m: usize, k: usize, max_den: i64, rng: &mut R) -> Result<Self> {
        if m == 0 || m > k || max_den < 1 {
            return Err(Error::Domain("need 1 ≤ m ≤ k and a positive denominator bound".into()));
        }
        let all = combinations(k, m);
        let pivots = &all[rng.gen_range(0..all.len())];
        let mut d = vec![vec![BigRational::zero(); k]; m];
        for (j, &p) in pivots.iter().enumerate() {
            d[j][p] = BigRational::one();
            for c in p + 1..k {
                if !pivots.contains(&c) {
                    let a = rng.gen_range(-max_den..=max_den);
                    let b = rng.gen_range(1..=max_den);
                    d[j][c] = BigRational::new(a.into(), b.into());
                }
            }
        }
        Self::new(d)
    }
}

/// 1/[ℤ^m : {x : xD ∈ ℤ^k}] from the Smith form of L·D: the condition is
/// x'S ≡ 0 mod L, so the index is ∏ L/gcd(L, s_i).
fn density_snf(d: &RatMatrix) -> BigRational {
    let l = common_denominator(d);
    let scaled: Vec<Vec<BigInt>> = d.iter().map(|r| r.iter().map(|x| x.numer() * (&l / x.denom())).collect()).collect();
    let s = smith(&scaled);
    let mut index = BigInt::one();
    for i in 0..d.len() {
        let si = s.diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        index *= &l / l.gcd(&si);
    }
    BigRational::new(BigInt::one(), index)
}

fn bounded_rationals(b: u64, h: u64) -> Vec<BigRational> {
    let mut set = BTreeSet::new();
    for den in 1..=b as i64 {
        for num in -(h as i64)..=h as i64 {
            set.insert(BigRational::new(num.into(), den.into()));
        }
    }
    set.into_iter().collect()
}

/// All rank-m rref matrices m×k whose free entries are a/b with |a| ≤ H,
/// 1 ≤ b ≤ B.
pub fn echelon_forms(m: usize, k: usize, b: u64, h: u64) -> Result<Vec<EchelonForm>> {
    if m == 0 || m > k {
        return Err(Error::Domain(format!("need 1 ≤ m ≤ k (got m={m}, k={k})")));
    }
    let vals = bounded_rationals(b.max(1), h);
    let mut out = Vec::new();
    for pivots in combinations(k, m) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(j, &p)| (p + 1..k).filter(|c| !pivots.contains(c)).map(move |c| (j, c)))
            .collect();
        let total = (vals.len() as f64).powi(free.len() as i32);
        if total + out.len() as f64 > MAX_ECHELON_FORMS {
            return Err(Error::Resource(format!("more than {MAX_ECHELON_FORMS:e} echelon forms")));
        }
        let mut base = vec![vec![BigRational::zero(); k]; m];
        for (j, &p) in pivots.iter().enumerate() {
            base[j][p] = BigRational::one();
        }
        crate::hecke::for_each_tuple(free.len(), vals.len() as i64, |t| {
            let mut d = base.clone();
            for (&(j, c), &v) in free.iter().zip(t) {
                d[j][c] = vals[v as usize].clone();
            }
            let density = density_snf(&d);
            out.push(EchelonForm { m, k, matrix: d, pivots: pivots.clone(), density });
        });
    }
    Ok(out)
}

/// A finitely supported rational-valued function on k-tuples of vectors in
/// ℚ^n, keyed by the k·n coordinates listed row by row.
#[derive(Debug, Clone)]
pub struct FiniteFunction {
    pub k: usize,
    pub n: usize,
    pub table: HashMap<Vec<BigRational>, BigRational>,
}

impl FiniteFunction {
    /// Indicator of {−g, …, g}^{kn}.
    pub fn grid_indicator(k: usize, n: usize, g: i64) -> Self {
        let side = 2 * g + 1;
        let mut table = HashMap::new();
        crate::hecke::for_each_tuple(k * n, side, |t| {
            let key = t.iter().map(|&v| BigRational::from_integer((v - g).into())).collect();
            table.insert(key, BigRational::one());
        });
        Self { k, n, table }
    }

    pub fn from_entries<I: IntoIterator<Item = (Vec<BigRational>, BigRational)>>(k: usize, n: usize, entries: I) -> Result<Self> {
        let mut table = HashMap::new();
        for (key, v) in entries {
            if key.len() != k * n {
                return Err(Error::Domain(format!("entry has {} coordinates, expected {}", key.len(), k * n)));
            }
            if !v.is_zero() {
                *table.entry(key).or_insert_with(BigRational::zero) += v;
            }
        }
        table.retain(|_, v| !v.is_zero());
        Ok(Self { k, n, table })
    }

    fn eval(&self, key: &[BigRational]) -> BigRational {
        self.table.get(key).cloned().unwrap_or_else(BigRational::zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchelonCheck {
    /// Σ f(X) over X with no zero rows.
    pub lhs: BigRational,
    /// Σ_m Σ_D Σ_{Y independent} f(DᵀY).
    pub rhs: BigRational,
    pub forms_used: usize,
}

impl EchelonCheck {
    pub fn equal(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Splits every X into DᵀY with D rref of rank m and Y of rank m, and
/// compares the two sides exactly. D has no zero columns since a zero row of
/// X is a zero column of D. Entries of any contributing D are ratios of m×m
/// minors of the support, so B = H = m!·(G·L)^m suffices, G the largest
/// numerator and L the common denominator.
pub fn echelon_decomposition_check(f: &FiniteFunction) -> Result<EchelonCheck> {
    let (k, n) = (f.k, f.n);
    if k == 0 || k > 3 {
        return Err(Error::Domain(format!("k must be in 1..=3 (got {k})")));
    }
    let row = |key: &[BigRational], i: usize| key[i * n..(i + 1) * n].to_vec();
    let lhs = f
        .table
        .iter()
        .filter(|(key, _)| (0..k).all(|i| row(key, i).iter().any(|x| !x.is_zero())))
        .fold(BigRational::zero(), |s, (_, v)| s + v);

    let g = f.table.keys().flatten().map(|x| x.numer().abs()).max().unwrap_or_else(BigInt::zero);
    let l = f.table.keys().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let gl = (g * l).to_u64().ok_or_else(|| Error::Domain("support coordinates too large".into()))?;

    let mut rhs = BigRational::zero();
    let mut forms_used = 0;
    for m in 1..=k.min(n) {
        let fact: u64 = (1..=m as u64).product();
        let bound = fact * gl.pow(m as u32);
        let forms = echelon_forms(m, k, bound, bound)?;
        for d in forms.iter().filter(|d| !d.has_zero_column()) {
            forms_used += 1;
            // Y is read off at the pivot rows of X
            let ys: HashSet<Vec<BigRational>> =
                f.table.keys().map(|key| d.pivots.iter().flat_map(|&p| row(key, p)).collect()).collect();
            for y in ys {
                let ymat: RatMatrix = y.chunks(n).map(|c| c.to_vec()).collect();
                if rank(&ymat) < m {
                    continue;
                }
                let x: Vec<BigRational> = (0..k)
                    .flat_map(|i| {
                        let ymat = &ymat;
                        (0..n).map(move |c| (0..m).fold(BigRational::zero(), |s, j| s + &d.matrix[j][i] * &ymat[j][c]))
                    })
                    .collect();
                rhs += f.eval(&x);
            }
        }
    }
    Ok(EchelonCheck { lhs, rhs, forms_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::rat;
    use rand::SeedableRng;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn densities() {
        let d = EchelonForm::new(vec![vec![rat(1), q(1, 2)]]).unwrap();
        assert_eq!(d.density, q(1, 2));
        let d = EchelonForm::new(vec![vec![rat(1), q(2, 3)]]).unwrap();
        assert_eq!(d.density, q(1, 3));
        let d = EchelonForm::new(vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]).unwrap();
        assert_eq!(d.density, rat(1));
        // x·(1/2, 1/3) integral needs 6 | x
        let d = EchelonForm::new(vec![vec![rat(1), q(1, 2), q(1, 3)]]).unwrap();
        assert_eq!(d.density, q(1, 6));
        assert!(EchelonForm::new(vec![vec![rat(2), rat(1)]]).is_err());
        assert!(EchelonForm::new(vec![vec![rat(1), rat(1)], vec![rat(1), rat(0)]]).is_err());
    }

    #[test]
    fn density_matches_box_count() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let m = rng.gen_range(1..=2);
            let d = EchelonForm::random(m, 3, 12, &mut rng).unwrap();
            let brute = d.density_brute_force().expect("within budget");
            assert_eq!(d.density, brute, "{:?}", d.matrix);
        }
    }

    #[test]
    fn form_counts() {
        // k = 2, m = 1: (1, c) for each c plus (0, 1)
        let vals = bounded_rationals(2, 2).len();
        assert_eq!(vals, 7);
        assert_eq!(echelon_forms(1, 2, 2, 2).unwrap().len(), vals + 1);
        assert_eq!(echelon_forms(2, 2, 5, 5).unwrap().len(), 1);
        // k = 3, m = 2: pivots (0,1) leave two free entries, (0,2) one, (1,2) none
        assert_eq!(echelon_forms(2, 3, 2, 2).unwrap().len(), vals * vals + vals + 1);
    }

    #[test]
    fn single_vector_case() {
        let f = FiniteFunction::grid_indicator(1, 2, 2);
        let c = echelon_decomposition_check(&f).unwrap();
        assert!(c.equal());
        assert_eq!(c.lhs, rat(24));
    }

    #[test]
    fn proportional_pairs() {
        let mut entries = Vec::new();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                let x = [a, b];
                let key = x.iter().chain(x.iter().map(|v| v * 2).collect::<Vec<_>>().iter()).map(|&v| rat(v)).collect();
                entries.push((key, rat(1)));
            }
        }
        let f = FiniteFunction::from_entries(2, 2, entries).unwrap();
        let c = echelon_decomposition_check(&f).unwrap();
        assert_eq!(c.lhs, rat(24));
        assert!(c.equal());
    }

    #[test]
    fn weighted_rational_support() {
        let entries = vec![
            (vec![q(1, 2), rat(0), rat(1), rat(1)], rat(3)),
            (vec![rat(1), rat(1), q(-1, 2), q(-1, 2)], q(1, 7)),
            (vec![rat(0), rat(0), rat(1), rat(1)], rat(5)),
        ];
        let f = FiniteFunction::from_entries(2, 2, entries).unwrap();
        let c = echelon_decomposition_check(&f).unwrap();
        assert_eq!(c.lhs, rat(3) + q(1, 7));
        assert!(c.equal());
    }

    #[test]
    fn pair_grid_instance() {
        let f = FiniteFunction::grid_indicator(2, 3, 2);
        let c = echelon_decomposition_check(&f).unwrap();
        assert_eq!(c.lhs, rat(124 * 124));
        assert_eq!(c.rhs, c.lhs);
    }
}
