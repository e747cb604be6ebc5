use super::for_each_tuple;
use crate::error::{Error, Result};
use crate::intmat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// |GL_n(ℤ/q^l)| = q^{(l−1)n²}·∏_{i<n} (q^n − q^i).
pub fn gl_order(n: usize, q: u64, l: u32) -> BigInt {
    let qb = BigInt::from(q);
    let n32 = n as u32;
    let mut out = qb.pow((l - 1) * n32 * n32);
    for i in 0..n32 {
        out *= qb.pow(n32) - qb.pow(i);
    }
    out
}

/// Order of the stabilizer {g : row_i(g) ≡ e_i mod q^{l_i}, i ≤ m'} in
/// GL_n(ℤ/q^l), l = l_1 ≥ … ≥ l_{m'}:
/// q^{l·m'(n−m')}·|GL_{n−m'}(ℤ/q^l)|·∏_{i≥2} q^{n(l_1 − l_i)}.
pub fn stabilizer_order(n: usize, q: u64, ls: &[u32]) -> Result<BigInt> {
    check_levels(n, ls)?;
    let mp = ls.len();
    let l = ls[0];
    let qb = BigInt::from(q);
    let mut out = qb.pow(l * (mp * (n - mp)) as u32);
    out *= if n > mp { gl_order(n - mp, q, l) } else { BigInt::one() };
    for &li in &ls[1..] {
        out *= qb.pow(n as u32 * (l - li));
    }
    Ok(out)
}

fn check_levels(n: usize, ls: &[u32]) -> Result<()> {
    if ls.is_empty() || ls.len() >= n {
        return Err(Error::Domain("need 1 ≤ m' < n levels".into()));
    }
    if ls.windows(2).any(|w| w[0] < w[1]) || *ls.last().unwrap() < 1 {
        return Err(Error::Domain("levels must satisfy l_1 ≥ … ≥ l_{m'} ≥ 1".into()));
    }
    Ok(())
}

/// Cofactors of the last row: c_j with det = Σ_j c_j·x_j, reduced mod p.
fn last_row_cofactors(rows: &[Vec<i64>], n: usize, p: i64) -> Vec<i64> {
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &v)| v).collect())
                .collect();
            let d = if minor.is_empty() { BigInt::one() } else { intmat::det_i64(&minor) };
            let sign = if (n - 1 + j).is_multiple_of(2) { 1 } else { -1 };
            let r: i64 = (d % BigInt::from(p)).try_into().unwrap();
            (sign * r).rem_euclid(p)
        })
        .collect()
}

/// Counts n×n matrices over ℤ/q^l invertible mod q whose first rows
/// satisfy the stabilizer congruences, by running over every matrix.
fn count_matrices(n: usize, q: i64, l: u32, ls: &[u32]) -> u64 {
    let modulus = q.pow(l);
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for_each_tuple(n, modulus, |r| rows.push(r.to_vec()));
    let allowed = |i: usize, r: &[i64]| -> bool {
        match ls.get(i) {
            None => true,
            Some(&li) => {
                let m = q.pow(li);
                r.iter().enumerate().all(|(j, &x)| (x - (i == j) as i64).rem_euclid(m) == 0)
            }
        }
    };
    let mut count = 0u64;
    let mut prefix: Vec<Vec<i64>> = Vec::with_capacity(n);
    fn walk(
        n: usize,
        q: i64,
        rows: &[Vec<i64>],
        allowed: &dyn Fn(usize, &[i64]) -> bool,
        prefix: &mut Vec<Vec<i64>>,
        count: &mut u64,
    ) {
        if prefix.len() + 1 == n {
            let c = last_row_cofactors(prefix, n, q);
            for r in rows {
                if !allowed(n - 1, r) {
                    continue;
                }
                let det: i64 = r.iter().zip(&c).map(|(x, y)| x * y).sum();
                if det.rem_euclid(q) != 0 {
                    *count += 1;
                }
            }
            return;
        }
        for r in rows {
            if allowed(prefix.len(), r) {
                prefix.push(r.clone());
                walk(n, q, rows, allowed, prefix, count);
                prefix.pop();
            }
        }
    }
    walk(n, q, &rows, &allowed, &mut prefix, &mut count);
    count
}

pub fn gl_order_brute_force(n: usize, q: u64, l: u32) -> u64 {
    count_matrices(n, q as i64, l, &[])
}

pub fn stabilizer_order_brute_force(n: usize, q: u64, ls: &[u32]) -> Result<u64> {
    check_levels(n, ls)?;
    Ok(count_matrices(n, q as i64, ls[0], ls))
}

#[derive(Debug, Clone)]
pub struct GroupOrders {
    pub gl_order: BigInt,
    pub stabilizer_order: BigInt,
    /// stab/|GL|·∏_{i<m'} (1 − q^{−(n−i)}).
    pub ratio: BigRational,
    /// q^{−n(l_1 + … + l_{m'})}.
    pub expected_ratio: BigRational,
}

impl GroupOrders {
    pub fn ratio_holds(&self) -> bool {
        self.ratio == self.expected_ratio
    }
}

/// Group and stabilizer orders at level l = l_1 for m' ≤ m < n, with the
/// exact volume ratio identity.
pub fn group_orders(n: usize, q: u64, m: usize, ls: &[u32]) -> Result<GroupOrders> {
    check_levels(n, ls)?;
    if ls.len() > m || m >= n {
        return Err(Error::Domain("need m' ≤ m < n".into()));
    }
    let l = ls[0];
    let gl = gl_order(n, q, l);
    let stab = stabilizer_order(n, q, ls)?;
    let qb = BigInt::from(q);
    let mut ratio = BigRational::new(stab.clone(), gl.clone());
    for i in 0..ls.len() {
        ratio *= BigRational::one() - BigRational::new(BigInt::one(), qb.pow((n - i) as u32));
    }
    let total: u32 = ls.iter().sum();
    let expected_ratio = BigRational::new(BigInt::one(), qb.pow(n as u32 * total));
    Ok(GroupOrders { gl_order: gl, stabilizer_order: stab, ratio, expected_ratio })
}

/// Histogram of X̄·a over all a ∈ 𝔽_p^{n−1}, indexed by the target read as
/// a base-p number (first coordinate most significant).
pub fn crux_histogram(xbar: &[Vec<i64>], p: u64) -> Result<Vec<u64>> {
    let m = xbar.len();
    let p = p as i64;
    if m == 0 || !crate::special::is_prime(p as u64) {
        return Err(Error::Domain("need a nonempty matrix and a prime p".into()));
    }
    if intmat::rank_mod_p(xbar, p) < m {
        return Err(Error::Precondition("rows of X̄ are dependent over 𝔽_p".into()));
    }
    let k = xbar[0].len();
    let mut hist = vec![0u64; (p as usize).pow(m as u32)];
    for_each_tuple(k, p, |a| {
        let mut idx = 0usize;
        for row in xbar {
            let v: i64 = row.iter().zip(a).map(|(x, y)| x * y).sum::<i64>().rem_euclid(p);
            idx = idx * p as usize + v as usize;
        }
        hist[idx] += 1;
    });
    Ok(hist)
}

/// #{a ∈ 𝔽_p^{n−1} : X̄·a = target}.
pub fn crux_equidistribution_check(xbar: &[Vec<i64>], target: &[i64], p: u64) -> Result<u64> {
    if target.len() != xbar.len() {
        return Err(Error::Domain("target length must equal the number of rows".into()));
    }
    let hist = crux_histogram(xbar, p)?;
    let idx = target.iter().fold(0usize, |acc, &t| acc * p as usize + t.rem_euclid(p as i64) as usize);
    Ok(hist[idx])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2, 1), BigInt::from(6));
        assert_eq!(gl_order(2, 2, 2), BigInt::from(96));
        assert_eq!(gl_order_brute_force(2, 2, 1), 6);
        assert_eq!(gl_order_brute_force(2, 2, 2), 96);
        assert_eq!(gl_order_brute_force(2, 3, 2), gl_order(2, 3, 2).try_into().unwrap());
        assert_eq!(gl_order_brute_force(3, 2, 1), 168);
    }

    #[test]
    fn stabilizer_orders() {
        for (n, q, ls) in [(2usize, 2u64, vec![1u32]), (3, 2, vec![1]), (3, 2, vec![2, 1]), (3, 3, vec![1, 1]), (2, 3, vec![2])] {
            let want: u64 = stabilizer_order(n, q, &ls).unwrap().try_into().unwrap();
            assert_eq!(stabilizer_order_brute_force(n, q, &ls).unwrap(), want, "n={n} q={q} ls={ls:?}");
        }
    }

    #[test]
    fn volume_ratio_example() {
        let g = group_orders(3, 2, 2, &[1]).unwrap();
        assert_eq!(g.stabilizer_order, BigInt::from(24));
        assert_eq!(g.ratio, BigRational::new(1.into(), 8.into()));
        assert!(g.ratio_holds());
        assert!(group_orders(3, 2, 2, &[1, 2]).is_err());
    }

    #[test]
    fn crux_examples() {
        assert_eq!(crux_equidistribution_check(&[vec![1, 0]], &[2], 5).unwrap(), 5);
        assert_eq!(crux_equidistribution_check(&[vec![1, 0, 0], vec![0, 1, 0]], &[1, 2], 3).unwrap(), 3);
        let h = crux_histogram(&[vec![1, 2, 0], vec![0, 1, 1]], 3).unwrap();
        assert!(h.iter().all(|&c| c == 3));
        assert!(matches!(
            crux_histogram(&[vec![1, 2], vec![2, 4]], 5),
            Err(Error::Precondition(_))
        ));
    }
}
