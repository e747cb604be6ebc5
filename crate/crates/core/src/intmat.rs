//! Exact integer matrix algorithms: Hermite and Smith normal forms,
//! determinants, minors and ranks over prime fields.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type BigMatrix = Vec<Vec<BigInt>>;

pub fn to_big(a: &[Vec<i64>]) -> BigMatrix {
    a.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn to_i64(a: &BigMatrix) -> Option<Vec<Vec<i64>>> {
    a.iter()
        .map(|r| r.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
        .collect()
}

fn row_axpy(dst: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// Row-style Hermite normal form of the row span.
///
/// The result is upper echelon with positive pivots and the entries above
/// each pivot reduced into `[0, pivot)`. Zero rows are dropped, so the
/// output is a basis of the row lattice in canonical form.
pub fn hnf(a: &BigMatrix) -> BigMatrix {
    let mut a = a.clone();
    let rows = a.len();
    if rows == 0 {
        return a;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let piv = (r..rows)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(piv) = piv else { break };
            a.swap(r, piv);
            let mut done = true;
            for i in r + 1..rows {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    let (head, tail) = a.split_at_mut(i);
                    row_axpy(&mut tail[0], &q, &head[r]);
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                let (head, tail) = a.split_at_mut(r);
                row_axpy(&mut head[i], &q, &tail[0]);
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

pub fn hnf_i64(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    to_i64(&hnf(&to_big(a))).expect("HNF entries exceed i64")
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(a: &BigMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

pub fn det_i64(a: &[Vec<i64>]) -> BigInt {
    det(&to_big(a))
}

/// All maximal (m×m) minors of an m×n matrix with m ≤ n, in lexicographic
/// order of column subsets.
pub fn maximal_minors(a: &BigMatrix) -> Vec<BigInt> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    combinations(n, m)
        .into_iter()
        .map(|cols| {
            let sub: BigMatrix = a
                .iter()
                .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
                .collect();
            det(&sub)
        })
        .collect()
}

/// k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn mat_mul(a: &BigMatrix, b: &BigMatrix) -> BigMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> BigMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Smith normal form with transforms: `u · a · v = diag`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub u: BigMatrix,
    pub u_inv: BigMatrix,
    pub v: BigMatrix,
    pub v_inv: BigMatrix,
}

pub fn smith(a: &BigMatrix) -> Smith {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut a = a.clone();
    let mut u = identity(m);
    let mut u_inv = identity(m);
    let mut v = identity(n);
    let mut v_inv = identity(n);

    // Row op "row_i -= q·row_t"; inverse acts on columns of u_inv.
    let row_sub = |a: &mut BigMatrix, u: &mut BigMatrix, u_inv: &mut BigMatrix, i: usize, t: usize, q: &BigInt| {
        let (ai, at) = pair_mut(a, i, t);
        row_axpy(ai, q, at);
        let (ui, ut) = pair_mut(u, i, t);
        row_axpy(ui, q, ut);
        for r in u_inv.iter_mut() {
            let add = q * &r[i];
            r[t] += add;
        }
    };
    // Column op "col_j -= q·col_t"; inverse acts on rows of v_inv.
    let col_sub = |a: &mut BigMatrix, v: &mut BigMatrix, v_inv: &mut BigMatrix, j: usize, t: usize, q: &BigInt| {
        for r in a.iter_mut() {
            let s = q * &r[t];
            r[j] -= s;
        }
        for r in v.iter_mut() {
            let s = q * &r[t];
            r[j] -= s;
        }
        let (vt, vj) = pair_mut(v_inv, t, j);
        for (x, y) in vt.iter_mut().zip(vj.iter()) {
            *x += q * y;
        }
    };

    let steps = m.min(n);
    let mut diag = Vec::with_capacity(m);
    for t in 0..steps {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            if bi != t {
                a.swap(bi, t);
                u.swap(bi, t);
                for r in u_inv.iter_mut() {
                    r.swap(bi, t);
                }
            }
            if bj != t {
                for r in a.iter_mut() {
                    r.swap(bj, t);
                }
                for r in v.iter_mut() {
                    r.swap(bj, t);
                }
                v_inv.swap(bj, t);
            }
            let mut clean = true;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    row_sub(&mut a, &mut u, &mut u_inv, i, t, &q);
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    col_sub(&mut a, &mut v, &mut v_inv, j, t, &q);
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    // row_t += row_i
                    let minus_one = -BigInt::one();
                    row_sub(&mut a, &mut u, &mut u_inv, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
            for r in u_inv.iter_mut() {
                r[t] = -&r[t];
            }
        }
        diag.push(a[t][t].clone());
    }
    while diag.len() < m {
        diag.push(BigInt::zero());
    }
    Smith { diag, u, u_inv, v, v_inv }
}

fn pair_mut<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    assert_ne!(i, j);
    if i < j {
        let (a, b) = v.split_at_mut(j);
        (&mut a[i], &mut b[0])
    } else {
        let (a, b) = v.split_at_mut(i);
        (&mut b[0], &mut a[j])
    }
}

/// Rank of an integer matrix reduced modulo the prime `p`.
pub fn rank_mod_p(a: &[Vec<i64>], p: i64) -> usize {
    let mut m: Vec<Vec<i64>> = a
        .iter()
        .map(|r| r.iter().map(|x| x.rem_euclid(p)).collect())
        .collect();
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = mod_inv(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] - f * m[r][j]).rem_euclid(p);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Inverse of `a` modulo the prime `p`.
pub fn mod_inv(a: i64, p: i64) -> i64 {
    let g = (a as i128).extended_gcd(&(p as i128));
    assert!(g.gcd == 1, "{a} not invertible modulo {p}");
    (g.x.rem_euclid(p as i128)) as i64
}

/// Adjugate of a square integer matrix, so that `adj · a = det · I`.
pub fn adjugate(a: &BigMatrix) -> BigMatrix {
    let n = a.len();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: BigMatrix = a
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let d = det(&minor);
            out[j][i] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    out
}

/// Exponent of the prime `p` in a nonzero integer.
pub fn valuation(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while x.is_multiple_of(&p) {
        x /= &p;
        v += 1;
    }
    v
}

pub fn valuation_i64(mut x: i64, p: i64) -> u32 {
    assert!(x != 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(a: &[&[i64]]) -> BigMatrix {
        a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn hnf_of_small_lattice() {
        let h = hnf(&big(&[&[4, 6], &[2, 2], &[0, 5]]));
        assert_eq!(h, big(&[&[2, 0], &[0, 1]]));
        let h = hnf(&big(&[&[3, 1], &[0, 2]]));
        assert_eq!(h, big(&[&[3, 1], &[0, 2]]));
        let h = hnf(&big(&[&[-3, -1], &[0, -2]]));
        assert_eq!(h, big(&[&[3, 1], &[0, 2]]));
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = big(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let d = det(&a);
        assert_eq!(d, BigInt::from(18));
        let prod = mat_mul(&adjugate(&a), &a);
        for (i, row) in prod.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == j { d.clone() } else { BigInt::zero() });
            }
        }
        assert_eq!(det(&big(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
    }

    #[test]
    fn smith_reassembles() {
        let a = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let d = mat_mul(&mat_mul(&s.u, &a), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(d[i][j], want);
            }
        }
        assert_eq!(mat_mul(&s.u, &s.u_inv), identity(3));
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(3));
    }

    #[test]
    fn smith_rectangular_and_singular() {
        let a = big(&[&[2, 0, 0], &[0, 1, 0]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(2)]);
        let a = big(&[&[1, 2], &[2, 4]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::zero()]);
    }

    #[test]
    fn ranks_mod_p() {
        assert_eq!(rank_mod_p(&[vec![1, 2], vec![2, 4]], 5), 1);
        assert_eq!(rank_mod_p(&[vec![2, 0], vec![0, 2]], 2), 0);
        assert_eq!(rank_mod_p(&[vec![1, 0, 1], vec![0, 1, 1]], 2), 2);
    }

    #[test]
    fn minors_of_two_by_three() {
        let a = big(&[&[1, 2, 3], &[4, 5, 6]]);
        let m: Vec<i64> = maximal_minors(&a).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(m, vec![-3, -6, -3]);
    }
}
