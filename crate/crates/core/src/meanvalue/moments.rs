use crate::error::{Error, Result};
use crate::numberfield::{dedekind_zeta, NumberField};
use crate::special::{ball_volume, totients};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

/// V² + Σ_{c ∈ ℚ^*} vol(B_R ∩ c^{−1}B_R)·(density of x with x, cx integral).
#[derive(Debug, Clone, Copy)]
pub struct SecondMoment {
    pub value: f64,
    /// V = V_n·R^n.
    pub volume: f64,
    /// The c-series, value − V².
    pub series: f64,
    /// Largest max(a, b) included.
    pub truncation: u64,
    /// Bound on the omitted part of the c-series.
    pub tail_bound: f64,
}

impl SecondMoment {
    /// The c = 1 term (equal to the c = −1 term): the full ball.
    pub fn c_one_term(&self) -> f64 {
        self.volume
    }
}

const MAX_SERIES_TRUNCATION: f64 = 1e8;

/// Second moment prediction over ℚ for the ball of radius R with integral
/// finite part, with the series truncated so that the tail stays below
/// `rel_tol` times the result.
///
/// For c = ±a/b in lowest terms the term is V·max(a, b)^{−n}; grouping by
/// N = max(a, b) gives 2V·(1 + Σ_{N≥2} 2φ(N)N^{−n}), and the tail past T is
/// at most 4V·T^{2−n}/(n−2).
pub fn second_moment_prediction(n: usize, radius: f64, rel_tol: f64) -> Result<SecondMoment> {
    if n <= 2 {
        return Err(Error::Domain(format!("the second moment is finite only for n ≥ 3 (got {n})")));
    }
    if !(radius > 0.0) || !(rel_tol > 0.0) {
        return Err(Error::Domain("radius and tolerance must be positive".into()));
    }
    let v = ball_volume(n) * radius.powi(n as i32);
    let floor = v * v + 2.0 * v;
    let e = (n - 2) as f64;
    let t = (4.0 * v / (e * rel_tol * floor)).powf(1.0 / e).ceil().max(2.0);
    if t > MAX_SERIES_TRUNCATION {
        return Err(Error::Resource(format!("series truncation {t:e} exceeds {MAX_SERIES_TRUNCATION:e}")));
    }
    second_moment_truncated(n, radius, t as u64)
}

/// The same series cut at max(a, b) ≤ truncation.
pub fn second_moment_truncated(n: usize, radius: f64, truncation: u64) -> Result<SecondMoment> {
    if n <= 2 {
        return Err(Error::Domain(format!("the second moment is finite only for n ≥ 3 (got {n})")));
    }
    if truncation as f64 > MAX_SERIES_TRUNCATION {
        return Err(Error::Resource(format!("series truncation {truncation} exceeds {MAX_SERIES_TRUNCATION:e}")));
    }
    let v = ball_volume(n) * radius.powi(n as i32);
    let e = (n - 2) as f64;
    let t = truncation.max(1) as usize;
    let phi = totients(t);
    // sum small terms first
    let s: f64 = (2..=t).rev().map(|k| 2.0 * phi[k] as f64 * (k as f64).powi(-(n as i32))).sum::<f64>() + 1.0;
    let series = 2.0 * v * s;
    let tail_bound = 4.0 * v * (t as f64).powf(-e) / e;
    Ok(SecondMoment { value: v * v + series, volume: v, series, truncation: t as u64, tail_bound })
}

pub const PRIMITIVE_EXHAUSTIVE_LIMIT: f64 = 2e7;
pub const PRIMITIVE_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
pub struct PrimitiveDensity {
    pub empirical: f64,
    pub target: f64,
    pub exhaustive: bool,
    pub trials: u64,
}

impl PrimitiveDensity {
    pub fn gap(&self) -> f64 {
        (self.empirical - self.target).abs()
    }

    pub fn relative_gap(&self) -> f64 {
        self.gap() / self.target
    }
}

fn det_small(a: &[Vec<i64>]) -> i128 {
    // Bareiss over i128
    let n = a.len();
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else { return 0 };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Primitive ⟺ the maximal minors are coprime ⟺ full rank mod every prime.
pub fn is_primitive(x: &[Vec<i64>]) -> bool {
    let (m, n) = (x.len(), x[0].len());
    if m == 1 {
        return x[0].iter().fold(0i64, |g, &v| g.gcd(&v)) == 1;
    }
    let mut g: i128 = 0;
    for cols in crate::intmat::combinations(n, m) {
        let sub: Vec<Vec<i64>> = x.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        g = g.gcd(&det_small(&sub));
        if g == 1 {
            return true;
        }
    }
    false
}

/// Share of primitive m×n integer matrices with entries in [−N, N], against
/// ∏_{i<m} ζ(n−i)^{−1}. Exhaustive up to the budget, otherwise seeded
/// uniform sampling.
pub fn primitive_density(n: usize, m: usize, half_width: i64, seed: u64) -> Result<PrimitiveDensity> {
    if !(1 <= m && m < n) {
        return Err(Error::Domain("need 1 ≤ m < n".into()));
    }
    if half_width < 10 {
        return Err(Error::Domain("box half-width must be at least 10".into()));
    }
    let q = NumberField::rational();
    let mut target = 1.0;
    for i in 0..m {
        target /= dedekind_zeta(&q, (n - i) as u32, 1e-7)?.estimate;
    }
    let side = 2 * half_width + 1;
    let space = (side as f64).powi((m * n) as i32);
    let exhaustive = space <= PRIMITIVE_EXHAUSTIVE_LIMIT;
    let (hits, trials) = if exhaustive {
        let len = m * n;
        // split on the first entry
        let hits: u64 = (0..side)
            .into_par_iter()
            .map(|first| {
                let mut t = vec![0i64; len];
                t[0] = first;
                let mut hits = 0u64;
                loop {
                    let x: Vec<Vec<i64>> = t.chunks(n).map(|r| r.iter().map(|v| v - half_width).collect()).collect();
                    hits += is_primitive(&x) as u64;
                    let mut i = len;
                    let done = loop {
                        if i == 1 {
                            break true;
                        }
                        i -= 1;
                        t[i] += 1;
                        if t[i] < side {
                            break false;
                        }
                        t[i] = 0;
                    };
                    if done {
                        break;
                    }
                }
                hits
            })
            .sum();
        (hits, space as u64)
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0u64;
        for _ in 0..PRIMITIVE_SAMPLES {
            let x: Vec<Vec<i64>> =
                (0..m).map(|_| (0..n).map(|_| rng.gen_range(-half_width..=half_width)).collect()).collect();
            hits += is_primitive(&x) as u64;
        }
        (hits, PRIMITIVE_SAMPLES as u64)
    };
    Ok(PrimitiveDensity { empirical: hits as f64 / trials as f64, target, exhaustive, trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_moment_structure() {
        let s = second_moment_prediction(3, 2.0, 1e-6).unwrap();
        assert!((s.c_one_term() - 33.510321638).abs() < 1e-3);
        assert!(s.tail_bound < 1e-6 * s.value);
        // closed form: V² + 2V·(2ζ(2)/ζ(3) − 1)
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        let z3 = 1.2020569031595942;
        let v = s.volume;
        let exact = v * v + 2.0 * v * (2.0 * z2 / z3 - 1.0);
        assert!((s.value - exact).abs() <= s.tail_bound + 1e-9 * exact, "{} vs {exact}", s.value);
        assert!(matches!(second_moment_prediction(2, 1.0, 1e-6), Err(Error::Domain(_))));
    }

    #[test]
    fn truncation_at_two_hundred_is_not_enough() {
        // the c-series tail beyond max(a, b) = 200 is about (12/π²)·V/200
        let s = second_moment_prediction(3, 2.0, 1e-6).unwrap();
        assert!(s.truncation > 200);
    }

    #[test]
    fn series_is_homogeneous_in_volume() {
        for n in [3, 4, 5] {
            let a = second_moment_truncated(n, 1.0, 200).unwrap();
            let b = second_moment_truncated(n, 2.0, 200).unwrap();
            let ratio = b.series / a.series;
            assert!((ratio - 2f64.powi(n as i32)).abs() < 1e-9, "n={n}: {ratio}");
            assert!((b.volume / a.volume - 2f64.powi(n as i32)).abs() < 1e-9);
        }
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&[vec![2, 3]]));
        assert!(!is_primitive(&[vec![2, 4, 6]]));
        assert!(is_primitive(&[vec![1, 0, 0], vec![0, 1, 0]]));
        assert!(!is_primitive(&[vec![2, 0, 0], vec![0, 1, 0]]));
        assert!(!is_primitive(&[vec![1, 1, 0], vec![1, -1, 0]]));
        assert!(!is_primitive(&[vec![1, 2, 3], vec![2, 4, 6]]));
    }

    #[test]
    fn coprime_pairs_density() {
        let d = primitive_density(2, 1, 100, 0).unwrap();
        assert!(d.exhaustive);
        assert!(d.relative_gap() < 0.02, "{d:?}");
        // direct gcd count
        let mut c = 0;
        for a in -100i64..=100 {
            for b in -100i64..=100 {
                c += (a.gcd(&b) == 1) as u64;
            }
        }
        assert_eq!(d.empirical, c as f64 / 201.0 / 201.0);
    }
}
