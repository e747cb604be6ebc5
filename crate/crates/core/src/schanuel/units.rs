use crate::error::{Error, Result};
use crate::numberfield::{FieldElement, NumberField};

/// M(γ, A): units u modulo torsion with max_σ Log(γu)_σ ∈ A.
#[derive(Debug, Clone)]
pub struct UnitCountQuery {
    pub gamma: FieldElement,
    /// Upper end k of A.
    pub threshold: f64,
    /// Optional lower end of A; A = (−∞, k] when absent.
    pub lower: Option<f64>,
}

impl UnitCountQuery {
    pub fn new(gamma: FieldElement, threshold: f64) -> Result<Self> {
        if gamma.is_zero() {
            return Err(Error::Domain("γ must be nonzero".into()));
        }
        Ok(Self { gamma, threshold, lower: None })
    }

    pub fn with_lower(mut self, lower: f64) -> Self {
        self.lower = Some(lower);
        self
    }

    fn accepts(&self, v: f64) -> bool {
        v <= self.threshold && self.lower.is_none_or(|lo| v >= lo)
    }
}

fn max_coordinate(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Exact count by enumerating u = ζ·∏ε_i^{m_i} over the box forced by k:
/// every coordinate of Log(γu) lies in [log|Nγ| − (r)·k, k].
pub fn unit_count(query: &UnitCountQuery, field: &NumberField) -> Result<u64> {
    if query.gamma.is_zero() {
        return Err(Error::Domain("γ must be nonzero".into()));
    }
    let lg = field.log_embed(&query.gamma)?;
    let r = field.unit_rank();
    if r == 0 {
        return Ok(query.accepts(max_coordinate(&lg)) as u64);
    }
    let k = query.threshold;
    let log_norm: f64 = lg.iter().sum();
    if (r + 1) as f64 * k < log_norm {
        return Ok(0);
    }
    let logs: Vec<Vec<f64>> = field.fundamental_units().iter().map(|u| field.log_embed(u)).collect::<Result<_>>()?;
    // Log(u) = Log(γu) − Log(γ) has coordinates bounded by w
    let lo = log_norm - r as f64 * k;
    let w = lg.iter().map(|g| (k - g).abs().max((lo - g).abs())).fold(0.0, f64::max);
    // |m_i| ≤ Σ_σ |(G^{-1}U)_{iσ}|·w
    let gram: Vec<Vec<f64>> = (0..r)
        .map(|i| (0..r).map(|j| logs[i].iter().zip(&logs[j]).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let gi = super::invert(&gram).ok_or_else(|| Error::Degeneracy("fundamental units are dependent".into()))?;
    let spans: Vec<i64> = (0..r)
        .map(|i| {
            let s: f64 = (0..lg.len()).map(|p| (0..r).map(|j| gi[i][j] * logs[j][p]).sum::<f64>().abs()).sum();
            (s * w).ceil() as i64 + 1
        })
        .collect();
    let total: f64 = spans.iter().map(|&s| (2 * s + 1) as f64).product();
    if total > 1e8 {
        return Err(Error::Resource(format!("unit box of {total:e} exponents")));
    }
    let mut m: Vec<i64> = spans.iter().map(|s| -s).collect();
    let mut count = 0u64;
    loop {
        let v: Vec<f64> =
            (0..lg.len()).map(|p| lg[p] + (0..r).map(|i| m[i] as f64 * logs[i][p]).sum::<f64>()).collect();
        count += query.accepts(max_coordinate(&v)) as u64;
        let mut i = 0;
        while i < r {
            m[i] += 1;
            if m[i] <= spans[i] {
                break;
            }
            m[i] = -spans[i];
            i += 1;
        }
        if i == r {
            break;
        }
    }
    Ok(count)
}

/// (√(r+1)/r!)·((r+1)k − log|Nγ|)^r / R, R the covolume regulator; 0 when
/// (r+1)k < log|Nγ|. Only the upper end of A is used.
pub fn asymptotic_unit_count(query: &UnitCountQuery, field: &NumberField) -> Result<f64> {
    let lg = field.log_embed(&query.gamma)?;
    let r = field.unit_rank();
    let log_norm: f64 = lg.iter().sum();
    let x = (r + 1) as f64 * query.threshold - log_norm;
    if x < 0.0 {
        return Ok(0.0);
    }
    let fact: f64 = (1..=r).map(|i| i as f64).product();
    Ok(((r + 1) as f64).sqrt() / fact * x.powi(r as i32) / field.regulator())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_zero() {
        let q = NumberField::rational();
        let g = UnitCountQuery::new(q.int(3), 1.0).unwrap();
        assert_eq!(unit_count(&g, &q).unwrap(), 0);
        assert_eq!(asymptotic_unit_count(&g, &q).unwrap(), 0.0);
        let g = UnitCountQuery::new(q.int(3), 1.2).unwrap();
        assert_eq!(unit_count(&g, &q).unwrap(), 1);
        let gi = NumberField::quadratic(-1).unwrap();
        for k in [0.0, 0.5, 7.0] {
            assert_eq!(unit_count(&UnitCountQuery::new(gi.one(), k).unwrap(), &gi).unwrap(), 1);
        }
        assert!(UnitCountQuery::new(q.zero(), 1.0).is_err());
    }

    #[test]
    fn sqrt2_brackets() {
        let f = NumberField::quadratic(2).unwrap();
        let lambda = (1.0 + 2f64.sqrt()).ln();
        let q = UnitCountQuery::new(f.one(), 10.0).unwrap();
        assert_eq!(unit_count(&q, &f).unwrap(), 2 * (10.0 / lambda).floor() as u64 + 1);
        assert_eq!(unit_count(&q, &f).unwrap(), 23);
        assert!((asymptotic_unit_count(&q, &f).unwrap() - 20.0 / lambda).abs() < 1e-9);
        for k in 0..=40 {
            for g in [f.one(), f.element(&[3, 1]), f.int(7)] {
                let q = UnitCountQuery::new(g, k as f64).unwrap();
                let m = unit_count(&q, &f).unwrap() as f64;
                assert!((m - asymptotic_unit_count(&q, &f).unwrap()).abs() <= 2.0, "k={k}");
            }
        }
    }

    #[test]
    fn direct_power_scan() {
        // ε^m for |m| ≤ 60, counted directly
        let f = NumberField::quadratic(3).unwrap();
        let g = f.element(&[5, 2]);
        let lg = f.log_embed(&g).unwrap();
        let le = f.log_embed(&f.fundamental_units()[0]).unwrap();
        for k in [0.5, 2.0, 6.25, 13.0] {
            let direct = (-60i64..=60)
                .filter(|&m| lg.iter().zip(&le).all(|(a, b)| a + m as f64 * b <= k))
                .count() as u64;
            assert_eq!(unit_count(&UnitCountQuery::new(g.clone(), k).unwrap(), &f).unwrap(), direct);
            let lower = UnitCountQuery::new(g.clone(), k).unwrap().with_lower(k - 1.0);
            let band = (-60i64..=60)
                .filter(|&m| {
                    let mx = lg.iter().zip(&le).map(|(a, b)| a + m as f64 * b).fold(f64::MIN, f64::max);
                    mx <= k && mx >= k - 1.0
                })
                .count() as u64;
            assert_eq!(unit_count(&lower, &f).unwrap(), band);
        }
    }
}
