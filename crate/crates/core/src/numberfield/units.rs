use super::{FieldElement, NumberField};
use crate::error::{Error, Result};

/// ⌊(p + √m)/q⌋ exactly, for m > 0 not a square and q ≠ 0.
fn floor_quadratic(p: i128, q: i128, m: i128) -> i128 {
    let le = |a: i128| {
        let t = a * q - p;
        if q > 0 {
            t < 0 || t * t < m
        } else {
            t > 0 && t * t > m
        }
    };
    let mut a = ((p as f64 + (m as f64).sqrt()) / q as f64).floor() as i128;
    while !le(a) {
        a -= 1;
    }
    while le(a + 1) {
        a += 1;
    }
    a
}

/// Fundamental unit ε > 1 of a real quadratic field from the continued
/// fraction of the basis generator ω.
pub fn fundamental_unit_quadratic(field: &NumberField) -> Result<FieldElement> {
    let m = field
        .radicand()
        .filter(|&m| m > 1)
        .ok_or_else(|| Error::Config("continued fraction units need a real quadratic field".into()))?
        as i128;
    // ω = (p0 + √m)/q0
    let (mut p, mut q) = if m % 4 == 1 { (1i128, 2i128) } else { (0, 1) };
    let (mut h1, mut h2) = (1i128, 0i128);
    let (mut k1, mut k2) = (0i128, 1i128);
    for _ in 0..10_000 {
        let a = floor_quadratic(p, q, m);
        let h = a.checked_mul(h1).and_then(|x| x.checked_add(h2));
        let k = a.checked_mul(k1).and_then(|x| x.checked_add(k2));
        let (Some(h), Some(k)) = (h, k) else { break };
        (h2, h1, k2, k1) = (h1, h, k1, k);
        // h/k ≈ ω, so h − k·ω is small; it is a unit when its norm is ±1.
        let (Ok(hi), Ok(ki)) = (i64::try_from(h), i64::try_from(k)) else { break };
        let u = [hi, -ki];
        let n = field.norm_int(&u);
        if n.abs() == 1 {
            let inv = field.inv(&FieldElement::from_ints(&u))?;
            let sigma = field.embed(&inv)[0].re;
            return Ok(if sigma > 0.0 { inv } else { inv.neg() });
        }
        let p_next = a * q - p;
        let q_next = (m - p_next * p_next) / q;
        p = p_next;
        q = q_next;
    }
    Err(Error::Resource(format!("no unit found in continued fraction of Q(sqrt({m}))")))
}
