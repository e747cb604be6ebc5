use super::{FieldKind, NumberField};
use crate::error::{Error, Result};
use crate::special::{kronecker, primes_up_to};

/// A Dedekind zeta value from a truncated Euler product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: f64,
    /// The true value lies in `[value, value + certified_error]`.
    pub certified_error: f64,
    /// Largest prime included in the product.
    pub truncation: u64,
    /// Point estimate: the product times exp(Σ_{p>P} p^{−s}) with the prime
    /// sum replaced by ∫_P^∞ t^{−s}/log t dt. The character part of a
    /// quadratic tail averages out and is dropped.
    pub estimate: f64,
}

const MAX_TRUNCATION: u64 = 1 << 26;

/// ζ_F(s) with certified error at most `tail_bound`.
pub fn dedekind_zeta(field: &NumberField, s: u32, tail_bound: f64) -> Result<ZetaValue> {
    if s < 2 {
        return Err(Error::Domain(format!("zeta at s = {s} < 2")));
    }
    if !(tail_bound > 0.0) {
        return Err(Error::Domain("tail bound must be positive".into()));
    }
    let d = field.degree() as f64;
    let s_f = s as f64;
    // relative tail exp(b) − 1 with b = d·P^{1−s}/((s−1)(1−P^{−s}))
    let mut p_max: u64 = 1 << 10;
    loop {
        let b = tail_exponent(d, s_f, p_max as f64);
        // ζ_F(s) ≤ ζ(s)^d ≤ (s/(s−1))^d bounds the prefactor.
        let prefactor = (s_f / (s_f - 1.0)).powf(d);
        if prefactor * b.exp_m1() <= tail_bound {
            break;
        }
        if p_max >= MAX_TRUNCATION {
            return Err(Error::Resource(format!(
                "zeta truncation would exceed {MAX_TRUNCATION} for tail {tail_bound:e}"
            )));
        }
        p_max *= 2;
    }
    dedekind_zeta_truncated(field, s, p_max)
}

fn tail_exponent(d: f64, s: f64, p: f64) -> f64 {
    d * p.powf(1.0 - s) / ((s - 1.0) * (1.0 - p.powf(-s)))
}

/// Euler product over primes p ≤ `p_max` with its analytic tail bound.
pub fn dedekind_zeta_truncated(field: &NumberField, s: u32, p_max: u64) -> Result<ZetaValue> {
    if s < 2 {
        return Err(Error::Domain(format!("zeta at s = {s} < 2")));
    }
    let disc = match field.kind() {
        FieldKind::Rational => None,
        FieldKind::Quadratic { .. } => Some(field.stored_discriminant()),
        FieldKind::Custom => {
            return Err(Error::Config(
                "Dedekind zeta needs splitting data, available only for Q and quadratic fields".into(),
            ))
        }
    };
    let mut log_value = 0.0f64;
    let sf = s as f64;
    for p in primes_up_to(p_max as usize) {
        let x = (p as f64).powf(-sf);
        let local = match disc.map(|dd| kronecker(dd, p)) {
            None => -(-x).ln_1p(),
            Some(1) => -2.0 * (-x).ln_1p(),
            Some(-1) => -(-x * x).ln_1p(),
            _ => -(-x).ln_1p(),
        };
        log_value += local;
    }
    let value = log_value.exp();
    let b = tail_exponent(field.degree() as f64, sf, p_max as f64);
    let tail = exp_integral_e1((sf - 1.0) * (p_max as f64).ln());
    Ok(ZetaValue {
        value,
        certified_error: value * b.exp_m1(),
        truncation: p_max,
        estimate: value * tail.exp(),
    })
}

/// E_1(x) for x ≥ 1 by its continued fraction, evaluated bottom-up.
fn exp_integral_e1(x: f64) -> f64 {
    let mut t = 0.0;
    for k in (1..=80).rev() {
        let k = k as f64;
        t = k * k / (x + 2.0 * k + 1.0 - t);
    }
    (-x).exp() / (x + 1.0 - t)
}
