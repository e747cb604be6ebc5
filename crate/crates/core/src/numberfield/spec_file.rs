//! Key-value field spec files.
//!
//! ```text
//! label = Q(sqrt(10))
//! m = 10
//! class_number = 2
//! w_F = 2
//! ```
//!
//! Fields not given by a radicand use explicit tables: `degree`, `r1`,
//! `r2`, `discriminant`, `mult.i.j = c_0 … c_{d−1}`, `embedding.p = re,im …`
//! (one value per basis element) and `unit.k = a_0 … a_{d−1}` with
//! rationals written as `p/q`.

use super::{parse_rational, FieldElement, NumberField};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn get_num<T: std::str::FromStr>(kv: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    kv.get(key)
        .map(|v| v.parse::<T>().map_err(|_| bad(format!("invalid value for {key}: '{v}'"))))
        .transpose()
}

fn require<T: std::str::FromStr>(kv: &BTreeMap<String, String>, key: &str) -> Result<T> {
    get_num(kv, key)?.ok_or_else(|| bad(format!("missing key '{key}'")))
}

/// Parses and validates a field spec file.
pub fn parse_field_spec(text: &str) -> Result<NumberField> {
    let mut kv = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected key = value", lineno + 1)))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let class_number: Option<u32> = get_num(&kv, "class_number")?;
    let w: Option<u32> = get_num(&kv, "w_F")?;
    let regulator: Option<f64> = get_num(&kv, "regulator")?;
    if let Some(m) = get_num::<i64>(&kv, "m")? {
        let mut field = match (class_number, w) {
            (None, None) if regulator.is_none() => NumberField::quadratic(m)?,
            _ => {
                let builtin = NumberField::quadratic(m).ok();
                let h = class_number
                    .or(builtin.as_ref().map(|f| f.class_number()))
                    .ok_or_else(|| bad("class_number is required for non-built-in radicands"))?;
                NumberField::quadratic_with(m, h, w, regulator)?
            }
        };
        if let Some(label) = kv.get("label") {
            field.label = label.clone();
        }
        return Ok(field);
    }
    let degree: usize = require(&kv, "degree")?;
    let r1: usize = require(&kv, "r1")?;
    let r2: usize = require(&kv, "r2")?;
    let disc: i64 = require(&kv, "discriminant")?;
    let mut mult = vec![vec![vec![0i64; degree]; degree]; degree];
    for i in 0..degree {
        for j in 0..degree {
            let key = format!("mult.{i}.{j}");
            let v = kv.get(&key).ok_or_else(|| bad(format!("missing key '{key}'")))?;
            let c: Vec<i64> = v
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(format!("invalid entry in {key}"))))
                .collect::<Result<_>>()?;
            if c.len() != degree {
                return Err(bad(format!("{key} needs {degree} coefficients")));
            }
            mult[i][j] = c;
        }
    }
    let mut emb = Vec::new();
    for p in 0..r1 + r2 {
        let key = format!("embedding.{p}");
        let v = kv.get(&key).ok_or_else(|| bad(format!("missing key '{key}'")))?;
        let vals: Vec<Complex64> = v
            .split_whitespace()
            .map(|t| {
                let (re, im) = t.split_once(',').unwrap_or((t, "0"));
                Ok(Complex64::new(
                    re.parse().map_err(|_| bad(format!("invalid embedding value '{t}'")))?,
                    im.parse().map_err(|_| bad(format!("invalid embedding value '{t}'")))?,
                ))
            })
            .collect::<Result<_>>()?;
        emb.push(vals);
    }
    let mut units = Vec::new();
    for k in 0..(r1 + r2).saturating_sub(1) {
        let key = format!("unit.{k}");
        let v = kv.get(&key).ok_or_else(|| bad(format!("missing key '{key}'")))?;
        let coords = v
            .split_whitespace()
            .map(|t| parse_rational(t).ok_or_else(|| bad(format!("invalid rational '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        units.push(FieldElement::new(coords));
    }
    NumberField::custom(
        kv.get("label").cloned().unwrap_or_else(|| "custom".into()),
        r1,
        r2,
        mult,
        emb,
        disc,
        class_number.ok_or_else(|| bad("missing key 'class_number'"))?,
        w.ok_or_else(|| bad("missing key 'w_F'"))?,
        units,
        regulator,
    )
}
