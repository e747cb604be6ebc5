//! The real-coordinate layout of ρ: F^n → ℝ^{nd}.
//!
//! Coordinates are grouped by place. A real place σ contributes the n
//! values σ(x_j); a complex place contributes √2·Re σ(x_j), √2·Im σ(x_j)
//! for each j, so that the Euclidean norm equals Σ over all d embeddings.

use crate::numberfield::NumberField;
use num_complex::Complex64;
use std::f64::consts::SQRT_2;

/// Offset of place `p` in the real coordinate vector.
pub fn place_offset(field: &NumberField, n: usize, p: usize) -> usize {
    let (r1, _) = field.signature();
    if p < r1 {
        p * n
    } else {
        r1 * n + 2 * (p - r1) * n
    }
}

/// Row (j·d + t) is ρ(ω_t·e_j).
pub fn ambient_map(field: &NumberField, n: usize) -> Vec<Vec<f64>> {
    let d = field.degree();
    let emb = field.basis_embeddings();
    let mut rows = vec![vec![0.0; n * d]; n * d];
    for j in 0..n {
        for t in 0..d {
            let row = &mut rows[j * d + t];
            for (p, e) in emb.iter().enumerate() {
                let off = place_offset(field, n, p);
                if field.is_real_place(p) {
                    row[off + j] = e[t].re;
                } else {
                    row[off + 2 * j] = SQRT_2 * e[t].re;
                    row[off + 2 * j + 1] = SQRT_2 * e[t].im;
                }
            }
        }
    }
    rows
}

/// Integer Gram matrix of [`ambient_map`], when the trace form is integral.
pub fn ambient_gram(field: &NumberField, n: usize) -> Option<Vec<Vec<i64>>> {
    let d = field.degree();
    let emb = field.basis_embeddings();
    let mut small = vec![vec![0i64; d]; d];
    for s in 0..d {
        for t in 0..d {
            let v: f64 = emb
                .iter()
                .enumerate()
                .map(|(p, e)| field.local_degree(p) as f64 * (e[s] * e[t].conj()).re)
                .sum();
            let r = v.round();
            if (v - r).abs() > 1e-9 {
                return None;
            }
            small[s][t] = r as i64;
        }
    }
    let mut g = vec![vec![0i64; n * d]; n * d];
    for j in 0..n {
        for s in 0..d {
            for t in 0..d {
                g[j * d + s][j * d + t] = small[s][t];
            }
        }
    }
    Some(g)
}

/// Splits a real coordinate vector into per-place vectors σ(x) ∈ ℝ^n or ℂ^n.
pub fn to_place_vectors(field: &NumberField, n: usize, coords: &[f64]) -> Vec<Vec<Complex64>> {
    (0..field.places())
        .map(|p| {
            let off = place_offset(field, n, p);
            (0..n)
                .map(|j| {
                    if field.is_real_place(p) {
                        Complex64::new(coords[off + j], 0.0)
                    } else {
                        Complex64::new(coords[off + 2 * j], coords[off + 2 * j + 1]) / SQRT_2
                    }
                })
                .collect()
        })
        .collect()
}

pub fn from_place_vectors(field: &NumberField, n: usize, v: &[Vec<Complex64>]) -> Vec<f64> {
    let mut out = vec![0.0; n * field.degree()];
    for (p, y) in v.iter().enumerate() {
        let off = place_offset(field, n, p);
        for j in 0..n {
            if field.is_real_place(p) {
                out[off + j] = y[j].re;
            } else {
                out[off + 2 * j] = SQRT_2 * y[j].re;
                out[off + 2 * j + 1] = SQRT_2 * y[j].im;
            }
        }
    }
    out
}

/// Applies an archimedean twist y_σ ↦ y_σ·g_σ to each row of a map.
pub fn twist_rows(
    field: &NumberField,
    n: usize,
    rows: &[Vec<f64>],
    twist: &[Vec<Vec<Complex64>>],
) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| {
            let v = to_place_vectors(field, n, row);
            let w: Vec<Vec<Complex64>> = v
                .iter()
                .zip(twist)
                .map(|(y, g)| {
                    (0..n)
                        .map(|k| (0..n).map(|j| y[j] * g[j][k]).sum())
                        .collect()
                })
                .collect();
            from_place_vectors(field, n, &w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_map() {
        for m in [-1, -3, 2, 5] {
            let f = NumberField::quadratic(m).unwrap();
            let map = ambient_map(&f, 2);
            let g = ambient_gram(&f, 2).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    let v: f64 = map[a].iter().zip(&map[b]).map(|(x, y)| x * y).sum();
                    assert!((v - g[a][b] as f64).abs() < 1e-9);
                }
            }
        }
        let g = ambient_gram(&NumberField::quadratic(-1).unwrap(), 1).unwrap();
        assert_eq!(g, vec![vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn place_vector_round_trip() {
        let f = NumberField::quadratic(-7).unwrap();
        let x = vec![0.3, -1.2, 2.5, 0.7];
        let back = from_place_vectors(&f, 2, &to_place_vectors(&f, 2, &x));
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
