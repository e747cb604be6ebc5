use crate::error::{Error, Result};
use crate::lattices::embedding::place_offset;
use crate::numberfield::{FieldElement, NumberField};
use crate::special::ball_volume;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::E;

pub const MIN_OVERLAP_SAMPLES: usize = 10_000;
const STREAMS: u64 = 64;

/// inner ≤ |x| ≤ outer in the real coordinates of ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && outer >= inner && outer.is_finite()) {
            return Err(Error::Domain(format!("bad annulus radii {inner}, {outer}")));
        }
        Ok(Self { inner, outer })
    }

    pub fn ball(radius: f64) -> Result<Self> {
        Self::new(0.0, radius)
    }

    pub fn volume(&self, dim: usize) -> f64 {
        ball_volume(dim) * (self.outer.powi(dim as i32) - self.inner.powi(dim as i32))
    }

    fn contains_sq(&self, r2: f64) -> bool {
        r2 >= self.inner * self.inner && r2 <= self.outer * self.outer
    }
}

#[derive(Debug, Clone)]
pub struct OverlapCheck {
    /// Monte Carlo estimate of ∫ f(x)·f(γx) dx.
    pub estimate: f64,
    pub standard_error: f64,
    /// vol·min(1, d·e·min_σ ‖γ‖_σ^{−1})^n.
    pub bound: f64,
    pub volume: f64,
    pub samples: usize,
    pub seed: u64,
    pub warning: Option<String>,
}

impl OverlapCheck {
    pub fn passed(&self) -> bool {
        self.estimate - 3.0 * self.standard_error <= self.bound
    }
}

/// ‖x‖_σ = |σ(x)|^{e_σ} for each infinite place.
fn place_norms(field: &NumberField, x: &[Complex64]) -> Vec<f64> {
    x.iter().enumerate().map(|(p, z)| z.norm().powi(field.local_degree(p) as i32)).collect()
}

fn overlap_bound(field: &NumberField, n: usize, vol: f64, sigma: &[Complex64]) -> f64 {
    let d = field.degree() as f64;
    let least = place_norms(field, sigma).iter().map(|v| 1.0 / v).fold(f64::INFINITY, f64::min);
    vol * (d * E * least).min(1.0).powi(n as i32)
}

/// |γx|² for x in ρ coordinates, γ acting place by place.
fn scaled_norm_sq(field: &NumberField, n: usize, sigma: &[Complex64], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for (p, g) in sigma.iter().enumerate() {
        let off = place_offset(field, n, p);
        if field.is_real_place(p) {
            s += g.re * g.re * x[off..off + n].iter().map(|v| v * v).sum::<f64>();
        } else {
            s += g.norm_sqr() * x[off..off + 2 * n].iter().map(|v| v * v).sum::<f64>();
        }
    }
    s
}

/// Uniform point of the annulus in ℝ^dim.
fn sample_annulus<R: Rng>(rng: &mut R, a: &Annulus, dim: usize, out: &mut [f64]) {
    let mut len = 0.0;
    while len == 0.0 {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        len = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let (lo, hi) = (a.inner.powi(dim as i32), a.outer.powi(dim as i32));
    let u: f64 = rng.gen();
    let r = (lo + u * (hi - lo)).powf(1.0 / dim as f64);
    for v in out.iter_mut() {
        *v *= r / len;
    }
}

/// Monte Carlo check of ∫ f(x)f(γx) ≤ vol(f)·min(1, d·e·min_σ‖γ‖_σ^{−1})^n
/// for f the indicator of an annulus, with 3σ acceptance. Sampling runs in
/// fixed streams of one seeded generator, so results do not depend on the
/// thread count.
pub fn annulus_overlap_check(
    field: &NumberField,
    n: usize,
    annulus: &Annulus,
    gamma: &FieldElement,
    samples: usize,
    seed: u64,
) -> Result<OverlapCheck> {
    if field.degree() < 2 {
        return Err(Error::Domain("the overlap bound is checked only for d ≥ 2".into()));
    }
    if gamma.is_zero() {
        return Err(Error::Domain("γ must be nonzero".into()));
    }
    if n == 0 || samples == 0 {
        return Err(Error::Domain("need n ≥ 1 and at least one sample".into()));
    }
    let dim = n * field.degree();
    let sigma = field.embed(gamma);
    let volume = annulus.volume(dim);
    let per = samples.div_ceil(STREAMS as usize);
    let hits: u64 = (0..STREAMS)
        .into_par_iter()
        .map(|s| {
            let take = per.min(samples.saturating_sub(s as usize * per));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let mut x = vec![0.0; dim];
            let mut h = 0u64;
            for _ in 0..take {
                sample_annulus(&mut rng, annulus, dim, &mut x);
                h += annulus.contains_sq(scaled_norm_sq(field, n, &sigma, &x)) as u64;
            }
            h
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let warning = (samples < MIN_OVERLAP_SAMPLES)
        .then(|| format!("only {samples} samples; estimates below {MIN_OVERLAP_SAMPLES} are imprecise"));
    Ok(OverlapCheck {
        estimate: volume * p,
        standard_error: volume * (p * (1.0 - p) / samples as f64).sqrt(),
        bound: overlap_bound(field, n, volume, &sigma),
        volume,
        samples,
        seed,
        warning,
    })
}

// 8-point Gauss–Legendre on [0, 1]
const GL_NODES: [f64; 8] = [
    0.019855071751231856,
    0.10166676129318664,
    0.2372337950418355,
    0.4082826787521751,
    0.591_717_321_247_825,
    0.7627662049581645,
    0.8983332387068134,
    0.9801449282487681,
];
const GL_WEIGHTS: [f64; 8] = [
    0.05061426814518813,
    0.11119051722668724,
    0.15685332293894363,
    0.181_341_891_689_181,
    0.181_341_891_689_181,
    0.15685332293894363,
    0.11119051722668724,
    0.05061426814518813,
];
const PANELS: usize = 256;

/// Clips a polygon to {c·(u, v) ≤ h} (or ≥ when `above`).
fn clip(poly: &[(f64, f64)], c: (f64, f64), h: f64, above: bool) -> Vec<(f64, f64)> {
    let inside = |p: &(f64, f64)| {
        let v = c.0 * p.0 + c.1 * p.1;
        if above {
            v >= h
        } else {
            v <= h
        }
    };
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (ia, ib) = (inside(&a), inside(&b));
        if ia {
            out.push(a);
        }
        if ia != ib {
            let fa = c.0 * a.0 + c.1 * a.1 - h;
            let fb = c.0 * b.0 + c.1 * b.1 - h;
            let t = fa / (fa - fb);
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
    }
    out
}

/// ∫∫_P u^p v^q du dv = ∮ u^{p+1} v^q/(p+1) dv over a counter-clockwise polygon.
fn polygon_moment(poly: &[(f64, f64)], p: f64, q: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let dv = b.1 - a.1;
        if dv == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for k in 0..PANELS {
            for (x, w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
                let t = (k as f64 + x) / PANELS as f64;
                let u = (a.0 + t * (b.0 - a.0)).max(0.0);
                let v = (a.1 + t * (b.1 - a.1)).max(0.0);
                acc += w * u.powf(p + 1.0) * v.powf(q);
            }
        }
        s += acc / PANELS as f64 * dv / (p + 1.0);
    }
    s
}

/// ∫ f(x)·f(γx) dx by reduction to the radii at each place, for fields with
/// at most two infinite places: a shell in one variable, or a polygon in
/// (|x_1|², |x_2|²) with weight |x_1|^{D_1−2}|x_2|^{D_2−2}. Exact up to
/// rounding when every D_σ is even.
pub fn radial_overlap(field: &NumberField, n: usize, annulus: &Annulus, gamma: &FieldElement) -> Result<f64> {
    if gamma.is_zero() {
        return Err(Error::Domain("γ must be nonzero".into()));
    }
    if annulus.inner >= annulus.outer {
        return Ok(0.0);
    }
    let sigma = field.embed(gamma);
    let dims: Vec<usize> = (0..field.places()).map(|p| n * field.local_degree(p)).collect();
    let scales: Vec<f64> = sigma.iter().map(|z| z.norm()).collect();
    let (r1, r2) = (annulus.inner * annulus.inner, annulus.outer * annulus.outer);
    match dims.len() {
        1 => {
            let g = scales[0];
            let lo = annulus.inner.max(annulus.inner / g);
            let hi = annulus.outer.min(annulus.outer / g);
            let dim = dims[0];
            Ok(if hi > lo { ball_volume(dim) * (hi.powi(dim as i32) - lo.powi(dim as i32)) } else { 0.0 })
        }
        2 => {
            let quad = vec![(r1, 0.0), (r2, 0.0), (0.0, r2), (0.0, r1)];
            let c = (scales[0] * scales[0], scales[1] * scales[1]);
            let poly = clip(&clip(&quad, c, r2, false), c, r1, true);
            if poly.len() < 3 {
                return Ok(0.0);
            }
            let cd = |d: usize| d as f64 * ball_volume(d);
            let (p, q) = (dims[0] as f64 / 2.0 - 1.0, dims[1] as f64 / 2.0 - 1.0);
            Ok(cd(dims[0]) * cd(dims[1]) / 4.0 * polygon_moment(&poly, p, q))
        }
        k => Err(Error::Domain(format!("radial reduction needs at most two infinite places (got {k})"))),
    }
}

#[derive(Debug, Clone)]
pub struct UnitSum {
    /// (m, overlap for γε^m) in the order 0, 1, −1, 2, −2, …
    pub terms: Vec<(i64, f64)>,
    pub partial_sums: Vec<f64>,
    /// Bound for all |m| beyond the last computed term.
    pub tail_bound: f64,
    /// Smallest M such that the terms with |m| > M weigh at most
    /// `tolerance` times the total.
    pub stabilized_at: Option<u64>,
}

impl UnitSum {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }
}

/// Σ over units u = ε^m (modulo ±1) of ∫ f(x)f(γux) dx for a real quadratic
/// field, each term by [`radial_overlap`], with the omitted tail bounded
/// through the overlap bound.
pub fn unit_sum_convergence(
    field: &NumberField,
    n: usize,
    gamma: &FieldElement,
    annulus: &Annulus,
    max_m: u64,
    tolerance: f64,
) -> Result<UnitSum> {
    if field.signature() != (2, 0) || field.unit_rank() != 1 {
        return Err(Error::Domain("unit sums need a real quadratic field".into()));
    }
    let eps = &field.fundamental_units()[0];
    let mut terms = Vec::new();
    let mut partial_sums = Vec::new();
    let mut acc = 0.0;
    let power = |m: i64| field.mul(gamma, &field.pow(eps, m).expect("unit"));
    for k in 0..=max_m as i64 {
        for m in if k == 0 { vec![0] } else { vec![k, -k] } {
            let t = radial_overlap(field, n, annulus, &power(m))?;
            acc += t;
            terms.push((m, t));
            partial_sums.push(acc);
        }
    }
    let vol = annulus.volume(2 * n);
    let ge = field.embed(gamma);
    let ee = field.embed(eps);
    let mut tail_bound = 0.0;
    for k in max_m as i64 + 1.. {
        let mut step = 0.0;
        for m in [k, -k] {
            let s: Vec<Complex64> = ge.iter().zip(&ee).map(|(g, e)| g * e.powi(m as i32)).collect();
            step += overlap_bound(field, n, vol, &s);
        }
        tail_bound += step;
        if step <= 1e-18 * vol || k > max_m as i64 + 10_000 {
            break;
        }
    }
    let total = acc;
    let mut stabilized_at = None;
    let mut beyond = tail_bound;
    // walk back from the end accumulating the weight past M
    for k in (0..=max_m).rev() {
        if beyond > tolerance * total {
            break;
        }
        stabilized_at = Some(k);
        let from_k: f64 = terms.iter().filter(|(m, _)| m.unsigned_abs() == k).map(|(_, t)| t).sum();
        beyond += from_k;
    }
    Ok(UnitSum { terms, partial_sums, tail_bound, stabilized_at })
}
