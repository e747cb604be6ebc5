use super::{FieldElement, FieldKind, NumberField};
use crate::error::{Error, Result};
use crate::lattices::{EmbeddedLattice, EnumerationLimits, Region};
use crate::special::{kronecker, prime_factors, primes_up_to};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Default bound on residue norms searched by [`NumberField::split_principal_primes`].
pub const DEFAULT_PRIME_SEARCH_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

/// A prime ideal ℘ of 𝒪_F over the rational prime p.
///
/// Degree-one primes are described by the image `root` of ω in 𝒪_F/℘ = 𝔽_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    pub p: u64,
    pub norm: u64,
    pub splitting: SplittingType,
    pub root: Option<u64>,
    /// Image of ω at the conjugate prime when p splits.
    pub other_root: Option<u64>,
    pub generator: Option<FieldElement>,
}

impl PrimeIdeal {
    pub fn is_degree_one(&self) -> bool {
        self.norm == self.p
    }

    /// Residue of an integral element in 𝔽_p (degree-one primes only).
    pub fn residue(&self, x: &[i64]) -> Option<u64> {
        if !self.is_degree_one() {
            return None;
        }
        let p = self.p as i128;
        let r = self.root.unwrap_or(0) as i128;
        let mut acc: i128 = 0;
        let mut pow: i128 = 1;
        for &c in x {
            acc = (acc + (c as i128).rem_euclid(p) * pow) % p;
            pow = pow * r % p;
        }
        Some(acc as u64)
    }

    /// Generator, which every prime produced by the search carries.
    pub fn generator(&self) -> Result<&FieldElement> {
        self.generator
            .as_ref()
            .ok_or_else(|| Error::Config(format!("prime over {} has no stored generator", self.p)))
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Square root modulo an odd prime (Tonelli–Shanks); `None` for non-residues.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

impl NumberField {
    fn require_splitting_data(&self) -> Result<()> {
        if matches!(self.kind(), FieldKind::Custom) {
            return Err(Error::Config(
                "prime ideal data is available only for Q and quadratic fields".into(),
            ));
        }
        Ok(())
    }

    /// Splitting type of the rational prime p.
    pub fn splitting_type(&self, p: u64) -> Result<SplittingType> {
        self.require_splitting_data()?;
        Ok(match self.kind() {
            FieldKind::Rational => SplittingType::Split,
            _ => match kronecker(self.stored_discriminant(), p) {
                0 => SplittingType::Ramified,
                1 => SplittingType::Split,
                _ => SplittingType::Inert,
            },
        })
    }

    /// Roots of the minimal polynomial of ω modulo p, ascending.
    fn omega_roots(&self, p: u64) -> Vec<u64> {
        let (c0, c1) = self.min_poly_quadratic().unwrap();
        let f = |x: u64| {
            let pi = p as i128;
            let x = x as i128;
            (x * x - c1 as i128 * x - c0 as i128).rem_euclid(pi) == 0
        };
        if p == 2 {
            return (0..2).filter(|&x| f(x)).collect();
        }
        let pi = p as i128;
        let disc = ((c1 as i128).pow(2) + 4 * c0 as i128).rem_euclid(pi) as u64;
        let Some(s) = sqrt_mod(disc, p) else { return Vec::new() };
        let inv2 = p.div_ceil(2);
        let mut roots: Vec<u64> = [s, (p - s) % p]
            .iter()
            .map(|&t| mul_mod(((c1 as i128).rem_euclid(pi) as u64 + t) % p, inv2, p))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        debug_assert!(roots.iter().all(|&r| f(r)));
        roots
    }

    /// Prime ideals above p (without generators).
    pub fn primes_above(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        self.require_splitting_data()?;
        let base = |norm, splitting, root, other_root| PrimeIdeal {
            p,
            norm,
            splitting,
            root,
            other_root,
            generator: None,
        };
        if matches!(self.kind(), FieldKind::Rational) {
            return Ok(vec![base(p, SplittingType::Split, None, None)]);
        }
        Ok(match self.splitting_type(p)? {
            SplittingType::Inert => vec![base(p * p, SplittingType::Inert, None, None)],
            SplittingType::Ramified => {
                let r = self.omega_roots(p)[0];
                vec![base(p, SplittingType::Ramified, Some(r), None)]
            }
            SplittingType::Split => {
                let r = self.omega_roots(p);
                vec![
                    base(p, SplittingType::Split, Some(r[0]), Some(r[1])),
                    base(p, SplittingType::Split, Some(r[1]), Some(r[0])),
                ]
            }
        })
    }

    /// ℘-adic valuation of a nonzero element.
    pub fn valuation(&self, ideal: &PrimeIdeal, x: &FieldElement) -> Result<i64> {
        if x.is_zero() {
            return Err(Error::Domain("valuation of zero".into()));
        }
        let c = x.denominator();
        let y = x.scale(&BigRational::from_integer(c.clone()));
        let e = if ideal.splitting == SplittingType::Ramified { 2 } else { 1 };
        let vc = crate::intmat::valuation(&c, ideal.p) as i64;
        Ok(self.valuation_integral(ideal, &y) - e * vc)
    }

    fn valuation_integral(&self, ideal: &PrimeIdeal, y: &FieldElement) -> i64 {
        let p = BigInt::from(ideal.p);
        let coords = |y: &FieldElement| -> Vec<BigInt> { y.coords().iter().map(|c| c.to_integer()).collect() };
        let residue = |v: &[BigInt]| -> BigInt {
            let r = BigInt::from(ideal.root.unwrap_or(0));
            let mut acc = BigInt::zero();
            let mut pw = BigInt::from(1);
            for c in v {
                acc += c * &pw;
                pw = (&pw * &r).mod_floor(&p);
            }
            acc.mod_floor(&p)
        };
        match (self.kind(), ideal.splitting) {
            (FieldKind::Rational, _) | (_, SplittingType::Inert) => coords(y)
                .iter()
                .filter(|c| !c.is_zero())
                .map(|c| crate::intmat::valuation(c, ideal.p) as i64)
                .min()
                .unwrap(),
            (_, SplittingType::Split) => {
                // multiply by ω − r' ∈ ℘' and divide by p while the result stays in ℘
                let other = self.element(&[-(ideal.other_root.unwrap() as i64), 1]);
                let pinv = BigRational::new(1.into(), p.clone());
                let mut y = y.clone();
                let mut v = 0;
                while residue(&coords(&y)).is_zero() {
                    y = self.mul(&y, &other).scale(&pinv);
                    debug_assert!(y.is_integral());
                    v += 1;
                }
                v
            }
            (_, SplittingType::Ramified) => {
                let pinv = BigRational::new(1.into(), p.clone());
                let mut y = y.clone();
                let mut v = 0;
                loop {
                    let c = coords(&y);
                    if c.iter().all(|x| x.is_multiple_of(&p)) {
                        y = y.scale(&pinv);
                        v += 2;
                    } else {
                        return v + residue(&c).is_zero() as i64;
                    }
                }
            }
        }
    }

    /// Prime ideals at which some of the given nonzero elements has nonzero
    /// valuation, ordered by (p, root).
    pub fn support_primes(&self, xs: &[FieldElement]) -> Result<Vec<PrimeIdeal>> {
        let mut rational: BTreeMap<u64, ()> = BTreeMap::new();
        for x in xs.iter().filter(|x| !x.is_zero()) {
            let n = self.norm(x)?;
            for part in [n.numer().abs(), n.denom().clone(), x.denominator()] {
                let v = part
                    .to_u128()
                    .ok_or_else(|| Error::Resource("norm too large to factor".into()))?;
                for q in prime_factors(v) {
                    rational.insert(q, ());
                }
            }
        }
        let mut out = Vec::new();
        for &p in rational.keys() {
            out.extend(self.primes_above(p)?);
        }
        Ok(out)
    }

    /// Exact squared embedding length of an integral element.
    fn exact_length(&self, x: &[i64]) -> i128 {
        let g = crate::lattices::embedding::ambient_gram(self, 1).expect("integral trace form");
        let mut s = 0i128;
        for i in 0..x.len() {
            for j in 0..x.len() {
                s += x[i] as i128 * g[i][j] as i128 * x[j] as i128;
            }
        }
        s
    }

    /// Orders candidates: shorter first, then larger coordinates first.
    fn candidate_key(&self, x: &[i64]) -> (i128, Vec<i64>) {
        (self.exact_length(x), x.iter().map(|v| -v).collect())
    }

    fn has_unit_of_norm_minus_one(&self) -> bool {
        match self.signature() {
            (_, r2) if r2 > 0 => false,
            (1, 0) => true,
            _ => self
                .fundamental_units()
                .iter()
                .any(|u| self.norm(u).map(|n| n.is_negative()).unwrap_or(false)),
        }
    }

    /// Elements of 𝒪_F in ρ-ball of growing radius until `accept` has
    /// matches; returns the matches from the first successful radius.
    fn search_elements<F: Fn(&[i64]) -> bool>(&self, start_r2: f64, accept: F) -> Result<Vec<Vec<i64>>> {
        let lat = EmbeddedLattice::standard(self, 1)?;
        let mut r2 = start_r2.max(1.0);
        for _ in 0..80 {
            let mut found = Vec::new();
            lat.for_each_point(&Region::ball(r2.sqrt())?, &EnumerationLimits::default(), |pt| {
                if accept(pt.exact) {
                    found.push(pt.exact.to_vec());
                }
            })?;
            if !found.is_empty() {
                return Ok(found);
            }
            r2 *= 2.0;
        }
        Err(Error::Resource("element search radius exhausted".into()))
    }

    /// Canonical generator of a principal prime: minimal embedding length
    /// among elements of norm +N℘ (or ±N℘ when no unit has norm −1), ties
    /// broken towards larger coordinates.
    pub fn principal_generator(&self, ideal: &PrimeIdeal) -> Result<FieldElement> {
        self.require_splitting_data()?;
        if self.class_number() != 1 {
            return Err(Error::Config("generators are only available when h_F = 1".into()));
        }
        if matches!(self.kind(), FieldKind::Rational) || ideal.splitting == SplittingType::Inert {
            return Ok(self.int(ideal.p as i64));
        }
        let q = ideal.norm as i128;
        let positive_only = self.signature().1 > 0 || self.has_unit_of_norm_minus_one();
        let found = self.search_elements(2.0 * ideal.norm as f64, |x| {
            let n = self.norm_int(x);
            let ok_norm = if positive_only { n == q } else { n.abs() == q };
            ok_norm && ideal.residue(x) == Some(0)
        })?;
        let best = found
            .into_iter()
            .min_by_key(|x| self.candidate_key(x))
            .unwrap();
        Ok(self.element(&best))
    }

    /// The first `count` degree-one principal primes, one per rational prime
    /// and in ascending norm, avoiding every rational prime dividing an
    /// element of `coprime_to`.
    pub fn split_principal_primes(
        &self,
        coprime_to: &[u64],
        count: usize,
        bound: u64,
    ) -> Result<Vec<PrimeIdeal>> {
        if count == 0 {
            return Err(Error::Domain("count must be at least 1".into()));
        }
        self.require_splitting_data()?;
        let mut out = Vec::with_capacity(count);
        for p in primes_up_to(bound as usize) {
            if coprime_to.iter().any(|&s| s != 0 && s % p == 0) {
                continue;
            }
            if self.splitting_type(p)? != SplittingType::Split {
                continue;
            }
            out.push(self.principal_prime_above(p)?);
            if out.len() == count {
                return Ok(out);
            }
        }
        Err(Error::Resource(format!(
            "found only {} of {count} split principal primes below the search bound {bound}",
            out.len()
        )))
    }

    /// The degree-one prime above p whose canonical generator is shortest,
    /// with that generator attached.
    pub fn principal_prime_above(&self, p: u64) -> Result<PrimeIdeal> {
        let mut best: Option<(PrimeIdeal, (i128, Vec<i64>))> = None;
        for mut ideal in self.primes_above(p)?.into_iter().filter(|i| i.is_degree_one()) {
            let g = self.principal_generator(&ideal)?;
            let key = self.candidate_key(&g.to_ints().unwrap());
            ideal.generator = Some(g);
            if best.as_ref().is_none_or(|(_, k)| key < *k) {
                best = Some((ideal, key));
            }
        }
        best.map(|b| b.0)
            .ok_or_else(|| Error::Precondition(format!("no degree-one prime lies above {p}")))
    }

    /// Attaches a generator to a prime ideal.
    pub fn with_generator(&self, mut ideal: PrimeIdeal) -> Result<PrimeIdeal> {
        if ideal.generator.is_none() {
            ideal.generator = Some(self.principal_generator(&ideal)?);
        }
        Ok(ideal)
    }

    /// A transversal of 𝒪_F/℘ for a degree-one prime: for each residue
    /// class the lift of minimal embedding length, in residue order.
    pub fn residue_transversal(&self, ideal: &PrimeIdeal) -> Result<Vec<FieldElement>> {
        if !ideal.is_degree_one() {
            return Err(Error::Config("residue transversals need a degree-one prime".into()));
        }
        let p = ideal.p as usize;
        if matches!(self.kind(), FieldKind::Rational) {
            return Ok((0..p)
                .map(|r| {
                    let r = r as i64;
                    let lift = if 2 * r <= p as i64 { r } else { r - p as i64 };
                    self.int(lift)
                })
                .collect());
        }
        let lat = EmbeddedLattice::standard(self, 1)?;
        let mut r2 = 2.0 * p as f64;
        loop {
            let mut best: Vec<Option<(i128, Vec<i64>)>> = vec![None; p];
            lat.for_each_point(&Region::ball(r2.sqrt())?, &EnumerationLimits::default(), |pt| {
                let r = ideal.residue(pt.exact).unwrap() as usize;
                let key = self.candidate_key(pt.exact);
                if best[r].as_ref().is_none_or(|b| key < *b) {
                    best[r] = Some(key);
                }
            })?;
            if best.iter().all(|b| b.is_some()) {
                return Ok(best
                    .into_iter()
                    .map(|b| {
                        let coords: Vec<i64> = b.unwrap().1.iter().map(|v| -v).collect();
                        self.element(&coords)
                    })
                    .collect());
            }
            r2 *= 2.0;
        }
    }
}
