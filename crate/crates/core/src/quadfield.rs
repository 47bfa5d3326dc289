//! Real quadratic fields: discriminants, fundamental units, class numbers,
//! p-adic embeddings of units, and the external field-data document.

use std::collections::{HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::characters::is_real_fundamental_discriminant;
use crate::error::{Error, Result};
use crate::padic::{hensel_sqrt, PadicInt, ResidueRing};

/// Invariants of `Q(sqrt m)`. The fundamental unit is `(x + y sqrt d) / 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadFieldData {
    pub m: i64,
    pub d: i64,
    pub x: BigUint,
    pub y: BigUint,
    pub norm: i32,
    pub h: u64,
    pub hplus: u64,
}

impl QuadFieldData {
    /// Field of fundamental discriminant `d`.
    pub fn from_discriminant(d: i64) -> Result<Self> {
        if !is_real_fundamental_discriminant(d) {
            return Err(Error::NotFundamental(d));
        }
        let (x, y, norm) = fundamental_unit(d)?;
        let (h, hplus) = class_number(d)?;
        let m = if d % 4 == 0 { d / 4 } else { d };
        Ok(QuadFieldData { m, d, x, y, norm, h, hplus })
    }

    /// Field `Q(sqrt m)` for squarefree `m > 1`.
    pub fn from_squarefree(m: i64) -> Result<Self> {
        Self::from_discriminant(fundamental_discriminant(m)?)
    }

    pub fn label(&self) -> String {
        format!("Q(sqrt {})", self.m)
    }
}

pub fn fundamental_discriminant(m: i64) -> Result<i64> {
    if m <= 1 || !arith::is_squarefree(m) {
        return Err(Error::NotSquarefree(m));
    }
    Ok(if m.rem_euclid(4) == 1 { m } else { 4 * m })
}

fn floor_quadratic(p: &BigInt, q: &BigInt, s: &BigInt) -> BigInt {
    // floor((p + sqrt D) / q) with s = isqrt(D) and sqrt D irrational
    if q.is_positive() {
        (p + s).div_floor(q)
    } else {
        -(p + s).div_floor(&q.abs()) - 1
    }
}

/// Least `(x, y)` with `x^2 - d y^2 = +-4`, `x, y > 0`, and the sign attained.
pub fn fundamental_unit(d: i64) -> Result<(BigUint, BigUint, i32)> {
    if !is_real_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let db = BigInt::from(d);
    let s = BigInt::from(arith::isqrt(d as u128) as u64);
    let r = BigInt::from(d & 1);
    // continued fraction of omega = (r + sqrt d) / 2 as (P + sqrt d) / Q
    let (mut pp, mut qq) = (r.clone(), BigInt::from(2));
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::zero());
    loop {
        let a = floor_quadratic(&pp, &qq, &s);
        (h0, h1) = (h1.clone(), &a * &h1 + &h0);
        (k0, k1) = (k1.clone(), &a * &k1 + &k0);
        let x = BigInt::from(2) * &h1 - &r * &k1;
        let n = &x * &x - &db * &k1 * &k1;
        if n == BigInt::from(4) || n == BigInt::from(-4) {
            let norm = if n.is_positive() { 1 } else { -1 };
            return Ok((x.to_biguint().expect("positive"), k1.to_biguint().expect("positive"), norm));
        }
        pp = &a * &qq - &pp;
        qq = (&db - &pp * &pp) / &qq;
    }
}

/// Reduced indefinite forms of discriminant `d`:
/// `0 < b < sqrt d` and `sqrt d - b < 2|a| < sqrt d + b`.
fn reduced_forms(d: i64) -> Vec<(i64, i64, i64)> {
    let s = arith::isqrt(d as u128) as i64;
    let mut out = Vec::new();
    for b in (1..=s).filter(|b| (b - d).rem_euclid(2) == 0) {
        let n = (d - b * b) / 4;
        for a_abs in arith::divisors(n as u64).into_iter().map(|a| a as i64) {
            let lo = (2 * a_abs + b) * (2 * a_abs + b) > d;
            let hi = 2 * a_abs - b < 0 || (2 * a_abs - b) * (2 * a_abs - b) < d;
            if !(lo && hi) {
                continue;
            }
            for a in [a_abs, -a_abs] {
                let c = -n / a;
                if arith::gcd(arith::gcd(a_abs as u64, b as u64), c.unsigned_abs()) == 1 {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

fn rho(form: (i64, i64, i64), d: i64, s: i64) -> (i64, i64, i64) {
    let (_, b, c) = form;
    let two_c = 2 * c.abs();
    let t = (s + b).div_euclid(two_c);
    let b2 = -b + two_c * t;
    (c, b2, (b2 * b2 - d) / (4 * c))
}

/// `(h, h+)`, with `h+` counted as cycles of reduced forms.
pub fn class_number(d: i64) -> Result<(u64, u64)> {
    if !is_real_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let s = arith::isqrt(d as u128) as i64;
    let forms = reduced_forms(d);
    let mut seen = HashSet::new();
    let mut cycles = 0u64;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        let mut g = f;
        loop {
            seen.insert(g);
            g = rho(g, d, s);
            if g == f {
                break;
            }
            debug_assert!(forms.contains(&g), "rho left the reduced set at {g:?}");
        }
    }
    let (_, _, norm) = fundamental_unit(d)?;
    let h = if norm == -1 { cycles } else { cycles / 2 };
    Ok((h, cycles))
}

/// Class number by enumerating ideals `[a, (b + sqrt d)/2]` of norm at most
/// `sqrt(d)/2` and grouping them by the period of their continued fraction.
pub fn class_number_by_ideals(d: i64) -> Result<u64> {
    if !is_real_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let s = arith::isqrt(d as u128) as i64;
    let mut classes = HashSet::new();
    let mut a = 1i64;
    while 4 * a * a <= d {
        for b in 0..2 * a {
            if (b * b - d).rem_euclid(4 * a) == 0 {
                classes.insert(cycle_representative(b, 2 * a, d, s));
            }
        }
        a += 1;
    }
    Ok(classes.len() as u64)
}

/// Least state `(P, Q)` on the period of the expansion of `(P + sqrt d) / Q`.
fn cycle_representative(p: i64, q: i64, d: i64, s: i64) -> (i64, i64) {
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut states = Vec::new();
    let (mut p, mut q) = (p, q);
    loop {
        if let Some(&start) = index.get(&(p, q)) {
            return *states[start..].iter().min().expect("nonempty period");
        }
        index.insert((p, q), states.len());
        states.push((p, q));
        let a = if q > 0 { (p + s).div_euclid(q) } else { -(p + s).div_euclid(-q) - 1 };
        p = a * q - p;
        q = (d - p * p) / q;
    }
}

/// `((x + y r)/2, (x - y r)/2)` mod `p^N`, `r` the canonical square root of `d`.
pub fn embed_unit(field: &QuadFieldData, p: u64, prec: u32) -> Result<(PadicInt, PadicInt)> {
    if field.d % p as i64 == 0 {
        return Err(Error::PrimeDivides { p, what: format!("d = {}", field.d) });
    }
    let r = hensel_sqrt(field.d, p, prec)?;
    embed_with_root(field, &r)
}

pub fn embed_with_root(field: &QuadFieldData, r: &PadicInt) -> Result<(PadicInt, PadicInt)> {
    let ring = r.ring();
    let x = PadicInt::in_ring(ring, ring.from_bigint(&BigInt::from(field.x.clone())));
    let y = PadicInt::in_ring(ring, ring.from_bigint(&BigInt::from(field.y.clone())));
    let half = PadicInt::in_ring(ring, 2).inv()?;
    Ok(((x + y * *r) * half, (x - y * *r) * half))
}

/// Unit-embedding data for a real abelian field of degree `g`, either
/// computed internally (g = 2) or supplied by an external system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalFieldData {
    pub label: String,
    pub g: u32,
    pub d: i64,
    pub h: u64,
    pub p: u64,
    pub prec: u32,
    pub sqrt_d: PadicInt,
    pub units: Vec<Vec<PadicInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Residue {
    Int(i64),
    Text(String),
}

impl Residue {
    fn parse(&self, ring: &ResidueRing, what: &str) -> Result<PadicInt> {
        let v: u128 = match self {
            Residue::Int(i) if *i >= 0 => *i as u128,
            Residue::Int(i) => return Err(Error::FieldDocument(format!("{what}: negative residue {i}"))),
            Residue::Text(t) => {
                t.trim().parse().map_err(|_| Error::FieldDocument(format!("{what}: '{t}' is not a decimal residue")))?
            }
        };
        if v >= ring.modulus() {
            return Err(Error::FieldDocument(format!("{what}: {v} is not reduced mod p^N")));
        }
        Ok(PadicInt::in_ring(*ring, v))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDocument {
    label: String,
    g: u32,
    d: i64,
    h: u64,
    p: u64,
    #[serde(rename = "N")]
    n: u32,
    sqrt_d: Residue,
    units: Vec<Vec<Residue>>,
}

impl ExternalFieldData {
    /// The document for a quadratic field, using the canonical embedding.
    pub fn from_quadratic(field: &QuadFieldData, p: u64, prec: u32) -> Result<Self> {
        let sqrt_d = hensel_sqrt(field.d, p, prec)?;
        let (z, _) = embed_with_root(field, &sqrt_d)?;
        let data = ExternalFieldData {
            label: field.label(),
            g: 2,
            d: field.d,
            h: field.h,
            p,
            prec,
            sqrt_d,
            units: vec![vec![z]],
        };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::FieldDocument(m));
        if self.g < 2 {
            return bad(format!("degree g = {} must be at least 2", self.g));
        }
        if self.h == 0 {
            return bad("class number must be positive".into());
        }
        if self.d <= 1 {
            return bad(format!("discriminant {} must exceed 1", self.d));
        }
        if self.d % self.p as i64 == 0 {
            return bad(format!("p = {} is ramified (divides d = {})", self.p, self.d));
        }
        let rank = (self.g - 1) as usize;
        if self.units.len() != rank || self.units.iter().any(|row| row.len() != rank) {
            return bad(format!("unit matrix must be {rank} x {rank} for g = {}", self.g));
        }
        for (j, row) in self.units.iter().enumerate() {
            for (k, u) in row.iter().enumerate() {
                if !u.is_unit() {
                    return bad(format!("units[{j}][{k}] = {} is not a unit mod {}", u.residue(), self.p));
                }
            }
        }
        let d = PadicInt::in_ring(self.sqrt_d.ring(), self.sqrt_d.ring().from_i128(self.d as i128));
        if self.sqrt_d * self.sqrt_d != d {
            return bad(format!("sqrt_d^2 is not congruent to {} mod {}^{}", self.d, self.p, self.prec));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: FieldDocument = toml::from_str(text).map_err(|e| Error::FieldDocument(e.message().to_string()))?;
        if doc.label.trim().is_empty() {
            return Err(Error::FieldDocument("label must not be empty".into()));
        }
        let ring = ResidueRing::new(doc.p, doc.n).map_err(|e| Error::FieldDocument(e.to_string()))?;
        let sqrt_d = doc.sqrt_d.parse(&ring, "sqrt_d")?;
        let units = doc
            .units
            .iter()
            .enumerate()
            .map(|(j, row)| {
                row.iter()
                    .enumerate()
                    .map(|(k, r)| r.parse(&ring, &format!("units[{j}][{k}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let data =
            ExternalFieldData { label: doc.label, g: doc.g, d: doc.d, h: doc.h, p: doc.p, prec: doc.n, sqrt_d, units };
        data.validate()?;
        Ok(data)
    }

    pub fn to_toml(&self) -> String {
        let text = |z: &PadicInt| Residue::Text(z.residue().to_string());
        let doc = FieldDocument {
            label: self.label.clone(),
            g: self.g,
            d: self.d,
            h: self.h,
            p: self.p,
            n: self.prec,
            sqrt_d: text(&self.sqrt_d),
            units: self.units.iter().map(|row| row.iter().map(text).collect()).collect(),
        };
        toml::to_string(&doc).expect("field document serialises")
    }
}

/// Whether `d` is a square mod `p` (and prime to it): the split condition.
pub fn splits(d: i64, p: u64) -> bool {
    arith::kronecker(d, p) == 1
}
