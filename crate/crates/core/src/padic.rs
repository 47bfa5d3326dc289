//! Truncated p-adic integers.
//!
//! A [`PadicInt`] is a residue modulo `p^N` together with its absolute
//! precision `N`. Binary operations run at the minimum precision of their
//! operands. The residue lives in a `u128`, so `p^N` must stay below `2^127`;
//! this comfortably covers every precision the congruence checks need.
//!
//! The Fermat-quotient operators and the Iwasawa logarithm are defined here
//! as well, since they are the only transcendental operations on units that
//! the rest of the crate needs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_modular::ModularCoreOps;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// `Z / p^N Z` with `p` an admissible prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueRing {
    p: u64,
    prec: u32,
    modulus: u128,
}

impl ResidueRing {
    pub fn new(p: u64, prec: u32) -> Result<Self> {
        if p <= 3 || !arith::is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        match arith::checked_prime_power(p, prec) {
            Some(m) if m < (1u128 << 127) => Ok(ResidueRing { p, prec, modulus: m }),
            _ => Err(Error::PrecisionTooLarge { p, prec }),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        a.mulm(b, &self.modulus)
    }

    pub fn pow(&self, base: u128, mut exp: u128) -> u128 {
        let mut acc = 1 % self.modulus;
        let mut b = base % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, base: u128, exp: &BigUint) -> u128 {
        let mut acc = 1 % self.modulus;
        for bit in (0..exp.bits()).rev() {
            acc = self.mul(acc, acc);
            if exp.bit(bit) {
                acc = self.mul(acc, base);
            }
        }
        acc
    }

    /// Inverse of a residue prime to `p`.
    pub fn inv(&self, a: u128) -> Result<u128> {
        let a = a % self.modulus;
        if a.is_multiple_of(self.p as u128) {
            return Err(Error::NotUnit(a.to_string(), self.p));
        }
        // extended Euclid; all quantities stay below the modulus < 2^127
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.modulus as i128) as u128)
    }

    pub fn from_i128(&self, v: i128) -> u128 {
        let m = self.modulus;
        if v >= 0 {
            (v as u128) % m
        } else {
            let r = v.unsigned_abs() % m;
            if r == 0 {
                0
            } else {
                m - r
            }
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> u128 {
        let m = BigInt::from(self.modulus);
        let r = ((v % &m) + &m) % &m;
        r.to_u128().expect("reduced value fits the modulus")
    }

    /// Reduction of a p-integral rational.
    pub fn from_rational(&self, q: &BigRational) -> Result<u128> {
        let den_v = bigint_valuation(q.denom(), self.p);
        if den_v > 0 {
            let num_v = if q.numer().is_zero() { 0 } else { bigint_valuation(q.numer(), self.p) };
            return Err(Error::NotIntegral { valuation: num_v as i64 - den_v as i64 });
        }
        let n = self.from_bigint(q.numer());
        let d = self.from_bigint(q.denom());
        Ok(self.mul(n, self.inv(d)?))
    }

    /// p-adic valuation of a residue, `None` for zero.
    pub fn valuation(&self, a: u128) -> Option<u32> {
        if a.is_multiple_of(self.modulus) {
            return None;
        }
        let p = self.p as u128;
        let mut a = a;
        let mut v = 0;
        while a.is_multiple_of(p) {
            a /= p;
            v += 1;
        }
        Some(v)
    }
}

pub(crate) fn bigint_valuation(v: &BigInt, p: u64) -> u32 {
    debug_assert!(!v.is_zero());
    let p = BigInt::from(p);
    let mut v = v.abs();
    let mut k = 0;
    loop {
        let (q, r) = (&v / &p, &v % &p);
        if !r.is_zero() {
            return k;
        }
        v = q;
        k += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn rational_valuation(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(bigint_valuation(q.numer(), p) as i64 - bigint_valuation(q.denom(), p) as i64)
}

/// Valuation of a truncated quantity: exact, or only bounded below by the
/// precision when the residue vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Valuation {
    Exact(u32),
    AtLeast(u32),
}

impl Valuation {
    /// Lower bound carried by the value.
    pub fn floor(&self) -> u32 {
        match *self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_at_least(&self, k: u32) -> bool {
        self.floor() >= k
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.floor()
            .cmp(&other.floor())
            .then_with(|| matches!(self, Valuation::AtLeast(_)).cmp(&matches!(other, Valuation::AtLeast(_))))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// A p-adic integer known modulo `p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    ring: ResidueRing,
    residue: u128,
}

impl PadicInt {
    pub fn new(p: u64, prec: u32, residue: u128) -> Result<Self> {
        let ring = ResidueRing::new(p, prec)?;
        Ok(PadicInt { ring, residue: residue % ring.modulus })
    }

    pub fn from_i128(p: u64, prec: u32, v: i128) -> Result<Self> {
        let ring = ResidueRing::new(p, prec)?;
        Ok(PadicInt { ring, residue: ring.from_i128(v) })
    }

    pub fn from_bigint(p: u64, prec: u32, v: &BigInt) -> Result<Self> {
        let ring = ResidueRing::new(p, prec)?;
        Ok(PadicInt { ring, residue: ring.from_bigint(v) })
    }

    pub fn from_rational(p: u64, prec: u32, q: &BigRational) -> Result<Self> {
        let ring = ResidueRing::new(p, prec)?;
        Ok(PadicInt { ring, residue: ring.from_rational(q)? })
    }

    pub fn in_ring(ring: ResidueRing, residue: u128) -> Self {
        PadicInt { ring, residue: residue % ring.modulus }
    }

    pub fn zero(p: u64, prec: u32) -> Result<Self> {
        Self::new(p, prec, 0)
    }

    pub fn one(p: u64, prec: u32) -> Result<Self> {
        Self::new(p, prec, 1)
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn precision(&self) -> u32 {
        self.ring.prec
    }

    pub fn residue(&self) -> u128 {
        self.residue
    }

    pub fn modulus(&self) -> u128 {
        self.ring.modulus
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn is_unit(&self) -> bool {
        self.ring.prec > 0 && !self.residue.is_multiple_of(self.ring.p as u128)
    }

    pub fn valuation(&self) -> Valuation {
        match self.ring.valuation(self.residue) {
            Some(v) => Valuation::Exact(v),
            None => Valuation::AtLeast(self.ring.prec),
        }
    }

    /// Signed representative in `(-p^N/2, p^N/2]`.
    pub fn signed_residue(&self) -> i128 {
        let m = self.ring.modulus;
        if self.residue > m / 2 {
            -((m - self.residue) as i128)
        } else {
            self.residue as i128
        }
    }

    /// Reduce to a lower precision.
    pub fn reduce(&self, prec: u32) -> Result<Self> {
        if prec > self.ring.prec {
            return Err(Error::InsufficientPrecision { needed: prec, available: self.ring.prec });
        }
        PadicInt::new(self.ring.p, prec, self.residue)
    }

    /// Reinterpret the canonical representative at another precision.
    ///
    /// Raising precision this way is only meaningful for quantities whose
    /// canonical representative is the intended value (truncations).
    pub fn with_precision(&self, prec: u32) -> Result<Self> {
        PadicInt::new(self.ring.p, prec, self.residue)
    }

    fn same_prime(&self, other: &Self) -> Result<ResidueRing> {
        if self.ring.p != other.ring.p {
            return Err(Error::PrimeMismatch(self.ring.p, other.ring.p));
        }
        let prec = self.ring.prec.min(other.ring.prec);
        Ok(if prec == self.ring.prec { self.ring } else { other.ring })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let r = self.same_prime(other)?;
        Ok(PadicInt::in_ring(r, r.add(self.residue % r.modulus, other.residue % r.modulus)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let r = self.same_prime(other)?;
        Ok(PadicInt::in_ring(r, r.sub(self.residue % r.modulus, other.residue % r.modulus)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let r = self.same_prime(other)?;
        Ok(PadicInt::in_ring(r, r.mul(self.residue % r.modulus, other.residue % r.modulus)))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(PadicInt::in_ring(self.ring, self.ring.inv(self.residue)?))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, exp: u128) -> Self {
        PadicInt::in_ring(self.ring, self.ring.pow(self.residue, exp))
    }

    pub fn pow_big(&self, exp: &BigUint) -> Self {
        PadicInt::in_ring(self.ring, self.ring.pow_big(self.residue, exp))
    }

    pub fn scale(&self, k: i128) -> Self {
        PadicInt::in_ring(self.ring, self.ring.mul(self.residue, self.ring.from_i128(k)))
    }

    /// Exact division by `p^k`; the result is known to precision `N - k`.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        if k > self.ring.prec {
            return Err(Error::InsufficientPrecision { needed: k, available: self.ring.prec });
        }
        if !self.valuation().is_at_least(k) {
            return Err(Error::NotIntegral { valuation: self.valuation().floor() as i64 - k as i64 });
        }
        let pk = (self.ring.p as u128).pow(k);
        PadicInt::new(self.ring.p, self.ring.prec - k, self.residue / pk)
    }

    /// Multiplication by `p^k`; the result is known to precision `N + k`.
    pub fn mul_p_pow(&self, k: u32) -> Result<Self> {
        let pk = (self.ring.p as u128).pow(k);
        let ring = ResidueRing::new(self.ring.p, self.ring.prec + k)?;
        Ok(PadicInt::in_ring(ring, ring.mul(self.residue, pk)))
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, BigUint::from(self.residue))
    }
}

impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: PadicInt) -> PadicInt {
        self.checked_add(&rhs).expect("p-adic addition across different primes")
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: PadicInt) -> PadicInt {
        self.checked_sub(&rhs).expect("p-adic subtraction across different primes")
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: PadicInt) -> PadicInt {
        self.checked_mul(&rhs).expect("p-adic multiplication across different primes")
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        PadicInt::in_ring(self.ring, self.ring.neg(self.residue))
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.ring.p, self.ring.prec)
    }
}

/// `z = omega(z) * <z>` with `<z> = 1 + p * ztilde`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitDecomposition {
    pub omega: PadicInt,
    pub principal: PadicInt,
    pub ztilde: PadicInt,
}

fn require_unit(z: &PadicInt) -> Result<()> {
    if z.is_unit() {
        Ok(())
    } else {
        Err(Error::NotUnit(z.to_string(), z.p()))
    }
}

/// Teichmüller representative: the (p-1)-th root of unity congruent to `z` mod p.
pub fn teichmuller(z: &PadicInt) -> Result<PadicInt> {
    require_unit(z)?;
    let mut w = *z;
    // each p-th power gains one digit of agreement with omega(z)
    for _ in 0..z.precision() {
        w = w.pow(z.p() as u128);
    }
    Ok(w)
}

pub fn unit_decompose(z: &PadicInt) -> Result<UnitDecomposition> {
    let omega = teichmuller(z)?;
    let principal = z.checked_mul(&omega.inv()?)?;
    let ztilde = (principal - PadicInt::in_ring(principal.ring(), 1)).div_p_pow(1)?;
    Ok(UnitDecomposition { omega, principal, ztilde })
}

/// Guard digits for the logarithm series at target precision `prec`.
pub fn log_guard_digits(p: u64, prec: u32) -> u32 {
    arith::ceil_log(p, prec.max(1) as u64) + 2
}

/// Number of series terms needed so that every dropped term of
/// `sum (-1)^(j+1) u^j / j` with `v(u) >= 1` vanishes mod `p^work`.
pub(crate) fn log_series_terms(p: u64, work: u32) -> u64 {
    let mut j = 1u64;
    while (j as i64) - (arith::floor_log(p, j) as i64) <= work as i64 {
        j += 1;
    }
    j
}

/// Divide a residue of true valuation >= v_p(j) by the integer `j`, in the
/// ring `work`, landing in `target` (which must be at most `work - v_p(j)`).
pub(crate) fn div_by_index(work: &ResidueRing, target: &ResidueRing, t: u128, j: u64) -> u128 {
    let e = arith::valuation_u64(j, work.p);
    let pe = (work.p as u128).pow(e);
    debug_assert_eq!(t % pe, 0);
    let unit = j / (work.p.pow(e));
    let q = (t / pe) % target.modulus;
    target.mul(q, target.inv(unit as u128 % target.modulus).expect("unit part of index"))
}

/// `log(w)` for a principal unit `w = 1 + u`, `v(u) >= 1`, as a residue of `target`.
pub(crate) fn log_principal(work: &ResidueRing, target: &ResidueRing, u: u128) -> u128 {
    let terms = log_series_terms(work.p, work.prec);
    let mut acc = 0u128;
    let mut power = 1u128;
    for j in 1..terms {
        power = work.mul(power, u);
        if power == 0 {
            break;
        }
        let term = div_by_index(work, target, power, j);
        acc = if j % 2 == 1 { target.add(acc, term) } else { target.sub(acc, term) };
    }
    acc
}

/// The Iwasawa logarithm of a unit, modulo `p^N`.
///
/// Computed as `log(z^(p-1)) / (p-1)`, which kills the Teichmüller part.
pub fn iwasawa_log(z: &PadicInt) -> Result<PadicInt> {
    require_unit(z)?;
    let p = z.p();
    let n = z.precision();
    let work = ResidueRing::new(p, n + log_guard_digits(p, n))?;
    let w = work.pow(z.residue(), (p - 1) as u128);
    let u = work.sub(w, 1);
    let target = z.ring();
    let log_w = log_principal(&work, &target, u);
    let inv = target.inv(((p - 1) as u128) % target.modulus)?;
    Ok(PadicInt::in_ring(target, target.mul(log_w, inv)))
}

/// Fermat quotient `((z^(p-1) mod p^2) - 1) / p`, a residue mod p.
pub fn fermat_quotient(z: &PadicInt) -> Result<u64> {
    require_unit(z)?;
    if z.precision() < 2 {
        return Err(Error::InsufficientPrecision { needed: 2, available: z.precision() });
    }
    let r = z.reduce(2)?;
    let w = r.pow((z.p() - 1) as u128);
    Ok(((w.residue() + r.modulus() - 1) % r.modulus() / z.p() as u128) as u64)
}

/// `Q_{p,n}(z)`: the truncation mod `p^(n+1)` of `-(1/p) log_p(z)`.
pub fn higher_fermat_quotient(z: &PadicInt, n: u32) -> Result<PadicInt> {
    require_unit(z)?;
    if n == 0 {
        return Err(Error::Config("level n must be positive".into()));
    }
    if z.precision() < n + 2 {
        return Err(Error::InsufficientPrecision { needed: n + 2, available: z.precision() });
    }
    let log = iwasawa_log(&z.reduce(n + 2)?)?;
    Ok(-log.div_p_pow(1)?)
}

/// Square root of `d` in `Z_p` to precision `N`, normalised so that its
/// residue mod p lies in `[1, (p-1)/2]`.
pub fn hensel_sqrt(d: i64, p: u64, prec: u32) -> Result<PadicInt> {
    let ring = ResidueRing::new(p, prec)?;
    let dm = d.rem_euclid(p as i64) as u64;
    if dm == 0 {
        return Err(Error::PrimeDivides { p, what: format!("d = {d}") });
    }
    let r0 = (1..=(p - 1) / 2).find(|&r| (r * r) % p == dm).ok_or(Error::NonResidue { d, p })?;
    let target = ring.from_i128(d as i128);
    let mut r = r0 as u128;
    // Newton: r <- r - (r^2 - d) / (2r); doubles the correct digits each step
    let mut correct = 1;
    while correct < prec {
        let f = ring.sub(ring.mul(r, r), target);
        let step = ring.mul(f, ring.inv(ring.mul(2, r))?);
        r = ring.sub(r, step);
        correct *= 2;
    }
    Ok(PadicInt::in_ring(ring, r))
}

/// `1` in the ring of `z`.
pub fn one_like(z: &PadicInt) -> PadicInt {
    PadicInt::in_ring(z.ring(), 1)
}

/// Embed a signed integer in the ring of `z`.
pub fn int_like(z: &PadicInt, v: i128) -> PadicInt {
    PadicInt::in_ring(z.ring(), z.ring().from_i128(v))
}
