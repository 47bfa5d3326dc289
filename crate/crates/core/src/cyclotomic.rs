//! Arithmetic in `(Z/p^N)[x] / Phi_f(x)` for `p` not dividing `f`.
//!
//! This is the ring of integers of `Q_p(zeta_f)` (a product of unramified
//! extensions) truncated at `p^N`, with `x` standing for `zeta_f`. It lets
//! the defining sum of Leopoldt's L-value be evaluated when `zeta_f` is not
//! in `Z_p`, i.e. when `f` does not divide `p - 1`.

use num_bigint::BigUint;
use num_traits::One;

use crate::arith;
use crate::error::{Error, Result};
use crate::padic::{div_by_index, log_guard_digits, log_series_terms, ResidueRing};

/// Integer coefficients of the cyclotomic polynomial `Phi_f`, lowest degree first.
pub fn cyclotomic_poly(f: u64) -> Vec<i128> {
    // Phi_f = prod_{e | f} (x^e - 1)^{mu(f/e)}
    let mut num = vec![1i128];
    let mut den = vec![1i128];
    for e in arith::divisors(f) {
        let target = match arith::moebius(f / e) {
            1 => &mut num,
            -1 => &mut den,
            _ => continue,
        };
        let mut next = vec![0i128; target.len() + e as usize];
        for (i, &c) in target.iter().enumerate() {
            next[i] -= c;
            next[i + e as usize] += c;
        }
        *target = next;
    }
    // exact division of monic integer polynomials
    let dn = den.len() - 1;
    let mut rem = num;
    let mut quot = vec![0i128; rem.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn] / den[dn];
        quot[i] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i + j] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Elements are coefficient vectors of length `phi(f)` in the power basis.
pub type Element = Vec<u128>;

#[derive(Clone, Debug)]
pub struct CyclotomicAlgebra {
    ring: ResidueRing,
    f: u64,
    // x^deg = sum tail[i] x^i modulo Phi_f
    tail: Vec<u128>,
}

impl CyclotomicAlgebra {
    pub fn new(f: u64, ring: ResidueRing) -> Result<Self> {
        if f == 0 || f.is_multiple_of(ring.p()) {
            return Err(Error::PrimeDivides { p: ring.p(), what: format!("conductor {f}") });
        }
        let phi = cyclotomic_poly(f);
        let deg = phi.len() - 1;
        let tail = phi[..deg].iter().map(|&c| ring.neg(ring.from_i128(c))).collect();
        Ok(CyclotomicAlgebra { ring, f, tail })
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn conductor(&self) -> u64 {
        self.f
    }

    pub fn degree(&self) -> usize {
        self.tail.len()
    }

    pub fn scalar(&self, c: u128) -> Element {
        let mut e = vec![0; self.degree()];
        e[0] = c % self.ring.modulus();
        e
    }

    pub fn one(&self) -> Element {
        self.scalar(1)
    }

    /// `x^k`, i.e. `zeta_f^k`.
    pub fn zeta_pow(&self, k: u64) -> Element {
        let mut out = self.one();
        let mut base = self.monomial(1);
        let mut k = k % self.f;
        while k > 0 {
            if k & 1 == 1 {
                out = self.mul(&out, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        out
    }

    fn monomial(&self, i: usize) -> Element {
        let mut raw = vec![0u128; i + 1];
        raw[i] = 1 % self.ring.modulus();
        self.reduce(raw)
    }

    fn reduce(&self, mut raw: Vec<u128>) -> Element {
        let deg = self.degree();
        let r = &self.ring;
        for i in (deg..raw.len()).rev() {
            let c = raw[i];
            if c == 0 {
                continue;
            }
            for (j, &t) in self.tail.iter().enumerate() {
                let k = i - deg + j;
                raw[k] = r.add(raw[k], r.mul(c, t));
            }
        }
        raw.truncate(deg);
        raw.resize(deg, 0);
        raw
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        a.iter().zip(b).map(|(&x, &y)| self.ring.add(x, y)).collect()
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        a.iter().zip(b).map(|(&x, &y)| self.ring.sub(x, y)).collect()
    }

    pub fn scale(&self, a: &Element, c: u128) -> Element {
        a.iter().map(|&x| self.ring.mul(x, c)).collect()
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let r = &self.ring;
        let mut raw = vec![0u128; 2 * self.degree()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                raw[i + j] = r.add(raw[i + j], r.mul(x, y));
            }
        }
        self.reduce(raw)
    }

    pub fn pow_big(&self, a: &Element, exp: &BigUint) -> Element {
        let mut acc = self.one();
        for bit in (0..exp.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if exp.bit(bit) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// `1 - x^a` multiplied into `acc`, using that `x^a` is a monomial before reduction.
    pub fn mul_one_minus_zeta(&self, acc: &Element, a: u64) -> Element {
        let a = (a % self.f) as usize;
        let r = &self.ring;
        let mut raw = vec![0u128; self.degree() + a];
        for (i, &c) in acc.iter().enumerate() {
            raw[i] = r.add(raw[i], c);
            raw[i + a] = r.sub(raw[i + a], c);
        }
        self.reduce(raw)
    }

    /// Order of the unit group of every residue field of the algebra.
    pub fn residue_unit_exponent(&self) -> BigUint {
        let k = arith::mult_order(self.ring.p() % self.f, self.f);
        BigUint::from(self.ring.p()).pow(k as u32) - BigUint::one()
    }

    /// Iwasawa logarithm of a unit, with coefficients reduced into `target`.
    ///
    /// `self` must be built at a working precision carrying the guard digits
    /// for `target` (see [`CyclotomicAlgebra::for_log`]).
    pub fn log_unit(&self, u: &Element, target: &ResidueRing) -> Result<Element> {
        let p = self.ring.p() as u128;
        let e = self.residue_unit_exponent();
        let w = self.pow_big(u, &e);
        let mut t = w;
        t[0] = self.ring.sub(t[0], 1);
        if t.iter().any(|&c| c % p != 0) {
            return Err(Error::NotUnit(format!("element of Z_{}[zeta_{}]", self.ring.p(), self.f), self.ring.p()));
        }
        let terms = log_series_terms(self.ring.p(), self.ring.precision());
        let mut acc = vec![0u128; self.degree()];
        let mut power = self.one();
        for j in 1..terms {
            power = self.mul(&power, &t);
            if power.iter().all(|&c| c == 0) {
                break;
            }
            for (slot, &c) in acc.iter_mut().zip(&power) {
                let term = div_by_index(&self.ring, target, c, j);
                *slot = if j % 2 == 1 { target.add(*slot, term) } else { target.sub(*slot, term) };
            }
        }
        let e_mod = target.from_bigint(&num_bigint::BigInt::from(e));
        let inv = target.inv(e_mod)?;
        Ok(acc.iter().map(|&c| target.mul(c, inv)).collect())
    }

    /// Algebra at the working precision used for logarithms landing mod `p^prec`.
    pub fn for_log(f: u64, p: u64, prec: u32) -> Result<Self> {
        CyclotomicAlgebra::new(f, ResidueRing::new(p, prec + log_guard_digits(p, prec))?)
    }

    /// Coefficient of `1` of an element that must lie in `Z/p^N`; the other
    /// coordinates are checked to vanish.
    pub fn rational_part(elem: &Element) -> Result<u128> {
        if elem.iter().skip(1).any(|&c| c != 0) {
            return Err(Error::InvalidCharacter("expected a Galois-invariant element".into()));
        }
        Ok(elem[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{iwasawa_log, PadicInt};

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(5), vec![1, 1, 1, 1, 1]);
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        // Phi_105 is the first with a coefficient of absolute value 2
        assert!(cyclotomic_poly(105).contains(&-2));
        for f in 1..120u64 {
            let phi = cyclotomic_poly(f);
            let totient = (1..=f).filter(|&a| arith::gcd(a, f) == 1).count();
            assert_eq!(phi.len() - 1, totient, "f = {f}");
        }
    }

    #[test]
    fn zeta_has_order_f() {
        let alg = CyclotomicAlgebra::new(5, ResidueRing::new(19, 3).unwrap()).unwrap();
        assert_eq!(alg.zeta_pow(5), alg.one());
        assert_ne!(alg.zeta_pow(1), alg.one());
        let s = (0..5).fold(vec![0; 4], |acc, k| alg.add(&acc, &alg.zeta_pow(k)));
        assert!(s.iter().all(|&c| c == 0));
        let lhs = alg.mul_one_minus_zeta(&alg.one(), 3);
        assert_eq!(lhs, alg.sub(&alg.one(), &alg.zeta_pow(3)));
    }

    #[test]
    fn log_agrees_with_scalar_log_under_specialisation() {
        // f = 5 divides 10: x -> xi specialises the algebra onto Z_11
        let (p, n) = (11u64, 3u32);
        let alg = CyclotomicAlgebra::for_log(5, p, n).unwrap();
        let target = ResidueRing::new(p, n).unwrap();
        let xi = crate::characters::primitive_root_of_unity(5, p, n).unwrap().xi;
        let u = alg.mul_one_minus_zeta(&alg.mul_one_minus_zeta(&alg.one(), 1), 2);
        let l = alg.log_unit(&u, &target).unwrap();
        let eval = l.iter().rev().fold(0u128, |acc, &c| target.add(target.mul(acc, xi.residue()), c));
        let z = (PadicInt::in_ring(target, 1) - xi) * (PadicInt::in_ring(target, 1) - xi.pow(2));
        assert_eq!(eval, iwasawa_log(&z).unwrap().residue());
    }

    #[test]
    fn log_is_additive_and_kills_roots_of_unity() {
        let (p, n) = (19u64, 4u32);
        let alg = CyclotomicAlgebra::for_log(5, p, n).unwrap();
        let target = ResidueRing::new(p, n).unwrap();
        let a = alg.mul_one_minus_zeta(&alg.one(), 1);
        let b = alg.mul_one_minus_zeta(&alg.scalar(3), 2);
        let la = alg.log_unit(&a, &target).unwrap();
        let lb = alg.log_unit(&b, &target).unwrap();
        let lab = alg.log_unit(&alg.mul(&a, &b), &target).unwrap();
        let sum: Vec<u128> = la.iter().zip(&lb).map(|(&x, &y)| target.add(x, y)).collect();
        assert_eq!(lab, sum);
        assert!(alg.log_unit(&alg.zeta_pow(2), &target).unwrap().iter().all(|&c| c == 0));
        assert!(alg.log_unit(&alg.scalar(19), &target).is_err());
    }
}
