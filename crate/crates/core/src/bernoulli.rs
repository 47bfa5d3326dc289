//! Bernoulli numbers, generalized Bernoulli numbers and L-values at
//! negative integers.
//!
//! `B_{n,chi}` is available two ways: exactly as a rational (for characters
//! with values in `{0, +1, -1}`), and modulo `p^M` through the p-adic limit
//! of power sums, which stays cheap for the very large `n` that occur at the
//! special points `1 - p^n (p - 1)`.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::valuation_u64;
use crate::characters::DirichletChar;
use crate::error::{Error, Result};
use crate::padic::{PadicInt, ResidueRing};

/// Largest `n` for which [`gen_bernoulli`] uses the exact rational path.
pub const DEFAULT_EXACT_BOUND: u64 = 400;

static BERNOULLI: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// `B_0, ..., B_{2m}` through tangent numbers (integer-only recurrence).
fn bernoulli_table(m: usize) -> Vec<BigRational> {
    let mut t: Vec<BigInt> = Vec::with_capacity(m + 1);
    t.push(BigInt::zero());
    let mut fact = BigInt::one();
    for k in 1..=m {
        t.push(fact.clone());
        fact *= k;
    }
    for k in 2..=m {
        for j in k..=m {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    let mut out = vec![BigRational::zero(); 2 * m + 1];
    out[0] = BigRational::one();
    if m >= 1 {
        out[1] = BigRational::new((-1).into(), 2.into());
    }
    for (k, tk) in t.iter().enumerate().skip(1) {
        let four_k = BigInt::one() << (2 * k);
        let num = tk * (2 * k);
        let den = &four_k * (&four_k - 1u32);
        let b = BigRational::new(num, den);
        out[2 * k] = if k % 2 == 1 { b } else { -b };
    }
    out
}

/// `B_n` with `B_1 = -1/2`.
pub fn bernoulli_number(n: u64) -> BigRational {
    let n = n as usize;
    let cache = BERNOULLI.get_or_init(|| Mutex::new(bernoulli_table(32)));
    let mut guard = cache.lock().expect("bernoulli cache poisoned");
    if n >= guard.len() {
        let half = (n / 2 + 1).max(guard.len());
        *guard = bernoulli_table(half);
    }
    guard[n].clone()
}

/// Binomial row `C(n, 0..=n)`.
fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

pub fn bernoulli_poly(n: u64, x: &BigRational) -> BigRational {
    let row = binomial_row(n);
    let mut acc = BigRational::zero();
    let mut xp = BigRational::one();
    // sum_k C(n,k) B_k x^(n-k), walking k downwards so powers of x grow
    for k in (0..=n).rev() {
        let b = bernoulli_number(k);
        if !b.is_zero() {
            acc += BigRational::from(row[k as usize].clone()) * b * &xp;
        }
        xp *= x;
    }
    acc
}

/// Exact `B_{n,chi}` for a character with values in `{0, +1, -1}`.
pub fn gen_bernoulli_exact(n: u64, chi: &DirichletChar) -> Result<BigRational> {
    if !chi.is_exact() {
        return Err(Error::NotExactlyValued);
    }
    let f = chi.conductor();
    let signs: Vec<i32> = (1..=f as i64).map(|a| chi.sign(a)).collect::<Result<_>>()?;
    // S_j = sum_a chi(a) a^j for j = 0..=n
    let mut powers: Vec<BigInt> = vec![BigInt::one(); f as usize];
    let mut sums = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        if j > 0 {
            for (a, pw) in powers.iter_mut().enumerate() {
                *pw *= a as u64 + 1;
            }
        }
        let mut s = BigInt::zero();
        for (pw, &c) in powers.iter().zip(&signs) {
            match c {
                1 => s += pw,
                -1 => s -= pw,
                _ => {}
            }
        }
        sums.push(s);
    }
    // B_{n,chi} = sum_k C(n,k) B_k f^(k-1) S_{n-k}
    let row = binomial_row(n);
    let fb = BigInt::from(f);
    let mut acc = BigRational::zero();
    let mut fpow = BigRational::new(BigInt::one(), fb.clone());
    for k in 0..=n {
        let b = bernoulli_number(k);
        if !b.is_zero() && !sums[(n - k) as usize].is_zero() {
            let c = row[k as usize].clone() * &sums[(n - k) as usize];
            acc += b * &fpow * BigRational::from(c);
        }
        fpow *= &fb;
    }
    Ok(acc)
}

/// `L(1 - n, chi) = -B_{n,chi} / n`.
pub fn classical_l_value(n: u64, chi: &DirichletChar) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Config("L(1 - n) needs n >= 1".into()));
    }
    Ok(-gen_bernoulli_exact(n, chi)? / BigRational::from(BigInt::from(n)))
}

/// `prod_chi L(1 - s, chi)` over the given (nontrivial) characters.
pub fn zeta_ratio(chars: &[DirichletChar], s: u64) -> Result<BigRational> {
    chars.iter().try_fold(BigRational::one(), |acc, chi| Ok(acc * classical_l_value(s, chi)?))
}

/// Evaluation of `sum_{a=1}^{f p^L} chi(a) phi(a)` for polynomials `phi`,
/// by folding the digits of `a` one level at a time.
struct PowerSummer<'a> {
    ring: ResidueRing,
    f: u64,
    chi: &'a [u128],
    // pascal[j][i] = C(j, i) mod p^K
    pascal: Vec<Vec<u128>>,
    // digit power sums P_e = sum_{t<p} t^e
    digit_sums: Vec<u128>,
}

impl<'a> PowerSummer<'a> {
    fn new(ring: ResidueRing, f: u64, chi: &'a [u128], degree: usize) -> Self {
        let mut pascal: Vec<Vec<u128>> = Vec::with_capacity(degree + 1);
        for j in 0..=degree {
            let mut row = vec![0u128; j + 1];
            row[0] = 1;
            row[j] = 1;
            for i in 1..j {
                row[i] = ring.add(pascal[j - 1][i - 1], pascal[j - 1][i]);
            }
            pascal.push(row);
        }
        let p = ring.p() as u128;
        let digit_sums =
            (0..=degree).map(|e| (0..p).fold(0u128, |acc, t| ring.add(acc, ring.pow(t, e as u128)))).collect();
        PowerSummer { ring, f, chi, pascal, digit_sums }
    }

    /// `U(y) -> sum_{t<p} U(y + t c)`.
    fn fold_digit(&self, u: &[u128], c: u128) -> Vec<u128> {
        let r = &self.ring;
        let d = u.len();
        let mut cpow = vec![1 % r.modulus(); d];
        for e in 1..d {
            cpow[e] = r.mul(cpow[e - 1], c);
        }
        // weight_e = c^e * P_e
        let weight: Vec<u128> = (0..d).map(|e| r.mul(cpow[e], self.digit_sums[e])).collect();
        (0..d)
            .map(|i| {
                (i..d).fold(0u128, |acc, j| {
                    if u[j] == 0 {
                        acc
                    } else {
                        r.add(acc, r.mul(r.mul(u[j], self.pascal[j][i]), weight[j - i]))
                    }
                })
            })
            .collect()
    }

    fn twisted_eval(&self, u: &[u128]) -> u128 {
        let r = &self.ring;
        let mut acc = 0u128;
        for b in 1..=self.f {
            let c = self.chi[(b % self.f) as usize];
            if c == 0 {
                continue;
            }
            let v = u.iter().rev().fold(0u128, |h, &coef| r.add(r.mul(h, b as u128), coef));
            acc = r.add(acc, r.mul(c, v));
        }
        acc
    }

    /// Twisted sums of `phi` over `[1, f p^lo]` and `[1, f p^(lo+1)]`.
    fn sums(&self, phi: &[u128], lo: u32) -> (u128, u128) {
        let p = self.ring.p() as u128;
        let mut u = phi.to_vec();
        let mut step = self.f as u128 % self.ring.modulus();
        for _ in 0..lo {
            u = self.fold_digit(&u, step);
            step = self.ring.mul(step, p);
        }
        let first = self.twisted_eval(&u);
        let u = self.fold_digit(&u, step);
        (first, self.twisted_eval(&u))
    }
}

/// Polynomial agreeing with `a^n` mod `p^K` on every p-adic unit `a`.
fn unit_power_poly(n: u64, ring: ResidueRing) -> Vec<u128> {
    let p = ring.p();
    let (q, r) = n.div_rem(&(p - 1));
    let terms = (ring.precision() as u64).min(q + 1);
    let step = (p - 1) as usize;
    let mut out = vec![0u128; r as usize + step * (terms as usize - 1) + 1];
    // base = (x^(p-1) - 1)^i, binom = C(q, i)
    let mut base = vec![1u128];
    let mut binom = BigUint::one();
    for i in 0..terms {
        let c = ring.from_bigint(&BigInt::from(binom.clone()));
        for (k, &b) in base.iter().enumerate() {
            out[r as usize + k] = ring.add(out[r as usize + k], ring.mul(c, b));
        }
        let mut next = vec![0u128; base.len() + step];
        for (k, &b) in base.iter().enumerate() {
            next[k] = ring.sub(next[k], b);
            next[k + step] = ring.add(next[k + step], b);
        }
        base = next;
        binom = binom * (q - i) / (i + 1);
    }
    out
}

fn normalise_sum(t: u128, level: u32, f: u64, ring: &ResidueRing, m: u32) -> Result<PadicInt> {
    let v = ring.valuation(t).unwrap_or(ring.precision());
    if v < level {
        return Err(Error::NotIntegral { valuation: v as i64 - level as i64 });
    }
    let q = PadicInt::in_ring(*ring, t).div_p_pow(level)?.reduce(m)?;
    q.checked_mul(&PadicInt::from_i128(ring.p(), m, f as i128)?.inv()?)
}

/// `B_{n,chi}` mod `p^M` as the limit of `(1 / (f p^k)) sum_{a <= f p^k} chi(a) a^n`.
pub fn gen_bernoulli_padic(n: u64, chi: &DirichletChar, p: u64, m: u32) -> Result<PadicInt> {
    let f = chi.conductor();
    // f = p^e f0: the division by f costs e more digits
    let e = valuation_u64(f, p);
    let f0 = f / p.pow(e);
    if m == 0 {
        return Err(Error::Config("target precision must be positive".into()));
    }
    let ceiling = m + 26;
    let mut k = m + 2;
    while k <= ceiling {
        let ring = match ResidueRing::new(p, m + k + 1 + e) {
            Ok(r) => r,
            Err(Error::PrecisionTooLarge { .. }) => break,
            Err(e) => return Err(e),
        };
        let table = chi.padic_table(ring)?;
        let (q, _) = n.div_rem(&(p - 1));
        let big_k = ring.precision() as u64;
        let (lo, hi) = if q < big_k {
            let mut phi = vec![0u128; n as usize + 1];
            phi[n as usize] = 1;
            PowerSummer::new(ring, f, &table, n as usize).sums(&phi, k)
        } else {
            // a^n only agrees with the polynomial on units; the multiples of p
            // contribute p^n * (...), which vanishes mod p^K since n >= K
            let g = unit_power_poly(n, ring);
            let summer = PowerSummer::new(ring, f, &table, g.len() - 1);
            let (all_lo, all_hi) = summer.sums(&g, k);
            let mut scaled = g.clone();
            let mut pp = 1 % ring.modulus();
            for c in scaled.iter_mut() {
                *c = ring.mul(*c, pp);
                pp = ring.mul(pp, p as u128);
            }
            let (mul_lo, mul_hi) = summer.sums(&scaled, k - 1);
            let chi_p = chi.padic_value(p as i64, ring)?;
            (ring.sub(all_lo, ring.mul(chi_p, mul_lo)), ring.sub(all_hi, ring.mul(chi_p, mul_hi)))
        };
        match (normalise_sum(lo, k + e, f0, &ring, m), normalise_sum(hi, k + 1 + e, f0, &ring, m)) {
            (Ok(a), Ok(b)) if a == b => return Ok(a),
            (Err(Error::NotIntegral { valuation: v1 }), Err(Error::NotIntegral { valuation: v2 })) if v1 == v2 => {
                return Err(Error::NotIntegral { valuation: v1 })
            }
            _ => k += 1,
        }
    }
    Err(Error::NoConvergence { p, prec: m, k })
}

/// `B_{n,chi}` mod `p^M`, exactly when `n <= exact_bound` and the character
/// is exactly valued, otherwise through power sums.
pub fn gen_bernoulli(n: u64, chi: &DirichletChar, p: u64, m: u32, exact_bound: u64) -> Result<PadicInt> {
    if n <= exact_bound && chi.is_exact() {
        PadicInt::from_rational(p, m, &gen_bernoulli_exact(n, chi)?)
    } else {
        gen_bernoulli_padic(n, chi, p, m)
    }
}

/// `L(1 - n, chi)` mod `p^M`. The division by `n` costs `v_p(n)` digits,
/// which are computed in advance.
pub fn l_value_padic(n: u64, chi: &DirichletChar, p: u64, m: u32, exact_bound: u64) -> Result<PadicInt> {
    if n == 0 {
        return Err(Error::Config("L(1 - n) needs n >= 1".into()));
    }
    let vn = crate::arith::valuation_u64(n, p);
    let b = gen_bernoulli(n, chi, p, m + vn, exact_bound)?;
    if !b.valuation().is_at_least(vn) {
        return Err(Error::NotIntegral { valuation: b.valuation().floor() as i64 - vn as i64 });
    }
    let unit = (n / p.pow(vn)) as i128;
    let q = b.div_p_pow(vn)?;
    Ok(-q.checked_div(&PadicInt::from_i128(p, m, unit)?)?)
}

/// Denominator of a rational as an integer (for tests and reports).
pub fn denominator_u64(q: &BigRational) -> Option<u64> {
    q.denom().abs().to_u64()
}
