//! Small-integer number theory used throughout the crate.

use num_integer::{Integer, Roots};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut q = 3;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut q = 1;
    while q * q <= n {
        if n.is_multiple_of(q) {
            small.push(q);
            if q * q != n {
                large.push(n / q);
            }
        }
        q += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn moebius(n: u64) -> i64 {
    let mut m = n;
    let mut sign = 1;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            m /= q;
            if m.is_multiple_of(q) {
                return 0;
            }
            sign = -sign;
        }
        q += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && moebius(n.unsigned_abs()) != 0
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Multiplicative order of `a` modulo `m` (gcd(a, m) = 1 assumed).
pub fn mult_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
    }
    k
}

/// Least primitive root modulo the prime `p`.
pub fn least_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let fs = prime_factors(p - 1);
    (2..p).find(|&g| fs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).expect("every prime has a primitive root")
}

/// Exponent of `p` in `n` (n != 0).
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Floor of the integer square root.
pub fn isqrt(n: u128) -> u128 {
    n.sqrt()
}

pub fn is_square(n: u128) -> bool {
    let r = n.sqrt();
    r * r == n
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (d/a) for a >= 0.
pub fn kronecker(d: i64, a: u64) -> i32 {
    if a == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut out = 1;
    while a.is_multiple_of(2) {
        a /= 2;
        if d % 2 == 0 {
            return 0;
        }
        match d.rem_euclid(8) {
            1 | 7 => {}
            _ => out = -out,
        }
    }
    if a == 1 {
        out
    } else {
        out * jacobi(d, a)
    }
}

/// `ceil(log_p(n))` for n >= 1.
pub fn ceil_log(p: u64, n: u64) -> u32 {
    let mut k = 0;
    let mut pk: u128 = 1;
    while pk < n as u128 {
        pk *= p as u128;
        k += 1;
    }
    k
}

/// `floor(log_p(n))` for n >= 1.
pub fn floor_log(p: u64, n: u64) -> u32 {
    let mut k = 0;
    let mut pk: u128 = p as u128;
    while pk <= n as u128 {
        pk *= p as u128;
        k += 1;
    }
    k
}

/// `p^k` if it fits in a u128.
pub fn checked_prime_power(p: u64, k: u32) -> Option<u128> {
    (p as u128).checked_pow(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let ps: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(least_primitive_root(5), 2);
        assert_eq!(least_primitive_root(7), 3);
        assert_eq!(least_primitive_root(11), 2);
        assert_eq!(least_primitive_root(13), 2);
        assert_eq!(least_primitive_root(19), 2);
        assert_eq!(least_primitive_root(31), 3);
    }

    #[test]
    fn kronecker_matches_legendre_and_two() {
        // (8/3) = (2/3) = -1
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(12, 6), 0);
        assert_eq!((1..5).map(|a| kronecker(5, a)).collect::<Vec<_>>(), vec![1, -1, -1, 1]);
    }

    #[test]
    fn moebius_and_squarefree() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
        assert!(is_squarefree(79));
        assert!(!is_squarefree(18));
    }

    #[test]
    fn logs() {
        assert_eq!(ceil_log(5, 1), 0);
        assert_eq!(ceil_log(5, 6), 2);
        assert_eq!(floor_log(5, 24), 1);
        assert_eq!(floor_log(5, 25), 2);
        assert_eq!(mult_order(19, 5), 2);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }
}
