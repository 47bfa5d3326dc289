//! Leopoldt's value `Lp(chi) = -(tau(chi)/f) sum chi_bar(a) log_p(1 - xi^a)`,
//! Kubota–Leopoldt values at `1 - s` with `(p - 1) | s`, and the relative
//! p-adic zeta value at `s = 1`.
//!
//! The defining sum is evaluated in `Z_p` when `f | p - 1`, and in the
//! cyclotomic algebra `Z_p[x]/Phi_f` otherwise. In the algebra the product
//! `tau(chi) * sum` is invariant under `x -> x^c` and so is a constant.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bernoulli::l_value_padic;
use crate::characters::{gauss_sum_with, primitive_root_of_unity, DirichletChar, EmbeddedRootOfUnity};
use crate::cyclotomic::CyclotomicAlgebra;
use crate::error::{Error, Result};
use crate::padic::{iwasawa_log, PadicInt, ResidueRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Defining sum with `xi` in `Z_p`.
    DefiningSum,
    /// Defining sum in `Z_p[zeta_f]`.
    DefiningSumCyclotomic,
    BernoulliInterpolation,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::DefiningSum => "defining-sum",
            Provenance::DefiningSumCyclotomic => "defining-sum-cyclotomic",
            Provenance::BernoulliInterpolation => "bernoulli-interpolation",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpValue {
    pub chi: DirichletChar,
    pub p: u64,
    pub value: PadicInt,
    pub provenance: Provenance,
}

/// How `L_p(1, chi)` is read off from Leopoldt's value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `L_p(1, chi) = Lp(chi)`.
    Leopoldt,
    /// `L_p(1, chi) = (1 - chi(p)/p) Lp(chi)`, the value the Kubota–Leopoldt
    /// function takes at `s = 1`.
    EulerCorrected,
}

fn check_character(chi: &DirichletChar, p: u64) -> Result<()> {
    if chi.is_trivial() {
        return Err(Error::InvalidCharacter("Leopoldt's value needs a nontrivial character".into()));
    }
    if !chi.is_even() {
        return Err(Error::InvalidCharacter(format!("{chi} is odd")));
    }
    if chi.conductor().is_multiple_of(p) {
        return Err(Error::PrimeDivides { p, what: format!("conductor of {chi}") });
    }
    Ok(())
}

/// `Lp(chi)` mod `p^N`, through whichever realisation of `zeta_f` applies.
pub fn leopoldt_lp(chi: &DirichletChar, p: u64, prec: u32) -> Result<LpValue> {
    check_character(chi, p)?;
    if (p - 1).is_multiple_of(chi.conductor()) {
        let root = primitive_root_of_unity(chi.conductor(), p, prec)?;
        leopoldt_lp_with_root(chi, &root)
    } else {
        leopoldt_lp_cyclotomic(chi, p, prec)
    }
}

/// Defining sum with an explicit primitive `f`-th root of unity in `Z_p`.
pub fn leopoldt_lp_with_root(chi: &DirichletChar, root: &EmbeddedRootOfUnity) -> Result<LpValue> {
    let p = root.xi.p();
    check_character(chi, p)?;
    let f = chi.conductor();
    let ring = root.xi.ring();
    let tau = gauss_sum_with(chi, root)?;
    let conj = chi.conj().padic_table(ring)?;
    let one = PadicInt::in_ring(ring, 1);
    let mut sum = PadicInt::in_ring(ring, 0);
    let mut xi_a = one;
    for &c in conj.iter().skip(1) {
        xi_a = xi_a * root.xi;
        if c == 0 {
            continue;
        }
        let u = one - xi_a;
        assert!(u.is_unit(), "1 - xi^a is a unit when p does not divide f");
        sum = sum + PadicInt::in_ring(ring, c) * iwasawa_log(&u)?;
    }
    let inv_f = PadicInt::in_ring(ring, ring.from_i128(f as i128)).inv()?;
    Ok(LpValue { chi: chi.clone(), p, value: -(tau * inv_f * sum), provenance: Provenance::DefiningSum })
}

/// Defining sum in `(Z/p^N)[x]/Phi_f`, valid for any `f` prime to `p`.
pub fn leopoldt_lp_cyclotomic(chi: &DirichletChar, p: u64, prec: u32) -> Result<LpValue> {
    check_character(chi, p)?;
    let f = chi.conductor();
    let target = ResidueRing::new(p, prec)?;
    let work = CyclotomicAlgebra::for_log(f, p, prec)?;
    let alg = CyclotomicAlgebra::new(f, target)?;
    let conj = chi.conj().padic_table(target)?;
    let values = chi.padic_table(target)?;
    // group the a's by chi_bar(a) so that one logarithm covers each group
    let mut groups: Vec<(u128, Vec<u128>)> = Vec::new();
    for a in 1..f {
        let c = conj[a as usize];
        if c == 0 {
            continue;
        }
        let i = match groups.iter().position(|(v, _)| *v == c) {
            Some(i) => i,
            None => {
                groups.push((c, work.one()));
                groups.len() - 1
            }
        };
        groups[i].1 = work.mul_one_minus_zeta(&groups[i].1, a);
    }
    let mut sum = vec![0u128; alg.degree()];
    for (c, prod) in &groups {
        let log = work.log_unit(prod, &target)?;
        sum = alg.add(&sum, &alg.scale(&log, *c));
    }
    let mut tau = vec![0u128; alg.degree()];
    for a in 1..f {
        if values[a as usize] != 0 {
            tau = alg.add(&tau, &alg.scale(&alg.zeta_pow(a), values[a as usize]));
        }
    }
    let product = alg.mul(&tau, &sum);
    let constant = CyclotomicAlgebra::rational_part(&product)?;
    let inv_f = target.inv(target.from_i128(f as i128))?;
    let value = PadicInt::in_ring(target, target.neg(target.mul(constant, inv_f)));
    Ok(LpValue { chi: chi.clone(), p, value, provenance: Provenance::DefiningSumCyclotomic })
}

/// `L_p(1 - s, chi) = -(1 - chi(p) p^(s-1)) B_{s,chi} / s` for `(p - 1) | s`.
pub fn kubota_leopoldt_special(chi: &DirichletChar, s: u64, p: u64, prec: u32, exact_bound: u64) -> Result<LpValue> {
    if s == 0 || !s.is_multiple_of(p - 1) {
        return Err(Error::BadSpecialPoint { s, pm1: p - 1 });
    }
    if chi.conductor().is_multiple_of(p) {
        return Err(Error::PrimeDivides { p, what: format!("conductor of {chi}") });
    }
    let ring = ResidueRing::new(p, prec)?;
    let l = l_value_padic(s, chi, p, prec, exact_bound)?;
    let chi_p = chi.padic_value(p as i64, ring)?;
    let euler = ring.sub(1, ring.mul(chi_p, ring.pow(p as u128, (s - 1) as u128)));
    Ok(LpValue {
        chi: chi.clone(),
        p,
        value: PadicInt::in_ring(ring, euler) * l,
        provenance: Provenance::BernoulliInterpolation,
    })
}

/// `L_p(1, chi)` mod `p^N` under the chosen normalisation.
pub fn lp_at_one(chi: &DirichletChar, p: u64, prec: u32, norm: Normalization) -> Result<PadicInt> {
    match norm {
        Normalization::Leopoldt => Ok(leopoldt_lp(chi, p, prec)?.value),
        Normalization::EulerCorrected => {
            // (1 - chi(p)/p) Lp = (p - chi(p)) (Lp / p), one extra digit absorbs the division
            let lp = leopoldt_lp(chi, p, prec + 1)?.value;
            let ring = ResidueRing::new(p, prec)?;
            let chi_p = chi.padic_value(p as i64, ring)?;
            let factor = ring.sub(p as u128 % ring.modulus(), chi_p);
            Ok(lp.div_p_pow(1)? * PadicInt::in_ring(ring, factor))
        }
    }
}

/// `prod_{chi != 1} L_p(1, chi)`.
pub fn relative_zeta_p_at_1(chars: &[DirichletChar], p: u64, prec: u32, norm: Normalization) -> Result<PadicInt> {
    chars.iter().try_fold(PadicInt::one(p, prec)?, |acc, chi| Ok(acc * lp_at_one(chi, p, prec, norm)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::{gen_bernoulli_exact, DEFAULT_EXACT_BOUND};
    use crate::characters::kronecker_char;

    const SPLIT_TEICHMULLER: [(i64, u64); 5] = [(5, 11), (5, 31), (12, 13), (8, 17), (40, 41)];

    #[test]
    fn precision_coherence_and_valuation() {
        for (d, p) in SPLIT_TEICHMULLER.into_iter().chain([(5, 19), (13, 17), (8, 7)]) {
            let chi = kronecker_char(d).unwrap();
            let v1 = leopoldt_lp(&chi, p, 1).unwrap().value;
            let v3 = leopoldt_lp(&chi, p, 3).unwrap().value;
            assert_eq!(v3.reduce(1).unwrap(), v1);
            assert!(v3.valuation().is_at_least(1), "d={d} p={p}");
        }
    }

    #[test]
    fn routes_agree_where_both_apply() {
        for (d, p) in SPLIT_TEICHMULLER {
            let chi = kronecker_char(d).unwrap();
            let a = leopoldt_lp(&chi, p, 4).unwrap();
            let b = leopoldt_lp_cyclotomic(&chi, p, 4).unwrap();
            assert_eq!(a.provenance, Provenance::DefiningSum);
            assert_eq!(a.value, b.value, "d={d} p={p}");
        }
        let cubic = DirichletChar::tabulated(7, 3, &[(3, 1)]).unwrap();
        let a = leopoldt_lp(&cubic, 43, 3).unwrap();
        let b = leopoldt_lp_cyclotomic(&cubic, 43, 3).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn conjugate_root_gives_the_same_value() {
        for (d, p) in SPLIT_TEICHMULLER {
            let chi = kronecker_char(d).unwrap();
            let root = primitive_root_of_unity(d as u64, p, 3).unwrap();
            let base = leopoldt_lp_with_root(&chi, &root).unwrap().value;
            for k in (2..d as u64).filter(|&k| crate::arith::gcd(k, d as u64) == 1) {
                let other = leopoldt_lp_with_root(&chi, &root.conjugate(k).unwrap()).unwrap().value;
                assert_eq!(other, base, "d={d} p={p} k={k}");
            }
        }
    }

    #[test]
    fn rejects_bad_characters() {
        assert!(leopoldt_lp(&DirichletChar::trivial(), 11, 2).is_err());
        assert!(leopoldt_lp(&kronecker_char(5).unwrap(), 5, 2).is_err());
        let odd = DirichletChar::tabulated(5, 4, &[(2, 1)]).unwrap();
        assert!(leopoldt_lp(&odd, 11, 2).is_err());
    }

    #[test]
    fn leading_term_is_the_bernoulli_value() {
        // Lp(chi) = chi_bar(p) B_{p-1,chi} p/(p-1) mod p^2, also for inert p
        for (d, p) in [(5i64, 11u64), (5, 19), (5, 7), (12, 13), (8, 17), (13, 7), (316, 13)] {
            let chi = kronecker_char(d).unwrap();
            let lp = leopoldt_lp(&chi, p, 2).unwrap().value;
            let b = PadicInt::from_rational(p, 2, &gen_bernoulli_exact(p - 1, &chi).unwrap()).unwrap();
            let rhs = b
                * PadicInt::from_i128(p, 2, p as i128 * chi.sign(p as i64).unwrap() as i128).unwrap()
                * PadicInt::from_i128(p, 2, p as i128 - 1).unwrap().inv().unwrap();
            assert_eq!(lp, rhs, "d={d} p={p}");
        }
    }

    #[test]
    fn special_values() {
        let chi = kronecker_char(5).unwrap();
        let (p, m) = (11u64, 3u32);
        let v = kubota_leopoldt_special(&chi, p - 1, p, m, DEFAULT_EXACT_BOUND).unwrap();
        let b = gen_bernoulli_exact(p - 1, &chi).unwrap();
        let euler = num_rational::BigRational::from_integer(1.into())
            - num_rational::BigRational::from_integer(num_bigint::BigInt::from(p).pow(p as u32 - 2));
        let expected = -(euler * b) / num_rational::BigRational::from_integer((p - 1).into());
        assert_eq!(v.value, PadicInt::from_rational(p, m, &expected).unwrap());
        assert_eq!(kubota_leopoldt_special(&chi, 7, p, m, 400), Err(Error::BadSpecialPoint { s: 7, pm1: 10 }));
        for s in (10..=40).step_by(10) {
            let exact = kubota_leopoldt_special(&chi, s, p, 4, DEFAULT_EXACT_BOUND).unwrap();
            let sums = kubota_leopoldt_special(&chi, s, p, 4, 0).unwrap();
            assert_eq!(exact.value, sums.value, "s={s}");
        }
    }

    #[test]
    fn euler_corrected_value_interpolates() {
        for (d, p, n) in [(5i64, 11u64, 1u32), (5, 11, 2), (5, 19, 1), (12, 13, 1), (5, 7, 1), (8, 5, 2)] {
            let chi = kronecker_char(d).unwrap();
            let s = p.pow(n) * (p - 1);
            let at_one = lp_at_one(&chi, p, n + 2, Normalization::EulerCorrected).unwrap();
            let special = kubota_leopoldt_special(&chi, s, p, n + 2, DEFAULT_EXACT_BOUND).unwrap().value;
            assert!((at_one - special).valuation().is_at_least(n + 1), "d={d} p={p} n={n}");
        }
    }

    #[test]
    fn relative_zeta() {
        let chi = kronecker_char(5).unwrap();
        let single = relative_zeta_p_at_1(std::slice::from_ref(&chi), 11, 3, Normalization::Leopoldt).unwrap();
        assert_eq!(single, leopoldt_lp(&chi, 11, 3).unwrap().value);
        assert_eq!(relative_zeta_p_at_1(&[], 11, 3, Normalization::Leopoldt).unwrap().residue(), 1);
    }
}
