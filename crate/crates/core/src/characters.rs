//! Primitive Dirichlet characters and their p-adic realisation.
//!
//! Quadratic characters are evaluated exactly through the Kronecker symbol.
//! Characters of higher order are stored as a table of exponents into a
//! cyclic group `mu_m`, and become p-adic numbers only once a root of unity
//! `xi` of order `m` is fixed in `Z_p` (possible when `m | p - 1`).

use std::fmt;

use crate::arith;
use crate::error::{Error, Result};
use crate::padic::{teichmuller, PadicInt, ResidueRing};

const NOT_COPRIME: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Trivial,
    Quadratic(i64),
    Tabulated(Vec<u32>),
}

/// A primitive Dirichlet character.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletChar {
    conductor: u64,
    order: u64,
    kind: Kind,
}

/// A value of a character: zero, or `zeta_m^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharValue {
    Zero,
    Root(u64),
}

/// Fundamental discriminants of real quadratic fields.
pub fn is_real_fundamental_discriminant(d: i64) -> bool {
    if d <= 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => arith::is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && arith::is_squarefree(m)
        }
        _ => false,
    }
}

/// The even quadratic character `(d / .)` of a real quadratic field.
pub fn kronecker_char(d: i64) -> Result<DirichletChar> {
    if !is_real_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(DirichletChar { conductor: d as u64, order: 2, kind: Kind::Quadratic(d) })
}

impl DirichletChar {
    pub fn trivial() -> Self {
        DirichletChar { conductor: 1, order: 1, kind: Kind::Trivial }
    }

    /// Character of conductor `f` and order `m` determined by the images
    /// `a -> zeta_m^e` of a generating set of `(Z/f)^*`.
    pub fn tabulated(conductor: u64, order: u64, images: &[(u64, u64)]) -> Result<Self> {
        if conductor == 0 || order == 0 {
            return Err(Error::InvalidCharacter("conductor and order must be positive".into()));
        }
        if conductor == 1 {
            return if order == 1 {
                Ok(Self::trivial())
            } else {
                Err(Error::InvalidCharacter("conductor 1 forces the trivial character".into()))
            };
        }
        let f = conductor;
        let mut table = vec![NOT_COPRIME; f as usize];
        table[1] = 0;
        let mut frontier = vec![1u64];
        while let Some(x) = frontier.pop() {
            for &(g, e) in images {
                if arith::gcd(g % f, f) != 1 {
                    return Err(Error::InvalidCharacter(format!("generator {g} is not a unit mod {f}")));
                }
                let y = (x * (g % f)) % f;
                let ey = ((table[x as usize] as u64 + e) % order) as u32;
                if table[y as usize] == NOT_COPRIME {
                    table[y as usize] = ey;
                    frontier.push(y);
                } else if table[y as usize] != ey {
                    return Err(Error::InvalidCharacter(format!("images are inconsistent at {y} mod {f}")));
                }
            }
        }
        if (1..f).any(|a| arith::gcd(a, f) == 1 && table[a as usize] == NOT_COPRIME) {
            return Err(Error::InvalidCharacter(format!("images do not generate (Z/{f})^*")));
        }
        let g = table.iter().filter(|&&e| e != NOT_COPRIME).fold(order, |acc, &e| arith::gcd(acc, e as u64));
        if g != 1 {
            return Err(Error::InvalidCharacter(format!("values do not have exact order {order}")));
        }
        for q in arith::prime_factors(f) {
            let sub = f / q;
            let induced =
                (1..f).filter(|&a| arith::gcd(a, f) == 1 && a % sub == 1 % sub).all(|a| table[a as usize] == 0);
            if induced {
                return Err(Error::InvalidCharacter(format!("not primitive: induced from modulus {sub}")));
            }
        }
        Ok(DirichletChar { conductor, order, kind: Kind::Tabulated(table) })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == Kind::Trivial
    }

    /// Whether all values lie in `{0, 1, -1}`.
    pub fn is_exact(&self) -> bool {
        self.order <= 2
    }

    pub fn is_even(&self) -> bool {
        self.value(-1) == CharValue::Root(0)
    }

    pub fn discriminant(&self) -> Option<i64> {
        match self.kind {
            Kind::Quadratic(d) => Some(d),
            _ => None,
        }
    }

    pub fn value(&self, a: i64) -> CharValue {
        let f = self.conductor as i64;
        let r = a.rem_euclid(f) as u64;
        match &self.kind {
            Kind::Trivial => CharValue::Root(0),
            Kind::Quadratic(d) => match arith::kronecker(*d, r) {
                1 => CharValue::Root(0),
                -1 => CharValue::Root(1),
                _ => CharValue::Zero,
            },
            Kind::Tabulated(t) => match t[r as usize] {
                NOT_COPRIME => CharValue::Zero,
                e => CharValue::Root(e as u64),
            },
        }
    }

    /// Exact value for characters of order at most 2.
    pub fn sign(&self, a: i64) -> Result<i32> {
        if !self.is_exact() {
            return Err(Error::NotExactlyValued);
        }
        Ok(match self.value(a) {
            CharValue::Zero => 0,
            CharValue::Root(0) => 1,
            CharValue::Root(_) => -1,
        })
    }

    /// The complex-conjugate character.
    pub fn conj(&self) -> Self {
        match &self.kind {
            Kind::Tabulated(t) => {
                let m = self.order as u32;
                let table = t.iter().map(|&e| if e == NOT_COPRIME { e } else { (m - e) % m }).collect();
                DirichletChar { kind: Kind::Tabulated(table), ..self.clone() }
            }
            _ => self.clone(),
        }
    }

    /// Value embedded in `Z/p^N` through the canonical root of unity.
    pub fn padic_value(&self, a: i64, ring: ResidueRing) -> Result<u128> {
        let xi = self.embedding(ring)?;
        Ok(self.value_with(a, ring, xi.as_ref()))
    }

    /// The table `a -> chi(a)` for `0 <= a < f`, embedded in `Z/p^N`.
    pub fn padic_table(&self, ring: ResidueRing) -> Result<Vec<u128>> {
        let xi = self.embedding(ring)?;
        Ok((0..self.conductor as i64).map(|a| self.value_with(a, ring, xi.as_ref())).collect())
    }

    fn embedding(&self, ring: ResidueRing) -> Result<Option<PadicInt>> {
        if self.is_exact() {
            return Ok(None);
        }
        Ok(Some(primitive_root_of_unity(self.order, ring.p(), ring.precision())?.xi))
    }

    fn value_with(&self, a: i64, ring: ResidueRing, xi: Option<&PadicInt>) -> u128 {
        match (self.value(a), xi) {
            (CharValue::Zero, _) => 0,
            (CharValue::Root(0), _) => 1 % ring.modulus(),
            (CharValue::Root(_), None) => ring.neg(1),
            (CharValue::Root(k), Some(x)) => ring.pow(x.residue(), k as u128),
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Trivial => write!(f, "chi_1"),
            Kind::Quadratic(d) => write!(f, "chi_{d}"),
            Kind::Tabulated(_) => write!(f, "chi[f={},m={}]", self.conductor, self.order),
        }
    }
}

/// A primitive `m`-th root of unity in `Z_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmbeddedRootOfUnity {
    pub order: u64,
    pub xi: PadicInt,
}

impl EmbeddedRootOfUnity {
    /// The root `xi^k` for `k` prime to the order, another admissible choice.
    pub fn conjugate(&self, k: u64) -> Result<Self> {
        if arith::gcd(k % self.order.max(1), self.order) != 1 {
            return Err(Error::InvalidCharacter(format!("{k} is not prime to {}", self.order)));
        }
        Ok(EmbeddedRootOfUnity { order: self.order, xi: self.xi.pow(k as u128) })
    }
}

/// Teichmüller lift of `g^((p-1)/m)`, `g` the least primitive root mod p.
pub fn primitive_root_of_unity(m: u64, p: u64, prec: u32) -> Result<EmbeddedRootOfUnity> {
    if m == 0 || !(p - 1).is_multiple_of(m) {
        return Err(Error::NoRootOfUnity { m, p });
    }
    let g = arith::least_primitive_root(p);
    let base = PadicInt::new(p, prec, arith::pow_mod(g, (p - 1) / m, p) as u128)?;
    Ok(EmbeddedRootOfUnity { order: m, xi: teichmuller(&base)? })
}

/// `tau(chi) = sum_a chi(a) xi^a` with the canonical `xi` of order `f`.
pub fn gauss_sum(chi: &DirichletChar, p: u64, prec: u32) -> Result<PadicInt> {
    let root = primitive_root_of_unity(chi.conductor(), p, prec)?;
    gauss_sum_with(chi, &root)
}

/// Gauss sum for an explicitly chosen root of order `f`.
pub fn gauss_sum_with(chi: &DirichletChar, root: &EmbeddedRootOfUnity) -> Result<PadicInt> {
    let f = chi.conductor();
    if root.order != f {
        return Err(Error::InvalidCharacter(format!("root of order {} for conductor {f}", root.order)));
    }
    let ring = root.xi.ring();
    let table = chi.padic_table(ring)?;
    let mut acc = 0u128;
    let mut power = 1 % ring.modulus();
    for &c in table.iter().skip(1) {
        power = ring.mul(power, root.xi.residue());
        acc = ring.add(acc, ring.mul(c, power));
    }
    if f == 1 {
        acc = 1 % ring.modulus();
    }
    Ok(PadicInt::in_ring(ring, acc))
}
