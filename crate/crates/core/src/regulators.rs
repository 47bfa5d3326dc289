//! p-adic regulators built from a matrix of embedded units, and the
//! left-hand sides of the class number congruences.

use crate::error::{Error, Result};
use crate::padic::{fermat_quotient, higher_fermat_quotient, iwasawa_log, PadicInt, ResidueRing};
use crate::quadfield::ExternalFieldData;

/// Determinant over `Z/p^k` without divisions: dynamic programming over the
/// set of columns already used by the leading rows.
pub fn determinant(matrix: &[Vec<u128>], ring: &ResidueRing) -> u128 {
    let n = matrix.len();
    if n == 0 {
        return 1 % ring.modulus();
    }
    let mut dp = vec![0u128; 1 << n];
    dp[0] = 1 % ring.modulus();
    for mask in 0..(1usize << n) {
        let acc = dp[mask];
        if acc == 0 {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for c in 0..n {
            if mask & (1 << c) != 0 {
                continue;
            }
            let term = ring.mul(acc, matrix[row][c] % ring.modulus());
            // placing column c after the used ones adds one inversion per larger used column
            let larger = (mask >> (c + 1)).count_ones();
            let next = mask | (1 << c);
            dp[next] = if larger % 2 == 0 { ring.add(dp[next], term) } else { ring.sub(dp[next], term) };
        }
    }
    dp[(1 << n) - 1]
}

fn check_square(units: &[Vec<PadicInt>]) -> Result<()> {
    let n = units.len();
    if units.iter().any(|row| row.len() != n) {
        return Err(Error::FieldDocument(format!("unit matrix is not {n} x {n}")));
    }
    Ok(())
}

fn det_of(units: &[Vec<PadicInt>], ring: ResidueRing, entry: impl Fn(&PadicInt) -> Result<u128>) -> Result<u128> {
    check_square(units)?;
    let m = units.iter().map(|row| row.iter().map(&entry).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    Ok(determinant(&m, &ring))
}

fn prime_of(units: &[Vec<PadicInt>]) -> Result<u64> {
    units
        .first()
        .and_then(|row| row.first())
        .map(|z| z.p())
        .ok_or_else(|| Error::FieldDocument("empty unit matrix".into()))
}

/// `det(Q_p(sigma_j(eps_k)))` mod p.
pub fn regulator_mod_p(units: &[Vec<PadicInt>]) -> Result<u64> {
    let p = prime_of(units)?;
    let ring = ResidueRing::new(p, 1)?;
    Ok(det_of(units, ring, |z| Ok(fermat_quotient(z)? as u128))? as u64)
}

/// `det(Q_{p,n}(sigma_j(eps_k)))` mod `p^(n+1)`.
pub fn regulator_mod_pn(units: &[Vec<PadicInt>], n: u32) -> Result<PadicInt> {
    let p = prime_of(units)?;
    let ring = ResidueRing::new(p, n + 1)?;
    Ok(PadicInt::in_ring(ring, det_of(units, ring, |z| Ok(higher_fermat_quotient(z, n)?.residue()))?))
}

/// `det(log_p(sigma_j(eps_k)))` mod `p^N`.
pub fn padic_regulator(units: &[Vec<PadicInt>], prec: u32) -> Result<PadicInt> {
    let p = prime_of(units)?;
    let ring = ResidueRing::new(p, prec)?;
    Ok(PadicInt::in_ring(ring, det_of(units, ring, |z| Ok(iwasawa_log(&z.reduce(prec)?)?.residue()))?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegulatorBundle {
    pub g: u32,
    pub rp: PadicInt,
    pub rpn: PadicInt,
    pub rp_mod_p: u64,
    pub n: u32,
    /// Orientation used: rows and columns as supplied, embedding via the
    /// canonical square root when the data came from the internal pipeline.
    pub orientation: &'static str,
}

pub fn regulator_bundle(data: &ExternalFieldData, n: u32, prec: u32) -> Result<RegulatorBundle> {
    Ok(RegulatorBundle {
        g: data.g,
        rp: padic_regulator(&data.units, prec)?,
        rpn: regulator_mod_pn(&data.units, n)?,
        rp_mod_p: regulator_mod_p(&data.units)?,
        n,
        orientation: "as-supplied",
    })
}

fn cnf_factor(data: &ExternalFieldData, prec: u32) -> Result<PadicInt> {
    let p = data.p;
    if data.h.is_multiple_of(p) {
        return Err(Error::PrimeDivides { p, what: format!("h = {}", data.h) });
    }
    let ring = ResidueRing::new(p, prec)?;
    let two_g = ring.pow(2, (data.g - 1) as u128);
    let h = ring.from_i128(data.h as i128);
    let sqrt_d = data.sqrt_d.reduce(prec)?;
    PadicInt::in_ring(ring, ring.mul(two_g, h)).checked_div(&sqrt_d)
}

/// `2^(g-1) h R^(p,n) / sqrt d` mod `p^(n+1)`, and the mod-p variant
/// `2^(g-1) h R^(p) / sqrt d`.
pub fn cnf_lhs(data: &ExternalFieldData, n: u32) -> Result<(PadicInt, PadicInt)> {
    let rpn = regulator_mod_pn(&data.units, n)?;
    let level = cnf_factor(data, n + 1)? * rpn;
    let rp1 = PadicInt::new(data.p, 1, regulator_mod_p(&data.units)? as u128)?;
    let mod_p = cnf_factor(data, 1)? * rp1;
    Ok((level, mod_p))
}

/// `2^(g-1) h R_p / sqrt d` mod `p^N`.
pub fn cnf_lhs_exact(data: &ExternalFieldData, prec: u32) -> Result<PadicInt> {
    Ok(cnf_factor(data, prec)? * padic_regulator(&data.units, prec)?)
}
