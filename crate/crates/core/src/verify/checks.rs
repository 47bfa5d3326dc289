//! Evaluation of a single grid point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    classify, CheckKind, ClaimId, CongruenceReport, Context, EulerVariant, FieldSource, PPower, PairClass, Sign,
    Status, Task, Variant, VariantOutcome,
};
use crate::bernoulli::gen_bernoulli_exact;
use crate::characters::{kronecker_char, DirichletChar};
use crate::error::{Error, Result};
use crate::lfunctions::{lp_at_one, Normalization};
use crate::padic::{higher_fermat_quotient, iwasawa_log, PadicInt, ResidueRing, Valuation};
use crate::quadfield::ExternalFieldData;
use crate::regulators::{padic_regulator, regulator_mod_p, regulator_mod_pn};

/// Reading of the Euler-factor denominator in the unit corollary.
pub const C27_READING: &str = "denominator read as zeta(1 - p^n (p - 1))";

/// Guard digits carried beyond the required valuation.
const GUARD: u32 = 3;

fn working(required: u32, prec: u32) -> u32 {
    (required + GUARD).max(prec)
}

/// Precision every computation of a grid point is carried at.
pub fn working_precision(claim: ClaimId, n: Option<u32>, g: u32, prec: u32) -> u32 {
    let basis = match claim {
        ClaimId::T26 => n.unwrap_or(0) + g,
        ClaimId::C27 | ClaimId::T29 => g + 1,
        _ => required_of(claim, n, g, prec),
    };
    working(basis, prec)
}

fn blank(task: &Task, ctx: &Context, status: Status, kind: CheckKind, required: u32) -> CongruenceReport {
    let field = task.field.map(|i| &ctx.fields[i]);
    CongruenceReport {
        claim: task.claim,
        field: field.map(FieldSource::label),
        d: field.map(FieldSource::d),
        p: task.p,
        n: task.n,
        status,
        kind,
        required,
        working_precision: None,
        lhs: None,
        outcomes: Vec::new(),
        passing: Vec::new(),
        note: None,
        timing_us: None,
    }
}

fn kind_of(claim: ClaimId) -> CheckKind {
    match claim {
        ClaimId::C27 | ClaimId::T29 => CheckKind::Unit,
        _ => CheckKind::Congruence,
    }
}

fn required_of(claim: ClaimId, n: Option<u32>, g: u32, prec: u32) -> u32 {
    let n = n.unwrap_or(0);
    match claim {
        ClaimId::P11 | ClaimId::P13 => 2,
        ClaimId::L22 => n + 2,
        ClaimId::P23 => n + g,
        ClaimId::T15 => 1,
        ClaimId::Cnf => prec,
        ClaimId::P24 | ClaimId::T26 => n + 1,
        ClaimId::C27 | ClaimId::T29 => 0,
    }
}

/// The non-trivial characters of the field, when they are known.
fn characters(field: &FieldSource) -> Option<Vec<DirichletChar>> {
    match field {
        FieldSource::Quadratic(f) => kronecker_char(f.d).ok().map(|c| vec![c]),
        FieldSource::External(e) if e.g == 2 => kronecker_char(e.d).ok().map(|c| vec![c]),
        FieldSource::External(_) => None,
    }
}

fn field_data(field: &FieldSource, p: u64, prec: u32) -> Result<ExternalFieldData> {
    match field {
        FieldSource::Quadratic(f) => ExternalFieldData::from_quadratic(f, p, prec),
        FieldSource::External(e) if e.prec >= prec => Ok(e.clone()),
        FieldSource::External(e) => Err(Error::InsufficientPrecision { needed: prec, available: e.prec }),
    }
}

/// Classification of a field point before any arithmetic is done.
fn precheck(task: &Task, field: &FieldSource) -> Option<(Status, String)> {
    let p = task.p;
    let d = field.d();
    let needs_split = !matches!(task.claim, ClaimId::P11 | ClaimId::P24);
    let needs_chars = !matches!(task.claim, ClaimId::P23);
    let quadratic = field.degree() == 2;
    if quadratic {
        match classify(d, p) {
            PairClass::Ramified => return Some((Status::SkippedRamified, format!("{p} divides d = {d}"))),
            PairClass::Inert if needs_split => {
                return Some((Status::SkippedInert, format!("{p} is inert in Q(sqrt {d})")))
            }
            _ => {}
        }
    }
    if needs_chars && characters(field).is_none() {
        return Some((Status::SkippedEmbedding, "characters of the field are not available".into()));
    }
    if !quadratic && !needs_split {
        return Some((Status::SkippedEmbedding, "character-only check needs a quadratic field".into()));
    }
    let uses_h = matches!(task.claim, ClaimId::T15 | ClaimId::T26 | ClaimId::Cnf | ClaimId::C27 | ClaimId::T29);
    if uses_h && field.h().is_multiple_of(p) {
        return Some((Status::SkippedPDividesH, format!("{p} divides h = {}", field.h())));
    }
    None
}

pub fn evaluate(ctx: &Context, task: &Task) -> CongruenceReport {
    let g = task.field.map(|i| ctx.fields[i].degree()).unwrap_or(2);
    let required = required_of(task.claim, task.n, g, ctx.spec.prec);
    let kind = kind_of(task.claim);
    assert!(required < working_precision(task.claim, task.n, g, ctx.spec.prec), "vacuous working precision");
    if let Some(field) = task.field.map(|i| &ctx.fields[i]) {
        if let Some((status, note)) = precheck(task, field) {
            let mut r = blank(task, ctx, status, kind, required);
            r.note = Some(note);
            return r;
        }
    }
    let mut r = blank(task, ctx, Status::Error, kind, required);
    match run(ctx, task, required, &mut r) {
        Ok(()) => {
            r.passing = r.outcomes.iter().filter(|o| o.pass).map(|o| o.variant).collect();
            if r.status == Status::Error {
                r.status = if r.passing.is_empty() { Status::Fail } else { Status::Pass };
            }
        }
        Err(e) => {
            r.status = Status::Error;
            r.note = Some(e.to_string());
        }
    }
    r
}

fn outcome(variant: Variant, lhs: &PadicInt, rhs: &PadicInt, required: u32) -> VariantOutcome {
    let valuation = (*lhs - *rhs).valuation();
    VariantOutcome { variant, value: rhs.into(), valuation, required, pass: valuation.is_at_least(required) }
}

fn unit_outcome(variant: Variant, value: &PadicInt) -> VariantOutcome {
    let valuation = value.valuation();
    VariantOutcome { variant, value: value.into(), valuation, required: 0, pass: valuation == Valuation::Exact(0) }
}

fn signed(s: Sign, v: PadicInt) -> PadicInt {
    match s {
        Sign::Plus => v,
        Sign::Minus => -v,
    }
}

/// `prod_chi E(chi)` for an Euler-factor reading.
fn euler_factor(chars: &[DirichletChar], e: EulerVariant, p: u64, ring: ResidueRing) -> Result<PadicInt> {
    let mut acc = PadicInt::in_ring(ring, 1 % ring.modulus());
    for chi in chars {
        let c = PadicInt::in_ring(ring, chi.conj().padic_value(p as i64, ring)?);
        let f = match e {
            EulerVariant::Plain => continue,
            EulerVariant::ChiP => c,
            EulerVariant::Interp => {
                let one = PadicInt::in_ring(ring, 1);
                c.checked_div(&(one - c.scale(p as i128)))?
            }
        };
        acc = acc * f;
    }
    Ok(acc)
}

/// `2^(g-1) h / sqrt d` at precision `prec`.
fn class_factor(data: &ExternalFieldData, prec: u32) -> Result<PadicInt> {
    let ring = ResidueRing::new(data.p, prec)?;
    let c = ring.mul(ring.pow(2, (data.g - 1) as u128), ring.from_i128(data.h as i128));
    PadicInt::in_ring(ring, c).checked_div(&data.sqrt_d.reduce(prec)?)
}

fn neg_p_pow(p: u64, k: u32, ring: ResidueRing) -> PadicInt {
    let v = ring.pow(ring.from_i128(-(p as i128)), k as u128);
    PadicInt::in_ring(ring, v)
}

fn lift(z: &PadicInt, prec: u32) -> Result<PadicInt> {
    z.with_precision(prec)
}

fn run(ctx: &Context, task: &Task, required: u32, r: &mut CongruenceReport) -> Result<()> {
    let spec = ctx.spec;
    let flags = &spec.flags;
    let p = task.p;
    let n = task.n.unwrap_or(0);
    let field = task.field.map(|i| &ctx.fields[i]);
    let chars = field.and_then(characters).unwrap_or_default();
    let g = field.map(FieldSource::degree).unwrap_or(2);
    let s_level = p.pow(n) * (p - 1);

    match task.claim {
        ClaimId::P13 => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let ring = ResidueRing::new(p, w)?;
            let rng = ChaCha8Rng::seed_from_u64(spec.seed ^ p);
            worst_unit(r, ring, rng, spec.units_per_prime, required, |z| {
                let q = crate::padic::fermat_quotient(z)?;
                Ok((iwasawa_log(z)?, PadicInt::in_ring(ring, ring.from_i128(-(p as i128) * q as i128))))
            })?;
        }
        ClaimId::L22 => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let ring = ResidueRing::new(p, w)?;
            let rng = ChaCha8Rng::seed_from_u64(spec.seed ^ p ^ ((n as u64) << 32));
            worst_unit(r, ring, rng, spec.units_per_prime, required, |z| {
                let q = lift(&higher_fermat_quotient(z, n)?, w)?;
                Ok((q.scale(-(p as i128)), iwasawa_log(z)?))
            })?;
        }
        ClaimId::P23 => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let data = field_data(field.expect("field check"), p, w)?;
            let lhs = padic_regulator(&data.units, w)?;
            let rpn = lift(&regulator_mod_pn(&data.units, n)?, w)?;
            let rhs = neg_p_pow(p, g - 1, lhs.ring()) * rpn;
            r.working_precision = Some(w);
            r.lhs = Some((&lhs).into());
            for &s in &flags.signs {
                let v = Variant { sign: Some(s), ..Default::default() };
                r.outcomes.push(outcome(v, &lhs, &signed(s, rhs), required));
            }
        }
        ClaimId::T15 => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let data = field_data(field.expect("field check"), p, w)?;
            let rp = PadicInt::from_i128(p, w, regulator_mod_p(&data.units)? as i128)?;
            let lhs = class_factor(&data, w)? * rp;
            let mut prod = PadicInt::one(p, w)?;
            for chi in &chars {
                prod = prod * ctx.l_value(chi, p - 1, p, w)?;
            }
            r.working_precision = Some(w);
            r.lhs = Some((&lhs).into());
            for &e in &flags.eulers {
                let base = euler_factor(&chars, e, p, lhs.ring())? * prod;
                for &s in &flags.signs {
                    let v = Variant { sign: Some(s), euler: Some(e), ..Default::default() };
                    r.outcomes.push(outcome(v, &lhs, &signed(s, base), required));
                }
            }
        }
        ClaimId::T26 => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let data = field_data(field.expect("field check"), p, w)?;
            let rpn = lift(&regulator_mod_pn(&data.units, n)?, w)?;
            let lhs = class_factor(&data, w)? * rpn;
            let mut prod = PadicInt::one(p, w)?;
            for chi in &chars {
                prod = prod * ctx.l_value(chi, s_level, p, w)?;
            }
            r.working_precision = Some(w);
            r.lhs = Some((&lhs).into());
            for &e in &flags.eulers {
                let base = euler_factor(&chars, e, p, lhs.ring())? * prod;
                for &s in &flags.signs {
                    for &pp in &flags.p_powers {
                        let v = Variant { sign: Some(s), euler: Some(e), p_power: Some(pp) };
                        let rhs = signed(s, base);
                        r.outcomes.push(match pp {
                            PPower::With => outcome(v, &lhs, &rhs, required),
                            PPower::Without => {
                                let scaled = neg_p_pow(p, g - 1, lhs.ring()) * lhs;
                                outcome(v, &scaled, &rhs, n + g)
                            }
                        });
                    }
                }
            }
            r.note = Some(format!("s = {s_level}"));
        }
        ClaimId::Cnf => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let data = field_data(field.expect("field check"), p, w)?;
            let lhs = class_factor(&data, w)? * padic_regulator(&data.units, w)?;
            let mut prod = PadicInt::one(p, w)?;
            for chi in &chars {
                prod = prod * ctx.leopoldt(chi, p, w)?;
            }
            r.working_precision = Some(w);
            r.lhs = Some((&lhs).into());
            for &s in &flags.signs {
                let v = Variant { sign: Some(s), ..Default::default() };
                r.outcomes.push(outcome(v, &lhs, &signed(s, prod), required));
            }
        }
        ClaimId::P11 => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let chi = &chars[0];
            let lhs = ctx.leopoldt(chi, p, w)?;
            let ring = lhs.ring();
            let b = gen_bernoulli_exact(p - 1, chi)?;
            let b = PadicInt::in_ring(ring, ring.from_rational(&b)?);
            let base = b.scale(p as i128).checked_div(&PadicInt::from_i128(p, w, p as i128 - 1)?)?;
            r.working_precision = Some(w);
            r.lhs = Some((&lhs).into());
            for &e in &flags.eulers {
                let rhs = euler_factor(std::slice::from_ref(chi), e, p, ring)? * base;
                for &s in &flags.signs {
                    let v = Variant { sign: Some(s), euler: Some(e), ..Default::default() };
                    r.outcomes.push(outcome(v, &lhs, &signed(s, rhs), required));
                }
            }
        }
        ClaimId::P24 => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let chi = &chars[0];
            let lp = ctx.leopoldt(chi, p, w)?;
            let ring = lp.ring();
            // L_p(1 - s) = (1 - chi(p) p^(s-1)) L(1 - s), and p^(s-1) vanishes at this precision
            let rhs = ctx.l_value(chi, s_level, p, w)?;
            r.working_precision = Some(w);
            for &e in &flags.eulers {
                let lhs = match e {
                    EulerVariant::Plain => lp,
                    EulerVariant::ChiP => euler_factor(std::slice::from_ref(chi), e, p, ring)? * lp,
                    EulerVariant::Interp => lp_at_one(chi, p, w, Normalization::EulerCorrected)?,
                };
                if e == EulerVariant::Plain || r.lhs.is_none() {
                    r.lhs = Some((&lhs).into());
                }
                for &s in &flags.signs {
                    let v = Variant { sign: Some(s), euler: Some(e), ..Default::default() };
                    let mut o = outcome(v, &lhs, &signed(s, rhs), required);
                    // the compared value differs per reading, so record the left side
                    o.value = (&lhs).into();
                    r.outcomes.push(o);
                }
            }
            r.note = Some(format!("s = {s_level}; outcome values are each reading's left side"));
        }
        ClaimId::C27 => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let data = field_data(field.expect("field check"), p, w)?;
            r.working_precision = Some(w);
            if !hypotheses_hold(&data, g, w, r)? {
                return Ok(());
            }
            let mut prod = PadicInt::one(p, w)?;
            for chi in &chars {
                prod = prod * ctx.l_value(chi, s_level, p, w)?;
            }
            r.outcomes.push(unit_outcome(Variant::default(), &prod));
            r.note = Some(format!("s = {s_level}; {C27_READING}"));
        }
        ClaimId::T29 => {
            let w = working_precision(task.claim, task.n, g, spec.prec);
            let data = field_data(field.expect("field check"), p, w)?;
            r.working_precision = Some(w);
            if !hypotheses_hold(&data, g, w, r)? {
                return Ok(());
            }
            for &e in &flags.eulers {
                let mut prod = PadicInt::one(p, w)?;
                for chi in &chars {
                    let v = match e {
                        EulerVariant::Plain => ctx.leopoldt(chi, p, w)?,
                        EulerVariant::ChiP => {
                            euler_factor(std::slice::from_ref(chi), e, p, prod.ring())? * ctx.leopoldt(chi, p, w)?
                        }
                        EulerVariant::Interp => lp_at_one(chi, p, w, Normalization::EulerCorrected)?,
                    };
                    prod = prod * v;
                }
                r.outcomes.push(unit_outcome(Variant { euler: Some(e), ..Default::default() }, &prod));
            }
        }
    }
    Ok(())
}

/// Compare both sides on seeded random units and keep the worst one.
fn worst_unit(
    r: &mut CongruenceReport,
    ring: ResidueRing,
    mut rng: ChaCha8Rng,
    count: usize,
    required: u32,
    sides: impl Fn(&PadicInt) -> Result<(PadicInt, PadicInt)>,
) -> Result<()> {
    let p = ring.p() as u128;
    let mut worst: Option<(PadicInt, PadicInt, VariantOutcome)> = None;
    for _ in 0..count {
        let z = loop {
            let v = rng.gen_range(1..ring.modulus());
            if v % p != 0 {
                break PadicInt::in_ring(ring, v);
            }
        };
        let (lhs, rhs) = sides(&z)?;
        let o = outcome(Variant::default(), &lhs, &rhs, required);
        if worst.as_ref().is_none_or(|(_, _, w)| o.valuation < w.valuation) {
            worst = Some((z, lhs, o));
        }
    }
    r.working_precision = Some(ring.precision());
    if let Some((z, lhs, o)) = worst {
        r.note = Some(format!("{count} seeded units; worst z = {}", z.residue()));
        r.lhs = Some((&lhs).into());
        r.outcomes.push(o);
    }
    Ok(())
}

/// `p` does not divide `h` (checked earlier) and `v_p(R_p) = g - 1`.
fn hypotheses_hold(data: &ExternalFieldData, g: u32, w: u32, r: &mut CongruenceReport) -> Result<bool> {
    let rp = padic_regulator(&data.units, w)?;
    r.lhs = Some((&rp).into());
    if rp.valuation() != Valuation::Exact(g - 1) {
        r.status = Status::HypothesisFailed;
        r.note = Some(format!("v_p(R_p) = {}, expected {}", rp.valuation(), g - 1));
        return Ok(false);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::{default_grid, run_check, supported_combinations, ClaimId, Status};
    use super::*;

    fn spec_for(claims: &[ClaimId], ds: &[i64], ps: &[u64], ns: &[u32]) -> super::super::CheckSpec {
        let mut s = default_grid();
        s.claims = claims.to_vec();
        s.ds = ds.to_vec();
        s.ps = ps.to_vec();
        s.ns = ns.to_vec();
        s.stable = true;
        s
    }

    #[test]
    fn unit_checks_pass() {
        let reports = run_check(&spec_for(&[ClaimId::P13, ClaimId::L22], &[5], &[5, 7, 11], &[1, 2, 3])).unwrap();
        assert_eq!(reports.len(), 3 + 9);
        assert!(reports.iter().all(|r| r.status == Status::Pass), "{reports:#?}");
    }

    #[test]
    fn inert_and_ramified_points_are_classified() {
        let reports = run_check(&spec_for(&[ClaimId::T15, ClaimId::P11], &[5], &[5, 7], &[1])).unwrap();
        let get = |c, p| reports.iter().find(|r| r.claim == c && r.p == p).unwrap().status;
        assert_eq!(get(ClaimId::T15, 5), Status::SkippedRamified);
        assert_eq!(get(ClaimId::T15, 7), Status::SkippedInert);
        assert_eq!(get(ClaimId::P11, 7), Status::Pass);
    }

    #[test]
    fn main_theorem_selects_one_reading() {
        let spec = spec_for(&[ClaimId::T15, ClaimId::T26], &[5, 12], &[11, 13], &[1, 2]);
        let reports = run_check(&spec).unwrap();
        assert!(reports.iter().all(|r| !r.status.is_failure()), "{reports:#?}");
        let sup = supported_combinations(&reports, &spec.flags);
        assert_eq!(sup.len(), 1, "{sup:?}");
        assert_eq!(sup[0].euler, Some(EulerVariant::Interp));
        assert_eq!(sup[0].p_power, Some(PPower::With));
    }

    #[test]
    fn external_degree_three_is_skipped_for_character_checks() {
        let ring = ResidueRing::new(7, 8).unwrap();
        let u = |v| PadicInt::in_ring(ring, v);
        let data = ExternalFieldData {
            label: "cubic".into(),
            g: 3,
            d: 148,
            h: 1,
            p: 7,
            prec: 8,
            sqrt_d: crate::padic::hensel_sqrt(148, 7, 8).unwrap(),
            units: vec![vec![u(2), u(3)], vec![u(5), u(10)]],
        };
        let mut spec = spec_for(&[ClaimId::T26, ClaimId::P23], &[5], &[7], &[1]);
        spec.field = Some(data);
        let reports = run_check(&spec).unwrap();
        let t26 = reports.iter().find(|r| r.claim == ClaimId::T26).unwrap();
        assert_eq!(t26.status, Status::SkippedEmbedding);
        let p23 = reports.iter().find(|r| r.claim == ClaimId::P23).unwrap();
        assert!(p23.status.was_executed(), "{p23:?}");
    }
}
