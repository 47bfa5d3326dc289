//! Acceptance gate. Each test runs one criterion at its stated tolerance and
//! prints a single PASS/FAIL line.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;

use padic_cnf::bernoulli::{gen_bernoulli_exact, gen_bernoulli_padic};
use padic_cnf::characters::{is_real_fundamental_discriminant, kronecker_char};
use padic_cnf::padic::{rational_valuation, PadicInt, Valuation};
use padic_cnf::quadfield::{class_number, class_number_by_ideals, fundamental_unit, QuadFieldData};
use padic_cnf::verify::report::{emit_report, Format};
use padic_cnf::verify::{
    default_grid, run_check, supported_combinations, CheckSpec, ClaimId, CongruenceReport, EulerVariant, Sign, Status,
    Variant,
};
use padic_cnf::Error;

fn verdict(criterion: u32, name: &str, ok: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let in_time = elapsed < limit;
    let pass = ok && in_time;
    println!(
        "criterion {criterion:>2} {name}: {} ({detail}; {:.2}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
    assert!(in_time, "criterion {criterion} exceeded {limit:?}");
}

fn spec(claims: &[ClaimId], ds: &[i64], ps: &[u64], ns: &[u32]) -> CheckSpec {
    let mut s = default_grid();
    s.claims = claims.to_vec();
    s.ds = ds.to_vec();
    s.ps = ps.to_vec();
    s.ns = ns.to_vec();
    s.stable = true;
    s
}

fn failures(reports: &[CongruenceReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| r.status != Status::Pass)
        .map(|r| format!("{} d={:?} p={} n={:?} {}", r.claim, r.d, r.p, r.n, r.status))
        .collect()
}

#[test]
fn criterion_01_identity_suite() {
    let t = Instant::now();
    let reports = run_check(&spec(&[ClaimId::P13, ClaimId::L22], &[5], &[5, 7, 11, 13], &[1, 2, 3])).unwrap();
    let bad = failures(&reports);
    let ok = bad.is_empty() && reports.len() == 4 + 12;
    verdict(
        1,
        "identity suite",
        ok,
        t.elapsed(),
        Duration::from_secs(5),
        &format!("{} reports, {} not passing {bad:?}", reports.len(), bad.len()),
    );
}

#[test]
fn criterion_02_bernoulli_oracle() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut compared = 0;
    for f in [5i64, 8, 12, 13, 40] {
        let chi = kronecker_char(f).unwrap();
        for p in [7u64, 11, 13] {
            for n in 1..=40u64 {
                let exact = gen_bernoulli_exact(n, &chi).unwrap();
                let padic = gen_bernoulli_padic(n, &chi, p, 4);
                let v = rational_valuation(&exact, p);
                let agree = match (v, padic) {
                    (Some(v), Err(Error::NotIntegral { valuation })) if v < 0 => v == valuation,
                    (_, Ok(b)) => PadicInt::from_rational(p, 4, &exact) == Ok(b),
                    _ => false,
                };
                compared += 1;
                if !agree {
                    bad.push((f, p, n));
                }
            }
        }
    }
    verdict(
        2,
        "Bernoulli oracle equivalence",
        bad.is_empty(),
        t.elapsed(),
        Duration::from_secs(60),
        &format!("{compared} values, mismatches {bad:?}"),
    );
}

#[test]
fn criterion_03_field_invariants() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut fields = 0;
    for d in 2..500i64 {
        if !is_real_fundamental_discriminant(d) {
            continue;
        }
        fields += 1;
        let (x, y, norm) = fundamental_unit(d).unwrap();
        let y = y.to_u64().unwrap();
        if common::pell_scan(d as u64, y) != Some((x.to_u128().unwrap(), y, norm)) {
            bad.push(format!("unit d={d}"));
        }
        if class_number(d).unwrap().0 != class_number_by_ideals(d).unwrap() {
            bad.push(format!("h d={d}"));
        }
    }
    let f5 = QuadFieldData::from_discriminant(5).unwrap();
    let spots = (f5.x.to_u64(), f5.y.to_u64(), f5.norm, f5.h) == (Some(1), Some(1), -1, 1)
        && QuadFieldData::from_discriminant(40).unwrap().h == 2
        && QuadFieldData::from_discriminant(316).unwrap().h == 3;
    if !spots {
        bad.push("spot values".into());
    }
    verdict(
        3,
        "field invariants",
        bad.is_empty(),
        t.elapsed(),
        Duration::from_secs(60),
        &format!("{fields} fields, problems {bad:?}"),
    );
}

#[test]
fn criterion_04_leopoldt_bernoulli() {
    let t = Instant::now();
    let mut common_variants: Option<Vec<Variant>> = None;
    let mut bad = Vec::new();
    for (d, p) in [(5i64, 11u64), (5, 31), (12, 13), (8, 17)] {
        let reports = run_check(&spec(&[ClaimId::P11], &[d], &[p], &[1])).unwrap();
        let r = &reports[0];
        if r.status != Status::Pass {
            bad.push(format!("d={d} p={p} {}", r.status));
        }
        common_variants = Some(match common_variants {
            None => r.passing.clone(),
            Some(v) => v.into_iter().filter(|x| r.passing.contains(x)).collect(),
        });
    }
    let shared = common_variants.unwrap_or_default();
    let names: Vec<String> = shared.iter().map(|v| v.to_string()).collect();
    verdict(
        4,
        "CHK-P11",
        bad.is_empty() && !shared.is_empty(),
        t.elapsed(),
        Duration::from_secs(30),
        &format!("shared variants [{}] {bad:?}", names.join(" | ")),
    );
}

#[test]
fn criterion_05_class_number_formula() {
    let t = Instant::now();
    let reports = run_check(&spec(&[ClaimId::Cnf], &[5], &[11, 19], &[1])).unwrap();
    let bad = failures(&reports);
    let detail: Vec<String> =
        reports.iter().map(|r| format!("p={} v={:?} via {:?}", r.p, r.best_valuation(), r.passing)).collect();
    verdict(
        5,
        "CHK-CNF mod p^3",
        bad.is_empty() && reports.len() == 2,
        t.elapsed(),
        Duration::from_secs(30),
        &detail.join(", "),
    );
}

/// The literal comparison of Leopoldt's value with the interpolated value.
#[test]
fn criterion_06_literal_interpolation() {
    let t = Instant::now();
    let literal = |s: Sign| Variant { sign: Some(s), euler: Some(EulerVariant::Plain), p_power: None };
    let corrected = Variant { sign: Some(Sign::Plus), euler: Some(EulerVariant::Interp), p_power: None };
    let mut lines = Vec::new();
    let mut ok = true;
    for (p, n) in [(11u64, 1u32), (11, 2), (19, 1)] {
        let reports = run_check(&spec(&[ClaimId::P24], &[5], &[p], &[n])).unwrap();
        let r = &reports[0];
        let v = [Sign::Plus, Sign::Minus]
            .iter()
            .filter_map(|&s| r.outcome(&literal(s)))
            .map(|o| o.valuation)
            .max()
            .unwrap_or(Valuation::Exact(0));
        let fixed = r.outcome(&corrected).map(|o| o.valuation);
        ok &= v.is_at_least(n + 1);
        lines.push(format!("p={p} n={n} literal v={v} need {} (Euler-corrected v={fixed:?})", n + 1));
    }
    verdict(6, "CHK-P24 literal", ok, t.elapsed(), Duration::from_secs(120), &lines.join("; "));
}

#[test]
fn criterion_07_main_theorems() {
    let t = Instant::now();
    let mut s = default_grid();
    s.claims = vec![ClaimId::T15, ClaimId::T26];
    s.stable = true;
    let reports = run_check(&s).unwrap();
    let executed = reports.iter().filter(|r| r.status.was_executed()).count();
    let bad = reports.iter().filter(|r| r.status.is_failure()).count();
    let sup = supported_combinations(&reports, &s.flags);
    let names: Vec<String> = sup.iter().map(|v| v.to_string()).collect();
    println!("uniquely supported variant combination: {}", names.join(" | "));
    verdict(
        7,
        "CHK-T15/CHK-T26",
        executed > 0 && bad == 0 && sup.len() == 1,
        t.elapsed(),
        Duration::from_secs(300),
        &format!("{executed} executed points, {bad} failing, supported [{}]", names.join(" | ")),
    );
}

#[test]
fn criterion_08_unit_corollaries() {
    let t = Instant::now();
    let mut s = default_grid();
    s.claims = vec![ClaimId::C27, ClaimId::T29];
    s.stable = true;
    let reports = run_check(&s).unwrap();
    let held: Vec<&CongruenceReport> = reports.iter().filter(|r| r.status.was_executed()).collect();
    let bad: Vec<String> = held
        .iter()
        .filter(|r| r.status != Status::Pass)
        .map(|r| format!("{} d={:?} p={}", r.claim, r.d, r.p))
        .collect();
    let errors = reports.iter().filter(|r| r.status == Status::Error).count();
    let hyp = reports.iter().filter(|r| r.status == Status::HypothesisFailed).count();
    verdict(
        8,
        "CHK-C27/CHK-T29",
        bad.is_empty() && errors == 0 && !held.is_empty(),
        t.elapsed(),
        Duration::from_secs(300),
        &format!("{} points with hypotheses holding, {hyp} hypothesis-failed, failing {bad:?}", held.len()),
    );
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_padic-cnf")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_09_determinism() {
    let t = Instant::now();
    let (c1, a) = cli(&["verify", "--stable", "--format", "json"]);
    let (c2, b) = cli(&["verify", "--stable", "--format", "json"]);
    let ok = c1 == c2 && !a.is_empty() && a == b;
    verdict(
        9,
        "determinism",
        ok,
        t.elapsed(),
        Duration::from_secs(300),
        &format!("{} bytes, exit codes {c1}/{c2}", a.len()),
    );
}

#[test]
fn criterion_10_external_ingestion() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut bad = Vec::new();
    let pairs = [(5i64, 11u64), (5, 19), (8, 7), (12, 13), (40, 13), (316, 5)];
    for (d, p) in pairs {
        let (code, doc) = cli(&["export-field", "--d", &d.to_string(), "--p", &p.to_string(), "--prec", "10"]);
        let path = dir.path().join(format!("field-{d}-{p}.toml"));
        std::fs::write(&path, &doc).unwrap();
        let mut s = spec(&[ClaimId::T26], &[d], &[p], &[1, 2]);
        let internal = emit_report(&run_check(&s).unwrap(), Format::Json);
        s.field = Some(padic_cnf::quadfield::ExternalFieldData::from_toml(&String::from_utf8(doc).unwrap()).unwrap());
        let library = emit_report(&run_check(&s).unwrap(), Format::Json);
        let (_, via_cli) = cli(&[
            "verify",
            "--checks",
            "T26",
            "--n",
            "1,2",
            "--stable",
            "--format",
            "json",
            "--field-file",
            path.to_str().unwrap(),
        ]);
        if code != 0 || internal != library || internal.as_bytes() != via_cli.as_slice() {
            bad.push((d, p));
        }
    }
    verdict(
        10,
        "external ingestion",
        bad.is_empty(),
        t.elapsed(),
        Duration::from_secs(120),
        &format!("{} fields round-tripped, mismatches {bad:?}", pairs.len()),
    );
}
