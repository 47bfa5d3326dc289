use std::process::Command;

use proptest::prelude::*;

use padic_cnf::verify::report::{emit_report, parse_json_reports, Format};
use padic_cnf::verify::{classify, default_grid, run_check, ClaimId, PairClass, Sign, Status};

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_padic-cnf")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["verify", "--checks", "P13", "--p", "5,7"]).0, 0);
    assert_eq!(cli(&["verify", "--checks", "P24", "--d", "5", "--p", "11", "--euler-variant", "plain"]).0, 1);
    assert_eq!(cli(&["verify", "--d", "9"]).0, 2);
    assert_eq!(cli(&["verify", "--p", "4"]).0, 2);
    assert_eq!(cli(&["verify", "--checks", "CHK-Z1"]).0, 2);
    assert_eq!(cli(&["verify", "--field-file", "/nonexistent/field.toml"]).0, 2);
    assert_eq!(cli(&["verify", "--no-such-flag"]).0, 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "checks = [\"CHK-T26\"]\nd = [5]\np = [11, 19]\nn = [1]\nformat = \"csv\"\nstable = true\n")
        .unwrap();
    let (code, out, _) = cli(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    let (code, out, _) = cli(&["verify", "--config", path.to_str().unwrap(), "--p", "11", "--format", "json"]);
    assert_eq!(code, 0);
    let reports = parse_json_reports(&out).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].p, 11);
    std::fs::write(&path, "checks = [\"CHK-T26\"]\ncolour = \"blue\"\n").unwrap();
    assert_eq!(cli(&["verify", "--config", path.to_str().unwrap()]).0, 2);
}

#[test]
fn malformed_field_document_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.toml");
    let (_, doc, _) = cli(&["export-field", "--d", "5", "--p", "11", "--prec", "8"]);
    std::fs::write(&path, doc.replace("sqrt_d = \"", "sqrt_d = \"1")).unwrap();
    let (code, _, err) = cli(&["verify", "--checks", "T26", "--field-file", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn text_output_names_the_supported_reading() {
    let (code, out, _) = cli(&["verify", "--checks", "T15,T26", "--d", "5,12", "--p", "11,13", "--stable"]);
    assert_eq!(code, 0);
    assert!(out.contains("uniquely supported variant combination: sign=plus,euler=interp,p-power=with"), "{out}");
}

#[test]
fn level_one_theorem_example() {
    let mut s = default_grid();
    s.claims = vec![ClaimId::T26];
    s.ds = vec![5];
    s.ps = vec![7, 11];
    s.ns = vec![1];
    let reports = run_check(&s).unwrap();
    assert_eq!(reports[0].status, Status::SkippedInert);
    let r = &reports[1];
    assert_eq!((r.p, r.required, r.status), (11, 2, Status::Pass));
    let signs: std::collections::BTreeSet<Sign> = r.passing.iter().filter_map(|v| v.sign).collect();
    assert_eq!(signs.len(), 1);
}

#[test]
fn default_grid_classification() {
    assert_eq!(classify(5, 11), PairClass::Split);
    assert_eq!(classify(5, 5), PairClass::Ramified);
    assert_eq!(classify(40, 13), PairClass::Split);
    let g = default_grid();
    let split: Vec<(i64, u64)> =
        g.ds.iter()
            .flat_map(|&d| g.ps.iter().map(move |&p| (d, p)))
            .filter(|&(d, p)| classify(d, p) == PairClass::Split)
            .collect();
    assert_eq!(split, [(5, 11), (5, 19), (8, 7), (12, 11), (12, 13), (40, 13), (316, 5), (316, 7), (316, 13)]);
}

fn subset<T: Clone + std::fmt::Debug + 'static>(all: Vec<T>) -> impl Strategy<Value = Vec<T>> {
    let n = all.len();
    proptest::sample::subsequence(all, 1..=n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn report_invariants(
        claims in subset(ClaimId::ALL.to_vec()),
        ds in subset(vec![5i64, 8, 12, 13, 40, 316]),
        ps in subset(vec![5u64, 7, 11, 13, 19]),
        ns in subset(vec![1u32, 2]),
    ) {
        let mut s = default_grid();
        s.claims = claims.clone();
        s.ds = ds.clone();
        s.ps = ps.clone();
        s.ns = ns.clone();
        s.stable = true;
        s.units_per_prime = 5;
        let reports = run_check(&s).unwrap();
        let mut expected = 0;
        for c in &claims {
            let levels = if matches!(c, ClaimId::L22 | ClaimId::P23 | ClaimId::P24 | ClaimId::T26 | ClaimId::C27) { ns.len() } else { 1 };
            let fields = if matches!(c, ClaimId::P13 | ClaimId::L22) { 1 } else { ds.len() };
            expected += fields * ps.len() * levels;
        }
        prop_assert_eq!(reports.len(), expected);
        for w in reports.windows(2) {
            prop_assert!((w[0].claim, w[0].d, w[0].p, w[0].n) < (w[1].claim, w[1].d, w[1].p, w[1].n));
        }
        for r in &reports {
            let any = r.outcomes.iter().any(|o| o.pass);
            match r.status {
                Status::Pass => prop_assert!(any),
                Status::Fail => prop_assert!(!any && !r.outcomes.is_empty()),
                _ => {}
            }
            for o in &r.outcomes {
                prop_assert_eq!(o.pass, match r.kind {
                    padic_cnf::verify::CheckKind::Congruence => o.valuation.is_at_least(o.required),
                    padic_cnf::verify::CheckKind::Unit => o.valuation == padic_cnf::padic::Valuation::Exact(0),
                });
                if let Some(w) = r.working_precision {
                    prop_assert!(o.required < w);
                }
            }
            if let Some(d) = r.d {
                if classify(d, r.p) == PairClass::Ramified {
                    prop_assert_eq!(r.status, Status::SkippedRamified);
                }
            }
        }
        let text = emit_report(&reports, Format::Json);
        prop_assert_eq!(parse_json_reports(&text).unwrap(), reports.clone());
        prop_assert_eq!(emit_report(&reports, Format::Csv).lines().count(), reports.len() + 1);
    }
}
