//! Text, CSV and JSON rendering of congruence reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{status_counts, supported_combinations, CongruenceReport, VariantFlags};
use crate::error::{Error, Result};
use crate::padic::Valuation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Csv,
    Json,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn variants_cell(r: &CongruenceReport) -> String {
    r.outcomes
        .iter()
        .map(|o| format!("{}:{}:{}", o.variant, o.valuation, if o.pass { "pass" } else { "fail" }))
        .collect::<Vec<_>>()
        .join(";")
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str =
    "claim,field,d,p,n,status,kind,required,working_precision,lhs,best_valuation,passing,outcomes,note,timing_us";

pub fn emit_report(reports: &[CongruenceReport], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(reports).expect("reports serialise") + "\n",
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in reports {
                let cells = [
                    r.claim.to_string(),
                    opt(&r.field),
                    opt(&r.d),
                    r.p.to_string(),
                    opt(&r.n),
                    r.status.to_string(),
                    serde_json::to_value(r.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
                    r.required.to_string(),
                    opt(&r.working_precision),
                    r.lhs.as_ref().map(|l| l.residue.clone()).unwrap_or_default(),
                    opt(&r.best_valuation()),
                    r.passing.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";"),
                    variants_cell(r),
                    opt(&r.note),
                    opt(&r.timing_us),
                ];
                let line: Vec<String> = cells.iter().map(|c| csv_escape(c)).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in reports {
                let mut head = format!("{:<8} {:>5} p={:<3}", r.claim, opt(&r.d), r.p);
                if let Some(n) = r.n {
                    let _ = write!(head, " n={n}");
                }
                let _ = write!(out, "{head:<26} {:<20}", r.status.as_str());
                if let Some(best) = r.best_valuation() {
                    let rel = if matches!(best, Valuation::AtLeast(_)) { "" } else { "=" };
                    let _ = write!(out, " v{rel}{best} need {}", r.required);
                }
                if !r.passing.is_empty() {
                    let names: Vec<String> = r.passing.iter().map(|v| v.to_string()).collect();
                    let _ = write!(out, " [{}]", names.join(" | "));
                }
                if let Some(note) = &r.note {
                    let _ = write!(out, "  ({note})");
                }
                if let Some(t) = r.timing_us {
                    let _ = write!(out, " {t}us");
                }
                out.push('\n');
            }
            out
        }
    }
}

/// Parse the JSON produced by [`emit_report`].
pub fn parse_json_reports(text: &str) -> Result<Vec<CongruenceReport>> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("report JSON: {e}")))
}

/// Closing lines of a run: status totals and the surviving readings.
pub fn summary(reports: &[CongruenceReport], flags: &VariantFlags) -> String {
    let mut out = String::new();
    let counts: Vec<String> = status_counts(reports).iter().map(|(s, c)| format!("{s}={c}")).collect();
    let _ = writeln!(out, "{} reports: {}", reports.len(), counts.join(" "));
    let executed =
        reports.iter().any(|r| matches!(r.claim, super::ClaimId::T15 | super::ClaimId::T26) && r.status.was_executed());
    if executed {
        let sup = supported_combinations(reports, flags);
        match sup.as_slice() {
            [] => out.push_str("no variant combination passes every CHK-T15/CHK-T26 point\n"),
            [one] => {
                let _ = writeln!(out, "uniquely supported variant combination: {one}");
            }
            many => {
                let names: Vec<String> = many.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "supported variant combinations: {}", names.join(" | "));
            }
        }
    }
    out
}
