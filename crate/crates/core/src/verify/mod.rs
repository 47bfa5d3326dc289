//! Congruence verification harness.
//!
//! A [`CheckSpec`] names the claims to verify and the grid of fields,
//! primes and levels to sweep. Every grid point yields exactly one
//! [`CongruenceReport`]; points outside a claim's hypotheses are classified
//! and reported as skipped rather than dropped.
//!
//! Several claims are stated with normalisations that can be read more than
//! one way. Those readings are exposed as variant axes (sign, Euler factor,
//! power of `p`), each report lists the outcome of every enabled reading,
//! and [`supported_combinations`] intersects the readings that survive the
//! main-theorem checks.

pub mod checks;
pub mod config;
pub mod report;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::characters::is_real_fundamental_discriminant;
use crate::error::{Error, Result};
use crate::padic::{PadicInt, Valuation};
use crate::quadfield::{ExternalFieldData, QuadFieldData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ClaimId {
    P11,
    P13,
    L22,
    P23,
    T15,
    Cnf,
    P24,
    T26,
    C27,
    T29,
}

impl ClaimId {
    pub const ALL: [ClaimId; 10] = [
        ClaimId::P11,
        ClaimId::P13,
        ClaimId::L22,
        ClaimId::P23,
        ClaimId::T15,
        ClaimId::Cnf,
        ClaimId::P24,
        ClaimId::T26,
        ClaimId::C27,
        ClaimId::T29,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimId::P11 => "CHK-P11",
            ClaimId::P13 => "CHK-P13",
            ClaimId::L22 => "CHK-L22",
            ClaimId::P23 => "CHK-P23",
            ClaimId::T15 => "CHK-T15",
            ClaimId::Cnf => "CHK-CNF",
            ClaimId::P24 => "CHK-P24",
            ClaimId::T26 => "CHK-T26",
            ClaimId::C27 => "CHK-C27",
            ClaimId::T29 => "CHK-T29",
        }
    }

    /// One-line statement of what the check compares.
    pub fn statement(&self) -> &'static str {
        match self {
            ClaimId::P11 => "Lp(chi) = E * B_{p-1,chi} p/(p-1) mod p^2",
            ClaimId::P13 => "log_p(z) = -p Q_p(z) mod p^2",
            ClaimId::L22 => "-p Q_{p,n}(z) = log_p(z) mod p^(n+2)",
            ClaimId::P23 => "R_p = (-p)^(g-1) R^(p,n) mod p^(n+g)",
            ClaimId::T15 => "2^(g-1) h R^(p) / sqrt d = prod E L(2-p, chi) mod p",
            ClaimId::Cnf => "2^(g-1) h R_p / sqrt d = prod Lp(chi) mod p^N",
            ClaimId::P24 => "L_p(1, chi) = L_p(1 - p^n(p-1), chi) mod p^(n+1)",
            ClaimId::T26 => "2^(g-1) h R^(p,n) / sqrt d = prod E L(1 - p^n(p-1), chi) mod p^(n+1)",
            ClaimId::C27 => "prod L(1 - p^n(p-1), chi) is a p-adic unit",
            ClaimId::T29 => "prod L_p(1, chi) is a p-adic unit",
        }
    }

    fn uses_level(&self) -> bool {
        matches!(self, ClaimId::L22 | ClaimId::P23 | ClaimId::P24 | ClaimId::T26 | ClaimId::C27)
    }

    fn uses_field(&self) -> bool {
        !matches!(self, ClaimId::P13 | ClaimId::L22)
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_prefix("CHK-").unwrap_or(&t);
        ClaimId::ALL
            .into_iter()
            .find(|c| &c.as_str()[4..] == t)
            .ok_or_else(|| Error::Config(format!("unknown check '{s}'")))
    }
}

impl TryFrom<String> for ClaimId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ClaimId> for String {
    fn from(c: ClaimId) -> String {
        c.as_str().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    SkippedInert,
    SkippedRamified,
    SkippedEmbedding,
    SkippedPDividesH,
    HypothesisFailed,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::SkippedInert => "skipped-inert",
            Status::SkippedRamified => "skipped-ramified",
            Status::SkippedEmbedding => "skipped-embedding",
            Status::SkippedPDividesH => "skipped-p-divides-h",
            Status::HypothesisFailed => "hypothesis-failed",
            Status::Error => "error",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Status::Fail | Status::Error)
    }

    pub fn was_executed(&self) -> bool {
        matches!(self, Status::Pass | Status::Fail)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Plus,
    Minus,
}

/// Factor attached to each character's classical value:
/// `1`, `chi_bar(p)`, or `chi_bar(p) / (1 - chi_bar(p) p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EulerVariant {
    Plain,
    ChiP,
    Interp,
}

/// Whether the level-n comparison carries the factor `p^(g-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PPower {
    With,
    Without,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SignPolicy {
    Either,
    Plus,
    Minus,
}

/// A reading of a claim, restricted to the axes the claim depends on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Variant {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<EulerVariant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_power: Option<PPower>,
}

impl Variant {
    /// Whether this (possibly partial) reading is compatible with a full one.
    pub fn matches(&self, full: &Variant) -> bool {
        fn ok<T: PartialEq>(a: &Option<T>, b: &Option<T>) -> bool {
            a.is_none() || b.is_none() || a == b
        }
        ok(&self.sign, &full.sign) && ok(&self.euler, &full.euler) && ok(&self.p_power, &full.p_power)
    }
}

fn kebab<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|j| j.as_str().map(str::to_string)).unwrap_or_default()
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(s) = self.sign {
            parts.push(format!("sign={}", kebab(&s)));
        }
        if let Some(e) = self.euler {
            parts.push(format!("euler={}", kebab(&e)));
        }
        if let Some(p) = self.p_power {
            parts.push(format!("p-power={}", kebab(&p)));
        }
        if parts.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

/// The readings enabled for a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantFlags {
    pub signs: Vec<Sign>,
    pub eulers: Vec<EulerVariant>,
    pub p_powers: Vec<PPower>,
}

impl Default for VariantFlags {
    fn default() -> Self {
        VariantFlags {
            signs: vec![Sign::Plus, Sign::Minus],
            eulers: vec![EulerVariant::Plain, EulerVariant::ChiP, EulerVariant::Interp],
            p_powers: vec![PPower::With, PPower::Without],
        }
    }
}

impl VariantFlags {
    pub fn new(sign: SignPolicy, euler: Option<EulerVariant>, p_power: Option<PPower>) -> Self {
        let d = VariantFlags::default();
        VariantFlags {
            signs: match sign {
                SignPolicy::Either => d.signs,
                SignPolicy::Plus => vec![Sign::Plus],
                SignPolicy::Minus => vec![Sign::Minus],
            },
            eulers: euler.map(|e| vec![e]).unwrap_or(d.eulers),
            p_powers: p_power.map(|p| vec![p]).unwrap_or(d.p_powers),
        }
    }

    /// Every full combination of enabled readings.
    pub fn combinations(&self) -> Vec<Variant> {
        let mut out = Vec::new();
        for &s in &self.signs {
            for &e in &self.eulers {
                for &p in &self.p_powers {
                    out.push(Variant { sign: Some(s), euler: Some(e), p_power: Some(p) });
                }
            }
        }
        out
    }
}

/// A residue together with its modulus `p^prec`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueRecord {
    pub residue: String,
    pub p: u64,
    pub prec: u32,
}

impl From<&PadicInt> for ResidueRecord {
    fn from(z: &PadicInt) -> Self {
        ResidueRecord { residue: z.residue().to_string(), p: z.p(), prec: z.precision() }
    }
}

impl fmt::Display for ResidueRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.p, self.prec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `v_p(lhs - rhs) >= required`.
    Congruence,
    /// `v_p(value) == 0`.
    Unit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantOutcome {
    pub variant: Variant,
    /// Compared value (the right-hand side, or the value itself for unit checks).
    pub value: ResidueRecord,
    pub valuation: Valuation,
    pub required: u32,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub claim: ClaimId,
    pub field: Option<String>,
    pub d: Option<i64>,
    pub p: u64,
    pub n: Option<u32>,
    pub status: Status,
    pub kind: CheckKind,
    pub required: u32,
    pub working_precision: Option<u32>,
    pub lhs: Option<ResidueRecord>,
    pub outcomes: Vec<VariantOutcome>,
    pub passing: Vec<Variant>,
    pub note: Option<String>,
    pub timing_us: Option<u64>,
}

impl CongruenceReport {
    /// Valuation of the most favourable reading: the largest difference
    /// valuation for congruences, the smallest valuation for unit checks.
    pub fn best_valuation(&self) -> Option<Valuation> {
        let vals = self.outcomes.iter().map(|o| o.valuation);
        match self.kind {
            CheckKind::Congruence => vals.max(),
            CheckKind::Unit => vals.min(),
        }
    }

    pub fn outcome(&self, v: &Variant) -> Option<&VariantOutcome> {
        self.outcomes.iter().find(|o| &o.variant == v)
    }
}

/// Field source for the field-dependent checks.
#[derive(Clone, Debug)]
pub enum FieldSource {
    Quadratic(QuadFieldData),
    External(ExternalFieldData),
}

impl FieldSource {
    pub fn d(&self) -> i64 {
        match self {
            FieldSource::Quadratic(f) => f.d,
            FieldSource::External(e) => e.d,
        }
    }

    pub fn label(&self) -> String {
        match self {
            FieldSource::Quadratic(f) => f.label(),
            FieldSource::External(e) => e.label.clone(),
        }
    }

    pub fn h(&self) -> u64 {
        match self {
            FieldSource::Quadratic(f) => f.h,
            FieldSource::External(e) => e.h,
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            FieldSource::Quadratic(_) => 2,
            FieldSource::External(e) => e.g,
        }
    }
}

/// What to run and over which grid.
#[derive(Clone, Debug)]
pub struct CheckSpec {
    pub claims: Vec<ClaimId>,
    pub ds: Vec<i64>,
    pub ps: Vec<u64>,
    pub ns: Vec<u32>,
    /// Minimum working precision, and the target precision of CHK-CNF.
    pub prec: u32,
    pub flags: VariantFlags,
    pub exact_bound: u64,
    pub units_per_prime: usize,
    pub seed: u64,
    pub field: Option<ExternalFieldData>,
    pub stable: bool,
}

/// The shipped acceptance grid.
pub fn default_grid() -> CheckSpec {
    CheckSpec {
        claims: ClaimId::ALL.to_vec(),
        ds: vec![5, 8, 12, 13, 40, 316],
        ps: vec![5, 7, 11, 13, 19],
        ns: vec![1, 2],
        prec: 3,
        flags: VariantFlags::default(),
        exact_bound: crate::bernoulli::DEFAULT_EXACT_BOUND,
        units_per_prime: 50,
        seed: 0x5eed,
        field: None,
        stable: false,
    }
}

/// Splitting type of `p` in `Q(sqrt d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClass {
    Split,
    Inert,
    Ramified,
}

pub fn classify(d: i64, p: u64) -> PairClass {
    match arith::kronecker(d, p) {
        0 => PairClass::Ramified,
        1 => PairClass::Split,
        _ => PairClass::Inert,
    }
}

impl CheckSpec {
    pub fn validate(&self) -> Result<()> {
        if self.claims.is_empty() {
            return Err(Error::Config("no checks selected".into()));
        }
        if let Some(&d) = self.ds.iter().find(|&&d| !is_real_fundamental_discriminant(d)) {
            return Err(Error::Config(format!("{d} is not the discriminant of a real quadratic field")));
        }
        if let Some(&p) = self.ps.iter().find(|&&p| p <= 3 || !arith::is_prime(p)) {
            return Err(Error::Config(format!("{p} is not a prime greater than 3")));
        }
        if self.ns.contains(&0) {
            return Err(Error::Config("levels n must be at least 1".into()));
        }
        if self.prec == 0 {
            return Err(Error::Config("precision must be positive".into()));
        }
        if self.flags.signs.is_empty() || self.flags.eulers.is_empty() || self.flags.p_powers.is_empty() {
            return Err(Error::Config("every variant axis needs at least one enabled value".into()));
        }
        if let Some(e) = &self.field {
            let levels: Vec<Option<u32>> = self.ns.iter().map(|&n| Some(n)).chain([None]).collect();
            let needed = self
                .claims
                .iter()
                .filter(|c| c.uses_field())
                .flat_map(|&c| levels.iter().map(move |&n| checks::working_precision(c, n, e.g, self.prec)))
                .max()
                .unwrap_or(0);
            if e.prec < needed {
                return Err(Error::Config(format!(
                    "field document precision N = {} is below the required working precision {needed}",
                    e.prec
                )));
            }
        }
        Ok(())
    }
}

/// One grid point.
#[derive(Clone, Debug)]
pub struct Task {
    pub claim: ClaimId,
    pub field: Option<usize>,
    pub p: u64,
    pub n: Option<u32>,
}

type MemoKey = (String, u64, u64, u32);

/// Shared state of a run: the fields and memoised L-values.
pub struct Context<'a> {
    pub spec: &'a CheckSpec,
    pub fields: Vec<FieldSource>,
    l_values: Mutex<HashMap<MemoKey, Result<PadicInt>>>,
    lp_values: Mutex<HashMap<MemoKey, Result<PadicInt>>>,
}

impl<'a> Context<'a> {
    pub fn new(spec: &'a CheckSpec) -> Result<Self> {
        let fields = match &spec.field {
            Some(e) => vec![FieldSource::External(e.clone())],
            None => spec
                .ds
                .iter()
                .map(|&d| QuadFieldData::from_discriminant(d).map(FieldSource::Quadratic))
                .collect::<Result<_>>()?,
        };
        Ok(Context { spec, fields, l_values: Mutex::new(HashMap::new()), lp_values: Mutex::new(HashMap::new()) })
    }

    fn memo(
        table: &Mutex<HashMap<MemoKey, Result<PadicInt>>>,
        key: MemoKey,
        compute: impl FnOnce() -> Result<PadicInt>,
    ) -> Result<PadicInt> {
        if let Some(v) = table.lock().expect("memo poisoned").get(&key) {
            return v.clone();
        }
        let v = compute();
        table.lock().expect("memo poisoned").insert(key, v.clone());
        v
    }

    /// `L(1 - s, chi)` mod `p^M`.
    pub fn l_value(&self, chi: &crate::characters::DirichletChar, s: u64, p: u64, m: u32) -> Result<PadicInt> {
        let bound = self.spec.exact_bound;
        Self::memo(&self.l_values, (chi.label(), s, p, m), || crate::bernoulli::l_value_padic(s, chi, p, m, bound))
    }

    /// Leopoldt's `Lp(chi)` mod `p^N`.
    pub fn leopoldt(&self, chi: &crate::characters::DirichletChar, p: u64, prec: u32) -> Result<PadicInt> {
        Self::memo(&self.lp_values, (chi.label(), 0, p, prec), || {
            crate::lfunctions::leopoldt_lp(chi, p, prec).map(|v| v.value)
        })
    }

    pub fn tasks(&self) -> Vec<Task> {
        let spec = self.spec;
        let mut out = Vec::new();
        for &claim in &spec.claims {
            let levels: Vec<Option<u32>> =
                if claim.uses_level() { spec.ns.iter().map(|&n| Some(n)).collect() } else { vec![None] };
            if claim.uses_field() {
                for (i, f) in self.fields.iter().enumerate() {
                    let ps = match f {
                        FieldSource::External(e) => vec![e.p],
                        FieldSource::Quadratic(_) => spec.ps.clone(),
                    };
                    for p in ps {
                        for &n in &levels {
                            out.push(Task { claim, field: Some(i), p, n });
                        }
                    }
                }
            } else {
                for &p in &spec.ps {
                    for &n in &levels {
                        out.push(Task { claim, field: None, p, n });
                    }
                }
            }
        }
        out
    }
}

fn sort_key(r: &CongruenceReport) -> (ClaimId, Option<i64>, u64, Option<u32>) {
    (r.claim, r.d, r.p, r.n)
}

/// Run every grid point of the spec; reports come back in (claim, d, p, n) order.
pub fn run_check(spec: &CheckSpec) -> Result<Vec<CongruenceReport>> {
    spec.validate()?;
    let ctx = Context::new(spec)?;
    let tasks = ctx.tasks();
    let mut reports: Vec<CongruenceReport> = tasks
        .par_iter()
        .map(|t| {
            let start = Instant::now();
            let mut r = checks::evaluate(&ctx, t);
            r.timing_us = if spec.stable { None } else { Some(start.elapsed().as_micros() as u64) };
            r
        })
        .collect();
    reports.sort_by_key(sort_key);
    Ok(reports)
}

/// Full variant combinations that pass every executed CHK-T15 and CHK-T26 point.
pub fn supported_combinations(reports: &[CongruenceReport], flags: &VariantFlags) -> Vec<Variant> {
    let points: Vec<&CongruenceReport> =
        reports.iter().filter(|r| matches!(r.claim, ClaimId::T15 | ClaimId::T26) && r.status.was_executed()).collect();
    flags
        .combinations()
        .into_iter()
        .filter(|full| points.iter().all(|r| r.outcomes.iter().any(|o| o.pass && o.variant.matches(full))))
        .collect()
}

/// Count of reports per status, for summaries.
pub fn status_counts(reports: &[CongruenceReport]) -> BTreeMap<Status, usize> {
    let mut m = BTreeMap::new();
    for r in reports {
        *m.entry(r.status).or_insert(0) += 1;
    }
    m
}

/// Process exit code for a finished run: 0 when nothing failed, 1 otherwise.
pub fn exit_code(reports: &[CongruenceReport]) -> i32 {
    if reports.iter().any(|r| r.status.is_failure()) {
        1
    } else {
        0
    }
}
