//! TOML run configuration. Keys mirror the `verify` command-line flags;
//! flags given on the command line take precedence.

use std::path::PathBuf;

use serde::Deserialize;

use super::report::Format;
use super::{default_grid, CheckSpec, ClaimId, EulerVariant, PPower, SignPolicy, VariantFlags};
use crate::error::{Error, Result};
use crate::quadfield::ExternalFieldData;

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub checks: Option<Vec<String>>,
    pub d: Option<Vec<i64>>,
    pub p: Option<Vec<u64>>,
    pub n: Option<Vec<u32>>,
    pub prec: Option<u32>,
    pub sign_policy: Option<SignPolicy>,
    pub euler_variant: Option<EulerVariant>,
    pub p_power_variant: Option<PPower>,
    pub format: Option<Format>,
    pub stable: Option<bool>,
    pub field_file: Option<PathBuf>,
    pub exact_bound: Option<u64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    /// Fill every unset key of `self` from `base`.
    pub fn or(self, base: RunConfig) -> RunConfig {
        RunConfig {
            checks: self.checks.or(base.checks),
            d: self.d.or(base.d),
            p: self.p.or(base.p),
            n: self.n.or(base.n),
            prec: self.prec.or(base.prec),
            sign_policy: self.sign_policy.or(base.sign_policy),
            euler_variant: self.euler_variant.or(base.euler_variant),
            p_power_variant: self.p_power_variant.or(base.p_power_variant),
            format: self.format.or(base.format),
            stable: self.stable.or(base.stable),
            field_file: self.field_file.or(base.field_file),
            exact_bound: self.exact_bound.or(base.exact_bound),
            seed: self.seed.or(base.seed),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Text)
    }

    /// Resolve into a validated spec, reading the field document if named.
    pub fn into_spec(&self) -> Result<CheckSpec> {
        let mut spec = default_grid();
        if let Some(c) = &self.checks {
            spec.claims = c.iter().map(|s| s.parse()).collect::<Result<Vec<ClaimId>>>()?;
            spec.claims.sort();
            spec.claims.dedup();
        }
        if let Some(d) = &self.d {
            spec.ds = d.clone();
        }
        if let Some(p) = &self.p {
            spec.ps = p.clone();
        }
        if let Some(n) = &self.n {
            spec.ns = n.clone();
        }
        if let Some(prec) = self.prec {
            spec.prec = prec;
        }
        if let Some(b) = self.exact_bound {
            spec.exact_bound = b;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        spec.flags =
            VariantFlags::new(self.sign_policy.unwrap_or(SignPolicy::Either), self.euler_variant, self.p_power_variant);
        spec.stable = self.stable.unwrap_or(false);
        if let Some(path) = &self.field_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            spec.field = Some(ExternalFieldData::from_toml(&text)?);
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig::from_toml("checks = [\"T26\"]\nd = [5]\np = [11]\nprec = 4\neuler-variant = \"plain\"\n")
            .unwrap();
        let flags = RunConfig { p: Some(vec![19]), ..Default::default() };
        let spec = flags.or(file).into_spec().unwrap();
        assert_eq!(spec.claims, vec![ClaimId::T26]);
        assert_eq!(spec.ps, vec![19]);
        assert_eq!(spec.ds, vec![5]);
        assert_eq!(spec.prec, 4);
        assert_eq!(spec.flags.eulers, vec![EulerVariant::Plain]);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_toml("colour = 1").is_err());
        let bad = RunConfig { d: Some(vec![7]), ..Default::default() };
        assert!(matches!(bad.into_spec(), Err(Error::Config(_))));
        let bad = RunConfig { checks: Some(vec!["CHK-Q1".into()]), ..Default::default() };
        assert!(bad.into_spec().is_err());
    }
}
