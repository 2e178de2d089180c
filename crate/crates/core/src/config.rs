//! Run-wide caps, output format and seed.

use crate::error::{Error, Result};
use crate::interpolation::DistinguishConfig;
use crate::intertwiners::SpanConfig;
use crate::partition::DEFAULT_TERM_CAP;

pub const ENV_TERM_CAP: &str = "CSPISO_TERM_CAP";
pub const ENV_CATALOG_CAP: &str = "CSPISO_CATALOG_CAP";
pub const ENV_SPAN_BOUND: &str = "CSPISO_SPAN_BOUND";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    /// Largest number of assignments one partition function may enumerate.
    pub term_cap: u64,
    /// Largest number of catalog instances examined per comparison.
    pub catalog_cap: usize,
    /// Largest gadget vertex count for span enumeration.
    pub span_bound: usize,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = DistinguishConfig::default();
        RunConfig {
            term_cap: DEFAULT_TERM_CAP,
            catalog_cap: d.catalog_cap,
            span_bound: SpanConfig::default().bound,
            format: Format::Text,
            seed: 0,
        }
    }
}

fn positive(name: &str, raw: &str) -> Result<u64> {
    match raw.trim().parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Parse(format!("{name} must be a positive integer, got {raw:?}"))),
    }
}

impl RunConfig {
    /// Applies the `CSPISO_*` overrides found by `lookup`.
    pub fn with_env(mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        if let Some(raw) = lookup(ENV_TERM_CAP) {
            self.term_cap = positive(ENV_TERM_CAP, &raw)?;
        }
        if let Some(raw) = lookup(ENV_CATALOG_CAP) {
            self.catalog_cap = positive(ENV_CATALOG_CAP, &raw)? as usize;
        }
        if let Some(raw) = lookup(ENV_SPAN_BOUND) {
            self.span_bound = positive(ENV_SPAN_BOUND, &raw)? as usize;
        }
        Ok(self)
    }

    pub fn from_process_env() -> Result<Self> {
        RunConfig::default().with_env(|k| std::env::var(k).ok())
    }

    pub fn validate(&self) -> Result<()> {
        if self.term_cap == 0 || self.catalog_cap == 0 || self.span_bound == 0 {
            return Err(Error::Precondition("caps must be positive".into()));
        }
        Ok(())
    }

    pub fn distinguish(&self) -> DistinguishConfig {
        DistinguishConfig { term_cap: self.term_cap, catalog_cap: self.catalog_cap, ..DistinguishConfig::default() }
    }

    pub fn span(&self) -> SpanConfig {
        SpanConfig { bound: self.span_bound, ..SpanConfig::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides() {
        let c = RunConfig::default()
            .with_env(|k| match k {
                ENV_TERM_CAP => Some("42".into()),
                ENV_SPAN_BOUND => Some("3".into()),
                _ => None,
            })
            .unwrap();
        assert_eq!((c.term_cap, c.span_bound, c.catalog_cap), (42, 3, RunConfig::default().catalog_cap));
        assert!(RunConfig::default().with_env(|_| Some("0".into())).is_err());
        assert!(RunConfig::default().with_env(|_| Some("x".into())).is_err());
    }
}
