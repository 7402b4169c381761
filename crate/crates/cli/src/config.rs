//! Sweep configuration shared by the figure commands: JSON file values with
//! command-line overrides on top.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ghostcorr::SourceFamily;

/// A parameter range: an explicit list or a log-spaced specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeSpec {
    List(Vec<f64>),
    Log { log: LogRange },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl RangeSpec {
    pub fn values(&self) -> anyhow::Result<Vec<f64>> {
        match self {
            RangeSpec::List(values) => {
                if values.is_empty() {
                    bail!("range list is empty");
                }
                if values.iter().any(|v| !v.is_finite()) {
                    bail!("range list contains non-finite values");
                }
                Ok(values.clone())
            }
            RangeSpec::Log { log } => {
                if !log.start.is_finite()
                    || log.start <= 0.0
                    || !log.stop.is_finite()
                    || log.stop < log.start
                    || log.count == 0
                {
                    bail!(
                        "log range needs 0 < start <= stop and count >= 1 (got {log:?})"
                    );
                }
                if log.count == 1 {
                    return Ok(vec![log.start]);
                }
                let lo = log.start.log10();
                let hi = log.stop.log10();
                Ok((0..log.count)
                    .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (log.count - 1) as f64))
                    .collect())
            }
        }
    }
}

impl FromStr for RangeSpec {
    type Err = anyhow::Error;

    /// `"0.1,1,10"` for a list, `"log:0.01:1000:40"` for a log range.
    fn from_str(s: &str) -> anyhow::Result<Self> {
        if let Some(rest) = s.strip_prefix("log:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                bail!("log range syntax is log:<start>:<stop>:<count>");
            }
            let log = LogRange {
                start: parts[0].parse().context("log range start")?,
                stop: parts[1].parse().context("log range stop")?,
                count: parts[2].parse().context("log range count")?,
            };
            return Ok(RangeSpec::Log { log });
        }
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<f64>().context("range value"))
            .collect::<anyhow::Result<Vec<f64>>>()?;
        Ok(RangeSpec::List(values))
    }
}

/// JSON mirror of the sweep parameters; every field optional so the file can
/// carry partial settings and the CLI can override the rest.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Option<SourceFamily>,
    pub illumination: Option<RangeSpec>,
    pub speckles: Option<RangeSpec>,
    pub pixels: Option<u32>,
    pub normalize: Option<bool>,
    pub out: Option<PathBuf>,
    pub rng_seed: Option<u64>,
}

impl SweepConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Overlay `other` (CLI flags) on top of `self` (file values).
    pub fn overridden_by(mut self, other: SweepConfig) -> Self {
        if other.family.is_some() {
            self.family = other.family;
        }
        if other.illumination.is_some() {
            self.illumination = other.illumination;
        }
        if other.speckles.is_some() {
            self.speckles = other.speckles;
        }
        if other.pixels.is_some() {
            self.pixels = other.pixels;
        }
        if other.normalize.is_some() {
            self.normalize = other.normalize;
        }
        if other.out.is_some() {
            self.out = other.out;
        }
        if other.rng_seed.is_some() {
            self.rng_seed = other.rng_seed;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_list_and_log() {
        let list: RangeSpec = "1, 2,5".parse().unwrap();
        assert_eq!(list.values().unwrap(), vec![1.0, 2.0, 5.0]);
        let log: RangeSpec = "log:0.01:1000:6".parse().unwrap();
        let v = log.values().unwrap();
        assert_eq!(v.len(), 6);
        assert!((v[0] - 0.01).abs() < 1e-12);
        assert!((v[5] - 1000.0).abs() < 1e-9);
        assert!("log:1:2".parse::<RangeSpec>().is_err());
        assert!(RangeSpec::List(vec![]).values().is_err());
    }

    #[test]
    fn json_roundtrip_and_override() {
        let file: SweepConfig = serde_json::from_str(
            r#"{"family":"spdc","illumination":{"log":{"start":0.1,"stop":10,"count":3}},"pixels":50}"#,
        )
        .unwrap();
        let cli = SweepConfig {
            pixels: Some(100),
            rng_seed: Some(9),
            ..Default::default()
        };
        let merged = file.overridden_by(cli);
        assert_eq!(merged.pixels, Some(100));
        assert_eq!(merged.rng_seed, Some(9));
        assert!(matches!(merged.family, Some(SourceFamily::Spdc)));
        assert_eq!(merged.illumination.unwrap().values().unwrap().len(), 3);
    }
}
