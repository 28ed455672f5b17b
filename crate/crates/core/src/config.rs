//! Flat `key = value` configuration. Command-line flags override file values.

use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::galois::{CertifyParams, DensityParams};
use crate::harness::CountParams;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("bad value for {key}: {value:?}")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config: {0}")]
    Io(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub enumeration_cap: u64,
    pub splitting_cap: u64,
    pub box_cap: u128,
    pub term_cap: usize,
    /// primes per statistical certification
    pub samples: usize,
    pub tau: f64,
    pub seed: u64,
    /// 0 = available parallelism
    pub workers: usize,
    pub exhaustive_cap: u64,
    pub density_samples: usize,
    pub shape: Option<String>,
    pub out: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        let c = CertifyParams::default();
        let d = DensityParams::default();
        Config {
            enumeration_cap: c.enumeration_cap,
            splitting_cap: c.splitting_cap,
            box_cap: crate::heights::DEFAULT_BOX_CAP,
            term_cap: crate::composer::DEFAULT_TERM_CAP,
            samples: c.sample_primes,
            tau: c.tau,
            seed: 0,
            workers: 0,
            exhaustive_cap: d.exhaustive_cap,
            density_samples: d.samples,
            shape: None,
            out: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    let v = value.replace('_', "");
    v.parse::<T>()
        .or_else(|_| {
            // allow 1e6 style integers
            v.parse::<f64>()
                .ok()
                .filter(|f| f.fract() == 0.0 && *f >= 0.0)
                .and_then(|f| format!("{}", f as u128).parse::<T>().ok())
                .ok_or(())
        })
        .map_err(|_| ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        })
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
        let mut cfg = Config::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "enumeration_cap" => self.enumeration_cap = parse(key, value)?,
            "splitting_cap" => self.splitting_cap = parse(key, value)?,
            "box_cap" => self.box_cap = parse(key, value)?,
            "term_cap" => self.term_cap = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "tau" => self.tau = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            "exhaustive_cap" => self.exhaustive_cap = parse(key, value)?,
            "density_samples" => self.density_samples = parse(key, value)?,
            "shape" => self.shape = Some(value.to_string()),
            "out" => self.out = Some(value.to_string()),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.enumeration_cap == 0
            || self.splitting_cap == 0
            || self.box_cap == 0
            || self.term_cap == 0
            || self.samples == 0
            || self.exhaustive_cap == 0
            || self.density_samples == 0
        {
            return Err(ConfigError::Invalid("caps and sample sizes must be positive".into()));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(ConfigError::Invalid(format!("tau must lie in (0,1), got {}", self.tau)));
        }
        Ok(())
    }

    pub fn certify_params(&self) -> CertifyParams {
        CertifyParams {
            splitting_cap: self.splitting_cap,
            enumeration_cap: self.enumeration_cap,
            sample_primes: self.samples,
            tau: self.tau,
            seed: self.seed,
        }
    }

    pub fn density_params(&self) -> DensityParams {
        DensityParams {
            certify: self.certify_params(),
            exhaustive_cap: self.exhaustive_cap,
            samples: self.density_samples,
            seed: self.seed,
        }
    }

    pub fn count_params(&self) -> CountParams {
        CountParams {
            certify: self.certify_params(),
            permute: None,
            box_cap: self.box_cap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let mut c = Config::default();
        c.apply_text("# caps\nbox_cap = 1e6\ntau=0.3\nshape = 2,2 # inline\n").unwrap();
        assert_eq!(c.box_cap, 1_000_000);
        assert_eq!(c.tau, 0.3);
        assert_eq!(c.shape.as_deref(), Some("2,2"));
        assert_eq!(c.clone().apply_text("tau = 1.5"), Err(ConfigError::Invalid("tau must lie in (0,1), got 1.5".into())));
        assert!(matches!(c.clone().apply_text("nope = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(c.clone().apply_text("box_cap"), Err(ConfigError::Syntax { line: 1 })));
        assert!(c.apply_text("splitting_cap = 0").is_err());
    }
}
