//! Runtime configuration for the command-line tools.
//!
//! A config file is optional JSON; every field may be omitted and falls back
//! to the default. Numbers that feed exact arithmetic (the field discriminant)
//! are written as exact strings, matching every other file format in the
//! crate.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::{DEFAULT_EXPONENT_MAX, DEFAULT_PRECISION_CAP};
use crate::field::{format_rational, parse_rational, rat_i, FieldContext, Rational};

/// Environment variable naming the config file path.
pub const CONFIG_ENV_VAR: &str = "TRAPTILE_CONFIG";

/// Smallest permitted interval-refinement cap, matching the refinement
/// loop's starting precision.
pub const MIN_PRECISION_CAP: u32 = 128;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Discriminant of the quadratic field used when parsing irrational
    /// midlines; must be positive and not a perfect square.
    pub d: Rational,
    /// Hard ceiling for interval-refinement precision, in bits.
    pub precision_cap: u32,
    /// Largest exponent tried when searching for an exact power relation.
    pub e_max: u32,
    /// Directory receiving generated files.
    pub out_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            d: rat_i(2),
            precision_cap: DEFAULT_PRECISION_CAP,
            e_max: DEFAULT_EXPONENT_MAX,
            out_dir: PathBuf::from("."),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    d: Option<String>,
    precision_cap: Option<u32>,
    e_max: Option<u32>,
    out_dir: Option<String>,
}

impl Config {
    /// Parses a JSON config, filling omitted fields with defaults.
    pub fn from_json_str(text: &str) -> Result<Config, ConfigError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let mut config = Config::default();
        if let Some(d) = raw.d {
            config.d = parse_rational(&d).map_err(|e| ConfigError::Parse(e.to_string()))?;
        }
        if let Some(cap) = raw.precision_cap {
            config.precision_cap = cap;
        }
        if let Some(e_max) = raw.e_max {
            config.e_max = e_max;
        }
        if let Some(dir) = raw.out_dir {
            config.out_dir = PathBuf::from(dir);
        }
        config.validate()
    }

    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Loads the file named by `TRAPTILE_CONFIG`, or the defaults when the
    /// variable is unset.
    pub fn from_env() -> Result<Config, ConfigError> {
        match std::env::var_os(CONFIG_ENV_VAR) {
            Some(path) => Self::from_file(Path::new(&path)),
            None => Ok(Config::default()),
        }
    }

    fn validate(self) -> Result<Config, ConfigError> {
        if self.precision_cap < MIN_PRECISION_CAP {
            return Err(ConfigError::Invalid(format!(
                "precision_cap must be at least {MIN_PRECISION_CAP}, got {}",
                self.precision_cap
            )));
        }
        if self.e_max < 1 {
            return Err(ConfigError::Invalid("e_max must be at least 1".into()));
        }
        // Delegate the discriminant rules (positive, not a perfect square).
        FieldContext::new(self.d.clone())
            .map_err(|e| ConfigError::Invalid(format!("d = {}: {e}", format_rational(&self.d))))?;
        Ok(self)
    }

    /// The field context this config selects.
    pub fn context(&self) -> FieldContext {
        FieldContext::new(self.d.clone()).expect("validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ratio_i;

    #[test]
    fn defaults_are_valid_and_use_root_two() {
        let config = Config::default();
        assert_eq!(config.d, rat_i(2));
        assert_eq!(config.precision_cap, DEFAULT_PRECISION_CAP);
        assert_eq!(config.e_max, DEFAULT_EXPONENT_MAX);
        assert_eq!(config.context().d(), &rat_i(2));
    }

    #[test]
    fn partial_json_overrides_only_named_fields() {
        let config = Config::from_json_str(r#"{"d": "3", "out_dir": "figs"}"#).unwrap();
        assert_eq!(config.d, rat_i(3));
        assert_eq!(config.precision_cap, DEFAULT_PRECISION_CAP);
        assert_eq!(config.out_dir, PathBuf::from("figs"));
    }

    #[test]
    fn fractional_discriminants_parse_exactly() {
        let config = Config::from_json_str(r#"{"d": "5/4"}"#).unwrap();
        assert_eq!(config.d, ratio_i(5, 4));
    }

    #[test]
    fn validation_rejects_out_of_range_fields() {
        let e = Config::from_json_str(r#"{"precision_cap": 64}"#).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid(_)), "{e}");
        let e = Config::from_json_str(r#"{"e_max": 0}"#).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid(_)), "{e}");
        let e = Config::from_json_str(r#"{"d": "4"}"#).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid(_)), "{e}");
    }

    #[test]
    fn unknown_keys_and_bad_json_are_parse_errors() {
        let e = Config::from_json_str(r#"{"precison_cap": 256}"#).unwrap_err();
        assert!(matches!(e, ConfigError::Parse(_)), "{e}");
        let e = Config::from_json_str("{precision_cap").unwrap_err();
        assert!(matches!(e, ConfigError::Parse(_)), "{e}");
    }

    #[test]
    fn files_round_trip_through_the_loader() {
        let dir = std::env::temp_dir().join("traptile-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("config.json");
        std::fs::write(&path, r#"{"d": "5", "precision_cap": 512}"#).unwrap();
        let config = Config::from_file(&path).unwrap();
        assert_eq!(config.d, rat_i(5));
        assert_eq!(config.precision_cap, 512);
        std::fs::remove_file(&path).ok();
    }
}
