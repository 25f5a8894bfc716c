use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use koszul_core::FieldSpec;
use serde_json::{json, Value};

/// `rational` or `fp:P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldArg(pub FieldSpec);

impl FromStr for FieldArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" | "rationals" | "q" => Ok(FieldArg(FieldSpec::Rationals)),
            _ => {
                let p = s
                    .strip_prefix("fp:")
                    .ok_or_else(|| format!("expected `rational` or `fp:P`, got {s:?}"))?;
                let p: u64 = p.parse().map_err(|e| format!("bad prime {p:?}: {e}"))?;
                FieldSpec::prime_field(p).map(FieldArg).map_err(|e| e.to_string())
            }
        }
    }
}

impl fmt::Display for FieldArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            FieldSpec::Rationals => write!(f, "rational"),
            FieldSpec::PrimeField(p) => write!(f, "fp:{p}"),
        }
    }
}

/// `auto` or a weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxWeight {
    Auto,
    Fixed(usize),
}

impl FromStr for MaxWeight {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(MaxWeight::Auto),
            n => n
                .parse()
                .map(MaxWeight::Fixed)
                .map_err(|_| format!("expected `auto` or a nonnegative integer, got {s:?}")),
        }
    }
}

impl MaxWeight {
    pub fn resolve(self, auto: usize) -> usize {
        match self {
            MaxWeight::Auto => auto,
            MaxWeight::Fixed(n) => n,
        }
    }

    fn to_json(self) -> Value {
        match self {
            MaxWeight::Auto => json!("auto"),
            MaxWeight::Fixed(n) => json!(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub field: FieldArg,
    pub max_weight: MaxWeight,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    /// At least 1.
    pub jobs: usize,
}

impl RunConfig {
    /// The part of the configuration that can change a report's content.
    pub fn echo(&self) -> Value {
        json!({ "field": self.field.to_string(), "max_weight": self.max_weight.to_json() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fields_and_weights() {
        assert_eq!("rational".parse::<FieldArg>().unwrap().0, FieldSpec::Rationals);
        assert_eq!("fp:7".parse::<FieldArg>().unwrap().0, FieldSpec::PrimeField(7));
        assert!("fp:8".parse::<FieldArg>().is_err());
        assert!("real".parse::<FieldArg>().is_err());
        assert_eq!("auto".parse::<MaxWeight>().unwrap(), MaxWeight::Auto);
        assert_eq!("3".parse::<MaxWeight>().unwrap().resolve(9), 3);
        assert_eq!(MaxWeight::Auto.resolve(9), 9);
    }
}
