//! Penalty values that may depend on the series length.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A literal penalty or a multiple of `log n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Penalty {
    Value(f64),
    LogN(f64),
}

impl Penalty {
    pub fn resolve(&self, n: usize) -> f64 {
        match *self {
            Penalty::Value(v) => v,
            Penalty::LogN(c) => c * (n as f64).ln(),
        }
    }
}

impl FromStr for Penalty {
    type Err = Error;

    /// Accepts numbers (`12.5`) and `log n` multiples (`logn`, `3logn`, `1.5logn`).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let bad = || Error::Config(format!("invalid penalty '{s}': expected a number or <c>logn"));
        let p = if let Some(coef) = t.strip_suffix("logn") {
            let coef = coef.trim().trim_end_matches('*');
            let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
            Penalty::LogN(c)
        } else {
            Penalty::Value(t.parse::<f64>().map_err(|_| bad())?)
        };
        let c = match p {
            Penalty::Value(v) | Penalty::LogN(v) => v,
        };
        if !c.is_finite() || c < 0.0 {
            return Err(bad());
        }
        Ok(p)
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Penalty::Value(v) => write!(f, "{v}"),
            Penalty::LogN(c) if *c == 1.0 => write!(f, "logn"),
            Penalty::LogN(c) => write!(f, "{c}logn"),
        }
    }
}
