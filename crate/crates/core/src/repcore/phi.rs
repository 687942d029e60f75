use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Relative slack required before a float comparison counts as a strict win.
pub const DENSITY_MARGIN: f64 = 1e-9;

/// The control function `φ`, drawn from a small closed family of
/// nonnegative functions that tend to infinity.
///
/// String forms: `log2` is `log₂(x+2)`, `ln` is `ln(x+2)`, `pow:<e>` is
/// `x^e` with `0 < e < 1/2`, `clog:<c>` is `c·ln(x+2)` with `c > 0`.
/// Parameters accept decimal, scientific or `p/q` notation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    Log2,
    Ln,
    Pow(f64),
    CLog(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhiParseError {
    #[error("unknown phi {0:?}; expected log2, ln, pow:<eps> or clog:<c>")]
    Unknown(String),
    #[error("bad numeric parameter {0:?}")]
    BadParameter(String),
    #[error("pow exponent must satisfy 0 < eps < 1/2, got {0}")]
    ExponentOutOfRange(String),
    #[error("clog coefficient must be positive and finite, got {0}")]
    CoefficientOutOfRange(String),
}

impl Phi {
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match *self {
            Phi::Log2 => (x + 2.0).log2(),
            Phi::Ln => (x + 2.0).ln(),
            Phi::Pow(e) => x.powf(e),
            Phi::CLog(c) => c * (x + 2.0).ln(),
        }
    }

    pub fn eval_int(&self, x: i128) -> f64 {
        self.eval(x as f64)
    }
}

fn parse_param(text: &str) -> Result<f64, PhiParseError> {
    let bad = || PhiParseError::BadParameter(text.to_string());
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            p / q
        }
        None => text.trim().parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

impl FromStr for Phi {
    type Err = PhiParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once(':') {
            None if s == "log2" => Ok(Phi::Log2),
            None if s == "ln" => Ok(Phi::Ln),
            Some(("pow", p)) => {
                let e = parse_param(p)?;
                if e > 0.0 && e < 0.5 {
                    Ok(Phi::Pow(e))
                } else {
                    Err(PhiParseError::ExponentOutOfRange(p.to_string()))
                }
            }
            Some(("clog", p)) => {
                let c = parse_param(p)?;
                if c > 0.0 {
                    Ok(Phi::CLog(c))
                } else {
                    Err(PhiParseError::CoefficientOutOfRange(p.to_string()))
                }
            }
            _ => Err(PhiParseError::Unknown(s.to_string())),
        }
    }
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::Log2 => write!(f, "log2"),
            Phi::Ln => write!(f, "ln"),
            Phi::Pow(e) => write!(f, "pow:{e}"),
            Phi::CLog(c) => write!(f, "clog:{c}"),
        }
    }
}

impl Serialize for Phi {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Phi {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `√x / φ(x)`; infinite where `φ(x) = 0`.
pub fn density_bound(x: i128, phi: &Phi) -> f64 {
    let p = phi.eval_int(x);
    if p > 0.0 {
        (x.max(0) as f64).sqrt() / p
    } else {
        f64::INFINITY
    }
}

/// `count > √x / φ(x)`, requiring the win to clear [`DENSITY_MARGIN`]
/// (relative to the bound, absolute below 1) so float rounding cannot
/// manufacture a pass.
pub fn exceeds_density_bound(count: usize, x: i128, phi: &Phi) -> bool {
    let bound = density_bound(x, phi);
    bound.is_finite() && count as f64 - bound > DENSITY_MARGIN * bound.max(1.0)
}
