//! Rate and frequency arguments: plain SI values in rad/s, or multiples of
//! γ₀ written with a `g0` suffix (`0.9g0`).

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    Absolute(f64),
    Gamma0(f64),
}

impl Rate {
    pub fn resolve(self, gamma0: f64) -> f64 {
        match self {
            Rate::Absolute(v) => v,
            Rate::Gamma0(f) => f * gamma0,
        }
    }
}

impl FromStr for Rate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (num, relative) = match t.strip_suffix("g0") {
            Some(head) => (head.trim(), true),
            None => (t, false),
        };
        let v = if relative && num.is_empty() {
            1.0
        } else {
            num.parse::<f64>().map_err(|_| format!("invalid rate '{s}' (expected e.g. 1.2e5 or 0.9g0)"))?
        };
        if !v.is_finite() || v < 0.0 {
            return Err(format!("rate '{s}' must be finite and non-negative"));
        }
        Ok(if relative { Rate::Gamma0(v) } else { Rate::Absolute(v) })
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Absolute(v) => write!(f, "{v}"),
            Rate::Gamma0(v) => write!(f, "{v}g0"),
        }
    }
}
