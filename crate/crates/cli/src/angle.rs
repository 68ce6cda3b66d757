//! Angle arguments: `105deg`, `1.83rad`, or a bare number in degrees.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An angle held in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleParseError(String);

impl fmt::Display for AngleParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid angle {:?}: expected a number with optional suffix deg or rad", self.0)
    }
}

impl std::error::Error for AngleParseError {}

impl FromStr for Angle {
    type Err = AngleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (num, radians) = if let Some(n) = t.strip_suffix("rad") {
            (n, true)
        } else if let Some(n) = t.strip_suffix("deg") {
            (n, false)
        } else {
            (t, false)
        };
        let v: f64 = num.trim().parse().map_err(|_| AngleParseError(s.into()))?;
        if !v.is_finite() {
            return Err(AngleParseError(s.into()));
        }
        Ok(Angle(if radians { v } else { v.to_radians() }))
    }
}

/// Parses a comma-separated list of exactly `N` angles.
pub fn parse_angles<const N: usize>(s: &str) -> Result<[Angle; N], AngleParseError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(AngleParseError(s.into()));
    }
    let mut out = [Angle(0.0); N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse()?;
    }
    Ok(out)
}

/// In JSON a number is taken as radians, the unit of every file format, and
/// a string is parsed like a command-line argument.
impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Angle(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}
