use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::DeviationMode;
use crate::error::Error;

/// A stability notion, written `nash`, `kstrong(<k>)`, `kstrong(n)`,
/// `relaxed-kstrong(<k>)`, `core` or `strict-core`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityKind {
    Nash,
    /// `k: None` means `k = n` for whatever instance it is applied to.
    KStrong {
        k: Option<usize>,
        mode: DeviationMode,
    },
    Core,
    StrictCore,
}

impl StabilityKind {
    pub fn strong(k: usize) -> Self {
        StabilityKind::KStrong {
            k: Some(k),
            mode: DeviationMode::Strict,
        }
    }

    pub fn strong_n() -> Self {
        StabilityKind::KStrong {
            k: None,
            mode: DeviationMode::Strict,
        }
    }
}

impl fmt::Display for StabilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityKind::Nash => f.write_str("nash"),
            StabilityKind::Core => f.write_str("core"),
            StabilityKind::StrictCore => f.write_str("strict-core"),
            StabilityKind::KStrong { k, mode } => {
                if *mode == DeviationMode::Relaxed {
                    f.write_str("relaxed-")?;
                }
                match k {
                    Some(k) => write!(f, "kstrong({k})"),
                    None => f.write_str("kstrong(n)"),
                }
            }
        }
    }
}

impl FromStr for StabilityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Config(format!("unknown stability kind `{s}`"));
        match s.trim() {
            "nash" => return Ok(StabilityKind::Nash),
            "core" => return Ok(StabilityKind::Core),
            "strict-core" => return Ok(StabilityKind::StrictCore),
            _ => {}
        }
        let (mode, rest) = match s.trim().strip_prefix("relaxed-") {
            Some(rest) => (DeviationMode::Relaxed, rest),
            None => (DeviationMode::Strict, s.trim()),
        };
        let arg = rest
            .strip_prefix("kstrong(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let k = match arg {
            "n" => None,
            k => Some(k.parse::<usize>().ok().filter(|&k| k > 0).ok_or_else(bad)?),
        };
        Ok(StabilityKind::KStrong { k, mode })
    }
}

impl Serialize for StabilityKind {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StabilityKind {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
