use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{text, Scalar};
use crate::solvers::{brute_force_optimum, enumerate_stable, SolverOptions};
use crate::stability::StabilityKind;
use crate::{Graph, Rational};

/// Optimum-to-stable welfare ratio; infinite when a stable outcome has
/// welfare 0 but the optimum does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatioValue {
    Finite(Rational),
    Infinite,
}

impl RatioValue {
    /// `optimum / welfare`, with `0 / 0 = 1`.
    pub fn of(optimum: &Rational, welfare: &Rational) -> Self {
        if welfare.is_zero() {
            if optimum.is_zero() {
                RatioValue::Finite(Rational::one())
            } else {
                RatioValue::Infinite
            }
        } else {
            RatioValue::Finite(optimum / welfare)
        }
    }
}

impl PartialOrd for RatioValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RatioValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (RatioValue::Finite(a), RatioValue::Finite(b)) => a.cmp(b),
            (RatioValue::Finite(_), RatioValue::Infinite) => Ordering::Less,
            (RatioValue::Infinite, RatioValue::Finite(_)) => Ordering::Greater,
            (RatioValue::Infinite, RatioValue::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for RatioValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioValue::Finite(r) => f.write_str(&r.to_text()),
            RatioValue::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for RatioValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "inf" {
            return Ok(RatioValue::Infinite);
        }
        Rational::parse_text(s)
            .map(RatioValue::Finite)
            .ok_or_else(|| Error::Config(format!("bad ratio `{s}`")))
    }
}

impl Serialize for RatioValue {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RatioValue {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Int(i) => Ok(RatioValue::Finite(Rational::from_integer(i.into()))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Exact price-of-anarchy / price-of-stability measurement for one notion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub kind: StabilityKind,
    pub n: usize,
    #[serde(serialize_with = "text::serialize")]
    pub optimum: Rational,
    pub stable_count: usize,
    pub exists: bool,
    #[serde(serialize_with = "text::serialize_opt")]
    pub best_welfare: Option<Rational>,
    #[serde(serialize_with = "text::serialize_opt")]
    pub worst_welfare: Option<Rational>,
    /// optimum over the worst stable welfare
    pub poa: Option<RatioValue>,
    /// optimum over the best stable welfare
    pub pos: Option<RatioValue>,
}

/// Enumerates every stable outcome of `kind` and compares it with the
/// optimum. Without stable outcomes the ratios are absent and `exists` is
/// false.
pub fn measure_ratios(
    g: &Graph,
    kind: StabilityKind,
    options: &SolverOptions,
) -> Result<RatioReport> {
    let optimum = brute_force_optimum(g, options)?.welfare;
    let stable = enumerate_stable(g, kind, options)?;
    let best = stable.iter().map(|r| &r.welfare).max().cloned();
    let worst = stable.iter().map(|r| &r.welfare).min().cloned();
    Ok(RatioReport {
        kind,
        n: g.n(),
        stable_count: stable.len(),
        exists: !stable.is_empty(),
        poa: worst.as_ref().map(|w| RatioValue::of(&optimum, w)),
        pos: best.as_ref().map(|w| RatioValue::of(&optimum, w)),
        best_welfare: best,
        worst_welfare: worst,
        optimum,
    })
}
