//! Numeric abstraction shared by every game computation.
//!
//! All library code is written against [`Scalar`]. The crate-root alias
//! [`Rational`](crate::Rational) (arbitrary precision) is what the file
//! formats, the CLI and the experiment layer use; the float impls exist for
//! quick exploratory work where exact tie handling does not matter.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{NumAssign, Signed, ToPrimitive, Zero};

/// Numeric type usable as an edge weight, utility or welfare value.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + NumAssign + Signed + Send + Sync + 'static
{
    /// Exact conversion of a (small) count, used for coalition sizes.
    fn from_count(n: usize) -> Self;

    /// Builds `num/den`; `den` must be non-zero.
    fn from_fraction(num: i64, den: i64) -> Self;

    /// Parses an integer or `p/q` literal. Returns `None` on malformed input
    /// or a non-positive denominator.
    fn parse_text(text: &str) -> Option<Self>;

    /// Canonical text form: `p/q` in lowest terms, or `p` for integers.
    fn to_text(&self) -> String;

    fn to_f64(&self) -> f64;

    /// `true` when the value is exactly zero.
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

fn split_fraction(text: &str) -> Option<(&str, Option<&str>)> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    match text.split_once('/') {
        Some((p, q)) => Some((p.trim(), Some(q.trim()))),
        None => Some((text, None)),
    }
}

impl Scalar for BigRational {
    fn from_count(n: usize) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn parse_text(text: &str) -> Option<Self> {
        let (p, q) = split_fraction(text)?;
        let num = BigInt::from_str(p).ok()?;
        let den = match q {
            Some(q) => BigInt::from_str(q).ok()?,
            None => BigInt::from(1),
        };
        if den <= BigInt::zero() {
            return None;
        }
        Some(Ratio::new(num, den))
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for Ratio<i64> {
    fn from_count(n: usize) -> Self {
        Ratio::from_integer(n as i64)
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn parse_text(text: &str) -> Option<Self> {
        let (p, q) = split_fraction(text)?;
        let num: i64 = p.parse().ok()?;
        let den: i64 = match q {
            Some(q) => q.parse().ok()?,
            None => 1,
        };
        if den <= 0 {
            return None;
        }
        Some(Ratio::new(num, den))
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_count(n: usize) -> Self {
                n as $t
            }

            fn from_fraction(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }

            fn parse_text(text: &str) -> Option<Self> {
                let (p, q) = split_fraction(text)?;
                let num: $t = p.parse().ok()?;
                match q {
                    Some(q) => {
                        let den: $t = q.parse().ok()?;
                        (den > 0.0).then(|| num / den)
                    }
                    None => Some(num),
                }
            }

            fn to_text(&self) -> String {
                self.to_string()
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

/// Serde helpers that write scalars as their canonical text form.
pub(crate) mod text {
    use super::Scalar;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Scalar, Ser: Serializer>(v: &S, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        ser.serialize_str(&v.to_text())
    }

    pub fn serialize_vec<S: Scalar, Ser: Serializer>(
        v: &[S],
        ser: Ser,
    ) -> Result<Ser::Ok, Ser::Error> {
        let mut seq = ser.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_text())?;
        }
        seq.end()
    }

    pub fn serialize_opt<S: Scalar, Ser: Serializer>(
        v: &Option<S>,
        ser: Ser,
    ) -> Result<Ser::Ok, Ser::Error> {
        match v {
            Some(x) => ser.serialize_str(&x.to_text()),
            None => ser.serialize_none(),
        }
    }
}
