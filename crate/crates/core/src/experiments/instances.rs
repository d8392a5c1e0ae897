use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::{Graph, Rational};

/// Named instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// centre 0, a unit edge to 1, edges of weight `eps` to 2..n
    StarEps,
    /// clique on `0..k`, matched to `k..2k`, all of which see node `2k`
    LayeredClique,
    PathUnweighted,
    /// four agents with no Nash stable outcome
    NegativeNoNash,
    /// eight agents with a cycle of best responses
    InfiniteDynamics,
    /// path with weights 1, 1 + eps/2, 1
    CposPath,
    /// Erdős–Rényi graph with weights drawn from a finite set
    RandomEr,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::StarEps,
        Family::LayeredClique,
        Family::PathUnweighted,
        Family::NegativeNoNash,
        Family::InfiniteDynamics,
        Family::CposPath,
        Family::RandomEr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::StarEps => "star_eps",
            Family::LayeredClique => "layered_clique",
            Family::PathUnweighted => "path_unweighted",
            Family::NegativeNoNash => "negative_no_nash",
            Family::InfiniteDynamics => "infinite_dynamics",
            Family::CposPath => "cpos_path",
            Family::RandomEr => "random_er",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Accepts `star_eps` as well as `star-eps`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == wanted)
            .ok_or_else(|| Error::Config(format!("unknown family `{s}`")))
    }
}

/// Exact rational parameter; written as `"p/q"` and read from a string or
/// an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalParam(pub Rational);

impl Serialize for RationalParam {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.0.to_text())
    }
}

impl<'de> Deserialize<'de> for RationalParam {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        let text = match Raw::deserialize(de)? {
            Raw::Int(i) => i.to_string(),
            Raw::Text(s) => s,
        };
        Rational::parse_text(&text)
            .map(RationalParam)
            .ok_or_else(|| serde::de::Error::custom(format!("bad rational `{text}`")))
    }
}

impl FromStr for RationalParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rational::parse_text(s)
            .map(RationalParam)
            .ok_or_else(|| Error::InvalidParams(format!("bad rational `{s}`")))
    }
}

/// Family parameters; each family reads only the fields it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<RationalParam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<RationalParam>,
    /// edge probability for `random_er`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// weight set for `random_er`, drawn uniformly
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<RationalParam>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    #[serde(default)]
    pub params: Params,
}

pub const DEFAULT_M: i64 = 1000;
pub const DEFAULT_P: f64 = 0.5;

fn need(value: Option<usize>, name: &str, family: Family) -> Result<usize> {
    value.ok_or_else(|| Error::InvalidParams(format!("{family} needs `{name}`")))
}

/// Builds the graph of `spec`. `random_er` is reproducible from its seed.
pub fn generate(spec: &InstanceSpec) -> Result<Graph> {
    let p = &spec.params;
    let family = spec.family;
    let r = |x: i64| Rational::from_integer(x.into());
    match family {
        Family::StarEps => {
            let n = need(p.n, "n", family)?;
            if n < 3 {
                return Err(Error::InvalidParams("star_eps needs n >= 3".into()));
            }
            let eps = match &p.eps {
                Some(e) => e.0.clone(),
                None => Rational::from_fraction(1, 2 * n as i64),
            };
            if !(eps > Rational::zero() && eps < Rational::from_fraction(1, n as i64)) {
                return Err(Error::InvalidParams(format!(
                    "star_eps needs 0 < eps < 1/n, got {}",
                    eps.to_text()
                )));
            }
            let mut edges = vec![(0, 1, Rational::one())];
            edges.extend((2..n).map(|j| (0, j, eps.clone())));
            Graph::new(n, edges)
        }
        Family::LayeredClique => {
            let k = need(p.k, "k", family)?;
            if k < 2 {
                return Err(Error::InvalidParams("layered_clique needs k >= 2".into()));
            }
            let mut edges = Vec::new();
            for a in 0..k {
                for b in a + 1..k {
                    edges.push((a, b));
                }
                edges.push((a, k + a));
                edges.push((k + a, 2 * k));
            }
            Graph::unweighted(2 * k + 1, edges)
        }
        Family::PathUnweighted => {
            let n = need(p.n, "n", family)?;
            if n == 0 {
                return Err(Error::InvalidParams("path_unweighted needs n >= 1".into()));
            }
            Graph::unweighted(n, (1..n).map(|i| (i - 1, i)))
        }
        Family::NegativeNoNash => {
            let m = p.m.as_ref().map_or_else(|| r(DEFAULT_M), |m| m.0.clone());
            if m <= Rational::zero() {
                return Err(Error::InvalidParams("negative_no_nash needs m > 0".into()));
            }
            Graph::new(4, [(0, 1, r(10)), (1, 2, r(10)), (1, 3, r(1)), (0, 2, -m)])
        }
        Family::InfiniteDynamics => {
            Graph::unweighted(8, [(0, 6), (5, 7), (0, 5), (1, 5), (2, 5), (3, 5), (4, 5)])
        }
        Family::CposPath => {
            let eps = match &p.eps {
                Some(e) => e.0.clone(),
                None => Rational::from_fraction(1, 8),
            };
            if eps <= Rational::zero() {
                return Err(Error::InvalidParams("cpos_path needs eps > 0".into()));
            }
            let middle = Rational::one() + eps / r(2);
            Graph::new(4, [(0, 1, r(1)), (1, 2, middle), (2, 3, r(1))])
        }
        Family::RandomEr => {
            let n = need(p.n, "n", family)?;
            let seed = p
                .seed
                .ok_or_else(|| Error::InvalidParams("random_er needs `seed`".into()))?;
            let prob = p.p.unwrap_or(DEFAULT_P);
            if !(0.0..=1.0).contains(&prob) {
                return Err(Error::InvalidParams(format!(
                    "edge probability {prob} not in [0, 1]"
                )));
            }
            let weights: Vec<Rational> = match &p.weights {
                Some(w) if w.is_empty() => {
                    return Err(Error::InvalidParams("empty weight set".into()))
                }
                Some(w) => w.iter().map(|x| x.0.clone()).collect(),
                None => vec![Rational::one()],
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(prob) {
                        let w = weights[rng.gen_range(0..weights.len())].clone();
                        edges.push((u, v, w));
                    }
                }
            }
            Graph::new(n, edges)
        }
    }
}

/// Integer weight set `{lo, ..., hi}`.
pub fn integer_weights(lo: i64, hi: i64) -> Vec<RationalParam> {
    (lo..=hi)
        .map(|x| RationalParam(Rational::from_integer(x.into())))
        .collect()
}
