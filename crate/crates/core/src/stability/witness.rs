use serde::Serialize;

use crate::scalar::{text, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    Unilateral,
    Joint,
    BlockingCoalition,
}

/// Certificate that a coalition structure is not stable.
///
/// For unilateral and joint deviations `targets[t]` is the coalition index
/// chosen by `agents[t]`; replaying them with
/// [`apply_joint_deviation`](crate::game::apply_joint_deviation) reproduces
/// `after`. For a blocking coalition `targets` is the member set `T` itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct DeviationWitness<S> {
    pub kind: WitnessKind,
    pub agents: Vec<usize>,
    pub targets: Vec<usize>,
    #[serde(serialize_with = "text::serialize_vec")]
    pub before: Vec<S>,
    #[serde(serialize_with = "text::serialize_vec")]
    pub after: Vec<S>,
}

/// Outcome of a stability check.
#[derive(Debug, Clone, PartialEq)]
pub enum Stability<S> {
    Stable,
    Unstable(DeviationWitness<S>),
}

impl<S> Stability<S> {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stability::Stable)
    }

    pub fn witness(&self) -> Option<&DeviationWitness<S>> {
        match self {
            Stability::Stable => None,
            Stability::Unstable(w) => Some(w),
        }
    }

    pub fn into_witness(self) -> Option<DeviationWitness<S>> {
        match self {
            Stability::Stable => None,
            Stability::Unstable(w) => Some(w),
        }
    }
}

impl<S> From<Option<DeviationWitness<S>>> for Stability<S> {
    fn from(w: Option<DeviationWitness<S>>) -> Self {
        match w {
            Some(w) => Stability::Unstable(w),
            None => Stability::Stable,
        }
    }
}

/// How deviating agents must fare for a joint deviation to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviationMode {
    /// every deviator strictly better off
    #[default]
    Strict,
    /// nobody worse off, somebody strictly better off
    Relaxed,
}

/// Strong blocking (everyone strictly better) defines the core; weak
/// blocking (nobody worse, someone better) defines the strict core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockingMode {
    Strong,
    Weak,
}

pub const DEFAULT_GUARD_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Abort a check (with [`Error::GuardExceeded`](crate::Error::GuardExceeded))
    /// once it has examined this many candidate deviations.
    pub guard_limit: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            guard_limit: DEFAULT_GUARD_LIMIT,
        }
    }
}
