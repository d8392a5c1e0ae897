//! Constructive algorithms and exhaustive enumeration.
//!
//! Only [`brute_force_optimum`] handles weighted optimum computation; the
//! complexity of that problem is open, so it stays exponential on purpose.

mod basic;
mod brute;
mod enumerate;
mod greedy;
mod strong_nash;

use serde::Serialize;

use crate::scalar::{text, Scalar};
use crate::stability::{StabilityKind, DEFAULT_GUARD_LIMIT};
use crate::structure::CoalitionStructure;

pub use basic::optimal_basic_partition;
pub use brute::brute_force_optimum;
pub use enumerate::enumerate_stable;
pub use greedy::{greedy_core, greedy_matching};
pub use strong_nash::strong_nash_from_optimum;

pub const DEFAULT_MAX_AGENTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// cap on `n` for exponential enumerations
    pub max_agents: usize,
    /// passed to the stability checks used for verification
    pub guard_limit: u64,
    /// run the exhaustive stability check on constructed outcomes
    pub verify: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_agents: DEFAULT_MAX_AGENTS,
            guard_limit: DEFAULT_GUARD_LIMIT,
            verify: true,
        }
    }
}

impl SolverOptions {
    pub(crate) fn check_options(&self) -> crate::stability::CheckOptions {
        crate::stability::CheckOptions {
            guard_limit: self.guard_limit,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    /// search nodes, partitions or subsets examined
    pub nodes: u64,
    /// greedy phases or polishing rounds, where applicable
    pub phases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct SolverReport<S> {
    pub structure: CoalitionStructure,
    #[serde(serialize_with = "text::serialize")]
    pub welfare: S,
    /// stability notions the structure was verified against
    pub verified: Vec<StabilityKind>,
    pub stats: SolverStats,
}

impl<S: Scalar> SolverReport<S> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
