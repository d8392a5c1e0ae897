use super::{SolverOptions, SolverReport, SolverStats};
use crate::error::{Error, Result};
use crate::game::social_welfare;
use crate::graph::WeightedGraph;
use crate::partitions::all_structures;
use crate::scalar::Scalar;
use crate::stability::{Checker, StabilityKind};

/// Every partition (in restricted-growth order) that is stable for `kind`.
/// An empty result certifies that no stable outcome exists.
pub fn enumerate_stable<S: Scalar>(
    g: &WeightedGraph<S>,
    kind: StabilityKind,
    options: &SolverOptions,
) -> Result<Vec<SolverReport<S>>> {
    let n = g.n();
    if n > options.max_agents {
        return Err(Error::CapExceeded {
            n,
            cap: options.max_agents,
        });
    }
    let checker = Checker::with_options(g, options.check_options());
    let mut out = Vec::new();
    for (t, c) in all_structures(n).enumerate() {
        if checker.check(&c, kind)?.is_stable() {
            out.push(SolverReport {
                welfare: social_welfare(g, &c)?,
                structure: c,
                verified: vec![kind],
                stats: SolverStats {
                    nodes: t as u64 + 1,
                    phases: 0,
                },
            });
        }
    }
    Ok(out)
}
