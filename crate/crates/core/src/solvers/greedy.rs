use super::{SolverOptions, SolverReport, SolverStats};
use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::stability::{Checker, StabilityKind};
use crate::structure::CoalitionStructure;

/// Edges picked by the heaviest-edge rule, in phase order.
///
/// Negative edges are dropped first. Each phase takes a maximum-weight edge
/// whose endpoints are both still unmatched (lexicographically smallest on
/// ties) and removes its endpoints.
pub fn greedy_matching<S: Scalar>(g: &WeightedGraph<S>) -> Vec<(usize, usize, S)> {
    let mut edges: Vec<&(usize, usize, S)> =
        g.edges().iter().filter(|e| e.2 >= S::zero()).collect();
    edges.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .expect("comparable weights")
            .then((a.0, a.1).cmp(&(b.0, b.1)))
    });
    let mut used = vec![false; g.n()];
    let mut picked = Vec::new();
    for (u, v, w) in edges {
        if !used[*u] && !used[*v] {
            used[*u] = true;
            used[*v] = true;
            picked.push((*u, *v, w.clone()));
        }
    }
    picked
}

/// Core-stable outcome with at least half the optimal welfare: the greedy
/// matching's pairs, everyone else alone.
///
/// With `options.verify` the result is also run through the exhaustive core
/// check when it fits the guard; a failure there would be a bug.
pub fn greedy_core<S: Scalar>(
    g: &WeightedGraph<S>,
    options: &SolverOptions,
) -> Result<SolverReport<S>> {
    let n = g.n();
    let picked = greedy_matching(g);
    let mut parts: Vec<Vec<usize>> = picked.iter().map(|(u, v, _)| vec![*u, *v]).collect();
    let mut paired = vec![false; n];
    for (u, v, _) in &picked {
        paired[*u] = true;
        paired[*v] = true;
    }
    parts.extend((0..n).filter(|&i| !paired[i]).map(|i| vec![i]));
    let structure = CoalitionStructure::from_coalitions(n, &parts)?.normalized();
    let welfare = crate::game::social_welfare(g, &structure)?;
    let mut verified = Vec::new();
    if options.verify {
        let checker = Checker::with_options(g, options.check_options());
        match checker.core(&structure) {
            Ok(s) if s.is_stable() => verified.push(StabilityKind::Core),
            Ok(s) => {
                return Err(crate::Error::VerificationFailed(format!(
                    "greedy outcome has a blocking coalition {:?}",
                    s.witness().map(|w| &w.agents)
                )))
            }
            Err(e) if e.is_limit() => {}
            Err(e) => return Err(e),
        }
    }
    Ok(SolverReport {
        structure,
        welfare,
        verified,
        stats: SolverStats {
            nodes: g.edge_count() as u64,
            phases: picked.len(),
        },
    })
}
