//! The utility and welfare model, unilateral and joint moves, and the
//! decomposition of arbitrary coalitions into basic ones.
//!
//! Agent `i` in coalition `C` gets the average weight towards the other
//! members, `sum_{j in C} w(i, j) / (|C| - 1)`. A lone agent gets 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::structure::CoalitionStructure;

pub(crate) fn check_compatible<S: Scalar>(
    g: &WeightedGraph<S>,
    c: &CoalitionStructure,
) -> Result<()> {
    if g.n() != c.n() {
        return Err(Error::InvalidPartition(format!(
            "partition has {} agents, graph has {}",
            c.n(),
            g.n()
        )));
    }
    Ok(())
}

/// Utility of `i` under `c`.
pub fn utility<S: Scalar>(g: &WeightedGraph<S>, c: &CoalitionStructure, i: usize) -> Result<S> {
    check_compatible(g, c)?;
    if i >= g.n() {
        return Err(Error::AgentOutOfRange { agent: i, n: g.n() });
    }
    let own = c.coalition_of(i);
    let size = c.assignment().iter().filter(|&&j| j == own).count();
    if size <= 1 {
        return Ok(S::zero());
    }
    let mut total = S::zero();
    for (j, w) in g.neighbors(i) {
        if c.coalition_of(*j) == own {
            total += w.clone();
        }
    }
    Ok(total / S::from_count(size - 1))
}

/// Utility every agent would get in coalition `members` formed on its own
/// (only edges inside `members` count).
pub fn utility_in_set<S: Scalar>(g: &WeightedGraph<S>, members: &[usize], i: usize) -> S {
    if members.len() <= 1 {
        return S::zero();
    }
    let mut total = S::zero();
    for &j in members {
        if j != i {
            if let Some(w) = g.weight(i, j) {
                total += w.clone();
            }
        }
    }
    total / S::from_count(members.len() - 1)
}

/// `2 W(E_C) / (|C| - 1)`, zero for singletons and the empty set.
pub fn coalition_welfare<S: Scalar>(g: &WeightedGraph<S>, members: &[usize]) -> Result<S> {
    if members.len() <= 1 {
        return Ok(S::zero());
    }
    let w = g.induced_edge_weight(members)?;
    Ok((w.clone() + w) / S::from_count(members.len() - 1))
}

/// Sum of all agents' utilities.
pub fn social_welfare<S: Scalar>(g: &WeightedGraph<S>, c: &CoalitionStructure) -> Result<S> {
    check_compatible(g, c)?;
    let mut total = S::zero();
    for (_, members) in c.coalitions() {
        total += coalition_welfare(g, &members)?;
    }
    Ok(total)
}

/// Moves agent `i` to coalition index `j`.
pub fn apply_move(c: &CoalitionStructure, i: usize, j: usize) -> Result<CoalitionStructure> {
    apply_joint_deviation(c, &[(i, j)])
}

/// Every listed agent lands in its target index; everyone else keeps theirs.
/// Targets are resolved against the post-deviation membership, so deviators
/// picking the same empty index end up together.
pub fn apply_joint_deviation(
    c: &CoalitionStructure,
    moves: &[(usize, usize)],
) -> Result<CoalitionStructure> {
    let n = c.n();
    let mut seen = vec![false; n];
    let mut out = c.clone();
    for &(i, j) in moves {
        if i >= n {
            return Err(Error::AgentOutOfRange { agent: i, n });
        }
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::DuplicateAgent(i));
        }
        out.set(i, j);
    }
    Ok(out)
}

/// Basic coalition shapes: a lone node, an edge, a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BasicCoalitionKind {
    K1,
    K2,
    K3,
}

/// Structural classification; edge weights are ignored.
pub fn classify_basic<S: Scalar>(
    g: &WeightedGraph<S>,
    set: &[usize],
) -> Option<BasicCoalitionKind> {
    match set {
        [_] => Some(BasicCoalitionKind::K1),
        [a, b] if g.has_edge(*a, *b) => Some(BasicCoalitionKind::K2),
        [a, b, c] if g.has_edge(*a, *b) && g.has_edge(*b, *c) && g.has_edge(*a, *c) => {
            Some(BasicCoalitionKind::K3)
        }
        _ => None,
    }
}

fn internal_edges<S: Scalar>(g: &WeightedGraph<S>, set: &[usize]) -> Vec<(usize, usize)> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    let mut edges = Vec::new();
    for (a, &u) in sorted.iter().enumerate() {
        for &v in &sorted[a + 1..] {
            if g.has_edge(u, v) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Edge of `G[set]` whose endpoints have the smallest total degree inside
/// `G[set]`; ties go to the lexicographically smallest `(i, j)`, `i < j`.
pub fn min_degree_sum_edge<S: Scalar>(
    g: &WeightedGraph<S>,
    set: &[usize],
) -> Result<(usize, usize)> {
    for &i in set {
        if i >= g.n() {
            return Err(Error::AgentOutOfRange { agent: i, n: g.n() });
        }
    }
    let edges = internal_edges(g, set);
    let mut degree = vec![0usize; g.n()];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    edges
        .into_iter()
        .min_by_key(|&(u, v)| (degree[u] + degree[v], u, v))
        .ok_or(Error::NoInternalEdge)
}

fn split_into_basic<S: Scalar>(g: &WeightedGraph<S>, set: &[usize], out: &mut Vec<Vec<usize>>) {
    let edges = internal_edges(g, set);
    match (set.len(), edges.len()) {
        (0, _) => {}
        (1, _) | (2, 1) | (3, 3) => out.push(set.to_vec()),
        (_, 0) => out.extend(set.iter().map(|&i| vec![i])),
        _ => {
            // Covers the 3-node one- and two-edge shapes as well as |set| >= 4.
            let (u, v) = min_degree_sum_edge(g, set).expect("set has an internal edge");
            out.push(vec![u, v]);
            let rest: Vec<usize> = set.iter().copied().filter(|&x| x != u && x != v).collect();
            split_into_basic(g, &rest, out);
        }
    }
}

/// Rewrites `c` so that every coalition is basic without lowering welfare.
/// Only defined for unweighted graphs.
pub fn decompose_to_basic<S: Scalar>(
    g: &WeightedGraph<S>,
    c: &CoalitionStructure,
) -> Result<CoalitionStructure> {
    check_compatible(g, c)?;
    if !g.is_unweighted() {
        return Err(Error::WeightedInput);
    }
    let mut parts = Vec::new();
    for (_, members) in c.coalitions() {
        split_into_basic(g, &members, &mut parts);
    }
    Ok(CoalitionStructure::from_coalitions(g.n(), &parts)?.normalized())
}
