use std::collections::{BTreeMap, VecDeque};

use super::{optimal_basic_partition, SolverOptions, SolverReport, SolverStats};
use crate::dynamics::residual_congestion_dynamics_from;
use crate::error::{Error, Result};
use crate::game::{apply_move, classify_basic, social_welfare, BasicCoalitionKind};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::stability::{Checker, StabilityKind};
use crate::structure::CoalitionStructure;

/// Strong Nash stable outcome with optimal welfare on an unweighted graph.
///
/// Starting from an optimal basic partition, every lone agent that can
/// improve joins its best coalition, which turns some edges into stars.
/// Each edge coalition keeps one anchor: the star centre, else the member
/// first reached by a search from the lone agents through partners of
/// anchors, else the lower id. All other edge members and all formerly lone
/// agents then redistribute over adjacent anchors by congestion dynamics
/// started from the current assignment, where an agent's cost is the size
/// of the star it is in. Triangles are untouched.
///
/// The result is checked against optimal welfare always, and against
/// `kstrong(n)` when `options.verify` is set and the check fits the guard.
/// Either failing is reported as [`Error::VerificationFailed`].
pub fn strong_nash_from_optimum<S: Scalar>(
    g: &WeightedGraph<S>,
    options: &SolverOptions,
) -> Result<SolverReport<S>> {
    let optimum = optimal_basic_partition(g)?;
    let n = g.n();
    let base = optimum.structure.clone();
    let checker = Checker::with_options(g, options.check_options());

    let mut kinds = BTreeMap::new();
    for (j, members) in base.coalitions() {
        kinds.insert(
            j,
            classify_basic(g, &members).expect("optimal partition is basic"),
        );
    }
    let lone: Vec<usize> = (0..n)
        .filter(|&i| kinds[&base.coalition_of(i)] == BasicCoalitionKind::K1)
        .collect();

    let mut current = base.clone();
    for &i in &lone {
        let target = checker.best_response(&current, i)?;
        if target != current.coalition_of(i) {
            current = apply_move(&current, i, target)?;
        }
    }

    // Anchor of each edge coalition: the centre if lone agents joined it,
    // otherwise the member first reached from an agent that may roam.
    let mut partner = vec![None; n];
    let mut anchor_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (&j, kind) in &kinds {
        if *kind != BasicCoalitionKind::K2 {
            continue;
        }
        let pair = base.members(j);
        partner[pair[0]] = Some(pair[1]);
        partner[pair[1]] = Some(pair[0]);
        let joined: Vec<usize> = current
            .members(j)
            .into_iter()
            .filter(|x| !pair.contains(x))
            .collect();
        if !joined.is_empty() {
            let centre = pair
                .iter()
                .copied()
                .find(|&a| joined.iter().all(|&x| g.has_edge(a, x)))
                .unwrap_or(pair[0]);
            anchor_of.insert(j, centre);
        }
    }
    let mut queue: VecDeque<usize> = lone.iter().copied().collect();
    queue.extend(anchor_of.values().filter_map(|&a| partner[a]));
    while let Some(f) = queue.pop_front() {
        for (v, _) in g.neighbors(f) {
            let j = base.coalition_of(*v);
            if let Some(u) = partner[*v] {
                if u != f && !anchor_of.contains_key(&j) {
                    anchor_of.insert(j, *v);
                    queue.push_back(u);
                }
            }
        }
    }
    for (&j, kind) in &kinds {
        if *kind == BasicCoalitionKind::K2 {
            anchor_of.entry(j).or_insert_with(|| base.members(j)[0]);
        }
    }
    let mut anchors: Vec<usize> = anchor_of.values().copied().collect();
    anchors.sort_unstable();
    let mut leftovers = lone.clone();
    leftovers.extend(anchors.iter().filter_map(|&a| partner[a]));
    leftovers.sort_unstable();

    let mut allowed = BTreeMap::new();
    let mut start = BTreeMap::new();
    let mut alone = Vec::new();
    for &x in &leftovers {
        let near: Vec<usize> = anchors
            .iter()
            .copied()
            .filter(|&a| g.has_edge(a, x))
            .collect();
        if near.is_empty() {
            alone.push(x);
            continue;
        }
        // partners start with their own anchor, lone agents where they went
        let here = match partner[x] {
            Some(a) => a,
            None => anchor_of
                .get(&current.coalition_of(x))
                .copied()
                .filter(|a| near.contains(a))
                .unwrap_or(near[0]),
        };
        start.insert(x, here);
        allowed.insert(x, near);
    }
    let assignment = residual_congestion_dynamics_from(&anchors, &allowed, &start)?;

    let mut parts: Vec<Vec<usize>> = kinds
        .iter()
        .filter(|(_, k)| **k == BasicCoalitionKind::K3)
        .map(|(&j, _)| base.members(j))
        .collect();
    for &a in &anchors {
        let mut star = vec![a];
        star.extend(assignment.iter().filter(|(_, &b)| b == a).map(|(&x, _)| x));
        parts.push(star);
    }
    parts.extend(alone.into_iter().map(|x| vec![x]));
    let structure = CoalitionStructure::from_coalitions(n, &parts)?.normalized();
    let welfare = social_welfare(g, &structure)?;
    if welfare != optimum.welfare {
        return Err(Error::VerificationFailed(format!(
            "welfare {} differs from the optimum {}",
            welfare.to_text(),
            optimum.welfare.to_text()
        )));
    }

    let mut verified = Vec::new();
    if options.verify {
        match checker.check(&structure, StabilityKind::strong_n()) {
            Ok(s) if s.is_stable() => verified.push(StabilityKind::strong_n()),
            Ok(s) => {
                return Err(Error::VerificationFailed(format!(
                    "outcome {:?} admits the deviation {:?}",
                    structure.canonical(),
                    s.witness()
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
            nodes: optimum.stats.nodes,
            phases: 0,
        },
    })
}
