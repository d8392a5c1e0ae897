//! Property tests against independent, deliberately naive oracles.

use std::collections::BTreeMap;

use mfhg::dynamics::{residual_congestion_dynamics, run_dynamics, Scheduler, Terminal};
use mfhg::game::{
    apply_joint_deviation, apply_move, classify_basic, decompose_to_basic, social_welfare, utility,
    utility_in_set,
};
use mfhg::partitions::all_structures;
use mfhg::solvers::{brute_force_optimum, enumerate_stable, greedy_matching, SolverOptions};
use mfhg::stability::{improving_moves, WitnessKind};
use mfhg::{
    BlockingMode, Checker, CoalitionStructure, DeviationMode, Graph, Rational, Scalar,
    StabilityKind, Witness,
};
use proptest::prelude::*;

const WEIGHTS: [&str; 7] = ["1", "2", "1/2", "3", "-1", "-5/2", "0"];

fn graph_strategy(max_n: usize, weighted: bool, nonnegative: bool) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(prop::option::weighted(0.55, 0..WEIGHTS.len()), pairs).prop_map(
            move |choice| {
                let mut edges = Vec::new();
                let mut t = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if let Some(w) = choice[t] {
                            let w = if !weighted {
                                "1"
                            } else if nonnegative {
                                WEIGHTS[w % 4]
                            } else {
                                WEIGHTS[w]
                            };
                            edges.push((u, v, Rational::parse_text(w).unwrap()));
                        }
                        t += 1;
                    }
                }
                Graph::new(n, edges).unwrap()
            },
        )
    })
}

fn with_partition(g: Graph) -> impl Strategy<Value = (Graph, CoalitionStructure)> {
    let n = g.n();
    prop::collection::vec(0..n, n)
        .prop_map(move |a| (g.clone(), CoalitionStructure::from_assignment(a).unwrap()))
}

fn instance(max_n: usize, weighted: bool) -> impl Strategy<Value = (Graph, CoalitionStructure)> {
    graph_strategy(max_n, weighted, false).prop_flat_map(with_partition)
}

fn cap(g: &Graph, i: usize) -> Rational {
    g.neighbors(i)
        .iter()
        .map(|(_, w)| w.clone())
        .fold(Rational::from_count(0), |a, b| if b > a { b } else { a })
}

fn better(after: &Rational, before: &Rational, strict: bool) -> bool {
    if strict {
        after > before
    } else {
        after >= before
    }
}

/// Explicit joint-deviation search: every deviating set of at most `k`
/// agents, every destination per deviator (a remaining coalition other than
/// its own, or one of `|K|` labelled new groups), outcome built from scratch.
fn oracle_k_strong(g: &Graph, c: &CoalitionStructure, k: usize, strict: bool) -> bool {
    let n = g.n();
    let before: Vec<Rational> = (0..n).map(|i| utility(g, c, i).unwrap()).collect();
    for mask in 1u32..(1 << n) {
        let dev: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if dev.len() > k {
            continue;
        }
        let mut remainders: Vec<Vec<usize>> = Vec::new();
        let mut own = vec![None; dev.len()];
        for (_, members) in c.coalitions() {
            let rest: Vec<usize> = members
                .iter()
                .copied()
                .filter(|i| mask >> i & 1 == 0)
                .collect();
            if !rest.is_empty() {
                for (a, d) in dev.iter().enumerate() {
                    if members.contains(d) {
                        own[a] = Some(remainders.len());
                    }
                }
                remainders.push(rest);
            }
        }
        let options = remainders.len() + dev.len();
        let total = options.pow(dev.len() as u32);
        for code in 0..total {
            let mut x = code;
            let dest: Vec<usize> = (0..dev.len())
                .map(|_| {
                    let d = x % options;
                    x /= options;
                    d
                })
                .collect();
            if dest.iter().zip(&own).any(|(d, o)| Some(*d) == *o) {
                continue;
            }
            let mut strictly = false;
            let mut ok = true;
            for (a, &i) in dev.iter().enumerate() {
                let mut group: Vec<usize> = remainders.get(dest[a]).cloned().unwrap_or_default();
                group.extend(
                    dev.iter()
                        .zip(&dest)
                        .filter(|(_, d)| **d == dest[a])
                        .map(|(j, _)| *j),
                );
                let u = utility_in_set(g, &group, i);
                ok &= better(&u, &before[i], strict);
                strictly |= u > before[i];
            }
            if ok && strictly {
                return false;
            }
        }
    }
    true
}

fn oracle_blocking(g: &Graph, c: &CoalitionStructure, strong: bool) -> bool {
    let n = g.n();
    (1u32..(1 << n)).any(|mask| {
        let t: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let mut strictly = false;
        let all = t.iter().all(|&i| {
            let now = utility(g, c, i).unwrap();
            let there = utility_in_set(g, &t, i);
            strictly |= there > now;
            better(&there, &now, strong)
        });
        all && strictly
    })
}

fn replay(g: &Graph, c: &CoalitionStructure, w: &Witness) {
    if w.kind == WitnessKind::BlockingCoalition {
        for (i, after) in w.agents.iter().zip(&w.after) {
            assert_eq!(&utility_in_set(g, &w.targets, *i), after);
        }
        return;
    }
    let moves: Vec<_> = w
        .agents
        .iter()
        .copied()
        .zip(w.targets.iter().copied())
        .collect();
    let next = apply_joint_deviation(c, &moves).unwrap();
    for ((i, b), a) in w.agents.iter().zip(&w.before).zip(&w.after) {
        assert_eq!(&utility(g, c, *i).unwrap(), b);
        assert_eq!(&utility(g, &next, *i).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn welfare_is_the_sum_of_utilities((g, c) in instance(8, true)) {
        let sum = (0..g.n()).fold(Rational::from_count(0), |acc, i| acc + utility(&g, &c, i).unwrap());
        prop_assert_eq!(social_welfare(&g, &c).unwrap(), sum);
    }

    #[test]
    fn utility_never_exceeds_the_cap((g, c) in instance(8, true)) {
        for i in 0..g.n() {
            prop_assert!(utility(&g, &c, i).unwrap() <= cap(&g, i));
        }
    }

    #[test]
    fn decomposition_is_basic_and_keeps_welfare((g, c) in graph_strategy(10, false, true).prop_flat_map(with_partition)) {
        let d = decompose_to_basic(&g, &c).unwrap();
        for (_, members) in d.coalitions() {
            prop_assert!(classify_basic(&g, &members).is_some());
        }
        prop_assert!(social_welfare(&g, &d).unwrap() >= social_welfare(&g, &c).unwrap());
    }

    #[test]
    fn improving_moves_match_replayed_moves((g, c) in instance(7, true)) {
        for i in 0..g.n() {
            let now = utility(&g, &c, i).unwrap();
            let moves = improving_moves(&g, &c, i).unwrap();
            let mut expected = Vec::new();
            let mut fresh_seen = false;
            for j in 0..g.n() {
                let empty = c.members(j).is_empty();
                if j == c.coalition_of(i) || (empty && fresh_seen) {
                    continue;
                }
                fresh_seen |= empty;
                let after = utility(&g, &apply_move(&c, i, j).unwrap(), i).unwrap();
                if after > now {
                    expected.push(j);
                }
            }
            let mut got: Vec<usize> = moves.iter().map(|m| m.0).collect();
            got.sort_unstable();
            prop_assert_eq!(got, expected);
            for (j, after) in moves {
                prop_assert_eq!(utility(&g, &apply_move(&c, i, j).unwrap(), i).unwrap(), after);
            }
        }
    }

    #[test]
    fn strong_checks_match_the_oracle((g, c) in instance(5, true)) {
        let checker = Checker::new(&g);
        let n = g.n();
        let mut previous = true;
        for k in 1..=n {
            let s = checker.k_strong(&c, k, DeviationMode::Strict).unwrap();
            prop_assert_eq!(s.is_stable(), oracle_k_strong(&g, &c, k, true), "k = {}", k);
            prop_assert!(previous || !s.is_stable());
            previous = s.is_stable();
            if let Some(w) = s.witness() {
                replay(&g, &c, w);
            }
            let via_kind = checker.check(&c, StabilityKind::strong(k)).unwrap();
            prop_assert_eq!(via_kind.is_stable(), s.is_stable());
            if let Some(w) = via_kind.witness() {
                replay(&g, &c, w);
            }
        }
        let nash = checker.nash(&c).unwrap();
        prop_assert_eq!(nash.is_stable(), checker.k_strong(&c, 1, DeviationMode::Strict).unwrap().is_stable());
    }

    #[test]
    fn relaxed_checks_match_the_oracle((g, c) in instance(4, true)) {
        let checker = Checker::new(&g);
        for k in 1..=g.n() {
            let s = checker.k_strong(&c, k, DeviationMode::Relaxed).unwrap();
            prop_assert_eq!(s.is_stable(), oracle_k_strong(&g, &c, k, false), "k = {}", k);
            if let Some(w) = s.witness() {
                replay(&g, &c, w);
            }
        }
    }

    #[test]
    fn blocking_checks_match_the_oracle((g, c) in instance(7, true)) {
        let checker = Checker::new(&g);
        for (mode, strong) in [(BlockingMode::Strong, true), (BlockingMode::Weak, false)] {
            let w = checker.blocking_coalition(&c, mode).unwrap();
            prop_assert_eq!(w.is_some(), oracle_blocking(&g, &c, strong));
            if let Some(w) = w {
                replay(&g, &c, &w);
            }
        }
    }

    #[test]
    fn strict_n_strong_excludes_fresh_blocking((g, c) in instance(6, true)) {
        let checker = Checker::new(&g);
        if checker.k_strong(&c, g.n(), DeviationMode::Strict).unwrap().is_stable() {
            prop_assert!(checker.core(&c).unwrap().is_stable());
        }
    }

    #[test]
    fn optimum_matches_enumeration(g in graph_strategy(7, true, false)) {
        let rep = brute_force_optimum(&g, &SolverOptions::default()).unwrap();
        let mut best: Option<(Rational, CoalitionStructure)> = None;
        for c in all_structures(g.n()) {
            let sw = social_welfare(&g, &c).unwrap();
            let replace = match &best {
                None => true,
                Some((b, bc)) => sw > *b || (sw == *b && c < *bc),
            };
            if replace {
                best = Some((sw, c));
            }
        }
        let (sw, c) = best.unwrap();
        prop_assert_eq!(&rep.welfare, &sw);
        prop_assert_eq!(rep.structure.canonical(), c.canonical());
    }

    #[test]
    fn greedy_phases_do_not_increase(g in graph_strategy(9, true, false)) {
        let picked = greedy_matching(&g);
        for pair in picked.windows(2) {
            prop_assert!(pair[0].2 >= pair[1].2);
        }
        prop_assert!(picked.iter().all(|e| e.2 >= Rational::from_count(0)));
    }

    #[test]
    fn grand_coalition_is_nash_for_nonnegative_weights(g in graph_strategy(6, true, true)) {
        let all = enumerate_stable(&g, StabilityKind::Nash, &SolverOptions::default()).unwrap();
        prop_assert!(all.iter().any(|r| r.structure == CoalitionStructure::grand(g.n())));
    }

    #[test]
    fn dynamics_steps_improve((g, c) in instance(8, true), seed in 0u64..1000) {
        for scheduler in [Scheduler::FirstImprove, Scheduler::BestResponse, Scheduler::Random { seed }] {
            let trace = run_dynamics(&g, &c, &scheduler, 200).unwrap();
            let mut current = c.clone();
            for step in &trace.steps {
                prop_assert_eq!(utility(&g, &current, step.agent).unwrap(), step.before.clone());
                current = apply_move(&current, step.agent, step.to).unwrap();
                prop_assert_eq!(utility(&g, &current, step.agent).unwrap(), step.after.clone());
                prop_assert!(step.after > step.before);
            }
            prop_assert_eq!(&current, &trace.last);
            match &trace.terminal {
                Terminal::Converged { structure } => {
                    prop_assert!(Checker::new(&g).nash(structure).unwrap().is_stable());
                    if g.is_unweighted() {
                        let sw = social_welfare(&g, structure).unwrap();
                        prop_assert!(sw >= Rational::from_count(0) && sw <= Rational::from_count(g.n()));
                    }
                }
                Terminal::CycleDetected { first_repeat_step, cycle_length } => {
                    let mut earlier = c.clone();
                    for step in &trace.steps[..*first_repeat_step] {
                        earlier = apply_move(&earlier, step.agent, step.to).unwrap();
                    }
                    prop_assert!(*cycle_length > 0);
                    prop_assert_eq!(&earlier, &trace.last);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn congestion_dynamics_reach_equilibrium(
        anchors in 1usize..5,
        links in prop::collection::vec(prop::collection::btree_set(0usize..5, 1..4), 1..8),
    ) {
        let anchor_ids: Vec<usize> = (0..anchors).collect();
        let allowed: BTreeMap<usize, Vec<usize>> = links
            .iter()
            .enumerate()
            .map(|(x, set)| (100 + x, set.iter().map(|a| a % anchors).collect::<std::collections::BTreeSet<_>>().into_iter().collect()))
            .collect();
        let out = residual_congestion_dynamics(&anchor_ids, &allowed).unwrap();
        let mut load = vec![0usize; anchors];
        for a in out.values() {
            load[*a] += 1;
        }
        for (x, options) in &allowed {
            let here = out[x];
            prop_assert!(options.contains(&here));
            for &b in options {
                prop_assert!(b == here || load[b] + 1 >= load[here]);
            }
        }
    }
}
