use super::{SolverOptions, SolverReport, SolverStats};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::structure::CoalitionStructure;

/// Maximum-welfare partition by exhaustive search over subsets.
///
/// `best[mask]` is the optimum on the agents of `mask`, found by choosing
/// the coalition of the lowest agent in `mask`. Among optimal partitions the
/// one whose canonical form is lexicographically smallest is returned.
pub fn brute_force_optimum<S: Scalar>(
    g: &WeightedGraph<S>,
    options: &SolverOptions,
) -> Result<SolverReport<S>> {
    let n = g.n();
    if n > options.max_agents || n >= 32 {
        return Err(Error::CapExceeded {
            n,
            cap: options.max_agents.min(31),
        });
    }
    let full = (1usize << n) - 1;
    let welfare = coalition_welfare_table(g);
    let mut best = vec![S::zero(); full + 1];
    let mut nodes = 0u64;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut top: Option<S> = None;
        // submasks of `rest`, each joined with `low`
        let mut sub = rest;
        loop {
            let part = sub | low;
            let value = welfare[part].clone() + best[mask ^ part].clone();
            nodes += 1;
            if top.as_ref().is_none_or(|t| value > *t) {
                top = Some(value);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[mask] = top.expect("at least one choice");
    }

    let mut coalitions = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut chosen: Option<Vec<usize>> = None;
        let mut sub = rest;
        loop {
            let part = sub | low;
            if welfare[part].clone() + best[mask ^ part].clone() == best[mask] {
                let members = members_of(part);
                if chosen.as_ref().is_none_or(|c| members < *c) {
                    chosen = Some(members);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        let members = chosen.expect("optimum is attained");
        for &i in &members {
            mask &= !(1 << i);
        }
        coalitions.push(members);
    }
    let structure = CoalitionStructure::from_coalitions(n, &coalitions)?.normalized();
    Ok(SolverReport {
        welfare: crate::game::social_welfare(g, &structure)?,
        structure,
        verified: Vec::new(),
        stats: SolverStats { nodes, phases: 0 },
    })
}

/// Welfare `2 W(E_T) / (|T| - 1)` of every subset `T`, indexed by bitmask.
fn coalition_welfare_table<S: Scalar>(g: &WeightedGraph<S>) -> Vec<S> {
    let n = g.n();
    let size = 1usize << n;
    let mut internal = vec![S::zero(); size];
    let mut welfare = vec![S::zero(); size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut w = internal[rest].clone();
        for (j, x) in g.neighbors(low) {
            if rest >> j & 1 == 1 {
                w += x.clone();
            }
        }
        let members = mask.count_ones() as usize;
        if members > 1 {
            welfare[mask] = (w.clone() + w.clone()) / S::from_count(members - 1);
        }
        internal[mask] = w;
    }
    welfare
}

fn members_of(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|&i| mask >> i & 1 == 1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as R;

    fn r(p: i64, q: i64) -> R {
        R::from_fraction(p, q)
    }

    #[test]
    fn small_optima() {
        let opts = SolverOptions::default();
        let tri = WeightedGraph::<R>::unweighted(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let rep = brute_force_optimum(&tri, &opts).unwrap();
        assert_eq!(rep.welfare, r(3, 1));
        assert_eq!(rep.structure, CoalitionStructure::grand(3));

        let path = WeightedGraph::<R>::unweighted(6, (1..6).map(|i| (i - 1, i))).unwrap();
        let rep = brute_force_optimum(&path, &opts).unwrap();
        assert_eq!(rep.welfare, r(6, 1));
        assert_eq!(
            rep.structure.canonical(),
            vec![vec![0, 1], vec![2, 3], vec![4, 5]]
        );

        let cpos =
            WeightedGraph::new(4, [(0, 1, r(1, 1)), (1, 2, r(21, 20)), (2, 3, r(1, 1))]).unwrap();
        let rep = brute_force_optimum(&cpos, &opts).unwrap();
        assert_eq!(rep.welfare, r(4, 1));
        assert_eq!(rep.structure.canonical(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn ties_prefer_smallest_canonical_form() {
        let edgeless = WeightedGraph::<R>::new(3, []).unwrap();
        let rep = brute_force_optimum(&edgeless, &SolverOptions::default()).unwrap();
        assert_eq!(rep.welfare, r(0, 1));
        // a shorter first coalition compares smaller: [[0],[1],[2]] comes first
        assert_eq!(rep.structure, CoalitionStructure::singletons(3));
    }

    #[test]
    fn cap_is_enforced() {
        let g = WeightedGraph::<R>::new(13, []).unwrap();
        assert!(brute_force_optimum(&g, &SolverOptions::default())
            .unwrap_err()
            .is_limit());
    }
}
