use petgraph::algo::maximum_matching;
use petgraph::graph::UnGraph;

use super::{SolverReport, SolverStats};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::structure::CoalitionStructure;

/// Optimum of an unweighted game restricted to basic coalitions.
///
/// On unweighted graphs a basic coalition contributes its size if it is an
/// edge or a triangle and 0 if it is a lone node, and some optimum is made
/// only of basic coalitions. So the task is to cover as many nodes as
/// possible with disjoint edges and triangles, solved here by branch and
/// bound on the lowest uncovered node. The bound for the uncovered part `R`
/// with maximum matching size `m` and `t` nodes lying on triangles of
/// `G[R]` is `min(non-isolated nodes, 2m + min(m, t / 3))`.
pub fn optimal_basic_partition<S: Scalar>(g: &WeightedGraph<S>) -> Result<SolverReport<S>> {
    if !g.is_unweighted() {
        return Err(Error::WeightedInput);
    }
    let n = g.n();
    let mut search = Packing {
        adj: (0..n)
            .map(|i| {
                let mut row = vec![false; n];
                for (j, _) in g.neighbors(i) {
                    row[*j] = true;
                }
                row
            })
            .collect(),
        free: vec![true; n],
        chosen: Vec::new(),
        covered: 0,
        best: Vec::new(),
        best_covered: 0,
        nodes: 0,
    };
    search.run();
    let mut coalitions = search.best.clone();
    let mut covered = vec![false; n];
    for part in &coalitions {
        part.iter().for_each(|&i| covered[i] = true);
    }
    coalitions.extend((0..n).filter(|&i| !covered[i]).map(|i| vec![i]));
    let structure = CoalitionStructure::from_coalitions(n, &coalitions)?.normalized();
    let welfare = crate::game::social_welfare(g, &structure)?;
    debug_assert!(welfare == S::from_count(search.best_covered));
    Ok(SolverReport {
        structure,
        welfare,
        verified: Vec::new(),
        stats: SolverStats {
            nodes: search.nodes,
            phases: 0,
        },
    })
}

struct Packing {
    adj: Vec<Vec<bool>>,
    free: Vec<bool>,
    chosen: Vec<Vec<usize>>,
    covered: usize,
    best: Vec<Vec<usize>>,
    best_covered: usize,
    nodes: u64,
}

impl Packing {
    fn run(&mut self) {
        self.best = Vec::new();
        self.best_covered = 0;
        self.descend();
    }

    fn descend(&mut self) {
        self.nodes += 1;
        if self.covered > self.best_covered || (self.best.is_empty() && self.covered == 0) {
            self.best_covered = self.covered;
            self.best = self.chosen.clone();
        }
        if self.covered + self.bound() <= self.best_covered {
            return;
        }
        // lowest free node with a free neighbour; others can only stay alone
        let n = self.free.len();
        let Some(v) = (0..n).find(|&v| self.free[v] && self.free_neighbors(v).next().is_some())
        else {
            return;
        };
        let nbrs: Vec<usize> = self.free_neighbors(v).collect();
        for (x, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[x + 1..] {
                if self.adj[a][b] {
                    self.take(&[v, a, b]);
                }
            }
        }
        for &a in &nbrs {
            self.take(&[v, a]);
        }
        self.free[v] = false;
        self.descend();
        self.free[v] = true;
    }

    fn take(&mut self, part: &[usize]) {
        part.iter().for_each(|&i| self.free[i] = false);
        self.chosen.push(part.to_vec());
        self.covered += part.len();
        self.descend();
        self.covered -= part.len();
        self.chosen.pop();
        part.iter().for_each(|&i| self.free[i] = true);
    }

    fn free_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.free.len()).filter(move |&u| self.free[u] && self.adj[v][u])
    }

    fn bound(&self) -> usize {
        let n = self.free.len();
        let mut index = vec![usize::MAX; n];
        let mut graph = UnGraph::<(), ()>::new_undirected();
        let mut nodes = Vec::new();
        for (v, slot) in index.iter_mut().enumerate() {
            if self.free[v] {
                *slot = nodes.len();
                nodes.push(graph.add_node(()));
            }
        }
        let mut non_isolated = 0;
        let mut on_triangle = 0;
        for v in (0..n).filter(|&v| self.free[v]) {
            let nbrs: Vec<usize> = self.free_neighbors(v).collect();
            if !nbrs.is_empty() {
                non_isolated += 1;
            }
            if nbrs
                .iter()
                .enumerate()
                .any(|(x, &a)| nbrs[x + 1..].iter().any(|&b| self.adj[a][b]))
            {
                on_triangle += 1;
            }
            for &u in nbrs.iter().filter(|&&u| u > v) {
                graph.add_edge(nodes[index[v]], nodes[index[u]], ());
            }
        }
        let m = maximum_matching(&graph).len();
        non_isolated.min(2 * m + m.min(on_triangle / 3))
    }
}
