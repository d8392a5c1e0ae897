//! Weighted undirected graphs and their text format.
//!
//! The text format is line oriented:
//!
//! ```text
//! # optional comments
//! n m
//! u v w      (m lines, 0 <= u < v < n, w an integer or p/q)
//! ```
//!
//! [`WeightedGraph::to_text`] writes edges sorted by `(u, v)` with weights in
//! lowest terms, so a written file parses back and re-serializes
//! byte-for-byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Undirected graph on agents `0..n` with one weight per unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<S> {
    n: usize,
    /// Sorted by `(u, v)` with `u < v`.
    edges: Vec<(usize, usize, S)>,
    /// Per-node neighbour lists sorted by neighbour id.
    adjacency: Vec<Vec<(usize, S)>>,
    unweighted: bool,
    nonnegative: bool,
}

impl<S: Scalar> WeightedGraph<S> {
    /// Builds a graph, rejecting self-loops, out-of-range ids and repeated
    /// unordered pairs. Edge endpoints may be given in either order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, S)>) -> Result<Self> {
        let mut by_pair = BTreeMap::new();
        for (u, v, w) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::AgentOutOfRange { agent: x, n });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            let key = (u.min(v), u.max(v));
            if by_pair.insert(key, w).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge {{{}, {}}}",
                    key.0, key.1
                )));
            }
        }
        let edges: Vec<_> = by_pair.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        let mut adjacency = vec![Vec::new(); n];
        for (u, v, w) in &edges {
            adjacency[*u].push((*v, w.clone()));
            adjacency[*v].push((*u, w.clone()));
        }
        for list in &mut adjacency {
            list.sort_by_key(|(j, _)| *j);
        }
        let unweighted = edges.iter().all(|(_, _, w)| w.is_one());
        let nonnegative = edges.iter().all(|(_, _, w)| !w.is_negative());
        Ok(Self {
            n,
            edges,
            adjacency,
            unweighted,
            nonnegative,
        })
    }

    /// Graph with every listed edge at weight 1.
    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|(u, v)| (u, v, S::one())))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, S)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, S)] {
        &self.adjacency[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<&S> {
        let list = self.adjacency.get(i)?;
        list.binary_search_by_key(&j, |(k, _)| *k)
            .ok()
            .map(|pos| &list[pos].1)
    }

    /// Weight of `{i, j}`, or zero when the pair is not an edge.
    pub fn weight_or_zero(&self, i: usize, j: usize) -> S {
        self.weight(i, j).cloned().unwrap_or_else(S::zero)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weight(i, j).is_some()
    }

    /// `true` iff every edge has weight exactly 1.
    pub fn is_unweighted(&self) -> bool {
        self.unweighted
    }

    /// `true` iff no edge has negative weight.
    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    fn check_agent(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::AgentOutOfRange {
                agent: i,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Sum of the weights of all edges incident to `i`.
    pub fn degree_weight(&self, i: usize) -> Result<S> {
        self.check_agent(i)?;
        let mut total = S::zero();
        for (_, w) in &self.adjacency[i] {
            total += w.clone();
        }
        Ok(total)
    }

    /// Largest incident edge weight, `None` for an isolated node.
    pub fn max_incident_weight(&self, i: usize) -> Result<Option<S>> {
        self.check_agent(i)?;
        let mut best: Option<&S> = None;
        for (_, w) in &self.adjacency[i] {
            if best.is_none_or(|b| w > b) {
                best = Some(w);
            }
        }
        Ok(best.cloned())
    }

    /// Upper bound on any utility agent `i` can reach: `max(0, max incident weight)`.
    pub(crate) fn utility_cap(&self, i: usize) -> S {
        let mut cap = S::zero();
        for (_, w) in &self.adjacency[i] {
            if *w > cap {
                cap = w.clone();
            }
        }
        cap
    }

    /// Total weight of edges with both endpoints in `set`.
    pub fn induced_edge_weight(&self, set: &[usize]) -> Result<S> {
        let mut member = vec![false; self.n];
        for &i in set {
            self.check_agent(i)?;
            member[i] = true;
        }
        let mut total = S::zero();
        for (u, v, w) in &self.edges {
            if member[*u] && member[*v] {
                total += w.clone();
            }
        }
        Ok(total)
    }

    /// Parses the text format described in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        let mut seen = BTreeMap::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(err("expected header `n m`".into()));
                    }
                    let n = fields[0]
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad node count `{}`", fields[0])))?;
                    let m = fields[1]
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad edge count `{}`", fields[1])))?;
                    header = Some((n, m));
                }
                Some((n, m)) => {
                    if edges.len() == m {
                        return Err(err(format!("more than the declared {m} edges")));
                    }
                    if fields.len() != 3 {
                        return Err(err("expected edge line `u v w`".into()));
                    }
                    let id = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|_| err(format!("bad node id `{s}`")))
                    };
                    let u = id(fields[0])?;
                    let v = id(fields[1])?;
                    if u >= n || v >= n {
                        return Err(err(format!("node id out of range [0, {n})")));
                    }
                    if u == v {
                        return Err(err(format!("self-loop on node {u}")));
                    }
                    if u > v {
                        return Err(err(format!(
                            "edge endpoints must satisfy u < v, got {u} {v}"
                        )));
                    }
                    let w = S::parse_text(fields[2])
                        .ok_or_else(|| err(format!("bad weight `{}`", fields[2])))?;
                    if let Some(prev) = seen.insert((u, v), line_no) {
                        return Err(err(format!(
                            "duplicate edge {u} {v} (first given on line {prev})"
                        )));
                    }
                    edges.push((u, v, w));
                }
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: last_line.max(1),
            message: "missing header `n m`".into(),
        })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: last_line.max(1),
                message: format!("expected {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, edges)
    }

    /// Writes the canonical text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for (u, v, w) in &self.edges {
            let _ = writeln!(out, "{u} {v} {}", w.to_text());
        }
        out
    }

    /// Same graph with weights converted into another scalar type.
    pub fn map_weights<T: Scalar>(&self, f: impl Fn(&S) -> T) -> WeightedGraph<T> {
        WeightedGraph::new(self.n, self.edges.iter().map(|(u, v, w)| (*u, *v, f(w))))
            .expect("edge set already validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(s: &str) -> Rational {
        Rational::parse_text(s).unwrap()
    }

    #[test]
    fn parses_path() {
        let g = WeightedGraph::<Rational>::parse("3 2\n0 1 1\n1 2 1\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.is_unweighted());
        assert!(g.is_nonnegative());
        assert_eq!(g.degree_weight(1).unwrap(), q("2"));
    }

    #[test]
    fn parses_rational_weight_and_comments() {
        let g =
            WeightedGraph::<Rational>::parse("# a comment\n2 1  # header\n\n0 1 3/2\n").unwrap();
        assert_eq!(g.weight(0, 1), Some(&q("3/2")));
        assert_eq!(g.weight(1, 0), Some(&q("3/2")));
        assert!(!g.is_unweighted());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = [
            ("2 2\n0 1 1\n0 1 2\n", 3, "duplicate"),
            ("2 1\n0 2 1\n", 2, "out of range"),
            ("2 1\n0 1 1/0\n", 2, "bad weight"),
            ("2 1\n0 1 1/-3\n", 2, "bad weight"),
            ("2 1\n0 0 1\n", 2, "self-loop"),
            ("2 1\n1 0 1\n", 2, "u < v"),
            ("2 1\n0 1\n", 2, "expected edge line"),
            ("3 1\n0 1 1\n1 2 1\n", 3, "more than"),
            ("3\n", 1, "header"),
        ];
        for (text, line, needle) in cases {
            match WeightedGraph::<Rational>::parse(text) {
                Err(Error::Parse { line: l, message }) => {
                    assert_eq!(l, line, "{text:?}: {message}");
                    assert!(message.contains(needle), "{text:?}: {message}");
                }
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
        assert!(matches!(
            WeightedGraph::<Rational>::parse("3 2\n0 1 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            WeightedGraph::<Rational>::parse(""),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn degrees_and_maxima() {
        let g = WeightedGraph::<Rational>::new(
            4,
            [(0, 1, q("1")), (0, 2, q("1/100")), (0, 3, q("1/100"))],
        )
        .unwrap();
        assert_eq!(g.max_incident_weight(0).unwrap(), Some(q("1")));
        assert_eq!(g.max_incident_weight(2).unwrap(), Some(q("1/100")));
        let iso = WeightedGraph::<Rational>::new(2, []).unwrap();
        assert_eq!(iso.max_incident_weight(0).unwrap(), None);
        assert_eq!(iso.degree_weight(1).unwrap(), q("0"));
        assert!(matches!(
            g.degree_weight(9),
            Err(Error::AgentOutOfRange { .. })
        ));
    }

    #[test]
    fn induced_weights() {
        let tri = WeightedGraph::<Rational>::unweighted(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.induced_edge_weight(&[0, 1, 2]).unwrap(), q("3"));
        assert_eq!(tri.induced_edge_weight(&[1]).unwrap(), q("0"));
        assert!(tri.induced_edge_weight(&[3]).is_err());
    }

    #[test]
    fn writer_sorts_and_reduces() {
        let g = WeightedGraph::<Rational>::parse("3 2\n1 2 4/2\n0 2 -6/4\n").unwrap();
        assert_eq!(g.to_text(), "3 2\n0 2 -3/2\n1 2 2\n");
    }

    #[test]
    fn rejects_duplicates_in_constructor() {
        let r = WeightedGraph::<Rational>::unweighted(3, [(0, 1), (1, 0)]);
        assert!(matches!(r, Err(Error::InvalidGraph(_))));
    }
}
