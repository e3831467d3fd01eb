//! Covers of the hypothesis domain and their similarity hypergraph.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A collection of hypothesis subsets (cells). Cells are hyperedges of the
/// similarity hypergraph; two cells are adjacent iff they share a hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cover {
    pub cells: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverViolation {
    EmptyCell { cell: usize },
    UnknownHypothesis { cell: usize, value: String },
    Uncovered { values: Vec<String> },
    Disconnected { components: usize },
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverViolation::EmptyCell { cell } => write!(f, "cell {cell} is empty"),
            CoverViolation::UnknownHypothesis { cell, value } => {
                write!(f, "cell {cell} names unknown hypothesis `{value}`")
            }
            CoverViolation::Uncovered { values } => {
                write!(f, "union of cells misses {}", values.join(", "))
            }
            CoverViolation::Disconnected { components } => write!(
                f,
                "similarity hypergraph is not connected ({components} components)"
            ),
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl Cover {
    pub fn new<V: AsRef<str>>(cells: &[&[V]]) -> Self {
        Cover {
            cells: cells
                .iter()
                .map(|c| c.iter().map(|v| v.as_ref().to_string()).collect())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, j: usize) -> &[String] {
        &self.cells[j]
    }

    pub fn cells_containing<'a>(&'a self, h: &'a str) -> impl Iterator<Item = usize> + 'a {
        (0..self.cells.len()).filter(move |&j| self.cells[j].iter().any(|v| v == h))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.cells[a].iter().any(|v| self.cells[b].contains(v))
    }

    /// Nonempty cells, full union, known values and a connected hypergraph;
    /// an empty report means the cover is valid.
    pub fn validate(&self, domain: &[String]) -> Vec<CoverViolation> {
        let mut report = Vec::new();
        let mut uf = UnionFind::new(domain.len());
        let mut covered = vec![false; domain.len()];
        for (j, cell) in self.cells.iter().enumerate() {
            if cell.is_empty() {
                report.push(CoverViolation::EmptyCell { cell: j });
            }
            let mut members = Vec::new();
            for v in cell {
                match domain.iter().position(|d| d == v) {
                    Some(k) => members.push(k),
                    None => report.push(CoverViolation::UnknownHypothesis {
                        cell: j,
                        value: v.clone(),
                    }),
                }
            }
            for &k in &members {
                covered[k] = true;
                uf.union(members[0], k);
            }
        }
        let missing: Vec<String> = domain
            .iter()
            .zip(&covered)
            .filter(|(_, &c)| !c)
            .map(|(v, _)| v.clone())
            .collect();
        if !missing.is_empty() {
            report.push(CoverViolation::Uncovered { values: missing });
        }
        let mut roots: Vec<usize> = (0..domain.len())
            .filter(|&k| covered[k])
            .map(|k| uf.find(k))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() > 1 {
            report.push(CoverViolation::Disconnected {
                components: roots.len(),
            });
        }
        report
    }

    /// Shortest path of cells from `start` to the nearest cell satisfying
    /// `pred`, found by breadth-first search with neighbours visited in
    /// declaration order. Only the last cell satisfies `pred`.
    pub fn path_to<F: Fn(usize) -> bool>(&self, start: usize, pred: F) -> Result<Vec<usize>> {
        self.path_from_any(&[start], pred)
    }

    /// As [`path_to`](Self::path_to), searching from several start cells at
    /// once; the path begins at whichever start is closest.
    pub fn path_from_any<F: Fn(usize) -> bool>(&self, starts: &[usize], pred: F) -> Result<Vec<usize>> {
        if let Some(&s) = starts.iter().find(|&&s| pred(s)) {
            return Ok(vec![s]);
        }
        let n = self.cells.len();
        let mut prev = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &s in starts {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(c) = queue.pop_front() {
            for next in 0..n {
                if seen[next] || !self.adjacent(c, next) {
                    continue;
                }
                seen[next] = true;
                prev[next] = c;
                if pred(next) {
                    let mut path = vec![next];
                    let mut cur = next;
                    while prev[cur] != usize::MAX {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Ok(path);
                }
                queue.push_back(next);
            }
        }
        Err(Error::NoMatchingCell)
    }

    /// One hypothesis shared by each consecutive pair of cells on `path`,
    /// the first such value in `domain` order.
    pub fn connecting_hypotheses(&self, path: &[usize], domain: &[String]) -> Result<Vec<String>> {
        path.windows(2)
            .map(|w| {
                domain
                    .iter()
                    .find(|v| self.cells[w[0]].contains(v) && self.cells[w[1]].contains(v))
                    .cloned()
                    .ok_or_else(|| {
                        Error::Malformed(format!("cells {} and {} do not intersect", w[0], w[1]))
                    })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domain(values: &[&str]) -> Vec<String> {
        values.iter().map(|s| s.to_string()).collect()
    }

    fn secured_building() -> (Cover, Vec<String>) {
        (
            Cover::new(&[
                &["spy", "visitor"][..],
                &["visitor", "worker"][..],
                &["worker", "executive"][..],
            ]),
            domain(&["spy", "visitor", "worker", "executive"]),
        )
    }

    #[test]
    fn chain_cover_is_connected() {
        let (cover, dom) = secured_building();
        assert!(cover.validate(&dom).is_empty());
    }

    #[test]
    fn disjoint_cells_are_disconnected() {
        let cover = Cover::new(&[&["h1", "h2"][..], &["h3", "h4"][..]]);
        let report = cover.validate(&domain(&["h1", "h2", "h3", "h4"]));
        assert_eq!(report, vec![CoverViolation::Disconnected { components: 2 }]);
    }

    #[test]
    fn missing_value_is_reported() {
        let cover = Cover::new(&[&["h1"][..], &["h1", "h2"][..]]);
        let report = cover.validate(&domain(&["h1", "h2", "h3"]));
        assert_eq!(
            report,
            vec![CoverViolation::Uncovered {
                values: vec!["h3".into()]
            }]
        );
    }

    #[test]
    fn empty_cell_is_reported() {
        let cover = Cover {
            cells: vec![vec![], vec!["a".into()]],
        };
        assert!(cover.validate(&domain(&["a"])).contains(&CoverViolation::EmptyCell { cell: 0 }));
    }

    #[test]
    fn path_from_executives_reaches_visitor_worker_cell() {
        let (cover, dom) = secured_building();
        let path = cover.path_to(2, |j| j != 2).unwrap();
        assert_eq!(path, vec![2, 1]);
        assert_eq!(cover.connecting_hypotheses(&path, &dom).unwrap(), vec!["worker"]);
    }

    #[test]
    fn satisfied_start_is_a_single_cell_path() {
        let (cover, dom) = secured_building();
        let path = cover.path_to(1, |_| true).unwrap();
        assert_eq!(path, vec![1]);
        assert!(cover.connecting_hypotheses(&path, &dom).unwrap().is_empty());
    }

    #[test]
    fn unsatisfiable_predicate_fails() {
        let (cover, _) = secured_building();
        assert!(matches!(cover.path_to(0, |_| false), Err(Error::NoMatchingCell)));
    }

    #[test]
    fn unique_intersection_is_the_witness() {
        let cover = Cover::new(&[&["h1", "h2"][..], &["h2", "h3"][..]]);
        let w = cover
            .connecting_hypotheses(&[0, 1], &domain(&["h1", "h2", "h3"]))
            .unwrap();
        assert_eq!(w, vec!["h2"]);
    }
}
