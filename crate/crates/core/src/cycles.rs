//! Cycles of the undirected skeleton and their exhaustive enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeSet, UndirectedSkeleton};

/// Largest node count accepted by the exponential cycle searches without
/// `force`.
pub const MAX_CYCLE_SEARCH_NODES: usize = 12;

/// An ordered sequence of distinct nodes, closed by the wrap-around pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cycle {
    nodes: Vec<usize>,
}

impl Cycle {
    pub fn new(nodes: Vec<usize>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidCycle(format!(
                "length {} is below 2",
                nodes.len()
            )));
        }
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidCycle("repeated node".into()));
        }
        Ok(Self { nodes })
    }

    /// Builds a cycle from 1-based labels.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidCycle("labels are 1-based".into()));
        }
        Self::new(labels.iter().map(|&l| l - 1).collect())
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.nodes.iter().map(|&i| i + 1).collect()
    }

    pub fn node_set(&self) -> NodeSet {
        NodeSet::new(self.nodes.iter().copied())
    }

    /// Consecutive pairs including the wrap-around pair.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.nodes.len();
        (0..m).map(move |k| (self.nodes[k], self.nodes[(k + 1) % m]))
    }

    /// Cycle edges as unordered pairs `(min, max)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.steps().map(|(a, b)| (a.min(b), a.max(b))).collect()
    }

    pub fn position(&self, node: usize) -> Option<usize> {
        self.nodes.iter().position(|&v| v == node)
    }

    /// Whether `a` and `b` sit next to each other on the cycle.
    pub fn are_consecutive(&self, a: usize, b: usize) -> bool {
        let m = self.nodes.len();
        match (self.position(a), self.position(b)) {
            (Some(p), Some(q)) => (p + 1) % m == q || (q + 1) % m == p,
            _ => false,
        }
    }

    /// Rotation starting at the smallest node, oriented so that the second
    /// node is smaller than the last. Equal for cycles that coincide up to
    /// rotation and reflection.
    pub fn canonical(&self) -> Cycle {
        let m = self.nodes.len();
        let start = (0..m).min_by_key(|&k| self.nodes[k]).unwrap();
        let fwd: Vec<usize> = (0..m).map(|k| self.nodes[(start + k) % m]).collect();
        if m > 2 && fwd[1] > fwd[m - 1] {
            let mut rev = vec![fwd[0]];
            rev.extend(fwd[1..].iter().rev());
            Cycle { nodes: rev }
        } else {
            Cycle { nodes: fwd }
        }
    }

    /// Checks that every step of the cycle is an edge of `g`.
    pub fn validate_in(&self, g: &UndirectedSkeleton) -> Result<()> {
        for &v in &self.nodes {
            if v >= g.n() {
                return Err(Error::NodeOutOfRange {
                    node: v + 1,
                    n: g.n(),
                });
            }
        }
        if self.nodes.len() < 3 {
            return Err(Error::InvalidCycle(
                "undirected cycles need at least 3 nodes".into(),
            ));
        }
        for (a, b) in self.steps() {
            if !g.has_edge(a, b) {
                return Err(Error::MissingLink(a + 1, b + 1));
            }
        }
        Ok(())
    }
}

pub(crate) fn guard(what: &'static str, size: usize, limit: usize, force: bool) -> Result<()> {
    if size > limit && !force {
        Err(Error::GuardExceeded { what, size, limit })
    } else {
        Ok(())
    }
}

/// Every simple cycle of length >= 3 (at most `max_len` when given), each
/// once up to rotation and reflection, in canonical form.
pub fn enumerate_simple_cycles(
    g: &UndirectedSkeleton,
    max_len: Option<usize>,
    force: bool,
) -> Result<Vec<Cycle>> {
    guard("cycle enumeration", g.n(), MAX_CYCLE_SEARCH_NODES, force)?;
    let mut out = Vec::new();
    for_each_simple_cycle(g, max_len, |path| {
        out.push(Cycle {
            nodes: path.to_vec(),
        });
    });
    Ok(out)
}

/// Visits each simple cycle once. The path starts at its smallest node and
/// its second node is smaller than its last.
pub(crate) fn for_each_simple_cycle(
    g: &UndirectedSkeleton,
    max_len: Option<usize>,
    mut visit: impl FnMut(&[usize]),
) {
    let n = g.n();
    let limit = max_len.unwrap_or(n).min(n);
    let adjacency: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    let mut on_path = vec![false; n];
    let mut path = Vec::with_capacity(n);

    fn extend(
        start: usize,
        limit: usize,
        adjacency: &[Vec<usize>],
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        let last = *path.last().unwrap();
        for &next in &adjacency[last] {
            if next == start && path.len() >= 3 && path[1] < last {
                visit(path);
            }
            if next <= start || on_path[next] || path.len() >= limit {
                continue;
            }
            on_path[next] = true;
            path.push(next);
            extend(start, limit, adjacency, on_path, path, visit);
            path.pop();
            on_path[next] = false;
        }
    }

    for start in 0..n {
        on_path[start] = true;
        path.push(start);
        extend(start, limit, &adjacency, &mut on_path, &mut path, &mut visit);
        path.pop();
        on_path[start] = false;
    }
}
