//! Ternary appraisal matrices and their graph views.
//!
//! Nodes are `0..n` inside the library. The edge-list text format and the
//! JSON reports use 1-based labels; conversion happens only at those edges.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n x n` appraisal matrix with entries in {-1, 0, 1} and a zero diagonal.
/// Dense row-major storage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AppraisalMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl AppraisalMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Self {
            n,
            entries: vec![0; n * n],
        })
    }

    /// Builds a matrix from 1-based `(i, j, sign)` triples.
    pub fn from_edge_list(n: usize, entries: &[(usize, usize, i64)]) -> Result<Self> {
        let mut x = Self::zeros(n)?;
        let mut seen = vec![false; n * n];
        for &(i, j, s) in entries {
            for node in [i, j] {
                if node == 0 || node > n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if s != 1 && s != -1 {
                return Err(Error::InvalidSign(s));
            }
            let idx = (i - 1) * n + (j - 1);
            if seen[idx] {
                return Err(Error::DuplicatePair(i, j));
            }
            seen[idx] = true;
            x.entries[idx] = s as i8;
        }
        Ok(x)
    }

    /// Builds a matrix from explicit rows.
    pub fn from_rows<R: AsRef<[i8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut x = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    len: row.len(),
                    n,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !(-1..=1).contains(&v) {
                    return Err(Error::InvalidEntry {
                        row: i,
                        col: j,
                        value: v as i64,
                    });
                }
                if i == j && v != 0 {
                    return Err(Error::NonzeroDiagonal(i));
                }
                x.entries[i * n + j] = v;
            }
        }
        Ok(x)
    }

    /// Decodes a base-3 code over the off-diagonal entries (row-major,
    /// digit 0 -> 0, 1 -> +1, 2 -> -1). Codes range over `0..3^(n(n-1))`.
    pub fn from_ternary_code(n: usize, mut code: u64) -> Result<Self> {
        let mut x = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                x.entries[i * n + j] = match code % 3 {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                code /= 3;
            }
        }
        Ok(x)
    }

    /// Every appraisal matrix of order `n`. Only sensible for `n <= 4`.
    pub fn all_of_order(n: usize) -> impl Iterator<Item = AppraisalMatrix> {
        let total = 3u64.pow((n * n.saturating_sub(1)) as u32);
        (0..total).map(move |c| Self::from_ternary_code(n, c).expect("n >= 1"))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: i8) {
        debug_assert!(i != j && (-1..=1).contains(&v));
        self.entries[i * self.n + j] = v;
    }

    /// Returns a copy with entry `(i, j)` replaced (0-based).
    pub fn with_entry(&self, i: usize, j: usize, v: i8) -> Result<Self> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::SelfLoop(i + 1));
        }
        if !(-1..=1).contains(&v) {
            return Err(Error::InvalidEntry {
                row: i,
                col: j,
                value: v as i64,
            });
        }
        let mut out = self.clone();
        out.set(i, j, v);
        Ok(out)
    }

    pub(crate) fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::NodeOutOfRange {
                node: i + 1,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Nonzero entries as 0-based `(i, j, sign)`, sorted by `(i, j)`.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        let n = self.n;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(move |(idx, &v)| (idx / n, idx % n, v))
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|&&v| v != 0).count()
    }

    pub fn negative_count(&self) -> usize {
        self.entries.iter().filter(|&&v| v < 0).count()
    }

    pub fn has_negative(&self) -> bool {
        self.entries.iter().any(|&v| v < 0)
    }

    /// `X_ij != 0 <=> X_ji != 0` for every pair.
    pub fn is_bilateral(&self) -> bool {
        (0..self.n).all(|i| {
            (i + 1..self.n).all(|j| (self.get(i, j) != 0) == (self.get(j, i) != 0))
        })
    }

    /// `X == X^T`. Implies bilateral.
    pub fn is_sign_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn skeleton(&self) -> UndirectedSkeleton {
        let mut g = UndirectedSkeleton::empty(self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.get(i, j) != 0 || self.get(j, i) != 0 {
                    g.set_edge(i, j, true);
                }
            }
        }
        g
    }

    pub fn induced(&self, nodes: &NodeSet) -> Result<Induced<AppraisalMatrix>> {
        nodes.check_within(self.n)?;
        let map = nodes.members().to_vec();
        let m = map.len();
        let mut sub = AppraisalMatrix::zeros(m.max(1))?;
        if m == 0 {
            sub.n = 0;
            sub.entries.clear();
        }
        for (a, &i) in map.iter().enumerate() {
            for (b, &j) in map.iter().enumerate() {
                sub.entries[a * m + b] = self.get(i, j);
            }
        }
        Ok(Induced {
            graph: sub,
            index_map: map,
        })
    }

    /// `N_i = {j : X_ij != 0} ∪ {i}` and the induced subgraph on it.
    pub fn ego_network(&self, i: usize) -> Result<(NodeSet, Induced<AppraisalMatrix>)> {
        self.check_node(i)?;
        let members = NodeSet::new((0..self.n).filter(|&j| j == i || self.get(i, j) != 0));
        let induced = self.induced(&members)?;
        Ok((members, induced))
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = self.clone();
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.get(i, j);
            }
        }
        t
    }
}

/// Unsigned undirected graph, dense adjacency.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UndirectedSkeleton {
    n: usize,
    adj: Vec<bool>,
}

impl UndirectedSkeleton {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![false; n * n],
        }
    }

    /// Builds a graph from 0-based edges. Self-loops and out-of-range
    /// endpoints are rejected; repeated edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(i, j) in edges {
            for node in [i, j] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node: node + 1, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i + 1));
            }
            g.set_edge(i, j, true);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub(crate) fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        self.adj[i * self.n + j] = present;
        self.adj[j * self.n + i] = present;
    }

    pub fn with_edge(&self, i: usize, j: usize) -> Result<Self> {
        let mut g = self.clone();
        if i >= self.n || j >= self.n {
            return Err(Error::NodeOutOfRange {
                node: i.max(j) + 1,
                n: self.n,
            });
        }
        if i == j {
            return Err(Error::SelfLoop(i + 1));
        }
        g.set_edge(i, j, true);
        Ok(g)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).count()
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count() / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    pub fn induced(&self, nodes: &NodeSet) -> Result<Induced<UndirectedSkeleton>> {
        nodes.check_within(self.n)?;
        let map = nodes.members().to_vec();
        let m = map.len();
        let mut sub = Self::empty(m);
        for (a, &i) in map.iter().enumerate() {
            for (b, &j) in map.iter().enumerate() {
                sub.adj[a * m + b] = self.has_edge(i, j);
            }
        }
        Ok(Induced {
            graph: sub,
            index_map: map,
        })
    }

    /// Number of triangles.
    pub fn triangle_count(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.has_edge(i, j) {
                    continue;
                }
                count += (j + 1..self.n)
                    .filter(|&k| self.has_edge(i, k) && self.has_edge(j, k))
                    .count();
            }
        }
        count
    }
}

/// Sorted, duplicate-free set of 0-based nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeSet {
    members: Vec<usize>,
}

impl NodeSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = members.into_iter().collect();
        Self {
            members: set.into_iter().collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }

    /// Members shifted to 1-based labels.
    pub fn labels(&self) -> Vec<usize> {
        self.members.iter().map(|&i| i + 1).collect()
    }

    fn check_within(&self, n: usize) -> Result<()> {
        match self.members.last() {
            Some(&max) if max >= n => Err(Error::NodeOutOfRange { node: max + 1, n }),
            _ => Ok(()),
        }
    }
}

/// An induced subgraph together with the map from its contiguous local
/// indices back to the ambient node ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Induced<G> {
    pub graph: G,
    pub index_map: Vec<usize>,
}

impl<G> Induced<G> {
    pub fn original(&self, local: usize) -> usize {
        self.index_map[local]
    }

    pub fn local(&self, original: usize) -> Option<usize> {
        self.index_map.binary_search(&original).ok()
    }
}

/// Parses the edge-list text format: `n <N>` header, then `<i> <j> <s>` lines
/// with 1-based nodes and `s` in {-1, 1}. Blank lines and `#` comments are
/// skipped.
pub fn parse_edge_list(text: &str) -> Result<AppraisalMatrix> {
    let mut n: Option<usize> = None;
    let mut entries = Vec::new();
    let mut lines_of = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |msg: String| Error::Parse { line: line_no, msg };
        match n {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(parse_err(format!("expected header `n <N>`, got `{line}`")));
                }
                let value: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(format!("invalid node count `{}`", fields[1])))?;
                if value == 0 {
                    return Err(parse_err("node count must be positive".into()));
                }
                n = Some(value);
            }
            Some(_) => {
                if fields.len() != 3 {
                    return Err(parse_err(format!("expected `<i> <j> <s>`, got `{line}`")));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(format!("invalid node `{}`", fields[0])))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(format!("invalid node `{}`", fields[1])))?;
                let s: i64 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(format!("invalid sign `{}`", fields[2])))?;
                entries.push((i, j, s));
                lines_of.push(line_no);
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        msg: "missing header `n <N>`".into(),
    })?;
    // Validate entry by entry so the error carries the offending line.
    let mut seen = BTreeSet::new();
    for (&(i, j, s), &line) in entries.iter().zip(&lines_of) {
        let err = match AppraisalMatrix::from_edge_list(n, &[(i, j, s)]) {
            Err(e) => Some(e.to_string()),
            Ok(_) if !seen.insert((i, j)) => Some(Error::DuplicatePair(i, j).to_string()),
            Ok(_) => None,
        };
        if let Some(msg) = err {
            return Err(Error::Parse { line, msg });
        }
    }
    AppraisalMatrix::from_edge_list(n, &entries)
}

/// Writes the edge-list format with entries sorted by `(i, j)`.
pub fn write_edge_list(x: &AppraisalMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", x.n()).unwrap();
    for (i, j, s) in x.links() {
        writeln!(out, "{} {} {}", i + 1, j + 1, s).unwrap();
    }
    out
}
