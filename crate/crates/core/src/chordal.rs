//! Chords, chordal graphs and subchordal cycles.
//!
//! A cycle is *subchordal* when the cycle edges plus some subset of its
//! chords in the ambient graph form a chordal graph. Such a witness admits a
//! fan of `m - 2` triads covering the cycle's polygon, and triad-wise balance
//! then forces the cycle to be positive. [`check_equivalence_conditions`]
//! certifies the graph-level sufficient condition built on top of this,
//! and [`verify_equivalence_exhaustive`] checks the conclusion directly by
//! trying every sign assignment.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::balance::{detect_two_faction, triad_balanced};
use crate::cycles::{enumerate_simple_cycles, for_each_simple_cycle, guard, Cycle, MAX_CYCLE_SEARCH_NODES};
use crate::error::{Error, Result};
use crate::graph::{AppraisalMatrix, NodeSet, UndirectedSkeleton};

/// Chord count above which [`is_subchordal`] refuses without `force`.
pub const MAX_CANDIDATE_CHORDS: usize = 20;
/// Edge count above which [`verify_equivalence_exhaustive`] refuses without
/// `force`.
pub const MAX_EXHAUSTIVE_EDGES: usize = 14;

pub type Pair = (usize, usize);

fn pair(a: usize, b: usize) -> Pair {
    (a.min(b), a.max(b))
}

/// Edges of `g` joining two non-consecutive nodes of `c`, sorted.
pub fn find_chords(g: &UndirectedSkeleton, c: &Cycle) -> Result<Vec<Pair>> {
    c.validate_in(g)?;
    Ok(chords_unchecked(g, c))
}

fn chords_unchecked(g: &UndirectedSkeleton, c: &Cycle) -> Vec<Pair> {
    let nodes = c.nodes();
    let m = nodes.len();
    let mut out = Vec::new();
    for p in 0..m {
        for q in p + 2..m {
            if p == 0 && q == m - 1 {
                continue;
            }
            if g.has_edge(nodes[p], nodes[q]) {
                out.push(pair(nodes[p], nodes[q]));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Splits `c = (i_1, ..., i_m)` at the chord `{i_p, i_q}`, `p < q`, into
/// `(i_1, ..., i_p, i_q, ..., i_m)` and `(i_p, ..., i_q)`.
pub fn split_by_chord(c: &Cycle, chord: Pair) -> Result<(Cycle, Cycle)> {
    let (a, b) = chord;
    let (Some(pa), Some(pb)) = (c.position(a), c.position(b)) else {
        return Err(Error::InvalidChord(a + 1, b + 1, "endpoint not on the cycle"));
    };
    if a == b || c.are_consecutive(a, b) {
        return Err(Error::InvalidChord(a + 1, b + 1, "endpoints are consecutive"));
    }
    let (p, q) = (pa.min(pb), pa.max(pb));
    let nodes = c.nodes();
    let mut outer = nodes[..=p].to_vec();
    outer.extend_from_slice(&nodes[q..]);
    let inner = nodes[p..=q].to_vec();
    Ok((Cycle::new(outer)?, Cycle::new(inner)?))
}

/// Maximum cardinality search; returns nodes in visit order.
fn mcs_order(g: &UndirectedSkeleton) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !visited[v])
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .unwrap();
        visited[v] = true;
        order.push(v);
        for u in g.neighbors(v) {
            if !visited[u] {
                weight[u] += 1;
            }
        }
    }
    order
}

/// Chordality via maximum cardinality search: the reverse visit order is a
/// perfect elimination ordering iff the graph is chordal.
pub fn is_chordal(g: &UndirectedSkeleton) -> bool {
    let n = g.n();
    let order = mcs_order(g);
    let mut rank = vec![0usize; n];
    for (k, &v) in order.iter().enumerate() {
        rank[v] = k;
    }
    for &v in &order {
        let earlier: Vec<usize> = g.neighbors(v).filter(|&u| rank[u] < rank[v]).collect();
        let Some(&parent) = earlier.iter().max_by_key(|&&u| rank[u]) else {
            continue;
        };
        let ok = earlier
            .iter()
            .all(|&u| u == parent || g.has_edge(u, parent));
        if !ok {
            return false;
        }
    }
    true
}

/// Chordality straight from the definition: every simple cycle longer than
/// three has a chord. Exponential; guarded like cycle enumeration.
pub fn is_chordal_by_cycles(g: &UndirectedSkeleton, force: bool) -> Result<bool> {
    guard("chordality by cycles", g.n(), MAX_CYCLE_SEARCH_NODES, force)?;
    let mut chordal = true;
    for_each_simple_cycle(g, None, |path| {
        if chordal && path.len() > 3 {
            let c = Cycle::new(path.to_vec()).expect("simple cycle");
            if chords_unchecked(g, &c).is_empty() {
                chordal = false;
            }
        }
    });
    Ok(chordal)
}

/// Some induced cycle of length at least four, if the graph is not chordal.
pub fn find_chordless_cycle(g: &UndirectedSkeleton) -> Option<Cycle> {
    let n = g.n();
    for v in 0..n {
        let nbrs: Vec<usize> = g.neighbors(v).collect();
        for (x, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[x + 1..] {
                if g.has_edge(a, b) {
                    continue;
                }
                // Shortest a-b path avoiding v and its other neighbours.
                let mut blocked = vec![false; n];
                blocked[v] = true;
                for &u in &nbrs {
                    if u != a && u != b {
                        blocked[u] = true;
                    }
                }
                if let Some(path) = shortest_path(g, a, b, &blocked) {
                    let mut nodes = vec![v];
                    nodes.extend(path);
                    return Some(Cycle::new(nodes).expect("induced path plus apex"));
                }
            }
        }
    }
    None
}

fn shortest_path(g: &UndirectedSkeleton, from: usize, to: usize, blocked: &[bool]) -> Option<Vec<usize>> {
    let n = g.n();
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for w in g.neighbors(u) {
            if !seen[w] && !blocked[w] {
                seen[w] = true;
                prev[w] = u;
                queue.push_back(w);
            }
        }
    }
    None
}

/// A chordal subgraph spanning exactly the cycle's nodes and containing all
/// cycle edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubchordalWitness {
    pub cycle: Cycle,
    /// Chords of the cycle added to the cycle edges, sorted.
    pub extra_edges: Vec<Pair>,
    /// Cycle edges and extra edges, sorted.
    pub all_edges: Vec<Pair>,
}

impl SubchordalWitness {
    fn from_parts(cycle: Cycle, mut extra_edges: Vec<Pair>) -> Self {
        extra_edges.sort_unstable();
        let mut all_edges = cycle.edges();
        all_edges.extend(extra_edges.iter().copied());
        all_edges.sort_unstable();
        all_edges.dedup();
        Self {
            cycle,
            extra_edges,
            all_edges,
        }
    }

    /// The witness graph over the ambient node ids (nodes off the cycle are
    /// isolated).
    pub fn graph(&self) -> UndirectedSkeleton {
        let n = self.cycle.nodes().iter().max().map_or(0, |&m| m + 1);
        UndirectedSkeleton::from_edges(n, &self.all_edges).expect("edges within the cycle")
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.all_edges.binary_search(&pair(a, b)).is_ok()
    }

    /// Checks the three witness conditions.
    pub fn validate(&self) -> Result<()> {
        let nodes = self.cycle.node_set();
        if self.cycle.len() < 3 {
            return Err(Error::InvalidWitness("cycle shorter than 3".into()));
        }
        if let Some(&(a, b)) = self
            .all_edges
            .iter()
            .find(|&&(a, b)| !nodes.contains(a) || !nodes.contains(b))
        {
            return Err(Error::InvalidWitness(format!(
                "edge {{{}, {}}} leaves the cycle's node set",
                a + 1,
                b + 1
            )));
        }
        if let Some((a, b)) = self.cycle.edges().into_iter().find(|&(a, b)| !self.has_edge(a, b)) {
            return Err(Error::InvalidWitness(format!(
                "cycle edge {{{}, {}}} missing",
                a + 1,
                b + 1
            )));
        }
        if !is_chordal(&self.graph()) {
            return Err(Error::InvalidWitness("witness graph is not chordal".into()));
        }
        Ok(())
    }
}

fn witness_edges_graph(g_n: usize, cycle: &Cycle, chords: &[Pair], mask: u64) -> UndirectedSkeleton {
    let mut h = UndirectedSkeleton::empty(g_n);
    for (a, b) in cycle.edges() {
        h.set_edge(a, b, true);
    }
    for (k, &(a, b)) in chords.iter().enumerate() {
        if mask >> k & 1 == 1 {
            h.set_edge(a, b, true);
        }
    }
    h
}

fn chosen(chords: &[Pair], mask: u64) -> Vec<Pair> {
    chords
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, &p)| p)
        .collect()
}

/// Searches for a subchordal witness of `c` in `g`.
///
/// Branch and bound over chord subsets: while the candidate graph has a
/// chordless cycle of length >= 4, any chordal completion must contain one
/// of that cycle's chords, so the search branches on exactly those.
pub fn is_subchordal(g: &UndirectedSkeleton, c: &Cycle, force: bool) -> Result<Option<SubchordalWitness>> {
    let chords = find_chords(g, c)?;
    guard("subchordal search", chords.len(), MAX_CANDIDATE_CHORDS, force)?;
    if chords.len() > 63 {
        return Err(Error::GuardExceeded {
            what: "subchordal search",
            size: chords.len(),
            limit: 63,
        });
    }
    let mut visited = HashSet::new();
    let found = search_witness(g.n(), c, &chords, 0, &mut visited);
    Ok(found.map(|mask| SubchordalWitness::from_parts(c.clone(), chosen(&chords, mask))))
}

fn search_witness(n: usize, c: &Cycle, chords: &[Pair], mask: u64, visited: &mut HashSet<u64>) -> Option<u64> {
    if !visited.insert(mask) {
        return None;
    }
    let h = witness_edges_graph(n, c, chords, mask);
    let Some(hole) = find_chordless_cycle(&h) else {
        return Some(mask);
    };
    for (k, &(a, b)) in chords.iter().enumerate() {
        if mask >> k & 1 == 1 {
            continue;
        }
        if hole.position(a).is_some() && hole.position(b).is_some() && !hole.are_consecutive(a, b) {
            if let Some(found) = search_witness(n, c, chords, mask | 1 << k, visited) {
                return Some(found);
            }
        }
    }
    None
}

/// Plain enumeration of all chord subsets, smallest masks first.
pub fn is_subchordal_exhaustive(
    g: &UndirectedSkeleton,
    c: &Cycle,
    force: bool,
) -> Result<Option<SubchordalWitness>> {
    let chords = find_chords(g, c)?;
    guard("subchordal search", chords.len(), MAX_CANDIDATE_CHORDS, force)?;
    for mask in 0u64..1 << chords.len() {
        if is_chordal(&witness_edges_graph(g.n(), c, &chords, mask)) {
            return Ok(Some(SubchordalWitness::from_parts(c.clone(), chosen(&chords, mask))));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationFan {
    pub triads: Vec<[usize; 3]>,
}

/// First chord of `c` inside the witness, scanning positions in order.
fn first_witness_chord(w: &SubchordalWitness, c: &Cycle) -> Option<(usize, usize)> {
    let nodes = c.nodes();
    let m = nodes.len();
    for p in 0..m {
        for q in p + 2..m {
            if (p, q) != (0, m - 1) && w.has_edge(nodes[p], nodes[q]) {
                return Some((p, q));
            }
        }
    }
    None
}

/// Splits the witness cycle at witness chords until only triads remain.
pub fn fan_triangulation(w: &SubchordalWitness) -> Result<TriangulationFan> {
    w.validate()?;
    let mut triads = Vec::with_capacity(w.cycle.len() - 2);
    let mut stack = vec![w.cycle.clone()];
    while let Some(c) = stack.pop() {
        if c.len() == 3 {
            let n = c.nodes();
            triads.push([n[0], n[1], n[2]]);
            continue;
        }
        let (p, q) = first_witness_chord(w, &c).ok_or_else(|| {
            Error::InvalidWitness(format!("sub-cycle {:?} has no chord in the witness", c.labels()))
        })?;
        let (outer, inner) = split_by_chord(&c, (c.nodes()[p], c.nodes()[q]))?;
        stack.push(inner);
        stack.push(outer);
    }
    Ok(TriangulationFan { triads })
}

/// Three consecutive cycle nodes forming a triad of the witness, found by
/// repeatedly descending into the inner side of a chord until the chord
/// skips exactly one node.
pub fn consecutive_triad(w: &SubchordalWitness) -> Result<[usize; 3]> {
    w.validate()?;
    let nodes = w.cycle.nodes();
    let m = nodes.len();
    if m == 3 {
        return Ok([nodes[0], nodes[1], nodes[2]]);
    }
    let (mut p, mut q) = first_witness_chord(w, &w.cycle).expect("chordal witness has a chord");
    while q > p + 2 {
        // Chord of the inner cycle (i_p, ..., i_q), excluding {i_p, i_q}.
        let next = (p..=q)
            .flat_map(|a| (a + 2..=q).map(move |b| (a, b)))
            .find(|&(a, b)| (a, b) != (p, q) && w.has_edge(nodes[a], nodes[b]))
            .expect("inner cycle of a chordal witness has a chord");
        (p, q) = next;
    }
    Ok([nodes[p], nodes[p + 1], nodes[q]])
}

/// Node sets traversed exactly by some simple cycle and by no cycle through
/// a strict superset.
pub fn maximal_cyclic_subgraphs(g: &UndirectedSkeleton, force: bool) -> Result<Vec<NodeSet>> {
    guard("maximal cyclic subgraphs", g.n(), MAX_CYCLE_SEARCH_NODES, force)?;
    let mut sets: HashSet<NodeSet> = HashSet::new();
    for_each_simple_cycle(g, None, |path| {
        sets.insert(NodeSet::new(path.iter().copied()));
    });
    let all: Vec<NodeSet> = sets.into_iter().collect();
    let mut maximal: Vec<NodeSet> = all
        .iter()
        .filter(|s| !all.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
        .cloned()
        .collect();
    maximal.sort();
    Ok(maximal)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SubgraphVerdict {
    /// Three nodes: nothing to certify.
    Triad,
    Certified {
        cycle: Cycle,
        witness: SubchordalWitness,
    },
    /// No Hamiltonian cycle of the subgraph is subchordal.
    NoSubchordalCycle { cycles_tried: usize },
    /// Every subchordal Hamiltonian cycle has a chord whose two sides are
    /// both non-subchordal; one such cycle and chord is reported.
    ChordSplitFails {
        cycles_tried: usize,
        cycle: Cycle,
        chord: Pair,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphCertificate {
    pub nodes: NodeSet,
    pub verdict: SubgraphVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub holds: bool,
    pub subgraphs: Vec<SubgraphCertificate>,
}

/// Checks the sufficient condition for triad-wise and two-faction balance to
/// coincide on every bilateral matrix with skeleton `g`: each maximal cyclic
/// subgraph on more than three nodes must contain one Hamiltonian cycle that
/// is subchordal and whose every chord leaves at least one subchordal side.
pub fn check_equivalence_conditions(g: &UndirectedSkeleton, force: bool) -> Result<EquivalenceReport> {
    guard("equivalence conditions", g.n(), MAX_CYCLE_SEARCH_NODES, force)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let cycles = enumerate_simple_cycles(g, None, force)?;
    let mut subgraphs = Vec::new();
    for nodes in maximal_cyclic_subgraphs(g, force)? {
        let verdict = if nodes.len() == 3 {
            SubgraphVerdict::Triad
        } else {
            certify_subgraph(g, &nodes, &cycles, force)?
        };
        subgraphs.push(SubgraphCertificate { nodes, verdict });
    }
    let holds = subgraphs.iter().all(|s| {
        matches!(
            s.verdict,
            SubgraphVerdict::Triad | SubgraphVerdict::Certified { .. }
        )
    });
    Ok(EquivalenceReport { holds, subgraphs })
}

fn certify_subgraph(
    g: &UndirectedSkeleton,
    nodes: &NodeSet,
    cycles: &[Cycle],
    force: bool,
) -> Result<SubgraphVerdict> {
    let mut tried = 0;
    let mut split_failure = None;
    for c in cycles.iter().filter(|c| c.len() == nodes.len() && &c.node_set() == nodes) {
        tried += 1;
        let Some(witness) = is_subchordal(g, c, force)? else {
            continue;
        };
        let mut bad_chord = None;
        for chord in chords_unchecked(g, c) {
            let (outer, inner) = split_by_chord(c, chord)?;
            if is_subchordal(g, &outer, force)?.is_none() && is_subchordal(g, &inner, force)?.is_none() {
                bad_chord = Some(chord);
                break;
            }
        }
        match bad_chord {
            None => {
                return Ok(SubgraphVerdict::Certified {
                    cycle: c.clone(),
                    witness,
                })
            }
            Some(chord) => {
                split_failure.get_or_insert((c.clone(), chord));
            }
        }
    }
    Ok(match split_failure {
        Some((cycle, chord)) => SubgraphVerdict::ChordSplitFails {
            cycles_tried: tried,
            cycle,
            chord,
        },
        None => SubgraphVerdict::NoSubchordalCycle { cycles_tried: tried },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveVerification {
    pub holds: bool,
    pub assignments_checked: u64,
    /// A bilateral sign-symmetric matrix on `g` that is triad-wise balanced
    /// but not two-faction balanced.
    pub counterexample: Option<AppraisalMatrix>,
}

/// Tries all `2^|E|` sign-symmetric assignments on the edges of `g` and
/// tests triad-wise balance against two-faction balance on each.
pub fn verify_equivalence_exhaustive(g: &UndirectedSkeleton, force: bool) -> Result<ExhaustiveVerification> {
    let edges = g.edges();
    guard("exhaustive sign assignments", edges.len(), MAX_EXHAUSTIVE_EDGES, force)?;
    if edges.len() > 40 {
        return Err(Error::GuardExceeded {
            what: "exhaustive sign assignments",
            size: edges.len(),
            limit: 40,
        });
    }
    let mut x = AppraisalMatrix::zeros(g.n().max(1))?;
    let total = 1u64 << edges.len();
    for mask in 0..total {
        for (k, &(a, b)) in edges.iter().enumerate() {
            let s = if mask >> k & 1 == 1 { -1 } else { 1 };
            x.set(a, b, s);
            x.set(b, a, s);
        }
        if triad_balanced(&x) != detect_two_faction(&x).is_some() {
            return Ok(ExhaustiveVerification {
                holds: false,
                assignments_checked: mask + 1,
                counterexample: Some(x),
            });
        }
    }
    Ok(ExhaustiveVerification {
        holds: true,
        assignments_checked: total,
        counterexample: None,
    })
}
