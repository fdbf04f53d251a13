//! Static structural-balance checks on appraisal matrices.

use serde::{Deserialize, Serialize};

use crate::cycles::{enumerate_simple_cycles, Cycle};
use crate::error::{Error, Result};
use crate::graph::{AppraisalMatrix, NodeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    TwoFaction,
    NoNegativeLinks,
}

/// Witness of two-faction balance. For `NoNegativeLinks`, `v1` holds every
/// node and `v2` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactionPartition {
    pub kind: PartitionKind,
    pub v1: NodeSet,
    pub v2: NodeSet,
}

impl FactionPartition {
    /// Side of node `i`: `true` for `v1`.
    pub fn in_v1(&self, i: usize) -> bool {
        self.v1.contains(i)
    }

    /// Direct scan of every entry against the two-faction conditions.
    pub fn certifies(&self, x: &AppraisalMatrix) -> bool {
        let n = x.n();
        match self.kind {
            PartitionKind::NoNegativeLinks => !x.has_negative(),
            PartitionKind::TwoFaction => {
                let covers = (0..n).all(|i| self.v1.contains(i) != self.v2.contains(i))
                    && self.v1.len() + self.v2.len() == n;
                covers
                    && x.links().all(|(i, j, v)| {
                        if self.in_v1(i) == self.in_v1(j) {
                            v >= 0
                        } else {
                            v <= 0
                        }
                    })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "nodes", rename_all = "kebab-case")]
pub enum BalanceViolation {
    /// A link whose reverse entry is zero or of opposite sign.
    AsymmetricPair(usize, usize),
    /// A directed triad with negative sign product.
    NegativeTriad(usize, usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadBalanceReport {
    pub balanced: bool,
    pub violations: Vec<BalanceViolation>,
}

/// Directed 3-cycles `(i, j, k)` with `X_ij, X_jk, X_ki` all nonzero,
/// rotated to start at their smallest node. Each orientation is its own
/// triad.
pub fn enumerate_triads(x: &AppraisalMatrix) -> Vec<Cycle> {
    let n = x.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in i + 1..n {
                if k == j {
                    continue;
                }
                if x.get(i, j) != 0 && x.get(j, k) != 0 && x.get(k, i) != 0 {
                    out.push(Cycle::new(vec![i, j, k]).expect("distinct nodes"));
                }
            }
        }
    }
    out
}

pub fn is_triad_wise_balanced(x: &AppraisalMatrix) -> TriadBalanceReport {
    let n = x.n();
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (x.get(i, j), x.get(j, i));
            if (a != 0 || b != 0) && a * b <= 0 {
                violations.push(BalanceViolation::AsymmetricPair(i, j));
            }
        }
    }
    for t in enumerate_triads(x) {
        let &[i, j, k] = t.nodes() else { unreachable!() };
        if x.get(i, j) * x.get(j, k) * x.get(k, i) < 0 {
            violations.push(BalanceViolation::NegativeTriad(i, j, k));
        }
    }
    TriadBalanceReport {
        balanced: violations.is_empty(),
        violations,
    }
}

/// Allocation-free form of [`is_triad_wise_balanced`] for hot loops.
pub fn triad_balanced(x: &AppraisalMatrix) -> bool {
    let n = x.n();
    for i in 0..n {
        for j in 0..n {
            let a = x.get(i, j);
            if a == 0 {
                continue;
            }
            if a * x.get(j, i) <= 0 {
                return false;
            }
            for k in 0..n {
                let b = x.get(j, k);
                if b != 0 && k != i && a * b * x.get(k, i) < 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Parity union-find: each node stores its parity relative to its parent.
struct ParityDsu {
    parent: Vec<usize>,
    parity: Vec<u8>,
    rank: Vec<u8>,
}

impl ParityDsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            parity: vec![0; n],
            rank: vec![0; n],
        }
    }

    /// Returns `(root, parity of x relative to root)`.
    fn find(&mut self, x: usize) -> (usize, u8) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (root, par) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= par;
        (root, self.parity[x])
    }

    /// Records `side(a) xor side(b) == rel`. Returns `false` on contradiction.
    fn union(&mut self, a: usize, b: usize, rel: u8) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == rel;
        }
        let (ra, rb) = if self.rank[ra] < self.rank[rb] {
            (rb, ra)
        } else {
            (ra, rb)
        };
        self.parent[rb] = ra;
        self.parity[rb] = pa ^ pb ^ rel;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
        true
    }
}

/// Two-faction detection by parity constraint propagation. A pair with a
/// positive entry in either direction must share a side; a negative entry
/// in either direction forces opposite sides.
pub fn detect_two_faction(x: &AppraisalMatrix) -> Option<FactionPartition> {
    let n = x.n();
    if !x.has_negative() {
        return Some(FactionPartition {
            kind: PartitionKind::NoNegativeLinks,
            v1: NodeSet::full(n),
            v2: NodeSet::default(),
        });
    }
    let mut dsu = ParityDsu::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (x.get(i, j), x.get(j, i));
            let same = a > 0 || b > 0;
            let different = a < 0 || b < 0;
            if same && different {
                return None;
            }
            if (same || different) && !dsu.union(i, j, different as u8) {
                return None;
            }
        }
    }
    let sides: Vec<u8> = (0..n).map(|i| dsu.find(i).1).collect();
    let partition = FactionPartition {
        kind: PartitionKind::TwoFaction,
        v1: NodeSet::new((0..n).filter(|&i| sides[i] == 0)),
        v2: NodeSet::new((0..n).filter(|&i| sides[i] == 1)),
    };
    assert!(
        partition.certifies(x),
        "parity propagation produced a partition that fails the entry scan"
    );
    Some(partition)
}

/// Product of the traversed entries `X_{i_k i_{k+1}}`, wrap-around included.
pub fn cycle_sign(x: &AppraisalMatrix, c: &Cycle) -> Result<i8> {
    let mut sign = 1i8;
    for (a, b) in c.steps() {
        x.check_node(a)?;
        x.check_node(b)?;
        let v = x.get(a, b);
        if v == 0 {
            return Err(Error::MissingLink(a + 1, b + 1));
        }
        sign *= v;
    }
    Ok(sign)
}

/// Every simple cycle of the skeleton is positive. Requires a bilateral,
/// sign-symmetric matrix so the undirected cycle sign is well defined.
pub fn all_cycles_positive(x: &AppraisalMatrix, force: bool) -> Result<bool> {
    if !x.is_bilateral() {
        return Err(Error::NotBilateral);
    }
    if !x.is_sign_symmetric() {
        return Err(Error::NotSignSymmetric);
    }
    let cycles = enumerate_simple_cycles(&x.skeleton(), None, force)?;
    for c in &cycles {
        if cycle_sign(x, c)? < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two-faction balance of every node's ego-network.
pub fn all_ego_networks_two_faction(x: &AppraisalMatrix) -> bool {
    (0..x.n()).all(|i| {
        let (_, ego) = x.ego_network(i).expect("node in range");
        detect_two_faction(&ego.graph).is_some()
    })
}
