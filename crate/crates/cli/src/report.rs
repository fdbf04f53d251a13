//! JSON report shapes. Every node is written as a 1-based label.

use balance_lab::balance::{BalanceViolation, FactionPartition, PartitionKind, TriadBalanceReport};
use balance_lab::chordal::{
    fan_triangulation, EquivalenceReport, ExhaustiveVerification, SubgraphVerdict,
};
use balance_lab::dynamics::{AbsorptionRecord, OpinionVector};
use balance_lab::{AppraisalMatrix, UndirectedSkeleton};
use serde::Serialize;

fn label_pair((a, b): (usize, usize)) -> [usize; 2] {
    [a + 1, b + 1]
}

fn signed_links(x: &AppraisalMatrix) -> Vec<[i64; 3]> {
    x.links()
        .map(|(i, j, v)| [i as i64 + 1, j as i64 + 1, v as i64])
        .collect()
}

#[derive(Serialize)]
struct Violation {
    kind: &'static str,
    nodes: Vec<usize>,
}

#[derive(Serialize)]
struct Partition {
    kind: PartitionKind,
    v1: Vec<usize>,
    v2: Vec<usize>,
}

#[derive(Serialize)]
struct EgoNetwork {
    node: usize,
    two_faction: bool,
}

#[derive(Serialize)]
pub struct AnalyzeReport {
    n: usize,
    links: usize,
    bilateral: bool,
    sign_symmetric: bool,
    triad_wise_balanced: bool,
    violations: Vec<Violation>,
    two_faction: Option<Partition>,
    ego_networks: Vec<EgoNetwork>,
    all_ego_networks_two_faction: bool,
    conflict_ratio: Option<f64>,
    link_density: f64,
    triad_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    all_cycles_positive: Option<bool>,
}

impl AnalyzeReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x: &AppraisalMatrix,
        triads: &TriadBalanceReport,
        partition: Option<&FactionPartition>,
        ego: &[bool],
        all_ego: bool,
        conflict_ratio: Option<f64>,
        link_density: f64,
        triad_count: usize,
        all_cycles_positive: Option<bool>,
    ) -> Self {
        let violations = triads
            .violations
            .iter()
            .map(|v| match *v {
                BalanceViolation::AsymmetricPair(i, j) => Violation {
                    kind: "asymmetric-pair",
                    nodes: vec![i + 1, j + 1],
                },
                BalanceViolation::NegativeTriad(i, j, k) => Violation {
                    kind: "negative-triad",
                    nodes: vec![i + 1, j + 1, k + 1],
                },
            })
            .collect();
        Self {
            n: x.n(),
            links: x.nonzero_count(),
            bilateral: x.is_bilateral(),
            sign_symmetric: x.is_sign_symmetric(),
            triad_wise_balanced: triads.balanced,
            violations,
            two_faction: partition.map(|p| Partition {
                kind: p.kind,
                v1: p.v1.labels(),
                v2: p.v2.labels(),
            }),
            ego_networks: ego
                .iter()
                .enumerate()
                .map(|(i, &two_faction)| EgoNetwork {
                    node: i + 1,
                    two_faction,
                })
                .collect(),
            all_ego_networks_two_faction: all_ego,
            conflict_ratio,
            link_density,
            triad_count,
            all_cycles_positive,
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
enum Verdict {
    Triad,
    Certified {
        cycle: Vec<usize>,
        witness_chords: Vec<[usize; 2]>,
        fan: Vec<[usize; 3]>,
    },
    NoSubchordalCycle {
        cycles_tried: usize,
    },
    ChordSplitFails {
        cycles_tried: usize,
        cycle: Vec<usize>,
        chord: [usize; 2],
    },
}

#[derive(Serialize)]
struct Subgraph {
    nodes: Vec<usize>,
    #[serde(flatten)]
    verdict: Verdict,
}

#[derive(Serialize)]
struct Exhaustive {
    holds: bool,
    assignments_checked: u64,
    /// Triad-wise but not two-faction balanced, as `[i, j, sign]` entries.
    counterexample: Option<Vec<[i64; 3]>>,
}

#[derive(Serialize)]
pub struct EquivalenceOut {
    n: usize,
    edges: Vec<[usize; 2]>,
    holds: bool,
    subgraphs: Vec<Subgraph>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhaustive: Option<Exhaustive>,
}

impl EquivalenceOut {
    pub fn new(
        g: &UndirectedSkeleton,
        report: &EquivalenceReport,
        exhaustive: Option<&ExhaustiveVerification>,
    ) -> Self {
        let subgraphs = report
            .subgraphs
            .iter()
            .map(|s| Subgraph {
                nodes: s.nodes.labels(),
                verdict: match &s.verdict {
                    SubgraphVerdict::Triad => Verdict::Triad,
                    SubgraphVerdict::Certified { cycle, witness } => Verdict::Certified {
                        cycle: cycle.labels(),
                        witness_chords: witness
                            .extra_edges
                            .iter()
                            .copied()
                            .map(label_pair)
                            .collect(),
                        fan: fan_triangulation(witness)
                            .expect("certified witness is valid")
                            .triads
                            .iter()
                            .map(|t| [t[0] + 1, t[1] + 1, t[2] + 1])
                            .collect(),
                    },
                    SubgraphVerdict::NoSubchordalCycle { cycles_tried } => {
                        Verdict::NoSubchordalCycle {
                            cycles_tried: *cycles_tried,
                        }
                    }
                    SubgraphVerdict::ChordSplitFails {
                        cycles_tried,
                        cycle,
                        chord,
                    } => Verdict::ChordSplitFails {
                        cycles_tried: *cycles_tried,
                        cycle: cycle.labels(),
                        chord: label_pair(*chord),
                    },
                },
            })
            .collect();
        Self {
            n: g.n(),
            edges: g.edges().into_iter().map(label_pair).collect(),
            holds: report.holds,
            subgraphs,
            exhaustive: exhaustive.map(|e| Exhaustive {
                holds: e.holds,
                assignments_checked: e.assignments_checked,
                counterexample: e.counterexample.as_ref().map(signed_links),
            }),
        }
    }
}

#[derive(Serialize)]
pub struct SimulateReport {
    engine: String,
    seed: u64,
    n: usize,
    initial_state: Vec<[i64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_opinions: Option<Vec<i8>>,
    absorbed: bool,
    steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetrization_steps: Option<usize>,
    initial_h: usize,
    final_h: usize,
    balanced: bool,
    final_state: Vec<[i64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_opinions: Option<Vec<i8>>,
}

impl SimulateReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        engine: String,
        seed: u64,
        x0: &AppraisalMatrix,
        y0: Option<&OpinionVector>,
        record: &AbsorptionRecord,
        initial_h: usize,
        final_h: usize,
        balanced: bool,
        symmetrization_steps: Option<usize>,
    ) -> Self {
        Self {
            engine,
            seed,
            n: x0.n(),
            initial_state: signed_links(x0),
            initial_opinions: y0.map(|y| y.as_slice().to_vec()),
            absorbed: record.absorbed,
            steps: record.steps,
            symmetrization_steps,
            initial_h,
            final_h,
            balanced,
            final_state: signed_links(&record.final_state),
            final_opinions: record
                .final_opinions
                .as_ref()
                .map(|y| y.as_slice().to_vec()),
        }
    }
}
