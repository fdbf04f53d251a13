//! Gossip-like appraisal dynamics.
//!
//! One step picks an ordered pair `(i, j)` with at least one nonzero
//! appraisal between them and rewrites a single value:
//!
//! * **SIH**: `X_ij` via symmetry (`X_ji`), influence (`X_ik X_kj`) or
//!   homophily (`X_ik X_jk`) through a common neighbour `k`.
//! * **SIOH**: additionally carries opinions `y in {-1, 1}^n`, with opinion
//!   gossip (`y_i <- X_ij y_j`) and person-opinion homophily
//!   (`X_ij <- y_i y_j`); the SIH rules remain available as one branch.
//!
//! Pairs and common neighbours are drawn uniformly. Every run is a pure
//! function of its inputs and seed.

mod constructive;
mod rng;
mod sih;
mod sioh;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AppraisalMatrix;

pub use constructive::{constructive_sih_sequence, constructive_sioh_sequence, ConstructiveSequence};
pub use rng::{derive_seed, stream_rng, SimRng};
pub use sih::{
    apply_sih_move, is_sih_equilibrium, replay_sih, run_sih, sih_candidate_pairs, sih_moves, sih_step,
};
pub use sioh::{
    apply_sioh_move, is_sioh_equilibrium, replay_sioh, run_sioh, sioh_aligned, sioh_moves, sioh_step,
};

const PROBABILITY_TOLERANCE: f64 = 1e-12;

fn check_weights(names: [&str; 3], w: [f64; 3]) -> Result<()> {
    for (name, v) in names.iter().zip(w) {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
        }
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::InvalidParams(format!(
            "{} + {} + {} must equal 1, got {sum}",
            names[0], names[1], names[2]
        )));
    }
    Ok(())
}

/// Mechanism weights (symmetry, influence, homophily) used when the chosen
/// pair has a common neighbour.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SihParams {
    p1: f64,
    p2: f64,
    p3: f64,
}

impl SihParams {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        check_weights(["p1", "p2", "p3"], [p1, p2, p3])?;
        Ok(Self { p1, p2, p3 })
    }

    pub fn weights(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }
}

impl Default for SihParams {
    fn default() -> Self {
        Self {
            p1: 1.0 / 3.0,
            p2: 1.0 / 3.0,
            p3: 1.0 / 3.0,
        }
    }
}

/// Weights of opinion gossip, person-opinion homophily and the embedded SIH
/// update, plus the SIH weights for that branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiohParams {
    q1: f64,
    q2: f64,
    q3: f64,
    pub sih: SihParams,
}

impl SiohParams {
    pub fn new(q1: f64, q2: f64, q3: f64, sih: SihParams) -> Result<Self> {
        check_weights(["q1", "q2", "q3"], [q1, q2, q3])?;
        Ok(Self { q1, q2, q3, sih })
    }

    pub fn weights(&self) -> [f64; 3] {
        [self.q1, self.q2, self.q3]
    }
}

impl Default for SiohParams {
    fn default() -> Self {
        Self {
            q1: 1.0 / 3.0,
            q2: 1.0 / 3.0,
            q3: 1.0 / 3.0,
            sih: SihParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpinionVector(Vec<i8>);

impl OpinionVector {
    pub fn new(y: Vec<i8>) -> Result<Self> {
        if let Some(v) = y.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidParams(format!("opinions must be -1 or 1, got {v}")));
        }
        Ok(Self(y))
    }

    /// Decodes the bits of `code`: bit `i` set means `y_i = -1`.
    pub fn from_bits(n: usize, code: u32) -> Self {
        Self((0..n).map(|i| if code >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub(crate) fn set(&mut self, i: usize, v: i8) {
        self.0[i] = v;
    }

    /// Independent fair signs.
    pub fn random(n: usize, rng: &mut SimRng) -> Self {
        Self((0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SiohState {
    pub x: AppraisalMatrix,
    pub y: OpinionVector,
}

impl SiohState {
    pub fn new(x: AppraisalMatrix, y: OpinionVector) -> Result<Self> {
        if x.n() != y.len() {
            return Err(Error::InvalidParams(format!(
                "opinion vector has length {}, matrix has {} nodes",
                y.len(),
                x.n()
            )));
        }
        Ok(Self { x, y })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanism {
    Symmetry,
    Influence,
    Homophily,
    OpinionGossip,
    PersonOpinionHomophily,
}

/// One concrete update of the pair `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Symmetry,
    Influence(usize),
    Homophily(usize),
    OpinionGossip,
    PersonOpinionHomophily,
}

impl Move {
    pub fn mechanism(self) -> Mechanism {
        match self {
            Move::Symmetry => Mechanism::Symmetry,
            Move::Influence(_) => Mechanism::Influence,
            Move::Homophily(_) => Mechanism::Homophily,
            Move::OpinionGossip => Mechanism::OpinionGossip,
            Move::PersonOpinionHomophily => Mechanism::PersonOpinionHomophily,
        }
    }

    pub fn neighbor(self) -> Option<usize> {
        match self {
            Move::Influence(k) | Move::Homophily(k) => Some(k),
            _ => None,
        }
    }

    fn from_parts(mechanism: Mechanism, neighbor: Option<usize>) -> Option<Self> {
        Some(match (mechanism, neighbor) {
            (Mechanism::Symmetry, None) => Move::Symmetry,
            (Mechanism::Influence, Some(k)) => Move::Influence(k),
            (Mechanism::Homophily, Some(k)) => Move::Homophily(k),
            (Mechanism::OpinionGossip, None) => Move::OpinionGossip,
            (Mechanism::PersonOpinionHomophily, None) => Move::PersonOpinionHomophily,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateTarget {
    /// The appraisal `X_ij`.
    Appraisal,
    /// The opinion `y_i`.
    Opinion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateEvent {
    pub step: u64,
    pub pair: (usize, usize),
    pub mechanism: Mechanism,
    pub common_neighbor: Option<usize>,
    pub target: UpdateTarget,
    pub old: i8,
    pub new: i8,
}

impl UpdateEvent {
    pub fn as_move(&self) -> Option<Move> {
        Move::from_parts(self.mechanism, self.common_neighbor)
    }

    /// One JSON object with 1-based node labels.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line {
            step: u64,
            pair: [usize; 2],
            mechanism: Mechanism,
            neighbor: Option<usize>,
            target: UpdateTarget,
            old: i8,
            new: i8,
        }
        serde_json::to_string(&Line {
            step: self.step,
            pair: [self.pair.0 + 1, self.pair.1 + 1],
            mechanism: self.mechanism,
            neighbor: self.common_neighbor.map(|k| k + 1),
            target: self.target,
            old: self.old,
            new: self.new,
        })
        .expect("plain data serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorptionRecord {
    pub absorbed: bool,
    /// Number of updates applied.
    pub steps: u64,
    pub final_state: AppraisalMatrix,
    pub final_opinions: Option<OpinionVector>,
    pub event_log: Option<Vec<UpdateEvent>>,
}

/// Number of negative appraisals.
pub fn potential_h(x: &AppraisalMatrix) -> usize {
    x.negative_count()
}

/// Negative appraisals plus negative opinions.
pub fn potential_h_xy(state: &SiohState) -> usize {
    state.x.negative_count() + state.y.as_slice().iter().filter(|&&v| v < 0).count()
}
