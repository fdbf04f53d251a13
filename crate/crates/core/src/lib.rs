//! Structural balance on signed appraisal networks.
//!
//! * [`graph`]: appraisal matrices, skeletons, induced and ego subgraphs,
//!   the edge-list text format.
//! * [`balance`]: triad-wise and two-faction balance, cycle signs.
//! * [`cycles`]: simple-cycle enumeration on skeletons.
//! * [`chordal`]: chords, chordality, subchordal witnesses and the
//!   sufficient-condition certificate for equivalence of the two balance
//!   notions.
//! * [`dynamics`]: the SIH and SIOH gossip dynamics.
//! * [`experiments`]: Erdős–Rényi Monte-Carlo studies.

pub mod balance;
pub mod chordal;
pub mod cycles;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graph;

pub use error::{Error, Result};
pub use graph::{AppraisalMatrix, Induced, NodeSet, UndirectedSkeleton};
