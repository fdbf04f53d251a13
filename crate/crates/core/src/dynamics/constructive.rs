//! Deterministic update sequences that drive any start to equilibrium.
//!
//! Phase 1 copies each lone nonzero entry onto its zero partner. Phase 2
//! flips one negative value per update, so the potential strictly drops.
//! Ties are broken by the smallest `(i, j)` and then the smallest `k`.

use super::sih::write_sih_move;
use super::sioh::sioh_aligned;
use super::{AbsorptionRecord, Move, SiohState, UpdateEvent, UpdateTarget};
use crate::graph::AppraisalMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructiveSequence {
    /// Always absorbed, with the full event log.
    pub record: AbsorptionRecord,
    /// Leading events that belong to the symmetrization phase.
    pub symmetrization_steps: usize,
}

impl ConstructiveSequence {
    pub fn events(&self) -> &[UpdateEvent] {
        self.record.event_log.as_deref().unwrap_or(&[])
    }

    /// Events after symmetrization.
    pub fn flips(&self) -> &[UpdateEvent] {
        &self.events()[self.symmetrization_steps..]
    }
}

fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

fn one_sided_pair(x: &AppraisalMatrix) -> Option<(usize, usize)> {
    ordered_pairs(x.n()).find(|&(i, j)| x.get(i, j) == 0 && x.get(j, i) != 0)
}

fn negative_against_positive(x: &AppraisalMatrix) -> Option<(usize, usize)> {
    ordered_pairs(x.n()).find(|&(i, j)| x.get(i, j) == -1 && x.get(j, i) == 1)
}

/// Mutually negative pair closing a negative triad through `k`.
fn negative_triad_pair(x: &AppraisalMatrix) -> Option<(usize, usize, usize)> {
    let n = x.n();
    ordered_pairs(n).find_map(|(i, j)| {
        if x.get(i, j) != -1 || x.get(j, i) != -1 {
            return None;
        }
        (0..n)
            .filter(|&k| k != i && k != j)
            .find(|&k| x.get(i, k) * x.get(k, j) == 1 && x.get(i, k) * x.get(j, k) == 1)
            .map(|k| (i, j, k))
    })
}

fn find_link(state: &SiohState, pred: impl Fn(i8, i8, i8) -> bool) -> Option<(usize, usize)> {
    state
        .x
        .links()
        .find(|&(i, j, v)| pred(v, state.y.get(i), state.y.get(j)))
        .map(|(i, j, _)| (i, j))
}

fn symmetrize(x: &mut AppraisalMatrix, events: &mut Vec<UpdateEvent>) {
    while let Some((i, j)) = one_sided_pair(x) {
        let step = events.len() as u64;
        events.push(write_sih_move(x, i, j, Move::Symmetry, step));
    }
}

/// SIH sequence ending at a triad-wise balanced matrix.
pub fn constructive_sih_sequence(x0: &AppraisalMatrix) -> ConstructiveSequence {
    let mut x = x0.clone();
    let mut events = Vec::new();
    symmetrize(&mut x, &mut events);
    let symmetrization_steps = events.len();
    loop {
        let step = events.len() as u64;
        let event = if let Some((i, j)) = negative_against_positive(&x) {
            write_sih_move(&mut x, i, j, Move::Symmetry, step)
        } else if let Some((i, j, k)) = negative_triad_pair(&x) {
            write_sih_move(&mut x, i, j, Move::Influence(k), step)
        } else {
            break;
        };
        events.push(event);
    }
    ConstructiveSequence {
        record: AbsorptionRecord {
            absorbed: true,
            steps: events.len() as u64,
            final_state: x,
            final_opinions: None,
            event_log: Some(events),
        },
        symmetrization_steps,
    }
}

/// SIOH sequence ending at a state with `X = X^T` and `X_ij = y_i y_j`
/// on every link.
pub fn constructive_sioh_sequence(state0: &SiohState) -> ConstructiveSequence {
    let mut state = state0.clone();
    let mut events = Vec::new();
    symmetrize(&mut state.x, &mut events);
    let symmetrization_steps = events.len();
    loop {
        let step = events.len() as u64;
        let event = if let Some((i, j)) = negative_against_positive(&state.x) {
            write_sih_move(&mut state.x, i, j, Move::Symmetry, step)
        } else if let Some((i, j)) = find_link(&state, |v, yi, yj| v == -1 && yi * yj == 1) {
            let new = state.y.get(i) * state.y.get(j);
            state.x.set(i, j, new);
            UpdateEvent {
                step,
                pair: (i, j),
                mechanism: Move::PersonOpinionHomophily.mechanism(),
                common_neighbor: None,
                target: UpdateTarget::Appraisal,
                old: -1,
                new,
            }
        } else if let Some((i, j)) = find_link(&state, |v, yi, yj| v == 1 && yi == -1 && yj == 1) {
            let new = state.x.get(i, j) * state.y.get(j);
            state.y.set(i, new);
            UpdateEvent {
                step,
                pair: (i, j),
                mechanism: Move::OpinionGossip.mechanism(),
                common_neighbor: None,
                target: UpdateTarget::Opinion,
                old: -1,
                new,
            }
        } else {
            break;
        };
        events.push(event);
    }
    debug_assert!(sioh_aligned(&state));
    ConstructiveSequence {
        record: AbsorptionRecord {
            absorbed: true,
            steps: events.len() as u64,
            final_state: state.x,
            final_opinions: Some(state.y),
            event_log: Some(events),
        },
        symmetrization_steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::triad_balanced;
    use crate::dynamics::{potential_h, potential_h_xy, replay_sih, replay_sioh, Mechanism, OpinionVector};

    fn neg_triangle() -> AppraisalMatrix {
        AppraisalMatrix::from_rows(&[[0i8, -1, -1], [-1, 0, -1], [-1, -1, 0]]).unwrap()
    }

    #[test]
    fn balanced_input_gives_empty_sequence() {
        let x = AppraisalMatrix::from_rows(&[[0i8, 1, -1], [1, 0, -1], [-1, -1, 0]]).unwrap();
        let seq = constructive_sih_sequence(&x);
        assert!(seq.events().is_empty());
        assert_eq!(seq.record.final_state, x);
    }

    #[test]
    fn negative_triangle_resolves_one_pair() {
        // Influence raises X_12, then symmetry raises X_21.
        let x = neg_triangle();
        let seq = constructive_sih_sequence(&x);
        assert_eq!(seq.symmetrization_steps, 0);
        let mechs: Vec<_> = seq.events().iter().map(|e| e.mechanism).collect();
        assert_eq!(mechs, [Mechanism::Influence, Mechanism::Symmetry]);
        assert_eq!(seq.events()[0].pair, (0, 1));
        assert_eq!(seq.events()[1].pair, (1, 0));
        let fin = &seq.record.final_state;
        assert_eq!(potential_h(&x) - potential_h(fin), 2);
        assert!(triad_balanced(fin));
        assert_eq!(replay_sih(&x, seq.events()).unwrap(), *fin);
    }

    #[test]
    fn one_sided_links_are_symmetrized_first() {
        let x = AppraisalMatrix::from_rows(&[[0i8, -1, 0], [0, 0, 1], [1, 0, 0]]).unwrap();
        let seq = constructive_sih_sequence(&x);
        assert_eq!(seq.symmetrization_steps, 3);
        assert!(seq.events()[..3].iter().all(|e| e.old == 0));
        assert!(triad_balanced(&seq.record.final_state));
        assert_eq!(replay_sih(&x, seq.events()).unwrap(), seq.record.final_state);
    }

    #[test]
    fn sih_sequence_on_every_three_node_matrix() {
        for x in AppraisalMatrix::all_of_order(3) {
            let seq = constructive_sih_sequence(&x);
            let fin = &seq.record.final_state;
            assert!(triad_balanced(fin), "{x:?}");
            assert_eq!(replay_sih(&x, seq.events()).unwrap(), *fin);
            assert!(seq.flips().iter().all(|e| e.old == -1 && e.new == 1));
            assert!(seq.flips().len() < 6);
        }
    }

    #[test]
    fn sioh_mutual_negative_with_agreeing_opinions() {
        let x = AppraisalMatrix::from_rows(&[[0i8, -1], [-1, 0]]).unwrap();
        let s = SiohState::new(x, OpinionVector::new(vec![1, 1]).unwrap()).unwrap();
        let seq = constructive_sioh_sequence(&s);
        let mechs: Vec<_> = seq.events().iter().map(|e| e.mechanism).collect();
        assert_eq!(mechs, [Mechanism::PersonOpinionHomophily, Mechanism::Symmetry]);
        let fin = SiohState::new(seq.record.final_state.clone(), seq.record.final_opinions.clone().unwrap()).unwrap();
        assert!(sioh_aligned(&fin));
        assert_eq!(potential_h_xy(&s) - potential_h_xy(&fin), 2);
        assert_eq!(replay_sioh(&s, seq.events()).unwrap(), fin);
    }

    #[test]
    fn sioh_sequence_on_every_three_node_state() {
        for x in AppraisalMatrix::all_of_order(3) {
            for code in 0..8 {
                let s = SiohState::new(x.clone(), OpinionVector::from_bits(3, code)).unwrap();
                let seq = constructive_sioh_sequence(&s);
                let fin = replay_sioh(&s, seq.events()).unwrap();
                assert!(sioh_aligned(&fin));
                assert_eq!(fin.x, seq.record.final_state);
                assert!(seq.flips().iter().all(|e| e.old == -1 && e.new == 1));
            }
        }
    }
}
