use rand::{Rng, SeedableRng};

use super::{AbsorptionRecord, Move, SihParams, SimRng, UpdateEvent, UpdateTarget};
use crate::balance::triad_balanced;
use crate::error::{Error, Result};
use crate::graph::AppraisalMatrix;

/// Ordered pairs `(i, j)`, `i != j`, with `X_ij != 0` or `X_ji != 0`.
pub fn sih_candidate_pairs(x: &AppraisalMatrix) -> Vec<(usize, usize)> {
    let n = x.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && (x.get(i, j) != 0 || x.get(j, i) != 0) {
                out.push((i, j));
            }
        }
    }
    out
}

fn is_candidate(x: &AppraisalMatrix, i: usize, j: usize) -> bool {
    i != j && i < x.n() && j < x.n() && (x.get(i, j) != 0 || x.get(j, i) != 0)
}

/// Nodes `k` with `X_ik X_jk != 0`.
pub(crate) fn common_neighbors(x: &AppraisalMatrix, i: usize, j: usize) -> Vec<usize> {
    (0..x.n())
        .filter(|&k| k != i && k != j && x.get(i, k) != 0 && x.get(j, k) != 0)
        .collect()
}

/// Every update the SIH rules allow on the pair `(i, j)`.
pub fn sih_moves(x: &AppraisalMatrix, i: usize, j: usize) -> Result<Vec<Move>> {
    if !is_candidate(x, i, j) {
        return Err(Error::InvalidParams(format!(
            "({}, {}) is not a candidate pair",
            i + 1,
            j + 1
        )));
    }
    let mut moves = vec![Move::Symmetry];
    for k in common_neighbors(x, i, j) {
        moves.push(Move::Influence(k));
        moves.push(Move::Homophily(k));
    }
    Ok(moves)
}

pub(crate) fn sih_value(x: &AppraisalMatrix, i: usize, j: usize, mv: Move) -> i8 {
    match mv {
        Move::Symmetry => x.get(j, i),
        Move::Influence(k) => x.get(i, k) * x.get(k, j),
        Move::Homophily(k) => x.get(i, k) * x.get(j, k),
        Move::OpinionGossip | Move::PersonOpinionHomophily => unreachable!("not an SIH move"),
    }
}

/// Writes `mv` on `(i, j)` without legality checks.
pub(crate) fn write_sih_move(x: &mut AppraisalMatrix, i: usize, j: usize, mv: Move, step: u64) -> UpdateEvent {
    let old = x.get(i, j);
    let new = sih_value(x, i, j, mv);
    x.set(i, j, new);
    UpdateEvent {
        step,
        pair: (i, j),
        mechanism: mv.mechanism(),
        common_neighbor: mv.neighbor(),
        target: UpdateTarget::Appraisal,
        old,
        new,
    }
}

/// Applies `mv` to `(i, j)` after checking that the SIH rules allow it.
pub fn apply_sih_move(x: &mut AppraisalMatrix, i: usize, j: usize, mv: Move, step: u64) -> Result<UpdateEvent> {
    if !sih_moves(x, i, j)?.contains(&mv) {
        return Err(Error::InvalidParams(format!(
            "{mv:?} is not a legal update of ({}, {})",
            i + 1,
            j + 1
        )));
    }
    Ok(write_sih_move(x, i, j, mv, step))
}

/// Draws the SIH update for an already chosen pair.
pub(crate) fn draw_sih_move(x: &AppraisalMatrix, i: usize, j: usize, params: &SihParams, rng: &mut SimRng) -> Move {
    let common = common_neighbors(x, i, j);
    if common.is_empty() {
        return Move::Symmetry;
    }
    let [p1, p2, _] = params.weights();
    let u: f64 = rng.random();
    if u < p1 {
        Move::Symmetry
    } else {
        let k = common[rng.random_range(0..common.len())];
        if u < p1 + p2 {
            Move::Influence(k)
        } else {
            Move::Homophily(k)
        }
    }
}

fn step_in_place(x: &mut AppraisalMatrix, params: &SihParams, rng: &mut SimRng, step: u64) -> Result<UpdateEvent> {
    let candidates = sih_candidate_pairs(x);
    if candidates.is_empty() {
        return Err(Error::NoCandidatePair);
    }
    let (i, j) = candidates[rng.random_range(0..candidates.len())];
    let mv = draw_sih_move(x, i, j, params, rng);
    Ok(write_sih_move(x, i, j, mv, step))
}

/// One random SIH update.
pub fn sih_step(x: &AppraisalMatrix, params: &SihParams, rng: &mut SimRng) -> Result<(AppraisalMatrix, UpdateEvent)> {
    let mut next = x.clone();
    let event = step_in_place(&mut next, params, rng, 0)?;
    Ok((next, event))
}

/// Equilibrium by exhaustion: no legal update of any candidate pair changes
/// the matrix.
pub fn is_sih_equilibrium(x: &AppraisalMatrix) -> bool {
    sih_candidate_pairs(x).into_iter().all(|(i, j)| {
        let current = x.get(i, j);
        sih_moves(x, i, j)
            .expect("candidate pair")
            .into_iter()
            .all(|mv| sih_value(x, i, j, mv) == current)
    })
}

/// Runs SIH updates until the state is triad-wise balanced or `max_steps`
/// updates have been applied.
pub fn run_sih(x0: &AppraisalMatrix, params: &SihParams, seed: u64, max_steps: u64, log: bool) -> Result<AbsorptionRecord> {
    if max_steps == 0 {
        return Err(Error::InvalidParams("max_steps must be positive".into()));
    }
    let mut rng = SimRng::seed_from_u64(seed);
    let mut x = x0.clone();
    let mut events = log.then(Vec::new);
    let mut steps = 0;
    let mut absorbed = triad_balanced(&x);
    while !absorbed && steps < max_steps {
        let event = step_in_place(&mut x, params, &mut rng, steps)?;
        steps += 1;
        if let Some(events) = events.as_mut() {
            events.push(event);
        }
        absorbed = triad_balanced(&x);
    }
    Ok(AbsorptionRecord {
        absorbed,
        steps,
        final_state: x,
        final_opinions: None,
        event_log: events,
    })
}

/// Re-applies a logged event sequence, rejecting any event that is not a
/// legal SIH update of the state it is applied to or whose recorded values
/// disagree with the replay.
pub fn replay_sih(x0: &AppraisalMatrix, events: &[UpdateEvent]) -> Result<AppraisalMatrix> {
    let mut x = x0.clone();
    for (t, e) in events.iter().enumerate() {
        let mv = e
            .as_move()
            .filter(|mv| !matches!(mv, Move::OpinionGossip | Move::PersonOpinionHomophily))
            .ok_or_else(|| Error::InvalidParams(format!("event {t}: not an SIH mechanism")))?;
        let (i, j) = e.pair;
        let replayed = apply_sih_move(&mut x, i, j, mv, e.step)
            .map_err(|err| Error::InvalidParams(format!("event {t}: {err}")))?;
        if replayed != *e {
            return Err(Error::InvalidParams(format!("event {t}: recorded values differ from replay")));
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::is_triad_wise_balanced;
    use crate::dynamics::{stream_rng, Mechanism};

    fn sym(n: usize, pairs: &[(usize, usize, i64)]) -> AppraisalMatrix {
        let mut entries = Vec::new();
        for &(i, j, s) in pairs {
            entries.push((i, j, s));
            entries.push((j, i, s));
        }
        AppraisalMatrix::from_edge_list(n, &entries).unwrap()
    }

    #[test]
    fn candidate_pairs() {
        assert!(sih_candidate_pairs(&AppraisalMatrix::zeros(3).unwrap()).is_empty());
        let x = AppraisalMatrix::from_edge_list(2, &[(1, 2, 1)]).unwrap();
        assert_eq!(sih_candidate_pairs(&x), vec![(0, 1), (1, 0)]);
        let full = sym(3, &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]);
        assert_eq!(sih_candidate_pairs(&full).len(), 6);
    }

    #[test]
    fn forced_updates() {
        let mut x = AppraisalMatrix::from_edge_list(2, &[(1, 2, 1)]).unwrap();
        assert_eq!(sih_moves(&x, 1, 0).unwrap(), vec![Move::Symmetry]);
        let e = apply_sih_move(&mut x, 1, 0, Move::Symmetry, 0).unwrap();
        assert_eq!((e.old, e.new), (0, 1));
        assert_eq!(x.get(1, 0), 1);

        let mut neg = sym(3, &[(1, 2, -1), (2, 3, -1), (1, 3, -1)]);
        let e = apply_sih_move(&mut neg, 0, 1, Move::Homophily(2), 0).unwrap();
        assert_eq!(e.mechanism, Mechanism::Homophily);
        assert_eq!(neg.get(0, 1), 1);
        // Only one entry changes.
        assert_eq!(neg.get(1, 0), -1);
        assert_eq!(neg.negative_count(), 5);

        let mut lonely = AppraisalMatrix::from_edge_list(3, &[(1, 2, 1)]).unwrap();
        assert!(apply_sih_move(&mut lonely, 0, 1, Move::Influence(2), 0).is_err());
        assert!(apply_sih_move(&mut lonely, 0, 2, Move::Symmetry, 0).is_err());
    }

    #[test]
    fn step_without_candidates_fails() {
        let z = AppraisalMatrix::zeros(2).unwrap();
        let mut rng = stream_rng(0, 0);
        assert_eq!(sih_step(&z, &SihParams::default(), &mut rng), Err(Error::NoCandidatePair));
    }

    #[test]
    fn influence_can_clear_an_entry_of_a_non_bilateral_matrix() {
        // X_13, X_23 nonzero but X_32 = 0: influence on (1, 2) through 3
        // yields X_13 X_32 = 0.
        let mut x = AppraisalMatrix::from_edge_list(3, &[(1, 2, 1), (2, 1, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        apply_sih_move(&mut x, 0, 1, Move::Influence(2), 0).unwrap();
        assert_eq!(x.get(0, 1), 0);
    }

    #[test]
    fn equilibrium_examples() {
        let pos = sym(3, &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]);
        assert!(is_sih_equilibrium(&pos));
        let one_neg = sym(3, &[(1, 2, -1), (2, 3, 1), (1, 3, 1)]);
        assert!(!is_sih_equilibrium(&one_neg));
        assert!(is_sih_equilibrium(&AppraisalMatrix::zeros(2).unwrap()));
    }

    #[test]
    fn equilibrium_matches_balance_on_three_nodes() {
        for x in AppraisalMatrix::all_of_order(3) {
            assert_eq!(is_sih_equilibrium(&x), is_triad_wise_balanced(&x).balanced, "{x:?}");
        }
    }

    #[test]
    fn balanced_input_absorbs_immediately() {
        let pos = sym(3, &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]);
        let r = run_sih(&pos, &SihParams::default(), 1, 100, true).unwrap();
        assert!(r.absorbed);
        assert_eq!(r.steps, 0);
        assert_eq!(r.event_log.unwrap().len(), 0);
        assert!(run_sih(&pos, &SihParams::default(), 1, 0, false).is_err());
    }

    /// Absorbing states reachable from `x0`, by breadth-first search over
    /// every legal update.
    fn reachable_absorbing(x0: &AppraisalMatrix) -> std::collections::HashSet<AppraisalMatrix> {
        let mut seen = std::collections::HashSet::from([x0.clone()]);
        let mut queue = std::collections::VecDeque::from([x0.clone()]);
        let mut absorbing = std::collections::HashSet::new();
        while let Some(x) = queue.pop_front() {
            if is_triad_wise_balanced(&x).balanced {
                absorbing.insert(x);
                continue;
            }
            for (i, j) in sih_candidate_pairs(&x) {
                for mv in sih_moves(&x, i, j).unwrap() {
                    let mut y = x.clone();
                    write_sih_move(&mut y, i, j, mv, 0);
                    if seen.insert(y.clone()) {
                        queue.push_back(y);
                    }
                }
            }
        }
        absorbing
    }

    #[test]
    fn negative_triangle_absorbs_in_an_enumerated_state() {
        let neg = sym(3, &[(1, 2, -1), (2, 3, -1), (1, 3, -1)]);
        let absorbing = reachable_absorbing(&neg);
        // Three states with one positive pair, plus the all-positive state.
        assert_eq!(absorbing.len(), 4);
        let mut counts: Vec<usize> = absorbing.iter().map(|x| x.negative_count()).collect();
        counts.sort();
        assert_eq!(counts, vec![0, 4, 4, 4]);
        for seed in 0..200 {
            let r = run_sih(&neg, &SihParams::default(), seed, 1_000_000, true).unwrap();
            assert!(r.absorbed);
            assert!(absorbing.contains(&r.final_state), "seed {seed}: {:?}", r.final_state);
            assert_eq!(replay_sih(&neg, r.event_log.as_ref().unwrap()).unwrap(), r.final_state);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let x = AppraisalMatrix::from_ternary_code(4, 98_765).unwrap();
        let a = run_sih(&x, &SihParams::default(), 42, 10_000, true).unwrap();
        let b = run_sih(&x, &SihParams::default(), 42, 10_000, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn replay_rejects_illegal_events() {
        let x = AppraisalMatrix::from_edge_list(3, &[(1, 2, 1)]).unwrap();
        let bogus = UpdateEvent {
            step: 0,
            pair: (0, 1),
            mechanism: Mechanism::Influence,
            common_neighbor: Some(2),
            target: UpdateTarget::Appraisal,
            old: 1,
            new: 0,
        };
        assert!(replay_sih(&x, &[bogus]).is_err());
    }
}
