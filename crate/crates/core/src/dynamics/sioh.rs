use rand::{Rng, SeedableRng};

use super::sih::{draw_sih_move, sih_candidate_pairs, sih_moves, sih_value};
use super::{AbsorptionRecord, Move, SiohParams, SiohState, SimRng, UpdateEvent, UpdateTarget};
use crate::error::{Error, Result};

/// Every update the SIOH rules allow on `(i, j)`: symmetry alone while
/// `X_ij = 0`, otherwise opinion gossip, person-opinion homophily and the
/// SIH updates of the pair.
pub fn sioh_moves(state: &SiohState, i: usize, j: usize) -> Result<Vec<Move>> {
    let mut moves = sih_moves(&state.x, i, j)?;
    if state.x.get(i, j) == 0 {
        moves.truncate(1);
        return Ok(moves);
    }
    moves.splice(0..0, [Move::OpinionGossip, Move::PersonOpinionHomophily]);
    Ok(moves)
}

fn write_sioh_move(state: &mut SiohState, i: usize, j: usize, mv: Move, step: u64) -> UpdateEvent {
    let (target, old, new) = match mv {
        Move::OpinionGossip => {
            let old = state.y.get(i);
            let new = state.x.get(i, j) * state.y.get(j);
            state.y.set(i, new);
            (UpdateTarget::Opinion, old, new)
        }
        Move::PersonOpinionHomophily => {
            let old = state.x.get(i, j);
            let new = state.y.get(i) * state.y.get(j);
            state.x.set(i, j, new);
            (UpdateTarget::Appraisal, old, new)
        }
        _ => {
            let old = state.x.get(i, j);
            let new = sih_value(&state.x, i, j, mv);
            state.x.set(i, j, new);
            (UpdateTarget::Appraisal, old, new)
        }
    };
    UpdateEvent {
        step,
        pair: (i, j),
        mechanism: mv.mechanism(),
        common_neighbor: mv.neighbor(),
        target,
        old,
        new,
    }
}

/// Applies `mv` to `(i, j)` after checking that the SIOH rules allow it.
pub fn apply_sioh_move(state: &mut SiohState, i: usize, j: usize, mv: Move, step: u64) -> Result<UpdateEvent> {
    if !sioh_moves(state, i, j)?.contains(&mv) {
        return Err(Error::InvalidParams(format!(
            "{mv:?} is not a legal update of ({}, {})",
            i + 1,
            j + 1
        )));
    }
    Ok(write_sioh_move(state, i, j, mv, step))
}

fn step_in_place(state: &mut SiohState, params: &SiohParams, rng: &mut SimRng, step: u64) -> Result<UpdateEvent> {
    let candidates = sih_candidate_pairs(&state.x);
    if candidates.is_empty() {
        return Err(Error::NoCandidatePair);
    }
    let (i, j) = candidates[rng.random_range(0..candidates.len())];
    let mv = if state.x.get(i, j) == 0 {
        Move::Symmetry
    } else {
        let [q1, q2, _] = params.weights();
        let u: f64 = rng.random();
        if u < q1 {
            Move::OpinionGossip
        } else if u < q1 + q2 {
            Move::PersonOpinionHomophily
        } else {
            draw_sih_move(&state.x, i, j, &params.sih, rng)
        }
    };
    Ok(write_sioh_move(state, i, j, mv, step))
}

/// One random SIOH update.
pub fn sioh_step(state: &SiohState, params: &SiohParams, rng: &mut SimRng) -> Result<(SiohState, UpdateEvent)> {
    let mut next = state.clone();
    let event = step_in_place(&mut next, params, rng, 0)?;
    Ok((next, event))
}

/// `X = X^T` and `X_ij = y_i y_j` on every link.
pub fn sioh_aligned(state: &SiohState) -> bool {
    state.x.is_sign_symmetric()
        && state
            .x
            .links()
            .all(|(i, j, v)| v == state.y.get(i) * state.y.get(j))
}

/// Equilibrium by exhaustion: no legal update changes `(X, y)`.
pub fn is_sioh_equilibrium(state: &SiohState) -> bool {
    sih_candidate_pairs(&state.x).into_iter().all(|(i, j)| {
        sioh_moves(state, i, j)
            .expect("candidate pair")
            .into_iter()
            .all(|mv| {
                let mut next = state.clone();
                write_sioh_move(&mut next, i, j, mv, 0);
                next == *state
            })
    })
}

/// Runs SIOH updates until `(X, y)` is an equilibrium or `max_steps`
/// updates have been applied.
pub fn run_sioh(
    state0: &SiohState,
    params: &SiohParams,
    seed: u64,
    max_steps: u64,
    log: bool,
) -> Result<AbsorptionRecord> {
    if max_steps == 0 {
        return Err(Error::InvalidParams("max_steps must be positive".into()));
    }
    let mut rng = SimRng::seed_from_u64(seed);
    let mut state = state0.clone();
    let mut events = log.then(Vec::new);
    let mut steps = 0;
    let mut absorbed = sioh_aligned(&state);
    while !absorbed && steps < max_steps {
        let event = step_in_place(&mut state, params, &mut rng, steps)?;
        steps += 1;
        if let Some(events) = events.as_mut() {
            events.push(event);
        }
        absorbed = sioh_aligned(&state);
    }
    Ok(AbsorptionRecord {
        absorbed,
        steps,
        final_state: state.x,
        final_opinions: Some(state.y),
        event_log: events,
    })
}

/// Re-applies a logged SIOH event sequence with legality checks.
pub fn replay_sioh(state0: &SiohState, events: &[UpdateEvent]) -> Result<SiohState> {
    let mut state = state0.clone();
    for (t, e) in events.iter().enumerate() {
        let mv = e
            .as_move()
            .ok_or_else(|| Error::InvalidParams(format!("event {t}: malformed mechanism")))?;
        let (i, j) = e.pair;
        let replayed = apply_sioh_move(&mut state, i, j, mv, e.step)
            .map_err(|err| Error::InvalidParams(format!("event {t}: {err}")))?;
        if replayed != *e {
            return Err(Error::InvalidParams(format!("event {t}: recorded values differ from replay")));
        }
    }
    Ok(state)
}
