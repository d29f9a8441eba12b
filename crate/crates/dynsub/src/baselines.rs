//! Comparison algorithms: a dynamic adaptation of the sample-and-swap
//! streaming selector, and a uniformly random selector.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataio::{EventOp, UpdateEvent};
use crate::elements::{seed_mix, ElementId, ElementSet};
use crate::oracle::{CountingOracle, OracleError, SharedObjective};

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineError {
    Config(String),
    InconsistentEvent(UpdateEvent),
    Oracle(OracleError),
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::Config(msg) => write!(f, "invalid baseline parameters: {msg}"),
            BaselineError::InconsistentEvent(ev) => {
                write!(f, "{} of element {} is inconsistent with the ground set", ev.op, ev.element)
            }
            BaselineError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BaselineError {}

impl From<OracleError> for BaselineError {
    fn from(e: OracleError) -> Self {
        BaselineError::Oracle(e)
    }
}

/// Streaming sample-and-swap selector made dynamic by restarting the pass
/// whenever a solution member is deleted.
///
/// Per arrival: with probability `1-q` the element is ignored outright.
/// Otherwise its gain over the current solution is measured (two queries);
/// it is admitted while there is room and the gain is strictly positive,
/// or it evicts the member with the smallest recorded admission gain when
/// the new gain is at least `(1+c)` times that record.
pub struct SampleStreamState {
    k: usize,
    q: f64,
    c: f64,
    oracle: CountingOracle,
    /// Solution members with the gain recorded at their admission.
    members: Vec<(ElementId, f64)>,
    /// Alive elements in arrival order; restarts replay this order.
    alive_order: Vec<ElementId>,
    seed: u64,
    restarts: u64,
    coin_rng: ChaCha8Rng,
}

impl SampleStreamState {
    pub fn new(
        k: usize,
        q: f64,
        c: f64,
        objective: SharedObjective,
        seed: u64,
    ) -> Result<Self, BaselineError> {
        if k < 1 {
            return Err(BaselineError::Config("k must be at least 1".into()));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(BaselineError::Config(format!("q must lie in (0, 1], got {q}")));
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(BaselineError::Config(format!("c must be non-negative, got {c}")));
        }
        Ok(Self {
            k,
            q,
            c,
            oracle: CountingOracle::new(objective),
            members: Vec::new(),
            alive_order: Vec::new(),
            seed,
            restarts: 0,
            coin_rng: ChaCha8Rng::seed_from_u64(seed_mix(seed, 0)),
        })
    }

    pub fn solution(&self) -> ElementSet {
        self.members.iter().map(|&(e, _)| e).collect()
    }

    pub fn recorded_gain(&self, e: ElementId) -> Option<f64> {
        self.members.iter().find(|&&(m, _)| m == e).map(|&(_, g)| g)
    }

    pub fn queries(&self) -> u64 {
        self.oracle.queries()
    }

    pub fn restarts(&self) -> u64 {
        self.restarts
    }

    pub fn alive_len(&self) -> usize {
        self.alive_order.len()
    }

    /// One streaming arrival against the current solution.
    pub fn stream_arrive(&mut self, u: ElementId) -> Result<(), BaselineError> {
        if !self.coin_rng.gen_bool(self.q) {
            return Ok(());
        }
        let solution = self.solution();
        let gain = self.oracle.marginal(u, &solution)?;
        if self.members.len() < self.k {
            if gain > 0.0 {
                self.members.push((u, gain));
            }
            return Ok(());
        }
        // evict the member with the smallest recorded gain, ties by id
        let (weakest_idx, &(_, weakest_gain)) = self
            .members
            .iter()
            .enumerate()
            .min_by(|(_, (ea, ga)), (_, (eb, gb))| {
                ga.partial_cmp(gb).unwrap().then(ea.cmp(eb))
            })
            .expect("members nonempty when full");
        if gain >= (1.0 + self.c) * weakest_gain {
            self.members[weakest_idx] = (u, gain);
        }
        Ok(())
    }

    /// Dynamic wrapper: inserts stream in; deletes outside the solution
    /// only trim the arrival order; deleting a member restarts the pass
    /// over the remaining arrival order with a fresh coin sub-stream.
    pub fn dynamic_update(&mut self, event: UpdateEvent) -> Result<ElementSet, BaselineError> {
        let v = event.element;
        match event.op {
            EventOp::Insert => {
                if self.alive_order.contains(&v) {
                    return Err(BaselineError::InconsistentEvent(event));
                }
                self.alive_order.push(v);
                self.stream_arrive(v)?;
            }
            EventOp::Delete => {
                let Some(pos) = self.alive_order.iter().position(|&e| e == v) else {
                    return Err(BaselineError::InconsistentEvent(event));
                };
                self.alive_order.remove(pos);
                if self.members.iter().any(|&(m, _)| m == v) {
                    self.restarts += 1;
                    self.coin_rng = ChaCha8Rng::seed_from_u64(seed_mix(self.seed, self.restarts));
                    self.members.clear();
                    let replay = self.alive_order.clone();
                    for u in replay {
                        self.stream_arrive(u)?;
                    }
                }
            }
        }
        Ok(self.solution())
    }
}

/// Uniform subset of size `min(k, |alive|)`; selection itself consumes no
/// queries.
pub fn random_baseline(alive: &ElementSet, k: usize, rng: &mut impl Rng) -> ElementSet {
    let mut pool: Vec<ElementId> = alive.iter().copied().collect();
    if pool.len() <= k {
        return pool.into_iter().collect();
    }
    for i in 0..k {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::set_of;
    use crate::objectives::{CoverageObjective, MaxCutObjective, ModularObjective};
    use std::sync::Arc;

    fn weights(w: Vec<f64>) -> SharedObjective {
        Arc::new(ModularObjective::new(w))
    }

    #[test]
    fn parameters_are_validated() {
        let obj = weights(vec![1.0]);
        assert!(SampleStreamState::new(0, 0.5, 1.0, obj.clone(), 1).is_err());
        assert!(SampleStreamState::new(1, 0.0, 1.0, obj.clone(), 1).is_err());
        assert!(SampleStreamState::new(1, 1.5, 1.0, obj.clone(), 1).is_err());
        assert!(SampleStreamState::new(1, 0.5, -0.1, obj, 1).is_err());
    }

    #[test]
    fn replacement_follows_the_swap_rule() {
        // q = 1 processes everything; k = 1, c = 0.5
        // f({0}) = 2, Δ(1|{0}) = 4 ≥ 1.5 · 2 → replace
        let obj = weights(vec![2.0, 4.0, 5.9]);
        let mut state = SampleStreamState::new(1, 1.0, 0.5, obj, 1).unwrap();
        state.stream_arrive(ElementId(0)).unwrap();
        assert_eq!(state.solution(), set_of(&[0]));
        assert_eq!(state.recorded_gain(ElementId(0)), Some(2.0));
        state.stream_arrive(ElementId(1)).unwrap();
        assert_eq!(state.solution(), set_of(&[1]));
        assert_eq!(state.recorded_gain(ElementId(1)), Some(4.0));
        // 5.9 < 1.5 · 4 = 6 → kept out
        state.stream_arrive(ElementId(2)).unwrap();
        assert_eq!(state.solution(), set_of(&[1]));
    }

    #[test]
    fn zero_gain_elements_are_not_admitted() {
        let obj = weights(vec![0.0, 1.0]);
        let mut state = SampleStreamState::new(2, 1.0, 1.0, obj, 1).unwrap();
        state.stream_arrive(ElementId(0)).unwrap();
        assert!(state.solution().is_empty());
        state.stream_arrive(ElementId(1)).unwrap();
        assert_eq!(state.solution(), set_of(&[1]));
    }

    #[test]
    fn replacement_gains_never_decrease_at_a_slot() {
        // monotone replacements: new gain ≥ (1+c) · old gain > old gain
        let obj = weights(vec![1.0, 3.0, 7.0, 20.0]);
        let mut state = SampleStreamState::new(1, 1.0, 1.0, obj, 1).unwrap();
        let mut last = 0.0;
        for e in 0..4u32 {
            state.stream_arrive(ElementId(e)).unwrap();
            let gain = state.recorded_gain(*state.solution().iter().next().unwrap()).unwrap();
            assert!(gain >= last);
            last = gain;
        }
        assert_eq!(state.solution(), set_of(&[3]));
    }

    #[test]
    fn delete_outside_solution_costs_nothing() {
        let obj = weights(vec![5.0, 1.0]);
        let mut state = SampleStreamState::new(1, 1.0, 1.0, obj, 1).unwrap();
        state.dynamic_update(UpdateEvent::insert(ElementId(0), 0)).unwrap();
        state.dynamic_update(UpdateEvent::insert(ElementId(1), 1)).unwrap();
        let queries = state.queries();
        let solution = state.dynamic_update(UpdateEvent::delete(ElementId(1), 2)).unwrap();
        assert_eq!(solution, set_of(&[0]));
        assert_eq!(state.queries(), queries, "no restart, no queries");
        assert_eq!(state.restarts(), 0);
    }

    #[test]
    fn deleting_a_member_restarts_over_survivors() {
        let obj = weights(vec![5.0, 1.0]);
        let mut state = SampleStreamState::new(1, 1.0, 1.0, obj, 1).unwrap();
        state.dynamic_update(UpdateEvent::insert(ElementId(0), 0)).unwrap();
        state.dynamic_update(UpdateEvent::insert(ElementId(1), 1)).unwrap();
        assert_eq!(state.solution(), set_of(&[0]));
        let solution = state.dynamic_update(UpdateEvent::delete(ElementId(0), 2)).unwrap();
        assert_eq!(solution, set_of(&[1]), "replay admits the survivor");
        assert_eq!(state.restarts(), 1);
    }

    #[test]
    fn q_zero_like_stream_never_selects() {
        // smallest admissible q with a coin stream that still skips; use a
        // coverage objective so admission would be certain if processed
        let cover: SharedObjective = Arc::new(
            CoverageObjective::new(vec![vec![0], vec![1]], vec![1.0, 1.0]).unwrap(),
        );
        let mut state = SampleStreamState::new(2, 1e-9, 1.0, cover, 7).unwrap();
        for e in 0..2u32 {
            state.dynamic_update(UpdateEvent::insert(ElementId(e), e as usize)).unwrap();
        }
        assert!(state.solution().is_empty());
        assert_eq!(state.queries(), 0, "skipped arrivals must not query");
    }

    #[test]
    fn restart_replays_are_deterministic() {
        let trace = |seed: u64| {
            let graph: SharedObjective =
                Arc::new(MaxCutObjective::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap());
            let mut state = SampleStreamState::new(2, 0.7, 1.0, graph, seed).unwrap();
            let mut out = Vec::new();
            for e in 0..6u32 {
                out.push(state.dynamic_update(UpdateEvent::insert(ElementId(e), 0)).unwrap());
            }
            out.push(state.dynamic_update(UpdateEvent::delete(ElementId(1), 0)).unwrap());
            out.push(state.dynamic_update(UpdateEvent::delete(ElementId(2), 0)).unwrap());
            (out, state.queries())
        };
        assert_eq!(trace(11), trace(11));
        // events against an inconsistent ground set are rejected
        let graph: SharedObjective = Arc::new(MaxCutObjective::new(3, &[(0, 1)]).unwrap());
        let mut state = SampleStreamState::new(2, 1.0, 1.0, graph, 3).unwrap();
        state.dynamic_update(UpdateEvent::insert(ElementId(0), 0)).unwrap();
        assert!(state.dynamic_update(UpdateEvent::insert(ElementId(0), 1)).is_err());
        assert!(state.dynamic_update(UpdateEvent::delete(ElementId(2), 1)).is_err());
    }

    #[test]
    fn random_baseline_respects_size_and_determinism() {
        use rand::SeedableRng;
        let alive = set_of(&[0, 1, 2, 3, 4, 5, 6, 7]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pick = random_baseline(&alive, 3, &mut rng);
        assert_eq!(pick.len(), 3);
        assert!(pick.is_subset(&alive));
        // same seed, same alive set → same output
        let mut rng2 = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(random_baseline(&alive, 3, &mut rng2), pick);
        // whole set when k covers it
        let mut rng3 = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(random_baseline(&alive, 20, &mut rng3), alive);
    }
}
