//! The optimum-guess orchestrator: maintains reduction runs on the
//! geometric guess grid `(1+ε')^i`, routing each element only to the
//! guesses where it can both fit under the guess and matter for it.
//!
//! Element `v` with singleton value `f({v})` participates exactly in the
//! indices `i` with `(ε'/k)·(1+ε')^i ≤ f({v}) ≤ (1+ε')^i`. Runs are
//! created lazily when their first windowed element arrives and destroyed
//! when the last one leaves. The reported answer is the best of the active
//! runs' latest solutions, ties resolved to the lowest guess index.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::dataio::{EventOp, UpdateEvent};
use crate::elements::{seed_mix, ElementId, ElementSet};
use crate::oracle::{CountingOracle, OracleError, SharedObjective};
use crate::reduction::{ReductionError, ReductionRun, SubsetStrategy};

/// Above this accuracy knob the window arithmetic can leave elements with
/// empty windows and the guarantee derivation no longer applies.
pub const EPS_PRIME_GUARANTEE_LIMIT: f64 = 0.618;

#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    Config(String),
    /// Insert of a tracked element or delete of an untracked one.
    InconsistentEvent(UpdateEvent),
    Reduction(ReductionError),
    Oracle(OracleError),
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::Config(msg) => write!(f, "invalid grid parameters: {msg}"),
            GridError::InconsistentEvent(ev) => {
                write!(f, "{} of element {} is inconsistent with the ground set", ev.op, ev.element)
            }
            GridError::Reduction(e) => write!(f, "{e}"),
            GridError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GridError {}

impl From<ReductionError> for GridError {
    fn from(e: ReductionError) -> Self {
        GridError::Reduction(e)
    }
}

impl From<OracleError> for GridError {
    fn from(e: OracleError) -> Self {
        GridError::Oracle(e)
    }
}

/// Guess indices admitting an element of singleton value `fv`: the `i`
/// with `(ε'/k)·(1+ε')^i ≤ fv ≤ (1+ε')^i`, i.e.
/// `⌈log_{1+ε'} fv⌉ ≤ i ≤ ⌊log_{1+ε'}(k·fv/ε')⌋`. Zero-value elements get
/// no window. Bounds are fixed up against the defining inequalities so
/// exact powers land inclusively on both sides.
pub fn element_window(fv: f64, eps_prime: f64, k: usize) -> Option<(i64, i64)> {
    if !(fv > 0.0) || !fv.is_finite() {
        return None;
    }
    let base = 1.0 + eps_prime;
    let guess = |i: i64| base.powi(i as i32);
    // smallest i with (1+ε')^i ≥ fv
    let mut lo = (fv.ln() / base.ln()).ceil() as i64;
    for _ in 0..4 {
        if guess(lo) < fv {
            lo += 1;
        } else if lo > i64::MIN && guess(lo - 1) >= fv {
            lo -= 1;
        } else {
            break;
        }
    }
    // largest i with (ε'/k)·(1+ε')^i ≤ fv
    let cap = k as f64 * fv / eps_prime;
    let mut hi = (cap.ln() / base.ln()).floor() as i64;
    for _ in 0..4 {
        if eps_prime / k as f64 * guess(hi) > fv {
            hi -= 1;
        } else if eps_prime / k as f64 * guess(hi + 1) <= fv {
            hi += 1;
        } else {
            break;
        }
    }
    (lo <= hi).then_some((lo, hi))
}

struct RunSlot {
    run: ReductionRun,
    /// Alive elements whose window covers this guess index.
    refs: usize,
}

struct ElementRecord {
    /// Singleton value cached at insert time; deletes must not re-probe.
    singleton_value: f64,
    window: Option<(i64, i64)>,
}

/// The lazy grid of reduction runs across optimum guesses.
pub struct GuessGrid {
    eps_prime: f64,
    k: usize,
    strategy: SubsetStrategy,
    seed: u64,
    objective: SharedObjective,
    runs: BTreeMap<i64, RunSlot>,
    elements: HashMap<ElementId, ElementRecord>,
    /// Singleton probes (and the rare empty-answer report query).
    probe_oracle: CountingOracle,
    /// Queries of runs that were destroyed; keeps the total monotone.
    retired_queries: u64,
    empty_value: Option<f64>,
    last_answer: (ElementSet, f64),
}

impl GuessGrid {
    pub fn new(
        eps_prime: f64,
        k: usize,
        strategy: SubsetStrategy,
        objective: SharedObjective,
        seed: u64,
    ) -> Result<Self, GridError> {
        if !(eps_prime > 0.0) || !eps_prime.is_finite() {
            return Err(GridError::Config(format!(
                "eps-prime must be positive and finite, got {eps_prime}"
            )));
        }
        if k < 1 {
            return Err(GridError::Config("k must be at least 1".into()));
        }
        Ok(Self {
            eps_prime,
            k,
            strategy,
            seed,
            objective: objective.clone(),
            runs: BTreeMap::new(),
            elements: HashMap::new(),
            probe_oracle: CountingOracle::new(objective),
            retired_queries: 0,
            empty_value: None,
            last_answer: (ElementSet::new(), 0.0),
        })
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn guess_at(&self, index: i64) -> f64 {
        (1.0 + self.eps_prime).powi(index as i32)
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn active_runs(&self) -> impl Iterator<Item = (i64, &ReductionRun)> {
        self.runs.iter().map(|(&i, slot)| (i, &slot.run))
    }

    pub fn window_of(&self, e: ElementId) -> Option<(i64, i64)> {
        self.elements.get(&e).and_then(|rec| rec.window)
    }

    pub fn alive_len(&self) -> usize {
        self.elements.len()
    }

    /// Sum of all run counters (including destroyed runs) plus the
    /// orchestrator's own probes. Monotone over time.
    pub fn total_queries(&self) -> u64 {
        self.retired_queries
            + self.probe_oracle.queries()
            + self.runs.values().map(|slot| slot.run.total_queries()).sum::<u64>()
    }

    pub fn last_answer(&self) -> &(ElementSet, f64) {
        &self.last_answer
    }

    /// Routes one update to every run in the element's window and returns
    /// the best solution across active runs. An insert costs one singleton
    /// probe before fan-out; a delete reuses the window cached at insert.
    pub fn apply_update(&mut self, event: UpdateEvent) -> Result<(ElementSet, f64), GridError> {
        let v = event.element;
        match event.op {
            EventOp::Insert => {
                if self.elements.contains_key(&v) {
                    return Err(GridError::InconsistentEvent(event));
                }
                let singleton: ElementSet = [v].into_iter().collect();
                let fv = self.probe_oracle.value(&singleton)?;
                let window = element_window(fv, self.eps_prime, self.k);
                if let Some((lo, hi)) = window {
                    for i in lo..=hi {
                        let slot = match self.runs.entry(i) {
                            std::collections::btree_map::Entry::Occupied(o) => o.into_mut(),
                            std::collections::btree_map::Entry::Vacant(vac) => {
                                let guess = (1.0 + self.eps_prime).powi(i as i32);
                                let run = ReductionRun::new(
                                    self.k,
                                    guess,
                                    self.strategy,
                                    self.objective.clone(),
                                    seed_mix(self.seed, i as u64),
                                )?;
                                vac.insert(RunSlot { run, refs: 0 })
                            }
                        };
                        slot.refs += 1;
                        slot.run.update(event)?;
                    }
                }
                self.elements.insert(v, ElementRecord { singleton_value: fv, window });
            }
            EventOp::Delete => {
                let Some(record) = self.elements.remove(&v) else {
                    return Err(GridError::InconsistentEvent(event));
                };
                if let Some((lo, hi)) = record.window {
                    for i in lo..=hi {
                        let slot = self.runs.get_mut(&i).expect("windowed run exists");
                        slot.run.update(event)?;
                        slot.refs -= 1;
                        if slot.refs == 0 {
                            let slot = self.runs.remove(&i).expect("slot present");
                            self.retired_queries += slot.run.total_queries();
                        }
                    }
                }
            }
        }
        self.last_answer = self.best_answer()?;
        Ok(self.last_answer.clone())
    }

    pub fn cached_singleton_value(&self, e: ElementId) -> Option<f64> {
        self.elements.get(&e).map(|rec| rec.singleton_value)
    }

    fn best_answer(&mut self) -> Result<(ElementSet, f64), GridError> {
        let mut best: Option<(ElementSet, f64)> = None;
        for slot in self.runs.values() {
            let candidate = (slot.run.last_solution().clone(), slot.run.last_value());
            match &best {
                Some((_, value)) if candidate.1 <= *value => {}
                _ => best = Some(candidate),
            }
        }
        match best {
            Some(answer) => Ok(answer),
            None => {
                // no active runs: report the empty set at its value
                if self.empty_value.is_none() {
                    self.empty_value = Some(self.probe_oracle.value(&ElementSet::new())?);
                }
                Ok((ElementSet::new(), self.empty_value.unwrap()))
            }
        }
    }
}
