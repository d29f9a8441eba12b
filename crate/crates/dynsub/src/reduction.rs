//! The two-instance reduction for non-monotone objectives at a fixed
//! optimum guess.
//!
//! A run drives two thresholding instances over the same threshold
//! `τ = guess / (k·(3 + 1/(2α)))`: the first over the whole (filtered)
//! ground set, the second over everything outside the first's solution.
//! Because subsets of the first solution may beat the solution itself when
//! `f` is non-monotone, a subset-selection pass prunes it — either an
//! independent coin per element (α = 1/4) or a randomized double-greedy
//! sweep (α = 1/2). The reported answer is the best of the first solution,
//! its pruned subset, and the second solution.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataio::{EventOp, UpdateEvent};
use crate::elements::{seed_mix, ElementSet};
use crate::leveling::{LevelInstance, LevelingError, ThresholdParams};
use crate::oracle::{CountingOracle, OracleError, SharedObjective};

#[derive(Debug, Clone, PartialEq)]
pub enum ReductionError {
    Config(String),
    /// Insert of an element already alive in this run, or delete of an
    /// absent one. The state is unchanged.
    InconsistentEvent(UpdateEvent),
    Leveling(LevelingError),
    Oracle(OracleError),
}

impl fmt::Display for ReductionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionError::Config(msg) => write!(f, "invalid run parameters: {msg}"),
            ReductionError::InconsistentEvent(ev) => {
                write!(f, "{} of element {} is inconsistent with the run's ground set", ev.op, ev.element)
            }
            ReductionError::Leveling(e) => write!(f, "{e}"),
            ReductionError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ReductionError {}

impl From<LevelingError> for ReductionError {
    fn from(e: LevelingError) -> Self {
        ReductionError::Leveling(e)
    }
}

impl From<OracleError> for ReductionError {
    fn from(e: OracleError) -> Self {
        ReductionError::Oracle(e)
    }
}

/// How the first solution is pruned, and the approximation factor the
/// pruning guarantees for the best subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetStrategy {
    /// Randomized double greedy; α = 1/2, 4·|S| queries per pass.
    LocalSearch,
    /// Independent fair coin per element; α = 1/4, query-free.
    Uniform,
}

impl SubsetStrategy {
    pub fn alpha(self) -> f64 {
        match self {
            SubsetStrategy::LocalSearch => 0.5,
            SubsetStrategy::Uniform => 0.25,
        }
    }

    /// Threshold for a run of this strategy: `guess / (k·(3 + 1/(2α)))`.
    pub fn tau_for(self, k: usize, opt_guess: f64) -> f64 {
        opt_guess / (k as f64 * (3.0 + 1.0 / (2.0 * self.alpha())))
    }
}

impl fmt::Display for SubsetStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetStrategy::LocalSearch => write!(f, "local-search"),
            SubsetStrategy::Uniform => write!(f, "uniform"),
        }
    }
}

/// Keeps each element independently with probability 1/2. No queries.
pub fn uniform_subset(s: &ElementSet, rng: &mut impl Rng) -> ElementSet {
    s.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

/// Randomized double greedy over `s`: grows `X` from ∅ while shrinking `Y`
/// from `s`; element `i` is kept with probability `a'/(a'+b')` where `a` is
/// its gain to `X` and `b` the gain of dropping it from `Y`, both clamped
/// at zero (probability 0 when both clamp). Exactly `4·|s|` queries.
pub fn local_search_subset(
    s: &ElementSet,
    oracle: &mut CountingOracle,
    rng: &mut impl Rng,
) -> Result<ElementSet, OracleError> {
    let mut grown = ElementSet::new();
    let mut shrunk = s.clone();
    for &e in s {
        let mut grown_with = grown.clone();
        grown_with.insert(e);
        let a = oracle.value(&grown_with)? - oracle.value(&grown)?;
        let mut shrunk_without = shrunk.clone();
        shrunk_without.remove(&e);
        let b = oracle.value(&shrunk_without)? - oracle.value(&shrunk)?;
        let a_pos = a.max(0.0);
        let b_pos = b.max(0.0);
        let keep = if a_pos == 0.0 && b_pos == 0.0 {
            false
        } else {
            rng.gen::<f64>() < a_pos / (a_pos + b_pos)
        };
        if keep {
            grown.insert(e);
        } else {
            shrunk.remove(&e);
        }
    }
    debug_assert_eq!(grown, shrunk);
    Ok(grown)
}

/// One fixed-guess reduction run. Owns two thresholding instances with
/// independent seeds plus its own randomness for subset selection; query
/// counters are kept per category so the per-update accounting stays
/// inspectable.
pub struct ReductionRun {
    k: usize,
    opt_guess: f64,
    tau: f64,
    strategy: SubsetStrategy,
    inst1: LevelInstance,
    inst2: LevelInstance,
    alive: ElementSet,
    /// Queries of the subset-selection pass (4 per pruned element under
    /// local search).
    selection_oracle: CountingOracle,
    /// The three argmax value queries per update.
    report_oracle: CountingOracle,
    rng: ChaCha8Rng,
    /// Mirror of the first instance's last reported solution.
    last_s1: ElementSet,
    last_solution: ElementSet,
    last_value: f64,
}

impl ReductionRun {
    pub fn new(
        k: usize,
        opt_guess: f64,
        strategy: SubsetStrategy,
        objective: SharedObjective,
        seed: u64,
    ) -> Result<Self, ReductionError> {
        if !(opt_guess > 0.0) || !opt_guess.is_finite() {
            return Err(ReductionError::Config(format!(
                "optimum guess must be positive and finite, got {opt_guess}"
            )));
        }
        let tau = strategy.tau_for(k, opt_guess);
        let params = ThresholdParams::new(k, tau)?;
        Ok(Self {
            k,
            opt_guess,
            tau,
            strategy,
            inst1: LevelInstance::new(params, objective.clone(), seed_mix(seed, 1)),
            inst2: LevelInstance::new(params, objective.clone(), seed_mix(seed, 2)),
            alive: ElementSet::new(),
            selection_oracle: CountingOracle::new(objective.clone()),
            report_oracle: CountingOracle::new(objective),
            rng: ChaCha8Rng::seed_from_u64(seed_mix(seed, 3)),
            last_s1: ElementSet::new(),
            last_solution: ElementSet::new(),
            last_value: 0.0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn opt_guess(&self) -> f64 {
        self.opt_guess
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn strategy(&self) -> SubsetStrategy {
        self.strategy
    }

    pub fn alive(&self) -> &ElementSet {
        &self.alive
    }

    pub fn last_solution(&self) -> &ElementSet {
        &self.last_solution
    }

    pub fn last_value(&self) -> f64 {
        self.last_value
    }

    pub fn instance1(&self) -> &LevelInstance {
        &self.inst1
    }

    pub fn instance2(&self) -> &LevelInstance {
        &self.inst2
    }

    pub fn selection_queries(&self) -> u64 {
        self.selection_oracle.queries()
    }

    pub fn report_queries(&self) -> u64 {
        self.report_oracle.queries()
    }

    pub fn total_queries(&self) -> u64 {
        self.inst1.queries()
            + self.inst2.queries()
            + self.selection_oracle.queries()
            + self.report_oracle.queries()
    }

    /// Applies one update and reports the new answer with its value.
    ///
    /// Order per update: mirror the first solution into `Z` adjusted for
    /// the event, route the event (deletes go to both instances), extract
    /// the new first solution, prune it, replay the first solution's churn
    /// into the second instance, extract the second solution, and return
    /// the best of the three candidates (ties prefer the first solution,
    /// then the pruned subset).
    pub fn update(&mut self, event: UpdateEvent) -> Result<(ElementSet, f64), ReductionError> {
        match event.op {
            EventOp::Insert if self.alive.contains(&event.element) => {
                return Err(ReductionError::InconsistentEvent(event));
            }
            EventOp::Delete if !self.alive.contains(&event.element) => {
                return Err(ReductionError::InconsistentEvent(event));
            }
            _ => {}
        }

        debug_assert_eq!(self.last_s1, self.inst1.extract());
        let mut mirror = self.last_s1.clone();
        let v = event.element;
        match event.op {
            EventOp::Insert => {
                self.inst1.insert(v)?;
                mirror.insert(v);
                self.alive.insert(v);
            }
            EventOp::Delete => {
                self.inst1.delete(v)?;
                // absent in the second instance whenever it sat in the first solution
                self.inst2.delete(v)?;
                mirror.remove(&v);
                self.alive.remove(&v);
            }
        }

        let s1 = self.inst1.extract();
        let s1_pruned = match self.strategy {
            SubsetStrategy::Uniform => uniform_subset(&s1, &mut self.rng),
            SubsetStrategy::LocalSearch => {
                local_search_subset(&s1, &mut self.selection_oracle, &mut self.rng)?
            }
        };

        for &u in s1.difference(&mirror) {
            self.inst2.delete(u)?;
        }
        for &u in mirror.difference(&s1) {
            self.inst2.insert(u)?;
        }
        let s2 = self.inst2.extract();

        let f1 = self.report_oracle.value(&s1)?;
        let f1p = self.report_oracle.value(&s1_pruned)?;
        let f2 = self.report_oracle.value(&s2)?;
        let (mut best, mut best_value) = (s1.clone(), f1);
        if f1p > best_value {
            best = s1_pruned;
            best_value = f1p;
        }
        if f2 > best_value {
            best = s2;
            best_value = f2;
        }

        self.last_s1 = s1;
        self.last_solution = best.clone();
        self.last_value = best_value;
        Ok((best, best_value))
    }
}
