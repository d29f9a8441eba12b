//! The set-query oracle contract. Every algorithm in this crate pays for
//! objective evaluations through a [`CountingOracle`]; the query counter is
//! the sole cost model.

use std::fmt;
use std::sync::Arc;

use crate::elements::{ElementId, ElementSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// A queried set mentions an element outside the objective's universe.
    OutsideUniverse(ElementId),
    /// `marginal(e, A)` requires `e` not already in `A`.
    ElementInSet(ElementId),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::OutsideUniverse(e) => {
                write!(f, "element {e} is outside the objective universe")
            }
            OracleError::ElementInSet(e) => {
                write!(f, "marginal gain of {e} requested relative to a set containing it")
            }
        }
    }
}

impl std::error::Error for OracleError {}

/// A non-negative submodular set function over a finite universe.
///
/// `evaluate` is the raw, uncounted function; all algorithmic access goes
/// through [`CountingOracle`] so that queries are charged.
pub trait Objective: Send + Sync {
    /// Universe size; valid ids are `0..universe_size`.
    fn universe_size(&self) -> usize;

    fn evaluate(&self, set: &ElementSet) -> f64;

    fn contains(&self, e: ElementId) -> bool {
        e.index() < self.universe_size()
    }
}

/// Shared handle to an objective.
pub type SharedObjective = Arc<dyn Objective>;

/// Wraps an objective and counts set queries: `value` charges 1,
/// `marginal` charges 2 (it is computed as `f(A + e) - f(A)`).
pub struct CountingOracle {
    objective: SharedObjective,
    queries: u64,
}

impl CountingOracle {
    pub fn new(objective: SharedObjective) -> Self {
        Self { objective, queries: 0 }
    }

    pub fn objective(&self) -> &SharedObjective {
        &self.objective
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// One set query: `f(a)`.
    pub fn value(&mut self, a: &ElementSet) -> Result<f64, OracleError> {
        for &e in a {
            if !self.objective.contains(e) {
                return Err(OracleError::OutsideUniverse(e));
            }
        }
        self.queries += 1;
        let v = self.objective.evaluate(a);
        debug_assert!(v >= 0.0, "objective returned a negative value: {v}");
        Ok(v)
    }

    /// Marginal gain `f(a + e) - f(a)`; two set queries.
    pub fn marginal(&mut self, e: ElementId, a: &ElementSet) -> Result<f64, OracleError> {
        if a.contains(&e) {
            return Err(OracleError::ElementInSet(e));
        }
        let mut with_e = a.clone();
        with_e.insert(e);
        let high = self.value(&with_e)?;
        let low = self.value(a)?;
        Ok(high - low)
    }

    /// Marginal gain with set-union semantics: `f(a ∪ {e}) - f(a)`, defined
    /// (and zero) even when `e ∈ a`. Still two set queries. This is the form
    /// the thresholding backend uses for its promote tests.
    pub fn union_gain(&mut self, e: ElementId, a: &ElementSet) -> Result<f64, OracleError> {
        let mut with_e = a.clone();
        with_e.insert(e);
        let high = self.value(&with_e)?;
        let low = self.value(a)?;
        Ok(high - low)
    }
}
