//! The leveling backend for threshold-based dynamic maximization under a
//! cardinality constraint.
//!
//! An instance maintains a chain of chosen elements `e_1..e_T` with prefix
//! solutions `I_0 = ∅ ⊂ I_1 ⊂ … ⊂ I_T` (`I_i = I_{i-1} + e_i`) and nested
//! candidate pools `R_0 ⊇ R_1 ⊇ … ⊇ R_T ⊇ R_{T+1} = ∅`. Element `e_i` was
//! promoted into level `i` while its gain over `I_{i-1}` was at least the
//! threshold and `|I_{i-1}| < k`. Updates repair the chain locally: an
//! insert walks the pools top-down and takes over a level with probability
//! `1/|R_i|`; deleting a chosen element rebuilds the chain suffix from its
//! level's pool.
//!
//! Pool membership is stored per element as the maximum pool index it
//! belongs to, which the nesting invariant makes exact and O(1) to test.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::elements::{ElementId, ElementSet};
use crate::oracle::{CountingOracle, OracleError, SharedObjective};

#[derive(Debug, Clone, PartialEq)]
pub enum LevelingError {
    Config(String),
    DuplicateInsert(ElementId),
    Oracle(OracleError),
}

impl fmt::Display for LevelingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelingError::Config(msg) => write!(f, "invalid threshold parameters: {msg}"),
            LevelingError::DuplicateInsert(e) => {
                write!(f, "element {e} inserted while already present")
            }
            LevelingError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LevelingError {}

impl From<OracleError> for LevelingError {
    fn from(e: OracleError) -> Self {
        LevelingError::Oracle(e)
    }
}

/// Cardinality bound and promotion threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    k: usize,
    tau: f64,
}

impl ThresholdParams {
    pub fn new(k: usize, tau: f64) -> Result<Self, LevelingError> {
        if k < 1 {
            return Err(LevelingError::Config("k must be at least 1".into()));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(LevelingError::Config(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { k, tau })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// One dynamic thresholding instance. Single-threaded; owns its oracle
/// counter and its random stream, so identical seeds and update streams
/// replay identically.
pub struct LevelInstance {
    params: ThresholdParams,
    oracle: CountingOracle,
    rng: ChaCha8Rng,
    /// `chosen[i-1]` is `e_i`; the reported solution is the whole chain.
    chosen: Vec<ElementId>,
    /// Alive elements and their maximum pool index (0 means `R_0` only).
    levels: HashMap<ElementId, usize>,
    /// `pool_sizes[r] = |R_r|`; index 0 counts all alive elements.
    pool_sizes: Vec<usize>,
    absent_delete_warnings: u64,
}

impl LevelInstance {
    /// A fresh, empty instance. Consumes no queries.
    pub fn new(params: ThresholdParams, objective: SharedObjective, seed: u64) -> Self {
        Self {
            params,
            oracle: CountingOracle::new(objective),
            rng: ChaCha8Rng::seed_from_u64(seed),
            chosen: Vec::new(),
            levels: HashMap::new(),
            pool_sizes: vec![0; 2],
            absent_delete_warnings: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn tau(&self) -> f64 {
        self.params.tau
    }

    pub fn queries(&self) -> u64 {
        self.oracle.queries()
    }

    pub fn absent_delete_warnings(&self) -> u64 {
        self.absent_delete_warnings
    }

    /// Current solution `I_T`; free of charge.
    pub fn extract(&self) -> ElementSet {
        self.chosen.iter().copied().collect()
    }

    pub fn solution_len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_alive(&self, e: ElementId) -> bool {
        self.levels.contains_key(&e)
    }

    pub fn alive_len(&self) -> usize {
        self.pool_sizes[0]
    }

    /// Alive elements (`R_0`), sorted.
    pub fn alive(&self) -> ElementSet {
        self.levels.keys().copied().collect()
    }

    /// `|R_r|`; pools beyond the chain are empty.
    pub fn pool_size(&self, r: usize) -> usize {
        self.pool_sizes.get(r).copied().unwrap_or(0)
    }

    /// Maximum pool index of `e`, if alive.
    pub fn max_pool_level(&self, e: ElementId) -> Option<usize> {
        self.levels.get(&e).copied()
    }

    /// The chain `e_1..e_T`.
    pub fn chain(&self) -> &[ElementId] {
        &self.chosen
    }

    /// Promotion test: gain of `e` over `base` at least τ and `|base| < k`.
    /// Always charges two set queries.
    pub fn promote(&mut self, base: &ElementSet, e: ElementId) -> Result<bool, OracleError> {
        let gain = self.oracle.union_gain(e, base)?;
        Ok(gain >= self.params.tau && base.len() < self.params.k)
    }

    /// Inserts `v`. Errors on duplicate inserts with the state unchanged.
    pub fn insert(&mut self, v: ElementId) -> Result<(), LevelingError> {
        if self.levels.contains_key(&v) {
            return Err(LevelingError::DuplicateInsert(v));
        }
        self.levels.insert(v, 0);
        self.ensure_pool_len(2);
        self.pool_sizes[0] += 1;

        let walk_end = self.chosen.len() + 1;
        for i in 1..=walk_end {
            if !self.promote_at(i - 1, v)? {
                return Ok(());
            }
            self.set_level(v, i);
            let pool = self.pool_sizes[i];
            debug_assert!(pool >= 1);
            if self.rng.gen_range(0..pool) == 0 {
                // v takes over level i; refilter the next pool and rebuild above
                self.chosen.truncate(i - 1);
                self.chosen.push(v);
                let members = self.pool_members(i);
                for e in members {
                    let pass = self.promote_at(i, e)?;
                    self.set_level(e, if pass { i + 1 } else { i });
                }
                self.construct_level(i + 1)?;
                return Ok(());
            }
        }
        // the frontier pool holds only v, so the takeover above always fires
        debug_assert!(false, "insert walk passed the frontier without promoting");
        Ok(())
    }

    /// Deletes `v`. Deleting an absent element is a no-op recorded as a
    /// warning. Returns whether the element was present.
    pub fn delete(&mut self, v: ElementId) -> Result<bool, LevelingError> {
        let Some(level) = self.levels.remove(&v) else {
            self.absent_delete_warnings += 1;
            return Ok(false);
        };
        self.pool_sizes[0] -= 1;
        for r in 1..=level {
            self.pool_sizes[r] -= 1;
        }
        if let Some(pos) = self.chosen.iter().position(|&e| e == v) {
            self.construct_level(pos + 1)?;
        }
        Ok(true)
    }

    /// Rebuilds levels `base..` from pool `R_base`: processes a fresh random
    /// permutation, promoting elements whose gain over the growing prefix
    /// clears τ and re-deriving every pool membership above `base`.
    pub fn construct_level(&mut self, base: usize) -> Result<(), LevelingError> {
        if base < 1 || base > self.chosen.len() + 1 {
            return Err(LevelingError::Config(format!(
                "construct_level base {base} out of range for chain length {}",
                self.chosen.len()
            )));
        }
        self.chosen.truncate(base - 1);
        let mut pool = self.pool_members(base);
        for &e in &pool {
            self.set_level(e, base);
        }
        debug_assert!(self.pool_sizes.iter().skip(base + 1).all(|&s| s == 0));

        // Fisher–Yates on the instance's own stream
        for i in (1..pool.len()).rev() {
            let j = self.rng.gen_range(0..=i);
            pool.swap(i, j);
        }

        let mut level = base;
        for e in pool {
            if self.promote_at(level - 1, e)? {
                self.chosen.push(e);
                self.set_level(e, level);
                level += 1;
            } else if level > base {
                let z = self.lowest_failing_level(base, level - 1, e)?;
                self.set_level(e, z);
            }
            // failing at the rebuild base leaves e in R_base only
        }
        Ok(())
    }

    /// Debug dump, one line per level: index, chosen element, pool size.
    pub fn dump_levels(&self) -> String {
        let mut out = format!(
            "T={} k={} tau={} alive={}\n",
            self.chosen.len(),
            self.params.k,
            self.params.tau,
            self.alive_len()
        );
        for (idx, e) in self.chosen.iter().enumerate() {
            let i = idx + 1;
            out.push_str(&format!("level {i}: e={} |R_{i}|={}\n", e, self.pool_size(i)));
        }
        out
    }

    /// Gain test against the prefix `I_{prefix_len}`; two queries, also for
    /// elements already in the prefix (their union gain is zero).
    fn promote_at(&mut self, prefix_len: usize, e: ElementId) -> Result<bool, OracleError> {
        let base: ElementSet = self.chosen[..prefix_len].iter().copied().collect();
        let gain = self.oracle.union_gain(e, &base)?;
        Ok(gain >= self.params.tau && prefix_len < self.params.k)
    }

    /// Lowest `z` in `[lo, hi]` with a failing promote test against `I_z`,
    /// given that `I_hi` is known to fail. Gains only shrink along the
    /// chain, so the failures form a suffix and binary search applies.
    fn lowest_failing_level(
        &mut self,
        lo: usize,
        hi: usize,
        e: ElementId,
    ) -> Result<usize, OracleError> {
        let (mut lo, mut hi) = (lo, hi);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.promote_at(mid, e)? {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Members of `R_r`, sorted by id for deterministic downstream shuffles.
    fn pool_members(&self, r: usize) -> Vec<ElementId> {
        let mut members: Vec<ElementId> =
            self.levels.iter().filter(|&(_, &l)| l >= r).map(|(&e, _)| e).collect();
        members.sort_unstable();
        members
    }

    fn set_level(&mut self, e: ElementId, new: usize) {
        let old = *self.levels.get(&e).expect("set_level on alive element");
        if new == old {
            return;
        }
        self.ensure_pool_len(new + 2);
        if new > old {
            for r in old + 1..=new {
                self.pool_sizes[r] += 1;
            }
        } else {
            for r in new + 1..=old {
                self.pool_sizes[r] -= 1;
            }
        }
        self.levels.insert(e, new);
    }

    fn ensure_pool_len(&mut self, len: usize) {
        if self.pool_sizes.len() < len {
            self.pool_sizes.resize(len, 0);
        }
    }

    #[cfg(test)]
    fn force_pool_level(&mut self, e: ElementId, level: usize) {
        if !self.levels.contains_key(&e) {
            self.levels.insert(e, 0);
            self.ensure_pool_len(2);
            self.pool_sizes[0] += 1;
        }
        self.set_level(e, level);
    }
}
