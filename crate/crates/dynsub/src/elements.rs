//! Ground-set element identities and the alive-set bookkeeping shared by
//! every dynamic algorithm in this crate.

use std::collections::BTreeSet;
use std::fmt;

/// Opaque identity of a ground-set element. Ids are stable for the lifetime
/// of a run and unique within a ground set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u32);

impl ElementId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordered element set. `BTreeSet` keeps iteration deterministic, which the
/// seeded-replay guarantees rely on.
pub type ElementSet = BTreeSet<ElementId>;

/// Builds an [`ElementSet`] from raw ids; test and doc convenience.
pub fn set_of(ids: &[u32]) -> ElementSet {
    ids.iter().copied().map(ElementId).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundSetError {
    AlreadyAlive(ElementId),
    NotAlive(ElementId),
}

impl fmt::Display for GroundSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundSetError::AlreadyAlive(e) => write!(f, "element {e} is already alive"),
            GroundSetError::NotAlive(e) => write!(f, "element {e} is not alive"),
        }
    }
}

impl std::error::Error for GroundSetError {}

/// The current ground set: exactly the elements inserted and not
/// subsequently deleted.
#[derive(Debug, Clone, Default)]
pub struct GroundSet {
    alive: ElementSet,
}

impl GroundSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: ElementId) -> Result<(), GroundSetError> {
        if !self.alive.insert(e) {
            return Err(GroundSetError::AlreadyAlive(e));
        }
        Ok(())
    }

    pub fn delete(&mut self, e: ElementId) -> Result<(), GroundSetError> {
        if !self.alive.remove(&e) {
            return Err(GroundSetError::NotAlive(e));
        }
        Ok(())
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.alive.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    pub fn as_set(&self) -> &ElementSet {
        &self.alive
    }
}

/// Deterministic seed derivation for sub-streams: every instance owns an
/// independent generator keyed by (base seed, salt).
pub fn seed_mix(base: u64, salt: u64) -> u64 {
    // splitmix64 finalizer; stable across platforms and rustc versions.
    let mut z = base ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
