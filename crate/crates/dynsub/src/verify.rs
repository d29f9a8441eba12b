//! Brute-force optima and invariant auditors. Everything here is pure over
//! snapshots and charges its queries to whatever oracle the caller passes
//! in — audits run on shadow counters so they never perturb an algorithm's
//! own accounting.

use std::fmt;

use rand::Rng;

use crate::elements::{ElementId, ElementSet};
use crate::oracle::{CountingOracle, OracleError};

/// Hard cap on the alive-set size accepted by the exhaustive optimizers.
pub const BRUTE_FORCE_CAP: usize = 22;

pub const VALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum VerifyError {
    TooLarge { alive: usize, cap: usize },
    Oracle(OracleError),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::TooLarge { alive, cap } => {
                write!(f, "refusing exhaustive enumeration of {alive} elements (cap {cap})")
            }
            VerifyError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for VerifyError {}

impl From<OracleError> for VerifyError {
    fn from(e: OracleError) -> Self {
        VerifyError::Oracle(e)
    }
}

/// Result of an exhaustive search over all subsets of size at most `k`.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub opt_value: f64,
    pub opt_set: ElementSet,
    /// Number of subsets evaluated.
    pub enumerated: u64,
}

/// Exact optimum over subsets of `alive` with size at most `k`, by
/// depth-first enumeration in lexicographic subset order. Ties keep the
/// lexicographically first subset.
pub fn brute_force_opt(
    oracle: &mut CountingOracle,
    alive: &ElementSet,
    k: usize,
) -> Result<BruteForceResult, VerifyError> {
    if alive.len() > BRUTE_FORCE_CAP {
        return Err(VerifyError::TooLarge { alive: alive.len(), cap: BRUTE_FORCE_CAP });
    }
    let order: Vec<ElementId> = alive.iter().copied().collect();
    let mut best = BruteForceResult {
        opt_value: f64::NEG_INFINITY,
        opt_set: ElementSet::new(),
        enumerated: 0,
    };
    let mut prefix = ElementSet::new();

    fn descend(
        oracle: &mut CountingOracle,
        order: &[ElementId],
        start: usize,
        k: usize,
        prefix: &mut ElementSet,
        best: &mut BruteForceResult,
    ) -> Result<(), OracleError> {
        let value = oracle.value(prefix)?;
        best.enumerated += 1;
        if value > best.opt_value {
            best.opt_value = value;
            best.opt_set = prefix.clone();
        }
        if prefix.len() == k {
            return Ok(());
        }
        for idx in start..order.len() {
            prefix.insert(order[idx]);
            descend(oracle, order, idx + 1, k, prefix, best)?;
            prefix.remove(&order[idx]);
        }
        Ok(())
    }

    descend(oracle, &order, 0, k, &mut prefix, &mut best)?;
    Ok(best)
}

/// Same optimum via Gray-code subset enumeration; the independent second
/// route for cross-checks. Tie-breaking follows visit order, so only the
/// value is comparable with [`brute_force_opt`].
pub fn brute_force_opt_gray(
    oracle: &mut CountingOracle,
    alive: &ElementSet,
    k: usize,
) -> Result<BruteForceResult, VerifyError> {
    if alive.len() > BRUTE_FORCE_CAP {
        return Err(VerifyError::TooLarge { alive: alive.len(), cap: BRUTE_FORCE_CAP });
    }
    let order: Vec<ElementId> = alive.iter().copied().collect();
    let n = order.len();
    let mut best = BruteForceResult {
        opt_value: f64::NEG_INFINITY,
        opt_set: ElementSet::new(),
        enumerated: 0,
    };
    let mut current = ElementSet::new();
    let mut gray_prev = 0u64;
    let total: u64 = 1u64 << n;
    for m in 0..total {
        let gray = m ^ (m >> 1);
        let flipped = gray ^ gray_prev;
        if flipped != 0 {
            let bit = flipped.trailing_zeros() as usize;
            let e = order[bit];
            if gray & flipped != 0 {
                current.insert(e);
            } else {
                current.remove(&e);
            }
        }
        gray_prev = gray;
        if current.len() > k {
            continue;
        }
        let value = oracle.value(&current)?;
        best.enumerated += 1;
        if value > best.opt_value {
            best.opt_value = value;
            best.opt_set = current.clone();
        }
    }
    Ok(best)
}

/// Which arm of the reported-set dichotomy a solution was judged under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DichotomyBranch {
    /// `|S| = k` and `f(S) ≥ k·τ`.
    FullValue,
    /// `|S| < k` and every outside element gains less than τ.
    NoImprover,
}

#[derive(Debug, Clone)]
pub struct DichotomyReport {
    pub pass: bool,
    pub branch: DichotomyBranch,
    /// Offending element and its gain, when the no-improver arm fails.
    pub witness: Option<(ElementId, f64)>,
    /// `f(S)` when the full-value arm applies.
    pub solution_value: Option<f64>,
}

/// Audits the reported-set dichotomy: either the solution is full and worth
/// at least `k·τ`, or no alive outside element has marginal gain ≥ τ.
/// Set-size comparisons are exact; value comparisons use [`VALUE_TOLERANCE`].
pub fn audit_dichotomy(
    oracle: &mut CountingOracle,
    alive: &ElementSet,
    solution: &ElementSet,
    k: usize,
    tau: f64,
) -> Result<DichotomyReport, VerifyError> {
    if solution.len() == k {
        let value = oracle.value(solution)?;
        return Ok(DichotomyReport {
            pass: value >= k as f64 * tau - VALUE_TOLERANCE,
            branch: DichotomyBranch::FullValue,
            witness: None,
            solution_value: Some(value),
        });
    }
    for &v in alive {
        if solution.contains(&v) {
            continue;
        }
        let gain = oracle.marginal(v, solution)?;
        if gain >= tau + VALUE_TOLERANCE {
            return Ok(DichotomyReport {
                pass: false,
                branch: DichotomyBranch::NoImprover,
                witness: Some((v, gain)),
                solution_value: None,
            });
        }
    }
    Ok(DichotomyReport {
        pass: true,
        branch: DichotomyBranch::NoImprover,
        witness: None,
        solution_value: None,
    })
}

#[derive(Debug, Clone)]
pub struct AugmentationReport {
    pub pass: bool,
    pub trials: usize,
    /// Smallest observed `f(S) - (f(S ∪ C) - |C|·τ)`.
    pub worst_margin: f64,
    /// A violating subset, if any.
    pub witness: Option<ElementSet>,
}

/// For random subsets `C` of the alive set, checks
/// `f(S) ≥ f(S ∪ C) - |C|·τ` within [`VALUE_TOLERANCE`]. Callers invoke
/// this when `|S| < k`, where the no-improver arm implies the bound.
pub fn audit_augmentation_bound(
    oracle: &mut CountingOracle,
    alive: &ElementSet,
    solution: &ElementSet,
    tau: f64,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<AugmentationReport, VerifyError> {
    let alive_vec: Vec<ElementId> = alive.iter().copied().collect();
    let f_s = oracle.value(solution)?;
    let mut report =
        AugmentationReport { pass: true, trials, worst_margin: f64::INFINITY, witness: None };
    for _ in 0..trials {
        let mut c = ElementSet::new();
        for &e in &alive_vec {
            if rng.gen_bool(0.5) {
                c.insert(e);
            }
        }
        let union: ElementSet = solution.union(&c).copied().collect();
        let f_union = oracle.value(&union)?;
        let margin = f_s - (f_union - c.len() as f64 * tau);
        if margin < report.worst_margin {
            report.worst_margin = margin;
        }
        if margin < -VALUE_TOLERANCE {
            report.pass = false;
            if report.witness.is_none() {
                report.witness = Some(c);
            }
        }
    }
    Ok(report)
}
