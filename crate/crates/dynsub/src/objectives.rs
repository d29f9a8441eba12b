//! Shipped objectives: the Max-Cut and log-determinant functions used by the
//! benchmarks (both non-monotone), plus a small weighted-coverage function
//! that backend tests use as a monotone counterpart.

use std::fmt;

use crate::elements::{ElementId, ElementSet};
use crate::matrix::{determinant, Matrix, MatrixError};
use crate::oracle::Objective;

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveError {
    SelfLoop(u32),
    VertexOutOfRange { vertex: u32, n: usize },
    Asymmetric { row: usize, col: usize },
    NegativeDiagonal { row: usize, value: f64 },
    NotPsd { eigenvalue: f64 },
    Matrix(MatrixError),
    NegativeWeight { item: usize, value: f64 },
    CoverOutOfRange { element: usize, item: u32 },
}

impl fmt::Display for ObjectiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveError::SelfLoop(v) => write!(f, "self-loop on vertex {v}"),
            ObjectiveError::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {vertex} out of range for {n} vertices")
            }
            ObjectiveError::Asymmetric { row, col } => {
                write!(f, "kernel is not symmetric at ({row}, {col})")
            }
            ObjectiveError::NegativeDiagonal { row, value } => {
                write!(f, "kernel diagonal entry {row} is negative ({value})")
            }
            ObjectiveError::NotPsd { eigenvalue } => {
                write!(f, "kernel has a negative eigenvalue ({eigenvalue})")
            }
            ObjectiveError::Matrix(e) => write!(f, "{e}"),
            ObjectiveError::NegativeWeight { item, value } => {
                write!(f, "coverage weight {item} is negative ({value})")
            }
            ObjectiveError::CoverOutOfRange { element, item } => {
                write!(f, "element {element} covers out-of-range item {item}")
            }
        }
    }
}

impl std::error::Error for ObjectiveError {}

impl From<MatrixError> for ObjectiveError {
    fn from(e: MatrixError) -> Self {
        ObjectiveError::Matrix(e)
    }
}

/// Cut function of an undirected graph: `f(A)` is the number of edges with
/// exactly one endpoint in `A`. Non-monotone submodular; `f(∅) = f(V) = 0`.
#[derive(Debug, Clone)]
pub struct MaxCutObjective {
    n: usize,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

impl MaxCutObjective {
    /// Builds the graph, rejecting self-loops and deduplicating edges.
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Result<Self, ObjectiveError> {
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        let mut edge_count = 0;
        for &(u, v) in edges {
            if u == v {
                return Err(ObjectiveError::SelfLoop(u));
            }
            for w in [u, v] {
                if w as usize >= n {
                    return Err(ObjectiveError::VertexOutOfRange { vertex: w, n });
                }
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                continue;
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
            edge_count += 1;
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { n, adjacency, edge_count })
    }

    pub fn degree(&self, v: ElementId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: ElementId) -> &[u32] {
        &self.adjacency[v.index()]
    }
}

impl Objective for MaxCutObjective {
    fn universe_size(&self) -> usize {
        self.n
    }

    fn evaluate(&self, set: &ElementSet) -> f64 {
        let mut cut = 0u64;
        for &e in set {
            for &nb in &self.adjacency[e.index()] {
                if !set.contains(&ElementId(nb)) {
                    cut += 1;
                }
            }
        }
        cut as f64
    }
}

/// `f(A) = ln(det(L_A) + 1)` for a positive semi-definite kernel `L`, with
/// `det` of the empty principal submatrix equal to 1 (so `f(∅) = ln 2`).
/// Non-monotone, non-negative, submodular.
#[derive(Debug, Clone)]
pub struct LogDetObjective {
    kernel: Matrix,
}

impl LogDetObjective {
    /// Wraps a kernel after a cheap symmetry and diagonal check. Full
    /// eigenvalue validation is separate (see [`LogDetObjective::validate_psd`]).
    pub fn new(kernel: Matrix) -> Result<Self, ObjectiveError> {
        let n = kernel.dim();
        for i in 0..n {
            let d = kernel.get(i, i);
            if d < -1e-12 {
                return Err(ObjectiveError::NegativeDiagonal { row: i, value: d });
            }
            for j in i + 1..n {
                let a = kernel.get(i, j);
                let b = kernel.get(j, i);
                let tol = 1e-9 * a.abs().max(b.abs()).max(1.0);
                if (a - b).abs() > tol {
                    return Err(ObjectiveError::Asymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { kernel })
    }

    /// Full PSD check via symmetric eigenvalues; quadratic/cubic cost.
    pub fn validate_psd(&self) -> Result<(), ObjectiveError> {
        let eigenvalues = crate::matrix::symmetric_eigenvalues(&self.kernel);
        let scale = eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for &ev in &eigenvalues {
            if ev < -1e-8 * scale {
                return Err(ObjectiveError::NotPsd { eigenvalue: ev });
            }
        }
        Ok(())
    }

    pub fn kernel(&self) -> &Matrix {
        &self.kernel
    }
}

impl Objective for LogDetObjective {
    fn universe_size(&self) -> usize {
        self.kernel.dim()
    }

    fn evaluate(&self, set: &ElementSet) -> f64 {
        let rows: Vec<usize> = set.iter().map(|e| e.index()).collect();
        let sub = self.kernel.principal_submatrix(&rows);
        let det = determinant(&sub).expect("submatrix within dimension cap");
        // round-off guard: PSD kernels have det >= 0
        (det.max(0.0) + 1.0).ln()
    }
}

/// Weighted coverage: element `e` covers a fixed item set, `f(A)` is the
/// total weight of items covered by `A`. Monotone submodular; used by
/// backend-only tests.
#[derive(Debug, Clone)]
pub struct CoverageObjective {
    covers: Vec<Vec<u32>>,
    weights: Vec<f64>,
}

impl CoverageObjective {
    pub fn new(covers: Vec<Vec<u32>>, weights: Vec<f64>) -> Result<Self, ObjectiveError> {
        for (item, &w) in weights.iter().enumerate() {
            if w < 0.0 {
                return Err(ObjectiveError::NegativeWeight { item, value: w });
            }
        }
        for (element, items) in covers.iter().enumerate() {
            for &item in items {
                if item as usize >= weights.len() {
                    return Err(ObjectiveError::CoverOutOfRange { element, item });
                }
            }
        }
        Ok(Self { covers, weights })
    }
}

impl Objective for CoverageObjective {
    fn universe_size(&self) -> usize {
        self.covers.len()
    }

    fn evaluate(&self, set: &ElementSet) -> f64 {
        let mut covered = vec![false; self.weights.len()];
        let mut total = 0.0;
        for &e in set {
            for &item in &self.covers[e.index()] {
                if !covered[item as usize] {
                    covered[item as usize] = true;
                    total += self.weights[item as usize];
                }
            }
        }
        total
    }
}

/// Modular function with per-element weights; test helper for the subset
/// selection routines (`f(A) = Σ w_e`, weights ≥ 0).
#[derive(Debug, Clone)]
pub struct ModularObjective {
    weights: Vec<f64>,
}

impl ModularObjective {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }
}

impl Objective for ModularObjective {
    fn universe_size(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, set: &ElementSet) -> f64 {
        set.iter().map(|e| self.weights[e.index()]).sum()
    }
}
