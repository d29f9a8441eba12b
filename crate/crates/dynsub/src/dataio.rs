//! Dataset ingestion (edge lists, kernel CSV), update-sequence generation
//! (sliding window, descending-degree inserts with a noisy deletion order,
//! scripted files), and the stream linter that rejects malformed sequences
//! before replay.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::elements::{ElementId, GroundSet};
use crate::matrix::Matrix;
use crate::objectives::{LogDetObjective, MaxCutObjective, ObjectiveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventOp {
    Insert,
    Delete,
}

impl fmt::Display for EventOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventOp::Insert => write!(f, "insert"),
            EventOp::Delete => write!(f, "delete"),
        }
    }
}

/// One step of an update sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdateEvent {
    pub op: EventOp,
    pub element: ElementId,
    pub t: usize,
}

impl UpdateEvent {
    pub fn insert(element: ElementId, t: usize) -> Self {
        Self { op: EventOp::Insert, element, t }
    }

    pub fn delete(element: ElementId, t: usize) -> Self {
        Self { op: EventOp::Delete, element, t }
    }
}

#[derive(Debug)]
pub enum DataError {
    Io(io::Error),
    Parse { line: usize, message: String },
    Objective(ObjectiveError),
    /// A sequence inserted an alive element or deleted a dead one.
    Lint { step: usize, message: String },
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataError::Io(e) => write!(f, "{e}"),
            DataError::Parse { line, message } => write!(f, "line {line}: {message}"),
            DataError::Objective(e) => write!(f, "{e}"),
            DataError::Lint { step, message } => write!(f, "step {step}: {message}"),
        }
    }
}

impl std::error::Error for DataError {}

impl From<io::Error> for DataError {
    fn from(e: io::Error) -> Self {
        DataError::Io(e)
    }
}

impl From<ObjectiveError> for DataError {
    fn from(e: ObjectiveError) -> Self {
        DataError::Objective(e)
    }
}

/// A parsed graph with the original vertex labels retained. Vertices are
/// relabeled to dense 0-based ids in first-seen order.
#[derive(Debug)]
pub struct LoadedGraph {
    pub objective: MaxCutObjective,
    pub original_labels: Vec<u64>,
    pub label_to_id: HashMap<u64, ElementId>,
}

/// Parses a whitespace-separated edge list (`u v` per line). `#` comments
/// and blank lines are ignored, duplicate edges are collapsed, self-loops
/// are rejected.
pub fn load_edge_list(path: &Path) -> Result<LoadedGraph, DataError> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text)
}

pub fn parse_edge_list(text: &str) -> Result<LoadedGraph, DataError> {
    let mut original_labels = Vec::new();
    let mut label_to_id: HashMap<u64, ElementId> = HashMap::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
            return Err(DataError::Parse {
                line: line_no,
                message: format!("expected two vertex labels, got {line:?}"),
            });
        };
        if parts.next().is_some() {
            return Err(DataError::Parse {
                line: line_no,
                message: format!("trailing tokens after edge {line:?}"),
            });
        }
        let parse = |s: &str| {
            s.parse::<u64>().map_err(|e| DataError::Parse {
                line: line_no,
                message: format!("bad vertex label {s:?}: {e}"),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            return Err(DataError::Parse {
                line: line_no,
                message: format!("self-loop on vertex {u}"),
            });
        }
        let mut id_of = |label: u64| {
            *label_to_id.entry(label).or_insert_with(|| {
                let id = ElementId(original_labels.len() as u32);
                original_labels.push(label);
                id
            })
        };
        let edge = (id_of(u).0, id_of(v).0);
        edges.push(edge);
    }
    let objective = MaxCutObjective::new(original_labels.len(), &edges)?;
    Ok(LoadedGraph { objective, original_labels, label_to_id })
}

/// Parses a kernel CSV: `n` rows of `n` comma-separated reals, `#` comment
/// lines allowed. Symmetry and diagonal checks happen in the objective
/// constructor.
pub fn load_kernel_csv(path: &Path) -> Result<LogDetObjective, DataError> {
    let text = fs::read_to_string(path)?;
    parse_kernel_csv(&text)
}

pub fn parse_kernel_csv(text: &str) -> Result<LogDetObjective, DataError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|e| DataError::Parse {
                    line: line_no,
                    message: format!("bad kernel entry {cell:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>, DataError>>()?;
        rows.push(row);
    }
    let n = rows.len();
    for row in &rows {
        if row.len() != n {
            return Err(DataError::Parse {
                line: 0,
                message: format!(
                    "kernel is not square: {n} rows but a row has {} entries",
                    row.len()
                ),
            });
        }
    }
    let matrix = Matrix::from_rows(rows).map_err(ObjectiveError::from)?;
    Ok(LogDetObjective::new(matrix)?)
}

/// Sliding-window stream: `order[t]` is inserted at step `t` and deleted
/// once `window` further elements have been inserted; trailing deletes
/// flush whatever is still alive, in insertion order.
pub fn sliding_window_sequence(order: &[ElementId], window: usize) -> Vec<UpdateEvent> {
    assert!(window >= 1, "window must be at least 1");
    let mut events = Vec::with_capacity(2 * order.len());
    let mut t = 0;
    for (i, &e) in order.iter().enumerate() {
        if i >= window {
            events.push(UpdateEvent::delete(order[i - window], t));
            t += 1;
        }
        events.push(UpdateEvent::insert(e, t));
        t += 1;
    }
    let start = order.len().saturating_sub(window);
    for &e in &order[start..] {
        events.push(UpdateEvent::delete(e, t));
        t += 1;
    }
    events
}

/// Vertices in descending degree order (ties by id), and the same order
/// perturbed by one left-to-right pass of neighbor swaps: each unswapped
/// position swaps with its left or right neighbor, direction an even coin;
/// positions already swapped in this pass are skipped.
pub fn noisy_degree_order(
    graph: &MaxCutObjective,
    seed: u64,
) -> (Vec<ElementId>, Vec<ElementId>) {
    use crate::oracle::Objective;
    let n = graph.universe_size();
    let mut insert_order: Vec<ElementId> = (0..n as u32).map(ElementId).collect();
    insert_order.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));

    let mut delete_order = insert_order.clone();
    let mut swapped = vec![false; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in 0..n {
        if swapped[p] {
            continue;
        }
        let left = rng.gen_bool(0.5);
        let q = if left { p.checked_sub(1) } else { (p + 1 < n).then_some(p + 1) };
        let Some(q) = q else { continue };
        if swapped[q] {
            continue;
        }
        delete_order.swap(p, q);
        swapped[p] = true;
        swapped[q] = true;
    }
    (insert_order, delete_order)
}

/// Full stream for the noisy-order model: every vertex inserted in
/// descending degree order, then every vertex deleted in the noisy order.
pub fn noisy_order_sequence(graph: &MaxCutObjective, seed: u64) -> Vec<UpdateEvent> {
    let (insert_order, delete_order) = noisy_degree_order(graph, seed);
    let mut events = Vec::with_capacity(2 * insert_order.len());
    let mut t = 0;
    for &e in &insert_order {
        events.push(UpdateEvent::insert(e, t));
        t += 1;
    }
    for &e in &delete_order {
        events.push(UpdateEvent::delete(e, t));
        t += 1;
    }
    events
}

/// Parses a scripted sequence: one `+ <id>` or `- <id>` per line, with `#`
/// comments and blank lines ignored.
pub fn load_script(path: &Path) -> Result<Vec<UpdateEvent>, DataError> {
    let text = fs::read_to_string(path)?;
    parse_script(&text)
}

pub fn parse_script(text: &str) -> Result<Vec<UpdateEvent>, DataError> {
    let mut events = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(op), Some(id), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(DataError::Parse {
                line: line_no,
                message: format!("expected `+ <id>` or `- <id>`, got {line:?}"),
            });
        };
        let element = id.parse::<u32>().map(ElementId).map_err(|e| DataError::Parse {
            line: line_no,
            message: format!("bad id {id:?}: {e}"),
        })?;
        let op = match op {
            "+" => EventOp::Insert,
            "-" => EventOp::Delete,
            other => {
                return Err(DataError::Parse {
                    line: line_no,
                    message: format!("unknown op {other:?}"),
                })
            }
        };
        events.push(UpdateEvent { op, element, t: events.len() });
    }
    Ok(events)
}

/// Replays the stream through a ground set, rejecting inserts of alive
/// elements and deletes of dead ones. `universe` additionally bounds ids.
pub fn lint_stream(events: &[UpdateEvent], universe: Option<usize>) -> Result<(), DataError> {
    let mut ground = GroundSet::new();
    for (step, ev) in events.iter().enumerate() {
        if let Some(n) = universe {
            if ev.element.index() >= n {
                return Err(DataError::Lint {
                    step,
                    message: format!("element {} outside universe of size {n}", ev.element),
                });
            }
        }
        let result = match ev.op {
            EventOp::Insert => ground.insert(ev.element),
            EventOp::Delete => ground.delete(ev.element),
        };
        if let Err(e) = result {
            return Err(DataError::Lint { step, message: e.to_string() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Objective;
    use proptest::prelude::*;

    #[test]
    fn edge_list_parses_path_graph() {
        let g = parse_edge_list("0 1\n1 2\n").unwrap();
        assert_eq!(g.objective.universe_size(), 3);
        assert_eq!(g.objective.edge_count(), 2);
    }

    #[test]
    fn edge_list_dedups_and_ignores_comments() {
        let g = parse_edge_list("# a comment\n5 9\n9 5\n\n5 9\n").unwrap();
        assert_eq!(g.objective.universe_size(), 2);
        assert_eq!(g.objective.edge_count(), 1);
        // labels retained in first-seen order
        assert_eq!(g.original_labels, vec![5, 9]);
        assert_eq!(g.label_to_id[&9], ElementId(1));
    }

    #[test]
    fn edge_list_rejects_self_loops_with_line_number() {
        let err = parse_edge_list("0 1\n2 2\n").unwrap_err();
        match err {
            DataError::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("self-loop"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn edge_list_rejects_garbage() {
        assert!(parse_edge_list("0\n").is_err());
        assert!(parse_edge_list("0 x\n").is_err());
        assert!(parse_edge_list("0 1 2\n").is_err());
    }

    #[test]
    fn kernel_csv_round_trip() {
        let obj = parse_kernel_csv("# identity\n1.0, 0.0\n0.0, 1.0\n").unwrap();
        assert_eq!(obj.universe_size(), 2);
    }

    #[test]
    fn kernel_csv_rejects_non_square() {
        assert!(parse_kernel_csv("1.0, 0.0\n").is_err());
    }

    #[test]
    fn sliding_window_matches_hand_trace() {
        let order = [ElementId(10), ElementId(11), ElementId(12)];
        let events = sliding_window_sequence(&order, 2);
        let compact: Vec<(EventOp, u32)> = events.iter().map(|e| (e.op, e.element.0)).collect();
        assert_eq!(
            compact,
            vec![
                (EventOp::Insert, 10),
                (EventOp::Insert, 11),
                (EventOp::Delete, 10),
                (EventOp::Insert, 12),
                (EventOp::Delete, 11),
                (EventOp::Delete, 12),
            ]
        );
        lint_stream(&events, None).unwrap();
    }

    #[test]
    fn wide_window_degenerates_to_inserts_then_deletes() {
        let order: Vec<ElementId> = (0..4).map(ElementId).collect();
        let events = sliding_window_sequence(&order, 10);
        assert!(events[..4].iter().all(|e| e.op == EventOp::Insert));
        assert!(events[4..].iter().all(|e| e.op == EventOp::Delete));
        lint_stream(&events, Some(4)).unwrap();
    }

    #[test]
    fn noisy_order_is_a_seeded_permutation() {
        let graph =
            MaxCutObjective::new(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (3, 4)]).unwrap();
        let (insert_order, delete_order) = noisy_degree_order(&graph, 7);
        // vertex 0 has the highest degree
        assert_eq!(insert_order[0], ElementId(0));
        let mut sorted = delete_order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..5).map(ElementId).collect::<Vec<_>>());
        assert_eq!(noisy_degree_order(&graph, 7).1, delete_order);
        lint_stream(&noisy_order_sequence(&graph, 7), Some(5)).unwrap();
    }

    #[test]
    fn regular_graph_insert_order_is_id_order() {
        // 4-cycle: all degrees equal, ties resolve by id
        let graph = MaxCutObjective::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let (insert_order, _) = noisy_degree_order(&graph, 3);
        assert_eq!(insert_order, (0..4).map(ElementId).collect::<Vec<_>>());
    }

    #[test]
    fn script_parsing_and_linting() {
        let events = parse_script("# demo\n+ 3\n+ 4\n- 3\n").unwrap();
        assert_eq!(events.len(), 3);
        assert_eq!(events[2], UpdateEvent::delete(ElementId(3), 2));
        lint_stream(&events, None).unwrap();

        let bad = parse_script("+ 3\n+ 3\n").unwrap();
        assert!(matches!(lint_stream(&bad, None), Err(DataError::Lint { step: 1, .. })));
        let dead = parse_script("- 3\n").unwrap();
        assert!(matches!(lint_stream(&dead, None), Err(DataError::Lint { step: 0, .. })));
        assert!(parse_script("* 3\n").is_err());
    }

    proptest! {
        // every element is inserted exactly once and deleted exactly once,
        // and the alive set never exceeds the window
        #[test]
        fn sliding_window_streams_are_well_formed(
            len in 1usize..40,
            window in 1usize..45,
        ) {
            let order: Vec<ElementId> = (0..len as u32).map(ElementId).collect();
            let events = sliding_window_sequence(&order, window);
            prop_assert_eq!(events.len(), 2 * len);
            lint_stream(&events, Some(len)).unwrap();
            let mut ground = GroundSet::new();
            let mut inserts = 0usize;
            let mut deletes = 0usize;
            for ev in &events {
                match ev.op {
                    EventOp::Insert => {
                        ground.insert(ev.element).unwrap();
                        inserts += 1;
                    }
                    EventOp::Delete => {
                        ground.delete(ev.element).unwrap();
                        deletes += 1;
                    }
                }
                prop_assert!(ground.len() <= window);
                prop_assert_eq!(ground.len(), inserts - deletes);
            }
            prop_assert!(ground.is_empty());
        }

        // the noisy pass yields a permutation for arbitrary graphs and seeds
        #[test]
        fn noisy_delete_order_is_permutation(n in 1usize..30, seed in 0u64..1000) {
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if (u + v + seed as u32) % 3 == 0 {
                        edges.push((u, v));
                    }
                }
            }
            let graph = MaxCutObjective::new(n, &edges).unwrap();
            let (_, delete_order) = noisy_degree_order(&graph, seed);
            let mut sorted = delete_order;
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..n as u32).map(ElementId).collect::<Vec<_>>());
        }
    }
}
