//! Benchmark harness: wires objectives, update sequences, algorithms, and
//! seeds into per-update CSV traces and per-seed summaries. Query counts
//! are the cost model; wall-clock time is deliberately not measured.

use std::fmt;
use std::io;
use std::path::PathBuf;
use std::sync::Arc;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{random_baseline, BaselineError, SampleStreamState};
use crate::dataio::{
    self, lint_stream, sliding_window_sequence, DataError, EventOp, UpdateEvent,
};
use crate::elements::{seed_mix, ElementId, ElementSet, GroundSet};
use crate::guess::{GridError, GuessGrid};
use crate::objectives::MaxCutObjective;
use crate::oracle::{CountingOracle, Objective, OracleError, SharedObjective};
use crate::reduction::SubsetStrategy;
use crate::verify::{audit_augmentation_bound, audit_dichotomy};

const NOISE_SALT: u64 = 0x6e6f_6973;
const AUDIT_SALT: u64 = 0x6175_6469;

/// Lemma-2 subsets sampled per audited checkpoint in `--verify` mode.
const VERIFY_AUGMENTATION_TRIALS: usize = 200;

#[derive(Debug)]
pub enum BenchError {
    Config(String),
    Data(DataError),
    Grid(GridError),
    Baseline(BaselineError),
    Oracle(OracleError),
    Io(io::Error),
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Config(msg) => write!(f, "{msg}"),
            BenchError::Data(e) => write!(f, "{e}"),
            BenchError::Grid(e) => write!(f, "{e}"),
            BenchError::Baseline(e) => write!(f, "{e}"),
            BenchError::Oracle(e) => write!(f, "{e}"),
            BenchError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BenchError {}

impl From<DataError> for BenchError {
    fn from(e: DataError) -> Self {
        BenchError::Data(e)
    }
}

impl From<GridError> for BenchError {
    fn from(e: GridError) -> Self {
        BenchError::Grid(e)
    }
}

impl From<BaselineError> for BenchError {
    fn from(e: BaselineError) -> Self {
        BenchError::Baseline(e)
    }
}

impl From<OracleError> for BenchError {
    fn from(e: OracleError) -> Self {
        BenchError::Oracle(e)
    }
}

impl From<io::Error> for BenchError {
    fn from(e: io::Error) -> Self {
        BenchError::Io(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmKind {
    ReductionLocalSearch,
    ReductionUniform,
    SampleStreaming,
    Random,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::ReductionLocalSearch => "reduction-ls",
            AlgorithmKind::ReductionUniform => "reduction-us",
            AlgorithmKind::SampleStreaming => "sample-streaming",
            AlgorithmKind::Random => "random",
        }
    }

    pub fn parse(name: &str) -> Result<Self, BenchError> {
        match name {
            "reduction-ls" => Ok(AlgorithmKind::ReductionLocalSearch),
            "reduction-us" => Ok(AlgorithmKind::ReductionUniform),
            "sample-streaming" => Ok(AlgorithmKind::SampleStreaming),
            "random" => Ok(AlgorithmKind::Random),
            other => Err(BenchError::Config(format!(
                "unknown algorithm {other:?}; expected reduction-ls, reduction-us, sample-streaming, or random"
            ))),
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Where the objective comes from. The in-memory variants serve tests and
/// embedding; the CLI always loads files.
pub enum ObjectiveSpec {
    MaxCutFile(PathBuf),
    KernelFile(PathBuf),
    MaxCut(Arc<MaxCutObjective>),
    Shared(SharedObjective),
}

impl ObjectiveSpec {
    fn key(&self) -> String {
        match self {
            ObjectiveSpec::MaxCutFile(p) => format!("graph:{}", p.display()),
            ObjectiveSpec::KernelFile(p) => format!("kernel:{}", p.display()),
            ObjectiveSpec::MaxCut(g) => format!("maxcut-mem:{:p}", Arc::as_ptr(g)),
            ObjectiveSpec::Shared(o) => format!("mem:{:p}", Arc::as_ptr(o)),
        }
    }
}

enum ResolvedObjective {
    Graph(Arc<MaxCutObjective>),
    Other(SharedObjective),
}

impl ResolvedObjective {
    fn shared(&self) -> SharedObjective {
        match self {
            ResolvedObjective::Graph(g) => g.clone(),
            ResolvedObjective::Other(o) => o.clone(),
        }
    }

    fn universe_size(&self) -> usize {
        match self {
            ResolvedObjective::Graph(g) => g.universe_size(),
            ResolvedObjective::Other(o) => o.universe_size(),
        }
    }
}

pub enum SequenceSource {
    /// Insert in descending-degree order (graphs) or id order (kernels),
    /// each element alive for `window` insertions.
    Sliding { window: usize },
    /// All inserts in descending-degree order, then deletes in the noisy
    /// order; graphs only.
    Noisy,
    Script(PathBuf),
    /// Pre-built events; tests and embedding.
    Events(Vec<UpdateEvent>),
}

pub struct BenchConfig {
    pub objective: ObjectiveSpec,
    pub sequence: SequenceSource,
    pub algorithm: AlgorithmKind,
    pub k: usize,
    pub eps_prime: f64,
    /// Sample-streaming processing probability.
    pub q: f64,
    /// Sample-streaming swap slack.
    pub c: f64,
    pub seeds: Vec<u64>,
    pub verify: bool,
    pub verbose: bool,
}

impl BenchConfig {
    fn validate(&self) -> Result<(), BenchError> {
        if self.k < 1 {
            return Err(BenchError::Config("k must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::Config("at least one seed is required".into()));
        }
        match self.algorithm {
            AlgorithmKind::ReductionLocalSearch | AlgorithmKind::ReductionUniform => {
                if !(self.eps_prime > 0.0) || !self.eps_prime.is_finite() {
                    return Err(BenchError::Config(format!(
                        "eps-prime must be positive and finite, got {}",
                        self.eps_prime
                    )));
                }
            }
            AlgorithmKind::SampleStreaming => {
                if !(self.q > 0.0 && self.q <= 1.0) {
                    return Err(BenchError::Config(format!("q must lie in (0, 1], got {}", self.q)));
                }
                if !(self.c >= 0.0) || !self.c.is_finite() {
                    return Err(BenchError::Config(format!(
                        "c must be non-negative, got {}",
                        self.c
                    )));
                }
            }
            AlgorithmKind::Random => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct UpdateRow {
    pub t: usize,
    pub op: EventOp,
    pub element: ElementId,
    pub f_value: f64,
    pub queries_update: u64,
    pub queries_cum: u64,
    pub solution_size: usize,
}

#[derive(Debug, Clone)]
pub struct SeedSummary {
    pub seed: u64,
    pub avg_f: f64,
    pub total_queries: u64,
}

#[derive(Debug, Clone)]
pub struct SeedResult {
    pub summary: SeedSummary,
    pub rows: Vec<UpdateRow>,
    pub verify_lines: Vec<String>,
    pub verify_failures: usize,
    pub verbose_lines: Vec<String>,
}

pub struct BenchOutput {
    pub per_seed: Vec<SeedResult>,
    pub csv: String,
}

impl BenchOutput {
    pub fn verify_failures(&self) -> usize {
        self.per_seed.iter().map(|s| s.verify_failures).sum()
    }
}

/// Formats with a fixed number of significant digits (decimal notation).
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Per-update CSV schema. Update rows leave the summary columns empty;
/// each seed closes with a summary row carrying `avg_f` and
/// `total_queries`.
pub const UPDATE_CSV_HEADER: &str =
    "row,seed,t,op,element,f_value,queries_update,queries_cum,solution_size,avg_f,total_queries";

/// Aggregate CSV schema for sweeps.
pub const SWEEP_CSV_HEADER: &str =
    "row,algorithm,k,seed,avg_f,total_queries,mean_avg_f,min_avg_f,max_avg_f,mean_total_queries";

trait DynAlgorithm {
    fn step(&mut self, event: UpdateEvent) -> Result<(ElementSet, f64), BenchError>;
    fn total_queries(&self) -> u64;
    fn grid(&self) -> Option<&GuessGrid> {
        None
    }
}

struct GridAlgorithm {
    grid: GuessGrid,
}

impl DynAlgorithm for GridAlgorithm {
    fn step(&mut self, event: UpdateEvent) -> Result<(ElementSet, f64), BenchError> {
        Ok(self.grid.apply_update(event)?)
    }

    fn total_queries(&self) -> u64 {
        self.grid.total_queries()
    }

    fn grid(&self) -> Option<&GuessGrid> {
        Some(&self.grid)
    }
}

struct SampleStreamAlgorithm {
    state: SampleStreamState,
    report_oracle: CountingOracle,
}

impl DynAlgorithm for SampleStreamAlgorithm {
    fn step(&mut self, event: UpdateEvent) -> Result<(ElementSet, f64), BenchError> {
        let solution = self.state.dynamic_update(event)?;
        let value = self.report_oracle.value(&solution)?;
        Ok((solution, value))
    }

    fn total_queries(&self) -> u64 {
        self.state.queries() + self.report_oracle.queries()
    }
}

struct RandomAlgorithm {
    k: usize,
    ground: GroundSet,
    rng: ChaCha8Rng,
    report_oracle: CountingOracle,
}

impl DynAlgorithm for RandomAlgorithm {
    fn step(&mut self, event: UpdateEvent) -> Result<(ElementSet, f64), BenchError> {
        let applied = match event.op {
            EventOp::Insert => self.ground.insert(event.element),
            EventOp::Delete => self.ground.delete(event.element),
        };
        applied.map_err(|e| BenchError::Config(format!("inconsistent stream: {e}")))?;
        let solution = random_baseline(self.ground.as_set(), self.k, &mut self.rng);
        let value = self.report_oracle.value(&solution)?;
        Ok((solution, value))
    }

    fn total_queries(&self) -> u64 {
        self.report_oracle.queries()
    }
}

fn resolve_objective(spec: &ObjectiveSpec) -> Result<ResolvedObjective, BenchError> {
    Ok(match spec {
        ObjectiveSpec::MaxCutFile(path) => {
            let loaded = dataio::load_edge_list(path)?;
            ResolvedObjective::Graph(Arc::new(loaded.objective))
        }
        ObjectiveSpec::KernelFile(path) => {
            ResolvedObjective::Other(Arc::new(dataio::load_kernel_csv(path)?))
        }
        ObjectiveSpec::MaxCut(g) => ResolvedObjective::Graph(g.clone()),
        ObjectiveSpec::Shared(o) => ResolvedObjective::Other(o.clone()),
    })
}

fn insertion_order(objective: &ResolvedObjective) -> Vec<ElementId> {
    match objective {
        // descending degree, ties by id; mirrors the adversarial inserts
        ResolvedObjective::Graph(g) => {
            let mut order: Vec<ElementId> =
                (0..g.universe_size() as u32).map(ElementId).collect();
            order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
            order
        }
        ResolvedObjective::Other(o) => (0..o.universe_size() as u32).map(ElementId).collect(),
    }
}

fn build_events(
    config: &BenchConfig,
    objective: &ResolvedObjective,
    seed: u64,
) -> Result<Vec<UpdateEvent>, BenchError> {
    let events = match &config.sequence {
        SequenceSource::Sliding { window } => {
            if *window < 1 {
                return Err(BenchError::Config("window must be at least 1".into()));
            }
            sliding_window_sequence(&insertion_order(objective), *window)
        }
        SequenceSource::Noisy => match objective {
            ResolvedObjective::Graph(g) => {
                dataio::noisy_order_sequence(g, seed_mix(seed, NOISE_SALT))
            }
            ResolvedObjective::Other(_) => {
                return Err(BenchError::Config(
                    "the noisy sequence needs vertex degrees; use a graph objective".into(),
                ))
            }
        },
        SequenceSource::Script(path) => dataio::load_script(path)?,
        SequenceSource::Events(events) => events.clone(),
    };
    lint_stream(&events, Some(objective.universe_size()))?;
    Ok(events)
}

fn build_algorithm(
    config: &BenchConfig,
    objective: &ResolvedObjective,
    seed: u64,
) -> Result<Box<dyn DynAlgorithm>, BenchError> {
    Ok(match config.algorithm {
        AlgorithmKind::ReductionLocalSearch | AlgorithmKind::ReductionUniform => {
            let strategy = if config.algorithm == AlgorithmKind::ReductionLocalSearch {
                SubsetStrategy::LocalSearch
            } else {
                SubsetStrategy::Uniform
            };
            let grid =
                GuessGrid::new(config.eps_prime, config.k, strategy, objective.shared(), seed)?;
            Box::new(GridAlgorithm { grid })
        }
        AlgorithmKind::SampleStreaming => Box::new(SampleStreamAlgorithm {
            state: SampleStreamState::new(config.k, config.q, config.c, objective.shared(), seed)?,
            report_oracle: CountingOracle::new(objective.shared()),
        }),
        AlgorithmKind::Random => Box::new(RandomAlgorithm {
            k: config.k,
            ground: GroundSet::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            report_oracle: CountingOracle::new(objective.shared()),
        }),
    })
}

fn json_escape_free(s: &str) -> String {
    // witnesses are ids and numbers; keep lines trivially greppable
    s.replace(['"', '\\', '\n'], "_")
}

fn verify_checkpoint(
    grid: &GuessGrid,
    objective: &SharedObjective,
    t: usize,
    seed: u64,
    lines: &mut Vec<String>,
    failures: &mut usize,
) -> Result<(), BenchError> {
    let mut push = |check: &str, run: i64, inst: &str, pass: bool, witness: Option<String>| {
        let witness_part = witness
            .map(|w| format!(",\"witness\":\"{}\"", json_escape_free(&w)))
            .unwrap_or_default();
        lines.push(format!(
            "{{\"t\":{t},\"check\":\"{check}\",\"run\":{run},\"instance\":\"{inst}\",\"pass\":{pass}{witness_part}}}"
        ));
        if !pass {
            *failures += 1;
        }
    };
    for (index, run) in grid.active_runs() {
        let mut shadow = CountingOracle::new(objective.clone());
        let mut audit_rng =
            ChaCha8Rng::seed_from_u64(seed_mix(seed_mix(seed, AUDIT_SALT), t as u64));
        for (label, inst) in [("i1", run.instance1()), ("i2", run.instance2())] {
            let alive = inst.alive();
            let solution = inst.extract();
            let p1 = audit_dichotomy(&mut shadow, &alive, &solution, run.k(), run.tau())
                .map_err(|e| BenchError::Config(e.to_string()))?;
            push(
                "dichotomy",
                index,
                label,
                p1.pass,
                p1.witness.map(|(e, gain)| format!("element {e} gain {gain}")),
            );
            if solution.len() < run.k() {
                let l2 = audit_augmentation_bound(
                    &mut shadow,
                    &alive,
                    &solution,
                    run.tau(),
                    VERIFY_AUGMENTATION_TRIALS,
                    &mut audit_rng,
                )
                .map_err(|e| BenchError::Config(e.to_string()))?;
                push(
                    "augmentation",
                    index,
                    label,
                    l2.pass,
                    (!l2.pass).then(|| format!("worst margin {}", l2.worst_margin)),
                );
            }
            // chain integrity: e_i sits in R_i, pools nest by construction
            let chain_ok = inst
                .chain()
                .iter()
                .enumerate()
                .all(|(i, &e)| inst.max_pool_level(e) == Some(i + 1));
            push("chain", index, label, chain_ok, None);
        }
        let s1 = run.instance1().extract();
        let expected: ElementSet = run.alive().difference(&s1).copied().collect();
        let ground_ok = run.instance2().alive() == expected;
        push("i2_ground", index, "i2", ground_ok, None);
        let feasible = run.last_solution().len() <= run.k()
            && run.last_solution().is_subset(run.alive());
        push("feasible", index, "run", feasible, None);
    }
    Ok(())
}

fn run_seed(
    config: &BenchConfig,
    objective: &ResolvedObjective,
    seed: u64,
) -> Result<SeedResult, BenchError> {
    let events = build_events(config, objective, seed)?;
    let mut algorithm = build_algorithm(config, objective, seed)?;
    let shared = objective.shared();
    let universe = objective.universe_size();
    let audit_every = if universe <= 50 { 1 } else { 10 };

    let mut rows = Vec::with_capacity(events.len());
    let mut verify_lines = Vec::new();
    let mut verbose_lines = Vec::new();
    let mut verify_failures = 0usize;
    let mut queries_before = 0u64;
    let mut value_sum = 0.0;
    for event in &events {
        let (solution, value) = algorithm.step(*event)?;
        let queries_cum = algorithm.total_queries();
        rows.push(UpdateRow {
            t: event.t,
            op: event.op,
            element: event.element,
            f_value: value,
            queries_update: queries_cum - queries_before,
            queries_cum,
            solution_size: solution.len(),
        });
        queries_before = queries_cum;
        value_sum += value;
        if let Some(grid) = algorithm.grid() {
            if config.verify && event.t % audit_every == 0 {
                verify_checkpoint(
                    grid,
                    &shared,
                    event.t,
                    seed,
                    &mut verify_lines,
                    &mut verify_failures,
                )?;
            }
            if config.verbose {
                for (index, run) in grid.active_runs() {
                    verbose_lines.push(format!(
                        "t={} run={} guess={}\n{}",
                        event.t,
                        index,
                        fmt_sig(run.opt_guess(), 6),
                        run.instance1().dump_levels()
                    ));
                }
            }
        }
    }
    let avg_f = if rows.is_empty() { 0.0 } else { value_sum / rows.len() as f64 };
    Ok(SeedResult {
        summary: SeedSummary { seed, avg_f, total_queries: queries_before },
        rows,
        verify_lines,
        verify_failures,
        verbose_lines,
    })
}

/// Replays the configured sequence once per seed (seeds run in parallel,
/// output kept in seed order) and renders the per-update CSV.
pub fn run_bench(config: &BenchConfig) -> Result<BenchOutput, BenchError> {
    config.validate()?;
    let objective = resolve_objective(&config.objective)?;
    let per_seed: Vec<SeedResult> = config
        .seeds
        .par_iter()
        .map(|&seed| run_seed(config, &objective, seed))
        .collect::<Result<_, _>>()?;

    let mut csv = String::from(UPDATE_CSV_HEADER);
    csv.push('\n');
    for result in &per_seed {
        let seed = result.summary.seed;
        for row in &result.rows {
            csv.push_str(&format!(
                "update,{seed},{},{},{},{},{},{},{},,\n",
                row.t,
                row.op,
                row.element,
                fmt_sig(row.f_value, 6),
                row.queries_update,
                row.queries_cum,
                row.solution_size,
            ));
        }
        csv.push_str(&format!(
            "summary,{seed},,,,,,,,{},{}\n",
            fmt_sig(result.summary.avg_f, 6),
            result.summary.total_queries,
        ));
    }
    Ok(BenchOutput { per_seed, csv })
}

#[derive(Debug, Clone)]
pub struct SweepAggregate {
    pub algorithm: AlgorithmKind,
    pub k: usize,
    pub mean_avg_f: f64,
    pub min_avg_f: f64,
    pub max_avg_f: f64,
    pub mean_total_queries: f64,
}

pub struct SweepOutput {
    pub summaries: Vec<(AlgorithmKind, usize, SeedSummary)>,
    pub aggregates: Vec<SweepAggregate>,
    pub csv: String,
    pub verify_failures: usize,
}

/// Runs each config and concatenates the per-seed summaries, plus
/// mean/min/max rows per (algorithm, k). All configs must target the same
/// objective.
pub fn sweep(configs: &[BenchConfig]) -> Result<SweepOutput, BenchError> {
    if let Some(first) = configs.first() {
        let key = first.objective.key();
        for config in configs {
            if config.objective.key() != key {
                return Err(BenchError::Config(
                    "sweep configs must share one objective".into(),
                ));
            }
        }
    }
    let mut summaries = Vec::new();
    let mut aggregates = Vec::new();
    let mut verify_failures = 0usize;
    for config in configs {
        let output = run_bench(config)?;
        verify_failures += output.verify_failures();
        let mut avg_min = f64::INFINITY;
        let mut avg_max = f64::NEG_INFINITY;
        let mut avg_sum = 0.0;
        let mut query_sum = 0.0;
        let seeds = output.per_seed.len().max(1) as f64;
        for result in &output.per_seed {
            let s = &result.summary;
            avg_min = avg_min.min(s.avg_f);
            avg_max = avg_max.max(s.avg_f);
            avg_sum += s.avg_f;
            query_sum += s.total_queries as f64;
            summaries.push((config.algorithm, config.k, s.clone()));
        }
        aggregates.push(SweepAggregate {
            algorithm: config.algorithm,
            k: config.k,
            mean_avg_f: avg_sum / seeds,
            min_avg_f: if avg_min.is_finite() { avg_min } else { 0.0 },
            max_avg_f: if avg_max.is_finite() { avg_max } else { 0.0 },
            mean_total_queries: query_sum / seeds,
        });
    }

    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for (algorithm, k, summary) in &summaries {
        csv.push_str(&format!(
            "summary,{algorithm},{k},{},{},{},,,,\n",
            summary.seed,
            fmt_sig(summary.avg_f, 6),
            summary.total_queries,
        ));
    }
    for agg in &aggregates {
        csv.push_str(&format!(
            "aggregate,{},{},,,,{},{},{},{}\n",
            agg.algorithm,
            agg.k,
            fmt_sig(agg.mean_avg_f, 6),
            fmt_sig(agg.min_avg_f, 6),
            fmt_sig(agg.max_avg_f, 6),
            fmt_sig(agg.mean_total_queries, 6),
        ));
    }
    Ok(SweepOutput { summaries, aggregates, csv, verify_failures })
}
