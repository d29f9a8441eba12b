use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;

use dynsub::bench::{
    run_bench, sweep, AlgorithmKind, BenchConfig, BenchError, ObjectiveSpec, SequenceSource,
};
use dynsub::dataio::{self, DataError};
use dynsub::guess::EPS_PRIME_GUARANTEE_LIMIT;

const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_IO: u8 = 4;

/// Benchmark runner for dynamic submodular maximization under a
/// cardinality constraint.
///
/// Replays an update sequence through the chosen algorithm and writes one
/// CSV row per update (plus a summary row per seed). Passing several
/// algorithms or several k values switches to sweep mode, which emits
/// per-seed summaries and mean/min/max aggregates instead.
#[derive(Parser)]
#[command(name = "dynsub", version)]
struct Cli {
    /// Objective family: maxcut or logdet
    #[arg(long, value_parser = ["maxcut", "logdet"])]
    objective: String,

    /// Edge-list file for maxcut: `u v` per line, `#` comments
    #[arg(long)]
    graph: Option<PathBuf>,

    /// Kernel CSV for logdet: n rows of n comma-separated reals
    #[arg(long)]
    kernel: Option<PathBuf>,

    /// Update sequence: `sliding:W=N`, `noisy`, or `file:PATH`
    #[arg(long)]
    sequence: String,

    /// Algorithms (comma-separated): reduction-ls, reduction-us,
    /// sample-streaming, random
    #[arg(long, value_delimiter = ',', default_value = "reduction-ls")]
    alg: Vec<String>,

    /// Cardinality bounds (a comma-separated list sweeps over k)
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,

    /// Accuracy knob for the guess grid
    #[arg(long = "eps-prime", default_value_t = 0.5)]
    eps_prime: f64,

    /// Sample-streaming processing probability
    #[arg(long, default_value_t = 0.5)]
    q: f64,

    /// Sample-streaming swap slack
    #[arg(long, default_value_t = 1.0)]
    c: f64,

    /// Seeds (comma-separated); each seed is one replay
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seed: Vec<u64>,

    /// Audit the reduction's instances while running; failures exit 3
    #[arg(long)]
    verify: bool,

    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Full eigenvalue check of the kernel before running
    #[arg(long = "validate-psd")]
    validate_psd: bool,

    /// Dump the leveling structure of every active run per update (stderr)
    #[arg(long)]
    verbose: bool,
}

fn parse_sequence(spec: &str) -> Result<SequenceSource, String> {
    if spec == "noisy" {
        return Ok(SequenceSource::Noisy);
    }
    if let Some(rest) = spec.strip_prefix("sliding:") {
        let window = rest
            .strip_prefix("W=")
            .ok_or_else(|| format!("expected sliding:W=N, got {spec:?}"))?
            .parse::<usize>()
            .map_err(|e| format!("bad window in {spec:?}: {e}"))?;
        if window < 1 {
            return Err("window must be at least 1".into());
        }
        return Ok(SequenceSource::Sliding { window });
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(SequenceSource::Script(PathBuf::from(path)));
    }
    Err(format!("unknown sequence {spec:?}; expected sliding:W=N, noisy, or file:PATH"))
}

fn exit_code_for(err: &BenchError) -> u8 {
    match err {
        BenchError::Io(_) => EXIT_IO,
        BenchError::Data(DataError::Io(_)) | BenchError::Data(DataError::Parse { .. }) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn fail(code: u8, message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn write_output(out: &Option<PathBuf>, csv: &str) -> Result<(), std::io::Error> {
    match out {
        Some(path) => std::fs::write(path, csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let objective = match (cli.objective.as_str(), &cli.graph, &cli.kernel) {
        ("maxcut", Some(path), None) => match dataio::load_edge_list(path) {
            Ok(loaded) => ObjectiveSpec::MaxCut(Arc::new(loaded.objective)),
            Err(e) => {
                let err = BenchError::Data(e);
                return fail(exit_code_for(&err), &format!("--graph: {err}"));
            }
        },
        ("logdet", None, Some(path)) => match dataio::load_kernel_csv(path) {
            Ok(kernel) => {
                if cli.validate_psd {
                    if let Err(e) = kernel.validate_psd() {
                        return fail(EXIT_CONFIG, &format!("--validate-psd: {e}"));
                    }
                }
                ObjectiveSpec::Shared(Arc::new(kernel))
            }
            Err(e) => {
                let err = BenchError::Data(e);
                return fail(exit_code_for(&err), &format!("--kernel: {err}"));
            }
        },
        ("maxcut", _, _) => {
            return fail(EXIT_CONFIG, "maxcut needs --graph PATH (and no --kernel)")
        }
        ("logdet", _, _) => {
            return fail(EXIT_CONFIG, "logdet needs --kernel PATH (and no --graph)")
        }
        _ => unreachable!("clap restricts the objective values"),
    };

    let algorithms: Vec<AlgorithmKind> = match cli
        .alg
        .iter()
        .map(|name| AlgorithmKind::parse(name))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(algorithms) => algorithms,
        Err(e) => return fail(EXIT_CONFIG, &e.to_string()),
    };
    if cli.k.is_empty() {
        return fail(EXIT_CONFIG, "at least one k is required");
    }

    if cli.eps_prime > EPS_PRIME_GUARANTEE_LIMIT
        && algorithms.iter().any(|a| {
            matches!(a, AlgorithmKind::ReductionLocalSearch | AlgorithmKind::ReductionUniform)
        })
    {
        eprintln!(
            "warning: eps-prime {} is outside the guarantee regime (≤ {EPS_PRIME_GUARANTEE_LIMIT}); \
             elements may fall outside every guess window",
            cli.eps_prime
        );
    }

    let clone_objective = |spec: &ObjectiveSpec| match spec {
        ObjectiveSpec::MaxCut(g) => ObjectiveSpec::MaxCut(g.clone()),
        ObjectiveSpec::Shared(o) => ObjectiveSpec::Shared(o.clone()),
        ObjectiveSpec::MaxCutFile(p) => ObjectiveSpec::MaxCutFile(p.clone()),
        ObjectiveSpec::KernelFile(p) => ObjectiveSpec::KernelFile(p.clone()),
    };

    let mut configs = Vec::new();
    for &algorithm in &algorithms {
        for &k in &cli.k {
            let sequence = match parse_sequence(&cli.sequence) {
                Ok(sequence) => sequence,
                Err(e) => return fail(EXIT_CONFIG, &e),
            };
            configs.push(BenchConfig {
                objective: clone_objective(&objective),
                sequence,
                algorithm,
                k,
                eps_prime: cli.eps_prime,
                q: cli.q,
                c: cli.c,
                seeds: cli.seed.clone(),
                verify: cli.verify,
                verbose: cli.verbose,
            });
        }
    }

    if configs.len() == 1 {
        let output = match run_bench(&configs[0]) {
            Ok(output) => output,
            Err(e) => return fail(exit_code_for(&e), &e.to_string()),
        };
        for result in &output.per_seed {
            for line in &result.verbose_lines {
                eprintln!("{line}");
            }
            for line in &result.verify_lines {
                eprintln!("{line}");
            }
        }
        if let Err(e) = write_output(&cli.out, &output.csv) {
            return fail(EXIT_IO, &format!("writing output: {e}"));
        }
        let failures = output.verify_failures();
        if failures > 0 {
            eprintln!("verify: {failures} failed check(s)");
            return ExitCode::from(EXIT_VERIFY);
        }
    } else {
        let output = match sweep(&configs) {
            Ok(output) => output,
            Err(e) => return fail(exit_code_for(&e), &e.to_string()),
        };
        if let Err(e) = write_output(&cli.out, &output.csv) {
            return fail(EXIT_IO, &format!("writing output: {e}"));
        }
        if output.verify_failures > 0 {
            eprintln!("verify: {} failed check(s)", output.verify_failures);
            return ExitCode::from(EXIT_VERIFY);
        }
    }
    ExitCode::SUCCESS
}
