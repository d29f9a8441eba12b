//! Binary-level checks: flags, exit codes, and output schemas.

mod common;

use std::process::Command;

use dynsub::elements::ElementId;

fn dynsub() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dynsub"))
}

fn write_graph(dir: &tempfile::TempDir) -> std::path::PathBuf {
    let graph = common::er_graph(12, 0.4, 3);
    let mut text = String::new();
    for v in 0..12u32 {
        for &nb in graph.neighbors(ElementId(v)) {
            if nb > v {
                text.push_str(&format!("{v} {nb}\n"));
            }
        }
    }
    let path = dir.path().join("graph.txt");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_writes_csv_with_expected_schema() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(&dir);
    let out = dir.path().join("out.csv");
    let status = dynsub()
        .args([
            "--objective=maxcut",
            &format!("--graph={}", graph.display()),
            "--sequence=sliding:W=5",
            "--alg=reduction-ls",
            "--k=3",
            "--seed=1",
            &format!("--out={}", out.display()),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "row,seed,t,op,element,f_value,queries_update,queries_cum,solution_size,avg_f,total_queries"
    );
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), 24 + 1, "24 update rows plus one summary row");
    assert!(body.last().unwrap().starts_with("summary,1"));
}

#[test]
fn verify_flag_emits_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(&dir);
    let output = dynsub()
        .args([
            "--objective=maxcut",
            &format!("--graph={}", graph.display()),
            "--sequence=sliding:W=4",
            "--alg=reduction-us",
            "--k=2",
            "--seed=5",
            "--verify",
            &format!("--out={}", dir.path().join("v.csv").display()),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.lines().any(|l| l.contains("\"check\":\"dichotomy\"")));
    assert!(stderr.lines().any(|l| l.contains("\"check\":\"i2_ground\"")));
    assert!(!stderr.contains("\"pass\":false"));
}

#[test]
fn logdet_kernel_flow_works() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("kernel.csv");
    std::fs::write(&kernel, "3.0,0.5,0.0\n0.5,3.0,0.5\n0.0,0.5,3.0\n").unwrap();
    let out = dir.path().join("out.csv");
    let status = dynsub()
        .args([
            "--objective=logdet",
            &format!("--kernel={}", kernel.display()),
            "--sequence=sliding:W=2",
            "--alg=reduction-ls",
            "--k=2",
            "--seed=1",
            "--validate-psd",
            &format!("--out={}", out.display()),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(std::fs::read_to_string(&out).unwrap().lines().count() > 4);
}

#[test]
fn validate_psd_rejects_indefinite_kernels() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("bad.csv");
    std::fs::write(&kernel, "1.0,2.0\n2.0,1.0\n").unwrap();
    let status = dynsub()
        .args([
            "--objective=logdet",
            &format!("--kernel={}", kernel.display()),
            "--sequence=sliding:W=2",
            "--alg=random",
            "--k=1",
            "--validate-psd",
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn exit_codes_match_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(&dir);

    // missing input file: I/O error
    let missing = dynsub()
        .args([
            "--objective=maxcut",
            "--graph=/definitely/not/here.txt",
            "--sequence=noisy",
            "--alg=random",
            "--k=2",
        ])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(4));

    // malformed sequence spec: config error
    let bad_seq = dynsub()
        .args([
            "--objective=maxcut",
            &format!("--graph={}", graph.display()),
            "--sequence=sometimes",
            "--alg=random",
            "--k=2",
        ])
        .output()
        .unwrap();
    assert_eq!(bad_seq.status.code(), Some(2));

    // inconsistent scripted stream: config error
    let script = dir.path().join("bad_seq.txt");
    std::fs::write(&script, "+ 0\n+ 0\n").unwrap();
    let lint = dynsub()
        .args([
            "--objective=maxcut",
            &format!("--graph={}", graph.display()),
            &format!("--sequence=file:{}", script.display()),
            "--alg=random",
            "--k=2",
        ])
        .output()
        .unwrap();
    assert_eq!(lint.status.code(), Some(2));

    // mismatched objective/input flags: config error
    let mismatch = dynsub()
        .args([
            "--objective=logdet",
            &format!("--graph={}", graph.display()),
            "--sequence=noisy",
            "--alg=random",
            "--k=2",
        ])
        .output()
        .unwrap();
    assert_eq!(mismatch.status.code(), Some(2));

    // unknown algorithm: config error
    let alg = dynsub()
        .args([
            "--objective=maxcut",
            &format!("--graph={}", graph.display()),
            "--sequence=noisy",
            "--alg=greedy",
            "--k=2",
        ])
        .output()
        .unwrap();
    assert_eq!(alg.status.code(), Some(2));
}

#[test]
fn sweep_mode_emits_aggregate_schema() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(&dir);
    let out = dir.path().join("sweep.csv");
    let status = dynsub()
        .args([
            "--objective=maxcut",
            &format!("--graph={}", graph.display()),
            "--sequence=sliding:W=5",
            "--alg=reduction-us,random",
            "--k=1,2,3",
            "--seed=1,2",
            &format!("--out={}", out.display()),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with(
        "row,algorithm,k,seed,avg_f,total_queries,mean_avg_f,min_avg_f,max_avg_f,mean_total_queries"
    ));
    // 2 algs x 3 k x 2 seeds summaries + 6 aggregates
    assert_eq!(csv.lines().count(), 1 + 12 + 6);
}

#[test]
fn verbose_flag_dumps_leveling_structure() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(&dir);
    let output = dynsub()
        .args([
            "--objective=maxcut",
            &format!("--graph={}", graph.display()),
            "--sequence=sliding:W=4",
            "--alg=reduction-ls",
            "--k=2",
            "--seed=1",
            "--verbose",
            &format!("--out={}", dir.path().join("v.csv").display()),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    // one line per level: index, chosen element, pool size
    assert!(stderr.lines().any(|l| l.starts_with("level 1: e=") && l.contains("|R_1|=")));
}

#[test]
fn large_eps_prime_warns_but_runs() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph(&dir);
    let output = dynsub()
        .args([
            "--objective=maxcut",
            &format!("--graph={}", graph.display()),
            "--sequence=sliding:W=4",
            "--alg=reduction-ls",
            "--k=2",
            "--eps-prime=2.0",
            &format!("--out={}", dir.path().join("w.csv").display()),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("guarantee regime"));
}
