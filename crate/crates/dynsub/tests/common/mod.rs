//! Shared helpers for the integration suites: seeded graph generators and
//! well-formed random update streams.
#![allow(dead_code)] // each test binary uses its own subset

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dynsub::dataio::UpdateEvent;
use dynsub::elements::ElementId;
use dynsub::objectives::{CoverageObjective, MaxCutObjective};

/// Erdős–Rényi graph G(n, p).
pub fn er_graph(n: usize, p: f64, seed: u64) -> MaxCutObjective {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    MaxCutObjective::new(n, &edges).unwrap()
}

/// Preferential-attachment graph: each new vertex attaches `m` edges to
/// endpoints sampled from the current edge list (heavy-tailed degrees,
/// like the social-network benchmarks).
pub fn preferential_attachment_graph(n: usize, m: usize, seed: u64) -> MaxCutObjective {
    assert!(n > m && m >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut endpoints: Vec<u32> = Vec::new();
    for v in 1..=m as u32 {
        edges.push((0, v));
        endpoints.extend([0, v]);
    }
    for v in (m as u32 + 1)..n as u32 {
        let mut targets = std::collections::BTreeSet::new();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if t != v {
                targets.insert(t);
            }
        }
        for &t in &targets {
            edges.push((v, t));
            endpoints.extend([v, t]);
        }
    }
    MaxCutObjective::new(n, &edges).unwrap()
}

/// Heavy-tailed random graph: a few hubs collect most of the edges and the
/// rest is sparse spoke-to-spoke noise. Mirrors the degree skew of the
/// large social and web graphs the benchmarks target.
pub fn hub_spoke_graph(n: usize, hubs: usize, seed: u64) -> MaxCutObjective {
    assert!(hubs >= 1 && hubs < n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = std::collections::BTreeSet::new();
    let add = |edges: &mut std::collections::BTreeSet<(u32, u32)>, a: u32, b: u32| {
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    };
    for v in hubs as u32..n as u32 {
        add(&mut edges, v, rng.gen_range(0..hubs) as u32);
        if rng.gen_bool(0.5) {
            add(&mut edges, v, rng.gen_range(0..hubs) as u32);
        }
    }
    for _ in 0..n / 2 {
        let a = rng.gen_range(hubs..n) as u32;
        let b = rng.gen_range(hubs..n) as u32;
        add(&mut edges, a, b);
    }
    let edges: Vec<(u32, u32)> = edges.into_iter().collect();
    MaxCutObjective::new(n, &edges).unwrap()
}

/// Random weighted coverage instance.
pub fn random_coverage(n: usize, items: usize, seed: u64) -> CoverageObjective {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let covers = (0..n)
        .map(|_| (0..items as u32).filter(|_| rng.gen_bool(0.25)).collect::<Vec<_>>())
        .collect();
    let weights = (0..items).map(|_| rng.gen_range(0.1..2.0)).collect();
    CoverageObjective::new(covers, weights).unwrap()
}

/// Well-formed random insert/delete stream over universe `0..n`: inserts
/// dead elements with probability `insert_bias`, deletes alive ones
/// otherwise.
pub fn random_stream(n: usize, steps: usize, insert_bias: f64, seed: u64) -> Vec<UpdateEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alive: Vec<ElementId> = Vec::new();
    let mut dead: Vec<ElementId> = (0..n as u32).map(ElementId).collect();
    let mut events = Vec::with_capacity(steps);
    for t in 0..steps {
        let do_insert = if alive.is_empty() {
            true
        } else if dead.is_empty() {
            false
        } else {
            rng.gen_bool(insert_bias)
        };
        if do_insert {
            let idx = rng.gen_range(0..dead.len());
            let v = dead.swap_remove(idx);
            alive.push(v);
            events.push(UpdateEvent::insert(v, t));
        } else {
            let idx = rng.gen_range(0..alive.len());
            let v = alive.swap_remove(idx);
            dead.push(v);
            events.push(UpdateEvent::delete(v, t));
        }
    }
    events
}

pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}
