//! Fixtures shared by the integration tests.

#![allow(dead_code)]

use std::time::{Duration, Instant};

use intrinsic_core::graph::path_graph;
use intrinsic_core::metric::{gradient_norm, metric_from_function, path_metric, vertex_loads};
use intrinsic_core::{EdgeWeighting, GraphFunction, PseudoMetric, WeightedGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edge lists of all connected graphs on `n` vertices up to isomorphism.
pub fn connected_shapes(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p).collect();
        if !connected(n, &edges) {
            continue;
        }
        let canonical = perms
            .iter()
            .map(|p| {
                let mut e: Vec<(usize, usize)> =
                    edges.iter().map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
                e.sort_unstable();
                e
            })
            .min()
            .unwrap_or_default();
        if seen.insert(canonical) {
            out.push(edges);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            let v = if a == u { b } else if b == u { a } else { continue };
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn unit_graph(measure: Vec<f64>, edges: &[(usize, usize)]) -> WeightedGraph {
    WeightedGraph::new(measure, edges.iter().map(|&(u, v)| (u, v, 1.0))).unwrap()
}

/// Random spanning tree plus extra edges, weights and measures in `[0.2, 3]`.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, min_n: usize, max_n: usize) -> WeightedGraph {
    let n = rng.gen_range(min_n..=max_n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = std::collections::BTreeMap::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (u, v) = (order[i].min(order[j]), order[i].max(order[j]));
        edges.insert((u, v), rng.gen_range(0.2..3.0));
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.insert((u.min(v), u.max(v)), rng.gen_range(0.2..3.0));
        }
    }
    let measure = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
    WeightedGraph::new(measure, edges.into_iter().map(|((u, v), b)| (u, v, b))).unwrap()
}

/// `d_w` for random edge lengths scaled so every vertex load of `w` is at most one.
pub fn random_path_metric(rng: &mut ChaCha8Rng, graph: &WeightedGraph) -> PseudoMetric {
    let raw = EdgeWeighting::from_edges(graph, |_, _| rng.gen_range(0.05..2.0)).unwrap();
    let load = (0..graph.vertex_count())
        .map(|x| {
            graph.neighbors(x).iter().map(|&(y, b)| b * raw.symmetric_value(x, y).unwrap().powi(2)).sum::<f64>()
                / graph.measure(x)
        })
        .fold(0.0, f64::max);
    let scale = 1.0 / load.sqrt();
    let w = EdgeWeighting::from_edges(graph, |u, v| raw.symmetric_value(u, v).unwrap() * scale).unwrap();
    path_metric(graph, &w).unwrap()
}

/// `|f(x) − f(y)|` for random `f` scaled to `max |∇f| = 1`.
pub fn random_function_metric(rng: &mut ChaCha8Rng, graph: &WeightedGraph) -> PseudoMetric {
    let f = GraphFunction((0..graph.vertex_count()).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let top = gradient_norm(graph, &f).unwrap().into_iter().fold(0.0, f64::max);
    let scaled = GraphFunction(f.values().iter().map(|v| v / top).collect());
    metric_from_function(&scaled)
}

pub fn random_intrinsic_metric(rng: &mut ChaCha8Rng, graph: &WeightedGraph) -> PseudoMetric {
    let sigma =
        if rng.gen_bool(0.5) { random_path_metric(rng, graph) } else { random_function_metric(rng, graph) };
    debug_assert!(vertex_loads(graph, &sigma).unwrap().is_intrinsic());
    sigma
}

pub fn p4() -> WeightedGraph {
    path_graph(vec![1.0; 4]).unwrap()
}

/// One line per criterion, printed before the assertion fires.
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub limit: Duration,
    start: Instant,
}

impl Criterion {
    pub fn start(id: usize, name: &'static str, limit_secs: u64) -> Self {
        Criterion { id, name, limit: Duration::from_secs(limit_secs), start: Instant::now() }
    }

    pub fn finish(self, ok: bool, detail: &str) {
        let elapsed = self.start.elapsed();
        let in_time = elapsed < self.limit;
        let verdict = if ok && in_time { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} [{verdict}] {} ({:.2}s of {}s): {detail}",
            self.id,
            self.name,
            elapsed.as_secs_f64(),
            self.limit.as_secs()
        );
        assert!(ok, "criterion {} failed: {detail}", self.id);
        assert!(in_time, "criterion {} exceeded {:?}: {:?}", self.id, self.limit, elapsed);
    }
}
