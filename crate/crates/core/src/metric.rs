//! Pseudo metrics as data and the intrinsic-feasibility check.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{GraphView, WeightedGraph};
use crate::math::{sqrt, Square};
use crate::DEFAULT_EPS_FEAS;

/// Symmetric table `σ` with zero diagonal, stored as the strict upper
/// triangle. Entries across graph components may be `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoMetric {
    n: usize,
    upper: Vec<f64>,
}

#[inline]
pub(crate) fn pair_index(n: usize, x: usize, y: usize) -> usize {
    let (i, j) = if x < y { (x, y) } else { (y, x) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl PseudoMetric {
    pub fn zero(n: usize) -> Self {
        PseudoMetric { n, upper: vec![0.0; n * n.saturating_sub(1) / 2] }
    }

    /// Builds a table from `value(x, y)` evaluated for `x < y`.
    ///
    /// Only symmetry and the zero diagonal are enforced here; call
    /// [`check_triangle`](Self::check_triangle) for the triangle inequality.
    pub fn from_fn(n: usize, mut value: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut metric = PseudoMetric::zero(n);
        for x in 0..n {
            for y in x + 1..n {
                metric.set(x, y, value(x, y))?;
            }
        }
        Ok(metric)
    }

    /// Reads a full square table, checking shape, symmetry, the diagonal and
    /// nonnegativity.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::ShapeMismatch { expected: n, found: row.len() });
            }
        }
        for x in 0..n {
            if rows[x][x] != 0.0 {
                return Err(Error::InvalidMetric(format!("diagonal entry ({x},{x}) is {}", rows[x][x])));
            }
            for y in x + 1..n {
                if rows[x][y] != rows[y][x] && !(rows[x][y].is_nan() && rows[y][x].is_nan()) {
                    return Err(Error::InvalidMetric(format!(
                        "asymmetric entries ({x},{y}) = {} and ({y},{x}) = {}",
                        rows[x][y], rows[y][x]
                    )));
                }
            }
        }
        PseudoMetric::from_fn(n, |x, y| rows[x][y])
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        if x == y {
            0.0
        } else {
            self.upper[pair_index(self.n, x, y)]
        }
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) -> Result<()> {
        if x >= self.n || y >= self.n {
            return Err(Error::VertexOutOfRange { index: x.max(y), count: self.n });
        }
        if x == y {
            return if value == 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidMetric(format!("diagonal entry ({x},{x}) must be zero")))
            };
        }
        if !(value >= 0.0) {
            return Err(Error::InvalidMetric(format!("entry ({x},{y}) = {value} is negative or NaN")));
        }
        self.upper[pair_index(self.n, x, y)] = value;
        Ok(())
    }

    /// Unordered pairs `(x, y, σ(x,y))` with `x < y`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |x| (x + 1..self.n).map(move |y| (x, y, self.get(x, y))))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|x| (0..self.n).map(|y| self.get(x, y)).collect()).collect()
    }

    /// Largest `σ(x,z) − σ(x,y) − σ(y,z)` over all triples, with the triple
    /// attaining it. Zero for an empty or tiny table.
    pub fn max_triangle_violation(&self) -> (f64, Option<(usize, usize, usize)>) {
        let mut worst = (0.0, None);
        for x in 0..self.n {
            for z in x + 1..self.n {
                let direct = self.get(x, z);
                for y in 0..self.n {
                    if y == x || y == z {
                        continue;
                    }
                    let detour = self.get(x, y) + self.get(y, z);
                    if detour.is_infinite() {
                        continue;
                    }
                    let excess = direct - detour;
                    if excess > worst.0 {
                        worst = (excess, Some((x, y, z)));
                    }
                }
            }
        }
        worst
    }

    /// Exhaustive `O(n³)` triangle check with slack `tau`.
    pub fn check_triangle(&self, tau: f64) -> Result<()> {
        match self.max_triangle_violation() {
            (excess, Some((x, y, z))) if excess > tau => Err(Error::InvalidMetric(format!(
                "triangle inequality fails: σ({x},{z}) exceeds σ({x},{y}) + σ({y},{z}) by {excess:e}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn scaled(&self, factor: f64) -> PseudoMetric {
        PseudoMetric { n: self.n, upper: self.upper.iter().map(|v| v * factor).collect() }
    }

    /// `t·self + (1−t)·other`.
    pub fn convex_combination(&self, other: &PseudoMetric, t: f64) -> Result<PseudoMetric> {
        self.same_shape(other)?;
        let upper = self.upper.iter().zip(&other.upper).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        Ok(PseudoMetric { n: self.n, upper })
    }

    /// Largest `|σ(x,y) − ϱ(x,y)|` over finite pairs.
    pub fn max_abs_diff(&self, other: &PseudoMetric) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .upper
            .iter()
            .zip(&other.upper)
            .filter(|(a, b)| a.is_finite() || b.is_finite())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Largest `σ(x,y) − ϱ(x,y)`, i.e. how far `self ≤ other` fails.
    pub fn max_excess_over(&self, other: &PseudoMetric) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| if b.is_infinite() { f64::NEG_INFINITY } else { a - b })
            .fold(f64::NEG_INFINITY, f64::max))
    }

    fn same_shape(&self, other: &PseudoMetric) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::ShapeMismatch { expected: self.n, found: other.n })
        }
    }
}

/// Entrywise maximum `σ ∨ ϱ`; again a pseudo metric.
pub fn max_combine(sigma: &PseudoMetric, rho: &PseudoMetric) -> Result<PseudoMetric> {
    sigma.same_shape(rho)?;
    let upper = sigma.upper.iter().zip(&rho.upper).map(|(a, b)| a.max(*b)).collect();
    Ok(PseudoMetric { n: sigma.n, upper })
}

/// Directed weights `w(u, v) ≥ 0`, usually given on the edges of a graph.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeWeighting {
    weights: BTreeMap<(usize, usize), f64>,
}

impl EdgeWeighting {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        if !(w >= 0.0) {
            return Err(Error::NegativeWeight { u, v, weight: w });
        }
        self.weights.insert((u, v), w);
        Ok(())
    }

    /// Same weight in both directions.
    pub fn set_symmetric(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        self.set(u, v, w)?;
        self.set(v, u, w)
    }

    pub fn get(&self, u: usize, v: usize) -> Option<f64> {
        self.weights.get(&(u, v)).copied()
    }

    /// `w(u,v) ∧ w(v,u)`, using whichever direction is defined.
    pub fn symmetric_value(&self, u: usize, v: usize) -> Option<f64> {
        match (self.get(u, v), self.get(v, u)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weights.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    /// `w(u,v) = value(u,v)` in both directions of every edge.
    pub fn from_edges(graph: &WeightedGraph, mut value: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut w = EdgeWeighting::new();
        for (u, v, _) in graph.edges() {
            w.set(u, v, value(u, v))?;
            w.set(v, u, value(v, u))?;
        }
        Ok(w)
    }

    /// Restriction of a pseudo metric to the edges of `graph`.
    pub fn from_metric(graph: &WeightedGraph, sigma: &PseudoMetric) -> Result<Self> {
        Self::from_edges(graph, |u, v| sigma.get(u, v))
    }
}

/// Per-vertex values `(1/m(x)) Σ_y b(x,y) σ(x,y)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexLoadProfile {
    pub loads: Vec<f64>,
    pub eps_feas: f64,
}

impl VertexLoadProfile {
    pub fn max_load(&self) -> f64 {
        self.loads.iter().copied().fold(0.0, f64::max)
    }

    /// Vertex with the largest load (lowest index on ties).
    pub fn worst_vertex(&self) -> Option<usize> {
        let max = self.max_load();
        self.loads.iter().position(|&l| l == max)
    }

    pub fn is_intrinsic(&self) -> bool {
        self.max_load() <= 1.0 + self.eps_feas
    }
}

/// Vertex loads with the default feasibility slack.
pub fn vertex_loads(graph: &WeightedGraph, sigma: &PseudoMetric) -> Result<VertexLoadProfile> {
    vertex_loads_with(graph, sigma, DEFAULT_EPS_FEAS)
}

/// Vertex loads with an explicit slack; `eps_feas = 0` is the strict check.
pub fn vertex_loads_with(graph: &WeightedGraph, sigma: &PseudoMetric, eps_feas: f64) -> Result<VertexLoadProfile> {
    let n = graph.vertex_count();
    if sigma.vertex_count() != n {
        return Err(Error::ShapeMismatch { expected: n, found: sigma.vertex_count() });
    }
    let mut loads = Vec::with_capacity(n);
    for x in 0..n {
        let mut sum = 0.0;
        for &(y, b) in graph.neighbors(x) {
            let s = sigma.get(x, y);
            if s.is_infinite() {
                return Err(Error::InfiniteOnEdge { u: x, v: y });
            }
            sum += b * s * s;
        }
        loads.push(sum / graph.measure(x));
    }
    Ok(VertexLoadProfile { loads, eps_feas })
}

/// A real function on the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction(pub Vec<f64>);

impl GraphFunction {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indicator-type function `Σ coeff·1_{v}`.
    pub fn from_point_masses(n: usize, masses: &[(usize, f64)]) -> Result<Self> {
        let mut f = vec![0.0; n];
        for &(v, c) in masses {
            if v >= n {
                return Err(Error::VertexOutOfRange { index: v, count: n });
            }
            f[v] += c;
        }
        Ok(GraphFunction(f))
    }
}

impl From<Vec<f64>> for GraphFunction {
    fn from(values: Vec<f64>) -> Self {
        GraphFunction(values)
    }
}

/// `|∇f|²(x) = (1/m(x)) Σ_y b(x,y) (f(x) − f(y))²`.
pub fn gradient_norm_squared(graph: &WeightedGraph, f: &GraphFunction) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    if f.len() != n {
        return Err(Error::ShapeMismatch { expected: n, found: f.len() });
    }
    let values = f.values();
    Ok((0..n)
        .map(|x| {
            let sum: f64 = graph.neighbors(x).iter().map(|&(y, b)| b * (values[x] - values[y]).sq()).sum();
            sum / graph.measure(x)
        })
        .collect())
}

/// `|∇f|(x)` per vertex.
pub fn gradient_norm(graph: &WeightedGraph, f: &GraphFunction) -> Result<Vec<f64>> {
    Ok(gradient_norm_squared(graph, f)?.into_iter().map(sqrt).collect())
}

/// `σ_f(x,y) = |f(x) − f(y)|`.
pub fn metric_from_function(f: &GraphFunction) -> PseudoMetric {
    let v = f.values();
    let n = v.len();
    let mut metric = PseudoMetric::zero(n);
    for x in 0..n {
        for y in x + 1..n {
            metric.upper[pair_index(n, x, y)] = (v[x] - v[y]).abs();
        }
    }
    metric
}

#[derive(Clone, Copy, PartialEq)]
struct Candidate {
    dist: f64,
    vertex: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest path lengths with nonnegative edge lengths
/// `length(u, v, b(u,v))`. Unreachable vertices get `f64::INFINITY`.
///
/// Dense graphs use the array variant of Dijkstra's algorithm, sparse graphs a
/// binary heap. With `target` set, the search stops once the target is final;
/// entries for unsettled vertices are then upper bounds.
pub fn shortest_path_lengths<G, L>(graph: &G, source: usize, target: Option<usize>, length: L) -> Vec<f64>
where
    G: GraphView,
    L: Fn(usize, usize, f64) -> f64,
{
    let n = graph.vertex_count();
    let dense = n > 1 && graph.edge_count().saturating_mul(8) >= n * (n - 1);
    if dense {
        dense_dijkstra(graph, source, target, length)
    } else {
        heap_dijkstra(graph, source, target, length)
    }
}

fn heap_dijkstra<G, L>(graph: &G, source: usize, target: Option<usize>, length: L) -> Vec<f64>
where
    G: GraphView,
    L: Fn(usize, usize, f64) -> f64,
{
    let n = graph.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Candidate { dist: 0.0, vertex: source });
    while let Some(Candidate { dist: d, vertex: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if Some(u) == target {
            break;
        }
        graph.for_each_neighbor(u, |v, b| {
            if done[v] {
                return;
            }
            let candidate = d + length(u, v, b);
            if candidate < dist[v] {
                dist[v] = candidate;
                heap.push(Candidate { dist: candidate, vertex: v });
            }
        });
    }
    dist
}

fn dense_dijkstra<G, L>(graph: &G, source: usize, target: Option<usize>, length: L) -> Vec<f64>
where
    G: GraphView,
    L: Fn(usize, usize, f64) -> f64,
{
    let n = graph.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[source] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for (v, &d) in dist.iter().enumerate() {
            if !done[v] && d < best {
                best = d;
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        if Some(u) == target {
            break;
        }
        graph.for_each_neighbor(u, |v, b| {
            if !done[v] {
                let candidate = best + length(u, v, b);
                if candidate < dist[v] {
                    dist[v] = candidate;
                }
            }
        });
    }
    dist
}

/// Path pseudo metric `d_w`: infimum over connecting paths of
/// `Σ w(x_{k−1},x_k) ∧ w(x_k,x_{k−1})`. Cross-component entries are infinite.
pub fn path_metric(graph: &WeightedGraph, w: &EdgeWeighting) -> Result<PseudoMetric> {
    let n = graph.vertex_count();
    let mut lengths: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (u, v, _) in graph.edges() {
        let value = w.symmetric_value(u, v).ok_or(Error::MissingWeight { u, v })?;
        if !(value >= 0.0) {
            return Err(Error::NegativeWeight { u, v, weight: value });
        }
        lengths.insert((u, v), value);
    }
    let lookup = |u: usize, v: usize, _b: f64| lengths[&(u.min(v), u.max(v))];
    let mut metric = PseudoMetric::zero(n);
    for source in 0..n {
        let dist = shortest_path_lengths(graph, source, None, lookup);
        for (target, &d) in dist.iter().enumerate().skip(source + 1) {
            metric.upper[pair_index(n, source, target)] = d;
        }
    }
    Ok(metric)
}

/// `w(x,y) = (m(x)/deg(x))^{1/2} ∧ (m(y)/deg(y))^{1/2}` on edges; its path
/// metric is intrinsic.
pub fn default_intrinsic_weighting(graph: &WeightedGraph) -> EdgeWeighting {
    let scale = |u: usize| sqrt(graph.measure(u) / graph.degree_unchecked(u));
    let mut w = EdgeWeighting::new();
    for (u, v, _) in graph.edges() {
        let value = scale(u).min(scale(v));
        w.weights.insert((u, v), value);
        w.weights.insert((v, u), value);
    }
    w
}

/// `s(x,y) = m(y)^{1/2} / b(x,y)^{1/2}` for `x ∼ y`.
#[inline]
pub fn universal_bound_edge(measure_y: f64, b: f64) -> f64 {
    sqrt(measure_y / b)
}

/// The (asymmetric) weighting `s` on the edges of `graph`.
pub fn universal_bound_weighting(graph: &WeightedGraph) -> EdgeWeighting {
    let mut w = EdgeWeighting::new();
    for (u, v, b) in graph.edges() {
        w.weights.insert((u, v), universal_bound_edge(graph.measure(v), b));
        w.weights.insert((v, u), universal_bound_edge(graph.measure(u), b));
    }
    w
}

/// `d_s`, which dominates every intrinsic pseudo metric.
pub fn universal_bound_metric(graph: &WeightedGraph) -> PseudoMetric {
    path_metric(graph, &universal_bound_weighting(graph)).expect("s is defined and positive on every edge")
}

/// `d_s(x, y)` on any graph view, stopping once `y` is settled.
pub fn universal_bound_distance<G: GraphView>(graph: &G, x: usize, y: usize) -> f64 {
    let dist = shortest_path_lengths(graph, x, Some(y), |u, v, b| {
        universal_bound_edge(graph.measure(v), b).min(universal_bound_edge(graph.measure(u), b))
    });
    dist[y]
}
