//! Finite weighted graphs over a measure space.
//!
//! Vertices are dense indices `0..n`. Edge weights are stored once per
//! unordered pair, so symmetry holds by construction; [`RawGraph`] is the
//! unchecked form used for ingestion and [`validate`] reports everything that
//! keeps it from becoming a [`WeightedGraph`].

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Read access to a weighted graph, implemented by concrete graphs and by
/// implicitly defined families too large to materialise.
pub trait GraphView {
    fn vertex_count(&self) -> usize;

    fn measure(&self, u: usize) -> f64;

    /// Calls `visit(v, b(u,v))` for every neighbour `v` of `u`.
    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, visit: F);

    /// Number of unordered edges; used to pick a shortest-path strategy.
    fn edge_count(&self) -> usize;
}

/// Unchecked graph data as it comes from a file or a caller.
///
/// `entries` are directed `(u, v, b)` triples. A pair given in one direction
/// only is read as an undirected edge; a pair given in both directions must
/// carry the same weight.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawGraph {
    pub measure: Vec<f64>,
    pub entries: Vec<(usize, usize, f64)>,
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    EmptyGraph,
    IndexOutOfRange { u: usize, v: usize },
    SelfLoop { u: usize, weight: f64 },
    NonPositiveWeight { u: usize, v: usize, weight: f64 },
    AsymmetricWeight { u: usize, v: usize, forward: f64, backward: f64 },
    DuplicateEntry { u: usize, v: usize },
    NonPositiveMeasure { u: usize, value: f64 },
    LabelCount { expected: usize, found: usize },
    /// Not an error: the intrinsic constraint at an isolated vertex is `0 ≤ 1`.
    IsolatedVertex { u: usize },
}

impl ValidationIssue {
    pub fn is_error(&self) -> bool {
        !matches!(self, ValidationIssue::IsolatedVertex { .. })
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::EmptyGraph => write!(f, "graph has no vertices"),
            ValidationIssue::IndexOutOfRange { u, v } => write!(f, "entry ({u}, {v}) references a missing vertex"),
            ValidationIssue::SelfLoop { u, weight } => write!(f, "self-loop at {u} with weight {weight}"),
            ValidationIssue::NonPositiveWeight { u, v, weight } => {
                write!(f, "stored weight b({u},{v}) = {weight} is not strictly positive")
            }
            ValidationIssue::AsymmetricWeight { u, v, forward, backward } => {
                write!(f, "asymmetric weight: b({u},{v}) = {forward} but b({v},{u}) = {backward}")
            }
            ValidationIssue::DuplicateEntry { u, v } => write!(f, "duplicate entry for ({u}, {v})"),
            ValidationIssue::NonPositiveMeasure { u, value } => write!(f, "measure m({u}) = {value} is not strictly positive"),
            ValidationIssue::LabelCount { expected, found } => write!(f, "expected {expected} labels, found {found}"),
            ValidationIssue::IsolatedVertex { u } => write!(f, "vertex {u} is isolated"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    /// True when no issue other than isolated vertices was found.
    pub fn is_valid(&self) -> bool {
        self.issues.iter().all(|i| !i.is_error())
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.is_error())
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        self.issues
            .iter()
            .filter_map(|i| match i {
                ValidationIssue::IsolatedVertex { u } => Some(*u),
                _ => None,
            })
            .collect()
    }
}

/// Checks raw graph data against the standing assumptions on `(b, m)`.
pub fn validate(raw: &RawGraph) -> ValidationReport {
    let n = raw.measure.len();
    let mut issues = Vec::new();
    if n == 0 {
        issues.push(ValidationIssue::EmptyGraph);
    }
    for (u, &value) in raw.measure.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            issues.push(ValidationIssue::NonPositiveMeasure { u, value });
        }
    }
    if let Some(labels) = &raw.labels {
        if labels.len() != n {
            issues.push(ValidationIssue::LabelCount { expected: n, found: labels.len() });
        }
    }

    let mut directed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut has_edge = vec![false; n];
    for &(u, v, weight) in &raw.entries {
        if u >= n || v >= n {
            issues.push(ValidationIssue::IndexOutOfRange { u, v });
            continue;
        }
        if u == v {
            issues.push(ValidationIssue::SelfLoop { u, weight });
            continue;
        }
        if !(weight > 0.0 && weight.is_finite()) {
            issues.push(ValidationIssue::NonPositiveWeight { u, v, weight });
            continue;
        }
        if directed.insert((u, v), weight).is_some() {
            issues.push(ValidationIssue::DuplicateEntry { u, v });
        }
        has_edge[u] = true;
        has_edge[v] = true;
    }
    for (&(u, v), &forward) in &directed {
        if u < v {
            if let Some(&backward) = directed.get(&(v, u)) {
                if forward != backward {
                    issues.push(ValidationIssue::AsymmetricWeight { u, v, forward, backward });
                }
            }
        }
    }
    for (u, &seen) in has_edge.iter().enumerate() {
        if !seen {
            issues.push(ValidationIssue::IsolatedVertex { u });
        }
    }
    ValidationReport { issues }
}

/// A finite weighted graph `b` over `(X, m)`.
///
/// Immutable after construction. Degrees are computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    measure: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
    edge_count: usize,
    labels: Option<Vec<String>>,
}

impl WeightedGraph {
    /// Builds a graph from undirected edges `(u, v, b)`.
    pub fn new<I>(measure: Vec<f64>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let raw = RawGraph { measure, entries: edges.into_iter().collect(), labels: None };
        Self::from_raw(&raw)
    }

    /// Converts validated raw data; the first structural error is returned.
    pub fn from_raw(raw: &RawGraph) -> Result<Self> {
        let report = validate(raw);
        if let Some(issue) = report.errors().next() {
            return Err(Error::InvalidGraph(format!("{issue}")));
        }
        let n = raw.measure.len();
        let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, w) in &raw.entries {
            pairs.insert((u.min(v), u.max(v)), w);
        }
        let mut adjacency = vec![Vec::new(); n];
        for (&(u, v), &w) in &pairs {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        let degree = adjacency.iter().map(|l| l.iter().map(|&(_, w)| w).sum()).collect();
        Ok(WeightedGraph {
            measure: raw.measure.clone(),
            adjacency,
            degree,
            edge_count: pairs.len(),
            labels: raw.labels.clone(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count() {
            return Err(Error::ShapeMismatch { expected: self.vertex_count(), found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.measure.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn measure(&self, u: usize) -> f64 {
        self.measure[u]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `u`, falling back to its index.
    pub fn label(&self, u: usize) -> String {
        match &self.labels {
            Some(l) => l[u].clone(),
            None => format!("{u}"),
        }
    }

    /// `b(u, v)`, zero for non-neighbours and on the diagonal.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        match self.adjacency[u].binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.adjacency[u][i].1,
            Err(_) => 0.0,
        }
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search_by_key(&v, |&(w, _)| w).is_ok()
    }

    /// Neighbours of `u` with their weights, sorted by index.
    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adjacency[u]
    }

    /// `N(u)`, the number of neighbours.
    pub fn neighbor_count(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    /// Weighted degree `deg(u) = Σ_v b(u,v)`.
    pub fn weighted_degree(&self, u: usize) -> Result<f64> {
        self.check_vertex(u)?;
        Ok(self.degree[u])
    }

    pub(crate) fn degree_unchecked(&self, u: usize) -> f64 {
        self.degree[u]
    }

    /// Undirected edges `(u, v, b)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&(v, _)| v > u).map(move |&(v, w)| (u, v, w)))
    }

    pub fn check_vertex(&self, u: usize) -> Result<()> {
        if u < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { index: u, count: self.vertex_count() })
        }
    }

    /// Re-validates the graph; only isolated vertices can show up here.
    pub fn validate(&self) -> ValidationReport {
        validate(&self.to_raw())
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph { measure: self.measure.clone(), entries: self.edges().collect(), labels: self.labels.clone() }
    }

    /// Connected components of the relation `u ∼ v ⟺ b(u,v) > 0`.
    pub fn components(&self) -> ComponentStructure {
        let n = self.vertex_count();
        let mut component_of = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if component_of[start] != usize::MAX {
                continue;
            }
            component_of[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adjacency[u] {
                    if component_of[v] == usize::MAX {
                        component_of[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        ComponentStructure { component_of, count }
    }

    pub fn is_connected(&self) -> bool {
        self.components().count == 1
    }

    /// Errors unless the graph is connected.
    pub fn require_connected(&self) -> Result<()> {
        let count = self.components().count;
        if count == 1 {
            Ok(())
        } else {
            Err(Error::Disconnected { components: count })
        }
    }

    /// Induced subgraph on `vertices` (in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Result<WeightedGraph> {
        let mut index = BTreeMap::new();
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            index.insert(v, i);
        }
        let measure = vertices.iter().map(|&v| self.measure[v]).collect();
        let edges: Vec<_> = self
            .edges()
            .filter_map(|(u, v, w)| Some((*index.get(&u)?, *index.get(&v)?, w)))
            .collect();
        let mut g = WeightedGraph::new(measure, edges)?;
        if self.labels.is_some() {
            g.labels = Some(vertices.iter().map(|&v| self.label(v)).collect());
        }
        Ok(g)
    }

    /// The same graph with every measure multiplied by `factor`.
    pub fn scale_measure(&self, factor: f64) -> Result<WeightedGraph> {
        let raw = RawGraph {
            measure: self.measure.iter().map(|m| m * factor).collect(),
            entries: self.edges().collect(),
            labels: self.labels.clone(),
        };
        WeightedGraph::from_raw(&raw)
    }
}

impl GraphView for WeightedGraph {
    fn vertex_count(&self) -> usize {
        self.measure.len()
    }

    fn measure(&self, u: usize) -> f64 {
        self.measure[u]
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, mut visit: F) {
        for &(v, w) in &self.adjacency[u] {
            visit(v, w);
        }
    }

    fn edge_count(&self) -> usize {
        self.edge_count
    }
}

/// Connected components, one id per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentStructure {
    pub component_of: Vec<usize>,
    pub count: usize,
}

impl ComponentStructure {
    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.component_of[u] == self.component_of[v]
    }

    /// Vertices of component `id`, increasing.
    pub fn members(&self, id: usize) -> Vec<usize> {
        (0..self.component_of.len()).filter(|&u| self.component_of[u] == id).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.count == 1
    }
}

/// Weights of the complete graph on `{1, …, N}` with `b(i,j) = 1/(i²+j²)` and
/// `m(i) = 1/i³`. Vertex index `k` stands for the natural number `k + 1`.
///
/// Implements [`GraphView`] without storing the `N(N−1)/2` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoIntrinsicFamily {
    size: usize,
}

impl NoIntrinsicFamily {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidArgument(format!("family needs N ≥ 2, got {size}")));
        }
        Ok(NoIntrinsicFamily { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `b(i,j)` for natural numbers `i ≠ j`.
    pub fn b(i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            let (i, j) = (i as f64, j as f64);
            1.0 / (i * i + j * j)
        }
    }

    /// `m(i)` for a natural number `i`.
    pub fn m(i: usize) -> f64 {
        let i = i as f64;
        1.0 / (i * i * i)
    }
}

impl GraphView for NoIntrinsicFamily {
    fn vertex_count(&self) -> usize {
        self.size
    }

    fn measure(&self, u: usize) -> f64 {
        Self::m(u + 1)
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, mut visit: F) {
        for v in 0..self.size {
            if v != u {
                visit(v, Self::b(u + 1, v + 1));
            }
        }
    }

    fn edge_count(&self) -> usize {
        self.size * (self.size - 1) / 2
    }
}

/// Truncation to `{1, …, N}` of the complete graph with `b(i,j) = 1/(i²+j²)`
/// and `m(i) = 1/i³`, which has no nontrivial intrinsic pseudo metric in the
/// limit. Labels are the natural numbers.
pub fn make_no_intrinsic_example(size: usize) -> Result<WeightedGraph> {
    let family = NoIntrinsicFamily::new(size)?;
    let measure = (1..=size).map(NoIntrinsicFamily::m).collect();
    let mut edges = Vec::with_capacity(family.edge_count());
    for i in 1..=size {
        for j in i + 1..=size {
            edges.push((i - 1, j - 1, NoIntrinsicFamily::b(i, j)));
        }
    }
    WeightedGraph::new(measure, edges)?.with_labels((1..=size).map(|i| format!("{i}")).collect())
}

/// Star graph with center `0` and leaves `1..=k`.
pub fn make_star(leaf_measures: &[f64], center_measure: f64, edge_weights: &[f64]) -> Result<WeightedGraph> {
    if leaf_measures.is_empty() {
        return Err(Error::InvalidArgument("a star needs at least one leaf".into()));
    }
    if leaf_measures.len() != edge_weights.len() {
        return Err(Error::ShapeMismatch { expected: leaf_measures.len(), found: edge_weights.len() });
    }
    let positive = |x: f64| x > 0.0 && x.is_finite();
    if !positive(center_measure) || !leaf_measures.iter().chain(edge_weights).all(|&x| positive(x)) {
        return Err(Error::InvalidArgument("star measures and weights must be positive".into()));
    }
    let mut measure = Vec::with_capacity(leaf_measures.len() + 1);
    measure.push(center_measure);
    measure.extend_from_slice(leaf_measures);
    let edges = edge_weights.iter().enumerate().map(|(i, &b)| (0, i + 1, b));
    WeightedGraph::new(measure, edges)
}

/// Path `0 – 1 – … – (n−1)` with unit edge weights.
pub fn path_graph(measure: Vec<f64>) -> Result<WeightedGraph> {
    let n = measure.len();
    WeightedGraph::new(measure, (1..n).map(|i| (i - 1, i, 1.0)))
}

/// Cycle on `n ≥ 3` vertices with unit edge weights.
pub fn cycle_graph(measure: Vec<f64>) -> Result<WeightedGraph> {
    let n = measure.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("a cycle needs at least 3 vertices, got {n}")));
    }
    WeightedGraph::new(measure, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
}

/// Complete graph with unit edge weights.
pub fn complete_graph(measure: Vec<f64>) -> Result<WeightedGraph> {
    let n = measure.len();
    let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0))).collect();
    WeightedGraph::new(measure, edges)
}
