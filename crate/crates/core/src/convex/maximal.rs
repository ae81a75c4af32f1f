use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::barrier::{BarrierProblem, Constraint};
use super::kappa::SolverSettings;
use super::SolverReport;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::{
    default_intrinsic_weighting, pair_index, path_metric, universal_bound_metric, vertex_loads, PseudoMetric,
};

/// Step used by [`maximality_certificate`] by default.
pub const DEFAULT_DELTA_CERT: f64 = 1e-5;

/// Relative amount by which the floor may be undercut so that the start point
/// is strictly feasible even when the floor itself has load exactly one.
const FLOOR_SLACK: f64 = 1e-9;

/// Maximise `Σ c(x,y) ϱ(x,y)` over intrinsic pseudo metrics `ϱ ≥ σ`.
#[derive(Debug, Clone)]
pub struct MaximalMetricProblem<'a> {
    pub graph: &'a WeightedGraph,
    /// Floor metric; must be intrinsic.
    pub floor: PseudoMetric,
    /// Objective weight per pair, indexed like [`PseudoMetric::pairs`].
    pub objective: Vec<f64>,
    pub settings: SolverSettings,
}

impl<'a> MaximalMetricProblem<'a> {
    /// Zero floor and all-ones objective.
    pub fn new(graph: &'a WeightedGraph) -> Self {
        let n = graph.vertex_count();
        MaximalMetricProblem {
            graph,
            floor: PseudoMetric::zero(n),
            objective: vec![1.0; n * n.saturating_sub(1) / 2],
            settings: SolverSettings::default(),
        }
    }

    pub fn with_floor(mut self, floor: PseudoMetric) -> Self {
        self.floor = floor;
        self
    }

    pub fn with_objective(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    /// Objective `1` on `(x, y)` and `rest` on every other pair.
    pub fn concentrated_on(mut self, x: usize, y: usize, rest: f64) -> Result<Self> {
        let n = self.graph.vertex_count();
        self.graph.check_vertex(x)?;
        self.graph.check_vertex(y)?;
        if x == y {
            return Err(Error::InvalidArgument("objective pair must have distinct vertices".into()));
        }
        self.objective = vec![rest; n * (n - 1) / 2];
        self.objective[pair_index(n, x, y)] = 1.0;
        Ok(self)
    }

    pub fn with_settings(mut self, settings: SolverSettings) -> Self {
        self.settings = settings;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalSolution {
    pub metric: PseudoMetric,
    pub report: SolverReport,
    /// Number of triangle inequalities that had to be added to the program.
    pub active_triangles: usize,
    /// Number of barrier solves.
    pub rounds: usize,
}

/// `(long side, via)`: the inequality `ϱ(long) ≤ ϱ(x,via) + ϱ(via,y)`.
type Triangle = (usize, usize, usize);

fn triangle_constraint(n: usize, (x, y, z): Triangle) -> Constraint {
    Constraint::Linear {
        terms: vec![(pair_index(n, x, y), 1.0), (pair_index(n, x, z), -1.0), (pair_index(n, z, y), -1.0)],
        rhs: 0.0,
    }
}

fn violated_triangles(n: usize, values: &[f64], known: &BTreeSet<Triangle>) -> Vec<Triangle> {
    let get = |a: usize, b: usize| if a == b { 0.0 } else { values[pair_index(n, a, b)] };
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                if get(x, y) > get(x, z) + get(z, y) && !known.contains(&(x, y, z)) {
                    out.push((x, y, z));
                }
            }
        }
    }
    out
}

fn table_from(n: usize, values: &[f64]) -> Result<PseudoMetric> {
    PseudoMetric::from_fn(n, |x, y| values[pair_index(n, x, y)].max(0.0))
}

/// Maximal intrinsic pseudo metric above the floor for the given objective.
///
/// The program is solved over the pair table with the vertex constraints
/// `Σ_y b(x,y)ϱ(x,y)² ≤ m(x)`. Triangle inequalities enter lazily: after each
/// solve every violated one is added and the program is re-solved.
pub fn maximal_metric(problem: &MaximalMetricProblem<'_>) -> Result<MaximalSolution> {
    let graph = problem.graph;
    graph.require_connected()?;
    let n = graph.vertex_count();
    let pairs = n * (n - 1) / 2;
    if problem.floor.vertex_count() != n {
        return Err(Error::ShapeMismatch { expected: n, found: problem.floor.vertex_count() });
    }
    if problem.objective.len() != pairs {
        return Err(Error::ShapeMismatch { expected: pairs, found: problem.objective.len() });
    }
    if problem.objective.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
        return Err(Error::InvalidArgument("objective weights must be positive and finite".into()));
    }
    let floor_loads = vertex_loads(graph, &problem.floor)?;
    if !floor_loads.is_intrinsic() {
        return Err(Error::NotIntrinsic { max_load: floor_loads.max_load() });
    }
    if pairs == 0 {
        let report = SolverReport {
            value: 0.0,
            converged: true,
            iterations: 0,
            max_violation: 0.0,
            stationarity: 0.0,
            duality_gap: 0.0,
            constraint_slack: Vec::new(),
        };
        return Ok(MaximalSolution { metric: PseudoMetric::zero(n), report, active_triangles: 0, rounds: 0 });
    }

    let sigma: Vec<f64> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).map(|(x, y)| problem.floor.get(x, y)).collect();
    let d_s = universal_bound_metric(graph);
    let cap: Vec<f64> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .map(|(x, y)| 2.0 * d_s.get(x, y) + 1.0)
        .collect();

    let mut base = Vec::with_capacity(n + 2 * pairs);
    for v in 0..n {
        if graph.neighbor_count(v) == 0 {
            continue;
        }
        let terms = graph.neighbors(v).iter().map(|&(z, b)| (b / graph.measure(v), vec![(pair_index(n, v, z), 1.0)])).collect();
        base.push(Constraint::Quadratic { terms });
    }
    for (i, (&s, &c)) in sigma.iter().zip(&cap).enumerate() {
        base.push(Constraint::Linear { terms: vec![(i, -1.0)], rhs: -(1.0 - FLOOR_SLACK) * s });
        base.push(Constraint::Linear { terms: vec![(i, 1.0)], rhs: c });
    }

    let start = strict_start(graph, &sigma, &base)?;
    let cost: Vec<f64> = problem.objective.iter().map(|c| -c).collect();
    let barrier_settings = problem.settings.barrier();

    let mut triangles: BTreeSet<Triangle> = BTreeSet::new();
    let mut iterations = 0;
    let mut rounds = 0;
    loop {
        let mut constraints = base.clone();
        constraints.extend(triangles.iter().map(|&t| triangle_constraint(n, t)));
        let barrier = BarrierProblem { dim: pairs, cost: cost.clone(), constraints };
        let out = barrier.solve(start.clone(), &barrier_settings)?;
        iterations += out.iterations;
        rounds += 1;
        let missing = violated_triangles(n, &out.x, &triangles);
        if missing.is_empty() || iterations >= problem.settings.max_iterations {
            let metric = table_from(n, &out.x)?;
            let loads = vertex_loads(graph, &metric)?;
            let (tri, _) = metric.max_triangle_violation();
            let below_floor = problem.floor.max_excess_over(&metric)?;
            let max_violation = (loads.max_load() - 1.0).max(tri).max(below_floor).max(0.0);
            let report = SolverReport {
                value: problem.objective.iter().zip(&out.x).map(|(c, v)| c * v).sum(),
                converged: out.converged && missing.is_empty() && max_violation <= problem.settings.tol_solve,
                iterations,
                max_violation,
                stationarity: out.stationarity,
                duality_gap: out.duality_gap,
                constraint_slack: out.slacks,
            };
            return Ok(MaximalSolution { metric, report, active_triangles: triangles.len(), rounds });
        }
        triangles.extend(missing);
    }
}

/// `(1 − η/2)σ + ε(d + c·1)` with `d` the default intrinsic path metric,
/// shrinking `ε` until every constraint holds strictly.
fn strict_start(graph: &WeightedGraph, sigma: &[f64], base: &[Constraint]) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    let d = path_metric(graph, &default_intrinsic_weighting(graph))?;
    let spread: Vec<f64> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).map(|(x, y)| d.get(x, y) + 1.0).collect();
    let mut eps = 0.5;
    for _ in 0..200 {
        let x: Vec<f64> = sigma.iter().zip(&spread).map(|(s, w)| (1.0 - FLOOR_SLACK / 2.0) * s + eps * w).collect();
        if base.iter().all(|c| c.slack(&x) > 0.0) {
            return Ok(x);
        }
        eps *= 0.5;
    }
    Err(Error::Numerical("no strictly feasible start above the floor".into()))
}

/// Why a pair cannot be raised on its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairStatus {
    /// Raising the entry pushes the load at this endpoint above one.
    LoadBound { vertex: usize, load: f64 },
    /// The entry already equals `ϱ(x,via) + ϱ(via,y)` up to the step, and
    /// both of those pairs are blocked.
    TriangleDominated { via: usize },
    /// The entry can be raised without breaking either condition.
    Raisable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCertificate {
    pub x: usize,
    pub y: usize,
    pub status: PairStatus,
}

impl PairCertificate {
    pub fn passes(&self) -> bool {
        !matches!(self.status, PairStatus::Raisable)
    }
}

/// Tries to raise each entry of `ϱ` by `delta`.
///
/// A pair passes when the raised entry would break the triangle inequality
/// by more than `delta/2` or push the load at one of its endpoints above
/// `1 + eps_feas`.
pub fn maximality_certificate(
    graph: &WeightedGraph,
    rho: &PseudoMetric,
    delta: f64,
    eps_feas: f64,
) -> Result<Vec<PairCertificate>> {
    let n = graph.vertex_count();
    if rho.vertex_count() != n {
        return Err(Error::ShapeMismatch { expected: n, found: rho.vertex_count() });
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("certificate step must be positive".into()));
    }
    let loads = vertex_loads(graph, rho)?;
    let idx = |x: usize, y: usize| x * n + y;
    let mut status = vec![PairStatus::Raisable; n * n];
    for x in 0..n {
        for y in x + 1..n {
            if !graph.is_edge(x, y) {
                continue;
            }
            let b = graph.weight(x, y);
            let raised = rho.get(x, y) + delta;
            let bump = b * (raised * raised - rho.get(x, y) * rho.get(x, y));
            let lx = loads.loads[x] + bump / graph.measure(x);
            let ly = loads.loads[y] + bump / graph.measure(y);
            if lx > 1.0 + eps_feas || ly > 1.0 + eps_feas {
                let (vertex, load) = if lx >= ly { (x, lx) } else { (y, ly) };
                status[idx(x, y)] = PairStatus::LoadBound { vertex, load };
            }
        }
    }
    // a pair is blocked by a triangle only through pairs that are blocked themselves
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..n {
            for y in x + 1..n {
                if status[idx(x, y)] != PairStatus::Raisable {
                    continue;
                }
                let blocked = |u: usize, v: usize| status[idx(u.min(v), u.max(v))] != PairStatus::Raisable;
                let raised = rho.get(x, y) + delta;
                let via = (0..n)
                    .filter(|&z| z != x && z != y && blocked(x, z) && blocked(z, y))
                    .map(|z| (z, rho.get(x, z) + rho.get(z, y)))
                    .filter(|&(_, len)| raised > len + delta / 2.0)
                    .min_by(|a, b| a.1.total_cmp(&b.1));
                if let Some((z, _)) = via {
                    status[idx(x, y)] = PairStatus::TriangleDominated { via: z };
                    changed = true;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for x in 0..n {
        for y in x + 1..n {
            out.push(PairCertificate { x, y, status: status[idx(x, y)] });
        }
    }
    Ok(out)
}
