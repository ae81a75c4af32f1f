use alloc::vec;
use alloc::vec::Vec;

use super::barrier::{BarrierProblem, BarrierSettings, Constraint};
use super::SolverReport;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::{GraphFunction, PseudoMetric};
use crate::DEFAULT_TOL_SOLVE;

/// Tolerances for the barrier solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Target duality measure.
    pub tol_solve: f64,
    /// Budget of Newton steps across all centering rounds.
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { tol_solve: DEFAULT_TOL_SOLVE, max_iterations: 2000 }
    }
}

impl SolverSettings {
    pub(crate) fn barrier(&self) -> BarrierSettings {
        BarrierSettings { tol: self.tol_solve, max_newton: self.max_iterations, t0: 1.0, growth: 10.0 }
    }
}

/// `κ(source, target)` as the largest `f(source) − f(target)` over functions
/// with `|∇f| ≤ 1`.
#[derive(Debug, Clone, Copy)]
pub struct KappaProblem<'a> {
    pub graph: &'a WeightedGraph,
    pub source: usize,
    pub target: usize,
    pub settings: SolverSettings,
}

impl<'a> KappaProblem<'a> {
    pub fn new(graph: &'a WeightedGraph, source: usize, target: usize) -> Self {
        KappaProblem { graph, source, target, settings: SolverSettings::default() }
    }

    pub fn with_settings(mut self, settings: SolverSettings) -> Self {
        self.settings = settings;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaSolution {
    /// Attained `f(source) − f(target)`; a lower bound for `κ` in all cases and
    /// within `tol_solve` of it when the report says converged.
    pub value: f64,
    /// Strictly feasible maximiser, normalised to `f(target) = 0`.
    pub witness: GraphFunction,
    pub report: SolverReport,
}

/// Per-vertex constraints `Σ_z (b(v,z)/m(v)) (f(v) − f(z))² ≤ 1` in the
/// variables left after fixing `f(gauge) = 0`.
pub(crate) fn gradient_constraints(graph: &WeightedGraph, gauge: usize) -> Vec<Constraint> {
    let var = |v: usize| if v < gauge { Some(v) } else if v > gauge { Some(v - 1) } else { None };
    (0..graph.vertex_count())
        .filter(|&v| graph.neighbor_count(v) > 0)
        .map(|v| {
            let terms = graph
                .neighbors(v)
                .iter()
                .map(|&(z, b)| {
                    let mut a = Vec::with_capacity(2);
                    if let Some(i) = var(v) {
                        a.push((i, 1.0));
                    }
                    if let Some(j) = var(z) {
                        a.push((j, -1.0));
                    }
                    (b / graph.measure(v), a)
                })
                .collect();
            Constraint::Quadratic { terms }
        })
        .collect()
}

/// Solves for `κ(x, y)` on a connected graph.
pub fn kappa_pair(problem: &KappaProblem<'_>) -> Result<KappaSolution> {
    let graph = problem.graph;
    let (x, y) = (problem.source, problem.target);
    graph.check_vertex(x)?;
    graph.check_vertex(y)?;
    if x == y {
        return Err(Error::InvalidArgument("κ needs two distinct vertices".into()));
    }
    graph.require_connected()?;

    let n = graph.vertex_count();
    let dim = n - 1;
    let objective_var = if x < y { x } else { x - 1 };
    let mut cost = vec![0.0; dim];
    cost[objective_var] = -1.0;
    let barrier = BarrierProblem { dim, cost, constraints: gradient_constraints(graph, y) };
    let out = barrier.solve(vec![0.0; dim], &problem.settings.barrier())?;

    let mut f = Vec::with_capacity(n);
    f.extend_from_slice(&out.x[..y]);
    f.push(0.0);
    f.extend_from_slice(&out.x[y..]);
    let value = f[x] - f[y];
    let max_violation = out.slacks.iter().fold(0.0f64, |acc, &s| acc.max(-s));
    let report = SolverReport {
        value,
        converged: out.converged && out.stationarity <= problem.settings.tol_solve,
        iterations: out.iterations,
        max_violation,
        stationarity: out.stationarity,
        duality_gap: out.duality_gap,
        constraint_slack: out.slacks,
    };
    Ok(KappaSolution { value, witness: GraphFunction(f), report })
}

/// All pairwise values of `κ` with one solver report per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaTable {
    pub metric: PseudoMetric,
    /// `(x, y, report)` for `x < y`.
    pub reports: Vec<(usize, usize, SolverReport)>,
}

impl KappaTable {
    pub fn all_converged(&self) -> bool {
        self.reports.iter().all(|(_, _, r)| r.converged)
    }
}

/// `κ` on every pair of a connected graph.
pub fn kappa_matrix(graph: &WeightedGraph) -> Result<KappaTable> {
    kappa_matrix_with(graph, SolverSettings::default())
}

pub fn kappa_matrix_with(graph: &WeightedGraph, settings: SolverSettings) -> Result<KappaTable> {
    graph.require_connected()?;
    let n = graph.vertex_count();
    let mut metric = PseudoMetric::zero(n);
    let mut reports = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for x in 0..n {
        for y in x + 1..n {
            let solution = kappa_pair(&KappaProblem { graph, source: x, target: y, settings })?;
            metric.set(x, y, solution.value.max(0.0))?;
            reports.push((x, y, solution.report));
        }
    }
    Ok(KappaTable { metric, reports })
}
