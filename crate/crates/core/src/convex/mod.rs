//! Convex programs around the canonical metric.
//!
//! `κ(x, y)` is the largest value of `f(x) − f(y)` over functions with
//! `|∇f| ≤ 1`; it is computed in that function form, which needs `n − 1`
//! variables and one convex quadratic constraint per vertex. Maximal
//! intrinsic metrics are computed over the metric table itself, since
//! maximality refers to the pointwise order on metrics.

mod barrier;
mod kappa;
mod maximal;
mod perturbation;

use alloc::vec::Vec;

pub use kappa::{kappa_matrix, kappa_matrix_with, kappa_pair, KappaProblem, KappaSolution, KappaTable, SolverSettings};
pub use maximal::{
    maximal_metric, maximality_certificate, MaximalMetricProblem, MaximalSolution, PairCertificate, PairStatus,
    DEFAULT_DELTA_CERT,
};
pub use perturbation::{perturbation_witness, PerturbationWitness};

/// Outcome of one barrier solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    /// Objective value at the returned iterate.
    pub value: f64,
    pub converged: bool,
    /// Newton steps taken.
    pub iterations: usize,
    /// Largest constraint violation at the returned iterate, `0` when strictly feasible.
    pub max_violation: f64,
    /// KKT residual `‖c + Σ λᵢ∇gᵢ‖_∞` with the barrier duals.
    pub stationarity: f64,
    /// Final duality measure `#constraints / t`.
    pub duality_gap: f64,
    /// Slack of every constraint at the returned iterate.
    pub constraint_slack: Vec<f64>,
}
