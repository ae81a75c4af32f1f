//! Intrinsic pseudo metrics on finite weighted graphs.
//!
//! A weighted graph is a symmetric edge weight `b` together with a strictly
//! positive vertex measure `m`. A pseudo metric `σ` is *intrinsic* when every
//! vertex satisfies
//!
//! ```text
//! (1/m(x)) Σ_y b(x,y) σ(x,y)² ≤ 1.
//! ```
//!
//! The crate covers the whole toolbox around that inequality:
//!
//! - [`graph`]: weighted graphs, validation, connectivity and example families.
//! - [`metric`]: pseudo metric tables, vertex loads, gradients, path metrics and
//!   the universal dominating metric `d_s`.
//! - [`convex`]: the canonical metric `κ` through a log-barrier solver, maximal
//!   intrinsic metrics, and the perturbation construction that shows `κ` fails
//!   to be intrinsic off star graphs.
//! - [`star`]: star and galaxy classification and the largest-metric decision.
//! - [`radial`]: weakly spherically symmetric graphs, the series criteria,
//!   cut-off functions and tree/antitree generators.
//! - [`oracle`]: brute-force checks used to cross-validate the solver.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod convex;
mod error;
pub mod graph;
mod math;
pub mod metric;
pub mod oracle;
pub mod radial;
pub mod star;

pub use error::{Error, Result};
pub use graph::{ComponentStructure, GraphView, RawGraph, ValidationIssue, ValidationReport, WeightedGraph};
pub use metric::{EdgeWeighting, GraphFunction, PseudoMetric, VertexLoadProfile};

/// Default feasibility slack for the intrinsic inequality.
pub const DEFAULT_EPS_FEAS: f64 = 1e-9;
/// Default slack for triangle inequality checks.
pub const DEFAULT_TAU_TRI: f64 = 1e-9;
/// Default barrier solver tolerance (duality gap).
pub const DEFAULT_TOL_SOLVE: f64 = 1e-8;
/// Default relative tolerance for sphere constancy in radial detection.
pub const DEFAULT_TAU_RAD: f64 = 1e-12;
