use alloc::string::String;

/// Errors raised by the library.
///
/// Structural problems in raw graph input are collected into a
/// [`ValidationReport`](crate::ValidationReport) instead of being raised here.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("vertex index {index} out of range for {count} vertices")]
    VertexOutOfRange { index: usize, count: usize },
    #[error("shape mismatch: expected {expected} entries, got {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid pseudo metric: {0}")]
    InvalidMetric(String),
    #[error("negative weight {weight} on ({u}, {v})")]
    NegativeWeight { u: usize, v: usize, weight: f64 },
    #[error("no weight given for edge ({u}, {v})")]
    MissingWeight { u: usize, v: usize },
    #[error("infinite metric entry on edge ({u}, {v})")]
    InfiniteOnEdge { u: usize, v: usize },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("floor metric is not intrinsic (max load {max_load})")]
    NotIntrinsic { max_load: f64 },
    #[error("graph is not a star with center {center}")]
    NotAStar { center: usize },
    #[error("problem too large for brute force: {vertices} vertices, limit {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("not weakly spherically symmetric: vertices {first} and {second} on sphere {radius} differ")]
    NotRadial { radius: usize, first: usize, second: usize },
    #[error("horizon too small: {0}")]
    Horizon(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;
