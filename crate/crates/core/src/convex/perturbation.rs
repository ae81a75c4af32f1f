use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::{path_metric, EdgeWeighting, PseudoMetric};
use crate::DEFAULT_EPS_FEAS;

/// The edge perturbation `w = κ + ε·1_C − (s/3)·1_D` around an edge `x ∼ y`
/// whose endpoints both have at least two neighbours, with
/// `C = {x,y}×{x,y}` and `D` the pairs with exactly one endpoint in `{x,y}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationWitness {
    pub x: usize,
    pub y: usize,
    /// Smallest input value on edges at `x` or `y`.
    pub s: f64,
    pub epsilon: f64,
    /// Whether `epsilon` satisfies both load inequalities at `x` and `y`.
    /// When it does and the input is intrinsic, `d_w` is intrinsic and
    /// `d_w(x,y) ≥ κ(x,y) + ε`.
    pub displays_hold: bool,
    pub weighting: EdgeWeighting,
    pub metric: PseudoMetric,
}

/// Load at `u` of the perturbed weights, where `partner` is the other vertex of the pair.
fn perturbed_load(graph: &WeightedGraph, kappa: &PseudoMetric, u: usize, partner: usize, s: f64, eps: f64) -> f64 {
    let sum: f64 = graph
        .neighbors(u)
        .iter()
        .map(|&(z, b)| {
            let w = if z == partner { kappa.get(u, z) + eps } else { kappa.get(u, z) - s / 3.0 };
            b * w * w
        })
        .sum();
    sum / graph.measure(u)
}

/// Builds the perturbation for a connected graph that is not a star, or
/// returns `None` on star graphs.
///
/// `x` is the lowest vertex with `N(x) ≥ 2` adjacent to another such vertex;
/// `y` minimises `κ(x,·)` over those neighbours, ties to the lowest index.
/// `ε` is the largest of `s/6, s/12, …` passing both load inequalities; if
/// none does, `ε = s/6` is used and `displays_hold` is `false`.
pub fn perturbation_witness(graph: &WeightedGraph, kappa: &PseudoMetric) -> Result<Option<PerturbationWitness>> {
    graph.require_connected()?;
    let n = graph.vertex_count();
    if kappa.vertex_count() != n {
        return Err(Error::ShapeMismatch { expected: n, found: kappa.vertex_count() });
    }
    let branching = |v: usize| graph.neighbor_count(v) >= 2;
    let Some(x) = (0..n).find(|&v| branching(v) && graph.neighbors(v).iter().any(|&(z, _)| branching(z))) else {
        return Ok(None);
    };
    let y = graph
        .neighbors(x)
        .iter()
        .map(|&(z, _)| z)
        .filter(|&z| branching(z))
        .min_by(|&a, &b| kappa.get(x, a).total_cmp(&kappa.get(x, b)).then(a.cmp(&b)))
        .expect("x has a branching neighbour");

    let s = graph
        .neighbors(x)
        .iter()
        .map(|&(z, _)| kappa.get(x, z))
        .chain(graph.neighbors(y).iter().map(|&(z, _)| kappa.get(y, z)))
        .fold(f64::INFINITY, f64::min);
    if !(s > 0.0) {
        return Err(Error::InvalidMetric("input vanishes on an edge at the chosen pair".into()));
    }

    let mut epsilon = s / 6.0;
    let mut displays_hold = false;
    for _ in 0..60 {
        let lx = perturbed_load(graph, kappa, x, y, s, epsilon);
        let ly = perturbed_load(graph, kappa, y, x, s, epsilon);
        if lx <= 1.0 + DEFAULT_EPS_FEAS && ly <= 1.0 + DEFAULT_EPS_FEAS {
            displays_hold = true;
            break;
        }
        epsilon /= 2.0;
    }
    if !displays_hold {
        epsilon = s / 6.0;
    }

    let in_pair = |v: usize| v == x || v == y;
    let weighting = EdgeWeighting::from_edges(graph, |u, v| {
        let k = kappa.get(u, v);
        match (in_pair(u), in_pair(v)) {
            (true, true) => k + epsilon,
            (false, false) => k,
            _ => k - s / 3.0,
        }
    })?;
    let metric = path_metric(graph, &weighting)?;
    Ok(Some(PerturbationWitness { x, y, s, epsilon, displays_hold, weighting, metric }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::convex::kappa_matrix;
    use crate::graph::{complete_graph, make_star};
    use crate::metric::vertex_loads;

    #[test]
    fn none_on_stars() {
        let g = make_star(&[1.0, 1.0, 1.0], 3.0, &[1.0, 1.0, 1.0]).unwrap();
        let kappa = kappa_matrix(&g).unwrap().metric;
        assert!(perturbation_witness(&g, &kappa).unwrap().is_none());
    }

    #[test]
    fn triangle_with_true_kappa_fails_the_displays() {
        let g = complete_graph(vec![1.0; 3]).unwrap();
        let kappa = kappa_matrix(&g).unwrap().metric;
        let w = perturbation_witness(&g, &kappa).unwrap().unwrap();
        assert_eq!((w.x, w.y), (0, 1));
        assert!(!w.displays_hold);
        assert!(!vertex_loads(&g, &w.metric).unwrap().is_intrinsic());
    }

    #[test]
    fn triangle_with_intrinsic_input() {
        let g = complete_graph(vec![1.0; 3]).unwrap();
        let kappa = kappa_matrix(&g).unwrap().metric;
        let scale = vertex_loads(&g, &kappa).unwrap().max_load().sqrt();
        let rho = kappa.scaled(1.0 / scale);
        let w = perturbation_witness(&g, &rho).unwrap().unwrap();
        assert!(w.displays_hold);
        assert!(vertex_loads(&g, &w.metric).unwrap().is_intrinsic());
        assert!(w.metric.get(w.x, w.y) >= rho.get(w.x, w.y) + w.epsilon - 1e-12);
    }
}
