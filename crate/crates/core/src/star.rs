//! Star graphs and galaxies.
//!
//! A connected graph is a star with center `p` if every other vertex has
//! exactly one neighbour. The canonical metric `κ` is intrinsic exactly on
//! stars whose center carries at least the mass of all leaves,
//! `Σ_{x≠p} m(x) ≤ m(p)`; on disconnected graphs the same test is applied to
//! every component.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::math::sqrt;
use crate::metric::PseudoMetric;

/// Star structure of one connected vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentStar {
    pub vertices: Vec<usize>,
    pub is_star: bool,
    pub centers: Vec<usize>,
    /// Measure condition for each entry of `centers`.
    pub condition: Vec<bool>,
}

impl ComponentStar {
    pub fn compliant_center(&self) -> Option<usize> {
        self.centers.iter().zip(&self.condition).find(|(_, &ok)| ok).map(|(&c, _)| c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarClassification {
    /// Connected and a star.
    pub is_star: bool,
    /// Centers of the whole graph when it is a star, otherwise empty.
    pub centers: Vec<usize>,
    /// Measure condition per entry of `centers`.
    pub measure_condition: Vec<bool>,
    /// Every component is a star.
    pub is_galaxy: bool,
    pub components: Vec<ComponentStar>,
}

/// `Σ_{x≠p} m(x) ≤ m(p)` decided on the exact binary values of the floats.
fn measure_condition(graph: &WeightedGraph, vertices: &[usize], center: usize) -> bool {
    let exact = |v: f64| BigRational::from_float(v).expect("measures are finite");
    let leaves = vertices
        .iter()
        .filter(|&&v| v != center)
        .fold(BigRational::zero(), |acc, &v| acc + exact(graph.measure(v)));
    leaves <= exact(graph.measure(center))
}

fn classify_component(graph: &WeightedGraph, vertices: Vec<usize>) -> ComponentStar {
    let centers: Vec<usize> = match vertices.len() {
        1 | 2 => vertices.clone(),
        _ => {
            let hubs: Vec<usize> = vertices.iter().copied().filter(|&v| graph.neighbor_count(v) != 1).collect();
            match hubs.as_slice() {
                [p] if graph.neighbor_count(*p) == vertices.len() - 1 => vec![*p],
                _ => Vec::new(),
            }
        }
    };
    let condition = centers.iter().map(|&p| measure_condition(graph, &vertices, p)).collect();
    ComponentStar { is_star: !centers.is_empty(), vertices, centers, condition }
}

pub fn classify_star(graph: &WeightedGraph) -> StarClassification {
    let structure = graph.components();
    let components: Vec<ComponentStar> =
        (0..structure.count).map(|id| classify_component(graph, structure.members(id))).collect();
    let is_galaxy = components.iter().all(|c| c.is_star);
    let (is_star, centers, measure_condition) = match components.as_slice() {
        [only] if only.is_star => (true, only.centers.clone(), only.condition.clone()),
        _ => (false, Vec::new(), Vec::new()),
    };
    StarClassification { is_star, centers, measure_condition, is_galaxy, components }
}

/// Closed-form `κ` on a star.
#[derive(Debug, Clone, PartialEq)]
pub struct StarKappa {
    pub center: usize,
    pub metric: PseudoMetric,
    /// Leaf pairs `(x, y)`, `x < y`. Their values come from solving the
    /// two-leaf program by hand rather than from the leaf–center formula.
    pub derived_pairs: Vec<(usize, usize)>,
}

/// Largest `f(x₁) − f(x₂)` for two leaves with `|∇f| ≤ 1`.
///
/// With `f(p) = 0`, the other leaves at `0`, `A = b₁f(x₁)²` and
/// `C = b₂f(x₂)²` this maximises `√(A/b₁) + √(C/b₂)` subject to `A ≤ m₁`,
/// `C ≤ m₂` and `A + C ≤ m_p`. The objective is concave; the free optimum on
/// `A + C = m_p` is `A = m_p b₂/(b₁+b₂)`, clamped to the box.
pub fn leaf_pair_value(m1: f64, b1: f64, m2: f64, b2: f64, mp: f64) -> f64 {
    if m1 + m2 <= mp {
        return sqrt(m1 / b1) + sqrt(m2 / b2);
    }
    let lo = (mp - m2).max(0.0);
    let hi = m1.min(mp);
    let a = (mp * b2 / (b1 + b2)).clamp(lo, hi);
    let c = (mp - a).max(0.0).min(m2);
    sqrt(a / b1) + sqrt(c / b2)
}

pub fn star_kappa_closed_form(graph: &WeightedGraph, center: usize) -> Result<StarKappa> {
    graph.check_vertex(center)?;
    let class = classify_star(graph);
    if !class.is_star || !class.centers.contains(&center) {
        return Err(Error::NotAStar { center });
    }
    let n = graph.vertex_count();
    let mp = graph.measure(center);
    let leg = |x: usize| {
        let b = graph.weight(x, center);
        sqrt(graph.measure(x).min(mp) / b)
    };
    let mut derived_pairs = Vec::new();
    let metric = PseudoMetric::from_fn(n, |x, y| {
        if x == center {
            leg(y)
        } else if y == center {
            leg(x)
        } else {
            derived_pairs.push((x, y));
            leaf_pair_value(graph.measure(x), graph.weight(x, center), graph.measure(y), graph.weight(y, center), mp)
        }
    })?;
    Ok(StarKappa { center, metric, derived_pairs })
}

/// Why [`largest_metric_decision`] answered as it did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecisionReason {
    /// Star whose center satisfies the measure condition.
    CompliantStar { center: usize },
    NotAStar,
    MeasureConditionFails { centers: Vec<usize> },
    /// Disconnected: every component is a compliant star.
    CompliantGalaxy,
    /// Disconnected: the listed component is not a star.
    ComponentNotAStar { component: usize },
    /// Disconnected: the listed component fails the measure condition.
    ComponentConditionFails { component: usize },
}

impl core::fmt::Display for DecisionReason {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DecisionReason::CompliantStar { center } => write!(f, "star with center {center} satisfying the measure condition"),
            DecisionReason::NotAStar => f.write_str("not a star"),
            DecisionReason::MeasureConditionFails { .. } => f.write_str("star, but the leaves outweigh every center"),
            DecisionReason::CompliantGalaxy => f.write_str("galaxy whose stars all satisfy the measure condition"),
            DecisionReason::ComponentNotAStar { component } => write!(f, "component {component} is not a star"),
            DecisionReason::ComponentConditionFails { component } => {
                write!(f, "component {component} fails the measure condition")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    /// Whether `κ` is intrinsic.
    pub verdict: bool,
    pub reason: DecisionReason,
    pub classification: StarClassification,
}

/// Decides whether the canonical metric is intrinsic from the star structure alone.
pub fn largest_metric_decision(graph: &WeightedGraph) -> Decision {
    let classification = classify_star(graph);
    let (verdict, reason) = if classification.components.len() == 1 {
        let only = &classification.components[0];
        if !only.is_star {
            (false, DecisionReason::NotAStar)
        } else if let Some(center) = only.compliant_center() {
            (true, DecisionReason::CompliantStar { center })
        } else {
            (false, DecisionReason::MeasureConditionFails { centers: only.centers.clone() })
        }
    } else if let Some(i) = classification.components.iter().position(|c| !c.is_star) {
        (false, DecisionReason::ComponentNotAStar { component: i })
    } else if let Some(i) = classification.components.iter().position(|c| c.compliant_center().is_none()) {
        (false, DecisionReason::ComponentConditionFails { component: i })
    } else {
        (true, DecisionReason::CompliantGalaxy)
    };
    Decision { verdict, reason, classification }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, make_star, path_graph};

    #[test]
    fn classification_examples() {
        let two = make_star(&[1.0, 1.0], 2.0, &[1.0, 1.0]).unwrap();
        let c = classify_star(&two);
        assert!(c.is_star && c.centers == vec![0] && c.measure_condition == vec![true]);

        let three = make_star(&[1.0, 1.0, 1.0], 2.0, &[1.0, 1.0, 1.0]).unwrap();
        let c = classify_star(&three);
        assert!(c.is_star && c.measure_condition == vec![false]);

        let p4 = path_graph(vec![1.0; 4]).unwrap();
        let c = classify_star(&p4);
        assert!(!c.is_star && !c.is_galaxy);
    }

    #[test]
    fn small_degenerate_stars() {
        let edge = WeightedGraph::new(vec![1.0, 3.0], [(0, 1, 1.0)]).unwrap();
        let c = classify_star(&edge);
        assert_eq!(c.centers, vec![0, 1]);
        assert_eq!(c.measure_condition, vec![false, true]);
        assert!(largest_metric_decision(&edge).verdict);

        let single = WeightedGraph::new(vec![1.0], []).unwrap();
        let c = classify_star(&single);
        assert!(c.is_star && c.centers == vec![0]);
        let k = star_kappa_closed_form(&single, 0).unwrap();
        assert_eq!(k.metric.get(0, 0), 0.0);
    }

    #[test]
    fn exact_boundary_case() {
        // 0.1 + 0.2 > 0.3 in floats but the exact sum of the stored values decides
        let g = make_star(&[0.1, 0.2], 0.3, &[1.0, 1.0]).unwrap();
        let exact = BigRational::from_float(0.1).unwrap() + BigRational::from_float(0.2).unwrap();
        let expected = exact <= BigRational::from_float(0.3).unwrap();
        assert_eq!(classify_star(&g).measure_condition, vec![expected]);
        let g = make_star(&[0.25, 0.5], 0.75, &[1.0, 1.0]).unwrap();
        assert_eq!(classify_star(&g).measure_condition, vec![true]);
    }

    #[test]
    fn closed_form_values() {
        let g = make_star(&[1.0], 9.0, &[4.0]).unwrap();
        let k = star_kappa_closed_form(&g, 0).unwrap();
        assert_eq!(k.metric.get(0, 1), 0.5);

        let g = make_star(&[1.0, 1.0], 2.0, &[1.0, 1.0]).unwrap();
        let k = star_kappa_closed_form(&g, 0).unwrap();
        assert_eq!(k.metric.get(1, 2), 2.0);
        assert_eq!(k.derived_pairs, vec![(1, 2)]);
        assert!(star_kappa_closed_form(&g, 1).is_err());
    }

    #[test]
    fn leaf_pair_with_scarce_center() {
        // m_p = 1 shared by two identical leaves: A = C = 1/2
        let v = leaf_pair_value(1.0, 1.0, 1.0, 1.0, 1.0);
        assert!((v - 2.0 * 0.5f64.sqrt()).abs() < 1e-15);
        // one leaf capped by its own measure
        let v = leaf_pair_value(0.1, 1.0, 5.0, 1.0, 1.0);
        assert!((v - (0.1f64.sqrt() + 0.9f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn decisions() {
        let d = largest_metric_decision(&complete_graph(vec![1.0; 3]).unwrap());
        assert!(!d.verdict);
        assert_eq!(d.reason, DecisionReason::NotAStar);
        assert_eq!(alloc::format!("{}", d.reason), "not a star");

        let galaxy = WeightedGraph::new(vec![2.0, 1.0, 1.0, 1.0, 1.0], [(0, 1, 1.0), (0, 2, 1.0), (3, 4, 1.0)]).unwrap();
        let d = largest_metric_decision(&galaxy);
        assert!(d.verdict && d.reason == DecisionReason::CompliantGalaxy);
        assert!(d.classification.is_galaxy && !d.classification.is_star);

        let bad = WeightedGraph::new(vec![1.0, 1.0, 1.0, 1.0, 1.0], [(0, 1, 1.0), (0, 2, 1.0), (3, 4, 1.0)]).unwrap();
        assert_eq!(largest_metric_decision(&bad).reason, DecisionReason::ComponentConditionFails { component: 0 });
    }
}
