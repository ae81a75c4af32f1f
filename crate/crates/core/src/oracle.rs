//! Brute-force checks for tiny graphs, independent of the barrier solver.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::math::{floor, sqrt, Square};
use crate::metric::{universal_bound_metric, vertex_loads, GraphFunction, PseudoMetric};
use crate::DEFAULT_TAU_TRI;

/// Largest graph accepted by [`kappa_lower_bound_search`].
pub const GRID_SEARCH_LIMIT: usize = 6;
/// Largest graph accepted by [`maximality_check_exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 5;

/// Grid over the free values of `f` once `f(y) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Coordinates range over `[−L, L]`, further clipped to the universal bound.
    pub half_width: f64,
    /// Initial spacing `h`.
    pub resolution: f64,
    /// Number of times `h` is halved around the incumbent.
    pub refinement_rounds: usize,
    /// The local lattice during refinement spans `±local_steps` spacings per coordinate.
    pub local_steps: usize,
    /// Exact line maximisations along quasi-random directions after the lattice stalls.
    pub line_searches: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { half_width: 4.0, resolution: 0.05, refinement_rounds: 12, local_steps: 3, line_searches: 4000 }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.half_width > 0.0 && self.resolution > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument("grid needs L > 0 and h > 0".into()))
        }
    }
}

struct Search<'a> {
    graph: &'a WeightedGraph,
    x: usize,
    y: usize,
    free: Vec<usize>,
}

impl Search<'_> {
    fn load_ok(&self, f: &[f64], v: usize) -> bool {
        let sum: f64 = self.graph.neighbors(v).iter().map(|&(z, b)| b * (f[v] - f[z]).sq()).sum();
        sum <= self.graph.measure(v)
    }

    /// Largest feasible `f(x)` with the free coordinates fixed, if any.
    fn best(&self, point: &[f64]) -> Option<f64> {
        let (g, x) = (self.graph, self.x);
        let mut f = vec![0.0; g.vertex_count()];
        for (&v, &p) in self.free.iter().zip(point) {
            f[v] = p;
        }
        let touches_x = |v: usize| v == x || g.is_edge(v, x);
        if !(0..g.vertex_count()).filter(|&v| !touches_x(v)).all(|v| self.load_ok(&f, v)) {
            return None;
        }
        // at x: a t² − 2 b t + c ≤ m(x)
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for &(z, w) in g.neighbors(x) {
            a += w;
            b += w * f[z];
            c += w * f[z] * f[z];
        }
        let disc = b * b - a * (c - g.measure(x));
        if disc < 0.0 {
            return None;
        }
        let (mut lo, mut hi) = ((b - sqrt(disc)) / a, (b + sqrt(disc)) / a);
        for &(v, w) in g.neighbors(x) {
            let rest: f64 = g.neighbors(v).iter().filter(|&&(z, _)| z != x).map(|&(z, bz)| bz * (f[v] - f[z]).sq()).sum();
            let room = g.measure(v) - rest;
            if room < 0.0 {
                return None;
            }
            let r = sqrt(room / w);
            lo = lo.max(f[v] - r);
            hi = hi.min(f[v] + r);
        }
        if lo > hi {
            return None;
        }
        // back off until the direct check passes
        let mut step = 1e-15 * hi.abs().max(1.0);
        let mut t = hi;
        for _ in 0..80 {
            f[x] = t;
            if (0..g.vertex_count()).filter(|&v| touches_x(v)).all(|v| self.load_ok(&f, v)) {
                return Some(t - f[self.y]);
            }
            t -= step;
            step *= 2.0;
            if t < lo {
                return None;
            }
        }
        None
    }
}

fn scan(search: &Search<'_>, lower: &[f64], upper: &[f64], centre: &[f64], h: f64, steps: Option<usize>) -> Option<(f64, Vec<f64>)> {
    let d = centre.len();
    let axis: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut pts = Vec::new();
            let (from, to) = match steps {
                Some(k) => (centre[i] - k as f64 * h, centre[i] + k as f64 * h),
                None => (lower[i], upper[i]),
            };
            let count = ((to - from) / h + 1e-9) as usize;
            for j in 0..=count {
                let p = from + j as f64 * h;
                if p >= lower[i] - 1e-12 && p <= upper[i] + 1e-12 {
                    pts.push(p.clamp(lower[i], upper[i]));
                }
            }
            pts
        })
        .collect();
    if axis.iter().any(|a| a.is_empty()) {
        return None;
    }
    let mut idx = vec![0usize; d];
    let mut point: Vec<f64> = axis.iter().map(|a| a[0]).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    loop {
        if let Some(v) = search.best(&point) {
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, point.clone()));
            }
        }
        let mut i = 0;
        loop {
            if i == d {
                return best;
            }
            idx[i] += 1;
            if idx[i] < axis[i].len() {
                point[i] = axis[i][idx[i]];
                break;
            }
            idx[i] = 0;
            point[i] = axis[i][0];
            i += 1;
        }
    }
}

/// Grid search for `max f(x) − f(y)` over `|∇f| ≤ 1`; every returned value
/// is attained by a function passing the direct feasibility check, so it is a
/// lower bound for `κ(x, y)`.
pub fn kappa_lower_bound_search(graph: &WeightedGraph, x: usize, y: usize, spec: &GridSpec) -> Result<f64> {
    let n = graph.vertex_count();
    if n > GRID_SEARCH_LIMIT {
        return Err(Error::TooLarge { vertices: n, limit: GRID_SEARCH_LIMIT });
    }
    spec.validate()?;
    graph.check_vertex(x)?;
    graph.check_vertex(y)?;
    if x == y {
        return Err(Error::InvalidArgument("grid search needs two distinct vertices".into()));
    }
    graph.require_connected()?;
    let d_s = universal_bound_metric(graph);
    let free: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
    let upper: Vec<f64> = free.iter().map(|&v| d_s.get(v, y).min(spec.half_width)).collect();
    let lower: Vec<f64> = upper.iter().map(|u| -u).collect();
    let search = Search { graph, x, y, free };

    let origin = vec![0.0; upper.len()];
    let (mut value, mut centre) = scan(&search, &lower, &upper, &origin, spec.resolution, None)
        .or_else(|| search.best(&origin).map(|v| (v, origin.clone())))
        .ok_or(Error::Numerical("no feasible grid point".into()))?;
    let mut h = spec.resolution;
    for _ in 0..spec.refinement_rounds {
        h /= 2.0;
        for _ in 0..200 {
            match scan(&search, &lower, &upper, &centre, h, Some(spec.local_steps)) {
                Some((v, p)) if v > value => {
                    value = v;
                    centre = p;
                }
                _ => break,
            }
        }
    }
    polish(&search, &mut value, &mut centre, spec.line_searches);
    Ok(value)
}

/// Weyl sequence direction `k`: coordinate `i` is `frac(k·√pᵢ) − ½`.
fn direction(k: usize, d: usize) -> Vec<f64> {
    const ROOTS: [f64; 6] = [1.4142135623730951, 1.7320508075688772, 2.23606797749979, 2.6457513110645907, 3.3166247903554, 3.605551275463989];
    let v: Vec<f64> = (0..d)
        .map(|i| {
            let t = k as f64 * ROOTS[i % ROOTS.len()];
            t - floor(t) - 0.5
        })
        .collect();
    let norm = sqrt(v.iter().map(|c| c.sq()).sum());
    v.iter().map(|c| c / norm).collect()
}

/// Maximises the concave restriction of the search value to lines through the
/// incumbent. Every accepted point passed the direct feasibility check.
fn polish(search: &Search<'_>, value: &mut f64, centre: &mut Vec<f64>, rounds: usize) {
    let d = centre.len();
    if d == 0 {
        return;
    }
    let at = |c: &[f64], dir: &[f64], s: f64| -> Vec<f64> { c.iter().zip(dir).map(|(p, q)| p + s * q).collect() };
    for k in 1..=rounds {
        let dir = direction(k, d);
        let eval = |s: f64| search.best(&at(centre, &dir, s));
        // feasible interval around s = 0 by bisection on each side
        let mut ends = [0.0f64; 2];
        for (side, sign) in [(0, -1.0), (1, 1.0)] {
            let (mut inside, mut outside) = (0.0, sign * 1.0);
            while eval(outside).is_some() && outside.abs() < 64.0 {
                inside = outside;
                outside *= 2.0;
            }
            for _ in 0..50 {
                let mid = 0.5 * (inside + outside);
                if eval(mid).is_some() {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            ends[side] = inside;
        }
        let (mut a, mut b) = (ends[0], ends[1]);
        let g = 0.5 * (sqrt(5.0) - 1.0);
        let score = |s: f64| eval(s).unwrap_or(f64::NEG_INFINITY);
        let (mut c1, mut c2) = (b - g * (b - a), a + g * (b - a));
        let (mut f1, mut f2) = (score(c1), score(c2));
        for _ in 0..80 {
            if f1 >= f2 {
                b = c2;
                c2 = c1;
                f2 = f1;
                c1 = b - g * (b - a);
                f1 = score(c1);
            } else {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + g * (b - a);
                f2 = score(c2);
            }
        }
        let s = if f1 >= f2 { c1 } else { c2 };
        if let Some(v) = eval(s) {
            if v > *value {
                *value = v;
                *centre = at(centre, &dir, s);
            }
        }
    }
}

/// Whether no simultaneous increase by `delta` of a set of entries containing
/// a given pair keeps `ϱ` an intrinsic pseudo metric. Every pair and every
/// such set is tried.
pub fn maximality_check_exhaustive(graph: &WeightedGraph, rho: &PseudoMetric, delta: f64) -> Result<bool> {
    let n = graph.vertex_count();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge { vertices: n, limit: EXHAUSTIVE_LIMIT });
    }
    if rho.vertex_count() != n {
        return Err(Error::ShapeMismatch { expected: n, found: rho.vertex_count() });
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
    let p = pairs.len();
    for mask in 1u32..(1u32 << p) {
        let mut candidate = rho.clone();
        for (i, &(x, y)) in pairs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                candidate.set(x, y, rho.get(x, y) + delta)?;
            }
        }
        let (violation, _) = candidate.max_triangle_violation();
        if violation <= DEFAULT_TAU_TRI && vertex_loads(graph, &candidate)?.is_intrinsic() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_segment(length: usize, given: usize) -> Result<()> {
    if length < 3 {
        return Err(Error::InvalidArgument("a segment needs an interior vertex".into()));
    }
    if given != length {
        return Err(Error::ShapeMismatch { expected: length, found: given });
    }
    Ok(())
}

/// `(f(k+1) − f(k))² + (f(k−1) − f(k))² = 1` at every interior vertex of a
/// unit path, up to `tol`.
pub fn z_segment_maximal_family(length: usize, f: &GraphFunction, tol: f64) -> Result<bool> {
    check_segment(length, f.len())?;
    let v = f.values();
    Ok((1..length - 1).all(|k| ((v[k + 1] - v[k]).sq() + (v[k - 1] - v[k]).sq() - 1.0).abs() <= tol))
}

/// The same identity in exact rational arithmetic.
pub fn z_segment_maximal_family_exact(length: usize, f: &[BigRational]) -> Result<bool> {
    check_segment(length, f.len())?;
    let sq = |a: &BigRational, b: &BigRational| {
        let d = a - b;
        &d * &d
    };
    Ok((1..length - 1).all(|k| sq(&f[k + 1], &f[k]) + sq(&f[k - 1], &f[k]) == BigRational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{kappa_matrix, kappa_pair, KappaProblem};
    use crate::graph::{complete_graph, make_star, path_graph};
    use num_bigint::BigInt;

    #[test]
    fn two_vertex_graph() {
        let g = WeightedGraph::new(vec![1.0, 1.0], [(0, 1, 1.0)]).unwrap();
        let v = kappa_lower_bound_search(&g, 0, 1, &GridSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-3 && v <= 1.0);
    }

    #[test]
    fn unit_triangle() {
        let g = complete_graph(vec![1.0; 3]).unwrap();
        let v = kappa_lower_bound_search(&g, 0, 1, &GridSpec::default()).unwrap();
        assert!((v - 2.0 / 5f64.sqrt()).abs() < 1e-3, "{v}");
    }

    #[test]
    fn measure_scaling_doubles() {
        let g = path_graph(vec![1.0, 2.0, 1.0]).unwrap();
        let spec = GridSpec { half_width: 10.0, ..GridSpec::default() };
        let a = kappa_lower_bound_search(&g, 0, 2, &spec).unwrap();
        let b = kappa_lower_bound_search(&g.scale_measure(4.0).unwrap(), 0, 2, &spec).unwrap();
        assert!((b - 2.0 * a).abs() < 2e-3);
    }

    #[test]
    fn agrees_with_solver_on_small_path() {
        let g = path_graph(vec![1.0, 0.5, 2.0, 1.0]).unwrap();
        let oracle = kappa_lower_bound_search(&g, 0, 3, &GridSpec::default()).unwrap();
        let solver = kappa_pair(&KappaProblem::new(&g, 0, 3)).unwrap().value;
        assert!(oracle <= solver + 1e-8);
        assert!(solver - oracle < 1e-3, "{oracle} vs {solver}");
    }

    #[test]
    fn too_large() {
        let g = path_graph(vec![1.0; 7]).unwrap();
        assert!(matches!(kappa_lower_bound_search(&g, 0, 1, &GridSpec::default()), Err(Error::TooLarge { .. })));
        assert!(maximality_check_exhaustive(&path_graph(vec![1.0; 6]).unwrap(), &PseudoMetric::zero(6), 1e-4).is_err());
    }

    #[test]
    fn exhaustive_maximality() {
        let star = make_star(&[1.0, 1.0], 2.0, &[1.0, 1.0]).unwrap();
        let kappa = kappa_matrix(&star).unwrap().metric;
        assert!(maximality_check_exhaustive(&star, &kappa, 1e-4).unwrap());
        let p = path_graph(vec![1.0; 3]).unwrap();
        assert!(!maximality_check_exhaustive(&p, &PseudoMetric::zero(3), 1e-4).unwrap());
    }

    #[test]
    fn z_segment_float() {
        let s = 0.5f64.sqrt();
        let line = GraphFunction((0..6).map(|k| k as f64 * s).collect());
        assert!(z_segment_maximal_family(6, &line, 1e-12).unwrap());
        let steep = GraphFunction((0..6).map(|k| k as f64).collect());
        assert!(!z_segment_maximal_family(6, &steep, 1e-12).unwrap());
        let zigzag = GraphFunction(vec![0.0, s, 0.0, s]);
        assert!(z_segment_maximal_family(4, &zigzag, 1e-12).unwrap());
        assert!(z_segment_maximal_family(2, &GraphFunction(vec![0.0, 1.0]), 1e-12).is_err());
        assert!(z_segment_maximal_family(5, &line, 1e-12).is_err());
    }

    #[test]
    fn z_segment_exact() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        // increments 3/5 and 4/5 alternate: 9/25 + 16/25 = 1
        let f = [r(0, 1), r(3, 5), r(7, 5), r(2, 1), r(14, 5)];
        assert!(z_segment_maximal_family_exact(5, &f).unwrap());
        let g = [r(0, 1), r(1, 1), r(2, 1)];
        assert!(!z_segment_maximal_family_exact(3, &g).unwrap());
        let zigzag = [r(0, 1), r(3, 5), r(-1, 5), r(2, 5)];
        assert!(z_segment_maximal_family_exact(4, &zigzag).unwrap());
    }
}
