//! Radial cut-off functions, the metric they induce, and radialisation of
//! arbitrary functions along a ray.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{radial_gradient, radii_from_root, RadialFunction, RadialProfile};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::math::{sqrt, Square};
use crate::metric::{gradient_norm_squared, GraphFunction, PseudoMetric};

#[derive(Debug, Clone, PartialEq)]
pub struct Cutoff {
    pub n: usize,
    pub function: RadialFunction,
    /// First radius where the function is exactly `0`; `None` if the
    /// support does not close within the horizon.
    pub closes_at: Option<usize>,
    /// `max_r |∇χ_n|²(r)`, the horizon sphere included with its inward term only.
    pub max_gradient_sq: f64,
}

impl Cutoff {
    pub fn is_truncated(&self) -> bool {
        self.closes_at.is_none()
    }
}

/// `χ_n(r) = (1 − Σ_{k=n}^{r−1} √(m(S_k) ∧ m(S_{k+1}))/√|∂B_k|)₊`.
pub fn build_cutoffs(profile: &RadialProfile, n: usize) -> Result<Cutoff> {
    let horizon = profile.horizon();
    let mut values = Vec::with_capacity(horizon + 1);
    let mut sum = 0.0;
    let mut closes_at = None;
    values.push(1.0);
    for r in 1..=horizon {
        let k = r - 1;
        if k >= n {
            sum += profile.term_iii(k);
        }
        let v = (1.0 - sum).max(0.0);
        if v == 0.0 && closes_at.is_none() {
            closes_at = Some(r);
        }
        values.push(v);
    }
    let function = RadialFunction(values);
    let max_gradient_sq = radial_gradient(profile, &function)?.values().iter().copied().fold(0.0, f64::max);
    Ok(Cutoff { n, function, closes_at, max_gradient_sq })
}

/// Averages of cut-offs with disjoint transition bands.
///
/// Cut-offs are taken along the chain `k₀ = start`, `k_{j+1} = close(k_j) + 1`.
/// Block `i` averages the next `J_i` of them with `J_i² ≥ 2^{i+2}`, so that
/// `‖|∇φ_i|‖²_∞ ≤ 2/J_i² ≤ 2^{−(i+1)}` and the squared gradient norms sum
/// to at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffChain {
    /// Starting radius of every cut-off used, in chain order.
    pub chain: Vec<usize>,
    /// Indices into `chain` for each block.
    pub blocks: Vec<Vec<usize>>,
    pub functions: Vec<RadialFunction>,
    /// A further block was started but could not be completed within the horizon
    /// and was dropped.
    pub truncated: bool,
}

fn block_size(i: usize) -> usize {
    let target = 1u128 << (i + 2).min(120);
    let mut j: u128 = 1;
    while j * j < target {
        j += 1;
    }
    j as usize
}

pub fn normalized_cutoffs(profile: &RadialProfile, start: usize) -> Result<CutoffChain> {
    let horizon = profile.horizon();
    let mut chain = Vec::new();
    let mut cutoffs = Vec::new();
    let mut blocks = Vec::new();
    let mut functions = Vec::new();
    let mut k = start;
    let truncated;
    'blocks: loop {
        let size = block_size(blocks.len());
        let mut block = Vec::with_capacity(size);
        while block.len() < size {
            if k > horizon {
                truncated = !block.is_empty();
                break 'blocks;
            }
            let c = build_cutoffs(profile, k)?;
            let Some(close) = c.closes_at else {
                truncated = true;
                break 'blocks;
            };
            block.push(chain.len());
            chain.push(k);
            cutoffs.push(c.function);
            k = close + 1;
        }
        let mut avg = vec![0.0; horizon + 1];
        for &j in &block {
            for (a, v) in avg.iter_mut().zip(cutoffs[j].values()) {
                *a += v;
            }
        }
        avg.iter_mut().for_each(|a| *a /= size as f64);
        functions.push(RadialFunction(avg));
        blocks.push(block);
    }
    if blocks.is_empty() {
        return Err(Error::Horizon(format!(
            "no block of {} closing cut-offs fits below radius {horizon}",
            block_size(0)
        )));
    }
    Ok(CutoffChain { chain, blocks, functions, truncated })
}

/// `σ(r, s) = (Σ_n (φ_n(r) − φ_n(s))²)^{1/2}` on radii.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMetric {
    pub functions: Vec<RadialFunction>,
    /// `Σ_n ‖|∇φ_n|‖²_∞` over the horizon.
    pub gradient_budget: f64,
}

impl RadialMetric {
    pub fn horizon(&self) -> usize {
        self.functions.first().map_or(0, |f| f.len() - 1)
    }

    pub fn distance(&self, r: usize, s: usize) -> f64 {
        sqrt(self.functions.iter().map(|f| (f.values()[r] - f.values()[s]).sq()).sum())
    }

    /// `σ(o, r)` for `r = 0..=R`.
    pub fn from_root(&self) -> Vec<f64> {
        (0..=self.horizon()).map(|r| self.distance(0, r)).collect()
    }

    /// Smallest radius at which `σ(o, ·)` exceeds `rho`; the `σ`-ball of
    /// radius `rho` then lies inside the combinatorial ball of the previous radius.
    pub fn ball_closes_at(&self, rho: f64) -> Option<usize> {
        (0..=self.horizon()).find(|&r| self.distance(0, r) > rho)
    }

    /// The metric on a concrete graph whose vertex radii are given.
    pub fn lift(&self, radii: &[usize]) -> Result<PseudoMetric> {
        if let Some(&r) = radii.iter().find(|&&r| r > self.horizon()) {
            return Err(Error::ShapeMismatch { expected: self.horizon() + 1, found: r + 1 });
        }
        PseudoMetric::from_fn(radii.len(), |x, y| self.distance(radii[x], radii[y]))
    }
}

/// Builds `σ` from radial functions whose squared gradient norms sum to at
/// most `1 + eps_feas`.
pub fn finite_ball_metric(profile: &RadialProfile, functions: Vec<RadialFunction>, eps_feas: f64) -> Result<RadialMetric> {
    if functions.is_empty() {
        return Err(Error::InvalidArgument("no functions given".into()));
    }
    let mut budget = 0.0;
    for f in &functions {
        budget += radial_gradient(profile, f)?.values().iter().copied().fold(0.0, f64::max);
    }
    if budget > 1.0 + eps_feas {
        return Err(Error::InvalidArgument(format!("squared gradient norms sum to {budget} > 1")));
    }
    Ok(RadialMetric { functions, gradient_budget: budget })
}

/// A function made radial along a ray `x_0 = o, x_1, …` that follows the
/// smallest increments of `χ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Radialized {
    pub function: RadialFunction,
    pub ray: Vec<usize>,
    /// `C² = max_x |∇χ|²(x)`.
    pub c_squared: f64,
    /// `max_r κ₊(r)(φ(r) − φ(r+1))²`; at most `C²`.
    pub forward_max: f64,
    /// `max_r |∇φ|²(r) / (1 + m(S_{r−1})/m(S_r))`; at most `C²`.
    pub weak_max: f64,
}

impl Radialized {
    pub fn forward_bound_holds(&self, tol: f64) -> bool {
        self.forward_max <= self.c_squared * (1.0 + tol) + tol
    }

    pub fn weak_bound_holds(&self, tol: f64) -> bool {
        self.weak_max <= self.c_squared * (1.0 + tol) + tol
    }
}

/// Follows `x_r ∈ S_r`, `x_r ∼ x_{r−1}`, minimising `|χ(x_r) − χ(x_{r−1})|`
/// (lowest index on ties), and sets `φ(r) = χ(x_r)`.
pub fn radialize(graph: &WeightedGraph, profile: &RadialProfile, chi: &GraphFunction) -> Result<Radialized> {
    let n = graph.vertex_count();
    if chi.len() != n {
        return Err(Error::ShapeMismatch { expected: n, found: chi.len() });
    }
    let radii = radii_from_root(graph, profile.root)?;
    let horizon = profile.horizon();
    if radii.iter().any(|&r| r == usize::MAX || r > horizon) {
        return Err(Error::InvalidArgument("graph reaches beyond the profile horizon".into()));
    }
    let mut mass = vec![0.0; horizon + 1];
    for (x, &r) in radii.iter().enumerate() {
        mass[r] += graph.measure(x);
    }
    if mass.iter().zip(&profile.sphere_mass).any(|(a, b)| (a - b).abs() > 1e-12 * b.abs().max(1.0)) {
        return Err(Error::InvalidArgument("sphere masses of graph and profile differ".into()));
    }

    let f = chi.values();
    let mut ray = vec![profile.root];
    for r in 1..=horizon {
        let prev = ray[r - 1];
        let next = graph
            .neighbors(prev)
            .iter()
            .map(|&(y, _)| y)
            .filter(|&y| radii[y] == r)
            .min_by(|&a, &b| (f[a] - f[prev]).abs().total_cmp(&(f[b] - f[prev]).abs()).then(a.cmp(&b)))
            .ok_or(Error::InvalidArgument(format!("vertex {prev} has no neighbour on sphere {r}")))?;
        ray.push(next);
    }
    let function = RadialFunction(ray.iter().map(|&x| f[x]).collect());

    let c_squared = gradient_norm_squared(graph, chi)?.into_iter().fold(0.0, f64::max);
    let v = function.values();
    let forward_max = (0..horizon).map(|r| profile.kappa_plus[r] * (v[r] - v[r + 1]).sq()).fold(0.0, f64::max);
    let grad = radial_gradient(profile, &function)?;
    let weak_max = (0..=horizon)
        .map(|r| {
            let ratio = if r == 0 { 0.0 } else { profile.sphere_mass[r - 1] / profile.sphere_mass[r] };
            grad.values()[r] / (1.0 + ratio)
        })
        .fold(0.0, f64::max);
    Ok(Radialized { function, ray, c_squared, forward_max, weak_max })
}
