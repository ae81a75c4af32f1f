//! Radially symmetric trees and antitrees with counting measure and unit weights.

use alloc::vec;
use alloc::vec::Vec;

use super::{GrowthDescriptor, RadialProfile};
use crate::error::{Error, Result};
use crate::graph::{GraphView, WeightedGraph};
use crate::math::{floor, powf, round};

/// `round((r+1)^α)` for `r = 0..=radii`.
pub fn polynomial_sizes(alpha: f64, radii: usize) -> Vec<f64> {
    (0..=radii).map(|r| round(powf((r + 1) as f64, alpha)).max(1.0)).collect()
}

/// `2^⌊r^α⌋` for `r = 0..=radii`, so `log |S_r| ~ r^α`.
pub fn stretched_exponential_sizes(alpha: f64, radii: usize) -> Vec<f64> {
    (0..=radii).map(|r| powf(2.0, floor(powf(r as f64, alpha)))).collect()
}

/// `2^⌊α log₂(r+1)⌋`: within a factor two of `(r+1)^α` and divisible from
/// one sphere to the next, as a tree requires.
pub fn polynomial_tree_sizes(alpha: f64, radii: usize) -> Vec<f64> {
    (0..=radii)
        .map(|r| {
            let mut k = 0.0;
            while powf(2.0, k + 1.0) <= powf((r + 1) as f64, alpha) * (1.0 + 1e-12) {
                k += 1.0;
            }
            powf(2.0, k)
        })
        .collect()
}

fn check_sizes(sizes: &[f64]) -> Result<()> {
    match sizes.first() {
        None => Err(Error::InvalidArgument("no spheres given".into())),
        Some(&s) if s != 1.0 => Err(Error::InvalidArgument("the root sphere has exactly one vertex".into())),
        _ if sizes.iter().any(|&s| !(s >= 1.0) || s != floor(s) || !s.is_finite()) => {
            Err(Error::InvalidArgument("sphere sizes must be positive integers".into()))
        }
        _ => Ok(()),
    }
}

/// Profile of the tree in which every vertex of `S_r` has `|S_{r+1}|/|S_r|` children.
pub fn tree_profile(sizes: &[f64]) -> Result<RadialProfile> {
    check_sizes(sizes)?;
    let mut kappa_plus = Vec::with_capacity(sizes.len() - 1);
    for (r, pair) in sizes.windows(2).enumerate() {
        let children = pair[1] / pair[0];
        if children != floor(children) {
            return Err(Error::InvalidArgument(alloc::format!(
                "sphere {} has {} vertices, not a multiple of the {} on sphere {}",
                r + 1,
                pair[1],
                pair[0],
                r
            )));
        }
        kappa_plus.push(children);
    }
    let mut kappa_minus = vec![1.0; sizes.len()];
    kappa_minus[0] = 0.0;
    RadialProfile::new(0, sizes.to_vec(), kappa_plus, kappa_minus)
}

/// Profile of the antitree joining consecutive spheres completely.
pub fn antitree_profile(sizes: &[f64]) -> Result<RadialProfile> {
    check_sizes(sizes)?;
    let kappa_plus = sizes[1..].to_vec();
    let kappa_minus = core::iter::once(0.0).chain(sizes[..sizes.len() - 1].iter().copied()).collect();
    RadialProfile::new(0, sizes.to_vec(), kappa_plus, kappa_minus)
}

impl RadialProfile {
    pub fn antitree_polynomial(alpha: f64, radii: usize) -> Result<Self> {
        Ok(antitree_profile(&polynomial_sizes(alpha, radii))?.with_growth(GrowthDescriptor::AntitreePolynomial { alpha }))
    }

    pub fn tree_stretched_exponential(alpha: f64, radii: usize) -> Result<Self> {
        Ok(tree_profile(&stretched_exponential_sizes(alpha, radii))?
            .with_growth(GrowthDescriptor::TreeStretchedExponential { alpha }))
    }

    pub fn tree_polynomial(alpha: f64, radii: usize) -> Result<Self> {
        Ok(tree_profile(&polynomial_tree_sizes(alpha, radii))?.with_growth(GrowthDescriptor::TreePolynomial { alpha }))
    }
}

fn as_floats(sizes: &[usize]) -> Vec<f64> {
    sizes.iter().map(|&s| s as f64).collect()
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

/// Concrete tree, vertices numbered sphere by sphere with the root at `0`.
pub fn generate_tree(sizes: &[usize]) -> Result<(WeightedGraph, RadialProfile)> {
    let profile = tree_profile(&as_floats(sizes))?;
    let off = offsets(sizes);
    let mut edges = Vec::with_capacity(off[sizes.len()]);
    for r in 0..sizes.len() - 1 {
        let children = sizes[r + 1] / sizes[r];
        for i in 0..sizes[r] {
            for j in 0..children {
                edges.push((off[r] + i, off[r + 1] + i * children + j, 1.0));
            }
        }
    }
    let graph = WeightedGraph::new(vec![1.0; off[sizes.len()]], edges)?;
    Ok((graph, profile))
}

/// Concrete antitree, vertices numbered sphere by sphere with the root at `0`.
pub fn generate_antitree(sizes: &[usize]) -> Result<(WeightedGraph, RadialProfile)> {
    let profile = antitree_profile(&as_floats(sizes))?;
    let off = offsets(sizes);
    let mut edges = Vec::new();
    for r in 0..sizes.len() - 1 {
        for u in off[r]..off[r + 1] {
            for v in off[r + 1]..off[r + 2] {
                edges.push((u, v, 1.0));
            }
        }
    }
    let graph = WeightedGraph::new(vec![1.0; off[sizes.len()]], edges)?;
    Ok((graph, profile))
}

/// An antitree read through [`GraphView`] without storing its edges.
#[derive(Debug, Clone)]
pub struct AntitreeView {
    offsets: Vec<usize>,
}

impl AntitreeView {
    pub fn new(sizes: &[usize]) -> Result<Self> {
        check_sizes(&as_floats(sizes))?;
        Ok(AntitreeView { offsets: offsets(sizes) })
    }

    /// Sphere containing vertex `u`.
    pub fn sphere_of(&self, u: usize) -> usize {
        self.offsets.partition_point(|&o| o <= u) - 1
    }
}

impl GraphView for AntitreeView {
    fn vertex_count(&self) -> usize {
        *self.offsets.last().expect("nonempty")
    }

    fn measure(&self, _u: usize) -> f64 {
        1.0
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, mut visit: F) {
        let r = self.sphere_of(u);
        if r > 0 {
            (self.offsets[r - 1]..self.offsets[r]).for_each(|v| visit(v, 1.0));
        }
        if r + 2 < self.offsets.len() {
            (self.offsets[r + 1]..self.offsets[r + 2]).for_each(|v| visit(v, 1.0));
        }
    }

    fn edge_count(&self) -> usize {
        self.offsets.windows(3).map(|w| (w[1] - w[0]) * (w[2] - w[1])).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::detect_radial_symmetry;

    #[test]
    fn binary_tree() {
        let (g, p) = generate_tree(&[1, 2, 4, 8]).unwrap();
        assert_eq!(g.vertex_count(), 15);
        assert_eq!(g.edge_count(), 14);
        assert_eq!(p.kappa_plus, vec![2.0, 2.0, 2.0]);
        for r in 0..3 {
            assert_eq!(p.boundary(r), p.sphere_mass[r + 1]);
        }
        assert_eq!(detect_radial_symmetry(&g, 0, 0.0).unwrap(), p);
    }

    #[test]
    fn tree_divisibility() {
        assert!(generate_tree(&[1, 3, 6]).is_ok());
        assert!(matches!(generate_tree(&[1, 2, 3]), Err(Error::InvalidArgument(_))));
        assert!(generate_tree(&[2, 4]).is_err());
        let (_, p) = generate_tree(&[1, 1, 1, 1]).unwrap();
        assert_eq!(p.kappa_plus, vec![1.0; 3]);
    }

    #[test]
    fn antitree_boundaries() {
        let (g, p) = generate_antitree(&[1, 4, 9]).unwrap();
        assert_eq!(p.boundary(0), 4.0);
        assert_eq!(p.boundary(1), 36.0);
        assert_eq!(detect_radial_symmetry(&g, 0, 0.0).unwrap(), p);
        assert_eq!(p.boundary_identity_defect(), 0.0);
    }

    #[test]
    fn square_antitree_kappas() {
        let sizes: Vec<usize> = (0..6).map(|r| (r + 1) * (r + 1)).collect();
        let (g, p) = generate_antitree(&sizes).unwrap();
        let detected = detect_radial_symmetry(&g, 0, 0.0).unwrap();
        for r in 0..5 {
            assert_eq!(detected.kappa_plus[r], ((r + 2) * (r + 2)) as f64);
            assert_eq!(detected.kappa_minus[r], (r * r) as f64);
        }
        assert_eq!(detected, p);
    }

    #[test]
    fn implicit_view_agrees() {
        let sizes = [1, 3, 2, 5];
        let (g, _) = generate_antitree(&sizes).unwrap();
        let view = AntitreeView::new(&sizes).unwrap();
        assert_eq!(view.edge_count(), g.edge_count());
        for u in 0..g.vertex_count() {
            let mut seen = Vec::new();
            view.for_each_neighbor(u, |v, b| seen.push((v, b)));
            assert_eq!(seen, g.neighbors(u));
        }
    }

    #[test]
    fn size_patterns() {
        assert_eq!(polynomial_sizes(2.0, 3), vec![1.0, 4.0, 9.0, 16.0]);
        assert_eq!(stretched_exponential_sizes(1.0, 3), vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(polynomial_tree_sizes(2.0, 4), vec![1.0, 4.0, 8.0, 16.0, 16.0]);
        assert!(RadialProfile::tree_stretched_exponential(0.5, 500).is_ok());
        assert!(RadialProfile::tree_polynomial(3.0, 200).is_ok());
    }
}
