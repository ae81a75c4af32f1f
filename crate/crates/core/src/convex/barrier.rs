//! Log-barrier interior-point method for small dense convex programs with a
//! linear objective, linear inequalities and sums of squared linear forms.
//!
//! ```text
//! minimize   cᵀx
//! subject to aᵢᵀx ≤ bᵢ                    (linear)
//!            Σ_k w_k (a_kᵀx)² ≤ 1         (quadratic, w_k ≥ 0)
//! ```
//!
//! Each centering step minimises `t·cᵀx − Σ log(slackᵢ)` by damped Newton
//! iterations; `t` grows geometrically until the duality measure
//! `#constraints / t` drops below the tolerance.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{ln, Square};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Constraint {
    Linear { terms: Vec<(usize, f64)>, rhs: f64 },
    Quadratic { terms: Vec<(f64, Vec<(usize, f64)>)> },
}

#[inline]
fn dot(terms: &[(usize, f64)], x: &[f64]) -> f64 {
    terms.iter().map(|&(i, a)| a * x[i]).sum()
}

impl Constraint {
    /// Distance to the constraint boundary; positive strictly inside.
    pub(crate) fn slack(&self, x: &[f64]) -> f64 {
        match self {
            Constraint::Linear { terms, rhs } => rhs - dot(terms, x),
            Constraint::Quadratic { terms } => 1.0 - terms.iter().map(|(w, a)| w * dot(a, x).sq()).sum::<f64>(),
        }
    }

    /// Adds the gradient and Hessian of `−log(slack)` at `x`.
    fn accumulate(&self, x: &[f64], slack: f64, dim: usize, grad: &mut [f64], hess: &mut [f64]) {
        match self {
            Constraint::Linear { terms, .. } => {
                for &(i, a) in terms {
                    grad[i] += a / slack;
                    for &(j, b) in terms {
                        hess[i * dim + j] += a * b / (slack * slack);
                    }
                }
            }
            Constraint::Quadratic { terms } => {
                // ∇q = Σ 2w(aᵀx)a, ∇²q = Σ 2w aaᵀ
                let mut gq = vec![0.0; dim];
                for (w, a) in terms {
                    let ax = dot(a, x);
                    for &(i, ai) in a {
                        gq[i] += 2.0 * w * ax * ai;
                    }
                    for &(i, ai) in a {
                        for &(j, aj) in a {
                            hess[i * dim + j] += 2.0 * w * ai * aj / slack;
                        }
                    }
                }
                for i in 0..dim {
                    if gq[i] == 0.0 {
                        continue;
                    }
                    grad[i] += gq[i] / slack;
                    for j in 0..dim {
                        hess[i * dim + j] += gq[i] * gq[j] / (slack * slack);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierProblem {
    pub dim: usize,
    pub cost: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BarrierSettings {
    pub tol: f64,
    pub max_newton: usize,
    pub t0: f64,
    pub growth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BarrierOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub duality_gap: f64,
    /// KKT residual `max(‖c + Σ λᵢ ∇gᵢ‖_∞, Σ λᵢ·slackᵢ)`, with multipliers
    /// `λ ≥ 0` either the barrier duals `1/(t·slackᵢ)` or a least-squares
    /// refit, whichever gives the smaller residual.
    pub stationarity: f64,
    pub slacks: Vec<f64>,
}

const NEWTON_DECREMENT_TOL: f64 = 1e-10;

impl BarrierProblem {
    fn slacks(&self, x: &[f64]) -> Option<Vec<f64>> {
        let s: Vec<f64> = self.constraints.iter().map(|c| c.slack(x)).collect();
        if s.iter().all(|&v| v > 0.0) {
            Some(s)
        } else {
            None
        }
    }

    fn centering_objective(&self, x: &[f64], t: f64) -> Option<f64> {
        let s = self.slacks(x)?;
        let linear: f64 = self.cost.iter().zip(x).map(|(c, v)| c * v).sum();
        Some(t * linear - s.iter().map(|&v| ln(v)).sum::<f64>())
    }

    fn derivatives(&self, x: &[f64], slacks: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
        let dim = self.dim;
        let mut grad: Vec<f64> = self.cost.iter().map(|c| t * c).collect();
        let mut hess = vec![0.0; dim * dim];
        for (c, &s) in self.constraints.iter().zip(slacks) {
            c.accumulate(x, s, dim, &mut grad, &mut hess);
        }
        (grad, hess)
    }

    /// Runs the barrier method from a strictly feasible `x0`.
    pub(crate) fn solve(&self, x0: Vec<f64>, settings: &BarrierSettings) -> Result<BarrierOutcome> {
        if self.slacks(&x0).is_none() {
            return Err(Error::Numerical("barrier start point is not strictly feasible".into()));
        }
        let m = self.constraints.len().max(1) as f64;
        let mut x = x0;
        let mut t = settings.t0;
        let mut iterations = 0;
        let mut converged = false;
        let mut budget_exhausted = false;
        loop {
            // centering
            loop {
                if iterations >= settings.max_newton {
                    budget_exhausted = true;
                    break;
                }
                let slacks = self.slacks(&x).expect("iterates stay strictly feasible");
                let (grad, hess) = self.derivatives(&x, &slacks, t);
                let step = solve_spd(&hess, &grad, self.dim)?;
                let decrement: f64 = grad.iter().zip(&step).map(|(g, d)| g * d).sum();
                iterations += 1;
                if decrement / 2.0 <= NEWTON_DECREMENT_TOL {
                    break;
                }
                let current = self.centering_objective(&x, t).expect("feasible");
                let mut alpha = 1.0;
                let mut accepted = false;
                for _ in 0..80 {
                    let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, di)| xi - alpha * di).collect();
                    if let Some(value) = self.centering_objective(&trial, t) {
                        if value < current && value <= current - 0.25 * alpha * decrement {
                            x = trial;
                            accepted = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if !accepted {
                    // no further progress representable at this t
                    break;
                }
            }
            if budget_exhausted {
                break;
            }
            if m / t <= settings.tol {
                converged = true;
                break;
            }
            t *= settings.growth;
        }

        let slacks = self.slacks(&x).expect("feasible");
        let barrier_duals: Vec<f64> = slacks.iter().map(|s| 1.0 / (t * s)).collect();
        let mut stationarity = self.kkt_residual(&x, &slacks, &barrier_duals);
        if let Some(refit) = self.refit_duals(&x, &slacks) {
            stationarity = stationarity.min(self.kkt_residual(&x, &slacks, &refit));
        }
        Ok(BarrierOutcome { x, iterations, converged, duality_gap: m / t, stationarity, slacks })
    }
}

impl Constraint {
    /// Gradient of the constraint function `g` in `g ≤ 0` form.
    fn gradient(&self, x: &[f64], dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        match self {
            Constraint::Linear { terms, .. } => terms.iter().for_each(|&(i, a)| out[i] += a),
            Constraint::Quadratic { terms } => {
                for (w, a) in terms {
                    let ax = dot(a, x);
                    a.iter().for_each(|&(i, ai)| out[i] += 2.0 * w * ax * ai);
                }
            }
        }
        out
    }
}

impl BarrierProblem {
    fn kkt_residual(&self, x: &[f64], slacks: &[f64], duals: &[f64]) -> f64 {
        let mut r = self.cost.clone();
        let mut complementarity = 0.0;
        for ((c, &l), &s) in self.constraints.iter().zip(duals).zip(slacks) {
            if l == 0.0 {
                continue;
            }
            for (ri, gi) in r.iter_mut().zip(c.gradient(x, self.dim)) {
                *ri += l * gi;
            }
            complementarity += l * s;
        }
        r.iter().fold(complementarity, |acc, v| acc.max(v.abs()))
    }

    /// Multipliers minimising `‖c + Σ λᵢ ∇gᵢ‖² + Σ (λᵢ slackᵢ)²`; constraints
    /// with a negative multiplier are dropped and the fit repeated.
    fn refit_duals(&self, x: &[f64], slacks: &[f64]) -> Option<Vec<f64>> {
        let mut active: Vec<usize> = (0..slacks.len()).collect();
        let all: Vec<Vec<f64>> = self.constraints.iter().map(|c| c.gradient(x, self.dim)).collect();
        while !active.is_empty() {
            let k = active.len();
            let mut gram = vec![0.0; k * k];
            let mut rhs = vec![0.0; k];
            for (a, &i) in active.iter().enumerate() {
                rhs[a] = -all[i].iter().zip(&self.cost).map(|(g, c)| g * c).sum::<f64>();
                for (b, &j) in active.iter().enumerate() {
                    gram[a * k + b] = all[i].iter().zip(&all[j]).map(|(p, q)| p * q).sum();
                }
                gram[a * k + a] += slacks[i].sq();
            }
            let lambda = solve_spd(&gram, &rhs, k).ok()?;
            match (0..k).filter(|&a| !(lambda[a] >= 0.0)).min_by(|&a, &b| lambda[a].total_cmp(&lambda[b])) {
                Some(worst) => {
                    active.remove(worst);
                }
                None => {
                    let mut out = vec![0.0; slacks.len()];
                    active.iter().zip(lambda).for_each(|(&i, l)| out[i] = l);
                    return Some(out);
                }
            }
        }
        None
    }
}

/// Solves `H·d = g` for symmetric positive definite `H` by Cholesky, adding a
/// small diagonal shift when the factorisation breaks down numerically.
pub(crate) fn solve_spd(hess: &[f64], rhs: &[f64], dim: usize) -> Result<Vec<f64>> {
    let scale = (0..dim).map(|i| hess[i * dim + i].abs()).fold(0.0f64, f64::max).max(1e-300);
    let mut shift = 0.0;
    for _ in 0..40 {
        if let Some(l) = cholesky(hess, dim, shift) {
            return Ok(cholesky_solve(&l, rhs, dim));
        }
        shift = if shift == 0.0 { scale * 1e-14 } else { shift * 10.0 };
    }
    Err(Error::Numerical("Newton system is not positive definite".into()))
}

fn cholesky(a: &[f64], dim: usize, shift: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; dim * dim];
    for j in 0..dim {
        let mut d = a[j * dim + j] + shift;
        for k in 0..j {
            d -= l[j * dim + k] * l[j * dim + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = crate::math::sqrt(d);
        l[j * dim + j] = d;
        for i in j + 1..dim {
            let mut s = a[i * dim + j];
            for k in 0..j {
                s -= l[i * dim + k] * l[j * dim + k];
            }
            l[i * dim + j] = s / d;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], rhs: &[f64], dim: usize) -> Vec<f64> {
    let mut y = rhs.to_vec();
    for i in 0..dim {
        for k in 0..i {
            y[i] -= l[i * dim + k] * y[k];
        }
        y[i] /= l[i * dim + i];
    }
    for i in (0..dim).rev() {
        for k in i + 1..dim {
            y[i] -= l[k * dim + i] * y[k];
        }
        y[i] /= l[i * dim + i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> BarrierSettings {
        BarrierSettings { tol: 1e-10, max_newton: 500, t0: 1.0, growth: 10.0 }
    }

    #[test]
    fn linear_program_on_a_box() {
        // max x + 2y on [0,1]²
        let problem = BarrierProblem {
            dim: 2,
            cost: vec![-1.0, -2.0],
            constraints: vec![
                Constraint::Linear { terms: vec![(0, 1.0)], rhs: 1.0 },
                Constraint::Linear { terms: vec![(1, 1.0)], rhs: 1.0 },
                Constraint::Linear { terms: vec![(0, -1.0)], rhs: 0.0 },
                Constraint::Linear { terms: vec![(1, -1.0)], rhs: 0.0 },
            ],
        };
        let out = problem.solve(vec![0.5, 0.5], &settings()).unwrap();
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-9 && (out.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disc_maximum() {
        // max x + y on x² + y² ≤ 1 → (1/√2, 1/√2)
        let problem = BarrierProblem {
            dim: 2,
            cost: vec![-1.0, -1.0],
            constraints: vec![Constraint::Quadratic { terms: vec![(1.0, vec![(0, 1.0)]), (1.0, vec![(1, 1.0)])] }],
        };
        let out = problem.solve(vec![0.0, 0.0], &settings()).unwrap();
        assert!(out.converged);
        let value = out.x[0] + out.x[1];
        assert!((value - 2f64.sqrt()).abs() < 1e-9);
        assert!(out.slacks[0] > 0.0);
        assert!(out.stationarity < 1e-6);
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let problem = BarrierProblem {
            dim: 1,
            cost: vec![1.0],
            constraints: vec![Constraint::Linear { terms: vec![(0, 1.0)], rhs: 0.0 }],
        };
        assert!(problem.solve(vec![1.0], &settings()).is_err());
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let h = [4.0, 1.0, 1.0, 3.0];
        let x = solve_spd(&h, &[1.0, 2.0], 2).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
    }
}
