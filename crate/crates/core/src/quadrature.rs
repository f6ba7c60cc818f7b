//! Gauss–Legendre quadrature helpers.
//!
//! Node/weight generation is delegated to `gauss-quad`; this module adds an
//! adaptive bisection driver for cheap integrands and composite rules whose
//! nodes can be handed to a batch evaluator in one sweep.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    pub fn new(degree: usize) -> Self {
        let degree = NonZeroUsize::new(degree.max(1)).expect("degree is positive");
        let (mut nodes, mut weights): (Vec<f64>, Vec<f64>) =
            GaussLegendre::new(degree).into_iter().unzip();
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
        nodes = order.iter().map(|&i| nodes[i]).collect();
        weights = order.iter().map(|&i| weights[i]).collect();
        Self { nodes, weights }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights of the composite rule over consecutive panels.
    /// Nodes come out in increasing order when `edges` is increasing.
    pub fn composite(&self, edges: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::with_capacity(edges.len().saturating_sub(1) * self.degree());
        let mut ws = Vec::with_capacity(xs.capacity());
        for e in edges.windows(2) {
            let half = 0.5 * (e[1] - e[0]);
            let mid = 0.5 * (e[1] + e[0]);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                xs.push(mid + half * x);
                ws.push(w * half);
            }
        }
        (xs, ws)
    }
}

/// Adaptive Gauss–Legendre integration by interval bisection.
///
/// A panel is accepted when its 15-point estimate and the sum of the two
/// half-panel estimates agree to within the panel's share of the tolerance.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: usize,
) -> Result<f64> {
    let rule = Rule::new(15);
    let mut total = 0.0;
    let mut stack = vec![(a, b, rule.integrate(a, b, &mut f), 0usize)];
    let width = (b - a).abs();
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        let share = abs_tol * (hi - lo).abs() / width;
        let roundoff = 100.0 * f64::EPSILON * (left.abs() + right.abs());
        if (left + right - whole).abs() <= share.max(roundoff) || (hi - lo).abs() < 1e-12 * width {
            total += left + right;
        } else if depth >= max_depth {
            return Err(Error::QuadratureFailure(format!(
                "no convergence on [{lo}, {hi}] after {depth} bisections"
            )));
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(total)
}

/// Evenly spaced panel edges.
pub fn uniform_edges(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let n = panels.max(1);
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Panel edges in geometric progression (uniform in `ln x`), for `0 < a < b`.
pub fn geometric_edges(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let n = panels.max(1);
    let ratio = (b / a).ln();
    (0..=n)
        .map(|i| a * (ratio * i as f64 / n as f64).exp())
        .collect()
}
