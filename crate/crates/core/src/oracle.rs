//! Finite-difference Sturm–Liouville eigensolver.
//!
//! `-ψ'' + V ψ` is discretized with the three-point stencil on a uniform
//! grid. On the half line the parity sectors become boundary conditions at
//! the origin: a ghost-point reflection row for Neumann, row deletion for
//! Dirichlet. The wall at `x_max` is always Dirichlet. Eigenvalues come from
//! Sturm-sequence bisection, eigenvectors from inverse iteration.
//!
//! Nothing here touches Whittaker functions, so agreement with the spectrum
//! module is an independent check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// `ψ'(0) = 0`, half line.
    Neumann,
    /// `ψ(0) = 0`, half line.
    Dirichlet,
    /// Box `[x_min, x_max]` with walls at both ends.
    FullLine,
}

/// Tail decay demanded of the box edge, in e-folds of the WKB tunnelling
/// integral past the last turning point.
pub const BOX_DECAY: f64 = 32.0;
/// Margin by which `V(x_max)` must exceed the largest requested level.
pub const BOX_MARGIN: f64 = 25.0;
/// Largest admissible eigenvector amplitude near a wall, relative to peak.
pub const TAIL_LIMIT: f64 = 1e-10;
/// Fraction of grid nodes next to each wall inspected for residual amplitude.
pub const TAIL_BAND: f64 = 0.02;

#[derive(Debug, Clone)]
pub struct FdProblem<F> {
    pub potential: F,
    pub boundary: Boundary,
    pub x_max: f64,
    /// Left wall for `FullLine`; `-x_max` when absent.
    pub x_min: Option<f64>,
    /// Number of grid intervals.
    pub n_points: usize,
}

impl<F: Fn(f64) -> f64 + Sync> FdProblem<F> {
    pub fn new(potential: F, boundary: Boundary, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 64 {
            return Err(Error::InvalidParameter(format!(
                "n_points = {n_points} below the minimum of 64"
            )));
        }
        if !(x_max > 0.0) {
            return Err(Error::InvalidParameter(format!("x_max = {x_max} must be positive")));
        }
        Ok(Self {
            potential,
            boundary,
            x_max,
            x_min: None,
            n_points,
        })
    }

    pub fn with_x_min(mut self, x_min: f64) -> Self {
        self.x_min = Some(x_min);
        self
    }

    /// Sizes the box so that states up to `e_max` have decayed by
    /// [`BOX_DECAY`] e-folds at every wall and `V(x_max) ≥ e_max + BOX_MARGIN`.
    pub fn with_auto_box(potential: F, boundary: Boundary, e_max: f64, n_points: usize) -> Result<Self> {
        let right = wall_position(&potential, e_max, 1.0)?;
        // widen so the decay criterion already holds at the inner edge of the
        // tail band inspected by the InsufficientBox check
        Ok(match boundary {
            Boundary::FullLine => {
                let left = wall_position(&potential, e_max, -1.0)?;
                let pad = TAIL_BAND * (right + left) / (1.0 - 2.0 * TAIL_BAND);
                Self::new(potential, boundary, right + pad, n_points)?.with_x_min(-left - pad)
            }
            _ => Self::new(potential, boundary, right / (1.0 - TAIL_BAND), n_points)?,
        })
    }

    fn left(&self) -> f64 {
        match self.boundary {
            Boundary::FullLine => self.x_min.unwrap_or(-self.x_max),
            _ => 0.0,
        }
    }

    fn spacing(&self, intervals: usize) -> f64 {
        (self.x_max - self.left()) / intervals as f64
    }

    fn matrix(&self, intervals: usize) -> Tridiagonal {
        let h = self.spacing(intervals);
        let left = self.left();
        let first = match self.boundary {
            Boundary::Neumann => 0,
            _ => 1,
        };
        let xs: Vec<f64> = (first..intervals).map(|i| left + i as f64 * h).collect();
        let inv_h2 = 1.0 / (h * h);
        let diag: Vec<f64> = xs.iter().map(|&x| 2.0 * inv_h2 + (self.potential)(x)).collect();
        let mut off = vec![-inv_h2; xs.len() - 1];
        if self.boundary == Boundary::Neumann {
            // ghost point ψ(-h) = ψ(h), symmetrized by scaling ψ₀ with 1/√2
            off[0] = -std::f64::consts::SQRT_2 * inv_h2;
        }
        Tridiagonal {
            diag,
            off,
            h,
            intervals,
            left,
            boundary: self.boundary,
        }
    }
}

/// Walks away from the origin in direction `dir` until the box criteria hold.
fn wall_position<F: Fn(f64) -> f64>(potential: &F, e_max: f64, dir: f64) -> Result<f64> {
    let dx = 1e-3;
    let mut x: f64 = 0.0;
    let mut decay = 0.0;
    while x.abs() < 300.0 {
        x += dir * dx;
        let v = potential(x);
        if !v.is_finite() {
            break;
        }
        let excess = v - e_max;
        if excess > 0.0 {
            decay += excess.sqrt() * dx;
        } else {
            decay = 0.0;
        }
        // a potential that never reaches the margin on this side (the
        // Morse plateau) is bounded by decay alone
        let high_enough = excess >= BOX_MARGIN || (v - potential(x - dir)).abs() < 1e-3;
        if decay >= BOX_DECAY && high_enough {
            return Ok(x.abs().max(dx));
        }
    }
    Err(Error::Domain(format!(
        "could not contain states up to E = {e_max} within |x| < 300"
    )))
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    h: f64,
    intervals: usize,
    left: f64,
    boundary: Boundary,
}

impl Tridiagonal {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `lambda` (negative LDLᵀ pivots).
    fn sturm_count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let q_prev = if q == 0.0 { f64::EPSILON * self.h.powi(-2) } else { q };
            q = self.diag[i] - lambda - self.off[i - 1] * self.off[i - 1] / q_prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, index: usize, bounds: (f64, f64)) -> f64 {
        let (mut lo, mut hi) = bounds;
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn lowest(&self, count: usize) -> Vec<f64> {
        let bounds = self.gershgorin();
        (0..count)
            .into_par_iter()
            .map(|i| self.eigenvalue(i, bounds))
            .collect()
    }

    /// Solves `(T - σ) y = b` without pivoting; `None` on an exactly zero pivot.
    fn shifted_solve(&self, sigma: f64, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0] - sigma;
        if denom == 0.0 {
            return None;
        }
        c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
        d[0] = b[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - sigma - self.off[i - 1] * c[i - 1];
            if denom == 0.0 {
                return None;
            }
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (b[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Some(d)
    }

    fn inverse_iteration(&self, sigma: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut shift = sigma;
        for attempt in 0..4 {
            let mut v = vec![1.0 / (n as f64).sqrt(); n];
            let mut ok = true;
            for _ in 0..4 {
                match self.shifted_solve(shift, &v) {
                    Some(y) => {
                        let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
                        if !norm.is_finite() || norm == 0.0 {
                            ok = false;
                            break;
                        }
                        v = y.into_iter().map(|a| a / norm).collect();
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Ok(v);
            }
            shift = sigma + (attempt as f64 + 1.0) * 1e-10 * (1.0 + sigma.abs());
        }
        Err(Error::SingularShift { shift: sigma })
    }

    /// Grid vector including wall nodes, with the Neumann symmetrization undone.
    fn full_vector(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let grid: Vec<f64> = (0..=self.intervals)
            .map(|i| self.left + i as f64 * self.h)
            .collect();
        let mut values = vec![0.0; grid.len()];
        let offset = match self.boundary {
            Boundary::Neumann => 0,
            _ => 1,
        };
        for (i, &a) in v.iter().enumerate() {
            values[i + offset] = a;
        }
        if self.boundary == Boundary::Neumann {
            values[0] *= std::f64::consts::SQRT_2;
        }
        (grid, values)
    }

    fn tail_ratio(&self, v: &[f64]) -> f64 {
        let n = v.len();
        let peak = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let band = ((n as f64 * TAIL_BAND) as usize).max(2);
        let right = v[n - band..].iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let left = if self.boundary == Boundary::FullLine {
            v[..band].iter().fold(0.0f64, |m, a| m.max(a.abs()))
        } else {
            0.0
        };
        right.max(left) / peak
    }
}

/// Lowest `count` eigenvalues, ascending.
pub fn fd_eigenvalues<F: Fn(f64) -> f64 + Sync>(problem: &FdProblem<F>, count: usize) -> Result<Vec<f64>> {
    eigenvalues_on(problem, problem.n_points, count)
}

fn eigenvalues_on<F: Fn(f64) -> f64 + Sync>(
    problem: &FdProblem<F>,
    intervals: usize,
    count: usize,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count > problem.n_points / 4 {
        return Err(Error::InvalidParameter(format!(
            "count = {count} exceeds n_points/4 = {}",
            problem.n_points / 4
        )));
    }
    let matrix = problem.matrix(intervals);
    let values = matrix.lowest(count);
    let top = matrix.inverse_iteration(values[count - 1])?;
    let (_, full) = matrix.full_vector(&top);
    let tail_ratio = matrix.tail_ratio(&full);
    if tail_ratio > TAIL_LIMIT {
        return Err(Error::InsufficientBox { tail_ratio });
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonResult {
    /// `(4 E_{2n} − E_n)/3` per level.
    pub values: Vec<f64>,
    /// Observed convergence order from grids `n`, `2n`, `4n`; `None` when the
    /// differences are below the bisection noise floor.
    pub orders: Vec<Option<f64>>,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
}

/// h²-extrapolated eigenvalues from grids with `n` and `2n` intervals.
pub fn richardson_pair<F: Fn(f64) -> f64 + Sync>(problem: &FdProblem<F>, count: usize) -> Result<RichardsonResult> {
    let n = problem.n_points;
    let e1 = eigenvalues_on(problem, n, count)?;
    let e2 = eigenvalues_on(problem, 2 * n, count)?;
    let e4 = eigenvalues_on(problem, 4 * n, count)?;
    let mut orders = Vec::with_capacity(count);
    for level in 0..count {
        let d1 = e1[level] - e2[level];
        let d2 = e2[level] - e4[level];
        let noise = 1e-9 * (1.0 + e4[level].abs());
        let order = if d2.abs() > 1e3 * noise {
            let p = (d1 / d2).abs().log2();
            if !(1.7..=2.3).contains(&p) {
                return Err(Error::OrderAnomaly { level, order: p });
            }
            Some(p)
        } else {
            None
        };
        orders.push(order);
    }
    Ok(RichardsonResult {
        values: e1
            .iter()
            .zip(&e2)
            .map(|(a, b)| (4.0 * b - a) / 3.0)
            .collect(),
        orders,
        coarse: e1,
        fine: e2,
    })
}

/// Grid eigenvector for an eigenvalue of the discretized operator, unit
/// normalized by the trapezoidal rule with its first significant component
/// positive. Wall nodes are included with value zero.
pub fn fd_eigenvector<F: Fn(f64) -> f64 + Sync>(problem: &FdProblem<F>, eigenvalue: f64) -> Result<SampledFunction> {
    let matrix = problem.matrix(problem.n_points);
    let v = matrix.inverse_iteration(eigenvalue)?;
    let (grid, mut values) = matrix.full_vector(&v);
    let h = matrix.h;
    let n = values.len();
    let norm2: f64 = values
        .iter()
        .enumerate()
        .map(|(i, a)| if i == 0 || i == n - 1 { 0.5 * a * a } else { a * a })
        .sum::<f64>()
        * h;
    let peak = values.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let sign = values
        .iter()
        .find(|a| a.abs() > 1e-8 * peak)
        .map_or(1.0, |a| a.signum());
    let scale = sign / norm2.sqrt();
    for a in values.iter_mut() {
        *a *= scale;
    }
    let derivs = (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h)
            } else {
                (values[i + 1] - values[i - 1]) / (2.0 * h)
            }
        })
        .collect();
    SampledFunction::new(grid, values, derivs)
}

/// A potential known only at the nodes of a uniform grid on `[left, right]`,
/// linearly interpolated in between. Built on the finest grid used by
/// [`richardson_pair`] every coarser node coincides with a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential {
    left: f64,
    h: f64,
    values: Vec<f64>,
}

impl TabulatedPotential {
    /// Nodes `left + i (right − left)/intervals`, `i = 0..=intervals`.
    pub fn nodes(left: f64, right: f64, intervals: usize) -> Vec<f64> {
        let h = (right - left) / intervals as f64;
        (0..=intervals).map(|i| left + i as f64 * h).collect()
    }

    pub fn new(left: f64, right: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !(right > left) {
            return Err(Error::InvalidParameter("tabulated potential needs two nodes on a nonempty interval".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("tabulated potential is not finite at node {i}")));
        }
        Ok(Self {
            left,
            h: (right - left) / (values.len() - 1) as f64,
            values,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = ((x - self.left) / self.h).max(0.0);
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let frac = (t - i as f64).min(1.0);
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

/// Richardson-extrapolated lowest `count` levels of an even potential from
/// its Neumann and Dirichlet half-line problems on `[0, x_max]`, merged so
/// that even and odd states alternate from the ground state up.
pub fn symmetric_spectrum<F: Fn(f64) -> f64 + Sync + Clone>(
    potential: F,
    x_max: f64,
    count: usize,
    n_points: usize,
) -> Result<Vec<f64>> {
    let even = count.div_ceil(2);
    let odd = count / 2;
    let (neumann, dirichlet) = rayon::join(
        || richardson_pair(&FdProblem::new(potential.clone(), Boundary::Neumann, x_max, n_points)?, even),
        || richardson_pair(&FdProblem::new(potential.clone(), Boundary::Dirichlet, x_max, n_points)?, odd),
    );
    let (neumann, dirichlet) = (neumann?.values, dirichlet?.values);
    Ok((0..count)
        .map(|i| if i % 2 == 0 { neumann[i / 2] } else { dirichlet[i / 2] })
        .collect())
}

/// Right wall of the automatic box for an even potential and states up to `e_max`.
pub fn auto_x_max<F: Fn(f64) -> f64 + Sync>(potential: F, e_max: f64) -> Result<f64> {
    Ok(FdProblem::with_auto_box(potential, Boundary::Neumann, e_max, 64)?.x_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_potential_is_exact_at_nodes() {
        let xs = TabulatedPotential::nodes(0.0, 2.0, 8);
        let tab = TabulatedPotential::new(0.0, 2.0, xs.iter().map(|x| x * x).collect()).unwrap();
        for x in &xs {
            assert_eq!(tab.eval(*x), x * x);
        }
        assert!((tab.eval(0.125) - 0.03125).abs() < 1e-15);
    }

    #[test]
    fn symmetric_spectrum_of_oscillator() {
        let e = symmetric_spectrum(|x: f64| x * x, 10.0, 4, 2000).unwrap();
        for (n, v) in e.iter().enumerate() {
            assert!((v - (2 * n + 1) as f64).abs() < 1e-6, "{n}: {v}");
        }
    }
    use crate::morse_ref::{morse_potential_fullline, PotentialParams};

    fn oscillator() -> FdProblem<fn(f64) -> f64> {
        FdProblem::new((|x: f64| x * x) as fn(f64) -> f64, Boundary::FullLine, 12.0, 6000).unwrap()
    }

    #[test]
    fn oscillator_spectrum() {
        let e = fd_eigenvalues(&oscillator(), 3).unwrap();
        for (n, v) in e.iter().enumerate() {
            assert!((v - (2 * n + 1) as f64).abs() < 1e-4, "{n}: {v}");
        }
    }

    #[test]
    fn oscillator_richardson_order() {
        let problem = FdProblem::new(|x: f64| x * x, Boundary::FullLine, 10.0, 1000).unwrap();
        let r = richardson_pair(&problem, 4).unwrap();
        for (n, (v, order)) in r.values.iter().zip(&r.orders).enumerate() {
            assert!((v - (2 * n + 1) as f64).abs() < 1e-7, "{n}: {v}");
            let p = order.expect("order resolved");
            assert!((p - 2.0).abs() < 0.1, "order {p}");
        }
    }

    #[test]
    fn oscillator_ground_state_is_gaussian() {
        let problem = oscillator();
        let e = fd_eigenvalues(&problem, 1).unwrap();
        let v = fd_eigenvector(&problem, e[0]).unwrap();
        let c = std::f64::consts::PI.powf(-0.25);
        let dev = v
            .grid
            .iter()
            .zip(&v.values)
            .map(|(x, a)| (a - c * (-0.5 * x * x).exp()).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-3, "{dev}");
    }

    #[test]
    fn eigenvector_node_counts() {
        let problem = oscillator();
        let e = fd_eigenvalues(&problem, 5).unwrap();
        for (m, &lambda) in e.iter().enumerate() {
            let v = fd_eigenvector(&problem, lambda).unwrap();
            assert_eq!(v.sign_changes(1e-8), m);
        }
    }

    #[test]
    fn morse_closed_form_after_extrapolation() {
        let params = PotentialParams::from_h(1.0, 2.5).unwrap();
        let v = move |x: f64| morse_potential_fullline(&params, x).unwrap_or(f64::MAX);
        let problem = FdProblem::with_auto_box(v, Boundary::FullLine, -0.25, 4000).unwrap();
        let r = richardson_pair(&problem, 3).unwrap();
        for (got, want) in r.values.iter().zip([-6.25, -2.25, -0.25]) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn half_line_sectors_interlace() {
        let v = |x: f64| (2.0 * x.abs()).exp();
        let n = FdProblem::with_auto_box(v, Boundary::Neumann, 60.0, 3000).unwrap();
        let d = FdProblem::with_auto_box(v, Boundary::Dirichlet, 60.0, 3000).unwrap();
        let en = fd_eigenvalues(&n, 6).unwrap();
        let ed = fd_eigenvalues(&d, 6).unwrap();
        for i in 0..6 {
            assert!(en[i] < ed[i]);
            if i + 1 < 6 {
                assert!(ed[i] < en[i + 1]);
            }
        }
    }

    #[test]
    fn neumann_ground_state_has_zero_slope() {
        let v = |x: f64| (2.0 * x.abs()).exp();
        let problem = FdProblem::with_auto_box(v, Boundary::Neumann, 20.0, 4000).unwrap();
        let e = fd_eigenvalues(&problem, 1).unwrap();
        let f = fd_eigenvector(&problem, e[0]).unwrap();
        let h = f.spacing();
        // one-sided slope at the reflecting node is O(h²)
        let peak = f.values.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        assert!(f.derivs[0].abs() < 10.0 * h * h * peak * 100.0, "{}", f.derivs[0]);
    }

    #[test]
    fn box_growth_lowers_eigenvalues() {
        let v = |x: f64| (2.0 * x.abs()).exp() - 3.0 * x.abs().exp();
        let auto = FdProblem::with_auto_box(v, Boundary::Dirichlet, 30.0, 2000).unwrap();
        let base = fd_eigenvalues(&auto, 4).unwrap();
        let h = auto.x_max / 2000.0;
        let mut prev = base.clone();
        for extra in 1..=3 {
            let x_max = auto.x_max + extra as f64 * 40.0 * h;
            let n = (x_max / h).round() as usize;
            let p = FdProblem::new(v, Boundary::Dirichlet, n as f64 * h, n).unwrap();
            let e = fd_eigenvalues(&p, 4).unwrap();
            for i in 0..4 {
                assert!(e[i] <= prev[i] + 1e-9);
                assert!((e[i] - base[i]).abs() < 1e-8, "{i}: {}", e[i] - base[i]);
            }
            prev = e;
        }
    }

    #[test]
    fn small_box_is_flagged() {
        let problem = FdProblem::new(|x: f64| x * x, Boundary::FullLine, 2.0, 400).unwrap();
        assert!(matches!(
            fd_eigenvalues(&problem, 3),
            Err(Error::InsufficientBox { .. })
        ));
    }

    #[test]
    fn too_many_levels_rejected() {
        let problem = FdProblem::new(|x: f64| x * x, Boundary::FullLine, 5.0, 64).unwrap();
        assert!(fd_eigenvalues(&problem, 17).is_err());
        assert!(FdProblem::new(|x: f64| x * x, Boundary::FullLine, 5.0, 63).is_err());
    }
}
