//! Crum and Krein–Adler deformations of the symmetric potential.
//!
//! Deleting the levels `𝒟 = {d₁ < … < d_L}` gives
//!
//! ```text
//! V_𝒟 = V − 2 ∂²ₓ log|W[ψ_{d₁}, …, ψ_{d_L}]|,
//! ψ_{𝒟;n} = W[ψ_{d₁}, …, ψ_{d_L}, ψ_n] / W[ψ_{d₁}, …, ψ_{d_L}],
//! ```
//!
//! with Crum's case `𝒟 = {0, …, L−1}`. Derivatives beyond the first are
//! generated from `ψ'' = (V − E)ψ`, so only `ψ` and `ψ'` are ever evaluated.
//! Determinants are taken on column-normalized matrices and carried as
//! mantissa plus log-scale, since the entries decay like `e^{−ρ/2}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morse_ref::PotentialParams;
use crate::sampled::SampledFunction;
use crate::special_fn::{whittaker_w_batch, OrderParam, WhittakerOptions};
use crate::spectrum::{half_line_nodes, symmetric_potential, symmetric_potential_derivative, EigenLevel, Eigenstate};

/// A Wronskian mantissa below this (relative to the column scales) is
/// treated as a zero of the Wronskian.
pub const ZERO_TOL: f64 = 1e-13;
/// Largest finite-difference step for the log-Wronskian curvature.
pub const MAX_FD_STEP: f64 = 1e-3;
/// Allowed disagreement of the curvature between steps `δ` and `2δ`,
/// relative to `max(1, |V_𝒟|)`.
pub const FD_CONSISTENCY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletionSet {
    labels: Vec<usize>,
}

impl DeletionSet {
    pub fn new(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidParameter("deletion set is empty".into()));
        }
        let mut labels = labels.to_vec();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!("repeated label in {labels:?}")));
        }
        Ok(Self { labels })
    }

    /// `{0, 1, …, L−1}`.
    pub fn crum(l: usize) -> Result<Self> {
        Self::new(&(0..l).collect::<Vec<_>>())
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.labels.binary_search(&n).is_ok()
    }

    pub fn is_crum(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &d)| i == d)
    }

    /// Smallest `m ≥ 0` with `∏(m − d_j) < 0`. Past `max(d)` every factor is
    /// positive, so `m ≤ max(d) + 1` suffices.
    pub fn violation(&self) -> Option<usize> {
        let top = *self.labels.last().expect("nonempty by construction");
        (0..=top + 1).find(|&m| {
            !self.contains(m) && self.labels.iter().filter(|&&d| m < d).count() % 2 == 1
        })
    }

    pub fn is_admissible(&self) -> bool {
        self.violation().is_none()
    }
}

pub fn krein_adler_admissible(dset: &DeletionSet) -> bool {
    dset.is_admissible()
}

fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![1.0; 1]];
    for j in 1..=n {
        let prev = &c[j - 1];
        let mut row = vec![1.0; j + 1];
        for i in 1..j {
            row[i] = prev[i - 1] + prev[i];
        }
        c.push(row);
    }
    c
}

/// `f^{(0..count)}` from `f'' = q f` given `f`, `f'` and `q^{(i)}`.
fn derivative_column(f: f64, df: f64, q: &[f64], count: usize, binom: &[Vec<f64>]) -> Vec<f64> {
    let mut d = vec![0.0; count.max(2)];
    d[0] = f;
    d[1] = df;
    for j in 0..count.saturating_sub(2) {
        d[j + 2] = (0..=j).map(|i| binom[j][i] * q[i] * d[j - i]).sum();
    }
    d.truncate(count);
    d
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .expect("nonempty");
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let factor = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= factor * a[c][k];
            }
        }
    }
    d
}

/// `W`, `W'`, `W''` at one point as `mantissa · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledWronskian {
    pub mant: [f64; 3],
    pub log_scale: f64,
}

impl ScaledWronskian {
    pub fn value(&self) -> f64 {
        self.mant[0] * self.log_scale.exp()
    }

    pub fn log_abs(&self) -> f64 {
        self.mant[0].abs().ln() + self.log_scale
    }

    /// Also true in the far tail once `N ≥ 3` states become too close to
    /// parallel for double precision.
    // TODO: build tail Wronskians from the asymptotic series of each W so
    // three or more deletions reach the full oracle box.
    pub fn is_zero(&self) -> bool {
        !(self.mant[0].abs() >= ZERO_TOL)
    }

    /// `(log|W|)'' = W''/W − (W'/W)²`.
    pub fn log_curvature(&self) -> f64 {
        let r1 = self.mant[1] / self.mant[0];
        self.mant[2] / self.mant[0] - r1 * r1
    }
}

/// Wronskian of `N` functions from their derivative columns, each holding
/// orders `0..=N+1`.
fn scaled_wronskian(columns: &[Vec<f64>]) -> ScaledWronskian {
    let n = columns.len();
    let mut log_scale = 0.0;
    let scaled: Vec<Vec<f64>> = columns
        .iter()
        .map(|col| {
            let s = col[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let s = if s > 0.0 && s.is_finite() { s } else { 1.0 };
            log_scale += s.ln();
            col.iter().map(|v| v / s).collect()
        })
        .collect();
    let minor = |rows: &[usize]| -> f64 {
        det(rows
            .iter()
            .map(|&r| scaled.iter().map(|col| col[r]).collect())
            .collect())
    };
    let base: Vec<usize> = (0..n).collect();
    let w0 = minor(&base);
    let mut rows1 = base.clone();
    rows1[n - 1] = n;
    let w1 = minor(&rows1);
    let mut rows2 = rows1.clone();
    rows2[n - 1] = n + 1;
    let mut w2 = minor(&rows2);
    if n >= 2 {
        let mut rows = rows1;
        rows[n - 2] = n - 1;
        w2 += minor(&rows);
    }
    ScaledWronskian {
        mant: [w0, w1, w2],
        log_scale,
    }
}

/// Wronskians in `x` of eigenstates at each of `xs`. At `x = 0` the
/// right-sided limit is taken.
pub fn state_wronskians(params: &PotentialParams, states: &[&Eigenstate], xs: &[f64]) -> Result<Vec<ScaledWronskian>> {
    let n = states.len();
    if n == 0 {
        return Err(Error::InvalidParameter("Wronskian of no functions".into()));
    }
    let evals = states
        .par_iter()
        .map(|s| s.eval_many(xs))
        .collect::<Result<Vec<_>>>()?;
    let binom = binomials(n + 2);
    xs.iter()
        .enumerate()
        .map(|(p, &x)| {
            let v_derivs = (0..n)
                .map(|i| symmetric_potential_derivative(params, i, x))
                .collect::<Result<Vec<_>>>()?;
            let columns: Vec<Vec<f64>> = states
                .iter()
                .zip(&evals)
                .map(|(s, e)| {
                    let mut q = v_derivs.clone();
                    q[0] -= s.level.energy;
                    derivative_column(e[p].0, e[p].1, &q, n + 2, &binom)
                })
                .collect();
            Ok(scaled_wronskian(&columns))
        })
        .collect()
}

/// Wronskians in `ρ` of `W_{k,order_j}(ρ)` at each of `rhos`, with higher
/// derivatives from the Whittaker equation `W'' = (1/4 − k/ρ − (1/4 − μ²)/ρ²) W`.
pub fn whittaker_wronskians(
    params: &PotentialParams,
    orders: &[OrderParam],
    rhos: &[f64],
    opts: &WhittakerOptions,
) -> Result<Vec<ScaledWronskian>> {
    let n = orders.len();
    if n == 0 {
        return Err(Error::InvalidParameter("Wronskian of no functions".into()));
    }
    let k = params.k;
    let evals = orders
        .par_iter()
        .map(|&o| whittaker_w_batch(k, o, rhos, opts))
        .collect::<Result<Vec<_>>>()?;
    let binom = binomials(n + 2);
    Ok(rhos
        .iter()
        .enumerate()
        .map(|(p, &rho)| {
            let columns: Vec<Vec<f64>> = orders
                .iter()
                .zip(&evals)
                .map(|(o, e)| {
                    let a = 0.25 - o.mu_squared();
                    let mut fact = 1.0;
                    let q: Vec<f64> = (0..n)
                        .map(|i| {
                            if i == 0 {
                                return 0.25 - k / rho - a / (rho * rho);
                            }
                            fact *= i as f64;
                            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                            // dⁱ/dρⁱ ρ^{-1} = (−1)^i i! ρ^{-1-i}, dⁱ/dρⁱ ρ^{-2} = (−1)^i (i+1)! ρ^{-2-i}
                            -sign * (k * fact * rho.powi(-1 - i as i32) + a * fact * (i as f64 + 1.0) * rho.powi(-2 - i as i32))
                        })
                        .collect();
                    derivative_column(e[p].value, e[p].derivative, &q, n + 2, &binom)
                })
                .collect();
            scaled_wronskian(&columns)
        })
        .collect())
}

/// `W[ψ_{a}, ψ_{b}, …](x)` of normalized eigenstates.
pub fn wronskian_matrix(params: &PotentialParams, states: &[&Eigenstate], x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::KinkPoint);
    }
    Ok(state_wronskians(params, states, &[x])?[0].value())
}

/// Exponent `N(N−2)/2` of `ρ` relating an `x`-Wronskian of `N` functions
/// `ρ^{−1/2} W_j(ρ)` to the `ρ`-Wronskian of the `W_j`.
pub fn reduction_exponent(n_functions: usize) -> f64 {
    let n = n_functions as f64;
    n * (n - 2.0) / 2.0
}

/// The `x`-Wronskian of the unnormalized `ρ^{−1/2} W_{k,order}(ρ)` for
/// `x > 0`, computed as `ρ^{N(N−2)/2} W[W_{k,order_1}, …](ρ)`.
pub fn whittaker_wronskian_reduction(params: &PotentialParams, levels: &[EigenLevel], x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::KinkPoint);
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("reduction is stated for x > 0, got {x}")));
    }
    let rho = params.rho(x);
    let orders: Vec<OrderParam> = levels.iter().map(|l| l.order).collect();
    let w = whittaker_wronskians(params, &orders, &[rho], &WhittakerOptions::default())?[0];
    Ok(w.mant[0] * (w.log_scale + reduction_exponent(levels.len()) * rho.ln()).exp())
}

/// A Krein–Adler (or Crum) deformation with its deleted eigenstates.
#[derive(Debug, Clone)]
pub struct Deformation {
    params: PotentialParams,
    dset: DeletionSet,
    deleted: Vec<Eigenstate>,
}

impl Deformation {
    /// `spectrum` must contain every deleted level.
    pub fn new(params: &PotentialParams, dset: DeletionSet, spectrum: &[EigenLevel]) -> Result<Self> {
        if let Some(m) = dset.violation() {
            return Err(Error::InadmissibleSet { m });
        }
        let deleted = dset
            .labels()
            .par_iter()
            .map(|&d| {
                let level = spectrum
                    .iter()
                    .find(|l| l.index == d)
                    .ok_or(Error::IndexOutOfSpectrum {
                        index: d,
                        available: spectrum.len(),
                    })?;
                Eigenstate::new(params, *level)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: *params,
            dset,
            deleted,
        })
    }

    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    pub fn dset(&self) -> &DeletionSet {
        &self.dset
    }

    pub fn deleted(&self) -> &[Eigenstate] {
        &self.deleted
    }

    /// Number of deleted levels.
    pub fn order(&self) -> usize {
        self.dset.len()
    }

    /// Effective `k` of the large-`|x|` form `ρ²/4 − (k − L)ρ`.
    pub fn asymptotic_k(&self) -> f64 {
        self.params.k - self.order() as f64
    }

    /// `∏_j (E − E_{d_j})`, the predicted ratio of deformed to original norm.
    pub fn norm_factor(&self, energy: f64) -> f64 {
        self.deleted.iter().map(|s| energy - s.level.energy).product()
    }

    /// Parity sign of the deformed partner of level `n`: `(−1)^{n+L}`.
    pub fn parity_sign(&self, n: usize) -> f64 {
        if (n + self.order()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    fn denominators(&self, xs: &[f64]) -> Result<Vec<ScaledWronskian>> {
        let refs: Vec<&Eigenstate> = self.deleted.iter().collect();
        let ws = state_wronskians(&self.params, &refs, xs)?;
        if let Some((_, &x)) = ws.iter().zip(xs).find(|(w, _)| w.is_zero()) {
            return Err(Error::WronskianZero { x });
        }
        Ok(ws)
    }

    /// `V − 2 (log|W|)''` with the curvature from five-point differences of
    /// `log|W|` at steps `δ` and `2δ`, `δ = min(h/4, 1e-3)`. Stencils that
    /// would cross the kink at the origin are replaced by one-sided ones.
    pub fn potential(&self, grid: Vec<f64>) -> Result<SampledFunction> {
        let h = if grid.len() > 1 { grid[1] - grid[0] } else { 4.0 * MAX_FD_STEP };
        let delta = (0.25 * h).min(MAX_FD_STEP);
        let stencil = |x: f64, step: f64| -> [f64; 5] {
            if x.abs() < 2.0 * step {
                let dir = if x < 0.0 { -1.0 } else { 1.0 };
                std::array::from_fn(|j| x + dir * j as f64 * step)
            } else {
                std::array::from_fn(|j| x + (j as f64 - 2.0) * step)
            }
        };
        let mut points = Vec::with_capacity(grid.len() * 10);
        for &x in &grid {
            points.extend(stencil(x, delta));
            points.extend(stencil(x, 2.0 * delta));
        }
        // points exactly at −0.0 are the left-sided limit, which equals the right one by parity
        let logs: Vec<f64> = self
            .denominators(&points)?
            .iter()
            .map(ScaledWronskian::log_abs)
            .collect();
        let curvature = |f: &[f64], x: f64, step: f64| -> f64 {
            if x.abs() < 2.0 * step {
                (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]) / (12.0 * step * step)
            } else {
                (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * step * step)
            }
        };
        let mut values = Vec::with_capacity(grid.len());
        for (i, &x) in grid.iter().enumerate() {
            let fine = curvature(&logs[10 * i..10 * i + 5], x, delta);
            let coarse = curvature(&logs[10 * i + 5..10 * i + 10], x, 2.0 * delta);
            let v = symmetric_potential(&self.params, x)? - 2.0 * fine;
            if (fine - coarse).abs() > FD_CONSISTENCY * v.abs().max(1.0) {
                return Err(Error::NonConvergence(format!(
                    "log-Wronskian curvature at x = {x} differs by {:e} between steps",
                    (fine - coarse).abs()
                )));
            }
            values.push(v);
        }
        let derivs = central_differences(&values, h);
        SampledFunction::new(grid, values, derivs)
    }

    /// `V − 2 [W''/W − (W'/W)²]` with `W'` and `W''` from the derivative
    /// recursion; no numerical differentiation.
    pub fn potential_analytic(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let ws = self.denominators(xs)?;
        xs.iter()
            .zip(ws)
            .map(|(&x, w)| Ok(symmetric_potential(&self.params, x)? - 2.0 * w.log_curvature()))
            .collect()
    }

    /// `(ψ_{𝒟;n}, ψ'_{𝒟;n})` at each of `xs`, for a level not in `𝒟`.
    pub fn eigenfunction_values(&self, state: &Eigenstate, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
        if self.dset.contains(state.level.index) {
            return Err(Error::InvalidParameter(format!(
                "level {} is deleted by {:?}",
                state.level.index,
                self.dset.labels()
            )));
        }
        let den = self.denominators(xs)?;
        let mut refs: Vec<&Eigenstate> = self.deleted.iter().collect();
        refs.push(state);
        let num = state_wronskians(&self.params, &refs, xs)?;
        Ok(num
            .iter()
            .zip(&den)
            .map(|(n, d)| {
                let scale = (n.log_scale - d.log_scale).exp();
                let value = scale * n.mant[0] / d.mant[0];
                let slope = scale * (n.mant[1] * d.mant[0] - n.mant[0] * d.mant[1]) / (d.mant[0] * d.mant[0]);
                (value, slope)
            })
            .collect())
    }

    pub fn eigenfunction(&self, state: &Eigenstate, grid: Vec<f64>) -> Result<SampledFunction> {
        let pairs = self.eigenfunction_values(state, &grid)?;
        let (values, derivs) = pairs.into_iter().unzip();
        SampledFunction::new(grid, values, derivs)
    }

    /// `∫ψ_{𝒟;n}² dx` over the line, from the half line and parity.
    pub fn norm_squared(&self, state: &Eigenstate) -> Result<f64> {
        let e_max = self
            .deleted
            .iter()
            .map(|s| s.level.energy)
            .fold(state.level.energy, f64::max);
        let (xs, ws) = half_line_nodes(&self.params, e_max, 2.0 * self.order() as f64 + 2.0);
        let vals = self.eigenfunction_values(state, &xs)?;
        Ok(2.0 * vals.iter().zip(&ws).map(|((v, _), w)| w * v * v).sum::<f64>())
    }
}

fn central_differences(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    if n < 3 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h)
            } else {
                (values[i + 1] - values[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

pub fn krein_adler_deform(params: &PotentialParams, dset: DeletionSet, spectrum: &[EigenLevel]) -> Result<Deformation> {
    Deformation::new(params, dset, spectrum)
}

/// `V^{[L]}` sampled on `grid`.
pub fn crum_potential(params: &PotentialParams, l: usize, spectrum: &[EigenLevel], grid: Vec<f64>) -> Result<SampledFunction> {
    Deformation::new(params, DeletionSet::crum(l)?, spectrum)?.potential(grid)
}

/// `ψ_n^{[L]}` sampled on `grid`, for `n ≥ L`.
pub fn crum_eigenfunction(
    params: &PotentialParams,
    l: usize,
    n: usize,
    spectrum: &[EigenLevel],
    grid: Vec<f64>,
) -> Result<SampledFunction> {
    if n < l {
        return Err(Error::InvalidParameter(format!("level {n} is deleted by the order-{l} Crum transformation")));
    }
    let level = spectrum.get(n).ok_or(Error::IndexOutOfSpectrum {
        index: n,
        available: spectrum.len(),
    })?;
    let deformation = Deformation::new(params, DeletionSet::crum(l)?, spectrum)?;
    deformation.eigenfunction(&Eigenstate::new(params, *level)?, grid)
}
