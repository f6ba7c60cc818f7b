//! Whittaker `W_{k,μ}(x)` for real argument and real or purely imaginary
//! order, plus the modified Bessel function `K_{iν}(x)` used as an oracle.
//!
//! `W` is evaluated by integrating the Whittaker equation inward from a far
//! point `x_far`, seeded by the large-argument asymptotic series. The
//! integration runs on the slowly varying factor
//!
//! ```text
//! W_{k,μ}(x) = e^{-x/2} x^k u(x),   u'' + (2k/x - 1) u' + c/x² u = 0,
//! c = (k - 1/2)² - μ²
//! ```
//!
//! so the exponential decay never has to be represented inside the
//! integrator and `u → 1` at large `x`. Only `μ²` enters the equation, which
//! makes imaginary order (`μ² = -ν²`) no different from real order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::quadrature::{self, Rule};

/// Seed accuracy demanded of the asymptotic series.
pub const SEED_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderKind {
    /// Real order `μ`; negative energy `E = -μ²`.
    Real,
    /// Imaginary order `iν`; positive energy `E = ν²`.
    Imaginary,
}

/// The second Whittaker index. `value` is the nonnegative representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderParam {
    pub kind: OrderKind,
    pub value: f64,
}

impl OrderParam {
    pub fn real(mu: f64) -> Self {
        Self {
            kind: OrderKind::Real,
            value: mu.abs(),
        }
    }

    pub fn imaginary(nu: f64) -> Self {
        Self {
            kind: OrderKind::Imaginary,
            value: nu.abs(),
        }
    }

    /// Order associated with a Schrödinger energy: `E > 0` gives `iν`,
    /// `E <= 0` gives real `μ`.
    pub fn from_energy(energy: f64) -> Self {
        if energy > 0.0 {
            Self::imaginary(energy.sqrt())
        } else {
            Self::real((-energy).sqrt())
        }
    }

    pub fn energy(&self) -> f64 {
        match self.kind {
            OrderKind::Real => -self.value * self.value,
            OrderKind::Imaginary => self.value * self.value,
        }
    }

    /// Signed `μ²` as it appears in the Whittaker equation.
    pub fn mu_squared(&self) -> f64 {
        -self.energy()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WhittakerOptions {
    /// Relative local error target of the inward integration.
    pub ode_tol: f64,
    pub seed_tol: f64,
    pub max_seed_terms: usize,
    /// Largest admissible argument.
    pub x_guard: f64,
    pub x_far_min: f64,
    pub x_far_step: f64,
    pub x_far_max: f64,
}

impl Default for WhittakerOptions {
    fn default() -> Self {
        Self {
            ode_tol: 1e-11,
            seed_tol: SEED_TOL,
            max_seed_terms: 400,
            x_guard: 700.0,
            x_far_min: 40.0,
            x_far_step: 20.0,
            x_far_max: 20_000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerEval {
    pub value: f64,
    /// `dW/dx` at the evaluation point.
    pub derivative: f64,
    /// Largest accepted local error along the path, relative to the state.
    pub ode_residual: f64,
}

/// Truncated asymptotic estimate of `W` and `W'` at a far point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedEstimate {
    pub value: f64,
    pub derivative: f64,
    /// Magnitude of the first omitted term relative to the retained sum.
    pub truncation_error: f64,
    pub terms: usize,
}

/// Series for the scaled factor `u` and `u'`.
#[derive(Debug, Clone, Copy)]
struct ScaledSeries {
    u: f64,
    du: f64,
    rel_err: f64,
    terms: usize,
}

/// Sums `u(x) = Σ a_s x^{-s}` with
/// `a_{s+1} = -a_s ((s + 1/2 - k)² - μ²)/(s + 1)`, stopping once the next
/// term falls below `tol` or the terms start to grow.
fn scaled_series(k: f64, mu2: f64, x: f64, max_terms: usize, tol: f64) -> Result<ScaledSeries> {
    let mut term: f64 = 1.0;
    let mut u = 1.0;
    let mut du = 0.0;
    let mut terms = 1;
    for s in 0..max_terms {
        let sf = s as f64;
        let next = -term * ((sf + 0.5 - k).powi(2) - mu2) / ((sf + 1.0) * x);
        if next == 0.0 {
            return Ok(ScaledSeries {
                u,
                du,
                rel_err: 0.0,
                terms,
            });
        }
        // derivative terms carry an extra factor (s+1)/x
        let weight = (sf + 2.0) * next.abs();
        if weight <= tol * u.abs() {
            u += next;
            du -= (sf + 1.0) * next / x;
            return Ok(ScaledSeries {
                u,
                du,
                rel_err: weight / u.abs(),
                terms: terms + 1,
            });
        }
        if s > 0 && next.abs() > term.abs() {
            return Err(Error::SeedFailure(format!(
                "series diverges after {terms} terms at x = {x} (smallest term {:e})",
                term.abs()
            )));
        }
        u += next;
        du -= (sf + 1.0) * next / x;
        term = next;
        terms += 1;
    }
    Ok(ScaledSeries {
        u,
        du,
        rel_err: (max_terms as f64 + 1.0) * term.abs() / u.abs(),
        terms,
    })
}

fn prefactor(k: f64, x: f64) -> f64 {
    (-0.5 * x + k * x.ln()).exp()
}

/// Truncated large-argument expansion of `W_{k,μ}` and its derivative.
///
/// At most `n_terms` terms are retained. The returned `truncation_error`
/// tells the caller whether `x_far` must be enlarged.
pub fn asymptotic_seed(k: f64, order: OrderParam, x_far: f64, n_terms: usize) -> Result<SeedEstimate> {
    if !(x_far > 0.0) {
        return Err(Error::Domain(format!("seed point x_far = {x_far} must be positive")));
    }
    let s = scaled_series(k, order.mu_squared(), x_far, n_terms.saturating_sub(1), SEED_TOL)?;
    let pre = prefactor(k, x_far);
    Ok(SeedEstimate {
        value: pre * s.u,
        derivative: pre * (s.du + (k / x_far - 0.5) * s.u),
        truncation_error: s.rel_err,
        terms: s.terms,
    })
}

fn initial_x_far(k: f64, mu2: f64, x_top: f64, opts: &WhittakerOptions) -> f64 {
    let turning = 2.0 * (k + (k * k + mu2.abs()).sqrt());
    (2.0 * x_top).max(turning).max(opts.x_far_min)
}

/// Finds the smallest admissible seed point on the `x_far_step` ladder.
fn seed_ladder(k: f64, mu2: f64, start: f64, opts: &WhittakerOptions) -> Result<(f64, ScaledSeries)> {
    let mut x_far = start;
    let mut last = String::new();
    while x_far <= opts.x_far_max {
        match scaled_series(k, mu2, x_far, opts.max_seed_terms, opts.seed_tol) {
            Ok(s) if s.rel_err <= opts.seed_tol => return Ok((x_far, s)),
            Ok(s) => last = format!("truncation error {:e} at x_far = {x_far}", s.rel_err),
            Err(e) => last = e.to_string(),
        }
        x_far += opts.x_far_step;
    }
    Err(Error::SeedFailure(format!(
        "no seed point up to {} meets {:e}: {last}",
        opts.x_far_max, opts.seed_tol
    )))
}

/// Integrates inward from `x_far` through the descending list `xs_desc`.
fn integrate_inward(
    k: f64,
    mu2: f64,
    x_far: f64,
    seed: ScaledSeries,
    xs_desc: &[f64],
    opts: &WhittakerOptions,
) -> Result<Vec<WhittakerEval>> {
    let c = (k - 0.5).powi(2) - mu2;
    let rhs = |x: f64, y: &[f64; 2]| [y[1], (1.0 - 2.0 * k / x) * y[1] - c / (x * x) * y[0]];
    let ode_opts = OdeOptions {
        rtol: opts.ode_tol,
        h_init: 0.5,
        h_max: 2.0,
        ..Default::default()
    };
    let (states, stats) = ode::integrate(rhs, x_far, [seed.u, seed.du], xs_desc, &ode_opts)?;
    if stats.max_rel_local_error > opts.ode_tol {
        return Err(Error::NonConvergence(format!(
            "local error {:e} exceeds {:e}",
            stats.max_rel_local_error, opts.ode_tol
        )));
    }
    Ok(xs_desc
        .iter()
        .zip(states)
        .map(|(&x, [u, du])| {
            let pre = prefactor(k, x);
            WhittakerEval {
                value: pre * u,
                derivative: pre * (du + (k / x - 0.5) * u),
                ode_residual: stats.max_rel_local_error,
            }
        })
        .collect())
}

fn check_argument(x: f64, opts: &WhittakerOptions) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Whittaker argument x = {x} must be positive")));
    }
    if x > opts.x_guard {
        return Err(Error::Domain(format!(
            "Whittaker argument x = {x} beyond overflow guard {}",
            opts.x_guard
        )));
    }
    Ok(())
}

/// `W_{k,μ}(x)` and `dW/dx` with default options.
pub fn whittaker_w(k: f64, order: OrderParam, x: f64) -> Result<WhittakerEval> {
    whittaker_w_with(k, order, x, &WhittakerOptions::default())
}

pub fn whittaker_w_with(k: f64, order: OrderParam, x: f64, opts: &WhittakerOptions) -> Result<WhittakerEval> {
    Ok(whittaker_w_batch(k, order, &[x], opts)?[0])
}

/// Evaluates `W_{k,μ}` at many arguments with a single inward sweep.
/// Results are returned in the order of `xs`.
pub fn whittaker_w_batch(
    k: f64,
    order: OrderParam,
    xs: &[f64],
    opts: &WhittakerOptions,
) -> Result<Vec<WhittakerEval>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    for &x in xs {
        check_argument(x, opts)?;
    }
    let mu2 = order.mu_squared();
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[b].total_cmp(&xs[a]));
    let desc: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let (x_far, seed) = seed_ladder(k, mu2, initial_x_far(k, mu2, desc[0], opts), opts)?;
    let evals = integrate_inward(k, mu2, x_far, seed, &desc, opts)?;
    let mut out = vec![evals[0]; xs.len()];
    for (e, &i) in evals.into_iter().zip(&idx) {
        out[i] = e;
    }
    Ok(out)
}

/// Evaluates `W_{k,μ}(x)` from a caller-chosen seed point, for checking that
/// results do not depend on where the inward integration starts.
pub fn whittaker_w_from_seed(
    k: f64,
    order: OrderParam,
    x: f64,
    x_far: f64,
    opts: &WhittakerOptions,
) -> Result<WhittakerEval> {
    check_argument(x, opts)?;
    if x_far <= x {
        return Err(Error::Domain(format!("seed point {x_far} must exceed x = {x}")));
    }
    let mu2 = order.mu_squared();
    let seed = scaled_series(k, mu2, x_far, opts.max_seed_terms, opts.seed_tol)?;
    if seed.rel_err > opts.seed_tol {
        return Err(Error::SeedFailure(format!(
            "truncation error {:e} at x_far = {x_far}",
            seed.rel_err
        )));
    }
    Ok(integrate_inward(k, mu2, x_far, seed, &[x], opts)?[0])
}

/// Default quadrature tolerance of the Bessel oracle.
pub const BESSEL_TOL: f64 = 1e-12;

/// `K_{iν}(x) = ∫₀^∞ e^{-x cosh t} cos(νt) dt`.
pub fn bessel_k_imag_order(nu: f64, x: f64) -> Result<f64> {
    bessel_k_imag_order_tol(nu, x, BESSEL_TOL)
}

pub fn bessel_k_imag_order_tol(nu: f64, x: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Bessel argument x = {x} must be positive")));
    }
    // beyond t_max the integrand is below e^{-60} of its value at t = 0
    let t_max = (1.0 + 60.0 / x).acosh();
    let nu = nu.abs();
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cos();
    cosh_integral(f, t_max, nu, tol).map(|v| v * (-x).exp())
}

/// `K_α(x) = ∫₀^∞ e^{-x cosh t} cosh(αt) dt` for real order; used to validate
/// the quadrature against closed forms such as `K_{1/2}`.
pub fn bessel_k_real_order(alpha: f64, x: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Bessel argument x = {x} must be positive")));
    }
    let alpha = alpha.abs();
    let exponent = |t: f64| -x * (t.cosh() - 1.0) + alpha * t;
    let t_peak = (alpha / x).asinh();
    let peak = exponent(t_peak);
    let mut t_max = t_peak + 1.0;
    while exponent(t_max) > peak - 60.0 {
        t_max += 0.25;
    }
    let f = |t: f64| (exponent(t) - peak).exp() * 0.5 * (1.0 + (-2.0 * alpha * t).exp());
    cosh_integral(f, t_max, 0.0, tol).map(|v| v * (peak - x).exp())
}

/// Two-pass integration on `[0, t_max]`: a fine composite rule fixes the
/// magnitude, then adaptive refinement runs to `tol` relative to it.
fn cosh_integral<F: Fn(f64) -> f64>(f: F, t_max: f64, freq: f64, tol: f64) -> Result<f64> {
    let panels = ((t_max * freq.max(1.0) / std::f64::consts::PI).ceil() as usize * 4).max(32);
    let rule = Rule::new(20);
    let (ts, ws) = rule.composite(&quadrature::uniform_edges(0.0, t_max, panels));
    let coarse: f64 = ts.iter().zip(&ws).map(|(t, w)| w * f(*t)).sum();
    let magnitude: f64 = ts.iter().zip(&ws).map(|(t, w)| w * f(*t).abs()).sum();
    // cancellation in the oscillatory integrand bounds the attainable accuracy
    let abs_tol = (tol * coarse.abs()).max(4.0 * f64::EPSILON * magnitude);
    let fine = quadrature::adaptive(&f, 0.0, t_max, abs_tol, 40)?;
    if (fine - coarse).abs() > 1e3 * abs_tol.max(1e-15 * coarse.abs()) {
        return Err(Error::QuadratureFailure(format!(
            "composite {coarse:e} and adaptive {fine:e} estimates disagree"
        )));
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_form_terminating_series() {
        // k = μ + 1/2 with μ = 1/2
        let w = whittaker_w(1.0, OrderParam::real(0.5), 2.0).unwrap();
        assert!(rel(w.value, 0.735_758_882_342_884_6) < 1e-12, "{}", w.value);
        // W_{0,1/2}(x) = e^{-x/2}
        let w = whittaker_w(0.0, OrderParam::real(0.5), 2.0).unwrap();
        assert!(rel(w.value, 0.367_879_441_171_442_3) < 1e-12);
        assert!(rel(w.derivative, -0.5 * 0.367_879_441_171_442_3) < 1e-12);
    }

    #[test]
    fn seed_leading_term_and_exact_termination() {
        let s = asymptotic_seed(0.0, OrderParam::imaginary(1.0), 400.0, 1).unwrap();
        assert!(rel(s.value, (-200.0f64).exp()) < 1e-15);
        let s = asymptotic_seed(1.0, OrderParam::real(0.5), 40.0, 5).unwrap();
        assert!(rel(s.value, (-20.0f64).exp() * 40.0) < 1e-12);
        assert_eq!(s.truncation_error, 0.0);
    }

    #[test]
    fn seed_reports_divergent_tail() {
        // ν² / x ≫ 1: the terms grow before reaching the target accuracy
        let r = asymptotic_seed(0.0, OrderParam::imaginary(30.0), 5.0, 400);
        assert!(matches!(r, Err(Error::SeedFailure(_))), "{r:?}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(whittaker_w(0.0, OrderParam::imaginary(1.0), 0.0).is_err());
        assert!(whittaker_w(0.0, OrderParam::imaginary(1.0), -1.0).is_err());
        assert!(whittaker_w(0.0, OrderParam::imaginary(1.0), 701.0).is_err());
    }

    #[test]
    fn bessel_half_order_closed_form() {
        let v = bessel_k_real_order(0.5, 2.0, 1e-13).unwrap();
        let exact = (PI / 4.0).sqrt() * (-2.0f64).exp();
        assert!(rel(v, exact) < 1e-11, "{v} vs {exact}");
        assert!(rel(v, 0.119_937_771_968_061_3) < 1e-9);
    }

    #[test]
    fn bessel_k0_at_one() {
        let a = bessel_k_imag_order_tol(0.0, 1.0, 1e-10).unwrap();
        let b = bessel_k_imag_order_tol(0.0, 1.0, 1e-13).unwrap();
        assert!((a - b).abs() < 1e-10);
        assert!(rel(b, 0.421_024_438_240_708_3) < 1e-12, "{b}");
    }

    #[test]
    fn bessel_imaginary_order_self_consistent() {
        let a = bessel_k_imag_order_tol(5.0, 1.0, 1e-10).unwrap();
        let b = bessel_k_imag_order_tol(5.0, 1.0, 1e-12).unwrap();
        assert!((a - b).abs() < 1e-9);
    }
}
