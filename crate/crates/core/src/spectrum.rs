//! Bound states of the symmetric potential `V(x) = ρ²/4 − kρ`, `ρ = 2g e^{|x|}`.
//!
//! On `x > 0` the eigenfunctions are `ψ = ρ^{-1/2} W_{k,μ}(ρ)`, which decay at
//! infinity by construction. Parity is imposed at the origin: `ψ'(0) = 0`
//! becomes `−W(ρ₀) + 2ρ₀ W'(ρ₀) = 0`, `ψ(0) = 0` becomes `W(ρ₀) = 0`, with
//! `ρ₀ = 2g` and `W'` the derivative in `ρ`. Roots are bracketed on a grid in
//! the order parameter (`ν` for `E > 0`, `μ` for `E < 0`) and bisected.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::wkb;
use crate::error::{Error, Result};
use crate::morse_ref::{PotentialParams, X_OVERFLOW};
use crate::quadrature::{self, Rule};
use crate::sampled::SampledFunction;
use crate::special_fn::{whittaker_w_batch, whittaker_w_with, OrderKind, OrderParam, WhittakerOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_index(m: usize) -> Self {
        if m.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `ψ(−x) = sign · ψ(x)`.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenLevel {
    pub index: usize,
    pub parity: Parity,
    pub order: OrderParam,
    pub energy: f64,
    /// Matching residual at the converged order, relative to
    /// `|W(ρ₀)| + 2ρ₀|W'(ρ₀)|`.
    pub residual: f64,
}

/// Coefficients of the divergent partner solution in the even and odd
/// combinations at `ρ₀`; their vanishing quantizes the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingCoefficients {
    /// `−W(ρ₀) + 2ρ₀ W'(ρ₀)`, the even-parity residual.
    pub b: f64,
    /// `W(ρ₀)`, the odd-parity residual.
    pub d: f64,
}

impl MatchingCoefficients {
    pub fn residual(&self, parity: Parity) -> f64 {
        match parity {
            Parity::Even => self.b,
            Parity::Odd => self.d,
        }
    }

    fn scale(&self) -> f64 {
        // |W| + 2ρ₀|W'| recovered from b and d
        let two_rho_dw = self.b + self.d;
        self.d.abs() + two_rho_dw.abs()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Bisection stops once the bracket is narrower than this in `E`.
    pub root_tol: f64,
    /// Largest scan step in the order parameter.
    pub max_step: f64,
    /// Half-width of the band around `E = 0` skipped by the order-parameter
    /// scans; roots inside it are found by a separate sign test.
    pub zero_band: f64,
    /// WKB safety margin, in levels, above the highest requested level.
    pub extra_levels: usize,
    pub max_extensions: usize,
    pub whittaker: WhittakerOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            root_tol: 1e-10,
            max_step: 0.25,
            zero_band: 1e-6,
            extra_levels: 3,
            max_extensions: 3,
            whittaker: WhittakerOptions::default(),
        }
    }
}

/// `ρ²/4 − kρ` with `ρ = 2g e^{|x|}`.
pub fn symmetric_potential(params: &PotentialParams, x: f64) -> Result<f64> {
    if !(x.abs() <= X_OVERFLOW) {
        return Err(Error::Domain(format!("|x| = {} beyond overflow guard {X_OVERFLOW}", x.abs())));
    }
    let rho = params.rho(x);
    Ok(0.25 * rho * rho - params.k * rho)
}

/// `d^i V/dx^i`. At `x = 0` the right-sided derivative is returned; on
/// `x < 0` odd derivatives change sign.
pub fn symmetric_potential_derivative(params: &PotentialParams, order: usize, x: f64) -> Result<f64> {
    if order == 0 {
        return symmetric_potential(params, x);
    }
    if !(x.abs() <= X_OVERFLOW) {
        return Err(Error::Domain(format!("|x| = {} beyond overflow guard {X_OVERFLOW}", x.abs())));
    }
    let rho = params.rho(x);
    // d/dx ρ = ρ on the right half, so ρ² picks up 2^i
    let right = 0.25 * 2f64.powi(order as i32) * rho * rho - params.k * rho;
    Ok(if x < 0.0 && order % 2 == 1 { -right } else { right })
}

/// `V(0) = g(g − 2k)`.
pub fn potential_at_origin(params: &PotentialParams) -> f64 {
    params.g * (params.g - 2.0 * params.k)
}

/// Minimum of `V` over the line: `−k²` when the well bottom `ρ = 2k` lies
/// beyond `ρ₀`, otherwise `V(0)`.
pub fn potential_minimum(params: &PotentialParams) -> f64 {
    if params.k >= params.g {
        -params.k * params.k
    } else {
        potential_at_origin(params)
    }
}

pub fn matching_coefficients(
    params: &PotentialParams,
    order: OrderParam,
    opts: &WhittakerOptions,
) -> Result<MatchingCoefficients> {
    let rho0 = params.rho0();
    let w = whittaker_w_with(params.k, order, rho0, opts)?;
    Ok(MatchingCoefficients {
        b: -w.value + 2.0 * rho0 * w.derivative,
        d: w.value,
    })
}

/// Raw matching residual at energy `E`: `B` for even, `D` for odd parity.
pub fn matching_residual(params: &PotentialParams, parity: Parity, energy: f64) -> Result<f64> {
    if energy == 0.0 || !energy.is_finite() {
        return Err(Error::Domain(format!("matching residual undefined at E = {energy}")));
    }
    let c = matching_coefficients(params, OrderParam::from_energy(energy), &WhittakerOptions::default())?;
    Ok(c.residual(parity))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub parity: Parity,
    pub order: OrderParam,
    pub energy: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Sorted by ascending energy.
    pub roots: Vec<Root>,
    /// Set when the WKB level spacing at the top of the window is below
    /// twice the scan step, so that neighbouring roots could share a bracket.
    pub step_too_coarse: bool,
}

fn order_of(kind: OrderKind, t: f64) -> OrderParam {
    match kind {
        OrderKind::Real => OrderParam::real(t),
        OrderKind::Imaginary => OrderParam::imaginary(t),
    }
}

/// Scans `t ∈ [t_lo, t_hi]` in the order parameter and returns the roots
/// for every requested parity. One Whittaker evaluation serves all parities.
fn scan_order(
    params: &PotentialParams,
    parities: &[Parity],
    kind: OrderKind,
    t_lo: f64,
    t_hi: f64,
    step: f64,
    opts: &SpectrumOptions,
) -> Result<Vec<Root>> {
    let n = (((t_hi - t_lo) / step).ceil() as usize).max(1);
    let ts: Vec<f64> = (0..=n).map(|i| t_lo + (t_hi - t_lo) * i as f64 / n as f64).collect();
    let coeffs = ts
        .par_iter()
        .map(|&t| matching_coefficients(params, order_of(kind, t), &opts.whittaker))
        .collect::<Result<Vec<_>>>()?;
    let mut brackets = Vec::new();
    for &parity in parities {
        for i in 0..n {
            let a = coeffs[i].residual(parity);
            let b = coeffs[i + 1].residual(parity);
            if a == 0.0 {
                brackets.push((parity, ts[i], ts[i]));
            } else if a.signum() != b.signum() && b != 0.0 {
                brackets.push((parity, ts[i], ts[i + 1]));
            }
        }
        if coeffs[n].residual(parity) == 0.0 {
            brackets.push((parity, ts[n], ts[n]));
        }
    }
    let mut roots = brackets
        .into_par_iter()
        .map(|(parity, a, b)| bisect(params, parity, |t| order_of(kind, t), a, b, opts))
        .collect::<Result<Vec<_>>>()?;
    roots.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(roots)
}

fn bisect<M: Fn(f64) -> OrderParam>(
    params: &PotentialParams,
    parity: Parity,
    order_at: M,
    mut lo: f64,
    mut hi: f64,
    opts: &SpectrumOptions,
) -> Result<Root> {
    let f = |t: f64| -> Result<MatchingCoefficients> {
        matching_coefficients(params, order_at(t), &opts.whittaker)
    };
    let mut f_lo = f(lo)?.residual(parity);
    for _ in 0..200 {
        if (order_at(hi).energy() - order_at(lo).energy()).abs() < opts.root_tol || f_lo == 0.0 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?.residual(parity);
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let t = if f_lo == 0.0 { lo } else { 0.5 * (lo + hi) };
    let order = order_at(t);
    let c = f(t)?;
    Ok(Root {
        parity,
        order,
        energy: order.energy(),
        residual: c.residual(parity) / c.scale(),
    })
}

/// Order for the signed variable `s` with `E = s|s|`; continuous through
/// `E = 0` because only `μ²` enters the Whittaker equation.
fn signed_order(s: f64) -> OrderParam {
    if s > 0.0 {
        OrderParam::imaginary(s)
    } else {
        OrderParam::real(-s)
    }
}

/// Roots inside the band `|E| < zero_band` that the order-parameter scans
/// exclude, found by a sign change across the band and bisection in `s`.
fn threshold_roots(params: &PotentialParams, opts: &SpectrumOptions) -> Result<Vec<Root>> {
    let delta = opts.zero_band.sqrt();
    let below = matching_coefficients(params, signed_order(-delta), &opts.whittaker)?;
    let above = matching_coefficients(params, signed_order(delta), &opts.whittaker)?;
    let mut roots = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        if below.residual(parity).signum() != above.residual(parity).signum() {
            roots.push(bisect(params, parity, signed_order, -delta, delta, opts)?);
        }
    }
    roots.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(roots)
}

fn step_for(params: &PotentialParams, kind: OrderKind, t_probe: &[f64], opts: &SpectrumOptions) -> (f64, f64) {
    let sign = match kind {
        OrderKind::Real => -1.0,
        OrderKind::Imaginary => 1.0,
    };
    let spacing = t_probe
        .iter()
        .filter_map(|&t| wkb::wkb_spacing(params, t, sign).ok())
        .filter(|s| s.is_finite() && *s > 0.0)
        .fold(f64::INFINITY, f64::min);
    (opts.max_step.min(0.5 * spacing), spacing)
}

/// All roots of one parity condition with energy in `[e_lo, e_hi]`.
///
/// `step` is measured in the order parameter (`√|E|`), where roots are
/// close to evenly spaced; bisection runs until `|ΔE| < tol`.
pub fn scan_roots(
    params: &PotentialParams,
    parity: Parity,
    e_lo: f64,
    e_hi: f64,
    step: f64,
    tol: f64,
) -> Result<ScanResult> {
    if !(e_lo < e_hi) || e_lo * e_hi <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "scan window [{e_lo}, {e_hi}] must be nonempty and avoid E = 0"
        )));
    }
    if !(step > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParameter("step and tol must be positive".into()));
    }
    let opts = SpectrumOptions {
        root_tol: tol,
        ..Default::default()
    };
    let (kind, t_lo, t_hi, sign) = if e_lo > 0.0 {
        (OrderKind::Imaginary, e_lo.sqrt(), e_hi.sqrt(), 1.0)
    } else {
        (OrderKind::Real, (-e_hi).sqrt(), (-e_lo).sqrt(), -1.0)
    };
    let roots = scan_order(params, &[parity], kind, t_lo, t_hi, step, &opts)?;
    let step_too_coarse = wkb::wkb_spacing(params, t_hi, sign).is_ok_and(|s| s < 2.0 * step);
    Ok(ScanResult { roots, step_too_coarse })
}

/// Negative-energy roots of both parities, ascending in energy.
fn negative_roots(params: &PotentialParams, opts: &SpectrumOptions) -> Result<Vec<Root>> {
    let v_min = potential_minimum(params);
    let mu_lo = opts.zero_band.sqrt();
    if v_min >= -opts.zero_band {
        return Ok(Vec::new());
    }
    let mu_hi = (-v_min).sqrt();
    let probes: Vec<f64> = (0..=16).map(|i| mu_lo + (mu_hi - mu_lo) * i as f64 / 16.0).collect();
    let (step, _) = step_for(params, OrderKind::Real, &probes, opts);
    scan_order(
        params,
        &[Parity::Even, Parity::Odd],
        OrderKind::Real,
        mu_lo,
        mu_hi,
        step,
        opts,
    )
}

fn positive_window_top(params: &PotentialParams, level: usize) -> f64 {
    wkb::wkb_invert(params, level).unwrap_or(2.0)
}

/// Positive-energy roots of both parities, ascending, scanning `ν` up to the
/// WKB position of level `top_level` plus the safety margin and extending
/// the window until `enough` holds.
fn positive_roots<F: Fn(&[Root]) -> bool>(
    params: &PotentialParams,
    top_level: usize,
    opts: &SpectrumOptions,
    enough: F,
) -> Result<Vec<Root>> {
    let nu_lo = opts.zero_band.sqrt();
    let mut top = top_level + opts.extra_levels;
    let mut nu_hi = positive_window_top(params, top).max(nu_lo * 2.0);
    let (step, _) = step_for(params, OrderKind::Imaginary, &[nu_hi], opts);
    let both = [Parity::Even, Parity::Odd];
    let mut positive = scan_order(params, &both, OrderKind::Imaginary, nu_lo, nu_hi, step, opts)?;
    let mut extensions = 0;
    while !enough(&positive) {
        if extensions == opts.max_extensions {
            return Err(Error::IncompleteSpectrum {
                found: positive.len(),
                requested: top_level + 1,
            });
        }
        extensions += 1;
        top += opts.extra_levels.max(1) * 2;
        let next = positive_window_top(params, top).max(1.5 * nu_hi);
        let (step, _) = step_for(params, OrderKind::Imaginary, &[next], opts);
        // the shared endpoint is scanned twice; a root sitting exactly on it
        // is deduplicated below
        positive.extend(scan_order(params, &both, OrderKind::Imaginary, nu_hi, next, step, opts)?);
        positive.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        positive.dedup_by(|a, b| a.parity == b.parity && (a.energy - b.energy).abs() <= opts.root_tol);
        nu_hi = next;
    }
    Ok(positive)
}

/// Zeros of the even and odd matching conditions on the imaginary order
/// axis, at least `count` of each, ascending in `ν`. A zero inside the
/// threshold band is reported at `ν = 0`.
pub fn imaginary_axis_roots(
    params: &PotentialParams,
    count: usize,
    opts: &SpectrumOptions,
) -> Result<(Vec<Root>, Vec<Root>)> {
    let mut roots: Vec<Root> = threshold_roots(params, opts)?
        .into_iter()
        .map(|r| {
            let order = OrderParam::imaginary(0.0);
            Root { order, energy: 0.0, ..r }
        })
        .collect();
    let negatives = negative_roots(params, opts)?.len();
    let have = roots.clone();
    let per_parity = |rs: &[Root], p: Parity| have.iter().chain(rs).filter(|r| r.parity == p).count();
    roots.extend(positive_roots(params, negatives + 2 * count, opts, |rs| {
        per_parity(rs, Parity::Even) >= count && per_parity(rs, Parity::Odd) >= count
    })?);
    let pick = |p: Parity| -> Vec<Root> { roots.iter().filter(|r| r.parity == p).take(count).copied().collect() };
    Ok((pick(Parity::Even), pick(Parity::Odd)))
}

/// The lowest `n_levels` bound states, ascending in energy. Negative levels
/// (present only for `k > 0`) precede positive ones; parity must alternate.
pub fn compute_spectrum(params: &PotentialParams, n_levels: usize) -> Result<Vec<EigenLevel>> {
    compute_spectrum_with(params, n_levels, &SpectrumOptions::default())
}

pub fn compute_spectrum_with(
    params: &PotentialParams,
    n_levels: usize,
    opts: &SpectrumOptions,
) -> Result<Vec<EigenLevel>> {
    if n_levels == 0 {
        return Err(Error::InvalidParameter("n_levels must be at least 1".into()));
    }
    let mut roots = negative_roots(params, opts)?;
    if potential_minimum(params) < 0.0 {
        roots.extend(threshold_roots(params, opts)?);
    }
    if roots.len() < n_levels {
        let below = roots.len();
        let positive = positive_roots(params, n_levels - 1, opts, |r| below + r.len() >= n_levels)
            .map_err(|e| match e {
                Error::IncompleteSpectrum { found, .. } => Error::IncompleteSpectrum {
                    found: below + found,
                    requested: n_levels,
                },
                other => other,
            })?;
        roots.extend(positive);
    }
    roots.truncate(n_levels);
    roots
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            if r.parity != Parity::of_index(index) {
                return Err(Error::ParityAlternation { index });
            }
            Ok(EigenLevel {
                index,
                parity: r.parity,
                order: r.order,
                energy: r.energy,
                residual: r.residual,
            })
        })
        .collect()
}

/// Energy of the innermost significant contribution: `W² ρ^{p−2} e^{…}`
/// integrands are negligible past the returned `ρ`.
pub(crate) fn tail_cutoff(params: &PotentialParams, e_max: f64, extra_power: f64) -> f64 {
    let k = params.k;
    let turning = 2.0 * (k + (k * k + e_max.max(0.0)).sqrt());
    let start = turning.max(params.rho0()).max(1.0);
    // leading asymptotics of the integrand: ρ^{2k−2+p} e^{−ρ}
    let power = 2.0 * k - 2.0 + extra_power;
    let log_at = |r: f64| power * r.ln() - r;
    let reference = log_at(start.max(power.max(0.0)));
    let mut r = start;
    while log_at(r) > reference - 42.0 && r < 600.0 {
        r += 0.5;
    }
    r.min(600.0)
}

/// Composite Gauss–Legendre nodes in `x ∈ [0, x_max]` for half-line
/// integrals of products of eigenfunctions with energies up to `e_max`.
pub(crate) fn half_line_nodes(params: &PotentialParams, e_max: f64, extra_power: f64) -> (Vec<f64>, Vec<f64>) {
    let rho_max = tail_cutoff(params, e_max, extra_power);
    let x_max = (rho_max / params.rho0()).ln().max(1.0);
    let p_max = (e_max - potential_minimum(params)).max(1.0).sqrt();
    let width = (0.5 / p_max).min(0.05);
    let panels = (x_max / width).ceil() as usize;
    Rule::new(16).composite(&quadrature::uniform_edges(0.0, x_max, panels))
}

/// A computed level with its full-line normalization.
#[derive(Debug, Clone)]
pub struct Eigenstate {
    pub params: PotentialParams,
    pub level: EigenLevel,
    /// `ψ = scale · sign(x)^{odd} ρ^{−1/2} W(ρ)`.
    pub scale: f64,
    opts: WhittakerOptions,
}

impl Eigenstate {
    pub fn new(params: &PotentialParams, level: EigenLevel) -> Result<Self> {
        Self::with_options(params, level, WhittakerOptions::default())
    }

    pub fn with_options(params: &PotentialParams, level: EigenLevel, opts: WhittakerOptions) -> Result<Self> {
        let (xs, ws) = half_line_nodes(params, level.energy, 0.0);
        let rhos: Vec<f64> = xs.iter().map(|&x| params.rho(x)).collect();
        let w = whittaker_w_batch(params.k, level.order, &rhos, &opts)?;
        // ∫ψ² dx over the line = 2 ∫₀^∞ W²/ρ dx
        let half: f64 = w
            .iter()
            .zip(&rhos)
            .zip(&ws)
            .map(|((e, r), wt)| wt * e.value * e.value / r)
            .sum();
        let norm2 = 2.0 * half;
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::QuadratureFailure(format!(
                "norm of level {} is {norm2}",
                level.index
            )));
        }
        Ok(Self {
            params: *params,
            level,
            scale: norm2.sqrt().recip(),
            opts,
        })
    }

    /// `(ψ(x), ψ'(x))` at many points with one Whittaker sweep. At `x = 0`
    /// the derivative is the right-sided limit.
    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
        let rhos: Vec<f64> = xs.iter().map(|&x| self.params.rho(x)).collect();
        let w = whittaker_w_batch(self.params.k, self.level.order, &rhos, &self.opts)?;
        let odd = self.level.parity == Parity::Odd;
        Ok(xs
            .iter()
            .zip(rhos)
            .zip(w)
            .map(|((&x, rho), e)| {
                let inv_sqrt = rho.sqrt().recip();
                let value = self.scale * inv_sqrt * e.value;
                let slope = self.scale * 0.5 * inv_sqrt * (2.0 * rho * e.derivative - e.value);
                let side = if x < 0.0 { -1.0 } else { 1.0 };
                if odd {
                    let s = if x == 0.0 { 0.0 } else { side };
                    (s * value, slope)
                } else {
                    (value, side * slope)
                }
            })
            .collect())
    }

    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        Ok(self.eval_many(&[x])?[0])
    }

    pub fn sample(&self, grid: Vec<f64>) -> Result<SampledFunction> {
        let pairs = self.eval_many(&grid)?;
        let (values, derivs) = pairs.into_iter().unzip();
        SampledFunction::new(grid, values, derivs)
    }
}

/// Normalized `ψ(x)` of a computed level.
pub fn eigenfunction(params: &PotentialParams, level: EigenLevel, x: f64) -> Result<f64> {
    Ok(Eigenstate::new(params, level)?.eval(x)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::bessel_k_imag_order;

    fn p(g: f64, k: f64) -> PotentialParams {
        PotentialParams::new(g, k).unwrap()
    }

    #[test]
    fn potential_examples() {
        assert_eq!(symmetric_potential(&p(1.0, 0.0), 0.0).unwrap(), 1.0);
        assert_eq!(symmetric_potential(&p(1.0, 3.0), 0.0).unwrap(), -5.0);
        let params = p(0.7, 1.3);
        for x in [0.1, 0.9, 2.4] {
            assert_eq!(
                symmetric_potential(&params, x).unwrap(),
                symmetric_potential(&params, -x).unwrap()
            );
        }
        assert!(symmetric_potential(&params, 400.0).is_err());
    }

    #[test]
    fn no_roots_below_lower_bound() {
        let params = p(1.0, -0.5);
        for parity in [Parity::Even, Parity::Odd] {
            let r = scan_roots(&params, parity, 0.01, 1.49, 0.05, 1e-10).unwrap();
            assert!(r.roots.is_empty());
        }
    }

    #[test]
    fn exponential_wall_matches_bessel_conditions() {
        // k = 0: W_{0,iν}(2x) ∝ √x K_{iν}(x), so odd roots are zeros of K_{iν}(g)
        let params = p(1.0, 0.0);
        let r = scan_roots(&params, Parity::Odd, 1.0, 40.0, 0.1, 1e-12).unwrap();
        assert!(!r.roots.is_empty());
        for root in &r.roots {
            let nu = root.order.value;
            let scale = bessel_k_imag_order(nu - 1e-3, 1.0).unwrap().abs();
            let k_at = bessel_k_imag_order(nu, 1.0).unwrap();
            assert!(k_at.abs() < 1e-6 * scale, "ν = {nu}: K = {k_at:e}");
        }
    }

    #[test]
    fn spectrum_orders_and_alternates() {
        let levels = compute_spectrum(&p(1.0, -0.5), 10).unwrap();
        assert_eq!(levels.len(), 10);
        for (m, l) in levels.iter().enumerate() {
            assert_eq!(l.index, m);
            assert_eq!(l.parity, Parity::of_index(m));
            assert!(l.energy > 1.5);
            assert!(l.residual.abs() < 1e-6, "{}", l.residual);
        }
        assert!(levels.windows(2).all(|w| w[0].energy < w[1].energy));
    }

    #[test]
    fn negative_levels_come_first() {
        let params = p(1.0, 3.0);
        let levels = compute_spectrum(&params, 6).unwrap();
        let negative: Vec<_> = levels.iter().filter(|l| l.energy < 0.0).collect();
        assert!(!negative.is_empty());
        for (i, l) in levels.iter().enumerate() {
            if l.energy < 0.0 {
                assert!(i < negative.len());
                assert!(l.order.value < 3.0);
            }
        }
    }

    #[test]
    fn eigenfunction_boundary_conditions() {
        let params = p(1.0, -0.5);
        let levels = compute_spectrum(&params, 4).unwrap();
        for level in levels {
            let state = Eigenstate::new(&params, level).unwrap();
            let (v0, d0) = state.eval(0.0).unwrap();
            match level.parity {
                Parity::Odd => assert_eq!(v0, 0.0),
                Parity::Even => {
                    let d = 1e-5;
                    let central = (state.eval(d).unwrap().0 - state.eval(-d).unwrap().0) / (2.0 * d);
                    assert!(central.abs() < 1e-6 * v0.abs().max(1.0));
                    assert!(d0.abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn normalization_is_unit() {
        let params = p(1.0, 0.0);
        let level = compute_spectrum(&params, 3).unwrap()[2];
        let state = Eigenstate::new(&params, level).unwrap();
        let norm = quadrature::adaptive(|x| state.eval(x).unwrap().0.powi(2), -5.0, 5.0, 1e-11, 30).unwrap();
        assert!((norm - 1.0).abs() < 1e-8, "{norm}");
    }

    #[test]
    fn rejects_bad_windows() {
        let params = p(1.0, 0.0);
        assert!(scan_roots(&params, Parity::Even, -1.0, 1.0, 0.1, 1e-10).is_err());
        assert!(scan_roots(&params, Parity::Even, 2.0, 1.0, 0.1, 1e-10).is_err());
        assert!(matching_residual(&params, Parity::Even, 0.0).is_err());
        assert!(compute_spectrum(&params, 0).is_err());
    }
}
