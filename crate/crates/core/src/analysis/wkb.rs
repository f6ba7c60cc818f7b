//! Bohr–Sommerfeld counting for the symmetric potential.
//!
//! The count at energy `E` is `(2/π) ∫ √(E − V) dx − 1/2` over the
//! classically allowed part of the half line. Writing `y = e^x`,
//! `E − V = g² (r₊ − y)(y − r₋)` with `r± = (k ± √(k² + E))/g`, which keeps
//! the integrand accurate right up to the turning points.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::morse_ref::PotentialParams;
use crate::quadrature::Rule;

const PANELS: usize = 8;
const DEGREE: usize = 24;

fn roots(params: &PotentialParams, energy: f64) -> Option<(f64, f64)> {
    let disc = params.k * params.k + energy;
    if disc <= 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let hi = (params.k + s) / params.g;
    // the smaller root via the product r₊ r₋ = −E/g² avoids cancellation
    let lo = -energy / (params.g * params.g * hi);
    Some((hi, lo))
}

/// Classically allowed interval `[x_lo, x_hi]` on `x ≥ 0`, if any.
pub fn allowed_interval(params: &PotentialParams, energy: f64) -> Option<(f64, f64)> {
    let (r_hi, r_lo) = roots(params, energy)?;
    if r_hi <= 1.0 {
        return None;
    }
    let x_hi = r_hi.ln();
    let x_lo = if r_lo > 1.0 { r_lo.ln() } else { 0.0 };
    (x_hi > x_lo).then_some((x_lo, x_hi))
}

fn momentum(params: &PotentialParams, r_hi: f64, r_lo: f64, x: f64) -> f64 {
    let y = x.exp();
    let v = (r_hi - y) * (y - r_lo);
    params.g * v.max(0.0).sqrt()
}

/// `∫ √(E − V) dx` over the allowed part of `x ≥ 0`.
pub fn action(params: &PotentialParams, energy: f64) -> Result<f64> {
    let (x_lo, x_hi) = allowed_interval(params, energy).ok_or_else(|| {
        Error::Domain(format!("no classically allowed region at E = {energy}"))
    })?;
    let (r_hi, r_lo) = roots(params, energy).expect("allowed interval implies real roots");
    let rule = Rule::new(DEGREE);
    let mut total = 0.0;
    if x_lo > 0.0 {
        // two turning points: x = c − a cos θ
        let c = 0.5 * (x_hi + x_lo);
        let a = 0.5 * (x_hi - x_lo);
        for p in 0..PANELS {
            let t0 = PI * p as f64 / PANELS as f64;
            let t1 = PI * (p + 1) as f64 / PANELS as f64;
            total += rule.integrate(t0, t1, |t| {
                a * t.sin() * momentum(params, r_hi, r_lo, c - a * t.cos())
            });
        }
    } else {
        // one turning point: u² = x_t − x
        let u_max = x_hi.sqrt();
        for p in 0..PANELS {
            let u0 = u_max * p as f64 / PANELS as f64;
            let u1 = u_max * (p + 1) as f64 / PANELS as f64;
            total += rule.integrate(u0, u1, |u| 2.0 * u * momentum(params, r_hi, r_lo, x_hi - u * u));
        }
    }
    Ok(total)
}

/// `(2/π) ∫ √(E − V) dx − 1/2` for any energy with an allowed region;
/// double-well energies (below `V(0)`) use both turning points.
pub fn wkb_count_energy(params: &PotentialParams, energy: f64) -> Result<f64> {
    Ok(2.0 / PI * action(params, energy)? - 0.5)
}

/// Count at positive energy `ν²` with the turning point
/// `x_t = ln[(k + √(k² + ν²))/g]`, integrated from the origin.
pub fn wkb_count(params: &PotentialParams, nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("ν = {nu} must be positive")));
    }
    let x_t = turning_point(params, nu);
    if !(x_t > 0.0) {
        return Err(Error::Domain(format!(
            "turning point x_t = {x_t} is not positive at ν = {nu}"
        )));
    }
    wkb_count_energy(params, nu * nu)
}

pub fn turning_point(params: &PotentialParams, nu: f64) -> f64 {
    ((params.k + (params.k * params.k + nu * nu).sqrt()) / params.g).ln()
}

/// The `ν` with `wkb_count(ν) = n`.
pub fn wkb_invert(params: &PotentialParams, n: usize) -> Result<f64> {
    let target = n as f64;
    // below the barrier top at the origin no level is counted
    let count = |nu: f64| match wkb_count(params, nu) {
        Err(Error::Domain(_)) => Ok(-0.5),
        other => other,
    };
    let v0 = params.g * (params.g - 2.0 * params.k);
    let mut lo = if v0 > 0.0 { v0.sqrt() } else { 0.0 };
    let floor = count(lo * (1.0 + 1e-9) + 1e-9)?;
    if floor > target {
        return Err(Error::Domain(format!(
            "WKB level {n} lies at negative energy (count at ν → 0⁺ is {floor:.3})"
        )));
    }
    let mut hi = (2.0 * lo).max(1.0);
    while count(hi)? < target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NonConvergence(format!("no WKB bracket for level {n}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-14 * hi {
            break;
        }
        if count(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Predicted distance between consecutive levels (both parities) in the
/// order parameter `t`, where `E = ±t²` with `sign` the energy sign.
pub fn wkb_spacing(params: &PotentialParams, t: f64, sign: f64) -> Result<f64> {
    let d = 1e-4 * t.max(1e-2);
    let count = |s: f64| wkb_count_energy(params, sign * s * s);
    let density = (count(t + d)? - count((t - d).max(1e-9))?) / (t + d - (t - d).max(1e-9));
    Ok(1.0 / density.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(g: f64, k: f64) -> PotentialParams {
        PotentialParams::new(g, k).unwrap()
    }

    #[test]
    fn integrand_vanishes_at_turning_point() {
        let params = p(1.0, -0.5);
        let nu: f64 = 7.0;
        let x_t = turning_point(&params, nu);
        let v = params.g.powi(2) * (2.0 * x_t).exp() - 2.0 * params.g * params.k * x_t.exp();
        assert!((nu * nu - v).abs() < 1e-11 * nu * nu);
    }

    #[test]
    fn round_trip() {
        let params = p(1.0, 0.0);
        for n in [5, 10, 30] {
            let nu = wkb_invert(&params, n).unwrap();
            assert!((wkb_count(&params, nu).unwrap() - n as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn count_is_increasing() {
        let params = p(1.0, -0.5);
        let mut prev = f64::NEG_INFINITY;
        for i in 1..200 {
            let c = wkb_count(&params, 1.5 + 0.1 * i as f64).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn domain_below_barrier() {
        // V(0) = g(g − 2k) = 2
        assert!(matches!(wkb_count(&p(1.0, -0.5), 1.0), Err(Error::Domain(_))));
        assert!(wkb_count(&p(1.0, -0.5), 1.5).is_ok());
    }

    #[test]
    fn quadrature_is_converged() {
        // action for a pure exponential wall agrees with the closed form
        // ∫₀^{x_t} √(ν² − e^{2x}) dx = ν [acosh(ν) − √(1 − 1/ν²)], g = 1, k = 0
        let nu: f64 = 12.0;
        let exact = nu * ((nu).acosh() - (1.0 - 1.0 / (nu * nu)).sqrt());
        let got = action(&p(1.0, 0.0), nu * nu).unwrap();
        assert!((got - exact).abs() < 1e-10 * exact, "{got} {exact}");
    }

    #[test]
    fn double_well_below_barrier() {
        // k = 3, g = 1: V(0) = −5, V_min = −9
        let params = p(1.0, 3.0);
        assert!(allowed_interval(&params, -7.0).unwrap().0 > 0.0);
        assert!(wkb_count_energy(&params, -7.0).unwrap() > -0.5);
        assert!(allowed_interval(&params, -9.5).is_none());
    }
}
