//! Dormand–Prince 5(4) integrator with embedded error control.
//!
//! The integrator walks from `t0` through a monotone list of output points,
//! landing exactly on each one. Direction is taken from the first target, so
//! inward integration (decreasing `t`) needs no special casing.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// fifth-order weights (also the last stage row, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// difference between fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Relative tolerance on the Euclidean norm of the state.
    pub rtol: f64,
    /// Absolute floor added to the error scale.
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-300,
            h_init: 0.1,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest accepted local error relative to the state norm.
    pub max_rel_local_error: f64,
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each
/// entry of `targets`. Targets must be monotone in one direction away from `t0`.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    targets: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<[f64; N]>, OdeStats)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(targets.len());
    let mut stats = OdeStats::default();
    if targets.is_empty() {
        return Ok((out, stats));
    }
    let dir = if targets[0] >= t0 { 1.0 } else { -1.0 };
    if targets.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) {
        return Err(Error::InvalidParameter(
            "integration targets are not monotone".into(),
        ));
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = opts.h_init.min(opts.h_max);
    let mut steps = 0usize;

    for &target in targets {
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::NonConvergence(format!(
                    "step budget {} exhausted at t = {t}",
                    opts.max_steps
                )));
            }
            let remaining = (target - t).abs();
            let mut step = h.min(remaining);
            // avoid leaving a sliver before the target
            if remaining - step < 1e-3 * step {
                step = remaining;
            }
            let hs = dir * step;

            let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
            let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * hs,
                &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * hs,
                &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + hs,
                &axpy(
                    &y,
                    hs,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                hs,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let t_new = if step == remaining { target } else { t + hs };
            let k7 = f(t_new, &y_new);

            let mut err = [0.0; N];
            for i in 0..N {
                err[i] = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let scale = opts.atol + opts.rtol * norm(&y).max(norm(&y_new));
            let err_ratio = norm(&err) / scale;
            if !err_ratio.is_finite() {
                return Err(Error::NonConvergence(format!(
                    "non-finite state near t = {t}"
                )));
            }

            if err_ratio <= 1.0 {
                stats.accepted += 1;
                let state_norm = norm(&y).max(norm(&y_new)).max(f64::MIN_POSITIVE);
                stats.max_rel_local_error = stats.max_rel_local_error.max(norm(&err) / state_norm);
                t = t_new;
                y = y_new;
                k1 = k7;
                let fac = if err_ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 5.0)
                };
                // keep the nominal step when the last one was clipped to a target
                h = (h.max(step) * fac).min(opts.h_max);
            } else {
                stats.rejected += 1;
                h = step * (0.9 * err_ratio.powf(-0.2)).clamp(0.1, 0.9);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::NonConvergence(format!(
                        "step size underflow at t = {t}"
                    )));
                }
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_phase_is_exact() {
        let opts = OdeOptions {
            rtol: 1e-12,
            ..Default::default()
        };
        let targets = [1.0, 2.0, 10.0];
        let (ys, _) = integrate(|_t, y| [y[1], -y[0]], 0.0, [0.0, 1.0], &targets, &opts).unwrap();
        for (t, y) in targets.iter().zip(&ys) {
            assert!((y[0] - t.sin()).abs() < 1e-10, "{t}: {}", y[0]);
            assert!((y[1] - t.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn backward_integration_lands_on_targets() {
        let opts = OdeOptions::default();
        let (ys, stats) = integrate(|_t, y| [y[0]], 3.0, [3f64.exp()], &[2.5, 1.0, 0.0], &opts)
            .unwrap();
        assert!((ys[2][0] - 1.0).abs() < 1e-9);
        assert!((ys[1][0] - 1f64.exp()).abs() < 1e-9);
        assert!(stats.max_rel_local_error <= 1e-11);
    }

    #[test]
    fn rejects_non_monotone_targets() {
        let r = integrate(|_t, y| [y[0]], 0.0, [1.0], &[1.0, 0.5], &OdeOptions::default());
        assert!(r.is_err());
    }
}
