//! The original full-line Morse system: closed-form spectrum, eigenfunctions
//! and the shape-invariance identity. Serves as an analytic anchor for the
//! finite-difference oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `x` for which `e^{2x}` stays comfortably finite.
pub const X_OVERFLOW: f64 = 300.0;

/// Coupling `g > 0` and shape parameter `k = h + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub g: f64,
    pub k: f64,
}

impl PotentialParams {
    pub fn new(g: f64, k: f64) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling g = {g} must be positive")));
        }
        if !k.is_finite() {
            return Err(Error::InvalidParameter(format!("shape parameter k = {k} is not finite")));
        }
        Ok(Self { g, k })
    }

    pub fn from_h(g: f64, h: f64) -> Result<Self> {
        Self::new(g, h + 0.5)
    }

    pub fn h(&self) -> f64 {
        self.k - 0.5
    }

    /// `ρ₀ = ρ(0) = 2g`, where the matching conditions are imposed.
    pub fn rho0(&self) -> f64 {
        2.0 * self.g
    }

    /// `ρ(x) = 2g e^{|x|}` of the symmetric system.
    pub fn rho(&self, x: f64) -> f64 {
        2.0 * self.g * x.abs().exp()
    }
}

fn guard(x: f64) -> Result<()> {
    if x > X_OVERFLOW || !x.is_finite() {
        return Err(Error::Domain(format!("x = {x} beyond overflow guard {X_OVERFLOW}")));
    }
    Ok(())
}

/// `g² e^{2x} − g(2h+1) e^x`.
pub fn morse_potential_fullline(params: &PotentialParams, x: f64) -> Result<f64> {
    guard(x)?;
    let e = x.exp();
    Ok(params.g * params.g * e * e - params.g * (2.0 * params.h() + 1.0) * e)
}

/// Highest bound level index: the greatest integer strictly below `h`.
fn top_level(h: f64) -> Result<usize> {
    if !(h > 0.0) {
        return Err(Error::EmptySpectrum { h });
    }
    Ok(h.ceil() as usize - 1)
}

/// `E_n = −(h − n)²` for `n = 0 ..= ⌊h⌋'`. Threshold states with `E = 0`
/// (integer `h`) are not normalizable and are left out.
pub fn morse_eigenvalues(params: &PotentialParams) -> Result<Vec<f64>> {
    let h = params.h();
    Ok((0..=top_level(h)?)
        .map(|n| -(h - n as f64).powi(2))
        .collect())
}

/// Generalized Laguerre polynomial by the three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Unnormalized `φ_n(x) = e^{hx − ρ/2} ρ^{−n} L_n^{(2h−2n)}(ρ)`, `ρ = 2g e^x`.
pub fn morse_eigenfunction(params: &PotentialParams, n: usize, x: f64) -> Result<f64> {
    let h = params.h();
    let top = top_level(h)?;
    if n > top {
        return Err(Error::IndexOutOfSpectrum {
            index: n,
            available: top + 1,
        });
    }
    guard(x)?;
    let rho = 2.0 * params.g * x.exp();
    let nf = n as f64;
    let envelope = (h * x - 0.5 * rho - nf * rho.ln()).exp();
    Ok(envelope * laguerre(n, 2.0 * h - 2.0 * nf, rho))
}

/// `V_M(x) − 2 ∂²ₓ log φ₀(x) − [g² e^{2x} − g(2h−1) e^x]`, with the second
/// derivative of `log φ₀` taken numerically (Richardson-extrapolated
/// five-point differences). Vanishes identically by shape invariance.
pub fn shape_invariance_gap(params: &PotentialParams, x: f64) -> Result<f64> {
    if !(params.h() > 0.0) {
        return Err(Error::EmptySpectrum { h: params.h() });
    }
    let log_phi0 = |t: f64| morse_eigenfunction(params, 0, t).map(f64::ln);
    let second = |d: f64| -> Result<f64> {
        let f = [
            log_phi0(x - 2.0 * d)?,
            log_phi0(x - d)?,
            log_phi0(x)?,
            log_phi0(x + d)?,
            log_phi0(x + 2.0 * d)?,
        ];
        Ok((-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * d * d))
    };
    let d = 0.02;
    let coarse = second(d)?;
    let fine = second(0.5 * d)?;
    let curvature = fine + (fine - coarse) / 15.0;
    let e = x.exp();
    let shifted = params.g * params.g * e * e - params.g * (2.0 * params.h() - 1.0) * e;
    Ok(morse_potential_fullline(params, x)? - 2.0 * curvature - shifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(g: f64, h: f64) -> PotentialParams {
        PotentialParams::from_h(g, h).unwrap()
    }

    #[test]
    fn potential_values() {
        assert_eq!(morse_potential_fullline(&p(1.0, 0.0), 0.0).unwrap(), 0.0);
        assert_eq!(morse_potential_fullline(&p(1.0, 2.5), 0.0).unwrap(), -5.0);
        assert!(morse_potential_fullline(&p(1.0, 2.5), 400.0).is_err());
    }

    #[test]
    fn potential_minimum_is_minus_k_squared() {
        // minimum at g e^x = h + 1/2
        let params = p(1.0, 2.5);
        let x_min = (3.0f64).ln();
        let v = morse_potential_fullline(&params, x_min).unwrap();
        assert!((v + 9.0).abs() < 1e-12);
        for dx in [-0.1, 0.1] {
            assert!(morse_potential_fullline(&params, x_min + dx).unwrap() > v);
        }
    }

    #[test]
    fn eigenvalue_lists() {
        assert_eq!(morse_eigenvalues(&p(1.0, 2.5)).unwrap(), vec![-6.25, -2.25, -0.25]);
        assert_eq!(morse_eigenvalues(&p(2.0, 1.0)).unwrap(), vec![-1.0]);
        let v = morse_eigenvalues(&p(1.0, 0.2)).unwrap();
        assert_eq!(v.len(), 1);
        assert!((v[0] + 0.04).abs() < 1e-15);
        assert!(matches!(morse_eigenvalues(&p(1.0, 0.0)), Err(Error::EmptySpectrum { .. })));
        for (h, count) in [(0.2, 1), (1.0, 1), (2.5, 3), (3.0, 3)] {
            assert_eq!(morse_eigenvalues(&p(1.0, h)).unwrap().len(), count, "h = {h}");
        }
    }

    #[test]
    fn laguerre_low_degrees() {
        assert_eq!(laguerre(0, 0.7, 3.0), 1.0);
        assert!((laguerre(1, 0.7, 3.0) - (1.0 + 0.7 - 3.0)).abs() < 1e-15);
        assert!((laguerre(2, 0.0, 1.0) + 0.5).abs() < 1e-15);
        // L_3^{(1)}(x) = 4 − 6x + 2x² − x³/6
        let x: f64 = 1.3;
        let exact = 4.0 - 6.0 * x + 2.0 * x * x - x.powi(3) / 6.0;
        assert!((laguerre(3, 1.0, x) - exact).abs() < 1e-13);
    }

    #[test]
    fn ground_state_value() {
        let v = morse_eigenfunction(&p(1.0, 2.5), 0, 0.0).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert!(matches!(
            morse_eigenfunction(&p(1.0, 2.5), 3, 0.0),
            Err(Error::IndexOutOfSpectrum { .. })
        ));
    }

    #[test]
    fn node_counts_match_index() {
        let params = p(1.0, 2.5);
        for n in 0..3 {
            let mut nodes = 0;
            let mut prev = morse_eigenfunction(&params, n, -20.0).unwrap();
            for i in 1..=30_000 {
                let x = -20.0 + 30.0 * i as f64 / 30_000.0;
                let v = morse_eigenfunction(&params, n, x).unwrap();
                if v != 0.0 && prev != 0.0 && v.signum() != prev.signum() {
                    nodes += 1;
                }
                if v != 0.0 {
                    prev = v;
                }
            }
            assert_eq!(nodes, n);
        }
    }

    #[test]
    fn eigenfunctions_solve_schroedinger_equation() {
        let params = p(1.0, 2.5);
        let energies = morse_eigenvalues(&params).unwrap();
        let d = 1e-3;
        for (n, e) in energies.iter().enumerate() {
            let f = |x: f64| morse_eigenfunction(&params, n, x).unwrap();
            let scale = (0..2000)
                .map(|i| f(-10.0 + 13.0 * i as f64 / 2000.0).abs())
                .fold(0.0, f64::max);
            for i in 0..=260 {
                let x = -10.0 + 13.0 * i as f64 / 260.0;
                let second = (-f(x - 2.0 * d) + 16.0 * f(x - d) - 30.0 * f(x) + 16.0 * f(x + d)
                    - f(x + 2.0 * d))
                    / (12.0 * d * d);
                let v = morse_potential_fullline(&params, x).unwrap();
                let residual = (-second + (v - e) * f(x)) / scale;
                assert!(residual.abs() < 1e-8, "n={n} x={x} residual={residual:e}");
            }
        }
    }

    #[test]
    fn shape_invariance_examples() {
        assert!(shape_invariance_gap(&p(1.0, 2.5), 0.0).unwrap().abs() < 1e-10);
        assert!(shape_invariance_gap(&p(0.5, 1.2), 1.0).unwrap().abs() < 1e-10);
        assert!(shape_invariance_gap(&p(1.0, 2.5), -3.0).unwrap().abs() < 1e-10);
        for i in 0..=40 {
            let x = -6.0 + 0.2 * i as f64;
            let gap = shape_invariance_gap(&p(1.3, 1.7), x).unwrap();
            assert!(gap.abs() < 1e-9, "x={x} gap={gap:e}");
        }
    }

    #[test]
    fn eigenfunctions_are_orthogonal() {
        let params = p(1.0, 2.5);
        let mut gram = [[0.0; 3]; 3];
        for n in 0..3 {
            for m in 0..3 {
                let f = |x: f64| {
                    morse_eigenfunction(&params, n, x).unwrap()
                        * morse_eigenfunction(&params, m, x).unwrap()
                };
                gram[n][m] = crate::quadrature::adaptive(f, -30.0, 6.0, 1e-14, 50).unwrap();
            }
        }
        for n in 0..3 {
            assert!(gram[n][n] > 0.0);
            for m in 0..3 {
                if n != m {
                    let ratio = gram[n][m].abs() / (gram[n][n] * gram[m][m]).sqrt();
                    assert!(ratio < 1e-8, "({n},{m}) {ratio:e}");
                }
            }
        }
    }

    #[test]
    fn rejects_nonpositive_coupling() {
        assert!(PotentialParams::new(0.0, 1.0).is_err());
        assert!(PotentialParams::new(-1.0, 1.0).is_err());
    }
}
