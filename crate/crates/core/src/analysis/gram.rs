//! Orthogonality integrals of eigenfunctions and of their deformed partners.
//!
//! Half-line products `∫₀^∞ ψ_n ψ_m dx` vanish for distinct levels of equal
//! parity. In Whittaker form they read `∫ e^{−x} W_n W_m dx` or, with
//! `ρ = 2g e^x`, `∫ W_n W_m dρ/ρ²`; the two differ by the factor `2g`.
//! After an order-`L` Crum deletion the same holds for the ratios
//! `R_n = W[W_0, …, W_{L−1}, W_n]/W[W_0, …, W_{L−1}]` with weight `ρ^{2(L−1)} dρ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morse_ref::PotentialParams;
use crate::quadrature::{self, Rule};
use crate::spectrum::{potential_minimum, tail_cutoff, EigenLevel, Eigenstate, Parity};
use crate::special_fn::{whittaker_w_batch, OrderParam, WhittakerOptions};
use crate::transforms::{whittaker_wronskians, Deformation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParityClass {
    EvenEven,
    OddOdd,
    /// Same parity, energies of both signs.
    CrossEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// `∫_{x_cut}^∞ e^{−x} W_n(2g e^x) W_m(2g e^x) dx`.
    XWeighted,
    /// `∫_{x_cut}^∞ W_n(ρ) W_m(ρ) dρ/ρ²`, with `x_cut` a value of `ρ`.
    RhoMeasure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub parity_class: ParityClass,
    pub matrix: Vec<Vec<f64>>,
    /// `max_{n≠m} |G_nm| / √(G_nn G_mm)`.
    pub max_offdiag_ratio: f64,
}

impl GramReport {
    fn new(parity_class: ParityClass, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if let Some(i) = (0..n).find(|&i| !(matrix[i][i] > 0.0)) {
            return Err(Error::QuadratureFailure(format!(
                "Gram diagonal entry {i} is {} (expected positive)",
                matrix[i][i]
            )));
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(matrix[i][j].abs() / (matrix[i][i] * matrix[j][j]).sqrt());
                }
            }
        }
        Ok(Self {
            parity_class,
            matrix,
            max_offdiag_ratio: worst,
        })
    }

    /// `G_nm / √(G_nn G_mm)`.
    pub fn normalized(&self) -> Vec<Vec<f64>> {
        let n = self.matrix.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.matrix[i][j] / (self.matrix[i][i] * self.matrix[j][j]).sqrt())
                    .collect()
            })
            .collect()
    }
}

fn classify(levels: &[EigenLevel]) -> Result<ParityClass> {
    let first = levels
        .first()
        .ok_or_else(|| Error::InvalidParameter("Gram matrix of no levels".into()))?;
    if levels.iter().any(|l| l.parity != first.parity) {
        return Err(Error::InvalidParameter("Gram levels must share a parity".into()));
    }
    let neg = levels.iter().any(|l| l.energy < 0.0);
    let pos = levels.iter().any(|l| l.energy > 0.0);
    Ok(match (neg && pos, first.parity) {
        (true, _) => ParityClass::CrossEnergy,
        (false, Parity::Even) => ParityClass::EvenEven,
        (false, Parity::Odd) => ParityClass::OddOdd,
    })
}

/// Composite Gauss–Legendre nodes for `∫_{t_lo}^{t_hi} … dt` with panels no
/// wider than `width`.
fn nodes(t_lo: f64, t_hi: f64, width: f64, degree: usize) -> (Vec<f64>, Vec<f64>) {
    let panels = (((t_hi - t_lo) / width).ceil() as usize).max(1);
    Rule::new(degree).composite(&quadrature::uniform_edges(t_lo, t_hi, panels))
}

fn panel_width(params: &PotentialParams, e_max: f64, base: f64) -> f64 {
    let p_max = (e_max - potential_minimum(params)).max(1.0).sqrt();
    (0.5 / p_max).min(base)
}

fn gram_from(values: &[Vec<f64>], weights: &[f64]) -> Vec<Vec<f64>> {
    let n = values.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let s: f64 = weights
                .iter()
                .zip(&values[i])
                .zip(&values[j])
                .map(|((w, a), b)| w * a * b)
                .sum();
            g[i][j] = s;
            g[j][i] = s;
        }
    }
    g
}

fn whittaker_values(params: &PotentialParams, orders: &[OrderParam], rhos: &[f64]) -> Result<Vec<Vec<f64>>> {
    let opts = WhittakerOptions::default();
    orders
        .par_iter()
        .map(|&o| Ok(whittaker_w_batch(params.k, o, rhos, &opts)?.iter().map(|e| e.value).collect()))
        .collect()
}

/// Gram matrix of `W_{k,order}` of equal-parity levels.
pub fn orthogonality_gram(
    params: &PotentialParams,
    levels: &[EigenLevel],
    measure: Measure,
    x_cut: f64,
) -> Result<GramReport> {
    let class = classify(levels)?;
    let e_max = levels.iter().map(|l| l.energy).fold(f64::NEG_INFINITY, f64::max);
    let orders: Vec<OrderParam> = levels.iter().map(|l| l.order).collect();
    let rho_max = tail_cutoff(params, e_max, 0.0);
    let matrix = match measure {
        Measure::RhoMeasure => {
            if !(x_cut > 0.0) || x_cut >= rho_max {
                return Err(Error::Domain(format!("ρ cut {x_cut} outside (0, {rho_max})")));
            }
            // ρ = x_cut e^t, dρ/ρ² = dt/ρ
            let (ts, ws) = nodes(0.0, (rho_max / x_cut).ln(), panel_width(params, e_max, 0.05), 16);
            let rhos: Vec<f64> = ts.iter().map(|t| x_cut * t.exp()).collect();
            let weights: Vec<f64> = ws.iter().zip(&rhos).map(|(w, r)| w / r).collect();
            gram_from(&whittaker_values(params, &orders, &rhos)?, &weights)
        }
        Measure::XWeighted => {
            let x_max = (rho_max / params.rho0()).ln();
            if !(x_cut < x_max) {
                return Err(Error::Domain(format!("x cut {x_cut} beyond the tail cutoff {x_max}")));
            }
            let (xs, ws) = nodes(x_cut, x_max, panel_width(params, e_max, 0.03), 12);
            let rhos: Vec<f64> = xs.iter().map(|&x| params.rho0() * x.exp()).collect();
            let weights: Vec<f64> = ws.iter().zip(&xs).map(|(w, x)| w * (-x).exp()).collect();
            gram_from(&whittaker_values(params, &orders, &rhos)?, &weights)
        }
    };
    GramReport::new(class, matrix)
}

/// Gram matrix of the Whittaker-Wronskian ratios after deleting the lowest
/// `l` levels of `spectrum`, with weight `ρ^{2(l−1)}` on `(x_cut, ∞)` in `ρ`.
/// For `l = 0` this is [`orthogonality_gram`] with [`Measure::RhoMeasure`].
pub fn deformed_orthogonality_gram(
    params: &PotentialParams,
    l: usize,
    spectrum: &[EigenLevel],
    levels: &[EigenLevel],
    x_cut: f64,
) -> Result<GramReport> {
    if l == 0 {
        return orthogonality_gram(params, levels, Measure::RhoMeasure, x_cut);
    }
    let class = classify(levels)?;
    if spectrum.len() < l {
        return Err(Error::IndexOutOfSpectrum {
            index: l - 1,
            available: spectrum.len(),
        });
    }
    if let Some(bad) = levels.iter().find(|lv| lv.index < l) {
        return Err(Error::InvalidParameter(format!("level {} is deleted", bad.index)));
    }
    let deleted: Vec<OrderParam> = spectrum[..l].iter().map(|lv| lv.order).collect();
    let e_max = levels.iter().chain(&spectrum[..l]).map(|lv| lv.energy).fold(f64::NEG_INFINITY, f64::max);
    let rho_max = tail_cutoff(params, e_max, 2.0 * l as f64 + 2.0);
    if !(x_cut > 0.0) || x_cut >= rho_max {
        return Err(Error::Domain(format!("ρ cut {x_cut} outside (0, {rho_max})")));
    }
    let (ts, ws) = nodes(0.0, (rho_max / x_cut).ln(), panel_width(params, e_max, 0.05), 16);
    let rhos: Vec<f64> = ts.iter().map(|t| x_cut * t.exp()).collect();
    let opts = WhittakerOptions::default();
    let den = whittaker_wronskians(params, &deleted, &rhos, &opts)?;
    if let Some(i) = den.iter().position(|w| w.is_zero()) {
        return Err(Error::WronskianZero { x: (rhos[i] / params.rho0()).ln() });
    }
    let ratios = levels
        .par_iter()
        .map(|lv| {
            let mut orders = deleted.clone();
            orders.push(lv.order);
            let num = whittaker_wronskians(params, &orders, &rhos, &opts)?;
            Ok(num
                .iter()
                .zip(&den)
                .map(|(n, d)| n.mant[0] / d.mant[0] * (n.log_scale - d.log_scale).exp())
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    // dρ = ρ dt
    let power = 2.0 * (l as f64 - 1.0);
    let weights: Vec<f64> = ws.iter().zip(&rhos).map(|(w, r)| w * r * r.powf(power)).collect();
    GramReport::new(class, gram_from(&ratios, &weights))
}

/// Half-line Gram matrix `∫_{x_cut}^∞ ψ_{𝒟;n} ψ_{𝒟;m} dx` of deformed
/// eigenfunctions built from `x`-Wronskians of normalized states.
pub fn deformed_state_gram(deformation: &Deformation, states: &[Eigenstate], x_cut: f64) -> Result<GramReport> {
    let levels: Vec<EigenLevel> = states.iter().map(|s| s.level).collect();
    let class = classify(&levels)?;
    let params = deformation.params();
    let e_max = levels
        .iter()
        .chain(deformation.deleted().iter().map(|s| &s.level))
        .map(|lv| lv.energy)
        .fold(f64::NEG_INFINITY, f64::max);
    let l = deformation.order() as f64;
    let x_max = (tail_cutoff(params, e_max, 2.0 * l + 2.0) / params.rho0()).ln();
    let (xs, ws) = nodes(x_cut, x_max, panel_width(params, e_max, 0.04), 14);
    let values = states
        .par_iter()
        .map(|s| Ok(deformation.eigenfunction_values(s, &xs)?.into_iter().map(|(v, _)| v).collect()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    GramReport::new(class, gram_from(&values, &ws))
}
