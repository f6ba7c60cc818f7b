//! Verification suites: each check compares a computed quantity against an
//! independent route or a closed form and records the measured discrepancy.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    deformed_orthogonality_gram, deformed_state_gram, interlacing_check, orthogonality_gram, wkb_count, Measure,
    ZeroSequences,
};
use crate::error::{Error, Result};
use crate::morse_ref::{morse_eigenvalues, morse_potential_fullline, PotentialParams};
use crate::oracle::{auto_x_max, richardson_pair, symmetric_spectrum, Boundary, FdProblem, TabulatedPotential};
use crate::sampled::mirrored_grid;
use crate::special_fn::{bessel_k_imag_order, whittaker_w, OrderKind, OrderParam};
use crate::spectrum::{compute_spectrum, symmetric_potential, EigenLevel, Eigenstate, Parity, SpectrumOptions};
use crate::transforms::{krein_adler_admissible, Deformation, DeletionSet};

/// Parameter settings `(g, k)` exercised by the spectrum suite.
pub const SETTINGS: [(f64, f64); 4] = [(1.0, -0.5), (1.0, 0.0), (1.0, 3.0), (0.5, 1.5)];
/// Setting used for the deformation and orthogonality checks.
pub const DEFORM_SETTING: (f64, f64) = (1.0, -0.5);
/// Grid intervals of the coarsest finite-difference grid.
pub const FD_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Whittaker,
    Spectrum,
    Crum,
    Ortho,
    Wkb,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["all", "whittaker", "spectrum", "crum", "ortho", "wkb"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "whittaker" => Suite::Whittaker,
            "spectrum" => Suite::Spectrum,
            "crum" => Suite::Crum,
            "ortho" => Suite::Ortho,
            "wkb" => Suite::Wkb,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown suite {other:?} (expected one of {})",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// `None` when the computation itself failed.
    pub measured: Option<f64>,
    pub threshold: f64,
}

impl Check {
    /// Passes when `measured ≤ threshold`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let ok = measured <= threshold;
        Self::with(name, ok, measured, threshold)
    }

    /// Passes when `measured > threshold`.
    pub fn above(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let ok = measured > threshold;
        Self::with(name, ok, measured, threshold)
    }

    fn with(name: impl Into<String>, ok: bool, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured: Some(measured),
            threshold,
        }
    }

    fn failed(name: impl Into<String>, err: &Error, threshold: f64) -> Self {
        Self {
            name: format!("{} [{err}]", name.into()),
            status: Status::Fail,
            measured: None,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Runs `body`; an error becomes a single failed check.
fn guarded(name: &str, threshold: f64, body: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    body().unwrap_or_else(|e| vec![Check::failed(name, &e, threshold)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Crum orders exercised by the deformation checks.
    pub crum_orders: Vec<usize>,
    pub fd_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            crum_orders: vec![1, 2],
            fd_points: FD_POINTS,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> VerifyReport {
    let checks = match suite {
        Suite::All => [Suite::Whittaker, Suite::Spectrum, Suite::Crum, Suite::Ortho, Suite::Wkb]
            .iter()
            .flat_map(|&s| run_suite(s, opts).checks)
            .collect(),
        Suite::Whittaker => [whittaker_closed_forms(), bessel_relation()].concat(),
        Suite::Spectrum => [
            morse_closed_form(opts.fd_points),
            oracle_agreement(opts.fd_points),
            interlacing(),
            spectral_bounds(),
        ]
        .concat(),
        Suite::Crum => [crum_checks(&opts.crum_orders, opts.fd_points), krein_adler_checks(opts.fd_points)].concat(),
        Suite::Ortho => [
            plain_orthogonality(),
            deformed_orthogonality(&opts.crum_orders),
            cross_energy_orthogonality(),
        ]
        .concat(),
        Suite::Wkb => wkb_counting(),
    };
    let passed = checks.iter().all(Check::passed);
    VerifyReport { suite, checks, passed }
}

fn setting(g: f64, k: f64) -> String {
    format!("g={g},k={k}")
}

fn params(g: f64, k: f64) -> Result<PotentialParams> {
    PotentialParams::new(g, k)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// `W_{μ+1/2,μ}(x) = e^{−x/2} x^{μ+1/2}`.
pub fn whittaker_closed_forms() -> Vec<Check> {
    [0.0, 0.5, 1.0, 2.5]
        .iter()
        .flat_map(|&mu| {
            let name = format!("whittaker_closed_form mu={mu}");
            guarded(&name, 1e-10, || {
                let errs = [0.5, 2.0, 10.0, 20.0]
                    .iter()
                    .map(|&x| {
                        let w = whittaker_w(mu + 0.5, OrderParam::real(mu), x)?;
                        Ok(rel(w.value, (-0.5 * x).exp() * x.powf(mu + 0.5)))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(vec![Check::at_most(&name, max(errs), 1e-10)])
            })
        })
        .collect()
}

/// `W_{0,iν}(2x) = √(2x/π) K_{iν}(x)` against the cosh-integral oracle.
pub fn bessel_relation() -> Vec<Check> {
    [0.5, 1.0, 2.0, 5.0]
        .par_iter()
        .flat_map(|&nu| {
            let name = format!("bessel_relation nu={nu}");
            guarded(&name, 1e-8, || {
                let errs = (0..10)
                    .map(|i| {
                        let x = 0.5 + 0.5 * i as f64;
                        let w = whittaker_w(0.0, OrderParam::imaginary(nu), 2.0 * x)?.value;
                        let k = (2.0 * x / PI).sqrt() * bessel_k_imag_order(nu, x)?;
                        Ok((w - k).abs() / w.abs())
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(vec![Check::at_most(&name, max(errs), 1e-8)])
            })
        })
        .collect()
}

/// Finite differences on the full-line Morse potential against
/// `E_n = −(h − n)²` at `g = 1`, `h = 2.5`.
pub fn morse_closed_form(fd_points: usize) -> Vec<Check> {
    let name = "morse_fullline_closed_form g=1,h=2.5";
    guarded(name, 1e-4, || {
        let p = PotentialParams::from_h(1.0, 2.5)?;
        let exact = morse_eigenvalues(&p)?;
        let v = move |x: f64| morse_potential_fullline(&p, x).unwrap_or(f64::MAX);
        let problem = FdProblem::with_auto_box(v, Boundary::FullLine, exact[exact.len() - 1], 2 * fd_points)?;
        let fd = richardson_pair(&problem, exact.len())?.values;
        let err = max(fd.iter().zip(&exact).map(|(a, b)| (a - b).abs()));
        Ok(vec![Check::at_most(name, err, 1e-4)])
    })
}

/// Oracle spectrum of the symmetric potential, lowest `count` levels.
pub fn oracle_spectrum(p: &PotentialParams, e_max: f64, count: usize, fd_points: usize) -> Result<Vec<f64>> {
    let p = *p;
    let v = move |x: f64| symmetric_potential(&p, x).unwrap_or(f64::MAX);
    let x_max = auto_x_max(v, e_max)?;
    symmetric_spectrum(v, x_max / (1.0 - crate::oracle::TAIL_BAND), count, fd_points)
}

/// First eight Whittaker-root energies against the finite-difference oracle,
/// relative to `max(|E|, 1)`.
pub fn oracle_agreement(fd_points: usize) -> Vec<Check> {
    SETTINGS
        .par_iter()
        .flat_map(|&(g, k)| {
            let name = format!("oracle_agreement {}", setting(g, k));
            guarded(&name, 1e-4, || {
                let p = params(g, k)?;
                let levels = compute_spectrum(&p, 8)?;
                let fd = oracle_spectrum(&p, levels[7].energy, 8, fd_points)?;
                let err = max(levels.iter().zip(&fd).map(|(l, e)| (l.energy - e).abs() / e.abs().max(1.0)));
                Ok(vec![Check::at_most(&name, err, 1e-4)])
            })
        })
        .collect()
}

/// Strict ordering `x/2 < λ₀ < η₀ < λ₁ < …` of ten zeros of each matching
/// condition; measured is the smallest gap in the chain.
pub fn interlacing() -> Vec<Check> {
    SETTINGS
        .par_iter()
        .flat_map(|&(g, k)| {
            let name = format!("interlacing {}", setting(g, k));
            guarded(&name, 0.0, || {
                let p = params(g, k)?;
                let zeros = ZeroSequences::compute(&p, 10)?;
                let report = interlacing_check(&zeros, p.rho0());
                let chain: Vec<f64> = std::iter::once(0.5 * p.rho0()).chain(zeros.merged.iter().copied()).collect();
                let gap = chain.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                let mut check = Check::above(&name, gap, 0.0);
                if let Some(v) = report.violation {
                    check.name = format!("{name} [{}]", v.detail);
                    check.status = Status::Fail;
                }
                Ok(vec![check])
            })
        })
        .collect()
}

/// `k ≤ 0`: `E₀ − g(g − k) > 0`. `k > 0`: every negative energy lies in
/// `(−k², 0)` and `μ` strictly decreases; measured is the smallest margin.
pub fn spectral_bounds() -> Vec<Check> {
    [(1.0, -0.5), (1.0, 0.0), (1.0, -1.0), (1.0, 3.0), (0.5, 1.5)]
        .par_iter()
        .flat_map(|&(g, k)| {
            let name = format!("spectral_bounds {}", setting(g, k));
            guarded(&name, 0.0, || {
                let p = params(g, k)?;
                let levels = compute_spectrum(&p, 8)?;
                let margin = if k <= 0.0 {
                    levels[0].energy - g * (g - k)
                } else {
                    // a level inside the threshold band sits at E = 0, not below it
                    let band = SpectrumOptions::default().zero_band;
                    let negative: Vec<&EigenLevel> = levels.iter().filter(|l| l.energy < -band).collect();
                    let inside = negative
                        .iter()
                        .map(|l| (l.energy + k * k).min(-l.energy))
                        .fold(f64::INFINITY, f64::min);
                    let descending = negative
                        .windows(2)
                        .map(|w| w[0].order.value - w[1].order.value)
                        .fold(f64::INFINITY, f64::min);
                    inside.min(descending)
                };
                Ok(vec![Check::above(&name, margin, 0.0)])
            })
        })
        .collect()
}

fn deform_params() -> Result<PotentialParams> {
    params(DEFORM_SETTING.0, DEFORM_SETTING.1)
}

/// Oracle spectrum of a deformed potential tabulated on the finest
/// Richardson grid of the original box.
fn deformed_oracle(d: &Deformation, e_max: f64, count: usize, fd_points: usize) -> Result<Vec<f64>> {
    let p = *d.params();
    let v = move |x: f64| symmetric_potential(&p, x).unwrap_or(f64::MAX);
    let x_max = auto_x_max(v, e_max)? / (1.0 - crate::oracle::TAIL_BAND);
    let nodes = TabulatedPotential::nodes(0.0, x_max, 4 * fd_points);
    let tab = TabulatedPotential::new(0.0, x_max, d.potential(nodes)?.values)?;
    symmetric_spectrum(move |x| tab.eval(x), x_max, count, fd_points)
}

fn surviving(spectrum: &[EigenLevel], dset: &DeletionSet, count: usize) -> Vec<EigenLevel> {
    spectrum.iter().filter(|l| !dset.contains(l.index)).take(count).copied().collect()
}

/// Iso-spectrality, parity, norm product and asymptotics of `V^{[L]}`.
pub fn crum_checks(orders: &[usize], fd_points: usize) -> Vec<Check> {
    let (g, k) = DEFORM_SETTING;
    orders
        .par_iter()
        .flat_map(|&l| {
            let tag = format!("L={l} {}", setting(g, k));
            guarded(&format!("crum {tag}"), 1e-3, || {
                let p = deform_params()?;
                let spectrum = compute_spectrum(&p, l + 8)?;
                let d = Deformation::new(&p, DeletionSet::crum(l)?, &spectrum)?;
                let mut checks = Vec::new();

                let expect = surviving(&spectrum, d.dset(), 6);
                let fd = deformed_oracle(&d, expect[5].energy, 6, fd_points)?;
                let err = max(expect.iter().zip(&fd).map(|(lv, e)| rel(*e, lv.energy)));
                checks.push(Check::at_most(format!("crum_isospectrality {tag}"), err, 1e-3));

                let states: Vec<Eigenstate> = expect[..4]
                    .iter()
                    .map(|lv| Eigenstate::new(&p, *lv))
                    .collect::<Result<_>>()?;
                let grid = mirrored_grid(4.0, 400);
                let mut parity_err = 0.0f64;
                let mut norm_err = 0.0f64;
                for s in &states {
                    let f = d.eigenfunction(s, grid.clone())?;
                    let peak = max(f.values.iter().map(|v| v.abs()));
                    let sign = d.parity_sign(s.level.index);
                    for i in 0..f.len() {
                        let j = f.mirror_index(i).expect("mirrored grid");
                        parity_err = parity_err.max((f.values[j] - sign * f.values[i]).abs() / peak);
                    }
                    norm_err = norm_err.max(rel(d.norm_squared(s)?, d.norm_factor(s.level.energy)));
                }
                checks.push(Check::at_most(format!("crum_parity {tag}"), parity_err, 1e-6));
                checks.push(Check::at_most(format!("crum_norm_product {tag}"), norm_err, 1e-3));

                // V^{[L]} − [ρ²/4 − (k − L)ρ] decays like 1/ρ
                let gap = |rho: f64| -> Result<f64> {
                    let x = (rho / p.rho0()).ln();
                    let v = d.potential_analytic(&[x])?[0];
                    Ok((v - (0.25 * rho * rho - d.asymptotic_k() * rho)).abs())
                };
                let decay = gap(400.0)? / gap(50.0)?;
                checks.push(Check::at_most(format!("crum_asymptotic_decay {tag}"), decay, 0.25));
                Ok(checks)
            })
        })
        .collect()
}

/// Admissibility of small deletion sets and the oracle spectrum after
/// deleting `{1, 2}`.
pub fn krein_adler_checks(fd_points: usize) -> Vec<Check> {
    let mut checks: Vec<Check> = [(&[0usize][..], true), (&[1], false), (&[1, 2], true), (&[0, 2, 3], true)]
        .iter()
        .map(|(labels, expected)| {
            let name = format!("krein_adler_admissible {labels:?}");
            match DeletionSet::new(labels) {
                Ok(set) => {
                    let got = krein_adler_admissible(&set);
                    let measured = if got { 1.0 } else { 0.0 };
                    let threshold = if *expected { 1.0 } else { 0.0 };
                    Check::with(name, got == *expected, measured, threshold)
                }
                Err(e) => Check::failed(name, &e, 1.0),
            }
        })
        .collect();
    let (g, k) = DEFORM_SETTING;
    let tag = format!("D=[1, 2] {}", setting(g, k));
    checks.extend(guarded(&format!("krein_adler_spectrum {tag}"), 1e-3, || {
        let p = deform_params()?;
        let spectrum = compute_spectrum(&p, 10)?;
        let d = Deformation::new(&p, DeletionSet::new(&[1, 2])?, &spectrum)?;
        let expect = surviving(&spectrum, d.dset(), 6);
        let fd = deformed_oracle(&d, expect[5].energy, 6, fd_points)?;
        let err = max(expect.iter().zip(&fd).map(|(lv, e)| rel(*e, lv.energy)));
        Ok(vec![Check::at_most(format!("krein_adler_spectrum {tag}"), err, 1e-3)])
    }));
    checks.extend(guarded("krein_adler_matches_crum", 0.0, || {
        let p = deform_params()?;
        let spectrum = compute_spectrum(&p, 4)?;
        let grid = mirrored_grid(3.0, 200);
        let crum = crate::transforms::crum_potential(&p, 2, &spectrum, grid.clone())?;
        let ka = Deformation::new(&p, DeletionSet::new(&[0, 1])?, &spectrum)?.potential(grid)?;
        let diff = max(crum.values.iter().zip(&ka.values).map(|(a, b)| (a - b).abs()));
        Ok(vec![Check::at_most("krein_adler_matches_crum D=[0, 1]", diff, 0.0)])
    }));
    checks
}

fn by_parity(levels: &[EigenLevel], parity: Parity, count: usize) -> Vec<EigenLevel> {
    levels.iter().filter(|l| l.parity == parity).take(count).copied().collect()
}

/// Gram matrices of the first four levels of each parity.
pub fn plain_orthogonality() -> Vec<Check> {
    [(1.0, -0.5), (1.0, 0.0)]
        .par_iter()
        .flat_map(|&(g, k)| {
            let name = format!("orthogonality {}", setting(g, k));
            guarded(&name, 1e-6, || {
                let p = params(g, k)?;
                let levels = compute_spectrum(&p, 8)?;
                let mut checks = Vec::new();
                for parity in [Parity::Even, Parity::Odd] {
                    let class = by_parity(&levels, parity, 4);
                    let rho = orthogonality_gram(&p, &class, Measure::RhoMeasure, p.rho0())?;
                    checks.push(Check::at_most(
                        format!("{name} {parity:?} rho_measure"),
                        rho.max_offdiag_ratio,
                        1e-6,
                    ));
                    let x = orthogonality_gram(&p, &class, Measure::XWeighted, 0.0)?;
                    checks.push(Check::at_most(
                        format!("{name} {parity:?} x_weighted"),
                        x.max_offdiag_ratio,
                        1e-6,
                    ));
                    let ratio = max((0..class.len()).map(|i| rel(x.matrix[i][i] / rho.matrix[i][i], 2.0 * g)));
                    checks.push(Check::at_most(format!("{name} {parity:?} measure_ratio"), ratio, 1e-8));
                }
                Ok(checks)
            })
        })
        .collect()
}

/// Wronskian-ratio Gram matrices after an order-`L` Crum deletion, and
/// their agreement with the Gram matrix of the deformed eigenfunctions.
pub fn deformed_orthogonality(orders: &[usize]) -> Vec<Check> {
    let (g, k) = DEFORM_SETTING;
    orders
        .par_iter()
        .flat_map(|&l| {
            let name = format!("deformed_orthogonality L={l} {}", setting(g, k));
            guarded(&name, 1e-5, || {
                let p = deform_params()?;
                let spectrum = compute_spectrum(&p, l + 8)?;
                let d = Deformation::new(&p, DeletionSet::crum(l)?, &spectrum)?;
                let mut checks = Vec::new();
                for parity in [Parity::Even, Parity::Odd] {
                    let class = by_parity(&spectrum[l..], parity, 4);
                    let ratios = deformed_orthogonality_gram(&p, l, &spectrum, &class, p.rho0())?;
                    checks.push(Check::at_most(
                        format!("{name} {parity:?}"),
                        ratios.max_offdiag_ratio,
                        1e-5,
                    ));
                    let states: Vec<Eigenstate> = class
                        .iter()
                        .map(|lv| Eigenstate::new(&p, *lv))
                        .collect::<Result<_>>()?;
                    let direct = deformed_state_gram(&d, &states, 0.0)?;
                    let (a, b) = (ratios.normalized(), direct.normalized());
                    let diff = max((0..a.len()).flat_map(|i| (0..a.len()).map(move |j| (i, j))).map(|(i, j)| (a[i][j] - b[i][j]).abs()));
                    checks.push(Check::at_most(format!("{name} {parity:?} two_routes"), diff, 1e-6));
                }
                Ok(checks)
            })
        })
        .collect()
}

/// Half-line overlaps of negative- and positive-energy states of equal
/// parity at `g = 1, k = 3`; every such pair must vanish. Pairs with equal
/// rank within their sign group are reported apart from the rest.
pub fn cross_energy_orthogonality() -> Vec<Check> {
    let name = "cross_energy_orthogonality g=1,k=3";
    guarded(name, 1e-6, || {
        let p = params(1.0, 3.0)?;
        let levels = compute_spectrum(&p, 10)?;
        let mut checks = Vec::new();
        for parity in [Parity::Even, Parity::Odd] {
            let class: Vec<EigenLevel> = levels.iter().filter(|l| l.parity == parity).copied().collect();
            let gram = orthogonality_gram(&p, &class, Measure::RhoMeasure, p.rho0())?;
            let norm = gram.normalized();
            let n_neg = class.iter().filter(|l| l.order.kind == OrderKind::Real).count();
            let (mut same_index, mut other_index) = (Vec::new(), Vec::new());
            for i in 0..n_neg {
                for j in n_neg..class.len() {
                    let bucket = if j - n_neg == i { &mut same_index } else { &mut other_index };
                    bucket.push(norm[i][j].abs());
                }
            }
            for (label, values) in [("same_index", same_index), ("other_index", other_index)] {
                if !values.is_empty() {
                    checks.push(Check::at_most(format!("{name} {parity:?} {label}"), max(values), 1e-6));
                }
            }
        }
        Ok(checks)
    })
}

/// `|wkb_count(ν_n) − n| ≤ 1` for `n ≤ 30`, with a smaller gap at `n = 30`
/// than at `n = 5`.
pub fn wkb_counting() -> Vec<Check> {
    [(1.0, 0.0), (1.0, -0.5)]
        .par_iter()
        .flat_map(|&(g, k)| {
            let name = format!("wkb_counting {}", setting(g, k));
            guarded(&name, 1.0, || {
                let p = params(g, k)?;
                let levels = compute_spectrum(&p, 31)?;
                let gaps = levels
                    .iter()
                    .map(|l| Ok((wkb_count(&p, l.order.value)? - l.index as f64).abs()))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(vec![
                    Check::at_most(format!("{name} max_gap"), max(gaps.iter().copied()), 1.0),
                    Check::above(format!("{name} gap5_minus_gap30"), gaps[5] - gaps[30], 0.0),
                ])
            })
        })
        .collect()
}
