//! Interlacing of the even-condition zeros `λ_j` and odd-condition zeros
//! `η_j` on the imaginary order axis.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::morse_ref::PotentialParams;
use crate::spectrum::{imaginary_axis_roots, SpectrumOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSequences {
    pub lambdas: Vec<f64>,
    pub etas: Vec<f64>,
    /// `λ₀, η₀, λ₁, η₁, …` up to the shorter sequence.
    pub merged: Vec<f64>,
}

impl ZeroSequences {
    pub fn new(lambdas: Vec<f64>, etas: Vec<f64>) -> Self {
        let merged = lambdas
            .iter()
            .zip(&etas)
            .flat_map(|(&l, &e)| [l, e])
            .collect();
        Self { lambdas, etas, merged }
    }

    /// The first `count` zeros of each condition for the given parameters.
    pub fn compute(params: &PotentialParams, count: usize) -> Result<Self> {
        let (even, odd) = imaginary_axis_roots(params, count, &SpectrumOptions::default())?;
        Ok(Self::new(
            even.iter().map(|r| r.order.value).collect(),
            odd.iter().map(|r| r.order.value).collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlacingViolation {
    /// Position in the merged sequence where the ordering first fails.
    pub position: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlacingReport {
    pub holds: bool,
    pub violation: Option<InterlacingViolation>,
}

fn label(i: usize) -> String {
    if i.is_multiple_of(2) {
        format!("λ{}", i / 2)
    } else {
        format!("η{}", i / 2)
    }
}

/// Checks `x/2 < λ₀ < η₀ < λ₁ < η₁ < …`.
pub fn interlacing_check(zeros: &ZeroSequences, x: f64) -> InterlacingReport {
    let m = &zeros.merged;
    let violation = if m.is_empty() {
        Some(InterlacingViolation {
            position: 0,
            detail: "no zeros".into(),
        })
    } else if !(m[0] > 0.5 * x) {
        Some(InterlacingViolation {
            position: 0,
            detail: format!("λ0 = {} is not above x/2 = {}", m[0], 0.5 * x),
        })
    } else {
        m.windows(2).position(|w| !(w[0] < w[1])).map(|i| InterlacingViolation {
            position: i + 1,
            detail: format!(
                "{} = {} is not above {} = {}",
                label(i + 1),
                m[i + 1],
                label(i),
                m[i]
            ),
        })
    };
    InterlacingReport {
        holds: violation.is_none(),
        violation,
    }
}
