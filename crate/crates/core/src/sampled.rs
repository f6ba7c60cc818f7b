use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A function sampled on a uniform, strictly increasing grid together with
/// its first derivative at every node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() != derivs.len() {
            return Err(Error::InvalidParameter(format!(
                "grid/values/derivs lengths differ: {}/{}/{}",
                grid.len(),
                values.len(),
                derivs.len()
            )));
        }
        check_uniform(&grid)?;
        Ok(Self {
            grid,
            values,
            derivs,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        if self.grid.len() < 2 {
            0.0
        } else {
            self.grid[1] - self.grid[0]
        }
    }

    /// Number of sign changes, ignoring exact zeros and samples below
    /// `floor` times the peak magnitude.
    pub fn sign_changes(&self, floor: f64) -> usize {
        count_sign_changes(&self.values, floor)
    }

    /// Sample index whose grid point equals `-grid[i]`, for mirrored grids.
    pub fn mirror_index(&self, i: usize) -> Option<usize> {
        let j = self.grid.len().checked_sub(1 + i)?;
        let tol = 1e-9 * self.spacing().abs().max(1e-300);
        ((self.grid[j] + self.grid[i]).abs() <= tol).then_some(j)
    }
}

/// A uniform grid; rejects non-monotone or non-uniform spacing.
pub fn check_uniform(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Ok(());
    }
    let h = grid[1] - grid[0];
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("grid must be strictly increasing".into()));
    }
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h + 8.0 * f64::EPSILON * w[1].abs() {
            return Err(Error::InvalidParameter("grid spacing is not uniform".into()));
        }
    }
    Ok(())
}

/// `n` points spaced `2 x_max / n` apart, placed symmetrically about the
/// origin and never on it.
pub fn mirrored_grid(x_max: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * x_max / n as f64;
    (0..n).map(|i| -x_max + (i as f64 + 0.5) * h).collect()
}

/// `n` (odd) points covering `[−x_max, x_max]`, exactly symmetric and with
/// the origin as the middle sample.
pub fn centered_grid(x_max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("centered grid needs an odd sample count >= 3, got {n}")));
    }
    let c = (n / 2) as f64;
    let h = x_max / c;
    Ok((0..n).map(|i| (i as f64 - c) * h).collect())
}

/// `n` uniformly spaced points covering `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn count_sign_changes(values: &[f64], floor: f64) -> usize {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = floor * peak;
    let mut prev = 0.0f64;
    let mut changes = 0;
    for &v in values {
        if v.abs() <= cut {
            continue;
        }
        if prev != 0.0 && v.signum() != prev.signum() {
            changes += 1;
        }
        prev = v;
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn rejects_nonuniform_grid() {
        let g = vec![0.0, 1.0, 3.0];
        assert!(SampledFunction::new(g, vec![0.0; 3], vec![0.0; 3]).is_err());
    }

    #[test]
    fn mirrored_grid_skips_origin() {
        let g = mirrored_grid(2.0, 8);
        assert!(g.iter().all(|x| x.abs() > 0.1));
        let f = SampledFunction::new(g.clone(), vec![0.0; 8], vec![0.0; 8]).unwrap();
        assert_eq!(f.mirror_index(0), Some(7));
        assert_eq!(f.mirror_index(3), Some(4));
    }

    #[test]
    fn counts_sign_changes_above_floor() {
        let v = [1.0, 0.5, -0.2, -1.0, 1e-14, -1e-14, 0.3];
        assert_eq!(count_sign_changes(&v, 1e-10), 2);
    }
}
