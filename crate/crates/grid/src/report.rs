//! Convergence bookkeeping for ε-families and CSV emission.

use std::io::Write;
use std::path::Path;

use crate::error::GridError;

/// Mass tables along a decreasing ε-schedule and their successive differences.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub eps: Vec<f64>,
    /// `masses[i][b]`: mass over region `b` at `eps[i]`.
    pub masses: Vec<Vec<f64>>,
    /// `cauchy[i]` compares `eps[i+1]` with `eps[i]`, relative to the total absolute mass.
    pub cauchy: Vec<f64>,
    pub tolerance: f64,
    pub converged: bool,
    /// Start of the tail along which the differences shrink monotonically.
    pub eps0: Option<f64>,
}

impl ConvergenceReport {
    pub fn from_masses(eps: Vec<f64>, masses: Vec<Vec<f64>>, tolerance: f64) -> Self {
        let cauchy: Vec<f64> = masses
            .windows(2)
            .map(|w| {
                let scale: f64 = w[1].iter().map(|m| m.abs()).sum::<f64>().max(1e-300);
                w[1].iter().zip(&w[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
            })
            .collect();
        let converged = cauchy.last().map_or(false, |&c| c < tolerance);
        let eps0 = if cauchy.is_empty() {
            None
        } else {
            let mut start = cauchy.len() - 1;
            while start > 0 && cauchy[start - 1] >= cauchy[start] {
                start -= 1;
            }
            Some(eps[start])
        };
        ConvergenceReport { eps, masses, cauchy, tolerance, converged, eps0 }
    }

    pub fn last_masses(&self) -> Option<&[f64]> {
        self.masses.last().map(Vec::as_slice)
    }

    /// Writes `eps,region,mass` rows.
    pub fn write_csv(&self, path: &Path, region_names: &[String]) -> Result<(), GridError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "eps,region,mass")?;
        for (e, row) in self.eps.iter().zip(&self.masses) {
            for (b, m) in row.iter().enumerate() {
                let name = region_names.get(b).cloned().unwrap_or_else(|| b.to_string());
                writeln!(f, "{},{},{}", fmt_f64(*e), name, fmt_f64(*m))?;
            }
        }
        Ok(())
    }
}

/// Seventeen significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_tail() {
        let r = ConvergenceReport::from_masses(vec![1.0, 0.5, 0.25, 0.125], vec![vec![1.0], vec![1.5], vec![1.6], vec![1.61]], 0.01);
        assert!(r.converged);
        assert_eq!(r.eps0, Some(1.0));
        assert!((r.cauchy[0] - 1.0 / 3.0).abs() < 1e-12);
    }
}
