//! Sampled scalar fields and (p,p)-form fields on grid charts.

use num_complex::Complex64;
use rayon::prelude::*;
use segre_core::form::combinations;

use crate::chart::{GridChart, RealBox};
use crate::error::GridError;
use crate::expr::ScalarExpr;
use crate::sum::chunked_sum;

/// Width of the boundary layer excluded from every mass integral.
pub const MASS_MARGIN: usize = 2;

#[derive(Clone, Debug)]
pub struct ScalarField {
    pub chart: GridChart,
    pub values: Vec<f64>,
    pub clamp_floor: Option<f64>,
    pub clamp_count: usize,
}

impl ScalarField {
    pub fn from_values(chart: GridChart, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != chart.n_nodes() {
            return Err(GridError::Invalid("value count does not match the chart".into()));
        }
        Ok(ScalarField { chart, values, clamp_floor: None, clamp_count: 0 })
    }

    /// Evaluates `expr` at every node. Values below `clamp_floor` (including `−∞`) are raised
    /// to it; remaining non-finite values are an error.
    pub fn sample(chart: &GridChart, expr: &ScalarExpr, clamp_floor: Option<f64>) -> Result<Self, GridError> {
        Self::sample_with(chart, |z| expr.eval(z), clamp_floor)
    }

    pub fn sample_with(chart: &GridChart, f: impl Fn(&[Complex64]) -> f64 + Sync, clamp_floor: Option<f64>) -> Result<Self, GridError> {
        let d = chart.dim();
        let mut values = vec![0.0; chart.n_nodes()];
        values.par_chunks_mut(4096).enumerate().for_each(|(ci, chunk)| {
            let mut z = vec![Complex64::new(0.0, 0.0); d];
            for (k, v) in chunk.iter_mut().enumerate() {
                chart.point_into(ci * 4096 + k, &mut z);
                *v = f(&z);
            }
        });
        let mut clamp_count = 0;
        if let Some(floor) = clamp_floor {
            for v in values.iter_mut() {
                if *v < floor || *v == f64::NEG_INFINITY {
                    *v = floor;
                    clamp_count += 1;
                }
            }
        }
        let bad: Vec<usize> = values.iter().enumerate().filter(|(_, v)| !v.is_finite()).map(|(i, _)| i).take(1).collect();
        if let Some(&first) = bad.first() {
            let count = values.iter().filter(|v| !v.is_finite()).count();
            return Err(GridError::NonFinite { count, first });
        }
        Ok(ScalarField { chart: chart.clone(), values, clamp_floor, clamp_count })
    }

    /// Mean absolute difference over interior nodes.
    pub fn l1_distance(&self, other: &ScalarField) -> Result<f64, GridError> {
        if !self.chart.same_grid(&other.chart) {
            return Err(GridError::IncompatibleCharts);
        }
        let diffs: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).collect();
        Ok(chunked_sum(&diffs) / diffs.len() as f64)
    }
}

/// Increasing index lists of a fixed length and the storage layout of Hermitian coefficient pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexTable {
    pub dim: usize,
    pub degree: usize,
    pub lists: Vec<Vec<usize>>,
}

impl IndexTable {
    pub fn new(dim: usize, degree: usize) -> Self {
        IndexTable { dim, degree, lists: combinations(dim, degree) }
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn position(&self, list: &[usize]) -> Option<usize> {
        self.lists.iter().position(|l| l.as_slice() == list)
    }

    /// Storage slot of the off-diagonal pair `(i, j)` with `i < j`.
    pub fn off_slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        let m = self.len();
        // Row-major upper triangle without the diagonal.
        i * (2 * m - i - 1) / 2 + (j - i - 1)
    }

    pub fn n_off(&self) -> usize {
        let m = self.len();
        m * (m - 1) / 2
    }
}

/// A (p,p)-form field `Σ T_IJ β_IJ` with Hermitian coefficients, `T_JI = conj(T_IJ)`.
///
/// Only the real diagonal and the upper off-diagonal coefficients are stored. Nodes within
/// `margin` of the boundary hold no meaningful values.
#[derive(Clone, Debug)]
pub struct FormField {
    pub chart: GridChart,
    pub index: IndexTable,
    pub diag: Vec<Vec<f64>>,
    pub off: Vec<Vec<Complex64>>,
    pub margin: usize,
}

impl FormField {
    pub fn zeros(chart: &GridChart, degree: usize, margin: usize) -> Result<Self, GridError> {
        let d = chart.dim();
        if degree > d {
            return Err(GridError::BidegreeOverflow(degree, d));
        }
        let index = IndexTable::new(d, degree);
        let n = chart.n_nodes();
        let diag = (0..index.len()).map(|_| vec![0.0; n]).collect();
        let off = (0..index.n_off()).map(|_| vec![Complex64::new(0.0, 0.0); n]).collect();
        Ok(FormField { chart: chart.clone(), index, diag, off, margin })
    }

    /// The constant 0-form 1.
    pub fn one(chart: &GridChart) -> Self {
        let mut f = Self::zeros(chart, 0, 0).expect("degree 0");
        f.diag[0].iter_mut().for_each(|v| *v = 1.0);
        f
    }

    pub fn degree(&self) -> usize {
        self.index.degree
    }

    pub fn dim(&self) -> usize {
        self.index.dim
    }

    /// Coefficient `T_IJ` at a node, by positions in the index table.
    #[inline]
    pub fn get(&self, node: usize, i: usize, j: usize) -> Complex64 {
        if i == j {
            Complex64::new(self.diag[i][node], 0.0)
        } else if i < j {
            self.off[self.index.off_slot(i, j)][node]
        } else {
            self.off[self.index.off_slot(j, i)][node].conj()
        }
    }

    /// Sets `T_IJ` (and implicitly `T_JI`); the imaginary part of diagonal entries is dropped.
    #[inline]
    pub fn set(&mut self, node: usize, i: usize, j: usize, v: Complex64) {
        if i == j {
            self.diag[i][node] = v.re;
        } else if i < j {
            let s = self.index.off_slot(i, j);
            self.off[s][node] = v;
        } else {
            let s = self.index.off_slot(j, i);
            self.off[s][node] = v.conj();
        }
    }

    /// Density of `T ∧ (dd^c|z|²)^{d−p}` with respect to Lebesgue measure.
    #[inline]
    pub fn trace_density(&self, node: usize) -> f64 {
        let d = self.dim();
        let p = self.degree();
        let fact: f64 = (1..=(d - p)).map(|k| k as f64).product();
        let s: f64 = self.diag.iter().map(|c| c[node]).sum();
        fact * s / std::f64::consts::PI.powi(d as i32)
    }

    /// Mass `∫ T ∧ (dd^c|z|²)^{d−p}` over the interior nodes accepted by `region`.
    pub fn mass_where(&self, region: impl Fn(&[f64]) -> bool + Sync) -> f64 {
        let chart = &self.chart;
        let margin = self.margin.max(MASS_MARGIN);
        let rd = chart.real_dim();
        let n = chart.n_nodes();
        let contrib: Vec<f64> = (0..n)
            .into_par_iter()
            .with_min_len(4096)
            .map(|node| {
                if !chart.is_interior(node, margin) {
                    return 0.0;
                }
                let mut x = [0.0f64; 6];
                chart.real_coords(node, &mut x[..rd]);
                if region(&x[..rd]) {
                    self.trace_density(node)
                } else {
                    0.0
                }
            })
            .collect();
        chunked_sum(&contrib) * chart.cell_volume()
    }

    pub fn mass_in_box(&self, b: &RealBox) -> f64 {
        self.mass_where(|x| b.contains(x))
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_where(|_| true)
    }

    /// Mass in the Euclidean ball `|z − x| < r`.
    pub fn ball_mass(&self, x: &[Complex64], r: f64) -> f64 {
        let c: Vec<f64> = x.iter().flat_map(|z| [z.re, z.im]).collect();
        let r2 = r * r;
        self.mass_where(|y| y.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < r2)
    }

    /// Applies `f` to every stored coefficient, node by node.
    pub fn map_nodes(&mut self, f: impl Fn(usize, &mut [f64], &mut [Complex64])) {
        let nd = self.diag.len();
        let no = self.off.len();
        let mut dbuf = vec![0.0; nd];
        let mut obuf = vec![Complex64::new(0.0, 0.0); no];
        for node in 0..self.chart.n_nodes() {
            for (k, b) in dbuf.iter_mut().enumerate() {
                *b = self.diag[k][node];
            }
            for (k, b) in obuf.iter_mut().enumerate() {
                *b = self.off[k][node];
            }
            f(node, &mut dbuf, &mut obuf);
            for (k, b) in dbuf.iter().enumerate() {
                self.diag[k][node] = *b;
            }
            for (k, b) in obuf.iter().enumerate() {
                self.off[k][node] = *b;
            }
        }
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: f64, other: &FormField, b: f64) -> Result<FormField, GridError> {
        if !self.chart.same_grid(&other.chart) {
            return Err(GridError::IncompatibleCharts);
        }
        if self.degree() != other.degree() {
            return Err(GridError::Invalid("adding forms of different degree".into()));
        }
        let mut out = self.clone();
        out.margin = self.margin.max(other.margin);
        for (o, q) in out.diag.iter_mut().zip(&other.diag) {
            o.par_iter_mut().zip(q.par_iter()).for_each(|(x, y)| *x = a * *x + b * y);
        }
        for (o, q) in out.off.iter_mut().zip(&other.off) {
            o.par_iter_mut().zip(q.par_iter()).for_each(|(x, y)| *x = *x * a + y * b);
        }
        Ok(out)
    }

    /// Relative L¹ distance `Σ|T − S| / Σ|S|` over all coefficients at interior nodes.
    pub fn relative_l1(&self, reference: &FormField, margin: usize) -> Result<f64, GridError> {
        if !self.chart.same_grid(&reference.chart) || self.degree() != reference.degree() {
            return Err(GridError::IncompatibleCharts);
        }
        let m = margin.max(self.margin).max(reference.margin);
        let n = self.chart.n_nodes();
        let pairs: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .with_min_len(4096)
            .map(|node| {
                if !self.chart.is_interior(node, m) {
                    return (0.0, 0.0);
                }
                let mut num = 0.0;
                let mut den = 0.0;
                for k in 0..self.diag.len() {
                    num += (self.diag[k][node] - reference.diag[k][node]).abs();
                    den += reference.diag[k][node].abs();
                }
                for k in 0..self.off.len() {
                    // Off-diagonal entries appear twice in the full coefficient matrix.
                    num += 2.0 * (self.off[k][node] - reference.off[k][node]).norm();
                    den += 2.0 * reference.off[k][node].norm();
                }
                (num, den)
            })
            .collect();
        let num: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let den: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let d = chunked_sum(&den);
        if d == 0.0 {
            return Err(GridError::Invalid("reference form vanishes".into()));
        }
        Ok(chunked_sum(&num) / d)
    }
}
