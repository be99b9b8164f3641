//! Projectivization charts of `ℙ(E)`, the induced potential `ψ` on them, and fiber integration
//! of grid forms. This is the direct route to `s_k = p_*((dd^cψ)^{k+r−1})`; the closed-form fiber
//! integral in `fiber` is checked against it.

use num_complex::Complex64;
use rayon::prelude::*;
use segre_grid::field::IndexTable;
use segre_grid::ops::{ddc, power};
use segre_grid::{FormField, GridChart, ScalarField};

use crate::error::BundleError;
use crate::jet::CompiledMetric;
use crate::metric::{BundleSpec, SingularMetric};

/// Fiber box half-width; the unit polydisc plus room for the dd^c stencil.
pub const FIBER_HALF_WIDTH: f64 = 1.25;
/// Sub-samples per cell side used for the fractional coverage of the unit disc.
const COVERAGE_SAMPLES: usize = 8;

/// The chart `α_j ≠ 0` of `ℙ(E)` over a base chart: inhomogeneous coordinates `w` in the other
/// `r − 1` slots, `α = (w_1, …, 1, …, w_{r−1})`.
#[derive(Clone, Debug)]
pub struct ProjectivizationChart {
    pub base: GridChart,
    pub rank: usize,
    pub index: usize,
    pub product: GridChart,
}

impl ProjectivizationChart {
    pub fn new(spec: &BundleSpec, index: usize, fiber_resolution: usize) -> Result<Self, BundleError> {
        let r = spec.rank;
        if index >= r {
            return Err(BundleError::InvalidMetric(format!("chart index {index} out of range for rank {r}")));
        }
        if r < 2 {
            return Err(BundleError::Unsupported("ℙ(E) of a line bundle is the base itself".into()));
        }
        let base = spec.chart.clone();
        let mut center = base.center().to_vec();
        center.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(r - 1));
        let mut half = base.half_widths().to_vec();
        half.extend(std::iter::repeat(FIBER_HALF_WIDTH).take(r - 1));
        let mut res = base.resolution().to_vec();
        res.extend(std::iter::repeat(fiber_resolution).take(r - 1));
        let product = GridChart::new(center, half, res)?;
        Ok(ProjectivizationChart { base, rank: r, index, product })
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    /// Homogeneous vector of a product point.
    pub fn alpha(&self, w: &[Complex64]) -> Vec<Complex64> {
        let mut a = Vec::with_capacity(self.rank);
        let mut it = w.iter();
        for i in 0..self.rank {
            a.push(if i == self.index { Complex64::new(1.0, 0.0) } else { *it.next().expect("r − 1 fiber coordinates") });
        }
        a
    }
}

/// `ψ_ε = log(|α|²_h + ε|α|²_{h₀})` with `α_j = 1`.
pub fn induced_psi(spec: &BundleSpec, metric: &SingularMetric, pchart: &ProjectivizationChart, eps: f64) -> Result<ScalarField, BundleError> {
    let n = pchart.base_dim();
    let h = CompiledMetric::new(metric, n);
    let h0 = CompiledMetric::smooth(&spec.reference);
    let quad = |m: &nalgebra::DMatrix<Complex64>, a: &[Complex64]| -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..a.len() {
            for j in 0..a.len() {
                s += a[i].conj() * m[(i, j)] * a[j];
            }
        }
        s.re
    };
    let field = ScalarField::sample_with(
        &pchart.product,
        |z| {
            let (x, w) = z.split_at(n);
            let a = pchart.alpha(w);
            let v = quad(&h.value(x), &a) + if eps > 0.0 { eps * quad(&h0.value(x), &a) } else { 0.0 };
            if v > 0.0 {
                v.ln()
            } else {
                f64::NEG_INFINITY
            }
        },
        None,
    )?;
    if field.values.iter().any(|v| !v.is_finite()) {
        return Err(BundleError::Degenerate("the induced potential is −∞ on the chart".into()));
    }
    Ok(field)
}

/// Fraction of each fiber cell inside the closed unit disc, per axis pair.
fn disc_weights(chart: &GridChart, axis: usize) -> Vec<f64> {
    let (nx, ny) = (chart.axis_len(2 * axis), chart.axis_len(2 * axis + 1));
    let (hx, hy) = (chart.step(axis), chart.step(axis));
    let mut out = vec![0.0; nx * ny];
    let s = COVERAGE_SAMPLES;
    for ix in 0..nx {
        for iy in 0..ny {
            let (x, y) = (chart.axis_coord(2 * axis, ix), chart.axis_coord(2 * axis + 1, iy));
            let mut inside = 0;
            for a in 0..s {
                for b in 0..s {
                    let u = x + hx * ((a as f64 + 0.5) / s as f64 - 0.5);
                    let v = y + hy * ((b as f64 + 0.5) / s as f64 - 0.5);
                    if u * u + v * v <= 1.0 {
                        inside += 1;
                    }
                }
            }
            out[ix * ny + iy] = inside as f64 / (s * s) as f64;
        }
    }
    out
}

/// Integrates a `(k+r−1, k+r−1)` form on a product chart over the unit-polydisc fiber region,
/// giving a `(k,k)` form on the base.
pub fn fiber_pushforward(form: &FormField, pchart: &ProjectivizationChart, k: usize) -> Result<FormField, BundleError> {
    let n = pchart.base_dim();
    let f = pchart.rank - 1;
    if form.degree() != k + f {
        return Err(BundleError::BidegreeMismatch { expected: k + f, found: form.degree() });
    }
    let base = &pchart.base;
    let product = &pchart.product;
    let mut out = FormField::zeros(base, k, form.margin)?;
    let table = IndexTable::new(n, k);
    let fiber: Vec<usize> = (n..n + f).collect();
    let lift = |list: &[usize]| -> usize {
        let mut l = list.to_vec();
        l.extend(&fiber);
        form.index.position(&l).expect("lifted index list")
    };
    let slots: Vec<(usize, usize, usize, usize)> =
        (0..table.len()).flat_map(|i| (i..table.len()).map(move |j| (i, j))).map(|(i, j)| (i, j, lift(&table.lists[i]), lift(&table.lists[j]))).collect();

    // Fiber nodes with their coverage weight and real-axis indices.
    let weights: Vec<Vec<f64>> = (0..f).map(|a| disc_weights(product, n + a)).collect();
    let fiber_axes: Vec<usize> = (2 * n..2 * (n + f)).collect();
    let per_axis: Vec<usize> = fiber_axes.iter().map(|&r| product.axis_len(r)).collect();
    let count: usize = per_axis.iter().product();
    let mut fiber_nodes: Vec<(usize, f64)> = Vec::new();
    let mut idx = vec![0usize; fiber_axes.len()];
    for mut c in 0..count {
        for (slot, len) in idx.iter_mut().zip(&per_axis).rev() {
            *slot = c % len;
            c /= len;
        }
        let mut w = 1.0;
        for a in 0..f {
            let (ix, iy) = (idx[2 * a], idx[2 * a + 1]);
            w *= weights[a][ix * per_axis[2 * a + 1] + iy];
        }
        if w > 0.0 {
            let offset: usize = fiber_axes.iter().zip(&idx).map(|(&r, &i)| i * product.stride(r)).sum();
            fiber_nodes.push((offset, w));
        }
    }
    let fiber_cell: f64 = (0..f).map(|a| product.step(n + a).powi(2)).product::<f64>() / std::f64::consts::PI.powi(f as i32);

    let values: Vec<Vec<Complex64>> = (0..base.n_nodes())
        .into_par_iter()
        .with_min_len(64)
        .map(|node| {
            let mut bi = vec![0usize; 2 * n];
            base.indices(node, &mut bi);
            let origin: usize = bi.iter().enumerate().map(|(r, &i)| i * product.stride(r)).sum();
            slots
                .iter()
                .map(|&(_, _, p, q)| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(off, w) in &fiber_nodes {
                        acc += form.get(origin + off, p, q) * w;
                    }
                    acc * fiber_cell
                })
                .collect()
        })
        .collect();
    for (node, v) in values.iter().enumerate() {
        for (s, &(i, j, _, _)) in slots.iter().enumerate() {
            out.set(node, i, j, v[s]);
        }
    }
    Ok(out)
}

/// `s_k(E, h_ε)` by sampling `ψ_ε` on every chart, taking `(dd^cψ_ε)^{k+r−1}` on the grid and
/// integrating over the fibers.
pub fn grid_segre(spec: &BundleSpec, metric: &SingularMetric, k: usize, eps: f64, fiber_resolution: usize) -> Result<FormField, BundleError> {
    let mut total: Option<FormField> = None;
    for j in 0..spec.rank {
        let pc = ProjectivizationChart::new(spec, j, fiber_resolution)?;
        let psi = induced_psi(spec, metric, &pc, eps)?;
        let t = power(&ddc(&psi)?, k + spec.rank - 1)?;
        let part = fiber_pushforward(&t, &pc, k)?;
        total = Some(match total {
            Some(acc) => acc.linear_combination(1.0, &part, 1.0)?,
            None => part,
        });
    }
    total.ok_or_else(|| BundleError::Unsupported("rank zero".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::FiberQuadrature;
    use crate::segre::SegreEngine;
    use segre_core::parse::parse_holomorphic;

    fn spec1(res: usize) -> BundleSpec {
        BundleSpec::new(GridChart::centered(1, 1.0, res).unwrap(), 2, None).unwrap()
    }

    #[test]
    fn fubini_study_pushes_forward_to_one() {
        let spec = spec1(8);
        let h = SingularMetric::Smooth(crate::HermitianPolyMatrix::identity(1, 2));
        let s0 = grid_segre(&spec, &h, 0, 0.0, 48).unwrap();
        let chart = &s0.chart;
        for node in 0..chart.n_nodes() {
            if chart.is_interior(node, 2) {
                assert!((s0.diag[0][node] - 1.0).abs() < 0.01, "{}", s0.diag[0][node]);
            }
        }
    }

    #[test]
    fn grid_and_closed_form_s1_agree() {
        // A rank-2 metric with a degeneracy on x1 = 0, regularized at ε = 1/4.
        let spec = spec1(16);
        let p = |s: &str| parse_holomorphic(s, 1).unwrap();
        let m = SingularMetric::MorphismInduced { g: vec![vec![p("x1"), p("0")], vec![p("0"), p("1")]], target: None };
        let grid = grid_segre(&spec, &m, 1, 0.25, 48).unwrap();
        let engine = SegreEngine::new(&spec, &m, 1, FiberQuadrature::Exact).unwrap();
        let exact = engine.fields(&spec.chart, 0.25).unwrap();
        let err = grid.relative_l1(&exact[1], 2).unwrap();
        assert!(err < 0.03, "relative L1 {err}");
    }
}
