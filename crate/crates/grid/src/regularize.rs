//! Decreasing regularizations of plurisubharmonic functions.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chart::GridChart;
use crate::error::GridError;
use crate::expr::ScalarExpr;
use crate::field::ScalarField;

/// `log(e^a + ε)` without overflow; `a = −∞` gives `log ε`.
#[inline]
pub fn log_add_eps(a: f64, ln_eps: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return ln_eps;
    }
    let m = a.max(ln_eps);
    m + ((a - m).exp() + (ln_eps - m).exp()).ln()
}

/// `ψ_ε = log(e^{ψ−ψ₀} + ε) + ψ₀`, decreasing to `ψ` as `ε ↓ 0`.
pub fn regularize_chi(psi: &ScalarExpr, psi0: &ScalarExpr, eps: f64, chart: &GridChart) -> Result<ScalarField, GridError> {
    if !(eps > 0.0) {
        return Err(GridError::Invalid("ε must be positive".into()));
    }
    let ln_eps = eps.ln();
    ScalarField::sample_with(
        chart,
        |z| {
            let p0 = psi0.eval(z);
            log_add_eps(psi.eval(z) - p0, ln_eps) + p0
        },
        None,
    )
}

/// Discrete radial bump kernel of radius `eps` on the lattice of the first `x_dims` complex
/// coordinates: offsets and normalized weights.
fn kernel(chart: &GridChart, x_dims: usize, eps: f64) -> Vec<(Vec<Complex64>, f64)> {
    let steps: Vec<f64> = (0..x_dims).map(|a| chart.step(a)).collect();
    let reach: Vec<i64> = steps.iter().map(|h| (eps / h).floor() as i64).collect();
    let mut out = Vec::new();
    let mut idx = vec![0i64; 2 * x_dims];
    for (r, v) in idx.iter_mut().enumerate() {
        *v = -reach[r / 2];
    }
    loop {
        let offs: Vec<Complex64> = (0..x_dims).map(|a| Complex64::new(idx[2 * a] as f64 * steps[a], idx[2 * a + 1] as f64 * steps[a])).collect();
        let t2: f64 = offs.iter().map(|o| o.norm_sqr()).sum::<f64>() / (eps * eps);
        if t2 < 1.0 {
            out.push((offs, (-1.0 / (1.0 - t2)).exp()));
        }
        // Odometer increment.
        let mut r = 2 * x_dims;
        loop {
            if r == 0 {
                let total: f64 = out.iter().map(|(_, w)| w).sum();
                for (_, w) in out.iter_mut() {
                    *w /= total;
                }
                return out;
            }
            r -= 1;
            if idx[r] < reach[r / 2] {
                idx[r] += 1;
                break;
            }
            idx[r] = -reach[r / 2];
        }
    }
}

/// `ψ̃_ε = log(ρ_ε ∗ e^ψ + A·ε·e^v)`, convolving in the first `x_dims` coordinates only.
/// The convolution samples `e^ψ` symbolically, so no boundary padding is needed.
pub fn regularize_mollify(psi: &ScalarExpr, v: &ScalarExpr, eps: f64, a: f64, chart: &GridChart, x_dims: usize) -> Result<ScalarField, GridError> {
    if !(eps > 0.0) || !(a > 0.0) {
        return Err(GridError::Invalid("ε and A must be positive".into()));
    }
    if x_dims == 0 || x_dims > chart.dim() {
        return Err(GridError::Invalid("mollified coordinates out of range".into()));
    }
    let ker = kernel(chart, x_dims, eps);
    let d = chart.dim();
    let mut values = vec![0.0; chart.n_nodes()];
    values.par_chunks_mut(1024).enumerate().for_each(|(ci, chunk)| {
        let mut z = vec![Complex64::new(0.0, 0.0); d];
        let mut y = vec![Complex64::new(0.0, 0.0); d];
        for (k, out) in chunk.iter_mut().enumerate() {
            chart.point_into(ci * 1024 + k, &mut z);
            y.copy_from_slice(&z);
            let mut conv = 0.0;
            for (offs, w) in &ker {
                for (a_, o) in offs.iter().enumerate() {
                    y[a_] = z[a_] + o;
                }
                conv += w * psi.eval(&y).exp();
            }
            *out = (conv + a * eps * v.eval(&z).exp()).ln();
        }
    });
    ScalarField::from_values(chart.clone(), values)
}

#[derive(Debug)]
pub struct MollifyResult {
    pub a: f64,
    pub doublings: u32,
    pub fields: Vec<(f64, ScalarField)>,
    /// Mean absolute distance to `ψ` over nodes where `ψ` is finite.
    pub l1_to_psi: Vec<f64>,
}

/// Finds the smallest `A = 2^j` for which the mollified family is pointwise decreasing in ε
/// along the schedule, and returns the family.
pub fn mollify_schedule(psi: &ScalarExpr, v: &ScalarExpr, schedule: &[f64], chart: &GridChart, x_dims: usize, max_doublings: u32) -> Result<MollifyResult, GridError> {
    if schedule.is_empty() || schedule.windows(2).any(|w| !(w[1] < w[0])) || schedule.iter().any(|&e| !(e > 0.0)) {
        return Err(GridError::NonMonotoneSchedule);
    }
    let exact = ScalarField::sample_with(chart, |z| psi.eval(z), None).ok();
    let mut a = 1.0;
    let mut last_violations = 0;
    for doublings in 0..=max_doublings {
        let fields: Vec<(f64, ScalarField)> =
            schedule.iter().map(|&e| regularize_mollify(psi, v, e, a, chart, x_dims).map(|f| (e, f))).collect::<Result<_, _>>()?;
        let violations: usize = fields
            .windows(2)
            .map(|w| w[1].1.values.iter().zip(&w[0].1.values).filter(|(fine, coarse)| **fine > **coarse + 1e-12 * (1.0 + coarse.abs())).count())
            .sum();
        if violations == 0 {
            let l1_to_psi = match &exact {
                Some(ex) => fields.iter().map(|(_, f)| f.l1_distance(ex)).collect::<Result<_, _>>()?,
                None => fields
                    .iter()
                    .map(|(_, f)| {
                        let mut s = 0.0;
                        let mut n = 0usize;
                        let mut z = vec![Complex64::new(0.0, 0.0); chart.dim()];
                        for (node, val) in f.values.iter().enumerate() {
                            chart.point_into(node, &mut z);
                            let p = psi.eval(&z);
                            if p.is_finite() {
                                s += (val - p).abs();
                                n += 1;
                            }
                        }
                        s / n.max(1) as f64
                    })
                    .collect(),
            };
            return Ok(MollifyResult { a, doublings, fields, l1_to_psi });
        }
        last_violations = violations;
        a *= 2.0;
    }
    Err(GridError::MonotonicityViolation { nodes: last_violations, doublings: max_doublings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_regularization_is_decreasing() {
        let g = GridChart::centered(1, 1.0, 17).unwrap();
        let psi = ScalarExpr::func(|z| z[0].norm_sqr().ln());
        let zero = ScalarExpr::Const(0.0);
        let a = regularize_chi(&psi, &zero, 0.1, &g).unwrap();
        let b = regularize_chi(&psi, &zero, 0.01, &g).unwrap();
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| y <= x));
        let origin = g.nearest_node(&[Complex64::new(0.0, 0.0)]);
        assert!((b.values[origin] - 0.01f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        let g = GridChart::centered(1, 1.0, 33).unwrap();
        let k = kernel(&g, 1, 0.3);
        let total: f64 = k.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mean: Complex64 = k.iter().map(|(o, w)| o[0] * w).sum();
        assert!(mean.norm() < 1e-12);
    }
}
