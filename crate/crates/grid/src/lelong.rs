//! Lelong number estimates from ball masses of sampled currents.

use num_complex::Complex64;

use crate::error::GridError;
use crate::field::{FormField, MASS_MARGIN};
use crate::ops::{power, wedge};

/// Largest number of dyadic radii used by [`lelong_estimate`].
pub const MAX_RADII: usize = 6;
/// Allowed deviation of a log-log slope from the expected exponent.
pub const SLOPE_TOLERANCE: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub struct LelongRow {
    pub radius: f64,
    pub mass: f64,
    /// `mass / r^{2(d−k)}`.
    pub nu: f64,
    /// `log₂(m_i / m_{i+1})`, absent for the smallest radius.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LelongEstimate {
    pub point: Vec<Complex64>,
    pub exponent: f64,
    pub rows: Vec<LelongRow>,
    pub value: f64,
    /// Two consecutive slopes matched the exponent (a plateau over three radii).
    pub confident: bool,
}

/// Estimates `ν(T, x)` from masses on dyadic balls `r_max / 2^i`, `r ≥ 2h`.
///
/// The value is `ν` at the largest radius whose slope matches `2(d−k)`; without such a radius it
/// falls back to the smallest radius and is marked unconfident.
pub fn lelong_estimate(t: &FormField, x: &[Complex64], r_max: Option<f64>) -> Result<LelongEstimate, GridError> {
    let chart = &t.chart;
    let d = t.dim();
    let k = t.degree();
    if x.len() != d {
        return Err(GridError::Invalid("point dimension does not match the chart".into()));
    }
    let r_in = chart.inner_radius(x, t.margin.max(MASS_MARGIN));
    let r_max = r_max.map_or(r_in, |r| r.min(r_in));
    let h = chart.max_step();
    let mut radii = Vec::new();
    let mut r = r_max;
    while r >= 2.0 * h && radii.len() < MAX_RADII {
        radii.push(r);
        r /= 2.0;
    }
    if radii.len() < 2 {
        return Err(GridError::ChartTooSmall(format!("ball of radius {r_max:.3e} at the point is too small for step {h:.3e}")));
    }
    let e = 2.0 * (d - k) as f64;
    let masses: Vec<f64> = radii.iter().map(|&r| t.ball_mass(x, r)).collect();
    let rows: Vec<LelongRow> = radii
        .iter()
        .zip(&masses)
        .enumerate()
        .map(|(i, (&r, &m))| LelongRow {
            radius: r,
            mass: m,
            nu: m / r.powf(e),
            slope: masses.get(i + 1).filter(|&&next| m > 0.0 && next > 0.0).map(|&next| (m / next).log2()),
        })
        .collect();
    let matches = |row: &LelongRow| row.slope.is_some_and(|s| (s - e).abs() <= SLOPE_TOLERANCE);
    let (value, confident) = match rows.iter().position(matches) {
        Some(i) => (rows[i].nu, rows.get(i + 1).is_some_and(matches)),
        None => (rows.last().expect("two radii").nu, false),
    };
    Ok(LelongEstimate { point: x.to_vec(), exponent: e, rows, value, confident })
}

/// Linear extrapolation to `ε = 0` from the last two entries of an ε-sequence.
pub fn richardson(eps: &[f64], values: &[f64]) -> Option<f64> {
    let n = eps.len().min(values.len());
    if n < 2 {
        return values.first().copied();
    }
    let (e1, e2) = (eps[n - 2], eps[n - 1]);
    let (v1, v2) = (values[n - 2], values[n - 1]);
    if e1 == e2 {
        return None;
    }
    Some(v2 + (v2 - v1) * e2 / (e1 - e2))
}

/// `dd^c log(|z − x|² + δ)` sampled exactly.
pub fn log_kernel(t: &FormField, x: &[Complex64], delta: f64) -> Result<FormField, GridError> {
    let chart = &t.chart;
    let d = chart.dim();
    let mut out = FormField::zeros(chart, 1, 0)?;
    let mut z = vec![Complex64::new(0.0, 0.0); d];
    let mut w = vec![Complex64::new(0.0, 0.0); d];
    for node in 0..chart.n_nodes() {
        chart.point_into(node, &mut z);
        for a in 0..d {
            w[a] = z[a] - x[a];
        }
        let s = w.iter().map(|c| c.norm_sqr()).sum::<f64>() + delta;
        for a in 0..d {
            for b in a..d {
                let mut v = -w[a].conj() * w[b] / (s * s);
                if a == b {
                    v += 1.0 / s;
                }
                out.set(node, a, b, v);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelEstimate {
    pub radius: f64,
    /// `(δ, mass)` pairs along the δ-schedule.
    pub masses: Vec<(f64, f64)>,
}

/// Masses of `(dd^c log(|z−x|²+δ))^{d−k} ∧ T` on `B(x, r/2)`, which tend to `ν(T, x)` as
/// `δ ↓ 0` and `r ↓ 0`.
pub fn kernel_estimate(t: &FormField, x: &[Complex64], deltas: &[f64]) -> Result<KernelEstimate, GridError> {
    let chart = &t.chart;
    let radius = 0.5 * chart.inner_radius(x, t.margin.max(MASS_MARGIN));
    if radius < 2.0 * chart.max_step() {
        return Err(GridError::ChartTooSmall("no room for the kernel ball".into()));
    }
    let codim = t.dim() - t.degree();
    let mut masses = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if !(delta > 0.0) {
            return Err(GridError::Invalid("δ must be positive".into()));
        }
        let kern = power(&log_kernel(t, x, delta)?, codim)?;
        let top = if codim == 0 { t.clone() } else { wedge(&kern, t)? };
        masses.push((delta, top.ball_mass(x, radius)));
    }
    Ok(KernelEstimate { radius, masses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::GridChart;
    use crate::field::ScalarField;
    use crate::ops::ddc;
    use crate::regularize::log_add_eps;

    fn log_point_current(eps: f64, n: usize) -> FormField {
        let g = GridChart::centered(1, 1.0, n).unwrap();
        let f = ScalarField::sample_with(&g, |z| log_add_eps(z[0].norm_sqr().ln(), eps.ln()), None).unwrap();
        ddc(&f).unwrap()
    }

    #[test]
    fn point_mass_has_lelong_one() {
        let t = log_point_current(1e-3, 129);
        let est = lelong_estimate(&t, &[Complex64::new(0.0, 0.0)], None).unwrap();
        assert_eq!(est.exponent, 0.0);
        assert!((est.value - 1.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn smooth_form_has_lelong_zero_density_scaling() {
        // (dd^c|z|²) has ν = 1 when measured with exponent 2, i.e. as a (0,0)-current wedge ω.
        let g = GridChart::centered(1, 1.0, 65).unwrap();
        let t = FormField::one(&g);
        let est = lelong_estimate(&t, &[Complex64::new(0.0, 0.0)], None).unwrap();
        assert_eq!(est.exponent, 2.0);
        assert!(est.confident);
        assert!((est.value - 1.0).abs() < 0.1, "{est:?}");
    }

    #[test]
    fn richardson_is_exact_for_linear_data() {
        let v = richardson(&[0.4, 0.2], &[1.4, 1.2]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_of_smooth_function() {
        let g = GridChart::centered(1, 1.0, 65).unwrap();
        let t = FormField::one(&g);
        let k = kernel_estimate(&t, &[Complex64::new(0.0, 0.0)], &[1e-2, 1e-3]).unwrap();
        // ∫_{B(r)} dd^c log(|z|²+δ) = r²/(r²+δ).
        for (delta, m) in &k.masses {
            let r2 = k.radius * k.radius;
            assert!((m - r2 / (r2 + delta)).abs() < 0.05, "{delta}: {m}");
        }
    }
}
