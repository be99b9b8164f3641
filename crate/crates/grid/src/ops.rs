//! dd^c stencils, wedge products and Monge–Ampère powers on grids.

use num_complex::Complex64;
use rayon::prelude::*;
use segre_core::form::wedge_sign;

use crate::chart::RealBox;
use crate::error::GridError;
use crate::field::{FormField, ScalarField};
use crate::report::ConvergenceReport;

/// Second-order central-difference `dd^c f`, with coefficients `∂_a∂̄_b f`.
pub fn ddc(f: &ScalarField) -> Result<FormField, GridError> {
    let chart = &f.chart;
    if chart.resolution().iter().any(|&n| n < 5) {
        return Err(GridError::ChartTooSmall("dd^c needs at least 5 nodes per axis".into()));
    }
    let d = chart.dim();
    let mut out = FormField::zeros(chart, 1, 1)?;
    let v = &f.values;
    let second = |node: usize, r: usize, s: usize| -> f64 {
        let (sr, ss) = (chart.stride(r), chart.stride(s));
        let (hr, hs) = (chart.step(r / 2), chart.step(s / 2));
        if r == s {
            (v[node + sr] - 2.0 * v[node] + v[node - sr]) / (hr * hr)
        } else {
            (v[node + sr + ss] - v[node + sr - ss] - v[node - sr + ss] + v[node - sr - ss]) / (4.0 * hr * hs)
        }
    };
    for a in 0..d {
        let (xa, ya) = (2 * a, 2 * a + 1);
        out.diag[a].par_iter_mut().enumerate().with_min_len(4096).for_each(|(node, o)| {
            if chart.is_interior(node, 1) {
                *o = 0.25 * (second(node, xa, xa) + second(node, ya, ya));
            }
        });
    }
    for a in 0..d {
        for b in (a + 1)..d {
            let slot = out.index.off_slot(a, b);
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            out.off[slot].par_iter_mut().enumerate().with_min_len(4096).for_each(|(node, o)| {
                if chart.is_interior(node, 1) {
                    let re = second(node, xa, xb) + second(node, ya, yb);
                    let im = second(node, xa, yb) - second(node, ya, xb);
                    *o = Complex64::new(0.25 * re, 0.25 * im);
                }
            });
        }
    }
    Ok(out)
}

/// Pointwise wedge product of two form fields on the same chart.
pub fn wedge(a: &FormField, b: &FormField) -> Result<FormField, GridError> {
    if !a.chart.same_grid(&b.chart) {
        return Err(GridError::IncompatibleCharts);
    }
    let d = a.dim();
    let deg = a.degree() + b.degree();
    if deg > d {
        return Err(GridError::BidegreeOverflow(deg, d));
    }
    let mut out = FormField::zeros(&a.chart, deg, a.margin.max(b.margin))?;
    // Terms contributing to each stored slot: (ai, aj, bk, bl, sign).
    let m = out.index.len();
    let mut terms: Vec<Vec<(usize, usize, usize, usize, f64)>> = vec![Vec::new(); m * m];
    for (ai, i) in a.index.lists.iter().enumerate() {
        for (aj, j) in a.index.lists.iter().enumerate() {
            for (bk, k) in b.index.lists.iter().enumerate() {
                for (bl, l) in b.index.lists.iter().enumerate() {
                    if let Some((s, ik, jl)) = wedge_sign(i, j, k, l) {
                        let p = out.index.position(&ik).expect("merged list");
                        let q = out.index.position(&jl).expect("merged list");
                        terms[p * m + q].push((ai, aj, bk, bl, s as f64));
                    }
                }
            }
        }
    }
    let eval = |node: usize, p: usize, q: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(ai, aj, bk, bl, s) in &terms[p * m + q] {
            acc += a.get(node, ai, aj) * b.get(node, bk, bl) * s;
        }
        acc
    };
    for p in 0..m {
        out.diag[p].par_iter_mut().enumerate().with_min_len(4096).for_each(|(node, o)| *o = eval(node, p, p).re);
        for q in (p + 1)..m {
            let slot = out.index.off_slot(p, q);
            out.off[slot].par_iter_mut().enumerate().with_min_len(4096).for_each(|(node, o)| *o = eval(node, p, q));
        }
    }
    Ok(out)
}

/// `T^k` by repeated wedge products; `T^0` is the constant 1.
pub fn power(t: &FormField, k: usize) -> Result<FormField, GridError> {
    if k == 0 {
        return Ok(FormField::one(&t.chart));
    }
    let mut acc = t.clone();
    for _ in 1..k {
        acc = wedge(&acc, t)?;
    }
    Ok(acc)
}

/// Which forms of an ε-family are kept in memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Retain {
    Last,
    All,
}

#[derive(Debug)]
pub struct MaPowerResult {
    pub forms: Vec<(f64, FormField)>,
    pub report: ConvergenceReport,
}

/// `(dd^c ψ_ε)^k` along a strictly decreasing ε-schedule, with masses over `boxes`.
pub fn ma_power(
    family: impl IntoIterator<Item = Result<(f64, ScalarField), GridError>>,
    k: usize,
    boxes: &[RealBox],
    retain: Retain,
    tolerance: f64,
) -> Result<MaPowerResult, GridError> {
    let mut forms = Vec::new();
    let mut eps_list = Vec::new();
    let mut masses = Vec::new();
    for item in family {
        let (eps, psi) = item?;
        if !(eps > 0.0) || eps_list.last().map_or(false, |&prev: &f64| eps >= prev) {
            return Err(GridError::NonMonotoneSchedule);
        }
        let t = ddc(&psi)?;
        let tk = power(&t, k)?;
        masses.push(boxes.iter().map(|b| tk.mass_in_box(b)).collect());
        eps_list.push(eps);
        if retain == Retain::Last {
            forms.clear();
        }
        forms.push((eps, tk));
    }
    let report = ConvergenceReport::from_masses(eps_list, masses, tolerance);
    Ok(MaPowerResult { forms, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::GridChart;
    use crate::expr::ScalarExpr;

    #[test]
    fn ddc_of_quadratic_is_exact() {
        // f = |z1|² + 2|z2|² + 2 Re(z1 z̄2): coefficients [[1, 1], [1, 2]].
        let g = GridChart::centered(2, 1.0, 9).unwrap();
        let f = ScalarField::sample_with(
            &g,
            |z| z[0].norm_sqr() + 2.0 * z[1].norm_sqr() + 2.0 * (z[0] * z[1].conj()).re,
            None,
        )
        .unwrap();
        let t = ddc(&f).unwrap();
        let node = g.nearest_node(&[Complex64::new(0.0, 0.0), Complex64::new(0.25, 0.0)]);
        assert!((t.get(node, 0, 0).re - 1.0).abs() < 1e-10);
        assert!((t.get(node, 1, 1).re - 2.0).abs() < 1e-10);
        assert!((t.get(node, 0, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        let t2 = power(&t, 2).unwrap();
        assert!((t2.get(node, 0, 0).re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn hermitian_part_of_ddc() {
        // f = Im(z1 z̄2) has ∂1∂̄2 f = -i/2 and ∂2∂̄1 f = i/2.
        let g = GridChart::centered(2, 1.0, 9).unwrap();
        let f = ScalarField::sample_with(&g, |z| (z[0] * z[1].conj()).im, None).unwrap();
        let t = ddc(&f).unwrap();
        let node = g.nearest_node(&[Complex64::new(0.0, 0.0); 2]);
        assert!((t.get(node, 0, 1) - Complex64::new(0.0, -0.5)).norm() < 1e-10);
        assert!((t.get(node, 1, 0) - Complex64::new(0.0, 0.5)).norm() < 1e-10);
    }

    #[test]
    fn flat_form_mass() {
        let g = GridChart::centered(1, 1.0, 65).unwrap();
        let f = ScalarField::sample(&g, &ScalarExpr::dist_sq(vec![Complex64::new(0.0, 0.0)]), None).unwrap();
        let t = ddc(&f).unwrap();
        // Density 1/π on the square minus the boundary layer.
        let inner = 1.0 - 2.0 * g.step(0);
        let expected = (2.0 * inner + g.step(0)).powi(2) / std::f64::consts::PI;
        assert!((t.total_mass() - expected).abs() < 1e-9, "{} vs {}", t.total_mass(), expected);
    }
}
