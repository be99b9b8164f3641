//! Splitting `s_k` into the part carried by the degeneracy locus and the part outside it, and
//! reading off the fixed cycle of codimension `k`.
//!
//! Masses near each component are compared with the unit current of that component,
//! `dd^c log(|P|²+δ)` for a divisor and `(dd^c log(|z−p|²+δ))^n` for a point, with
//! `δ = max(ε, (UNIT_SPREAD·h)²)` so that the unit current is itself resolved by the grid.
//! Their ratio on tubes much wider than both spreads is the multiplicity.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use segre_core::{GaussRational, NumPoly, Polynomial, QuasiCycle};
use segre_grid::field::MASS_MARGIN;
use segre_grid::sum::chunked_sum;
use segre_grid::{FormField, GridChart};

use crate::error::BundleError;
use crate::locus::DegeneracyLocus;
use crate::segre::SegreResult;

/// Dyadic tube radii `2^{−j}·W`, `j = FIRST_TUBE..=LAST_TUBE`, with `W` the chart width.
pub const FIRST_TUBE: i32 = 2;
pub const LAST_TUBE: i32 = 6;
/// Consecutive tube ratios closer than this count as stable.
pub const RATIO_STABILITY: f64 = 0.05;
/// Smallest regularization of the unit currents, in grid steps.
pub const UNIT_SPREAD: f64 = 1.5;

#[derive(Clone, Debug, PartialEq)]
pub enum ComponentKind {
    Divisor(Polynomial),
    Point(Vec<GaussRational>),
}

#[derive(Clone, Debug)]
pub struct Attribution {
    pub kind: ComponentKind,
    pub radii: Vec<f64>,
    /// `mass(s_k)/mass(unit)` over the component's region at each radius.
    pub ratios: Vec<f64>,
    pub stabilized: f64,
    pub stabilized_radius: f64,
    pub multiplicity: BigRational,
    /// `|stabilized − multiplicity|`.
    pub residual: f64,
    /// Masses of `s_k` and of the unit current in the region at the stabilized radius.
    pub mass: f64,
    pub unit_mass: f64,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub degree: usize,
    pub eps: f64,
    pub components: Vec<Attribution>,
    /// `Σ m_i [Z_i]` over components of codimension `k`.
    pub fixed: QuasiCycle,
    pub total_mass: f64,
    /// Mass of `s_k` in the union `U` of the component regions.
    pub z_mass: f64,
    /// `total − z_mass`, the mass of `s′_k`.
    pub outside_mass: f64,
    /// `z_mass − Σ m_i·mass(unit_i, U)`.
    pub moving_mass: f64,
    /// `U` as a union of tubes and balls: each entry is a component and its radius.
    pub neighborhood: Vec<(ComponentKind, f64)>,
    /// Mass of `s_k` in the largest admissible ball around each locus point.
    pub point_masses: Vec<(Vec<GaussRational>, f64, f64)>,
    pub flags: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    /// Largest denominator allowed for multiplicities (1 for integral data).
    pub max_denominator: u32,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { max_denominator: 1 }
    }
}

/// Nearest rational with denominator at most `max_den`.
pub fn nearest_rational(x: f64, max_den: u32) -> BigRational {
    let mut best = (f64::INFINITY, BigRational::zero());
    for q in 1..=max_den.max(1) {
        let p = (x * q as f64).round();
        let err = (x - p / q as f64).abs();
        if err < best.0 - 1e-12 {
            best = (err, BigRational::new((p as i64).into(), (q as i64).into()));
        }
    }
    best.1
}

/// A component with its distance function and unit density on the chart.
struct Prepared {
    kind: ComponentKind,
    dist: Vec<f64>,
    unit: Vec<f64>,
}

fn prepare_divisor(chart: &GridChart, p: &Polynomial, eps: f64) -> Prepared {
    let n = chart.dim();
    let pn = p.to_numeric();
    let grads: Vec<NumPoly> = (0..n).map(|a| p.derivative(a).to_numeric()).collect();
    let fact: f64 = (1..n).map(|j| j as f64).product();
    let scale = fact / std::f64::consts::PI.powi(n as i32);
    let (dist, unit): (Vec<f64>, Vec<f64>) = (0..chart.n_nodes())
        .into_par_iter()
        .with_min_len(4096)
        .map_init(
            || vec![Complex64::new(0.0, 0.0); n],
            |x, node| {
                chart.point_into(node, x);
                let v = pn.eval(x).norm_sqr();
                let g: f64 = grads.iter().map(|q| q.eval(x).norm_sqr()).sum();
                let dist = if g > 0.0 { (v / g).sqrt() } else if v == 0.0 { 0.0 } else { f64::INFINITY };
                (dist, scale * eps * g / (v + eps).powi(2))
            },
        )
        .unzip();
    Prepared { kind: ComponentKind::Divisor(p.clone()), dist, unit }
}

fn prepare_point(chart: &GridChart, location: &[GaussRational], eps: f64) -> Prepared {
    let n = chart.dim();
    let c: Vec<Complex64> = location.iter().map(GaussRational::to_complex).collect();
    let fact: f64 = (1..=n).map(|j| j as f64).product();
    let scale = fact / std::f64::consts::PI.powi(n as i32);
    let (dist, unit): (Vec<f64>, Vec<f64>) = (0..chart.n_nodes())
        .into_par_iter()
        .with_min_len(4096)
        .map_init(
            || vec![Complex64::new(0.0, 0.0); n],
            |x, node| {
                chart.point_into(node, x);
                let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).norm_sqr()).sum();
                let s = d2 + eps;
                (d2.sqrt(), scale * eps / s.powi(n as i32 + 1))
            },
        )
        .unzip();
    Prepared { kind: ComponentKind::Point(location.to_vec()), dist, unit }
}

/// Interior mask and trace density of `t`.
fn densities(t: &FormField) -> (Vec<bool>, Vec<f64>) {
    let chart = &t.chart;
    let margin = t.margin.max(MASS_MARGIN);
    (0..chart.n_nodes()).into_par_iter().with_min_len(4096).map(|node| (chart.is_interior(node, margin), t.trace_density(node))).unzip()
}

fn masked_sum(values: &[f64], mask: impl Fn(usize) -> bool + Sync) -> f64 {
    let v: Vec<f64> = values.par_iter().enumerate().with_min_len(4096).map(|(i, x)| if mask(i) { *x } else { 0.0 }).collect();
    chunked_sum(&v)
}

/// Attributes the final `s_k` of `result` to the components of `locus`.
pub fn decompose(result: &SegreResult, k: usize, locus: &DegeneracyLocus, options: DecomposeOptions) -> Result<Decomposition, BundleError> {
    let t = result.fields.get(k).ok_or(BundleError::BidegreeMismatch { expected: result.fields.len() - 1, found: k })?;
    let chart = &t.chart;
    let n = chart.dim();
    let eps = result.final_eps();
    let unit_eps = eps.max((UNIT_SPREAD * chart.max_step()).powi(2));
    let vol = chart.cell_volume();
    let (interior, density) = densities(t);
    let total_mass = masked_sum(&density, |i| interior[i]) * vol;

    // Codimension-k candidates: divisors in degree 1, points in top degree.
    let mut comps: Vec<Prepared> = Vec::new();
    if k == 1 {
        comps.extend(locus.divisors.iter().map(|(p, _)| prepare_divisor(chart, p, unit_eps)));
    }
    if k == n && n > 1 {
        comps.extend(locus.points.iter().map(|x| prepare_point(chart, x, unit_eps)));
    }
    // Points are excised from divisor tubes.
    let excised: Vec<Prepared> = if k == 1 && n > 1 { locus.points.iter().map(|x| prepare_point(chart, x, unit_eps)).collect() } else { Vec::new() };

    let width = 2.0 * chart.half_widths().iter().copied().fold(0.0, f64::max);
    let h = chart.max_step();
    let radii: Vec<f64> = (FIRST_TUBE..=LAST_TUBE).map(|j| width * 0.5f64.powi(j)).filter(|&r| r >= 2.0 * h).collect();
    let mut flags = Vec::new();
    if radii.is_empty() && !comps.is_empty() {
        flags.push("no tube radius is admissible at this resolution".into());
    }
    let in_region = |i: usize, node: usize, rho: f64| -> bool {
        interior[node]
            && comps[i].dist[node] < rho
            && comps.iter().enumerate().all(|(j, c)| j == i || c.dist[node] >= rho)
            && excised.iter().all(|c| c.dist[node] >= rho)
    };

    let mut components = Vec::new();
    let mut region_radius = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        let mut ratios = Vec::with_capacity(radii.len());
        let mut masses = Vec::with_capacity(radii.len());
        for &rho in &radii {
            let m = masked_sum(&density, |node| in_region(i, node, rho)) * vol;
            let u = masked_sum(&c.unit, |node| in_region(i, node, rho)) * vol;
            ratios.push(if u > 0.0 { m / u } else { f64::NAN });
            masses.push((m, u));
        }
        let mut idx = 0;
        while idx + 1 < ratios.len() && (ratios[idx + 1] - ratios[idx]).abs() < RATIO_STABILITY {
            idx += 1;
        }
        let (stabilized, stabilized_radius, (mass, unit_mass)) = if ratios.is_empty() { (f64::NAN, f64::NAN, (0.0, 0.0)) } else { (ratios[idx], radii[idx], masses[idx]) };
        if !stabilized.is_finite() {
            flags.push(format!("component {i}: region is empty (overlapping tubes)"));
        } else if idx + 1 < ratios.len() || ratios.len() < 2 {
            if ratios.len() < 2 || (ratios[1] - ratios[0]).abs() >= RATIO_STABILITY {
                flags.push(format!("component {i}: tube ratios did not stabilize"));
            }
        }
        let multiplicity = if stabilized.is_finite() { nearest_rational(stabilized, options.max_denominator) } else { BigRational::zero() };
        let residual = if stabilized.is_finite() { (stabilized - segre_core::gauss::rat_to_f64(&multiplicity)).abs() } else { f64::NAN };
        region_radius.push(stabilized_radius);
        components.push(Attribution { kind: c.kind.clone(), radii: radii.clone(), ratios, stabilized, stabilized_radius, multiplicity, residual, mass, unit_mass });
    }

    // U is the union of the tubes at their chosen radii, together with balls around the
    // excised points at the widest of those radii.
    let widest = region_radius.iter().copied().filter(|r| r.is_finite()).fold(f64::NAN, f64::max);
    let mut neighborhood: Vec<(ComponentKind, f64)> = comps.iter().zip(&region_radius).filter(|(_, r)| r.is_finite()).map(|(c, r)| (c.kind.clone(), *r)).collect();
    if widest.is_finite() {
        neighborhood.extend(excised.iter().map(|c| (c.kind.clone(), widest)));
    }
    let in_u = |node: usize| {
        interior[node]
            && (comps.iter().zip(&region_radius).any(|(c, r)| c.dist[node] < *r) || (widest.is_finite() && excised.iter().any(|c| c.dist[node] < widest)))
    };
    let z_mass = masked_sum(&density, in_u) * vol;
    let mut unit_in_u = 0.0;
    for (i, c) in comps.iter().enumerate() {
        let m = segre_core::gauss::rat_to_f64(&components[i].multiplicity);
        if m != 0.0 {
            unit_in_u += m * masked_sum(&c.unit, in_u) * vol;
        }
    }
    let mut fixed = QuasiCycle::zero(n);
    for a in &components {
        if a.multiplicity.is_zero() {
            continue;
        }
        if a.multiplicity.is_negative() {
            flags.push("negative multiplicity".into());
        }
        let part = match &a.kind {
            ComponentKind::Divisor(p) => QuasiCycle::divisor(p.clone(), a.multiplicity.clone())?,
            ComponentKind::Point(x) => QuasiCycle::point(x.clone(), a.multiplicity.clone())?,
        };
        fixed = fixed.add(&part)?;
    }
    let mut point_masses = Vec::new();
    for x in &locus.points {
        let c: Vec<Complex64> = x.iter().map(GaussRational::to_complex).collect();
        let r = chart.inner_radius(&c, t.margin.max(MASS_MARGIN));
        if r >= 2.0 * h {
            point_masses.push((x.clone(), r, t.ball_mass(&c, r)));
        }
    }
    Ok(Decomposition {
        degree: k,
        eps,
        components,
        fixed,
        total_mass,
        z_mass,
        outside_mass: total_mass - z_mass,
        moving_mass: z_mass - unit_in_u,
        neighborhood,
        point_masses,
        flags,
    })
}

/// Mass of `t` over the neighbourhood `U` of a decomposition.
pub fn mass_in_z_neighborhood(t: &FormField, decomposition: &Decomposition) -> f64 {
    z_neighborhood(&t.chart, decomposition).map_or(0.0, |in_u| t.mass_where(|x| in_u(x)))
}

fn distance(kind: &ComponentKind, value: &NumPoly, grad: &[NumPoly], z: &[Complex64]) -> f64 {
    match kind {
        ComponentKind::Divisor(_) => {
            let v = value.eval(z).norm_sqr();
            let g: f64 = grad.iter().map(|q| q.eval(z).norm_sqr()).sum();
            if g > 0.0 {
                (v / g).sqrt()
            } else if v == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        ComponentKind::Point(x) => x.iter().zip(z).map(|(a, b)| (a.to_complex() - b).norm_sqr()).sum::<f64>().sqrt(),
    }
}

/// Membership test for `U` in real coordinates; `None` when `U` is empty.
pub fn z_neighborhood(chart: &GridChart, d: &Decomposition) -> Option<impl Fn(&[f64]) -> bool + Sync> {
    let n = chart.dim();
    if d.neighborhood.is_empty() {
        return None;
    }
    let parts: Vec<(ComponentKind, f64, NumPoly, Vec<NumPoly>)> = d
        .neighborhood
        .iter()
        .map(|(kind, r)| match kind {
            ComponentKind::Divisor(p) => (kind.clone(), *r, p.to_numeric(), (0..n).map(|j| p.derivative(j).to_numeric()).collect()),
            ComponentKind::Point(_) => (kind.clone(), *r, NumPoly::zero(n), Vec::new()),
        })
        .collect();
    Some(move |x: &[f64]| {
        let z: Vec<Complex64> = x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        parts.iter().any(|(k, r, p, g)| distance(k, p, g, &z) < *r)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::FiberQuadrature;
    use crate::locus::degeneracy_locus;
    use crate::metric::{BundleSpec, SingularMetric};
    use crate::segre::{segre_current, SegreOptions};
    use num_traits::One;
    use segre_core::parse::parse_holomorphic;

    #[test]
    fn nearest_rational_with_bounded_denominator() {
        assert_eq!(nearest_rational(0.97, 1), BigRational::one());
        assert_eq!(nearest_rational(0.49, 2), BigRational::new(1.into(), 2.into()));
        assert_eq!(nearest_rational(0.32, 3), BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn line_bundle_with_double_zero() {
        // h = |x1|⁴ on a disc: s_1 = 2[x1 = 0].
        let chart = GridChart::centered(1, 1.0, 64).unwrap();
        let spec = BundleSpec::new(chart, 1, None).unwrap();
        let metric = SingularMetric::MorphismInduced { g: vec![vec![parse_holomorphic("x1^2", 1).unwrap()]], target: None };
        let mut o = SegreOptions::new(vec![1]);
        o.quadrature = FiberQuadrature::Exact;
        let res = segre_current(&spec, &metric, &o).unwrap();
        let locus = degeneracy_locus(&metric, 1).unwrap();
        let d = decompose(&res, 1, &locus, DecomposeOptions::default()).unwrap();
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].multiplicity, BigRational::from_integer(2.into()));
        assert!(d.components[0].residual < 0.1, "{:?}", d.components[0]);
        assert!(d.moving_mass.abs() < 0.1 * d.z_mass, "{d:?}");
    }
}
