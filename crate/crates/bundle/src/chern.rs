//! Chern currents from Segre data: `c = s^{-1}` in the graded algebra, and the alternative
//! `c(E, Z)` that lets the reference Segre form act on the part of `s` carried by `Z`.

use num_complex::Complex64;
use segre_core::series::{self, chern_z, invert, CycleAlgebra, GradedAlgebra, GradedSeries};
use segre_core::{GaussRational, QuasiCycle, SeriesError};
use segre_grid::ops::wedge;
use segre_grid::{FormField, GridChart};

use crate::decompose::{z_neighborhood, Decomposition};
use crate::error::BundleError;
use crate::metric::{BundleSpec, SingularMetric};
use crate::segre::{segre_current, SegreOptions, SegreResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChernMode {
    Series,
    AlternativeZ,
}

impl ChernMode {
    pub fn name(self) -> &'static str {
        match self {
            ChernMode::Series => "series",
            ChernMode::AlternativeZ => "alternative_Z",
        }
    }
}

impl std::str::FromStr for ChernMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "series" => Ok(ChernMode::Series),
            "alternative_Z" | "alternative_z" => Ok(ChernMode::AlternativeZ),
            _ => Err(format!("unknown chern mode '{s}' (expected series or alternative_Z)")),
        }
    }
}

/// A form of mixed bidegree on a grid: `parts[p]` is the `(p,p)` component.
#[derive(Clone, Debug)]
pub struct NumForm {
    pub parts: Vec<Option<FormField>>,
}

impl NumForm {
    pub fn homogeneous(t: FormField) -> Self {
        let mut parts = vec![None; t.dim() + 1];
        let p = t.degree();
        parts[p] = Some(t);
        NumForm { parts }
    }

    pub fn part(&self, p: usize) -> Option<&FormField> {
        self.parts.get(p).and_then(Option::as_ref)
    }
}

fn field_is_zero(t: &FormField) -> bool {
    t.diag.iter().all(|c| c.iter().all(|v| *v == 0.0)) && t.off.iter().all(|c| c.iter().all(|v| v.norm_sqr() == 0.0))
}

/// Grid forms under the pointwise wedge product; products above the base dimension vanish.
#[derive(Clone, Debug)]
pub struct FormRing {
    pub chart: GridChart,
}

impl FormRing {
    fn wrap<T>(r: Result<T, segre_grid::GridError>) -> Result<T, SeriesError> {
        r.map_err(|e| SeriesError::Ring(e.to_string()))
    }
}

impl GradedAlgebra for FormRing {
    type Elem = NumForm;

    fn one(&self) -> NumForm {
        NumForm::homogeneous(FormField::one(&self.chart))
    }

    fn zero(&self) -> NumForm {
        NumForm { parts: vec![None; self.chart.dim() + 1] }
    }

    fn add(&self, a: &NumForm, b: &NumForm) -> Result<NumForm, SeriesError> {
        let parts = a
            .parts
            .iter()
            .zip(&b.parts)
            .map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => Self::wrap(x.linear_combination(1.0, y, 1.0)).map(Some),
                (Some(x), None) => Ok(Some(x.clone())),
                (None, y) => Ok(y.clone()),
            })
            .collect::<Result<_, _>>()?;
        Ok(NumForm { parts })
    }

    fn neg(&self, a: &NumForm) -> Result<NumForm, SeriesError> {
        let parts = a.parts.iter().map(|x| x.as_ref().map(|x| x.linear_combination(-1.0, x, 0.0)).transpose()).collect::<Result<_, _>>();
        Ok(NumForm { parts: Self::wrap(parts)? })
    }

    fn mul(&self, a: &NumForm, b: &NumForm) -> Result<NumForm, SeriesError> {
        let n = self.chart.dim();
        let mut out = self.zero();
        for (p, x) in a.parts.iter().enumerate() {
            for (q, y) in b.parts.iter().enumerate() {
                let (Some(x), Some(y)) = (x, y) else { continue };
                if p + q > n {
                    continue;
                }
                let w = Self::wrap(wedge(x, y))?;
                out.parts[p + q] = Some(match out.parts[p + q].take() {
                    Some(acc) => Self::wrap(acc.linear_combination(1.0, &w, 1.0))?,
                    None => w,
                });
            }
        }
        Ok(out)
    }

    fn is_zero(&self, a: &NumForm) -> bool {
        a.parts.iter().flatten().all(field_is_zero)
    }

    fn is_one(&self, a: &NumForm) -> bool {
        a.parts.iter().enumerate().all(|(p, x)| match x {
            None => p > 0,
            Some(x) if p == 0 => x.diag[0].iter().all(|v| *v == 1.0),
            Some(x) => field_is_zero(x),
        })
    }

    fn degrees(&self, a: &NumForm) -> Vec<usize> {
        a.parts.iter().enumerate().filter_map(|(p, x)| x.as_ref().filter(|x| !field_is_zero(x)).map(|_| p)).collect()
    }

    fn is_smooth(&self, _: &NumForm) -> bool {
        true
    }
}

/// Zeroes the coefficients of `t` at nodes rejected by `keep`.
pub fn mask(t: &FormField, keep: &[bool]) -> FormField {
    let mut out = t.clone();
    for c in out.diag.iter_mut() {
        c.iter_mut().zip(keep).filter(|(_, k)| !**k).for_each(|(v, _)| *v = 0.0);
    }
    for c in out.off.iter_mut() {
        c.iter_mut().zip(keep).filter(|(_, k)| !**k).for_each(|(v, _)| *v = Complex64::new(0.0, 0.0));
    }
    out
}

/// Node mask of the neighbourhood `U` of `Z` used by a set of decompositions (union over degrees).
pub fn z_mask(chart: &GridChart, decompositions: &[Decomposition]) -> Vec<bool> {
    let mut keep = vec![false; chart.n_nodes()];
    let rd = chart.real_dim();
    let mut x = vec![0.0; rd];
    for d in decompositions {
        if let Some(in_u) = z_neighborhood(chart, d) {
            for (node, k) in keep.iter_mut().enumerate() {
                if !*k {
                    chart.real_coords(node, &mut x);
                    *k = in_u(&x);
                }
            }
        }
    }
    keep
}

/// Numerical Segre series `1 + s_1 + … + s_K` from the final fields of a run. `s_0` is taken as
/// exactly one; its numerical deviation is checked separately.
pub fn segre_series(result: &SegreResult) -> GradedSeries<NumForm> {
    let chart = result.fields[0].chart.clone();
    let ring = FormRing { chart: chart.clone() };
    let mut coeffs = vec![ring.one()];
    coeffs.extend(result.fields[1..].iter().cloned().map(NumForm::homogeneous));
    GradedSeries::new(coeffs)
}

/// Segre series of the smooth reference metric on the same chart; `1` for constant references.
pub fn reference_series(spec: &BundleSpec, max_degree: usize, options: &SegreOptions) -> Result<GradedSeries<NumForm>, BundleError> {
    let ring = FormRing { chart: spec.chart.clone() };
    if spec.reference.entries().iter().flatten().all(|p| p.is_constant()) {
        return Ok(series::one_series(&ring, max_degree));
    }
    let reference = spec.reference.clone();
    let mut o = options.clone();
    o.degrees = (1..=max_degree).collect();
    o.schedule = vec![0.0];
    o.lelong_points.clear();
    let r = segre_current(spec, &SingularMetric::Smooth(reference), &o)?;
    Ok(segre_series(&r))
}

#[derive(Clone, Debug)]
pub struct ChernResult {
    pub mode: ChernMode,
    pub eps: f64,
    /// `c_0, …, c_K` as grid forms.
    pub numeric: GradedSeries<NumForm>,
    /// The same series computed on the fixed cycles, when every `s_k` is carried by its fixed part.
    pub exact: Option<GradedSeries<QuasiCycle>>,
    /// Total mass of each `c_k` over the chart interior.
    pub masses: Vec<f64>,
    /// `(point, radius, mass of c_k in the ball)` for every locus point, degree by degree.
    pub point_masses: Vec<(Vec<GaussRational>, f64, Vec<f64>)>,
}

/// Assembles `c(E)` or `c(E, Z)` from a Segre run and its decompositions (one per degree `1..=K`).
pub fn chern_current(
    spec: &BundleSpec,
    result: &SegreResult,
    decompositions: &[Decomposition],
    mode: ChernMode,
    options: &SegreOptions,
) -> Result<ChernResult, BundleError> {
    let chart = result.fields[0].chart.clone();
    let ring = FormRing { chart: chart.clone() };
    let k_max = result.fields.len() - 1;
    let s = segre_series(result);
    let numeric = match mode {
        ChernMode::Series => invert(&ring, &s)?,
        ChernMode::AlternativeZ => {
            let s0 = reference_series(spec, k_max, options)?;
            let keep = z_mask(&chart, decompositions);
            let z_proper = keep.iter().any(|k| *k);
            let mut m = vec![ring.zero()];
            m.extend(result.fields[1..].iter().map(|t| NumForm::homogeneous(mask(t, &keep))));
            chern_z(&ring, &s, &s0, &GradedSeries::new(m), z_proper)?
        }
    };
    let exact = exact_series(&chart, decompositions, k_max, mode)?;
    let masses = numeric.coeffs.iter().enumerate().map(|(k, c)| c.part(k).map_or(0.0, FormField::total_mass)).collect();
    let mut point_masses = Vec::new();
    if let Some(d) = decompositions.last() {
        for (x, r, _) in &d.point_masses {
            let c: Vec<Complex64> = x.iter().map(GaussRational::to_complex).collect();
            let per: Vec<f64> = numeric.coeffs.iter().enumerate().map(|(k, e)| e.part(k).map_or(0.0, |t| t.ball_mass(&c, *r))).collect();
            point_masses.push((x.clone(), *r, per));
        }
    }
    Ok(ChernResult { mode, eps: result.final_eps(), numeric, exact, masses, point_masses })
}

/// Largest rounding residual and relative unattributed mass for which `s_k` counts as carried
/// by its fixed part.
pub const CLEAN_RESIDUAL: f64 = 0.1;
pub const CLEAN_FRACTION: f64 = 0.25;

/// Whether a decomposition is clean enough to hand to the exact cycle layer.
pub fn is_clean(d: &Decomposition) -> bool {
    let scale = d.total_mass.abs().max(1.0);
    !d.components.is_empty()
        && d.components.iter().all(|a| a.residual < CLEAN_RESIDUAL)
        && d.outside_mass.abs() <= CLEAN_FRACTION * scale
        && d.moving_mass.abs() <= CLEAN_RESIDUAL * scale
}

fn exact_series(chart: &GridChart, decompositions: &[Decomposition], k_max: usize, mode: ChernMode) -> Result<Option<GradedSeries<QuasiCycle>>, BundleError> {
    let n = chart.dim();
    let ring = CycleAlgebra::new(n);
    let mut coeffs = vec![QuasiCycle::one(n)];
    for k in 1..=k_max {
        match decompositions.iter().find(|d| d.degree == k) {
            Some(d) if is_clean(d) => coeffs.push(d.fixed.clone()),
            _ => return Ok(None),
        }
    }
    let s = GradedSeries::new(coeffs);
    let c = match mode {
        ChernMode::Series => invert(&ring, &s)?,
        ChernMode::AlternativeZ => {
            // Every coefficient lives on Z, so M = s − 1; the reference is flat.
            let mut m = s.clone();
            m.coeffs[0] = QuasiCycle::zero(n);
            chern_z(&ring, &s, &series::one_series(&ring, k_max), &m, true)?
        }
    };
    Ok(Some(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use segre_grid::ops::ddc;
    use segre_grid::ScalarField;

    #[test]
    fn numeric_inversion_of_a_split_series() {
        // s = (1 + a)(1 + b) with a = dd^c log(|x1|²+1), b = dd^c log(|x2|²+1): c_2 = a∧b.
        let chart = GridChart::centered(2, 1.0, 12).unwrap();
        let a = ddc(&ScalarField::sample_with(&chart, |z| (z[0].norm_sqr() + 1.0).ln(), None).unwrap()).unwrap();
        let b = ddc(&ScalarField::sample_with(&chart, |z| (z[1].norm_sqr() + 1.0).ln(), None).unwrap()).unwrap();
        let ring = FormRing { chart: chart.clone() };
        let s1 = a.linear_combination(1.0, &b, 1.0).unwrap();
        let ab = wedge(&a, &b).unwrap();
        let s = GradedSeries::new(vec![ring.one(), NumForm::homogeneous(s1.clone()), NumForm::homogeneous(ab.clone())]);
        let c = invert(&ring, &s).unwrap();
        let c1 = c.coeffs[1].part(1).unwrap();
        assert!((c1.total_mass() + s1.total_mass()).abs() < 1e-9);
        let c2 = c.coeffs[2].part(2).unwrap();
        assert!((c2.total_mass() - ab.total_mass()).abs() < 1e-9 * ab.total_mass().abs().max(1.0));
        let back = series::mul(&ring, &s, &c).unwrap();
        for k in 1..=2 {
            assert!(back.coeffs[k].part(k).map_or(0.0, |t| t.total_mass().abs()) < 1e-9);
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [ChernMode::Series, ChernMode::AlternativeZ] {
            assert_eq!(m.name().parse::<ChernMode>().unwrap(), m);
        }
    }
}
