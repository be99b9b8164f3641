//! Restriction of a metric to a curve `τ: ℂ → ℂⁿ` and comparison of the Lelong numbers of
//! `s_1(τ*E)` with the multiplicities predicted by the degeneracy locus.

use num_rational::BigRational;
use segre_core::gauss::rat_to_f64;
use segre_core::{GaussRational, Polynomial};
use segre_grid::GridChart;

use crate::error::BundleError;
use crate::locus::degeneracy_locus;
use crate::metric::{BundleSpec, SingularMetric};
use crate::segre::{segre_current, SegreOptions, SegreResult};

#[derive(Clone, Debug)]
pub struct PullbackReport {
    pub t0: GaussRational,
    /// `Σ m_i · ord_{t0}(P_i ∘ τ)` over divisorial components not containing the curve.
    pub predicted: BigRational,
    pub lelong: f64,
    pub confident: bool,
    pub extrapolated: Option<f64>,
    pub final_eps: f64,
    /// The metric was identically singular on the curve and `τ*h₀` was used instead.
    pub omega_branch: bool,
    pub result: SegreResult,
}

impl PullbackReport {
    pub fn error(&self) -> f64 {
        (self.lelong - rat_to_f64(&self.predicted)).abs()
    }
}

/// Computes `s_1` of `τ*(E, h)` on a disc of radius `half_width` around `t0` and its Lelong
/// number at `t0`.
pub fn pullback_check(
    spec: &BundleSpec,
    metric: &SingularMetric,
    curve: &[Polynomial],
    t0: &GaussRational,
    half_width: f64,
    resolution: usize,
    options: &SegreOptions,
) -> Result<PullbackReport, BundleError> {
    let n = spec.base_dim;
    if curve.len() != n {
        return Err(BundleError::InvalidMetric(format!("curve has {} components, base has dimension {n}", curve.len())));
    }
    let chart = GridChart::uniform(vec![t0.to_complex()], half_width, resolution)?;
    let reference = spec.reference.pullback(curve)?;
    let line_spec = BundleSpec::new(chart, spec.rank, Some(reference.clone()))?;
    let (pulled, omega_branch) = match metric.pullback(n, curve) {
        Ok(m) => (m, false),
        Err(BundleError::Unsupported(_)) => (SingularMetric::Smooth(reference), true),
        Err(e) => return Err(e),
    };
    let mut o = options.clone();
    o.degrees = vec![1];
    o.boxes.clear();
    o.lelong_points = vec![vec![t0.to_complex()]];
    let result = segre_current(&line_spec, &pulled, &o)?;
    let summary = result.lelong_at(1, &[t0.to_complex()]).ok_or_else(|| BundleError::Unsupported("no Lelong estimate at the base point".into()))?;
    let predicted = if omega_branch { BigRational::from_integer(0.into()) } else { degeneracy_locus(metric, n)?.pullback_multiplicity(curve, t0)? };
    Ok(PullbackReport {
        t0: t0.clone(),
        predicted,
        lelong: summary.value,
        confident: summary.confident,
        extrapolated: summary.extrapolated,
        final_eps: result.final_eps_of(1),
        omega_branch,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use segre_core::parse::parse_holomorphic;

    fn chernex() -> SingularMetric {
        let p = |s: &str| parse_holomorphic(s, 2).unwrap();
        SingularMetric::MorphismInduced { g: vec![vec![p("x1"), p("0")], vec![p("0"), p("x2")]], target: None }
    }

    #[test]
    fn chernex_along_a_coordinate_axis() {
        let spec = BundleSpec::new(GridChart::centered(2, 1.0, 8).unwrap(), 2, None).unwrap();
        let curve = vec![parse_holomorphic("x1", 1).unwrap(), parse_holomorphic("0", 1).unwrap()];
        let r = pullback_check(&spec, &chernex(), &curve, &GaussRational::from_int(0), 1.0, 128, &SegreOptions::new(vec![1])).unwrap();
        assert_eq!(r.predicted, BigRational::from_integer(1.into()));
        assert!(r.error() < 0.1, "{} at eps {}", r.lelong, r.final_eps);
    }

    #[test]
    fn chernex_along_the_diagonal() {
        let spec = BundleSpec::new(GridChart::centered(2, 1.0, 8).unwrap(), 2, None).unwrap();
        let t = parse_holomorphic("x1", 1).unwrap();
        let r = pullback_check(&spec, &chernex(), &[t.clone(), t], &GaussRational::from_int(0), 1.0, 128, &SegreOptions::new(vec![1])).unwrap();
        assert_eq!(r.predicted, BigRational::from_integer(2.into()));
        assert!(r.error() < 0.2, "{} at eps {}", r.lelong, r.final_eps);
    }
}
