//! Scenario documents: a single JSON file describing a bundle, its metric and what to compute.

use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use segre_bundle::fiber::FiberQuadrature;
use segre_bundle::segre::{default_schedule, SegreOptions};
use segre_bundle::{BundleSpec, HermitianPolyMatrix, SingularMetric};
use segre_core::gauss::parse_rational;
use segre_core::parse::{parse_holomorphic, parse_polynomial, parse_real_analytic};
use segre_core::{GaussRational, Polynomial, QasDescriptor};
use segre_grid::GridChart;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scenario: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

fn invalid(e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Invalid(e.to_string())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartConfig {
    /// Center as `[re, im]` pairs; the origin by default.
    #[serde(default)]
    pub center: Option<Vec<[f64; 2]>>,
    pub half_widths: Vec<f64>,
    pub resolution: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    /// Exponent `c` of `c·log Σ|f_j|² + v`, as a rational string.
    pub exponent: String,
    pub generators: Vec<String>,
    /// Smooth part `v` in `x1..xn, xb1..xbn`.
    #[serde(default)]
    pub smooth: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricConfig {
    Smooth { matrix: Vec<Vec<String>> },
    Morphism {
        g: Vec<Vec<String>>,
        #[serde(default)]
        target: Option<Vec<Vec<String>>>,
    },
    DiagonalQas { weights: Vec<WeightConfig> },
    DirectSum { parts: Vec<MetricConfig> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    /// Components of `τ(t)` as polynomials in `t`.
    pub components: Vec<String>,
    #[serde(default = "default_t0")]
    pub t0: String,
    #[serde(default = "one")]
    pub half_width: f64,
    #[serde(default = "default_curve_resolution")]
    pub resolution: usize,
}

fn default_t0() -> String {
    "0".into()
}
fn one() -> f64 {
    1.0
}
fn default_curve_resolution() -> usize {
    128
}
fn yes() -> bool {
    true
}
fn default_denominator() -> u32 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuadratureConfig {
    Exact,
    MonteCarlo { samples: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub base_dim: usize,
    pub rank: usize,
    pub chart: ChartConfig,
    pub metric: MetricConfig,
    #[serde(default)]
    pub reference_metric: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub eps_schedule: Option<Vec<f64>>,
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub probe_points: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub curves: Vec<CurveConfig>,
    #[serde(default)]
    pub chern_mode: Option<String>,
    #[serde(default = "yes")]
    pub decomposition: bool,
    #[serde(default)]
    pub budget_minutes: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(default = "default_denominator")]
    pub max_denominator: u32,
}

/// Command-line overrides applied on top of a scenario.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub eps: Option<Vec<f64>>,
    pub mode: Option<String>,
    pub seed: Option<u64>,
}

/// Budget from `SEGRE_LAB_BUDGET_MINUTES`, default ten minutes.
pub fn env_budget_minutes() -> f64 {
    std::env::var("SEGRE_LAB_BUDGET_MINUTES").ok().and_then(|s| s.trim().parse::<f64>().ok()).filter(|m| *m > 0.0).unwrap_or(10.0)
}

pub fn parse_eps_list(s: &str) -> Result<Vec<f64>, ScenarioError> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            match t.split_once('/') {
                Some((a, b)) => Ok(a.trim().parse::<f64>().map_err(invalid)? / b.trim().parse::<f64>().map_err(invalid)?),
                None => t.parse::<f64>().map_err(invalid),
            }
        })
        .collect()
}

fn matrix(dim: usize, rows: &[Vec<String>]) -> Result<HermitianPolyMatrix, ScenarioError> {
    let entries = rows.iter().map(|row| row.iter().map(|s| parse_real_analytic(s, dim).map_err(invalid)).collect()).collect::<Result<Vec<Vec<Polynomial>>, _>>()?;
    HermitianPolyMatrix::new(dim, entries).map_err(invalid)
}

impl MetricConfig {
    pub fn build(&self, dim: usize) -> Result<SingularMetric, ScenarioError> {
        Ok(match self {
            MetricConfig::Smooth { matrix: m } => SingularMetric::Smooth(matrix(dim, m)?),
            MetricConfig::Morphism { g, target } => SingularMetric::MorphismInduced {
                g: g.iter().map(|row| row.iter().map(|s| parse_holomorphic(s, dim).map_err(invalid)).collect()).collect::<Result<_, _>>()?,
                target: target.as_ref().map(|t| matrix(dim, t)).transpose()?,
            },
            MetricConfig::DiagonalQas { weights } => SingularMetric::DiagonalQas(
                weights
                    .iter()
                    .map(|w| {
                        let c = parse_rational(&w.exponent).map_err(invalid)?;
                        let gens = w.generators.iter().map(|s| parse_holomorphic(s, dim).map_err(invalid)).collect::<Result<Vec<_>, _>>()?;
                        let v = parse_real_analytic(w.smooth.as_deref().unwrap_or("0"), dim).map_err(invalid)?;
                        QasDescriptor::new(dim, c, gens, v).map_err(invalid)
                    })
                    .collect::<Result<_, _>>()?,
            ),
            MetricConfig::DirectSum { parts } => SingularMetric::DirectSum(parts.iter().map(|p| p.build(dim)).collect::<Result<_, _>>()?),
        })
    }
}

/// A curve parsed into polynomials in one variable (named `x1` internally).
#[derive(Clone, Debug)]
pub struct Curve {
    pub components: Vec<Polynomial>,
    pub t0: GaussRational,
    pub half_width: f64,
    pub resolution: usize,
}

impl CurveConfig {
    pub fn build(&self, dim: usize) -> Result<Curve, ScenarioError> {
        if self.components.len() != dim {
            return Err(invalid(format!("curve has {} components, base dimension is {dim}", self.components.len())));
        }
        let x1 = parse_holomorphic("x1", 1).map_err(invalid)?;
        let components = self
            .components
            .iter()
            .map(|s| parse_polynomial(s, &["t".to_string()]).and_then(|p| p.compose(std::slice::from_ref(&x1))).map_err(invalid))
            .collect::<Result<_, _>>()?;
        Ok(Curve { components, t0: GaussRational::parse(&self.t0).map_err(invalid)?, half_width: self.half_width, resolution: self.resolution })
    }
}

/// A scenario resolved into the objects the library works with.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub spec: BundleSpec,
    pub metric: SingularMetric,
    pub options: SegreOptions,
    pub curves: Vec<Curve>,
    pub chern_mode: String,
    pub decomposition: bool,
    pub max_denominator: u32,
    pub budget: Duration,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_json(s: &str) -> Result<Self, ScenarioError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn resolve(&self, overrides: &Overrides) -> Result<Problem, ScenarioError> {
        let n = self.base_dim;
        if n == 0 || self.rank == 0 {
            return Err(invalid("base dimension and rank must be positive"));
        }
        if self.chart.half_widths.len() != n && self.chart.half_widths.len() != 1 {
            return Err(invalid("half_widths needs one entry per coordinate (or a single shared one)"));
        }
        let center: Vec<Complex64> = match &self.chart.center {
            Some(c) if c.len() == n => c.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
            Some(_) => return Err(invalid("chart center has the wrong dimension")),
            None => vec![Complex64::new(0.0, 0.0); n],
        };
        let half: Vec<f64> = if self.chart.half_widths.len() == 1 { vec![self.chart.half_widths[0]; n] } else { self.chart.half_widths.clone() };
        let res = overrides.grid.unwrap_or(self.chart.resolution);
        let chart = GridChart::new(center, half, vec![res; n]).map_err(invalid)?;
        let reference = self.reference_metric.as_ref().map(|m| matrix(n, m)).transpose()?;
        let spec = BundleSpec::new(chart, self.rank, reference).map_err(invalid)?;
        let metric = self.metric.build(n)?;
        metric.validate(n).map_err(invalid)?;
        if metric.rank() != self.rank {
            return Err(invalid(format!("metric has rank {}, scenario says {}", metric.rank(), self.rank)));
        }
        if self.degrees.is_empty() || self.degrees.iter().any(|&k| k == 0 || k > n) {
            return Err(invalid(format!("degrees must lie in 1..={n}")));
        }
        let mut options = SegreOptions::new(self.degrees.clone());
        options.schedule = overrides.eps.clone().or_else(|| self.eps_schedule.clone()).unwrap_or_else(default_schedule);
        if options.schedule.is_empty() || options.schedule.windows(2).any(|w| !(w[1] < w[0])) || options.schedule.iter().any(|e| !(*e >= 0.0)) {
            return Err(invalid("the ε schedule must be non-negative and strictly decreasing"));
        }
        let seed = overrides.seed.or(self.seed).unwrap_or(0);
        options.quadrature = match &self.quadrature {
            None | Some(QuadratureConfig::Exact) => FiberQuadrature::Exact,
            Some(QuadratureConfig::MonteCarlo { samples }) => FiberQuadrature::MonteCarlo { samples: *samples, seed },
        };
        options.lelong_points = self
            .probe_points
            .iter()
            .map(|p| if p.len() == n { Ok(p.iter().map(|c| Complex64::new(c[0], c[1])).collect()) } else { Err(invalid("probe point has the wrong dimension")) })
            .collect::<Result<_, _>>()?;
        let minutes = self.budget_minutes.unwrap_or_else(env_budget_minutes);
        let budget = Duration::from_secs_f64(minutes * 60.0);
        options.deadline = Some(Instant::now() + budget);
        let chern_mode = overrides.mode.clone().or_else(|| self.chern_mode.clone()).unwrap_or_else(|| "series".into());
        chern_mode.parse::<segre_bundle::chern::ChernMode>().map_err(invalid)?;
        Ok(Problem {
            name: self.name.clone(),
            spec,
            metric,
            options,
            curves: self.curves.iter().map(|c| c.build(n)).collect::<Result<_, _>>()?,
            chern_mode,
            decomposition: self.decomposition,
            max_denominator: self.max_denominator.max(1),
            budget,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHERNEX: &str = r#"{
        "name": "chernex", "base_dim": 2, "rank": 2,
        "chart": {"half_widths": [1.0], "resolution": 16},
        "metric": {"kind": "morphism", "g": [["x1", "0"], ["0", "x2"]]},
        "degrees": [1, 2],
        "probe_points": [[[0, 0], [0, 0]]],
        "curves": [{"components": ["t", "0"]}]
    }"#;

    #[test]
    fn chernex_scenario_resolves() {
        let s = Scenario::from_json(CHERNEX).unwrap();
        let p = s.resolve(&Overrides { grid: Some(12), ..Default::default() }).unwrap();
        assert_eq!(p.spec.chart.resolution(), &[12, 12]);
        assert_eq!(p.options.schedule, default_schedule());
        assert_eq!(p.curves[0].components[0], parse_holomorphic("x1", 1).unwrap());
        assert_eq!(p.chern_mode, "series");
    }

    #[test]
    fn bad_scenarios_are_rejected() {
        assert!(Scenario::from_json("{").is_err());
        let mut s = Scenario::from_json(CHERNEX).unwrap();
        s.degrees = vec![3];
        assert!(s.resolve(&Overrides::default()).is_err());
        let s = Scenario::from_json(CHERNEX).unwrap();
        assert!(s.resolve(&Overrides { mode: Some("bogus".into()), ..Default::default() }).is_err());
        assert!(s.resolve(&Overrides { eps: Some(vec![0.1, 0.5]), ..Default::default() }).is_err());
    }

    #[test]
    fn eps_lists() {
        assert_eq!(parse_eps_list("1, 1/4,0.0625").unwrap(), vec![1.0, 0.25, 0.0625]);
        assert!(parse_eps_list("a").is_err());
    }
}
