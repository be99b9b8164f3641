//! Segre currents `s_k(E, h_ε)` on the base chart along a decreasing ε-schedule.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use segre_grid::lelong::richardson;
use segre_grid::{ddc, lelong_estimate, ConvergenceReport, FormField, GridChart, LelongEstimate, RealBox, ScalarField};

use crate::error::BundleError;
use crate::fiber::{FiberQuadrature, SegreCoefficients, SegreEvaluator, Workspace};
use crate::jet::{CompiledMetric, MatrixJet};
use crate::metric::{BundleSpec, SingularMetric};

/// Nodes per parallel task.
const CHUNK: usize = 2048;

/// The default schedule `ε_j = 4^{−j}`, `j = 0..8`.
pub fn default_schedule() -> Vec<f64> {
    (0..=8).map(|j| 0.25f64.powi(j)).collect()
}

/// Pointwise Segre coefficients of `h + ε·h₀`.
#[derive(Clone, Debug)]
pub struct SegreEngine {
    n: usize,
    r: usize,
    metric: CompiledMetric,
    reference: CompiledMetric,
    evaluator: SegreEvaluator,
}

/// Per-thread scratch for [`SegreEngine`].
#[derive(Clone, Debug)]
pub struct EngineScratch {
    jet: MatrixJet,
    ref_jet: MatrixJet,
    ws: Workspace,
    pub coefficients: SegreCoefficients,
}

impl SegreEngine {
    pub fn new(spec: &BundleSpec, metric: &SingularMetric, max_degree: usize, quadrature: FiberQuadrature) -> Result<Self, BundleError> {
        metric.validate(spec.base_dim)?;
        if metric.rank() != spec.rank {
            return Err(BundleError::InvalidMetric(format!("metric has rank {} but the bundle has rank {}", metric.rank(), spec.rank)));
        }
        let n = spec.base_dim;
        Ok(SegreEngine {
            n,
            r: spec.rank,
            metric: CompiledMetric::new(metric, n),
            reference: CompiledMetric::smooth(&spec.reference),
            evaluator: SegreEvaluator::new(n, spec.rank, max_degree, quadrature)?,
        })
    }

    pub fn max_degree(&self) -> usize {
        self.evaluator.max_degree()
    }

    pub fn scratch(&self) -> EngineScratch {
        EngineScratch {
            jet: MatrixJet::zeros(self.n, self.r),
            ref_jet: MatrixJet::zeros(self.n, self.r),
            ws: self.evaluator.workspace(),
            coefficients: self.evaluator.coefficients(),
        }
    }

    /// Coefficients of `s_0..s_K` at `x`, left in `scratch.coefficients`.
    pub fn eval_at(&self, x: &[Complex64], eps: f64, scratch: &mut EngineScratch) -> Result<(), BundleError> {
        self.metric.regularized_jet_into(x, eps, &self.reference, &mut scratch.ref_jet, &mut scratch.jet);
        self.evaluator.eval(&scratch.jet, &mut scratch.ws, &mut scratch.coefficients)
    }

    /// Density of `s_k ∧ (dd^c|z|²)^{n−k}` at `x`.
    pub fn trace_density_at(&self, x: &[Complex64], eps: f64, k: usize, scratch: &mut EngineScratch) -> Result<f64, BundleError> {
        self.eval_at(x, eps, scratch)?;
        let len = self.evaluator.table(k).len();
        let s: f64 = scratch.coefficients.degrees[k][..len].iter().map(|c| c.re).sum();
        Ok(trace_factor(self.n, k) * s)
    }

    /// `log det(h + ε·h₀)` at `x`.
    pub fn log_det_at(&self, x: &[Complex64], eps: f64, scratch: &mut EngineScratch) -> Result<f64, BundleError> {
        self.metric.regularized_jet_into(x, eps, &self.reference, &mut scratch.ref_jet, &mut scratch.jet);
        let chol = scratch.jet.h.clone().cholesky().ok_or_else(|| BundleError::Degenerate(format!("metric is degenerate at {x:?}")))?;
        Ok(chol.l().diagonal().iter().map(|d| 2.0 * d.re.ln()).sum())
    }

    /// `s_0, …, s_K` sampled on `chart`.
    pub fn fields(&self, chart: &GridChart, eps: f64) -> Result<Vec<FormField>, BundleError> {
        if chart.dim() != self.n {
            return Err(BundleError::InvalidMetric("chart and bundle have different base dimensions".into()));
        }
        let kmax = self.max_degree();
        let mut fields: Vec<FormField> = (0..=kmax).map(|k| FormField::zeros(chart, k, 0)).collect::<Result<_, _>>()?;
        // Per chunk, mutable slices of every coefficient vector of every degree.
        let mut bundles: Vec<Vec<(Vec<&mut [f64]>, Vec<&mut [Complex64]>)>> = Vec::new();
        for f in fields.iter_mut() {
            let diag: Vec<Vec<&mut [f64]>> = f.diag.iter_mut().map(|v| v.chunks_mut(CHUNK).collect()).collect();
            let off: Vec<Vec<&mut [Complex64]>> = f.off.iter_mut().map(|v| v.chunks_mut(CHUNK).collect()).collect();
            let n_chunks = chart.n_nodes().div_ceil(CHUNK);
            let mut diag_t: Vec<Vec<&mut [f64]>> = (0..n_chunks).map(|_| Vec::new()).collect();
            for column in diag {
                for (c, s) in column.into_iter().enumerate() {
                    diag_t[c].push(s);
                }
            }
            let mut off_t: Vec<Vec<&mut [Complex64]>> = (0..n_chunks).map(|_| Vec::new()).collect();
            for column in off {
                for (c, s) in column.into_iter().enumerate() {
                    off_t[c].push(s);
                }
            }
            if bundles.is_empty() {
                bundles = (0..n_chunks).map(|_| Vec::new()).collect();
            }
            for (c, (d, o)) in diag_t.into_iter().zip(off_t).enumerate() {
                bundles[c].push((d, o));
            }
        }
        bundles.into_par_iter().enumerate().try_for_each(|(c, mut per_degree)| -> Result<(), BundleError> {
            let mut scratch = self.scratch();
            let mut x = vec![Complex64::new(0.0, 0.0); self.n];
            let start = c * CHUNK;
            let len = per_degree[0].0[0].len();
            for i in 0..len {
                chart.point_into(start + i, &mut x);
                self.eval_at(&x, eps, &mut scratch)?;
                for (k, (diag, off)) in per_degree.iter_mut().enumerate() {
                    let coeffs = &scratch.coefficients.degrees[k];
                    let m = diag.len();
                    for (p, d) in diag.iter_mut().enumerate() {
                        d[i] = coeffs[p].re;
                    }
                    for (s, o) in off.iter_mut().enumerate() {
                        o[i] = coeffs[m + s];
                    }
                }
            }
            Ok(())
        })?;
        Ok(fields)
    }

    /// `log det(h + ε·h₀)` sampled on `chart`.
    pub fn log_det_field(&self, chart: &GridChart, eps: f64) -> Result<ScalarField, BundleError> {
        let scratch = std::sync::Mutex::new(None::<BundleError>);
        let field = ScalarField::sample_with(
            chart,
            |x| {
                let mut s = self.scratch();
                match self.log_det_at(x, eps, &mut s) {
                    Ok(v) => v,
                    Err(e) => {
                        *scratch.lock().expect("error slot") = Some(e);
                        f64::NAN
                    }
                }
            },
            None,
        );
        if let Some(e) = scratch.into_inner().expect("error slot") {
            return Err(e);
        }
        Ok(field?)
    }

    /// `dd^c log det(h + ε·h₀)` by finite differences, the reference for `s_1`.
    pub fn log_det_ddc(&self, chart: &GridChart, eps: f64) -> Result<FormField, BundleError> {
        Ok(ddc(&self.log_det_field(chart, eps)?)?)
    }
}

fn trace_factor(n: usize, k: usize) -> f64 {
    let fact: f64 = (1..=(n - k)).map(|j| j as f64).product();
    fact / std::f64::consts::PI.powi(n as i32)
}

/// Outcome of the quadrature probe at the peak of one trace density.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRecord {
    pub degree: usize,
    pub point: Vec<Complex64>,
    /// Trapezoid rule on the node lattice.
    pub nodal: f64,
    /// Midpoint rule on the lattice shifted by half a step.
    pub shifted: f64,
    pub relative_difference: f64,
    pub resolved: bool,
}

/// Half-width, in grid steps, of the cube examined by [`probe_resolution`].
pub const PROBE_CELLS: usize = 4;

/// Checks whether the grid resolves `s_k` at step ε. Around the largest sampled trace density,
/// the mass of a cube `PROBE_CELLS` steps wide is integrated with the trapezoid rule on the node
/// lattice and with the midpoint rule on the half-shifted lattice; their relative difference
/// estimates the error of the nodal mass sums.
pub fn probe_resolution(engine: &SegreEngine, field: &FormField, eps: f64, tolerance: f64) -> Result<ProbeRecord, BundleError> {
    let chart = &field.chart;
    let k = field.degree();
    let margin = field.margin.max(segre_grid::field::MASS_MARGIN);
    let (mut best, mut best_node) = (f64::NEG_INFINITY, 0);
    for node in 0..chart.n_nodes() {
        if chart.is_interior(node, margin) {
            let v = field.trace_density(node).abs();
            if v > best {
                best = v;
                best_node = node;
            }
        }
    }
    let center = chart.point(best_node);
    let rd = chart.real_dim();
    let c = PROBE_CELLS as f64;
    let cube_sum = |m: usize, offsets: &(dyn Fn(usize) -> (f64, f64) + Sync)| -> Result<f64, BundleError> {
        let total = m.pow(rd as u32);
        let parts: Vec<Result<f64, BundleError>> = (0..total)
            .into_par_iter()
            .with_min_len(256)
            .map_init(
                || engine.scratch(),
                |scratch, flat| {
                    let mut rest = flat;
                    let mut weight = 1.0;
                    let mut x = center.clone();
                    for axis in 0..rd {
                        let (off, w) = offsets(rest % m);
                        rest /= m;
                        weight *= w;
                        let h = chart.step(axis / 2);
                        if axis % 2 == 0 {
                            x[axis / 2].re += off * h;
                        } else {
                            x[axis / 2].im += off * h;
                        }
                    }
                    Ok(weight * engine.trace_density_at(&x, eps, k, scratch)?)
                },
            )
            .collect();
        let mut s = 0.0;
        for p in parts {
            s += p?;
        }
        Ok(s)
    };
    let nodes = 2 * PROBE_CELLS + 1;
    let nodal = cube_sum(nodes, &|i| (i as f64 - c, if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 }))?;
    let shifted = cube_sum(2 * PROBE_CELLS, &|i| (i as f64 + 0.5 - c, 1.0))?;
    let relative_difference = if shifted.abs() > 0.0 { (nodal - shifted).abs() / shifted.abs() } else { 0.0 };
    // A density that is negligible everywhere needs no resolution.
    let negligible = best * chart.cell_volume() * chart.n_nodes() as f64 <= 1e-12;
    Ok(ProbeRecord { degree: k, point: center, nodal, shifted, relative_difference, resolved: negligible || relative_difference < tolerance })
}

#[derive(Clone, Debug)]
pub struct SegreOptions {
    /// Degrees to report; `s_k` for every `k` up to the maximum is computed anyway.
    pub degrees: Vec<usize>,
    /// Strictly decreasing, positive.
    pub schedule: Vec<f64>,
    pub quadrature: FiberQuadrature,
    /// Mass regions; the whole chart when empty.
    pub boxes: Vec<RealBox>,
    /// Relative Cauchy tolerance for declaring convergence.
    pub convergence_tolerance: f64,
    pub probe_tolerance: f64,
    /// Points where Lelong numbers are estimated at every resolved ε.
    pub lelong_points: Vec<Vec<Complex64>>,
    pub lelong_radius: Option<f64>,
    /// Wall-clock limit; the schedule stops early once it passes.
    pub deadline: Option<Instant>,
}

impl SegreOptions {
    pub fn new(degrees: Vec<usize>) -> Self {
        SegreOptions {
            degrees,
            schedule: default_schedule(),
            quadrature: FiberQuadrature::Exact,
            boxes: Vec::new(),
            convergence_tolerance: 0.01,
            probe_tolerance: 0.03,
            lelong_points: Vec::new(),
            lelong_radius: None,
            deadline: None,
        }
    }
}

/// Everything computed at one ε.
#[derive(Clone, Debug)]
pub struct EpsStep {
    pub eps: f64,
    /// `masses[k][b]`: mass of `s_k` over box `b`, for `k = 0..=K`.
    pub masses: Vec<Vec<f64>>,
    pub probes: Vec<ProbeRecord>,
    pub resolved: bool,
    /// `lelong[k][p]` for reported degrees `k ≥ 1`; empty for `k = 0`.
    pub lelong: Vec<Vec<LelongEstimate>>,
}

/// Why the schedule stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    Unresolved,
    Budget,
}

#[derive(Clone, Debug)]
pub struct LelongSummary {
    pub degree: usize,
    pub point: Vec<Complex64>,
    /// Estimate at the last resolved ε.
    pub value: f64,
    pub confident: bool,
    pub extrapolated: Option<f64>,
    pub estimate: LelongEstimate,
}

#[derive(Clone, Debug)]
pub struct SegreResult {
    pub degrees: Vec<usize>,
    pub boxes: Vec<RealBox>,
    /// Every evaluated step, including a final unresolved one.
    pub steps: Vec<EpsStep>,
    pub stop: StopReason,
    /// Index into `steps` of the last step in the prefix at which every degree was resolved.
    pub final_index: usize,
    /// Per degree `0..=K`, the last step of that degree's own resolved prefix.
    pub degree_final: Vec<usize>,
    /// `s_0..s_K` at the final step.
    pub fields: Vec<FormField>,
    /// Per degree `0..=K`, over the resolved steps.
    pub reports: Vec<ConvergenceReport>,
    pub lelong: Vec<LelongSummary>,
}

impl SegreResult {
    pub fn final_eps(&self) -> f64 {
        self.steps[self.final_index].eps
    }

    /// Final ε of one degree; it can be smaller than [`SegreResult::final_eps`].
    pub fn final_eps_of(&self, k: usize) -> f64 {
        self.steps[self.degree_final[k]].eps
    }

    pub fn field(&self, k: usize) -> &FormField {
        &self.fields[k]
    }

    pub fn converged(&self, k: usize) -> bool {
        self.reports[k].converged
    }

    /// Masses of `s_k` per box at the final step.
    pub fn final_masses(&self, k: usize) -> &[f64] {
        &self.steps[self.final_index].masses[k]
    }

    pub fn lelong_at(&self, k: usize, point: &[Complex64]) -> Option<&LelongSummary> {
        self.lelong.iter().find(|l| l.degree == k && l.point.iter().zip(point).all(|(a, b)| (a - b).norm() < 1e-12))
    }
}

/// Extrapolates to `ε = 0` through the last three values (two when fewer are available).
pub fn extrapolate(eps: &[f64], values: &[f64]) -> Option<f64> {
    let n = eps.len().min(values.len());
    if n < 3 {
        return richardson(&eps[..n], &values[..n]);
    }
    let (e, v) = (&eps[n - 3..n], &values[n - 3..n]);
    // Lagrange interpolation evaluated at 0.
    let mut out = 0.0;
    for i in 0..3 {
        let mut l = 1.0;
        for j in 0..3 {
            if i != j {
                if e[i] == e[j] {
                    return None;
                }
                l *= (0.0 - e[j]) / (e[i] - e[j]);
            }
        }
        out += l * v[i];
    }
    Some(out)
}

/// Computes `s_k(E, h_ε)` along the schedule until the grid stops resolving the currents.
///
/// The schedule is processed from large to small ε. Each requested degree keeps its own prefix
/// of steps that pass the resolution probe; the run ends once no requested degree is still
/// resolved. The fields kept for decomposition come from the last step at which every degree
/// was resolved.
pub fn segre_current(spec: &BundleSpec, metric: &SingularMetric, options: &SegreOptions) -> Result<SegreResult, BundleError> {
    let n = spec.base_dim;
    if options.degrees.iter().any(|&k| k > n) {
        return Err(BundleError::BidegreeMismatch { expected: n, found: *options.degrees.iter().max().expect("non-empty") });
    }
    if options.schedule.is_empty() || options.schedule.windows(2).any(|w| !(w[1] < w[0])) || options.schedule.iter().any(|&e| !(e >= 0.0)) {
        return Err(BundleError::Grid(segre_grid::GridError::NonMonotoneSchedule));
    }
    let kmax = options.degrees.iter().copied().max().unwrap_or(0);
    let engine = SegreEngine::new(spec, metric, kmax, options.quadrature)?;
    let chart = &spec.chart;
    let boxes = if options.boxes.is_empty() { vec![RealBox::everything(chart.real_dim())] } else { options.boxes.clone() };

    let mut steps: Vec<EpsStep> = Vec::new();
    let mut final_fields: Option<Vec<FormField>> = None;
    let mut joint_alive = true;
    let mut alive: Vec<bool> = (0..=kmax).map(|k| k >= 1 && options.degrees.contains(&k)).collect();
    let mut last: Vec<Option<usize>> = vec![None; kmax + 1];
    let mut stop = StopReason::Completed;
    for &eps in &options.schedule {
        if options.deadline.is_some_and(|d| Instant::now() > d) && final_fields.is_some() {
            stop = StopReason::Budget;
            break;
        }
        let fields = engine.fields(chart, eps)?;
        let probes: Vec<ProbeRecord> =
            (1..=kmax).map(|k| probe_resolution(&engine, &fields[k], eps, options.probe_tolerance)).collect::<Result<_, _>>()?;
        let resolved = probes.iter().all(|p| p.resolved);
        let masses: Vec<Vec<f64>> = fields.iter().map(|f| boxes.iter().map(|b| f.mass_in_box(b)).collect()).collect();
        let lelong: Vec<Vec<LelongEstimate>> = (0..=kmax)
            .map(|k| {
                if k == 0 || !options.degrees.contains(&k) {
                    return Ok(Vec::new());
                }
                options.lelong_points.iter().map(|x| lelong_estimate(&fields[k], x, options.lelong_radius)).collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, segre_grid::GridError>>()?;
        let i = steps.len();
        for k in 1..=kmax {
            if alive[k] {
                if probes[k - 1].resolved {
                    last[k] = Some(i);
                } else {
                    alive[k] = false;
                }
            }
        }
        steps.push(EpsStep { eps, masses, probes, resolved, lelong });
        // Not even the coarsest ε is resolved: keep it and report.
        if joint_alive && (resolved || final_fields.is_none()) {
            final_fields = Some(fields);
        }
        joint_alive &= resolved;
        if !alive.iter().any(|&a| a) {
            stop = StopReason::Unresolved;
            break;
        }
    }
    let fields = final_fields.expect("at least one step");
    let final_index = steps.iter().position(|s| !s.resolved).map_or(steps.len() - 1, |i| i.saturating_sub(1));
    // Degrees that are not reported follow the joint prefix.
    let degree_final: Vec<usize> = (0..=kmax).map(|k| last[k].unwrap_or(if k >= 1 && options.degrees.contains(&k) { 0 } else { final_index })).collect();
    let prefix = |k: usize| -> &[EpsStep] { &steps[..=degree_final[k]] };
    let reports = (0..=kmax)
        .map(|k| {
            let used = prefix(k);
            ConvergenceReport::from_masses(used.iter().map(|s| s.eps).collect(), used.iter().map(|s| s.masses[k].clone()).collect(), options.convergence_tolerance)
        })
        .collect();
    let mut lelong = Vec::new();
    for &k in options.degrees.iter().filter(|&&k| k >= 1) {
        let used = prefix(k);
        let eps_used: Vec<f64> = used.iter().map(|s| s.eps).collect();
        for (p, x) in options.lelong_points.iter().enumerate() {
            let values: Vec<f64> = used.iter().map(|s| s.lelong[k][p].value).collect();
            let last = used.last().expect("non-empty").lelong[k][p].clone();
            lelong.push(LelongSummary {
                degree: k,
                point: x.clone(),
                value: last.value,
                confident: last.confident,
                extrapolated: extrapolate(&eps_used, &values),
                estimate: last,
            });
        }
    }
    Ok(SegreResult { degrees: options.degrees.clone(), boxes, steps, stop, final_index, degree_final, fields, reports, lelong })
}

#[cfg(test)]
mod tests {
    use super::*;
    use segre_core::parse::{parse_holomorphic, parse_real_analytic};

    fn chernex(n_pts: usize) -> (BundleSpec, SingularMetric) {
        let chart = GridChart::centered(2, 1.0, n_pts).unwrap();
        let p = |s: &str| parse_holomorphic(s, 2).unwrap();
        let g = vec![vec![p("x1"), p("0")], vec![p("0"), p("x2")]];
        (BundleSpec::new(chart, 2, None).unwrap(), SingularMetric::MorphismInduced { g, target: None })
    }

    #[test]
    fn s0_is_one_and_s1_matches_log_det() {
        let (spec, metric) = chernex(16);
        let engine = SegreEngine::new(&spec, &metric, 2, FiberQuadrature::Exact).unwrap();
        let fields = engine.fields(&spec.chart, 1.0).unwrap();
        assert!(fields[0].diag[0].iter().all(|&v| (v - 1.0).abs() < 1e-14));
        let reference = engine.log_det_ddc(&spec.chart, 1.0).unwrap();
        let err = fields[1].relative_l1(&reference, 2).unwrap();
        assert!(err < 0.01, "{err}");
    }

    #[test]
    fn chernex_closed_form() {
        // s1 = u1 + u2, s2 = u1 ∧ u2 with u_j = ε/(|x_j|²+ε)² dx_j∧dx̄_j.
        let (spec, metric) = chernex(8);
        let engine = SegreEngine::new(&spec, &metric, 2, FiberQuadrature::Exact).unwrap();
        let mut s = engine.scratch();
        let x = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)];
        let eps = 0.1;
        engine.eval_at(&x, eps, &mut s).unwrap();
        let u = |z: Complex64| eps / (z.norm_sqr() + eps).powi(2);
        let c = &s.coefficients.degrees;
        assert!((c[1][0].re - u(x[0])).abs() < 1e-12);
        assert!((c[1][1].re - u(x[1])).abs() < 1e-12);
        assert!(c[1][2].norm() < 1e-12);
        assert!((c[2][0].re - u(x[0]) * u(x[1])).abs() < 1e-12);
    }

    #[test]
    fn smooth_diagonal_weight_matches_ddc_of_weight() {
        let chart = GridChart::centered(1, 1.0, 33).unwrap();
        let q = segre_core::QasDescriptor::new(
            1,
            segre_core::gauss::rat(1, 1),
            vec![parse_holomorphic("1", 1).unwrap()],
            parse_real_analytic("x1*xb1", 1).unwrap(),
        )
        .unwrap();
        let spec = BundleSpec::new(chart, 1, None).unwrap();
        let mut opts = SegreOptions::new(vec![1]);
        opts.schedule = vec![0.0];
        let res = segre_current(&spec, &SingularMetric::DiagonalQas(vec![q]), &opts).unwrap();
        // dd^c|x|² on the square minus the boundary layer.
        let m = res.final_masses(1)[0];
        let h = spec.chart.step(0);
        let inner = 2.0 - 4.0 * h + h;
        assert!((m - inner * inner / std::f64::consts::PI).abs() < 1e-9, "{m}");
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let e = [0.4, 0.2, 0.1];
        let v: Vec<f64> = e.iter().map(|x| 1.0 + 2.0 * x + 3.0 * x * x).collect();
        assert!((extrapolate(&e, &v).unwrap() - 1.0).abs() < 1e-12);
    }
}
