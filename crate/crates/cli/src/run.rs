//! The commands behind `segre-lab`: each one runs a resolved scenario and writes its reports.

use std::fs;
use std::path::{Path, PathBuf};

use segre_bundle::chern::{chern_current, ChernMode};
use segre_bundle::decompose::{decompose, DecomposeOptions, Decomposition};
use segre_bundle::locus::degeneracy_locus;
use segre_bundle::pullback::pullback_check;
use segre_bundle::report::{chern_json, decomposition_json, point_json, rational_json, segre_json};
use segre_bundle::segre::{segre_current, SegreResult};
use segre_bundle::BundleError;
use serde_json::{json, Value};
use thiserror::Error;

use crate::scenario::Problem;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// What a command wrote, and whether every requested degree converged.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub converged: bool,
    pub summary: Value,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_json(path: PathBuf, v: &Value, files: &mut Vec<PathBuf>) -> Result<(), RunError> {
    fs::write(&path, serde_json::to_string_pretty(v)?)?;
    files.push(path);
    Ok(())
}

fn compute(problem: &Problem) -> Result<(SegreResult, Vec<Decomposition>), RunError> {
    let result = segre_current(&problem.spec, &problem.metric, &problem.options)?;
    let mut decompositions = Vec::new();
    if problem.decomposition {
        let locus = degeneracy_locus(&problem.metric, problem.spec.base_dim)?;
        let options = DecomposeOptions { max_denominator: problem.max_denominator };
        for &k in &problem.options.degrees {
            if k == 0 {
                continue;
            }
            match decompose(&result, k, &locus, options) {
                Ok(d) => decompositions.push(d),
                Err(err) => eprintln!("warning: no decomposition of s{k}: {err}"),
            }
        }
    }
    Ok((result, decompositions))
}

fn write_convergence(out: &Path, name: &str, result: &SegreResult, files: &mut Vec<PathBuf>) -> Result<(), RunError> {
    for &k in &result.degrees {
        let path = out.join(format!("{name}_s{k}_convergence.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        let mut header = vec!["eps".to_string(), "resolved".to_string()];
        header.extend((0..result.boxes.len().max(1)).map(|b| format!("mass_box{b}")));
        header.push("probe_difference".into());
        w.write_record(&header)?;
        for (i, s) in result.steps.iter().enumerate() {
            let mut row = vec![num(s.eps), (i <= result.degree_final[k]).to_string()];
            row.extend(s.masses[k].iter().map(|&m| num(m)));
            row.push(s.probes.iter().find(|p| p.degree == k).map_or(String::new(), |p| num(p.relative_difference)));
            w.write_record(&row)?;
        }
        w.flush()?;
        files.push(path);
    }
    Ok(())
}

fn write_lelong(out: &Path, name: &str, result: &SegreResult, files: &mut Vec<PathBuf>) -> Result<(), RunError> {
    let path = out.join(format!("{name}_lelong.csv"));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["degree", "point", "eps", "value", "confident"])?;
    for (i, s) in result.steps.iter().enumerate() {
        for (k, per_point) in s.lelong.iter().enumerate() {
            if i > result.degree_final[k] {
                continue;
            }
            for est in per_point {
                let point = est.point.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect::<Vec<_>>().join(" ");
                w.write_record([k.to_string(), point, num(s.eps), num(est.value), est.confident.to_string()])?;
            }
        }
    }
    w.flush()?;
    files.push(path);
    Ok(())
}

/// `segre`: the ε-schedule, convergence tables, Lelong estimates and decompositions.
pub fn run_segre(problem: &Problem, out: &Path) -> Result<Outcome, RunError> {
    fs::create_dir_all(out)?;
    let (result, decompositions) = compute(problem)?;
    let mut files = Vec::new();
    let reports = segre_json(&result, &decompositions);
    let summary = json!({"scenario": problem.name, "segre": reports});
    write_json(out.join(format!("{}_segre.json", problem.name)), &summary, &mut files)?;
    write_convergence(out, &problem.name, &result, &mut files)?;
    write_lelong(out, &problem.name, &result, &mut files)?;
    let converged = result.degrees.iter().all(|&k| result.converged(k));
    Ok(Outcome { files, converged, summary })
}

/// `chern`: both Chern series over degrees `1..=n`; the scenario's mode is reported as primary.
pub fn run_chern(problem: &Problem, out: &Path) -> Result<Outcome, RunError> {
    fs::create_dir_all(out)?;
    let n = problem.spec.base_dim;
    let mut p = problem.clone();
    p.options.degrees = (1..=n).collect();
    p.decomposition = true;
    let (result, decompositions) = compute(&p)?;
    let primary: ChernMode = problem.chern_mode.parse().map_err(BundleError::Unsupported)?;
    let series = chern_current(&p.spec, &result, &decompositions, ChernMode::Series, &p.options)?;
    let alternative = chern_current(&p.spec, &result, &decompositions, ChernMode::AlternativeZ, &p.options)?;
    let (first, second) = if primary == ChernMode::Series { (&series, &alternative) } else { (&alternative, &series) };
    let mut files = Vec::new();
    let summary = json!({
        "scenario": p.name,
        "primary": chern_json(first),
        "secondary": chern_json(second),
        "segre": segre_json(&result, &decompositions),
    });
    write_json(out.join(format!("{}_chern.json", p.name)), &summary, &mut files)?;

    let path = out.join(format!("{}_chern_difference.csv", p.name));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["degree", "region", "series", "alternative_Z", "difference"])?;
    for k in 0..series.masses.len() {
        w.write_record([k.to_string(), "chart".into(), num(series.masses[k]), num(alternative.masses[k]), num(series.masses[k] - alternative.masses[k])])?;
        for ((x, r, a), (_, _, b)) in series.point_masses.iter().zip(&alternative.point_masses) {
            let region = format!("ball({}; {r:.4})", x.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
            w.write_record([k.to_string(), region, num(a[k]), num(b[k]), num(a[k] - b[k])])?;
        }
    }
    w.flush()?;
    files.push(path);
    let converged = p.options.degrees.iter().all(|&k| result.converged(k));
    Ok(Outcome { files, converged, summary })
}

/// `lelong`: estimates at the probe points, plus the pullback comparison for every curve.
pub fn run_lelong(problem: &Problem, out: &Path) -> Result<Outcome, RunError> {
    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let result = segre_current(&problem.spec, &problem.metric, &problem.options)?;
    let points: Vec<Value> = result
        .lelong
        .iter()
        .map(|l| json!({"degree": l.degree, "point": point_json(&l.point), "value": l.value, "confident": l.confident, "extrapolated": l.extrapolated}))
        .collect();
    let mut curves = Vec::new();
    for c in &problem.curves {
        let r = pullback_check(&problem.spec, &problem.metric, &c.components, &c.t0, c.half_width, c.resolution, &problem.options)?;
        curves.push(json!({
            "curve": c.components.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "t0": c.t0.to_string(),
            "predicted": rational_json(&r.predicted),
            "lelong": r.lelong,
            "error": r.error(),
            "confident": r.confident,
            "extrapolated": r.extrapolated,
            "final_eps": r.final_eps,
            "omega_branch": r.omega_branch,
        }));
    }
    let final_eps: Vec<f64> = result.degrees.iter().map(|&k| result.final_eps_of(k)).collect();
    let summary = json!({"scenario": problem.name, "degrees": result.degrees, "final_eps": final_eps, "points": points, "curves": curves});
    write_json(out.join(format!("{}_lelong.json", problem.name)), &summary, &mut files)?;
    write_lelong(out, &problem.name, &result, &mut files)?;
    let converged = result.degrees.iter().all(|&k| result.converged(k));
    Ok(Outcome { files, converged, summary })
}

/// `decompose`: fixed and moving parts of each requested `s_k`.
pub fn run_decompose(problem: &Problem, out: &Path) -> Result<Outcome, RunError> {
    fs::create_dir_all(out)?;
    let mut p = problem.clone();
    p.decomposition = true;
    let (result, decompositions) = compute(&p)?;
    let mut files = Vec::new();
    let summary = json!({
        "scenario": p.name,
        "final_eps": result.final_eps(),
        "decompositions": decompositions.iter().map(|d| json!({"degree": d.degree, "report": decomposition_json(d)})).collect::<Vec<_>>(),
    });
    write_json(out.join(format!("{}_decompose.json", p.name)), &summary, &mut files)?;
    let converged = result.degrees.iter().all(|&k| result.converged(k));
    Ok(Outcome { files, converged, summary })
}
