//! JSON reports for Segre and Chern results.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use segre_core::series::series_to_json;
use segre_core::GaussRational;
use serde_json::{json, Value};

use crate::chern::ChernResult;
use crate::decompose::{ComponentKind, Decomposition};
use crate::segre::{SegreResult, StopReason};

/// An integral rational as a JSON number, anything else as a `"p/q"` string.
pub fn rational_json(r: &BigRational) -> Value {
    if r.denom().is_one() {
        if let Ok(v) = r.numer().to_string().parse::<i64>() {
            return json!(v);
        }
    }
    json!(r.to_string())
}

pub fn point_json(x: &[Complex64]) -> Value {
    json!(x.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn exact_point(x: &[GaussRational]) -> String {
    format!("({})", x.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

pub fn component_name(kind: &ComponentKind) -> String {
    match kind {
        ComponentKind::Divisor(p) => p.to_string(),
        ComponentKind::Point(x) => exact_point(x),
    }
}

pub fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::Completed => "completed",
        StopReason::Unresolved => "unresolved",
        StopReason::Budget => "budget",
    }
}

pub fn decomposition_json(d: &Decomposition) -> Value {
    json!({
        "fixed": d.components.iter().map(|a| json!({"cycle": component_name(&a.kind), "mult": rational_json(&a.multiplicity)})).collect::<Vec<_>>(),
        "moving_mass": d.moving_mass,
        "outside_mass": d.outside_mass,
        "z_mass": d.z_mass,
        "total_mass": d.total_mass,
        "eps": d.eps,
        "components": d.components.iter().map(|a| json!({
            "cycle": component_name(&a.kind),
            "radii": a.radii,
            "ratios": a.ratios,
            "stabilized": a.stabilized,
            "stabilized_radius": a.stabilized_radius,
            "residual": a.residual,
            "mass": a.mass,
            "unit_mass": a.unit_mass,
        })).collect::<Vec<_>>(),
        "point_masses": d.point_masses.iter().map(|(x, r, m)| json!({"point": exact_point(x), "radius": r, "mass": m})).collect::<Vec<_>>(),
        "cycle": d.fixed.to_json(),
        "flags": d.flags,
    })
}

/// One report per requested degree.
pub fn segre_json(result: &SegreResult, decompositions: &[Decomposition]) -> Vec<Value> {
    let boxes: Vec<Value> = result.boxes.iter().map(|b| json!({"lo": b.lo, "hi": b.hi})).collect();
    result
        .degrees
        .iter()
        .map(|&k| {
            let lelong: Vec<Value> = result
                .lelong
                .iter()
                .filter(|l| l.degree == k)
                .map(|l| json!({"point": point_json(&l.point), "value": l.value, "confident": l.confident, "extrapolated": l.extrapolated}))
                .collect();
            let report = &result.reports[k];
            json!({
                "degree": k,
                "eps": result.steps.iter().map(|s| s.eps).collect::<Vec<_>>(),
                "resolved": (0..result.steps.len()).map(|i| i <= result.degree_final[k]).collect::<Vec<_>>(),
                "masses": {
                    "boxes": boxes,
                    "per_eps": result.steps.iter().map(|s| s.masses[k].clone()).collect::<Vec<_>>(),
                },
                "probes": result.steps.iter().map(|s| s.probes.iter().find(|p| p.degree == k).map(|p| p.relative_difference)).collect::<Vec<_>>(),
                "final_eps": result.final_eps_of(k),
                "fields_eps": result.final_eps(),
                "stop": stop_name(result.stop),
                "converged": report.converged,
                "cauchy": report.cauchy,
                "decomposition": decompositions.iter().find(|d| d.degree == k).map(decomposition_json),
                "lelong": lelong,
            })
        })
        .collect()
}

pub fn chern_json(c: &ChernResult) -> Value {
    json!({
        "mode": c.mode.name(),
        "eps": c.eps,
        "masses": c.masses,
        "point_masses": c.point_masses.iter().map(|(x, r, m)| json!({"point": exact_point(x), "radius": r, "masses": m})).collect::<Vec<_>>(),
        "exact": c.exact.as_ref().map(series_to_json),
    })
}
