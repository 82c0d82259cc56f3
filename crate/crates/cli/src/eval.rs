//! Evaluation of one plan point per quantity.

use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use stabent::deformed::{dumbbell_purities, kp_purities, row_spectrum, ThetaDumbbell, SPECTRUM_TOL};
use stabent::entropy::{
    cluster2d_string_with_endpoints, cylinder_correction_with, entropy, max_endpoint_value, neighbourhood,
    nonlocal_count, open_string, s_topo, string_correlation, tripartite_information, TopoSummary,
};
use stabent::regions::Tripartition;
use stabent::ModelId;

use crate::plan::{ModelSource, Plan, Point, Quantity, RegionLiteral, Scheme};

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub inputs: Map<String, Value>,
    pub value: Value,
    pub breakdown: Value,
    pub duration_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn run(plan: &Plan) -> Result<Vec<Record>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = plan.args.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build()?;
    Ok(pool.install(|| plan.points.par_iter().map(|p| record(plan, p)).collect()))
}

fn record(plan: &Plan, p: &Point) -> Record {
    let t0 = Instant::now();
    let result = evaluate(plan, p);
    let duration_ms = (!plan.args.no_timing).then(|| t0.elapsed().as_secs_f64() * 1e3);
    let inputs = p.0.iter().map(|(n, v)| (n.to_string(), number(*v))).collect();
    match result {
        Ok((value, breakdown)) => Record { inputs, value, breakdown, duration_ms, error: None },
        Err(e) => Record {
            inputs,
            value: Value::Null,
            breakdown: Value::Null,
            duration_ms,
            error: Some(format!("{e:#}")),
        },
    }
}

/// Integral values print without a fractional part.
fn number(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        json!(v as i64)
    } else {
        json!(v)
    }
}

fn topo_breakdown(s: &TopoSummary) -> Value {
    json!({
        "S_A": s.s_a, "S_B": s.s_b, "S_C": s.s_c,
        "S_AB": s.s_ab, "S_BC": s.s_bc, "S_AC": s.s_ac, "S_ABC": s.s_abc,
    })
}

fn theta(p: &Point) -> Result<f64> {
    p.get("theta").ok_or_else(|| anyhow!("--theta is required"))
}

fn literal(raw: &Option<String>, flag: &str) -> Result<RegionLiteral> {
    RegionLiteral::parse(raw.as_deref().ok_or_else(|| anyhow!("--{flag} is required"))?)
}

fn evaluate(plan: &Plan, p: &Point) -> Result<(Value, Value)> {
    let args = &plan.args;
    match args.quantity {
        Quantity::Kp | Quantity::Lw | Quantity::Dumb => {
            let scheme = match args.quantity {
                Quantity::Kp => Scheme::Kp,
                Quantity::Lw => Scheme::Lw,
                _ => Scheme::Dumb,
            };
            let spec = plan.scheme_spec(scheme, p)?;
            let m = plan.model(std::slice::from_ref(&spec), &[])?;
            let s = s_topo(&m, &spec)?;
            Ok((json!(s.value), topo_breakdown(&s)))
        }
        Quantity::I3 => {
            let explicit = [&args.region_a, &args.region_b, &args.region_c];
            if explicit.iter().all(|r| r.is_some()) {
                let lits = [
                    literal(&args.region_a, "region-a")?,
                    literal(&args.region_b, "region-b")?,
                    literal(&args.region_c, "region-c")?,
                ];
                let extents: Vec<[usize; 3]> = lits.iter().filter_map(|l| l.extent()).collect();
                let m = plan.model(&[], &extents)?;
                let [a, b, c] = lits.map(|l| l.resolve(plan, p, m.lattice()));
                let s = tripartite_information(&m, &Tripartition { a: a?, b: b?, c: c? })?;
                Ok((json!(s.value), topo_breakdown(&s)))
            } else {
                let spec = plan.scheme_spec(args.scheme.unwrap_or(Scheme::Kp), p)?;
                let m = plan.model(std::slice::from_ref(&spec), &[])?;
                let s = s_topo(&m, &spec)?;
                Ok((json!(s.value), topo_breakdown(&s)))
            }
        }
        Quantity::Entropy | Quantity::Nonlocal => {
            let lit = literal(&args.region, "region")?;
            let specs = match &lit {
                RegionLiteral::Parts { scheme, .. } => vec![plan.scheme_spec(*scheme, p)?],
                _ => Vec::new(),
            };
            let m = plan.model(&specs, &lit.extent().into_iter().collect::<Vec<_>>())?;
            let region = lit.resolve(plan, p, m.lattice())?;
            if args.quantity == Quantity::Entropy {
                let r = entropy(&m, &region)?;
                Ok((json!(r.entropy), serde_json::to_value(r)?))
            } else {
                let n = nonlocal_count(&m, &region)?;
                Ok((json!(n), json!({ "sites": region.len() })))
            }
        }
        Quantity::Cylinder => cylinder(plan),
        Quantity::String => string(plan, p),
        Quantity::ThetaKp => {
            let lx = p.count("lx", 4)?;
            let pur = kp_purities(theta(p)?, lx, p.count("ly", lx)?)?;
            Ok((json!(pur.value()), serde_json::to_value(pur)?))
        }
        Quantity::ThetaDumb => {
            let d = ThetaDumbbell {
                len: p.count("L", 8)?,
                w: p.count("w", 3)?,
                t: p.count("t", 2)?,
                b: p.count("b", 2)?,
                lx: p.count("lx", 4)?,
            };
            let pur = dumbbell_purities(theta(p)?, &d)?;
            Ok((json!(pur.value()), serde_json::to_value(pur)?))
        }
        Quantity::ThetaSpectrum => {
            let r = row_spectrum(theta(p)?, p.count("k", 4)?, args.tol.unwrap_or(SPECTRUM_TOL))?;
            Ok((json!(r.gap), serde_json::to_value(&r)?))
        }
        Quantity::Validate => {
            let m = plan.model(&[], &[])?;
            let report = m.validate();
            Ok((json!(report.degeneracy), serde_json::to_value(&report)?))
        }
    }
}

fn cylinder(plan: &Plan) -> Result<(Value, Value)> {
    let args = &plan.args;
    let circ: Vec<usize> = args
        .circumferences
        .as_deref()
        .ok_or_else(|| anyhow!("--circumferences is required"))?
        .split(',')
        .map(|c| c.trim().parse::<usize>().map_err(|_| anyhow!("bad circumference {c:?}")))
        .collect::<Result<_>>()?;
    let source = plan.source.as_ref().ok_or_else(|| anyhow!("no model"))?;
    if matches!(source, ModelSource::File(_)) {
        bail!("cylinder fits rebuild the model per circumference and need a zoo model");
    }
    let height = args.height.unwrap_or(12);
    let fit = cylinder_correction_with(&circ, args.period.unwrap_or(1), |l| {
        args.model.build(source, &[l, height]).map_err(|e| stabent::Error::Construction(format!("{e:#}")))
    })?;
    let value = if fit.classes.len() == 1 {
        json!(fit.classes[0].beta)
    } else {
        Value::Array(fit.classes.iter().map(|c| json!(c.beta)).collect())
    };
    Ok((value, serde_json::to_value(&fit)?))
}

fn string(plan: &Plan, p: &Point) -> Result<(Value, Value)> {
    let len = p.count("len", 4)?;
    let is_cluster = matches!(plan.source, Some(ModelSource::Zoo(ModelId::Cluster2d)));
    let margin = 6;
    let side = len + margin;
    let m = plan.model(&[], &[[side, side, 1]])?;
    if is_cluster {
        let ly = m.lattice().extent(1) as i64;
        let row = p.count("row", (ly / 2) as usize)? as i64;
        let (s, o1, ol) = cluster2d_string_with_endpoints(m.lattice(), p.count("qubit", 0)?, row, 1, len)?;
        let r = string_correlation(&m, &s, len, &o1, &ol)?;
        return Ok((json!(r.value), serde_json::to_value(&r)?));
    }
    let idx = plan.args.line.unwrap_or(0);
    let line = m
        .symmetry_lines()
        .get(idx)
        .ok_or_else(|| anyhow!("{} has {} symmetry lines", m.name(), m.symmetry_lines().len()))?
        .clone();
    let start = 2i64;
    let s = open_string(&m, &line, start, len)?;
    let radius = plan.args.radius.unwrap_or(1);
    let at = |t: i64| {
        let mut c = line.base;
        c[line.axis] += t;
        c
    };
    let n1 = neighbourhood(m.lattice(), at(start - 1), radius);
    let n2 = neighbourhood(m.lattice(), at(start + len as i64), radius);
    let value = max_endpoint_value(&m, &s, &n1, &n2)?;
    Ok((json!(value), json!({ "line": line.label, "radius": radius })))
}
