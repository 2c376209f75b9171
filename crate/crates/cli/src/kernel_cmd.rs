use anyhow::{bail, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;

use wallgrowth::{CharacterParams, ContourKind, ContourSpec, HalfInt, KernelEvaluator, KernelPoint};

use crate::config::RunConfig;
use crate::record::ResultRecord;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("points", ""),
    ("gamma", "1"),
    ("alpha", ""),
    ("beta", ""),
    ("contour", "ellipse"),
    ("radius", "1.5"),
    ("u_nodes", "512"),
    ("x_nodes", "256"),
    ("hole", "false"),
    ("out", ""),
    ("jobs", "0"),
];

/// `n,a,s` triples separated by `;` or whitespace, parentheses optional.
pub fn parse_points(s: &str) -> Result<Vec<KernelPoint>> {
    let mut out = Vec::new();
    for item in s.split(|c: char| c == ';' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let inner = item.trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            bail!("point {item:?} is not an (n,a,s) triple");
        }
        let n: usize = parts[0].trim().parse().map_err(|e| anyhow::anyhow!("point {item:?}: n: {e}"))?;
        let a = HalfInt::parse(parts[1])?;
        let s: u64 = parts[2].trim().parse().map_err(|e| anyhow::anyhow!("point {item:?}: s: {e}"))?;
        out.push(KernelPoint::new(n, a, s)?);
    }
    if out.is_empty() {
        bail!("no points given");
    }
    Ok(out)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| anyhow::anyhow!("{t:?}: {e}")))
        .collect()
}

pub struct KernelParams {
    pub points: Vec<KernelPoint>,
    pub omega: CharacterParams,
    pub contour: ContourSpec,
    pub hole: bool,
}

impl KernelParams {
    pub fn from_config(c: &RunConfig) -> Result<Self> {
        let points = parse_points(c.raw("points"))?;
        let omega = CharacterParams::new(parse_list(c.raw("alpha"))?, parse_list(c.raw("beta"))?, c.get("gamma")?)?;
        let (u, x): (usize, usize) = (c.get("u_nodes")?, c.get("x_nodes")?);
        let contour = match c.raw("contour") {
            "ellipse" => ContourSpec { u_nodes: u, x_nodes: x, ..ContourSpec::ellipse(c.get("radius")?) },
            "circle" => ContourSpec { x_nodes: x, ..ContourSpec::circle(u) },
            other => bail!("contour must be ellipse or circle, got {other:?}"),
        };
        contour.validate(&omega)?;
        Ok(Self { points, omega, contour, hole: c.get("hole")? })
    }
}

pub fn run(c: &RunConfig) -> Result<ResultRecord> {
    let p = KernelParams::from_config(c)?;
    let start = std::time::Instant::now();
    let ev = KernelEvaluator::new(&p.omega, p.contour)?;
    let k = p.points.len();
    let entries = (0..k * k)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (p.points[idx / k], p.points[idx % k]);
            if p.hole { ev.eval_hole(a, b) } else { ev.eval(a, b) }
        })
        .collect::<wallgrowth::Result<Vec<_>>>()?;
    let grid = |f: &dyn Fn(usize) -> f64| -> Vec<Vec<f64>> { (0..k).map(|i| (0..k).map(|j| f(i * k + j)).collect()).collect() };
    let det = DMatrix::from_fn(k, k, |i, j| entries[i * k + j].value).determinant();
    let (eu, ex) = p.contour.effective_nodes();
    let mut rec = ResultRecord::new(c);
    rec.put("points", p.points.iter().map(|q| q.to_string()).collect::<Vec<_>>());
    rec.put("matrix", grid(&|i| entries[i].value));
    rec.put("imag", grid(&|i| entries[i].imag));
    rec.put("error", grid(&|i| entries[i].error));
    rec.put("max_error", entries.iter().map(|e| e.error).fold(0.0, f64::max));
    rec.put("determinant", det);
    rec.put("hole", p.hole);
    rec.put(
        "contour_kind",
        match p.contour.kind {
            ContourKind::JoukowskiEllipse => "ellipse",
            ContourKind::CircleCoordinates => "circle",
        },
    );
    rec.put("radius", p.contour.radius);
    rec.put("effective_u_nodes", eu);
    rec.put("effective_x_nodes", ex);
    rec.wall_clock_seconds = start.elapsed().as_secs_f64();
    rec.emit(c.path("out").as_deref())?;
    Ok(rec)
}
