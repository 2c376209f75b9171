use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use wallgrowth::asymptotics::{frozen_boundary, limit_density, limit_shape_h, saddle};
use wallgrowth::Error;

use crate::config::RunConfig;
use crate::record::{open_output, ResultRecord, FORMAT_VERSION};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("time", "1"),
    ("d_min", "0.05"),
    ("d_max", "4"),
    ("d_steps", "80"),
    ("l_min", "0.05"),
    ("l_max", "2"),
    ("l_steps", "40"),
    ("out", ""),
    ("csv", ""),
    ("jobs", "0"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub d: f64,
    pub l: f64,
    /// None at degenerate points.
    pub h: Option<f64>,
    pub density: Option<f64>,
    pub region: String,
}

pub struct ShapeParams {
    pub t: f64,
    pub d: Vec<f64>,
    pub l: Vec<f64>,
}

fn axis(lo: f64, hi: f64, steps: usize, name: &str) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi.is_finite() && hi >= lo) {
        bail!("{name} range must satisfy 0 < min <= max, got [{lo}, {hi}]");
    }
    if steps == 0 || (steps == 1 && hi > lo) {
        bail!("{name}_steps must be >= 2 unless min == max");
    }
    Ok((0..steps).map(|i| if steps == 1 { lo } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 }).collect())
}

impl ShapeParams {
    pub fn from_config(c: &RunConfig) -> Result<Self> {
        let t: f64 = c.get("time")?;
        if !(t > 0.0 && t.is_finite()) {
            bail!("time must be positive, got {t}");
        }
        Ok(Self {
            t,
            d: axis(c.get("d_min")?, c.get("d_max")?, c.get("d_steps")?, "d")?,
            l: axis(c.get("l_min")?, c.get("l_max")?, c.get("l_steps")?, "l")?,
        })
    }
}

pub fn grid_point(t: f64, d: f64, l: f64) -> Result<GridPoint> {
    match saddle(t, d, l) {
        Ok(s) => Ok(GridPoint {
            d,
            l,
            h: Some(limit_shape_h(t, d, l)?),
            density: Some(limit_density(t, d, l)?),
            region: s.region.as_str().to_string(),
        }),
        Err(Error::Degenerate(_)) => Ok(GridPoint { d, l, h: None, density: None, region: "degenerate".into() }),
        Err(e) => Err(e.into()),
    }
}

pub fn compute(p: &ShapeParams) -> Result<(Vec<GridPoint>, Vec<(f64, f64, f64)>)> {
    let cells: Vec<(f64, f64)> = p.l.iter().flat_map(|&l| p.d.iter().map(move |&d| (d, l))).collect();
    let grid = cells.into_par_iter().map(|(d, l)| grid_point(p.t, d, l)).collect::<Result<Vec<_>>>()?;
    let curves = p
        .l
        .iter()
        .map(|&l| frozen_boundary(p.t, l).map(|(q1, q2)| (l, q1, q2)))
        .collect::<wallgrowth::Result<Vec<_>>>()?;
    Ok((grid, curves))
}

pub fn run(c: &RunConfig) -> Result<ResultRecord> {
    let p = ShapeParams::from_config(c)?;
    let start = std::time::Instant::now();
    let (grid, curves) = compute(&p)?;
    let mut rec = ResultRecord::new(c);
    rec.put("d", grid.iter().map(|g| g.d).collect::<Vec<_>>());
    rec.put("l", grid.iter().map(|g| g.l).collect::<Vec<_>>());
    rec.put("h", grid.iter().map(|g| g.h).collect::<Vec<_>>());
    rec.put("density", grid.iter().map(|g| g.density).collect::<Vec<_>>());
    rec.put("region", grid.iter().map(|g| g.region.as_str()).collect::<Vec<_>>());
    rec.put("degenerate_count", grid.iter().filter(|g| g.region == "degenerate").count());
    rec.put("curve_l", curves.iter().map(|c| c.0).collect::<Vec<_>>());
    rec.put("curve_q1", curves.iter().map(|c| c.1).collect::<Vec<_>>());
    rec.put("curve_q2", curves.iter().map(|c| c.2).collect::<Vec<_>>());
    rec.put("curve_d1", curves.iter().map(|c| c.0 * c.1).collect::<Vec<_>>());
    rec.put("curve_d2", curves.iter().map(|c| c.0 * c.2).collect::<Vec<_>>());
    rec.wall_clock_seconds = start.elapsed().as_secs_f64();
    if let Some(path) = c.path("csv") {
        let ctx = || format!("writing {}", path.display());
        let mut w = csv::Writer::from_writer(open_output(Some(&path))?);
        w.write_record(["format_version", "t", "d", "l", "h", "density", "region"]).with_context(ctx)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for g in &grid {
            w.write_record([
                FORMAT_VERSION.to_string(),
                p.t.to_string(),
                g.d.to_string(),
                g.l.to_string(),
                opt(g.h),
                opt(g.density),
                g.region.clone(),
            ])
            .with_context(ctx)?;
        }
        w.flush().with_context(ctx)?;
    }
    rec.emit(c.path("out").as_deref())?;
    Ok(rec)
}
