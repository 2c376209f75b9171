use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use wallgrowth::dynamics::{replica_rng, simulate_with, Direction, EventLog, RNG_NAME};
use wallgrowth::ParticleConfig;

use crate::config::RunConfig;
use crate::record::{open_output, JsonLines, ResultRecord, FORMAT_VERSION, LIBRARY_VERSION};
use crate::svg;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("time", "1"),
    ("levels", "10"),
    ("replicas", "1"),
    ("seed", "0"),
    ("margin", "0"),
    ("out", ""),
    ("events", ""),
    ("snapshot", ""),
    ("histogram", ""),
    ("record", ""),
    ("jobs", "0"),
];

const CHUNK: u64 = 4096;

#[derive(Debug, Clone)]
pub struct SimulateParams {
    pub time: f64,
    pub levels: usize,
    pub replicas: u64,
    pub seed: u64,
    pub margin: usize,
}

impl SimulateParams {
    pub fn from_config(c: &RunConfig) -> Result<Self> {
        let p = Self {
            time: c.get("time")?,
            levels: c.get("levels")?,
            replicas: c.get("replicas")?,
            seed: c.get("seed")?,
            margin: c.get("margin")?,
        };
        if !(p.time >= 0.0 && p.time.is_finite()) {
            bail!("time must be finite and >= 0, got {}", p.time);
        }
        if p.levels == 0 {
            bail!("levels must be >= 1");
        }
        if p.replicas == 0 {
            bail!("replicas must be >= 1");
        }
        Ok(p)
    }
}

#[derive(Serialize)]
struct Header<'a> {
    format_version: u32,
    #[serde(rename = "type")]
    kind: &'a str,
    command: &'a str,
    config_hash: String,
    library_version: &'a str,
    rng: &'a str,
}

fn header<'a>(c: &'a RunConfig, kind: &'a str) -> Header<'a> {
    Header {
        format_version: FORMAT_VERSION,
        kind,
        command: &c.command,
        config_hash: c.hash(),
        library_version: LIBRARY_VERSION,
        rng: RNG_NAME,
    }
}

#[derive(Serialize)]
struct ReplicaLine<'a> {
    #[serde(rename = "type")]
    kind: &'a str,
    replica: u64,
    rows: &'a [Vec<i64>],
}

#[derive(Serialize)]
struct EventLine {
    #[serde(rename = "type")]
    kind: &'static str,
    replica: u64,
    time: f64,
    m: usize,
    k: usize,
    direction: Direction,
    extent: usize,
}

/// Final rows of replica `r`, cut back to the requested levels.
pub fn run_replica(p: &SimulateParams, r: u64, record: bool) -> Result<(ParticleConfig, EventLog)> {
    let mut rng = replica_rng(p.seed, r);
    let (cfg, log) = simulate_with(p.time, p.levels + p.margin, &mut rng, record)?;
    let rows = cfg.rows()[..p.levels].to_vec();
    let log = EventLog { events: log.events.into_iter().filter(|e| e.m <= p.levels).collect() };
    Ok((ParticleConfig::new(rows)?, log))
}

pub fn run(c: &RunConfig) -> Result<ResultRecord> {
    let p = SimulateParams::from_config(c)?;
    let start = std::time::Instant::now();
    let want_events = c.path("events").is_some();
    let mut samples = JsonLines::create(c.path("out").as_deref())?;
    samples.line(&header(c, "header"))?;
    let mut events = match c.path("events") {
        Some(path) => {
            let mut w = JsonLines::create(Some(&path))?;
            w.line(&header(c, "header"))?;
            Some(w)
        }
        None => None,
    };
    let mut hist: BTreeMap<(usize, i64), u64> = BTreeMap::new();
    let mut total_events = 0u64;
    let mut snapshot = None;
    let mut lo = 0;
    while lo < p.replicas {
        let hi = (lo + CHUNK).min(p.replicas);
        let batch = (lo..hi)
            .into_par_iter()
            .map(|r| run_replica(&p, r, want_events))
            .collect::<Result<Vec<_>>>()?;
        for (i, (cfg, log)) in batch.into_iter().enumerate() {
            let r = lo + i as u64;
            samples.line(&ReplicaLine { kind: "replica", replica: r, rows: cfg.rows() })?;
            for (m, row) in cfg.rows().iter().enumerate() {
                for &y in row {
                    *hist.entry((m + 1, y)).or_insert(0) += 1;
                }
            }
            total_events += log.len() as u64;
            if let Some(w) = events.as_mut() {
                for e in &log.events {
                    w.line(&EventLine {
                        kind: "event",
                        replica: r,
                        time: e.time,
                        m: e.m,
                        k: e.k,
                        direction: e.direction,
                        extent: e.extent,
                    })?;
                }
            }
            if r == 0 {
                snapshot = Some(cfg);
            }
        }
        lo = hi;
    }
    samples.finish()?;
    if let Some(w) = events {
        w.finish()?;
    }
    if let (Some(path), Some(cfg)) = (c.path("snapshot"), &snapshot) {
        std::fs::write(&path, svg::render(cfg)).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = c.path("histogram") {
        write_histogram(&path, &hist)?;
    }
    let mut rec = ResultRecord::new(c);
    rec.put("replicas", p.replicas);
    rec.put("levels", p.levels);
    rec.put("particles_per_replica", snapshot.as_ref().map(ParticleConfig::particle_count));
    rec.put("events_recorded", want_events.then_some(total_events));
    rec.wall_clock_seconds = start.elapsed().as_secs_f64();
    if let Some(path) = c.path("record") {
        rec.emit(Some(&path))?;
    }
    Ok(rec)
}

fn write_histogram(path: &std::path::Path, hist: &BTreeMap<(usize, i64), u64>) -> Result<()> {
    let ctx = || format!("writing {}", path.display());
    let mut w = csv::Writer::from_writer(open_output(Some(path))?);
    w.write_record(["format_version", "row", "y", "count"]).with_context(ctx)?;
    for (&(m, y), &n) in hist {
        w.write_record([FORMAT_VERSION.to_string(), m.to_string(), y.to_string(), n.to_string()]).with_context(ctx)?;
    }
    w.flush().with_context(ctx)?;
    Ok(())
}

/// Reads a histogram file back as ((row, y), count).
pub fn read_histogram(path: &std::path::Path) -> Result<Vec<((usize, i64), u64)>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(((rec[1].parse()?, rec[2].parse()?), rec[3].parse()?));
    }
    Ok(out)
}
