//! Acceptance checks grouped into named suites. Each criterion returns its
//! measured values next to the tolerances they are held to.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use anyhow::Result;
use clap::ValueEnum;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use wallgrowth::asymptotics::{
    bulk_kernel_limit_check, discrete_jacobi_closed_form, discrete_jacobi_l, frozen_boundary, limit_shape_h,
    pearcey_limit_check, saddle, wall_limit_check, Offset, PearceyGrid, PearceyPoint, Region,
};
use wallgrowth::characters::{FTable, SignaturePartition};
use wallgrowth::chebyshev_jacobi::{eval_j, eval_j_theta, normalization_w, theta_rule};
use wallgrowth::dynamics::{
    band_neighbors, evolve_distribution, expm_oracle, link_down, link_same, precedes, replica_rng, simulate_with,
    smallest_det_bound, transition_t, truncated_generator, Phi, PathDistribution,
};
use wallgrowth::special::bottom_level_law;
use wallgrowth::{
    CharacterParams, ContourSpec, HalfInt, KernelEvaluator, KernelPoint, LevelIndex, PathConfig, QuadratureSpec,
};

use crate::config::RunConfig;
use crate::record::ResultRecord;

const M: HalfInt = HalfInt::MinusHalf;
const P: HalfInt = HalfInt::PlusHalf;

pub const DEFAULTS: &[(&str, &str)] =
    &[("suite", "all"), ("replicas", "200000"), ("bottom_replicas", "50000"), ("seed", "3"), ("report", ""), ("jobs", "0")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Quadrature,
    Measures,
    Dynamics,
    KernelMc,
    Bulk,
    Wall,
    Pearcey,
    All,
}

impl Suite {
    pub fn criteria(self) -> Vec<u32> {
        match self {
            Suite::Quadrature => vec![1],
            Suite::Measures => vec![3],
            Suite::Dynamics => vec![2, 4, 5],
            Suite::KernelMc => vec![6, 7, 12],
            Suite::Bulk => vec![8, 11],
            Suite::Wall => vec![9],
            Suite::Pearcey => vec![10],
            Suite::All => (1..=12).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, relation: Relation::AtMost, tolerance, passed: measured <= tolerance }
    }

    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, relation: Relation::Below, tolerance: bound, passed: measured < bound }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, relation: Relation::AtLeast, tolerance, passed: measured >= tolerance }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::Below => "<",
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        let mark = if self.passed { "" } else { " !" };
        write!(f, "{} {:.3e} {rel} {:e}{mark}", self.name, self.measured, self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub sample_size: Option<u64>,
    pub runtime_seconds: f64,
    pub runtime_limit_seconds: f64,
    pub details: Value,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let checks: Vec<String> = self.checks.iter().map(Check::to_string).collect();
        format!(
            "criterion {:>2} {}  {}  [{}]  {:.1} s (limit {} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            checks.join("; "),
            self.runtime_seconds,
            self.runtime_limit_seconds
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub replicas: u64,
    pub bottom_replicas: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { replicas: 200_000, bottom_replicas: 50_000, seed: 3 }
    }
}

struct Outcome {
    title: &'static str,
    limit: f64,
    checks: Vec<Check>,
    sample_size: Option<u64>,
    details: Value,
}

fn outcome(title: &'static str, limit: f64, checks: Vec<Check>) -> Outcome {
    Outcome { title, limit, checks, sample_size: None, details: Value::Null }
}

pub fn run_criterion(id: u32, opts: &VerifyOptions) -> CriterionReport {
    let start = Instant::now();
    let res = match id {
        1 => quadrature(),
        2 => bottom_particle(opts),
        3 => measures(),
        4 => transitions(),
        5 => semigroup(),
        6 => kernel_monte_carlo(opts),
        7 => trivial_omega(),
        8 => bulk(),
        9 => wall(),
        10 => pearcey(),
        11 => limit_shape(),
        12 => hole_identity(),
        _ => Err(anyhow::anyhow!("no criterion {id}")),
    };
    let runtime = start.elapsed().as_secs_f64();
    match res {
        Ok(o) => {
            let mut checks = o.checks;
            checks.push(Check::at_most("runtime_s", runtime, o.limit));
            CriterionReport {
                id,
                title: o.title.to_string(),
                passed: checks.iter().all(|c| c.passed),
                checks,
                sample_size: o.sample_size,
                runtime_seconds: runtime,
                runtime_limit_seconds: o.limit,
                details: o.details,
            }
        }
        Err(e) => CriterionReport {
            id,
            title: format!("criterion {id}"),
            passed: false,
            checks: vec![],
            sample_size: None,
            runtime_seconds: runtime,
            runtime_limit_seconds: 0.0,
            details: json!({ "error": format!("{e:#}") }),
        },
    }
}

fn quadrature() -> Result<Outcome> {
    let rule = theta_rule(256);
    let mut orth: f64 = 0.0;
    for a in HalfInt::BOTH {
        for j in 0..=50u64 {
            for k in 0..=50u64 {
                let v = rule.integrate(a, |_, th| eval_j_theta(a, j, th) * eval_j_theta(a, k, th));
                let e = if j == k { 1.0 } else { 0.0 };
                orth = orth.max((normalization_w(a, k) / PI * v - e).abs());
            }
        }
    }
    let xs: Vec<f64> = (0..=200).map(|i| -1.0 + 2.0 * i as f64 / 200.0).collect();
    let (mut three, mut ident_a, mut ident_b): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for &x in &xs {
        let jm: Vec<f64> = (0..=51).map(|s| eval_j(M, s, x).unwrap()).collect();
        let jp: Vec<f64> = (0..=51).map(|s| eval_j(P, s, x).unwrap()).collect();
        for k in 1..=50 {
            for j in [&jm, &jp] {
                let l = x * j[k];
                three = three.max((l - 0.5 * (j[k + 1] + j[k - 1])).abs() / (1.0 + l.abs()));
            }
        }
        three = three.max((x - jm[1]).abs()).max((x - (-0.5 + 0.5 * jp[1])).abs());
        for s in 0..=50usize {
            let lhs: f64 = (0..=s).map(|r| normalization_w(M, r as u64) * jm[r]).sum();
            ident_a = ident_a.max((lhs - jp[s]).abs() / (1.0 + jp[s].abs()));
            if s > 0 && x < 1.0 {
                let lhs: f64 = jp[..s].iter().sum();
                let rhs = (jm[s] - 1.0) / (x - 1.0);
                ident_b = ident_b.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
            }
        }
    }
    let mut ident_c: f64 = 0.0;
    for s in 0..=50u64 {
        let v = rule.integrate(M, |_, th| eval_j_theta(P, s, th)) / PI;
        ident_c = ident_c.max((v - 1.0).abs());
    }
    Ok(outcome(
        "quadrature and polynomial identities, degree <= 50",
        10.0,
        vec![
            Check::at_most("orthogonality", orth, 1e-10),
            Check::at_most("three_term", three, 1e-12),
            Check::at_most("partial_sum_a", ident_a, 1e-10),
            Check::at_most("partial_sum_b", ident_b, 1e-10),
            Check::at_most("chebyshev_mass_c", ident_c, 1e-10),
        ],
    ))
}

/// |f - p| in units of the binomial standard error sqrt(p(1-p)/n).
fn z_score(freq: f64, p: f64, n: u64) -> f64 {
    let pc = p.clamp(0.0, 1.0);
    let se = (pc * (1.0 - pc) / n as f64).sqrt();
    let diff = (freq - p).abs();
    if se > 0.0 {
        diff / se
    } else if diff < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn bottom_particle(opts: &VerifyOptions) -> Result<Outcome> {
    let (reps, tt) = (opts.bottom_replicas, 2.0);
    let ks: Vec<u64> = (0..reps)
        .into_par_iter()
        .map(|r| simulate_with(tt, 1, &mut replica_rng(opts.seed, r), false).map(|(c, _)| (c.row(1)[0] / 2) as u64))
        .collect::<wallgrowth::Result<_>>()?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 0..=6u64 {
        let f = ks.iter().filter(|&&v| v == k).count() as f64 / reps as f64;
        let p = bottom_level_law(k, tt);
        let z = z_score(f, p, reps);
        worst = worst.max(z);
        rows.push(json!({ "k": k, "exact": p, "empirical": f, "z": z }));
    }
    Ok(Outcome {
        sample_size: Some(reps),
        details: json!({ "bins": rows }),
        ..outcome("bottom particle law at t = 2 against the Bessel law", 60.0, vec![Check::at_most("max_z", worst, 3.0)])
    })
}

fn measures() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut sums = Vec::new();
    for &tt in &[0.5, 1.0, 2.0, 4.0] {
        for n in 1..=3usize {
            for a in HalfInt::BOTH {
                let table = FTable::plancherel(tt, n, a, 40 + n as u64 + 1);
                let total: f64 = SignaturePartition::enumerate(n, 40)
                    .par_iter()
                    .map(|lam| table.measure(lam))
                    .collect::<wallgrowth::Result<Vec<_>>>()?
                    .iter()
                    .sum();
                worst = worst.max((total - 1.0).abs());
                sums.push(json!({ "t": tt, "n": n, "a": a.to_string(), "sum": total }));
            }
        }
    }
    Ok(Outcome {
        details: json!({ "sums": sums }),
        ..outcome("exact measures sum to one, Lambda = 40", 60.0, vec![Check::at_most("max_mass_defect", worst, 1e-10)])
    })
}

fn transitions() -> Result<Outcome> {
    let q = QuadratureSpec::default();
    let t = |n, a, phi: &Phi, mu: &SignaturePartition, lam: &SignaturePartition| transition_t(n, a, phi, mu, lam, &q);
    let (mut row_dev, mut min_entry, mut diag_margin): (f64, f64, f64) = (0.0, f64::INFINITY, f64::INFINITY);
    for &p in &[0.1, 0.3, 0.5] {
        let phi = Phi::lazy(p);
        for n in 1..=4usize {
            for a in HalfInt::BOTH {
                for mu in SignaturePartition::enumerate(n, 4) {
                    let mut s = 0.0;
                    for lam in SignaturePartition::enumerate(n, 5) {
                        let v = t(n, a, &phi, &mu, &lam)?;
                        min_entry = min_entry.min(v);
                        s += v;
                    }
                    row_dev = row_dev.max((s - 1.0).abs());
                    let d = t(n, a, &phi, &mu, &mu)?;
                    diag_margin = diag_margin.min(d - smallest_det_bound(1.0 - p, p, n as u32));
                }
            }
        }
    }
    let phi = Phi::lazy(0.3);
    let bound = 5;
    let mut comm: f64 = 0.0;
    for n in 1..=3usize {
        for mu in SignaturePartition::enumerate(n, bound) {
            let below: Vec<SignaturePartition> =
                SignaturePartition::enumerate(n, mu.first()).into_iter().filter(|nu| precedes(nu, &mu)).collect();
            for lam in SignaturePartition::enumerate(n, bound + 1) {
                let mut left = 0.0;
                for nu in band_neighbors(&mu) {
                    left += t(n, P, &phi, &mu, &nu)? * link_same(n, &nu, &lam)?;
                }
                let mut right = 0.0;
                for nu in &below {
                    right += link_same(n, &mu, nu)? * t(n, M, &phi, nu, &lam)?;
                }
                comm = comm.max((left - right).abs());
            }
            if n >= 2 {
                let below: Vec<SignaturePartition> = SignaturePartition::enumerate(n - 1, mu.first())
                    .into_iter()
                    .filter(|nu| precedes(nu, &mu))
                    .collect();
                for lam in SignaturePartition::enumerate(n - 1, bound + 1) {
                    let mut left = 0.0;
                    for nu in band_neighbors(&mu) {
                        left += t(n, M, &phi, &mu, &nu)? * link_down(n, &nu, &lam)?;
                    }
                    let mut right = 0.0;
                    for nu in &below {
                        right += link_down(n, &mu, nu)? * t(n - 1, P, &phi, nu, &lam)?;
                    }
                    comm = comm.max((left - right).abs());
                }
            }
        }
    }
    Ok(outcome(
        "one-step transition matrices, phi = 1 - p + p x",
        60.0,
        vec![
            Check::at_most("row_sum_deviation", row_dev, 1e-12),
            Check::at_least("min_entry", min_entry, -1e-14),
            Check::at_least("diagonal_minus_bound", diag_margin, -1e-14),
            Check::at_most("commutation_residual", comm, 1e-10),
        ],
    ))
}

/// TV distance between the generator semigroup and `steps` composed
/// sequential updates, both started from the packed path ending at (1, a).
pub fn semigroup_gap(a: HalfInt, tt: f64, steps: usize) -> Result<f64> {
    let start = PathConfig::packed(LevelIndex::new(1, a)?);
    let gen = truncated_generator(1, a, 25)?;
    let exact = expm_oracle(&gen, tt, &gen.delta(&start)?, 1e-8)?;
    let mut init = PathDistribution::new();
    init.insert(start, 1.0);
    let composed = evolve_distribution(&init, &Phi::lazy(tt / steps as f64), steps)?;
    let tv: f64 =
        gen.states.iter().enumerate().map(|(i, s)| (exact.dist[i] - composed.get(s).copied().unwrap_or(0.0)).abs()).sum();
    Ok(0.5 * tv)
}

fn semigroup() -> Result<Outcome> {
    let (minus, plus) = (semigroup_gap(M, 0.5, 64)?, semigroup_gap(P, 0.5, 64)?);
    Ok(outcome(
        "generator semigroup against 64 composed steps, N = 1, t = 0.5",
        60.0,
        vec![Check::at_most("tv_level_(1,-1/2)", minus, 2e-3), Check::at_most("tv_level_(1,+1/2)", plus, 2e-3)],
    ))
}

fn pt(n: usize, a: HalfInt, s: u64) -> KernelPoint {
    KernelPoint::new(n, a, s).expect("valid lattice point")
}

/// Pairs whose joint occupation is compared with the simulation.
pub fn mc_pairs() -> Vec<[KernelPoint; 2]> {
    vec![
        [pt(1, M, 0), pt(1, P, 1)],
        [pt(2, M, 1), pt(2, M, 2)],
        [pt(2, P, 0), pt(3, M, 2)],
        [pt(3, P, 2), pt(4, M, 3)],
        [pt(4, M, 0), pt(4, M, 3)],
        [pt(1, P, 2), pt(4, P, 4)],
    ]
}

fn kernel_monte_carlo(opts: &VerifyOptions) -> Result<Outcome> {
    let gamma = 4.0;
    let ev = KernelEvaluator::new(&CharacterParams::plancherel(gamma)?, ContourSpec::default())?;
    let singles: Vec<KernelPoint> =
        (1..=4).flat_map(|n| HalfInt::BOTH.into_iter().flat_map(move |a| (0..=10).map(move |s| pt(n, a, s)))).collect();
    let pairs = mc_pairs();
    let mut sets: Vec<Vec<KernelPoint>> = singles.iter().map(|&p| vec![p]).collect();
    sets.extend(pairs.iter().map(|p| p.to_vec()));
    let exact = sets.par_iter().map(|s| ev.correlation(s, false)).collect::<wallgrowth::Result<Vec<f64>>>()?;
    let rows = singles.iter().map(|p| p.level.row()).max().unwrap_or(1);
    let sites: Vec<Vec<(i64, usize)>> = sets
        .iter()
        .map(|s| {
            s.iter()
                .map(|p| {
                    let (y, m) = p.particle();
                    (y as i64, m)
                })
                .collect()
        })
        .collect();
    let hits = (0..opts.replicas)
        .into_par_iter()
        .map(|r| {
            let (cfg, _) = simulate_with(gamma, rows, &mut replica_rng(opts.seed, r), false)?;
            Ok(sites.iter().map(|s| s.iter().all(|&(y, m)| cfg.is_occupied(y, m)) as u64).collect::<Vec<u64>>())
        })
        .try_reduce(|| vec![0; sites.len()], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()))
        .map_err(|e: wallgrowth::Error| anyhow::Error::from(e))?;
    let mut worst: f64 = 0.0;
    let mut per_point = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        let f = hits[i] as f64 / opts.replicas as f64;
        let z = z_score(f, exact[i], opts.replicas);
        worst = worst.max(z);
        let label: Vec<String> = s.iter().map(|p| p.to_string()).collect();
        per_point.push(json!({ "points": label, "exact": exact[i], "empirical": f, "z": z }));
    }
    Ok(Outcome {
        sample_size: Some(opts.replicas),
        details: json!({ "gamma": gamma, "seed": opts.seed, "comparisons": per_point }),
        ..outcome(
            "kernel correlations against simulation at gamma = 4",
            900.0,
            vec![Check::at_most("max_z", worst, 3.0)],
        )
    })
}

fn trivial_omega() -> Result<Outcome> {
    let ev = KernelEvaluator::new(&CharacterParams::trivial(), ContourSpec::default())?;
    let pts: Vec<KernelPoint> =
        (1..=10).flat_map(|n| HalfInt::BOTH.into_iter().flat_map(move |a| (0..=12).map(move |s| pt(n, a, s)))).collect();
    let worst = pts
        .par_iter()
        .map(|&p| {
            let want = if (p.s as usize) < p.level.n { 1.0 } else { 0.0 };
            ev.eval(p, p).map(|e| (e.value - want).abs())
        })
        .collect::<wallgrowth::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(outcome(
        "trivial omega gives the packed indicator, n <= 10",
        10.0,
        vec![Check::at_most("max_diagonal_deviation", worst, 1e-8)],
    ))
}

fn large_n_contour() -> ContourSpec {
    ContourSpec::circle(512)
}

fn bulk() -> Result<Outcome> {
    let c = large_n_contour();
    let big_n = 200;
    let origin: [Offset; 1] = [(0, M, 0)];
    let (_, q2) = frozen_boundary(1.0, 1.0)?;
    let (q1_left, _) = frozen_boundary(0.3, 1.0)?;
    let right_d = 1.5 * q2;
    let left_d = 0.5 * q1_left;
    let jobs = [(1.0, 1.0, 1.0), (1.0, right_d, 1.0), (0.3, left_d, 1.0)];
    let res = jobs
        .par_iter()
        .map(|&(t, d, l)| bulk_kernel_limit_check(t, d, l, big_n, &origin, c))
        .collect::<wallgrowth::Result<Vec<_>>>()?;
    Ok(Outcome {
        details: json!({
            "N": big_n,
            "liquid": { "t": 1.0, "d": 1.0, "l": 1.0, "exact": res[0].exact, "predicted": res[0].predicted },
            "frozen_right": { "t": 1.0, "d": right_d, "l": 1.0, "exact": res[1].exact },
            "frozen_left": { "t": 0.3, "d": left_d, "l": 1.0, "exact": res[2].exact },
        }),
        ..outcome(
            "bulk density against arg(z0)/pi at N = 200",
            300.0,
            vec![
                Check::at_most("liquid_gap", res[0].gap(), 0.02),
                Check::at_most("frozen_right_density", res[1].exact, 0.02),
                Check::at_least("frozen_left_density", res[2].exact, 0.98),
            ],
        )
    })
}

fn wall() -> Result<Outcome> {
    let c = large_n_contour();
    let big_n = 300;
    let mut sets: Vec<Vec<Offset>> = Vec::new();
    for a in HalfInt::BOTH {
        for s in 0..=6 {
            sets.push(vec![(0, a, s)]);
        }
    }
    let pairs: Vec<Vec<Offset>> = vec![
        vec![(0, M, 1), (0, M, 4)],
        vec![(0, M, 2), (0, P, 2)],
        vec![(0, M, 3), (1, P, 5)],
        vec![(1, M, 0), (0, P, 6)],
    ];
    let n_single = sets.len();
    sets.extend(pairs);
    let res = sets
        .par_iter()
        .map(|o| wall_limit_check(1.0, 1.0, big_n, o, c))
        .collect::<wallgrowth::Result<Vec<_>>>()?;
    let diag = res[..n_single].iter().map(|r| r.gap()).fold(0.0, f64::max);
    let dets = res[n_single..].iter().map(|r| r.gap()).fold(0.0, f64::max);
    let q = QuadratureSpec::new(128)?;
    let mut closed: f64 = 0.0;
    for &u in &[0.0, 0.3, -0.4] {
        for s1 in 0..=6 {
            for s2 in 0..=6 {
                let num = discrete_jacobi_l(pt(4, M, s1), pt(4, M, s2), u, &q)?;
                closed = closed.max((num - discrete_jacobi_closed_form(s1, s2, u)).abs());
            }
        }
    }
    let rows: Vec<Value> = res
        .iter()
        .map(|r| {
            json!({
                "points": r.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "exact": r.exact, "predicted": r.predicted,
            })
        })
        .collect();
    Ok(Outcome {
        details: json!({ "N": big_n, "comparisons": rows }),
        ..outcome(
            "wall kernel against the discrete Jacobi kernel at t/l = 1, N = 300",
            300.0,
            vec![
                Check::at_most("diagonal_gap", diag, 0.01),
                Check::at_most("det2_gap", dets, 0.01),
                Check::at_most("closed_form_vs_integral", closed, 1e-9),
            ],
        )
    })
}

fn pearcey() -> Result<Outcome> {
    let c = large_n_contour();
    let point = [PearceyPoint::new(1.0, 0.0)?];
    let grid = PearceyGrid::default();
    let ns = [100u64, 200, 400];
    let res = ns
        .par_iter()
        .map(|&n| pearcey_limit_check(n, &point, &grid, c))
        .collect::<wallgrowth::Result<Vec<_>>>()?;
    let gaps: Vec<f64> = res.iter().map(|r| r.gap()).collect();
    let shrink = gaps.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let rel = gaps[2] / res[2].predicted.abs();
    Ok(Outcome {
        details: json!({
            "N": ns, "gaps": gaps, "exact": res.iter().map(|r| r.exact).collect::<Vec<_>>(),
            "predicted": res[0].predicted,
        }),
        ..outcome(
            "rescaled hole density against the symmetric Pearcey kernel at (1, 0)",
            600.0,
            vec![
                Check::below("worst_gap_ratio", shrink, 1.0),
                Check::at_most("relative_gap_N400", rel, 0.05),
            ],
        )
    })
}

fn limit_shape() -> Result<Outcome> {
    let mut fd_err: f64 = 0.0;
    let h = 1e-4;
    for (t, d, l) in [(1.0, 1.0, 1.0), (1.0, 2.5, 1.0), (0.5, 0.8, 1.0), (2.0, 1.5, 0.7), (0.3, 1.2, 1.0)] {
        let s = saddle(t, d, l)?;
        if s.region != Region::Liquid {
            anyhow::bail!("({t}, {d}, {l}) is not liquid");
        }
        let fd = (limit_shape_h(t, d + h, l)? - limit_shape_h(t, d - h, l)?) / (2.0 * h);
        fd_err = fd_err.max((fd + s.z0.arg() / (2.0 * PI)).abs());
    }
    let mut frozen: f64 = 0.0;
    for t in [0.3, 1.0, 2.0] {
        let (_, q2) = frozen_boundary(t, 1.0)?;
        for d in [1.01 * q2, 1.5 * q2, 3.0 * q2 + 10.0] {
            frozen = frozen.max(limit_shape_h(t, d, 1.0)?.abs());
        }
    }
    Ok(outcome(
        "limit shape derivative and frozen-right height",
        10.0,
        vec![Check::at_most("finite_difference_error", fd_err, 1e-4), Check::at_most("frozen_right_height", frozen, 0.0)],
    ))
}

fn hole_identity() -> Result<Outcome> {
    let om = CharacterParams::plancherel(1.7)?;
    let ev = KernelEvaluator::new(&om, ContourSpec::default())?;
    let mut rng = replica_rng(12, 0);
    let pairs: Vec<(KernelPoint, KernelPoint)> = (0..50)
        .map(|_| {
            let mut draw = || pt(rng.random_range(1..=5), if rng.random_bool(0.5) { M } else { P }, rng.random_range(0..8));
            (draw(), draw())
        })
        .collect();
    let delta = pairs
        .par_iter()
        .map(|&(p, q)| {
            let d = if p == q { 1.0 } else { 0.0 };
            Ok((ev.eval(p, q)?.value + ev.eval_hole(p, q)?.value - d).abs())
        })
        .collect::<wallgrowth::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let om = CharacterParams::plancherel(2.2)?;
    let ev = KernelEvaluator::new(&om, ContourSpec::default())?;
    let windows = [
        vec![pt(1, M, 0), pt(1, M, 1), pt(1, M, 2)],
        vec![pt(3, P, 1), pt(3, P, 2), pt(2, M, 2), pt(4, M, 5)],
        vec![pt(2, P, 0), pt(2, M, 3)],
        vec![pt(1, P, 0), pt(2, P, 1), pt(3, P, 2), pt(4, P, 3)],
    ];
    let mut incl: f64 = 0.0;
    for w in &windows {
        let holes = ev.correlation(w, true)?;
        let alt: f64 = (0u32..(1 << w.len()))
            .into_par_iter()
            .map(|mask| {
                let sub: Vec<KernelPoint> = (0..w.len()).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).collect();
                let sign = if sub.len() % 2 == 0 { 1.0 } else { -1.0 };
                ev.correlation(&sub, false).map(|v| sign * v)
            })
            .collect::<wallgrowth::Result<Vec<f64>>>()?
            .into_iter()
            .sum();
        incl = incl.max((holes - alt).abs());
    }
    Ok(Outcome {
        sample_size: Some(pairs.len() as u64),
        ..outcome(
            "hole kernel identity and inclusion-exclusion",
            60.0,
            vec![Check::at_most("k_plus_hole_minus_delta", delta, 1e-12), Check::at_most("inclusion_exclusion", incl, 1e-8)],
        )
    })
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions, mut on_done: impl FnMut(&CriterionReport)) -> Vec<CriterionReport> {
    suite
        .criteria()
        .into_iter()
        .map(|id| {
            let r = run_criterion(id, opts);
            on_done(&r);
            r
        })
        .collect()
}

pub fn run(c: &RunConfig, suite: Suite) -> Result<(ResultRecord, bool)> {
    let opts = VerifyOptions { replicas: c.get("replicas")?, bottom_replicas: c.get("bottom_replicas")?, seed: c.get("seed")? };
    if opts.replicas == 0 || opts.bottom_replicas == 0 {
        anyhow::bail!("replica counts must be >= 1");
    }
    let start = Instant::now();
    let reports = run_suite(suite, &opts, |r| eprintln!("{}", r.line()));
    let ok = reports.iter().all(|r| r.passed);
    let mut rec = ResultRecord::new(c);
    rec.put("suite", suite);
    rec.put("passed", ok);
    let by_id: BTreeMap<String, &CriterionReport> = reports.iter().map(|r| (format!("criterion_{:02}", r.id), r)).collect();
    rec.put("criteria", by_id);
    rec.wall_clock_seconds = start.elapsed().as_secs_f64();
    rec.emit(c.path("report").as_deref())?;
    Ok((rec, ok))
}
