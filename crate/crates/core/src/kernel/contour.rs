use std::f64::consts::PI;

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Number of cosine modes in the log-radius beyond the constant one.
pub const FOURIER_TERMS: usize = 4;
const OBJECTIVE_NODES: usize = 256;
const MAX_RADIUS: f64 = 30.0;
const INFEASIBLE: f64 = 1e12;
/// Bound on the summed |a_k|, k >= 1: radius varies by at most e^{2 x this}.
const MAX_WIGGLE: f64 = 0.6;
/// Nats a refined shape must gain over the best circle to be kept.
const MIN_GAIN: f64 = 0.5;
/// The trapezoid rule on m nodes errs by about the integrand on the loop
/// displaced by i tau in its parameter, times e^{-m tau}. With
/// tau = SHIFT / m, growth of the integrand under that displacement is
/// allowed up to SHIFT_ALLOW nats before it counts against the loop.
const SHIFT: f64 = 40.0;
const SHIFT_ALLOW: f64 = 8.0;

/// Closed curve `center + exp(sum_k a_k cos(k theta)) e^{i theta}`, symmetric
/// under complex conjugation and star-shaped about its center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loop {
    pub center: f64,
    pub log_radius: Vec<f64>,
}

/// A real point the loop must keep away from, with the winding number the loop
/// must have around it (None: either is fine).
#[derive(Debug, Clone, Copy)]
pub struct Requirement {
    pub point: f64,
    pub winding: Option<i32>,
}

impl Requirement {
    pub fn inside(point: f64) -> Self {
        Self { point, winding: Some(1) }
    }
    pub fn outside(point: f64) -> Self {
        Self { point, winding: Some(0) }
    }
    pub fn avoid(point: f64) -> Self {
        Self { point, winding: None }
    }
}

impl Loop {
    pub fn circle(center: f64, radius: f64) -> Self {
        Self { center, log_radius: vec![radius.ln()] }
    }

    fn radius(&self, theta: f64) -> (f64, f64) {
        let mut lr = 0.0;
        let mut dlr = 0.0;
        for (k, &a) in self.log_radius.iter().enumerate() {
            let (s, c) = (k as f64 * theta).sin_cos();
            lr += a * c;
            dlr -= a * k as f64 * s;
        }
        let r = lr.exp();
        (r, r * dlr)
    }

    /// Trapezoid nodes at theta_j = 2 pi (j + phase) / m. The second entry is
    /// dz/dtheta times the weight 2 pi / m.
    pub fn nodes(&self, m: usize, phase: f64) -> Vec<(Complex64, Complex64)> {
        let h = 2.0 * PI / m as f64;
        (0..m)
            .map(|j| {
                let th = h * (j as f64 + phase);
                let (r, dr) = self.radius(th);
                let e = Complex64::from_polar(1.0, th);
                (self.center + r * e, Complex64::new(dr, r) * e * h)
            })
            .collect()
    }

    /// Points of the loop with the parameter moved to theta + i tau.
    pub fn displaced(&self, m: usize, tau: f64) -> Vec<Complex64> {
        let h = 2.0 * PI / m as f64;
        (0..m)
            .map(|j| {
                let th = Complex64::new(h * (j as f64 + 0.5), tau);
                let mut lr = Complex64::new(0.0, 0.0);
                for (k, &a) in self.log_radius.iter().enumerate() {
                    lr += a * (th * k as f64).cos();
                }
                self.center + (lr + Complex64::i() * th).exp()
            })
            .collect()
    }

    pub fn max_radius(&self, m: usize) -> f64 {
        (0..m).map(|j| self.radius(2.0 * PI * j as f64 / m as f64).0).fold(0.0, f64::max)
    }

    fn params(&self, dim: usize) -> Vec<f64> {
        let mut p = vec![0.0; dim];
        p[0] = self.center;
        for (i, &a) in self.log_radius.iter().enumerate().take(dim - 1) {
            p[i + 1] = a;
        }
        p
    }

    fn from_params(p: &[f64]) -> Self {
        Self { center: p[0], log_radius: p[1..].to_vec() }
    }
}

pub fn winding(nodes: &[(Complex64, Complex64)], q: f64) -> i32 {
    let q = Complex64::new(q, 0.0);
    let mut total = 0.0;
    for i in 0..nodes.len() {
        let a = nodes[i].0 - q;
        let b = nodes[(i + 1) % nodes.len()].0 - q;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i32
}

pub fn distance(nodes: &[(Complex64, Complex64)], q: f64) -> f64 {
    nodes.iter().map(|n| (n.0 - q).norm()).fold(f64::INFINITY, f64::min)
}

/// Distance to keep from the marked points when the loop will be integrated
/// on `resolution` nodes: a pole at distance d from a loop of size r costs
/// about exp(-resolution d / r) in the trapezoid rule.
pub fn margin(rmax: f64, resolution: usize) -> f64 {
    (40.0 / resolution as f64 * rmax).max(0.02)
}

pub fn feasible(l: &Loop, reqs: &[Requirement], m: usize, resolution: usize) -> bool {
    let nodes = l.nodes(m, 0.5);
    let rmax = nodes.iter().map(|n| (n.0 - l.center).norm()).fold(0.0, f64::max);
    let rmin = nodes.iter().map(|n| (n.0 - l.center).norm()).fold(f64::INFINITY, f64::min);
    let wiggle: f64 = l.log_radius.iter().skip(1).map(|a| a.abs()).sum();
    if !(rmax <= MAX_RADIUS) || !(rmin >= 0.01) || !(wiggle <= MAX_WIGGLE) {
        return false;
    }
    let gap = margin(rmax, resolution);
    reqs.iter().all(|r| {
        distance(&nodes, r.point) >= gap && r.winding.is_none_or(|w| winding(&nodes, r.point) == w)
    })
}

struct LoopCost<'a> {
    f: &'a (dyn Fn(Complex64) -> f64 + Sync),
    reqs: &'a [Requirement],
    resolution: usize,
}

impl LoopCost<'_> {
    fn eval(&self, l: &Loop) -> f64 {
        if !feasible(l, self.reqs, OBJECTIVE_NODES, self.resolution) {
            return INFEASIBLE;
        }
        let peak = |pts: &mut dyn Iterator<Item = Complex64>| {
            let mut worst = f64::NEG_INFINITY;
            for z in pts {
                let v = (self.f)(z);
                if v.is_nan() {
                    return f64::INFINITY;
                }
                worst = worst.max(v);
            }
            worst
        };
        let on = peak(&mut l.nodes(OBJECTIVE_NODES, 0.5).into_iter().map(|n| n.0));
        let tau = SHIFT / self.resolution as f64;
        let off = peak(&mut l.displaced(OBJECTIVE_NODES, tau).into_iter())
            .max(peak(&mut l.displaced(OBJECTIVE_NODES, -tau).into_iter()));
        let v = on.max(off - SHIFT_ALLOW);
        if v.is_finite() {
            v.min(INFEASIBLE)
        } else {
            INFEASIBLE
        }
    }
}

impl CostFunction for LoopCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, p: &Vec<f64>) -> Result<f64, ArgminError> {
        Ok(self.eval(&Loop::from_params(p)))
    }
}

fn nelder_mead(cost: &LoopCost, start: &Loop, dim: usize, iters: u64) -> (Loop, f64) {
    let p0 = start.params(dim);
    let mut simplex = vec![p0.clone()];
    for i in 0..dim {
        let mut p = p0.clone();
        p[i] += match i {
            0 => 0.05 * start.log_radius[0].exp(),
            1 => 0.08,
            _ => 0.04,
        };
        simplex.push(p);
    }
    let f0 = cost.eval(start);
    let solver = match NelderMead::new(simplex).with_sd_tolerance(1e-10) {
        Ok(s) => s,
        Err(_) => return (start.clone(), f0),
    };
    match Executor::new(LoopCost { f: cost.f, reqs: cost.reqs, resolution: cost.resolution }, solver)
        .configure(|s| s.max_iters(iters))
        .run()
    {
        Ok(res) => match (res.state.best_param, res.state.best_cost) {
            (Some(p), c) if c < f0 => (Loop::from_params(&p), c),
            _ => (start.clone(), f0),
        },
        Err(_) => (start.clone(), f0),
    }
}

/// Loop (among feasible shapes) that keeps max f as low as possible. Starts
/// from the best seeds, fits a circle, then frees the Fourier modes.
/// Returns None when no seed is feasible.
pub fn optimize(
    f: &(dyn Fn(Complex64) -> f64 + Sync),
    reqs: &[Requirement],
    seeds: &[Loop],
    resolution: usize,
    refine: bool,
) -> Option<(Loop, f64)> {
    let cost = LoopCost { f, reqs, resolution };
    let mut scored: Vec<(f64, &Loop)> =
        seeds.iter().map(|s| (cost.eval(s), s)).filter(|(v, _)| *v < INFEASIBLE).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<(Loop, f64)> = None;
    for (_, seed) in scored.iter().take(3) {
        let cand = nelder_mead(&cost, seed, 2, 300);
        if best.as_ref().is_none_or(|b| cand.1 < b.1) {
            best = Some(cand);
        }
    }
    let (circle, v) = best?;
    if !refine {
        return Some((circle, v));
    }
    let dim = 2 + FOURIER_TERMS;
    let mut cur = nelder_mead(&cost, &circle, dim, 1000);
    // a restart shakes the simplex loose when it collapsed early
    let again = nelder_mead(&cost, &cur.0, dim, 1000);
    if again.1 < cur.1 {
        cur = again;
    }
    Some(if cur.1 < v - MIN_GAIN { cur } else { (circle, v) })
}

pub fn seeds_around_zero() -> Vec<Loop> {
    let mut out = Vec::new();
    for &c in &[-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        for &extra in &[0.1, 0.3, 0.6, 1.0, 2.0] {
            let r = if c <= 0.0 { -c + extra } else { c + extra };
            out.push(Loop::circle(c, r));
        }
    }
    out
}

/// Circles through `left < right` on the real axis.
fn spans(lefts: &[f64], rights: &[f64]) -> Vec<Loop> {
    let mut out = Vec::new();
    for &l in lefts {
        for &r in rights {
            if r > l {
                out.push(Loop::circle(0.5 * (l + r), 0.5 * (r - l)));
            }
        }
    }
    out
}

/// Around 1 but not 0.
pub fn seeds_around_one() -> Vec<Loop> {
    spans(&[0.05, 0.15, 0.3, 0.5, 0.7, 0.9], &[1.1, 1.4, 2.0, 3.0, 5.0, 8.0, 12.0, 18.0])
}

/// Around 0 and 1.
pub fn seeds_around_both() -> Vec<Loop> {
    spans(&[-4.0, -2.0, -1.0, -0.5, -0.2, -0.05], &[1.1, 1.5, 2.5, 4.0, 8.0])
}

/// Around 0 but not 1.
pub fn seeds_around_zero_only() -> Vec<Loop> {
    spans(&[-3.0, -1.0, -0.5, -0.2, -0.05], &[0.05, 0.2, 0.5, 0.8, 0.95])
}
