//! Kernel in circle coordinates x = (z + 1/z)/2, u = (v + 1/v)/2.
//!
//! The x-segment becomes a loop C_z around 0 and the u-contour a cycle Γ
//! around 1 (one loop, or an outer loop around 0 and 1 minus an inner loop
//! around 0). The pole of 1/(x - u) at v = z and v = 1/z is subtracted
//! under the inner integral and its contribution added back exactly by
//! residues, so the two contours are independent and can each sit on their
//! own steepest-descent pass.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::contour::{self, Loop, Requirement};
use super::exact::single_loop_integral;
use super::KernelPoint;
use crate::characters::CharacterParams;
use crate::chebyshev_jacobi::{normalization_w, HalfInt};
use crate::error::{Error, Result};

type C = Complex64;

/// log E(u) and the real points where E vanishes or blows up.
#[derive(Debug, Clone)]
pub(crate) struct LogE {
    gamma: f64,
    cb: Vec<f64>,
    ca: Vec<f64>,
}

impl LogE {
    pub(crate) fn new(omega: &CharacterParams) -> Self {
        Self {
            gamma: omega.gamma(),
            cb: omega.beta().iter().filter(|&&b| b > 0.0).map(|&b| b - 0.5 * b * b).collect(),
            ca: omega.alpha().iter().filter(|&&a| a > 0.0).map(|&a| a + 0.5 * a * a).collect(),
        }
    }

    pub(crate) fn ln(&self, u: C) -> C {
        let w = u - 1.0;
        let mut acc = w * self.gamma;
        for &c in &self.cb {
            acc += (1.0 + w * c).ln();
        }
        for &c in &self.ca {
            acc -= (1.0 - w * c).ln();
        }
        acc
    }

    fn zeros(&self) -> impl Iterator<Item = f64> + '_ {
        self.cb.iter().map(|c| 1.0 - 1.0 / c)
    }

    fn poles(&self) -> impl Iterator<Item = f64> + '_ {
        self.ca.iter().map(|c| 1.0 + 1.0 / c)
    }
}

/// The two real z with (z + 1/z)/2 = u, for real |u| > 1; the first has |z| < 1.
fn preimages(u: f64) -> (f64, f64) {
    let r = (u * u - 1.0).sqrt();
    let (a, b) = (u - r, u + r);
    if a.abs() < b.abs() {
        (a, b)
    } else {
        (b, a)
    }
}

fn joukowski(z: C) -> C {
    0.5 * (z + z.inv())
}

/// log (x - 1) with x = (z + 1/z)/2, only ever used with integer multipliers.
fn ln_xm1(z: C) -> C {
    2.0 * (z - 1.0).ln() - std::f64::consts::LN_2 - z.ln()
}

fn ln_j(a: HalfInt, s: u64, z: C) -> C {
    let (p, q) = super::exact::measure_exponents(a, s);
    let mut v = p as f64 * z.ln() - C::new(0.0, 2.0).ln();
    if q != 0 {
        v += q as f64 * (z - 1.0).ln();
    }
    v
}

/// J_s(u) = P(v) + P(1/v).
fn ln_p(a: HalfInt, s: u64, v: C) -> C {
    match a {
        HalfInt::MinusHalf => s as f64 * v.ln() - std::f64::consts::LN_2,
        HalfInt::PlusHalf => (s + 1) as f64 * v.ln() - (v - 1.0).ln(),
    }
}

fn ln_a(le: &LogE, p: KernelPoint, z: C) -> C {
    ln_j(p.level.a, p.s, z) + le.ln(joukowski(z)) + p.level.n as f64 * ln_xm1(z)
}

fn ln_h(le: &LogE, p: KernelPoint, v: C) -> C {
    ln_p(p.level.a, p.s, v) - le.ln(joukowski(v)) - p.level.n as f64 * ln_xm1(v) + (v * v - 1.0).ln() - v.ln()
}

#[derive(Debug, Clone)]
pub struct ZLoop {
    pub shape: Loop,
    /// max log|integrand factor| over the loop
    pub worst: f64,
}

#[derive(Debug, Clone)]
pub struct VCycle {
    /// loops with orientation sign
    pub loops: Vec<(Loop, f64)>,
    pub worst: f64,
}

fn z_requirements(le: &LogE) -> Vec<Requirement> {
    let mut reqs = vec![Requirement::inside(0.0), Requirement::avoid(1.0)];
    for u in le.zeros().chain(le.poles()) {
        let (small, big) = preimages(u);
        reqs.push(Requirement::inside(small));
        reqs.push(Requirement::outside(big));
    }
    reqs
}

pub(crate) fn z_loop(le: &LogE, p: KernelPoint, resolution: usize, refine: bool) -> Result<ZLoop> {
    let f = |z: C| ln_a(le, p, z).re;
    let (shape, worst) = contour::optimize(&f, &z_requirements(le), &contour::seeds_around_zero(), resolution, refine)
        .ok_or_else(|| Error::Contour(format!("no admissible x-loop for {p}")))?;
    Ok(ZLoop { shape, worst })
}

/// log of the larger subtracted term at z, without the v-integral.
fn ln_sub(p1: KernelPoint, p2: KernelPoint, z: C) -> f64 {
    let k = p1.level.n as f64 - p2.level.n as f64;
    let base = ln_j(p1.level.a, p1.s, z) + k * ln_xm1(z);
    (base + ln_p(p2.level.a, p2.s, z)).re.max((base + ln_p(p2.level.a, p2.s, z.inv())).re)
}

/// Peak of the subtracted terms along a loop, on the scale of `worst`.
pub(crate) fn sub_peak(p1: KernelPoint, p2: KernelPoint, l: &Loop) -> f64 {
    l.nodes(256, 0.5).iter().map(|n| ln_sub(p1, p2, n.0)).fold(f64::NEG_INFINITY, f64::max)
}

/// x-loop for one entry, accounting for the subtracted terms, which for p1
/// below p2 carry a pole at z = 1. Its `worst` is on the same scale as the
/// point-only loop's, so adding the cycle's `worst` still gives the log of
/// the largest term.
pub(crate) fn z_loop_pair(
    le: &LogE,
    p1: KernelPoint,
    p2: KernelPoint,
    v_worst: f64,
    resolution: usize,
    refine: bool,
) -> Result<ZLoop> {
    let f = |z: C| ln_a(le, p1, z).re.max(ln_sub(p1, p2, z) - v_worst);
    let (shape, worst) = contour::optimize(&f, &z_requirements(le), &contour::seeds_around_zero(), resolution, refine)
        .ok_or_else(|| Error::Contour(format!("no admissible x-loop for ({p1}, {p2})")))?;
    Ok(ZLoop { shape, worst })
}

pub(crate) fn v_cycle(le: &LogE, p: KernelPoint, resolution: usize, refine: bool) -> Result<VCycle> {
    let mut forbidden = Vec::new();
    for u in le.zeros() {
        let (small, big) = preimages(u);
        forbidden.push(Requirement::outside(small));
        forbidden.push(Requirement::outside(big));
    }
    let with = |extra: &[Requirement]| {
        let mut r = extra.to_vec();
        r.extend_from_slice(&forbidden);
        r
    };
    let f = |v: C| ln_h(le, p, v).re;
    let single = contour::optimize(
        &f,
        &with(&[Requirement::inside(1.0), Requirement::outside(0.0)]),
        &contour::seeds_around_one(),
        resolution,
        refine,
    );
    let outer = contour::optimize(
        &f,
        &with(&[Requirement::inside(1.0), Requirement::inside(0.0)]),
        &contour::seeds_around_both(),
        resolution,
        refine,
    );
    let inner = contour::optimize(
        &f,
        &with(&[Requirement::outside(1.0), Requirement::inside(0.0)]),
        &contour::seeds_around_zero_only(),
        resolution,
        refine,
    );
    let pair = match (outer, inner) {
        (Some(o), Some(i)) => Some(VCycle { worst: o.1.max(i.1), loops: vec![(o.0, 1.0), (i.0, -1.0)] }),
        _ => None,
    };
    let single = single.map(|(l, w)| VCycle { loops: vec![(l, 1.0)], worst: w });
    match (single, pair) {
        (Some(s), Some(p)) => Ok(if s.worst <= p.worst { s } else { p }),
        (Some(s), None) => Ok(s),
        (None, Some(p)) => Ok(p),
        (None, None) => Err(Error::Contour(format!("no admissible u-cycle for {p}"))),
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CircleParts {
    /// already multiplied by W(s1)/pi
    pub double: C,
    pub single: f64,
    pub error: f64,
}

/// Node phase for the v-loops keeping them away from the z nodes and their
/// reciprocals.
fn best_phase(z: &[(C, C)], cycle: &VCycle, mv: usize) -> f64 {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for phase in [0.0, 0.25, 0.5, 0.75] {
        let mut closest = f64::INFINITY;
        for (l, _) in &cycle.loops {
            for (v, _) in l.nodes(mv, phase) {
                for (zz, _) in z {
                    closest = closest.min((v - zz).norm()).min((v * zz - 1.0).norm() / zz.norm());
                }
            }
        }
        if closest > best.0 {
            best = (closest, phase);
        }
    }
    best.1
}

pub(crate) fn evaluate(
    le: &LogE,
    p1: KernelPoint,
    p2: KernelPoint,
    zl: &ZLoop,
    cycle: &VCycle,
    mz: usize,
    mv: usize,
) -> Result<CircleParts> {
    let (a1, s1, n1) = (p1.level.a, p1.s, p1.level.n as i64);
    let (a2, s2, n2) = (p2.level.a, p2.s, p2.level.n as i64);
    let k = n1 - n2;
    let znodes = zl.shape.nodes(mz, 0.5);
    let around_one = contour::winding(&znodes, 1.0) == 1;
    let exact = single_loop_integral(a1, s1, a2, s2, k, around_one);

    let phase = best_phase(&znodes, cycle, mv);
    // (v, dv/(2 pi i), log of h dv/(2 pi i), orientation, node of the half rule)
    let mut vs: Vec<(C, C, C, f64, bool)> = Vec::new();
    for (l, sign) in &cycle.loops {
        for (i, (v, dv)) in l.nodes(mv, phase).into_iter().enumerate() {
            let dvn = dv / C::new(0.0, 2.0 * PI);
            vs.push((v, dvn, ln_h(le, p2, v) + dvn.ln(), *sign, i % 2 == 0));
        }
    }
    let scale = vs.iter().map(|e| e.2.re).fold(f64::NEG_INFINITY, f64::max);
    let hh: Vec<C> = vs.iter().map(|e| (e.2 - scale).exp()).collect();

    let zero = C::new(0.0, 0.0);
    let mut total = zero;
    // same sum on every other node of both loops, for an error estimate
    let mut half = zero;
    let mut mag = 0.0;
    for (j, &(z, dz)) in znodes.iter().enumerate() {
        let la = ln_a(le, p1, z);
        if la.re + scale > 700.0 {
            return Err(Error::Convergence(format!(
                "integrand reaches e^{:.0} for ({p1}, {p2}); contours inadequate",
                la.re + scale
            )));
        }
        let amp = (la + scale).exp();
        let base = ln_j(a1, s1, z) + k as f64 * ln_xm1(z);
        let sub1 = (base + ln_p(a2, s2, z)).exp();
        let sub2 = (base + ln_p(a2, s2, z.inv())).exp();
        let zi = z.inv();
        let (mut main, mut r1, mut r2) = (zero, zero, zero);
        let (mut main_h, mut r1_h, mut r2_h) = (zero, zero, zero);
        let (mut m_abs, mut r1_abs, mut r2_abs) = (0.0, 0.0, 0.0);
        for (i, &(v, dvn, _, sign, even)) in vs.iter().enumerate() {
            let t = sign * hh[i] * z / ((z - v) * (z * v - 1.0));
            let q1 = sign * dvn / (v - z);
            let q2 = sign * dvn / (v - zi);
            main += t;
            r1 += q1;
            r2 += q2;
            if even {
                main_h += t;
                r1_h += q1;
                r2_h += q2;
            }
            m_abs += t.norm();
            r1_abs += q1.norm();
            r2_abs += q2.norm();
        }
        total += (amp * main + sub1 * r1 + sub2 * r2) * dz;
        if j % 2 == 0 {
            half += (amp * main_h + sub1 * r1_h + sub2 * r2_h) * dz * 4.0;
        }
        mag += (amp.norm() * m_abs + sub1.norm() * r1_abs + sub2.norm() * r2_abs) * dz.norm();
    }
    let w = normalization_w(a1, s1) / PI;
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(Error::Convergence(format!("non-finite integral for ({p1}, {p2})")));
    }
    let rounding = 64.0 * f64::EPSILON * (mag + exact.abs());
    Ok(CircleParts {
        double: w * (total - exact),
        single: w * exact,
        error: w * rounding.max((total - half).norm()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preimages_are_ordered() {
        let (a, b) = preimages(-3.0);
        assert!(a.abs() < 1.0 && b.abs() > 1.0);
        assert!((joukowski(C::new(a, 0.0)).re + 3.0).abs() < 1e-14);
        assert!((a * b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn circle_factors_reproduce_polynomials() {
        let z = C::new(0.7, 1.3);
        let x = joukowski(z);
        for s in 0..6u64 {
            let lhs = ln_p(HalfInt::PlusHalf, s, z).exp() + ln_p(HalfInt::PlusHalf, s, z.inv()).exp();
            // J_s(x) for a = +1/2 by recurrence in the complex plane
            let (mut p, mut c) = (C::new(1.0, 0.0), 2.0 * x + 1.0);
            for _ in 0..s {
                let nx = 2.0 * x * c - p;
                p = c;
                c = nx;
            }
            assert!((lhs - p).norm() < 1e-12 * p.norm());
        }
        let e = ln_xm1(z).exp();
        assert!((e - (x - 1.0)).norm() < 1e-14);
    }
}
