//! Kernel with u on the Joukowski ellipse u = (w + 1/w)/2, |w| = R, and x on
//! the Jacobi theta rule. Generic in the scalar: the pole of order n2 at
//! u = 1 sits close to the ellipse for R near 1, and the resulting
//! cancellation is what DoubleDouble is for.

use num_complex::Complex;

use super::KernelPoint;
use crate::characters::CharacterParams;
use crate::chebyshev_jacobi::{normalization_w, HalfInt, ThetaRule};
use crate::error::{Error, Result};
use crate::scalar::{cpowi, Real};

fn j_complex<T: Real>(a: HalfInt, s: u64, x: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let mut prev = one;
    if s == 0 {
        return prev;
    }
    let mut cur = match a {
        HalfInt::MinusHalf => x,
        HalfInt::PlusHalf => x.scale(T::of(2.0)) + one,
    };
    for _ in 1..s {
        let next = x * cur.scale(T::of(2.0)) - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Half-axis of the ellipse along the real line.
pub(crate) fn real_semi_axis(radius: f64) -> f64 {
    0.5 * (radius + 1.0 / radius)
}

pub(crate) fn check_ellipse(omega: &CharacterParams, radius: f64) -> Result<()> {
    if !(radius > 1.0) || !radius.is_finite() {
        return Err(Error::Contour(format!("ellipse radius {radius} must be > 1")));
    }
    let reach = real_semi_axis(radius);
    for z in omega.zeros() {
        if z.abs() <= reach {
            return Err(Error::Contour(format!(
                "zero of E at {z} lies inside the ellipse of radius {radius} (reach {reach})"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct EllipseParts<T> {
    pub double: Complex<T>,
    pub single: T,
    /// |double - double on every other u node|
    pub u_gap: f64,
}

/// Double integral and (for every pair of levels) the single integral, both
/// times W(s1)/pi.
pub(crate) fn evaluate<T: Real>(
    omega: &CharacterParams,
    p1: KernelPoint,
    p2: KernelPoint,
    radius: f64,
    rule: &ThetaRule<T>,
    mu: usize,
) -> EllipseParts<T> {
    let (a1, s1, n1) = (p1.level.a, p1.s, p1.level.n);
    let (a2, s2, n2) = (p2.level.a, p2.s, p2.level.n);
    let one = Complex::new(T::one(), T::zero());
    let half = T::of(0.5);
    let r = T::of(radius);
    let step = T::PI() * T::of(2.0) / T::of_usize(mu);
    // g_k = J(u) / (E(u) (u-1)^{n2}) du / (2 pi i) on the trapezoid nodes
    let mut us = Vec::with_capacity(mu);
    let mut gs = Vec::with_capacity(mu);
    for k in 0..mu {
        let (s, c) = (step * T::of_usize(k)).sin_cos_acc();
        let w = Complex::new(r * c, r * s);
        let wi = one / w;
        let u = (w + wi).scale(half);
        // du = (1 - w^{-2})/2 * i w dphi, over 2 pi i
        let du = (w - wi).scale(half * step / (T::PI() * T::of(2.0)));
        let den = omega.eval_e_complex_t(u) * cpowi(u - one, n2 as i64);
        us.push(u);
        gs.push(j_complex(a2, s2, u) * du / den);
    }
    let wts = rule.weights(a1);
    let mut double = Complex::new(T::zero(), T::zero());
    let mut coarse = double;
    let mut single = T::zero();
    let k = n1 as i64 - n2 as i64;
    for i in 0..rule.len() {
        let x = rule.x[i];
        let xc = Complex::new(x, T::zero());
        let mut g = Complex::new(T::zero(), T::zero());
        let mut g_even = g;
        for (i, (u, gk)) in us.iter().zip(&gs).enumerate() {
            let t = *gk / (xc - *u);
            g = g + t;
            if i % 2 == 0 {
                g_even = g_even + t;
            }
        }
        let jx = crate::chebyshev_jacobi::eval_j_theta(a1, s1, rule.theta[i]);
        let f = omega.eval_e_t(x) * (x - T::one()).powi(n1 as i32) * jx * wts[i];
        double = double + g.scale(f);
        coarse = coarse + g_even.scale(f + f);
        if k >= 0 {
            let j2 = crate::chebyshev_jacobi::eval_j_theta(a2, s2, rule.theta[i]);
            single = single + wts[i] * jx * j2 * (x - T::one()).powi(k as i32);
        }
    }
    let w = T::of(normalization_w(a1, s1)) / T::PI();
    let u_gap = Real::lo((double - coarse).scale(w).norm());
    EllipseParts { double: double.scale(w), single: single * w, u_gap }
}
