//! Kernel for (n1,a1) at or above (n2,a2) without any u-contour: expanding
//! about the pole at u = 1 leaves a finite sum of one-dimensional moments.

use std::f64::consts::PI;

use super::KernelPoint;
use crate::characters::CharacterParams;
use crate::chebyshev_jacobi::{eval_j_theta, normalization_w, theta_rule, HalfInt};
use crate::error::{Error, Result};

fn poly_mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Taylor coefficients of J_s(1 + w), degree < len.
fn j_shifted(a: HalfInt, s: u64, len: usize) -> Vec<f64> {
    let mut prev = vec![0.0; len];
    prev[0] = 1.0;
    if s == 0 {
        return prev;
    }
    // x = 1 + w
    let mut cur = vec![0.0; len];
    match a {
        HalfInt::MinusHalf => {
            cur[0] = 1.0;
            if len > 1 {
                cur[1] = 1.0;
            }
        }
        HalfInt::PlusHalf => {
            cur[0] = 3.0;
            if len > 1 {
                cur[1] = 2.0;
            }
        }
    }
    for _ in 1..s {
        let mut next = vec![0.0; len];
        for i in 0..len {
            next[i] = 2.0 * cur[i] - prev[i];
            if i > 0 {
                next[i] += 2.0 * cur[i - 1];
            }
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Taylor coefficients of 1/E(1 + w), degree < len.
fn inverse_e_shifted(omega: &CharacterParams, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    let mut term = 1.0;
    for (i, o) in out.iter_mut().enumerate() {
        *o = term;
        term *= -omega.gamma() / (i + 1) as f64;
    }
    for &b in omega.beta() {
        let c = b - 0.5 * b * b;
        let geo: Vec<f64> = (0..len).map(|i| (-c).powi(i as i32)).collect();
        out = poly_mul(&out, &geo, len);
    }
    for &a in omega.alpha() {
        let c = a + 0.5 * a * a;
        out = poly_mul(&out, &[1.0, -c], len);
    }
    out
}

/// Kernel value for p1 at or above p2 from the expansion, with the moments
/// integrated on `nodes` theta nodes. Plain f64; meant for small parameters.
pub fn series_oracle(omega: &CharacterParams, p1: KernelPoint, p2: KernelPoint, nodes: usize) -> Result<f64> {
    if p1.level < p2.level {
        return Err(Error::InvalidParameter(format!("series form needs {p1} at or above {p2}")));
    }
    let (n1, n2) = (p1.level.n, p2.level.n);
    let c = poly_mul(&j_shifted(p2.level.a, p2.s, n2), &inverse_e_shifted(omega, n2), n2);
    let rule = theta_rule(nodes);
    let moment = |p: usize| {
        rule.integrate(p1.level.a, |x, th| {
            omega.eval_e_t(x) * eval_j_theta(p1.level.a, p1.s, th) * (x - 1.0).powi(p as i32)
        })
    };
    let mut acc = 0.0;
    for m in 0..n2 {
        acc += c[n2 - 1 - m] * moment(n1 - m - 1);
    }
    Ok(normalization_w(p1.level.a, p1.s) / PI * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev_jacobi::eval_j_recurrence;

    #[test]
    fn shifted_polynomials() {
        for a in HalfInt::BOTH {
            for s in 0..7 {
                let c = j_shifted(a, s, s as usize + 2);
                let w: f64 = -0.3;
                let v: f64 = c.iter().enumerate().map(|(i, ci)| ci * w.powi(i as i32)).sum();
                assert!((v - eval_j_recurrence(a, s, 1.0 + w)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_series() {
        let om = CharacterParams::new(vec![0.4], vec![0.3], 0.7).unwrap();
        let c = inverse_e_shifted(&om, 30);
        let w: f64 = -0.2;
        let v: f64 = c.iter().enumerate().map(|(i, ci)| ci * w.powi(i as i32)).sum();
        assert!((v * om.eval_e_t(1.0 + w) - 1.0).abs() < 1e-13);
    }
}
