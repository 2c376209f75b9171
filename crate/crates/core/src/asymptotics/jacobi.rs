use std::f64::consts::PI;

use crate::chebyshev_jacobi::{eval_j_theta, normalization_w, QuadratureSpec, ThetaRule};
use crate::error::{Error, Result};
use crate::kernel::KernelPoint;

/// Discrete Jacobi kernel L(p1, p2; u): the one-sided orthogonality integral
/// over [u, 1] when p1 is at or above p2, minus the one over [-1, u] otherwise.
pub fn discrete_jacobi_l(p1: KernelPoint, p2: KernelPoint, u: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(u > -1.0 && u < 1.0) {
        return Err(Error::Domain(format!("u = {u} must lie in (-1, 1)")));
    }
    let v = u.acos();
    let upper = p1.level >= p2.level;
    let rule = if upper { ThetaRule::<f64>::on(0.0, v, q.theta_nodes) } else { ThetaRule::<f64>::on(v, PI, q.theta_nodes) };
    let k = p1.level.n as i32 - p2.level.n as i32;
    let (a1, a2) = (p1.level.a, p2.level.a);
    let integral = rule.integrate(a1, |x, th| eval_j_theta(a1, p1.s, th) * eval_j_theta(a2, p2.s, th) * (x - 1.0).powi(k));
    let sign = if upper { 1.0 } else { -1.0 };
    Ok(sign * normalization_w(a1, p1.s) / PI * integral)
}

/// Closed form on one level with a1 = a2 = -1/2.
pub fn discrete_jacobi_closed_form(s1: u64, s2: u64, u: f64) -> f64 {
    let v = u.acos();
    let frac = |m: f64| if m == 0.0 { v / PI } else { (v * m).sin() / (PI * m) };
    let pre = if s1 == 0 { 0.5 } else { 1.0 };
    pre * (frac(s1 as f64 - s2 as f64) + frac((s1 + s2) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev_jacobi::HalfInt;

    #[test]
    fn closed_form_matches_integral() {
        let q = QuadratureSpec::new(64).unwrap();
        for u in [-0.5, 0.0, 0.7] {
            for s1 in 0..=20 {
                for s2 in 0..=20 {
                    let p1 = KernelPoint::new(3, HalfInt::MinusHalf, s1).unwrap();
                    let p2 = KernelPoint::new(3, HalfInt::MinusHalf, s2).unwrap();
                    let num = discrete_jacobi_l(p1, p2, u, &q).unwrap();
                    assert!((num - discrete_jacobi_closed_form(s1, s2, u)).abs() < 1e-9, "{s1} {s2} {u}");
                }
            }
        }
    }

    #[test]
    fn full_interval_limits() {
        let q = QuadratureSpec::new(64).unwrap();
        let p = |s| KernelPoint::new(2, HalfInt::PlusHalf, s).unwrap();
        // [u, 1] nearly everything: orthonormality
        assert!((discrete_jacobi_l(p(3), p(3), -1.0 + 1e-12, &q).unwrap() - 1.0).abs() < 1e-5);
        assert!(discrete_jacobi_l(p(3), p(4), -1.0 + 1e-12, &q).unwrap().abs() < 1e-5);
        let lo = KernelPoint::new(1, HalfInt::MinusHalf, 2).unwrap();
        let hi = KernelPoint::new(4, HalfInt::MinusHalf, 5).unwrap();
        assert!(discrete_jacobi_l(lo, hi, 1.0 - 1e-12, &q).unwrap().is_finite());
        assert!(discrete_jacobi_l(lo, hi, 1.0, &q).is_err());
    }
}
