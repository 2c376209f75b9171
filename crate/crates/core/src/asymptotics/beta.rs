use num_complex::Complex64;
use std::f64::consts::PI;

use crate::chebyshev_jacobi::gauss_legendre;
use crate::error::{Error, Result};

const NODES: usize = 20;
const MAX_DEPTH: u32 = 40;

fn integrand(k: i64, l: i64, z: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z).powi(k as i32) * z.powi((-l - 1) as i32)
}

fn panel(k: i64, l: i64, a: Complex64, b: Complex64, rule: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    let (mid, half) = ((a + b) * 0.5, (b - a) * 0.5);
    rule.0.iter().zip(&rule.1).map(|(x, w)| integrand(k, l, mid + half * *x) * *w).sum::<Complex64>() * half
}

/// Adaptive bisection until both halves reproduce the whole.
fn segment(k: i64, l: i64, a: Complex64, b: Complex64, whole: Complex64, depth: u32, rule: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    let m = (a + b) * 0.5;
    let (left, right) = (panel(k, l, a, m, rule), panel(k, l, m, b, rule));
    let both = left + right;
    if depth >= MAX_DEPTH || (both - whole).norm() <= 1e-15 * (1.0 + both.norm()) {
        return both;
    }
    segment(k, l, a, m, left, depth + 1, rule) + segment(k, l, m, b, right, depth + 1, rule)
}

fn path(k: i64, l: i64, a: Complex64, b: Complex64, rule: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    segment(k, l, a, b, panel(k, l, a, b, rule), 0, rule)
}

/// (1/2 pi i) times the integral from conj(zeta) to zeta through the real
/// point `cross`, both halves on straight segments. Returns the complex value.
pub fn incomplete_beta_via(k: i64, l: i64, zeta: Complex64, cross: f64) -> Result<Complex64> {
    if !(zeta.im > 0.0) {
        return Err(Error::Domain(format!("zeta = {zeta} must lie in the upper half plane")));
    }
    let ok = if k >= 0 { cross > 0.0 && cross < 1.0 } else { cross < 0.0 };
    if !ok {
        return Err(Error::Domain(format!("crossing point {cross} not allowed for k = {k}")));
    }
    let rule = gauss_legendre::<f64>(NODES);
    let c = Complex64::new(cross, 0.0);
    let total = path(k, l, zeta.conj(), c, &rule) + path(k, l, c, zeta, &rule);
    Ok(total / Complex64::new(0.0, 2.0 * PI))
}

/// B(k, l; zeta).
pub fn incomplete_beta_kernel(k: i64, l: i64, zeta: Complex64) -> Result<f64> {
    let v = incomplete_beta_via(k, l, zeta, if k >= 0 { 0.5 } else { -1.0 })?;
    let bound = 1e-10 * (1.0 + v.re.abs());
    if v.im.abs() > bound {
        return Err(Error::ImaginaryResidue { residue: v.im.abs(), bound });
    }
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_zero_is_the_argument() {
        for z in [Complex64::new(0.3, 0.8), Complex64::new(-2.0, 0.1), Complex64::new(1.5, 2.0)] {
            assert!((incomplete_beta_kernel(0, 0, z).unwrap() - z.arg() / PI).abs() < 1e-12);
        }
        let near_pi = Complex64::from_polar(1.3, PI - 1e-6);
        assert!((incomplete_beta_kernel(0, 0, near_pi).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn constant_integrand() {
        let z = Complex64::new(0.4, 0.9);
        assert!((incomplete_beta_kernel(0, -1, z).unwrap() - z.im / PI).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(incomplete_beta_kernel(0, 0, Complex64::new(1.0, -0.1)).is_err());
        assert!(incomplete_beta_via(1, 0, Complex64::new(0.0, 1.0), -0.5).is_err());
        assert!(incomplete_beta_via(-1, 0, Complex64::new(0.0, 1.0), 0.5).is_err());
    }
}
