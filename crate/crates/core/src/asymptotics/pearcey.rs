//! Symmetric Pearcey kernel. x runs over (0, inf) and u over the rays
//! inf e^{i pi/4} -> 0 -> inf e^{-i pi/4}; parametrising u = r e^{+-i pi/4}
//! puts both integrals on the quarter plane (x, r) >= 0, where u/(u^2 - x^2)
//! is homogeneous of degree -1 at the origin and nowhere else singular.
//! Both routes below absorb that with a radial Jacobian.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chebyshev_jacobi::gauss_legendre;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearceyPoint {
    pub sigma: f64,
    pub eta: f64,
}

impl PearceyPoint {
    pub fn new(sigma: f64, eta: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite() && eta.is_finite()) {
            return Err(Error::Domain(format!("pearcey point needs sigma >= 0, got ({sigma}, {eta})")));
        }
        Ok(Self { sigma, eta })
    }
}

/// Gauss-Legendre counts in the radial and angular directions, and the
/// truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearceyGrid {
    pub radial: usize,
    pub angular: usize,
    pub cutoff: f64,
}

impl Default for PearceyGrid {
    fn default() -> Self {
        Self { radial: 160, angular: 160, cutoff: 6.0 }
    }
}

impl PearceyGrid {
    pub fn doubled(self) -> Self {
        Self { radial: 2 * self.radial, angular: 2 * self.angular, ..self }
    }
}

/// Integrand summed over both rays at (x, r), including du and orientation.
fn rays(p1: PearceyPoint, p2: PearceyPoint, x: f64, r: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (dir, orient) in [(FRAC_PI_4, -1.0), (-FRAC_PI_4, 1.0)] {
        let e = Complex64::from_polar(1.0, dir);
        let u = e * r;
        let u2 = u * u;
        let x2 = x * x;
        let ex = (u2 * p2.eta + u2 * u2 - p1.eta * x2 - x2 * x2).exp();
        acc += ex * (p1.sigma * x).cos() * (u * p2.sigma).cos() * u / (u2 - x2) * e * orient;
    }
    acc
}

/// Largest |integrand| on the truncation boundary, times the radius.
fn boundary_size(p1: PearceyPoint, p2: PearceyPoint, grid: &PearceyGrid) -> f64 {
    let rho = grid.cutoff;
    (0..=64)
        .map(|j| {
            let phi = FRAC_PI_2 * j as f64 / 64.0;
            let (x, r) = (rho * phi.cos(), rho * phi.sin());
            let x2 = x * x;
            let m = (-p1.eta * x2 - x2 * x2 - r.powi(4)).exp() * (p2.sigma * r / 2f64.sqrt()).cosh();
            m * rho * r / (r.powi(4) + x2 * x2).sqrt()
        })
        .fold(0.0, f64::max)
}

fn check_tail(p1: PearceyPoint, p2: PearceyPoint, grid: &PearceyGrid) -> Result<()> {
    let b = boundary_size(p1, p2, grid);
    if b > 1e-14 {
        return Err(Error::Convergence(format!("pearcey integrand is {b:.3e} at cutoff {}", grid.cutoff)));
    }
    Ok(())
}

fn prefactor() -> Complex64 {
    Complex64::new(0.0, -2.0 / (PI * PI))
}

/// The double integral in polar coordinates on the quarter disk of radius
/// `cutoff`.
pub fn pearcey_integral_polar(p1: PearceyPoint, p2: PearceyPoint, grid: &PearceyGrid) -> Result<Complex64> {
    check_tail(p1, p2, grid)?;
    let (rt, rw) = gauss_legendre::<f64>(grid.radial);
    let (at, aw) = gauss_legendre::<f64>(grid.angular);
    let mut acc = Complex64::new(0.0, 0.0);
    for (ti, wi) in rt.iter().zip(&rw) {
        let rho = 0.5 * grid.cutoff * (ti + 1.0);
        let wr = 0.5 * grid.cutoff * wi;
        for (tj, wj) in at.iter().zip(&aw) {
            let phi = FRAC_PI_4 * (tj + 1.0);
            let w = wr * FRAC_PI_4 * wj * rho;
            acc += rays(p1, p2, rho * phi.cos(), rho * phi.sin()) * w;
        }
    }
    Ok(acc * prefactor())
}

/// The same integral on the square [0, cutoff]^2, split along the diagonal
/// with the Duffy map on each half.
pub fn pearcey_integral_duffy(p1: PearceyPoint, p2: PearceyPoint, grid: &PearceyGrid) -> Result<Complex64> {
    check_tail(p1, p2, grid)?;
    let (rt, rw) = gauss_legendre::<f64>(grid.radial);
    let (at, aw) = gauss_legendre::<f64>(grid.angular);
    let mut acc = Complex64::new(0.0, 0.0);
    for (ti, wi) in rt.iter().zip(&rw) {
        let rho = 0.5 * grid.cutoff * (ti + 1.0);
        let wr = 0.5 * grid.cutoff * wi;
        for (tj, wj) in at.iter().zip(&aw) {
            let tau = 0.5 * (tj + 1.0);
            let w = wr * 0.5 * wj * rho;
            acc += (rays(p1, p2, rho, rho * tau) + rays(p1, p2, rho * tau, rho)) * w;
        }
    }
    Ok(acc * prefactor())
}

/// Closed-form part present when eta1 > eta2.
pub fn gaussian_term(p1: PearceyPoint, p2: PearceyPoint) -> f64 {
    if p1.eta <= p2.eta {
        return 0.0;
    }
    let de = p1.eta - p2.eta;
    let g = |s: f64| (s * s / (-4.0 * de)).exp();
    -(g(p1.sigma + p2.sigma) + g(p1.sigma - p2.sigma)) / (2.0 * (PI * de).sqrt())
}

pub fn symmetric_pearcey_k(p1: PearceyPoint, p2: PearceyPoint, grid: &PearceyGrid) -> Result<f64> {
    let v = pearcey_integral_polar(p1, p2, grid)?;
    let bound = 1e-8 * (1.0 + v.re.abs());
    if v.im.abs() > bound {
        return Err(Error::ImaginaryResidue { residue: v.im.abs(), bound });
    }
    Ok(v.re + gaussian_term(p1, p2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: f64, e: f64) -> PearceyPoint {
        PearceyPoint::new(s, e).unwrap()
    }

    #[test]
    fn gaussian_term_value() {
        assert!((gaussian_term(pt(0.0, 1.0), pt(0.0, 0.0)) + 1.0 / PI.sqrt()).abs() < 1e-15);
        assert_eq!(gaussian_term(pt(0.3, 0.0), pt(0.2, 0.5)), 0.0);
    }

    #[test]
    fn routes_agree() {
        let g = PearceyGrid::default();
        for (a, b) in [(pt(1.0, 0.0), pt(1.0, 0.0)), (pt(0.5, 0.3), pt(1.2, -0.4)), (pt(0.0, -1.0), pt(3.0, 0.5))] {
            let x = pearcey_integral_polar(a, b, &g).unwrap();
            let y = pearcey_integral_duffy(a, b, &g).unwrap();
            assert!((x - y).norm() < 1e-10, "{x} {y}");
            assert!(x.im.abs() < 1e-12);
        }
    }

    #[test]
    fn short_cutoff_is_reported() {
        let g = PearceyGrid { cutoff: 2.0, ..PearceyGrid::default() };
        assert!(matches!(symmetric_pearcey_k(pt(1.0, 0.0), pt(1.0, 0.0), &g), Err(Error::Convergence(_))));
        assert!(PearceyPoint::new(-0.1, 0.0).is_err());
    }
}
