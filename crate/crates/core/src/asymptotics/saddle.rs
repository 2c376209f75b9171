use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub t: f64,
    pub d: f64,
    pub l: f64,
}

impl ScaledPoint {
    pub fn new(t: f64, d: f64, l: f64) -> Result<Self> {
        check_positive(t, d, l)?;
        Ok(Self { t, d, l })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    FrozenLeft,
    Liquid,
    FrozenRight,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::FrozenLeft => "frozen-left",
            Region::Liquid => "liquid",
            Region::FrozenRight => "frozen-right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub point: ScaledPoint,
    /// Roots of R, complex pair (if any) last with the upper one first.
    pub roots: [Complex64; 3],
    pub z0: Complex64,
    pub region: Region,
    pub discriminant: f64,
}

fn check_positive(t: f64, d: f64, l: f64) -> Result<()> {
    if [t, d, l].iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(Error::Domain(format!("need t, d, l > 0, got ({t}, {d}, {l})")))
    }
}

/// Coefficients of R_{t,d,l} in ascending powers of z.
pub fn cubic_r(t: f64, d: f64, l: f64) -> [f64; 4] {
    [t, 2.0 * l + 2.0 * d - t, 2.0 * l - 2.0 * d - t, t]
}

pub fn eval_cubic(c: &[f64; 4], z: Complex64) -> Complex64 {
    ((z * c[3] + c[2]) * z + c[1]) * z + c[0]
}

fn eval_cubic_prime(c: &[f64; 4], z: Complex64) -> Complex64 {
    (z * (3.0 * c[3]) + 2.0 * c[2]) * z + c[1]
}

/// Q_{t,l}(z); its positive roots are l q1 and l q2.
pub fn q_poly(t: f64, l: f64, z: f64) -> f64 {
    l * (l - 2.0 * t).powi(3) - (2.0 * l * l + 10.0 * l * t - t * t) * z * z + z.powi(4)
}

pub fn cubic_discriminant(c: &[f64; 4]) -> f64 {
    let (e, cc, b, a) = (c[0], c[1], c[2], c[3]);
    18.0 * a * b * cc * e - 4.0 * b.powi(3) * e + b * b * cc * cc - 4.0 * a * cc.powi(3) - 27.0 * a * a * e * e
}

/// (q1, q2); both depend on t/l only.
pub fn frozen_boundary(t: f64, l: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && l > 0.0 && t.is_finite() && l.is_finite()) {
        return Err(Error::Domain(format!("need t, l > 0, got ({t}, {l})")));
    }
    let r = t / l;
    let base = -0.5 * r * r + 5.0 * r + 1.0;
    let root = 0.5 * r * r * (1.0 + 4.0 / r).powf(1.5);
    let q2 = (base + root).sqrt();
    let q1 = if r < 0.5 { (base - root).max(0.0).sqrt() } else { 0.0 };
    Ok((q1, q2))
}

fn polish(c: &[f64; 4], mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let dp = eval_cubic_prime(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = eval_cubic(c, z) / dp;
        z -= step;
        if step.norm() <= 1e-16 * z.norm() {
            break;
        }
    }
    z
}

pub fn saddle(t: f64, d: f64, l: f64) -> Result<SaddleData> {
    let point = ScaledPoint::new(t, d, l)?;
    let c = cubic_r(t, d, l);
    let disc = cubic_discriminant(&c);
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs())).powi(4);
    if disc.abs() <= 1e-12 * scale {
        return Err(Error::Degenerate(format!("discriminant {disc:.3e} at ({t}, {d}, {l}) is on the frozen boundary")));
    }
    // companion matrix of the monic cubic
    let m = Matrix3::new(0.0, 0.0, -c[0] / c[3], 1.0, 0.0, -c[1] / c[3], 0.0, 1.0, -c[2] / c[3]);
    let eig = m.complex_eigenvalues();
    let mut roots: Vec<Complex64> = eig.iter().map(|&z| polish(&c, z)).collect();
    let region;
    let z0;
    if disc < 0.0 {
        roots.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
        let real = Complex64::new(roots[0].re, 0.0);
        let upper = if roots[1].im > 0.0 { roots[1] } else { roots[2] };
        roots = vec![real, upper, upper.conj()];
        region = Region::Liquid;
        z0 = upper;
    } else {
        let mut re: Vec<f64> = roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        roots = re.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let (q1, _) = frozen_boundary(t, l)?;
        if d <= l * q1 {
            region = Region::FrozenLeft;
            z0 = roots[0];
        } else {
            region = Region::FrozenRight;
            z0 = roots[2];
        }
    }
    Ok(SaddleData { point, roots: [roots[0], roots[1], roots[2]], z0, region, discriminant: disc })
}

fn arg_upper(z: Complex64) -> f64 {
    // closed upper half plane: negative reals get +pi
    f64::atan2(if z.im == 0.0 { 0.0 } else { z.im }, z.re)
}

/// S(z) with log z principal and log((z+1/z)/2 - 1) = log((z-1)^2/(2z))
/// continued through the closed upper half plane from z > 1, where it is real.
pub fn action_s(t: f64, d: f64, l: f64, z: Complex64) -> Complex64 {
    let w = (z - 1.0) * (z - 1.0) / (2.0 * z);
    let log_w = Complex64::new(w.norm().ln(), 2.0 * arg_upper(z - 1.0) - arg_upper(z));
    let log_z = Complex64::new(z.norm().ln(), arg_upper(z));
    (z + 1.0 / z) * (0.5 * t) + log_w * l - log_z * d
}

pub fn action_derivative(t: f64, d: f64, l: f64, z: Complex64) -> Complex64 {
    (1.0 - 1.0 / (z * z)) * (0.5 * t) + (2.0 / (z - 1.0) - 1.0 / z) * l - d / z
}

/// Limit height function Im S(z0) / (2 pi).
pub fn limit_shape_h(t: f64, d: f64, l: f64) -> Result<f64> {
    let s = saddle(t, d, l)?;
    Ok(match s.region {
        Region::FrozenRight => 0.0,
        _ => action_s(t, d, l, s.z0).im / (2.0 * std::f64::consts::PI),
    })
}

/// Limiting one-point density arg(z0)/pi.
pub fn limit_density(t: f64, d: f64, l: f64) -> Result<f64> {
    Ok(arg_upper(saddle(t, d, l)?.z0) / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_values() {
        assert_eq!(cubic_r(1.0, 1.0, 1.0), [1.0, 3.0, -1.0, 1.0]);
        let c = cubic_r(0.7, 1.3, 2.1);
        assert!((eval_cubic(&c, Complex64::new(-1.0, 0.0)).re + 4.0 * 1.3).abs() < 1e-12);
        assert_eq!(eval_cubic(&c, Complex64::new(0.0, 0.0)).re, 0.7);
    }

    #[test]
    fn q2_at_equal_t_and_l() {
        let (q1, q2) = frozen_boundary(2.0, 2.0).unwrap();
        let want = (-0.5 + 5.0 + 1.0 + 0.5 * 5f64.powf(1.5)).sqrt();
        assert_eq!(q1, 0.0);
        assert!((q2 - want).abs() < 1e-14 && (q2 - 3.3302).abs() < 1e-4);
        assert!(q_poly(1.0, 1.0, q2).abs() < 1e-10);
    }

    #[test]
    fn small_ratio_has_two_boundaries() {
        let (t, l) = (0.3, 1.0);
        let (q1, q2) = frozen_boundary(t, l).unwrap();
        assert!(0.0 < q1 && q1 < q2);
        assert!(q_poly(t, l, l * q1).abs() < 1e-9 && q_poly(t, l, l * q2).abs() < 1e-9);
    }

    #[test]
    fn liquid_saddle() {
        let s = saddle(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.region, Region::Liquid);
        assert!(s.z0.im > 0.0 && s.z0.norm() > 1.0);
        let prod = s.roots[0] * s.roots[1] * s.roots[2];
        assert!((prod + 1.0).norm() < 1e-12);
        assert!(action_derivative(1.0, 1.0, 1.0, s.z0).norm() < 1e-10);
    }

    #[test]
    fn frozen_saddles() {
        let (_, q2) = frozen_boundary(1.0, 1.0).unwrap();
        let s = saddle(1.0, 4.0 * q2, 1.0).unwrap();
        assert_eq!(s.region, Region::FrozenRight);
        assert!(s.z0.re > 1.0 && s.z0.im == 0.0);
        let (q1, _) = frozen_boundary(0.3, 1.0).unwrap();
        let s = saddle(0.3, 0.5 * q1, 1.0).unwrap();
        assert_eq!(s.region, Region::FrozenLeft);
        assert!(s.z0.re < -1.0);
        assert!((limit_density(0.3, 0.5 * q1, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_is_degenerate() {
        let (_, q2) = frozen_boundary(1.0, 1.0).unwrap();
        assert!(matches!(saddle(1.0, q2, 1.0), Err(Error::Degenerate(_))));
        assert!(saddle(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn height_is_zero_right_and_linear_left() {
        assert_eq!(limit_shape_h(1.0, 5.0, 1.0).unwrap(), 0.0);
        let (q1, _) = frozen_boundary(0.3, 1.0).unwrap();
        let d = 0.5 * q1;
        assert!((limit_shape_h(0.3, d, 1.0).unwrap() - 0.5 * (1.0 - d)).abs() < 1e-12);
    }
}
