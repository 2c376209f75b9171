//! Finite-N exact kernels next to their predicted limits. Every comparison
//! is made on determinants, which do not see the gauge of either kernel.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::beta::incomplete_beta_kernel;
use super::jacobi::discrete_jacobi_l;
use super::pearcey::{symmetric_pearcey_k, PearceyGrid, PearceyPoint};
use super::saddle::{saddle, Region};
use crate::characters::CharacterParams;
use crate::chebyshev_jacobi::{HalfInt, QuadratureSpec};
use crate::error::{Error, Result};
use crate::kernel::{ContourSpec, KernelEvaluator, KernelPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitComparison {
    pub points: Vec<KernelPoint>,
    pub exact: f64,
    pub predicted: f64,
}

impl LimitComparison {
    pub fn gap(&self) -> f64 {
        (self.exact - self.predicted).abs()
    }
}

/// Offset of a point from the scaled base position: (dn, a, ds).
pub type Offset = (i64, HalfInt, i64);

fn shifted(n: i64, s: i64, o: &Offset) -> Result<KernelPoint> {
    let (n, s) = (n + o.0, s + o.2);
    if n < 1 || s < 0 {
        return Err(Error::Domain(format!("offset leaves the lattice: n = {n}, s = {s}")));
    }
    KernelPoint::new(n as usize, o.1, s as u64)
}

fn tilde_n(p: KernelPoint) -> i64 {
    2 * p.level.n as i64 + p.level.a.bit() - 1
}

fn det(m: DMatrix<f64>) -> f64 {
    if m.nrows() == 0 { 1.0 } else { m.determinant() }
}

/// Exact correlation at gamma = tN, s = ceil(dN), n = ceil(lN) plus offsets,
/// against the incomplete beta determinant at z0 (or 0 / 1 when frozen).
pub fn bulk_kernel_limit_check(t: f64, d: f64, l: f64, big_n: u64, offsets: &[Offset], contour: ContourSpec) -> Result<LimitComparison> {
    let sd = saddle(t, d, l)?;
    let nf = big_n as f64;
    let (n0, s0) = ((l * nf).ceil() as i64, (d * nf).ceil() as i64);
    let points = offsets.iter().map(|o| shifted(n0, s0, o)).collect::<Result<Vec<_>>>()?;
    let ev = KernelEvaluator::new(&CharacterParams::plancherel(t * nf)?, contour)?;
    let exact = ev.correlation(&points, false)?;
    let predicted = match sd.region {
        Region::FrozenRight => 0.0,
        Region::FrozenLeft => 1.0,
        Region::Liquid => {
            let k = points.len();
            let mut m = DMatrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    let (pi, pj) = (points[i], points[j]);
                    let dn = tilde_n(pi) - tilde_n(pj);
                    // s~ + n~ = s + n + a - 1/2
                    let ds = (pi.s as i64 + pi.level.n as i64 + pi.level.a.bit())
                        - (pj.s as i64 + pj.level.n as i64 + pj.level.a.bit());
                    m[(i, j)] = incomplete_beta_kernel(dn, ds, sd.z0)?;
                }
            }
            det(m)
        }
    };
    Ok(LimitComparison { points, exact, predicted })
}

/// Exact correlation at gamma = tN and levels ceil(lN) plus offsets, at fixed
/// positions `s` (offset ds is the position itself), against the discrete
/// Jacobi determinant at u = 1 - l/t.
pub fn wall_limit_check(t: f64, l: f64, big_n: u64, offsets: &[Offset], contour: ContourSpec) -> Result<LimitComparison> {
    if !(t > 0.0 && l > 0.0) {
        return Err(Error::Domain(format!("need t, l > 0, got ({t}, {l})")));
    }
    let nf = big_n as f64;
    let n0 = (l * nf).ceil() as i64;
    let points = offsets.iter().map(|o| shifted(n0, 0, o)).collect::<Result<Vec<_>>>()?;
    let ev = KernelEvaluator::new(&CharacterParams::plancherel(t * nf)?, contour)?;
    let exact = ev.correlation(&points, false)?;
    let predicted = if t / l > 0.5 {
        let u = 1.0 - l / t;
        let q = QuadratureSpec::new(128)?;
        let k = points.len();
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = discrete_jacobi_l(points[i], points[j], u, &q)?;
            }
        }
        det(m)
    } else {
        1.0
    };
    Ok(LimitComparison { points, exact, predicted })
}

/// Lattice point for a Pearcey point at scale N.
pub fn pearcey_lattice_point(big_n: u64, p: PearceyPoint, a: HalfInt) -> Result<KernelPoint> {
    let nf = big_n as f64;
    let n = big_n as i64 + (std::f64::consts::FRAC_1_SQRT_2 * p.eta * nf.sqrt()).ceil() as i64;
    let s = (2f64.powf(-1.25) * p.sigma * nf.powf(0.25)).ceil() as i64;
    shifted(n, s, &(0, a, 0))
}

/// Rescaled hole correlation (N^{1/4} / 2^{5/4})^k rho_Delta at gamma = N/2
/// against det of the symmetric Pearcey kernel.
pub fn pearcey_limit_check(big_n: u64, points: &[PearceyPoint], grid: &PearceyGrid, contour: ContourSpec) -> Result<LimitComparison> {
    let lattice = points
        .iter()
        .map(|&p| pearcey_lattice_point(big_n, p, HalfInt::MinusHalf))
        .collect::<Result<Vec<_>>>()?;
    let ev = KernelEvaluator::new(&CharacterParams::plancherel(0.5 * big_n as f64)?, contour)?;
    let scale = (big_n as f64).powf(0.25) / 2f64.powf(1.25);
    let exact = ev.correlation(&lattice, true)? * scale.powi(points.len() as i32);
    let k = points.len();
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = symmetric_pearcey_k(points[i], points[j], grid)?;
        }
    }
    Ok(LimitComparison { points: lattice, exact, predicted: det(m) })
}

