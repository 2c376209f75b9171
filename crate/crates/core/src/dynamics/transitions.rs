use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_traits::ToPrimitive;

use super::state::LevelIndex;
use crate::characters::{dim_even, dim_level, dim_odd, SignaturePartition};
use crate::chebyshev_jacobi::{eval_j_theta, normalization_w, theta_rule, HalfInt, QuadratureSpec};
use crate::error::{Error, Result};

/// Multiplier phi of the one-level chains. Linear phi gives banded matrices
/// computed in closed form; anything else goes through quadrature.
#[derive(Clone)]
pub enum Phi {
    Linear { p0: f64, p1: f64 },
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Phi {
    pub fn linear(p0: f64, p1: f64) -> Self {
        Phi::Linear { p0, p1 }
    }

    /// 1 - p + p x
    pub fn lazy(p: f64) -> Self {
        Phi::Linear { p0: 1.0 - p, p1: p }
    }

    /// e^{t(x-1)}
    pub fn exp(t: f64) -> Self {
        Phi::Function(Arc::new(move |x| (t * (x - 1.0)).exp()))
    }

    pub fn identity() -> Self {
        Phi::Linear { p0: 1.0, p1: 0.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Phi::Linear { p0, p1 } => p0 + p1 * x,
            Phi::Function(f) => f(x),
        }
    }

    pub fn is_banded(&self) -> bool {
        matches!(self, Phi::Linear { .. })
    }
}

impl fmt::Debug for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::Linear { p0, p1 } => write!(f, "Phi({p0} + {p1} x)"),
            Phi::Function(_) => f.write_str("Phi(<fn>)"),
        }
    }
}

/// Coefficient of J_l in the expansion of x J_i.
fn x_coeff(a: HalfInt, i: u64, l: u64) -> f64 {
    if i == 0 {
        return match (a, l) {
            (HalfInt::MinusHalf, 1) => 1.0,
            (HalfInt::PlusHalf, 0) => -0.5,
            (HalfInt::PlusHalf, 1) => 0.5,
            _ => 0.0,
        };
    }
    if l + 1 == i || l == i + 1 {
        0.5
    } else {
        0.0
    }
}

/// I(l, i) = (W(i)/pi) * integral of J_i J_l phi against the a-weight.
pub fn i_phi(a: HalfInt, phi: &Phi, l: u64, i: u64, q: &QuadratureSpec) -> f64 {
    match phi {
        Phi::Linear { p0, p1 } => {
            let diag = if l == i { *p0 } else { 0.0 };
            diag + p1 * x_coeff(a, i, l) * normalization_w(a, i) / normalization_w(a, l)
        }
        Phi::Function(f) => {
            let rule = theta_rule(q.theta_nodes);
            let v = rule.integrate(a, |x, th| eval_j_theta(a, i, th) * eval_j_theta(a, l, th) * f(x));
            normalization_w(a, i) / std::f64::consts::PI * v
        }
    }
}

fn dim_ratio(num: num_rational::BigRational, den: num_rational::BigRational) -> f64 {
    (num / den).to_f64().unwrap_or(f64::NAN)
}

fn check(n: usize, p: &SignaturePartition, what: &str) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidParameter(format!("{what} must have {n} parts, got {}", p.len())));
    }
    Ok(())
}

/// T(mu, lam) = det[I(mu_i - i + N, lam_j - j + N)] dim(lam) / dim(mu).
pub fn transition_t(
    n: usize,
    a: HalfInt,
    phi: &Phi,
    mu: &SignaturePartition,
    lam: &SignaturePartition,
    q: &QuadratureSpec,
) -> Result<f64> {
    transition_t_with(n, a, mu, lam, |l, i| i_phi(a, phi, l, i, q))
}

/// Same as `transition_t` with a caller-supplied I(l, i) table.
pub fn transition_t_with<F: Fn(u64, u64) -> f64>(
    n: usize,
    a: HalfInt,
    mu: &SignaturePartition,
    lam: &SignaturePartition,
    entry: F,
) -> Result<f64> {
    check(n, mu, "mu")?;
    check(n, lam, "lam")?;
    let (sm, sl) = (mu.shifted(), lam.shifted());
    let det = DMatrix::from_fn(n, n, |i, j| entry(sm[i], sl[j])).determinant();
    if det == 0.0 {
        return Ok(0.0);
    }
    Ok(det * dim_ratio(dim_level(n, a, lam)?, dim_level(n, a, mu)?))
}

fn integer_det(n: usize, f: impl Fn(usize, usize) -> f64) -> f64 {
    DMatrix::from_fn(n, n, f).determinant().round()
}

/// det[cal T(mu_i - i + N, lam_j - j + N)] with cal T(x, y) = 1 (x >= y = 0),
/// 2 (x >= y > 0), 0 (x < y); mu on level (N, +1/2), lam on (N, -1/2).
/// Columns j < N always have y > 0, so this equals 2^{N-1} kappa(lam, mu).
/// For mu on (N, -1/2) and lam on (N-1, +1/2) it is det[phi] = kappa(lam, mu).
pub fn kappa_det(mu: &SignaturePartition, lam: &SignaturePartition) -> f64 {
    let n = mu.len();
    if lam.len() == n {
        let (sm, sl) = (mu.shifted(), lam.shifted());
        integer_det(n, |i, j| match (sm[i], sl[j]) {
            (x, y) if x < y => 0.0,
            (_, 0) => 1.0,
            _ => 2.0,
        })
    } else {
        // phi(x, y) = [x > y] with the N-th column all ones (lam_N = 0, y = -1)
        let sm = mu.shifted();
        let sl: Vec<i64> = lam.parts().iter().enumerate().map(|(j, &l)| l as i64 + (n - 2 - j) as i64).collect();
        integer_det(n, |i, j| {
            if j == n - 1 || sm[i] as i64 > sl[j] {
                1.0
            } else {
                0.0
            }
        })
    }
}

/// Link from level (N, +1/2) down to (N, -1/2).
pub fn link_same(n: usize, mu: &SignaturePartition, lam: &SignaturePartition) -> Result<f64> {
    check(n, mu, "mu")?;
    check(n, lam, "lam")?;
    let d = kappa_det(mu, lam) / f64::powi(2.0, n as i32 - 1);
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(d * dim_ratio(dim_even(n, lam)?, dim_odd(n, mu)?))
}

/// Link from level (N, -1/2) down to (N-1, +1/2), N >= 2.
pub fn link_down(n: usize, mu: &SignaturePartition, lam: &SignaturePartition) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("link_down needs N >= 2".into()));
    }
    check(n, mu, "mu")?;
    check(n - 1, lam, "lam")?;
    let d = kappa_det(mu, lam);
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(d * dim_ratio(dim_odd(n - 1, lam)?, dim_even(n, mu)?))
}

/// Link from level `upper` to the level just below it.
pub fn link(upper: LevelIndex, mu: &SignaturePartition, lam: &SignaturePartition) -> Result<f64> {
    match upper.a {
        HalfInt::PlusHalf => link_same(upper.n, mu, lam),
        HalfInt::MinusHalf => link_down(upper.n, mu, lam),
    }
}

/// Lower bound for the diagonal of T_r for phi = p0 + p1 x, p0 >= p1 >= 0.
/// At p0 = p1 the quotient is replaced by its limit, the derivative of
/// R^r (R - p1/2) at R = p0/2.
pub fn smallest_det_bound(p0: f64, p1: f64, r: u32) -> f64 {
    let disc = p0 * p0 - p1 * p1;
    let f = |x: f64| x.powi(r as i32) * (x - p1 / 2.0);
    if disc <= 1e-14 * p0 * p0 {
        let x = p0 / 2.0;
        return r as f64 * x.powi(r as i32 - 1) * (x - p1 / 2.0) + x.powi(r as i32);
    }
    let s = disc.sqrt();
    (f((p0 + s) / 2.0) - f((p0 - s) / 2.0)) / s
}
