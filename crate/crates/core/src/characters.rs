//! Character parameters, the function E, dimensions of orthogonal-group
//! representations and the exact finite-level measures.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::chebyshev_jacobi::{eval_j_theta, normalization_w, theta_rule, HalfInt, QuadratureSpec};
use crate::error::{Error, Result};
use crate::scalar::{cexp, Real};
use crate::special::{bessel_i, binomial};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterParams {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: f64,
}

fn check_list(name: &str, v: &[f64]) -> Result<()> {
    for (i, &x) in v.iter().enumerate() {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::InvalidParameter(format!("{name}[{i}] = {x} must be finite and >= 0")));
        }
        if i > 0 && x > v[i - 1] {
            return Err(Error::InvalidParameter(format!("{name} must be nonincreasing")));
        }
    }
    Ok(())
}

impl CharacterParams {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: f64) -> Result<Self> {
        check_list("alpha", &alpha)?;
        check_list("beta", &beta)?;
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} must be finite and >= 0")));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn plancherel(t: f64) -> Result<Self> {
        Self::new(vec![], vec![], t)
    }

    pub fn trivial() -> Self {
        Self { alpha: vec![], beta: vec![], gamma: 0.0 }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.gamma + self.alpha.iter().sum::<f64>() + self.beta.iter().sum::<f64>()
    }

    /// Only the exponential factor is present.
    pub fn is_plancherel(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0.0) && self.beta.iter().all(|&b| b == 0.0)
    }

    pub fn check_kernel_admissible(&self) -> Result<()> {
        match self.beta.first() {
            Some(&b) if b >= 1.0 => Err(Error::InvalidParameter(format!("beta_1 = {b} must be < 1"))),
            _ => Ok(()),
        }
    }

    /// Real zeros of E (from beta factors) and poles (from alpha factors).
    pub fn zeros(&self) -> Vec<f64> {
        self.beta
            .iter()
            .filter(|&&b| b > 0.0)
            .map(|&b| 1.0 - 1.0 / (b - 0.5 * b * b))
            .collect()
    }

    pub fn poles(&self) -> Vec<f64> {
        self.alpha
            .iter()
            .filter(|&&a| a > 0.0)
            .map(|&a| 1.0 + 1.0 / (a + 0.5 * a * a))
            .collect()
    }

    pub fn eval_e(&self, x: f64) -> Result<f64> {
        if !(x.abs() <= 1.0) {
            return Err(Error::Domain(format!("|x| <= 1 required, got {x}")));
        }
        Ok(self.eval_e_t(x))
    }

    pub fn eval_e_t<T: Real>(&self, x: T) -> T {
        let y = T::one() - x;
        let mut v = (T::of(self.gamma) * (x - T::one())).exp_acc();
        for &b in &self.beta {
            let b = T::of(b);
            v = v * (T::one() - b * y + b * b * y / T::of(2.0));
        }
        for &a in &self.alpha {
            let a = T::of(a);
            v = v / (T::one() + a * y + a * a * y / T::of(2.0));
        }
        v
    }

    pub fn eval_e_complex(&self, u: Complex64) -> Complex64 {
        self.eval_e_complex_t(u)
    }

    pub fn eval_e_complex_t<T: Real>(&self, u: Complex<T>) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let y = one - u;
        let mut v = cexp((u - one).scale(T::of(self.gamma)));
        for &b in &self.beta {
            let c = T::of(b - 0.5 * b * b);
            v = v * (one - y.scale(c));
        }
        for &a in &self.alpha {
            let c = T::of(a + 0.5 * a * a);
            v = v / (one + y.scale(c));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignaturePartition(Vec<u64>);

impl SignaturePartition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!("parts {parts:?} must be nonincreasing")));
        }
        Ok(Self(parts))
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> u64 {
        self.0.first().copied().unwrap_or(0)
    }

    /// lambda_i - i + N for i = 1..N.
    pub fn shifted(&self) -> Vec<u64> {
        let n = self.0.len() as u64;
        self.0.iter().enumerate().map(|(i, &l)| l + n - 1 - i as u64).collect()
    }

    /// All partitions with N parts and lambda_1 <= bound, in lexicographic order.
    pub fn enumerate(n: usize, bound: u64) -> Vec<Self> {
        fn rec(n: usize, cap: u64, cur: &mut Vec<u64>, out: &mut Vec<SignaturePartition>) {
            if cur.len() == n {
                out.push(SignaturePartition(cur.clone()));
                return;
            }
            for v in 0..=cap {
                cur.push(v);
                rec(n, v, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, bound, &mut Vec::with_capacity(n), &mut out);
        out
    }
}

fn check_len(n: usize, lam: &SignaturePartition) -> Result<()> {
    if n == 0 || lam.len() != n {
        return Err(Error::InvalidParameter(format!("partition of length {n} expected, got {}", lam.len())));
    }
    Ok(())
}

/// Dimension for SO(2N+1); half-integers are doubled so everything stays integral.
pub fn dim_odd(n: usize, lam: &SignaturePartition) -> Result<BigRational> {
    check_len(n, lam)?;
    let l: Vec<BigInt> = (0..n)
        .map(|i| BigInt::from(2 * lam.0[i] + 2 * (n - i) as u64 - 1))
        .collect();
    let m: Vec<BigInt> = (0..n).map(|i| BigInt::from(2 * (n - i) as u64 - 1)).collect();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= &l[i] * &l[i] - &l[j] * &l[j];
            den *= &m[i] * &m[i] - &m[j] * &m[j];
        }
        num *= &l[i];
        den *= &m[i];
    }
    Ok(BigRational::new(num, den))
}

/// Dimension for SO(2N).
pub fn dim_even(n: usize, lam: &SignaturePartition) -> Result<BigRational> {
    check_len(n, lam)?;
    let l: Vec<BigInt> = (0..n).map(|i| BigInt::from(lam.0[i] + (n - 1 - i) as u64)).collect();
    let m: Vec<BigInt> = (0..n).map(|i| BigInt::from((n - 1 - i) as u64)).collect();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= &l[i] * &l[i] - &l[j] * &l[j];
            den *= &m[i] * &m[i] - &m[j] * &m[j];
        }
    }
    Ok(BigRational::new(num, den))
}

/// Dimension attached to level (N, a): SO(2N) for a = -1/2, SO(2N+1) for a = +1/2.
pub fn dim_level(n: usize, a: HalfInt, lam: &SignaturePartition) -> Result<BigRational> {
    match a {
        HalfInt::MinusHalf => dim_even(n, lam),
        HalfInt::PlusHalf => dim_odd(n, lam),
    }
}

pub fn dim_level_f64(n: usize, a: HalfInt, lam: &SignaturePartition) -> Result<f64> {
    Ok(dim_level(n, a, lam)?.to_f64().unwrap_or(f64::INFINITY))
}

pub fn f_coefficient(
    omega: &CharacterParams,
    n: usize,
    a: HalfInt,
    j: usize,
    k: u64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if j == 0 || j > n {
        return Err(Error::InvalidParameter(format!("j = {j} must lie in 1..={n}")));
    }
    let rule = theta_rule(q.theta_nodes);
    let p = (n - j) as i32;
    let v = rule.integrate(a, |x, th| x.powi(p) * omega.eval_e_t(x) * eval_j_theta(a, k, th));
    Ok(normalization_w(a, k) / PI * v)
}

/// f_j(k) for j = 1..N and k = 0..=kmax, sharing one pass over the nodes.
#[derive(Debug, Clone)]
pub struct FTable {
    pub n: usize,
    pub a: HalfInt,
    values: Vec<Vec<f64>>,
}

impl FTable {
    pub fn new(omega: &CharacterParams, n: usize, a: HalfInt, kmax: u64, q: &QuadratureSpec) -> Self {
        if omega.is_plancherel() {
            Self::plancherel(omega.gamma, n, a, kmax)
        } else {
            Self::by_quadrature(omega, n, a, kmax, q)
        }
    }

    /// Tiny coefficients (large k) keep full relative accuracy here: every
    /// term of the Bessel expansion of x^p e^{t(x-1)} is nonnegative.
    pub fn plancherel(t: f64, n: usize, a: HalfInt, kmax: u64) -> Self {
        let values = (0..n)
            .map(|jj| {
                let b = plancherel_cos_coeffs(t, (n - 1 - jj) as u64, kmax + 1);
                (0..=kmax as usize)
                    .map(|k| match a {
                        HalfInt::MinusHalf => normalization_w(a, k as u64) * b[k],
                        HalfInt::PlusHalf => b[k] - b[k + 1],
                    })
                    .collect()
            })
            .collect();
        Self { n, a, values }
    }

    pub fn by_quadrature(omega: &CharacterParams, n: usize, a: HalfInt, kmax: u64, q: &QuadratureSpec) -> Self {
        let rule = theta_rule(q.theta_nodes);
        let w = rule.weights(a);
        let mut values = vec![vec![0.0; kmax as usize + 1]; n];
        for i in 0..rule.len() {
            let x = rule.x[i];
            let base = w[i] * omega.eval_e_t(x);
            let js: Vec<f64> = (0..=kmax).map(|k| eval_j_theta(a, k, rule.theta[i])).collect();
            for (jj, row) in values.iter_mut().enumerate() {
                let g = base * x.powi((n - 1 - jj) as i32);
                for (k, slot) in row.iter_mut().enumerate() {
                    *slot += g * js[k];
                }
            }
        }
        for row in values.iter_mut() {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot *= normalization_w(a, k as u64) / PI;
            }
        }
        Self { n, a, values }
    }

    pub fn get(&self, j: usize, k: u64) -> f64 {
        self.values[j - 1][k as usize]
    }

    pub fn kmax(&self) -> u64 {
        self.values[0].len() as u64 - 1
    }

    pub fn measure(&self, lam: &SignaturePartition) -> Result<f64> {
        check_len(self.n, lam)?;
        let sh = lam.shifted();
        if sh[0] > self.kmax() {
            return Err(Error::InvalidParameter("partition exceeds table range".into()));
        }
        let n = self.n;
        let m = DMatrix::from_fn(n, n, |i, j| self.get(j + 1, sh[i]));
        let c = match self.a {
            HalfInt::PlusHalf => 2f64.powi(((n - 1) * n / 2) as i32),
            HalfInt::MinusHalf => 2f64.powf(((n as f64 - 2.0) * (n as f64 - 1.0)) / 2.0),
        };
        Ok(c * m.determinant() * dim_level_f64(n, self.a, lam)?)
    }
}

/// Fourier coefficients b_m, m = 0..=mmax, of cos^p(theta) e^{t(cos theta - 1)}
/// written as sum over all integers m of b_m e^{i m theta}.
pub fn plancherel_cos_coeffs(t: f64, p: u64, mmax: u64) -> Vec<f64> {
    let top = mmax + p;
    let a: Vec<f64> = (0..=top).map(|m| (-t).exp() * bessel_i(m, t)).collect();
    let scale = 0.5f64.powi(p as i32);
    (0..=mmax as i64)
        .map(|m| {
            (0..=p)
                .map(|r| {
                    let shift = 2 * r as i64 - p as i64;
                    binomial(p, r) * scale * a[(m - shift).unsigned_abs() as usize]
                })
                .sum()
        })
        .collect()
}

pub fn measure_p(
    omega: &CharacterParams,
    n: usize,
    a: HalfInt,
    lam: &SignaturePartition,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_len(n, lam)?;
    FTable::new(omega, n, a, lam.shifted()[0], q).measure(lam)
}
