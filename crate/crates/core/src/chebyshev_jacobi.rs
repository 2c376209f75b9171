//! Normalized Jacobi polynomials with parameters (a, -1/2), a = +-1/2, and
//! quadrature against (1-x)^a (1+x)^(-1/2) on [-1, 1].
//!
//! With x = cos(theta):
//! * a = -1/2: J_s(x) = cos(s theta), weight dtheta;
//! * a = +1/2: J_s(x) = sin((s + 1/2) theta) / sin(theta / 2), weight 2 sin^2(theta/2) dtheta.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HalfInt {
    #[serde(rename = "-1/2")]
    MinusHalf,
    #[serde(rename = "+1/2")]
    PlusHalf,
}

impl HalfInt {
    pub const BOTH: [HalfInt; 2] = [HalfInt::MinusHalf, HalfInt::PlusHalf];

    pub fn value(self) -> f64 {
        match self {
            HalfInt::MinusHalf => -0.5,
            HalfInt::PlusHalf => 0.5,
        }
    }

    /// 0 for -1/2, 1 for +1/2; handy for integer coordinate formulas.
    pub fn bit(self) -> i64 {
        match self {
            HalfInt::MinusHalf => 0,
            HalfInt::PlusHalf => 1,
        }
    }

    pub fn from_bit(b: i64) -> Self {
        if b == 0 {
            HalfInt::MinusHalf
        } else {
            HalfInt::PlusHalf
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "-1/2" | "-0.5" | "-" | "minus" => Ok(HalfInt::MinusHalf),
            "+1/2" | "1/2" | "0.5" | "+0.5" | "+" | "plus" => Ok(HalfInt::PlusHalf),
            other => Err(Error::InvalidParameter(format!("half-integer expected, got {other:?}"))),
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HalfInt::MinusHalf => "-1/2",
            HalfInt::PlusHalf => "+1/2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub theta_nodes: usize,
}

impl QuadratureSpec {
    pub fn new(theta_nodes: usize) -> Result<Self> {
        if theta_nodes < 2 {
            return Err(Error::InvalidParameter("theta_nodes must be at least 2".into()));
        }
        Ok(Self { theta_nodes })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { theta_nodes: 256 }
    }
}

pub fn normalization_w(a: HalfInt, k: u64) -> f64 {
    match a {
        HalfInt::MinusHalf if k > 0 => 2.0,
        _ => 1.0,
    }
}

/// J_s at x = cos(theta), closed trigonometric form.
pub fn eval_j_theta<T: Real>(a: HalfInt, s: u64, theta: T) -> T {
    let sf = T::of(s as f64);
    match a {
        HalfInt::MinusHalf => (sf * theta).sin_cos_acc().1,
        HalfInt::PlusHalf => {
            let half = T::of(0.5);
            let den = (half * theta).sin_cos_acc().0;
            if den.abs() < T::of(1e-7) {
                // sin((s+1/2)t)/sin(t/2) = (2s+1)(1 - s(s+1) t^2/6 + O(t^4))
                let two_s1 = T::of((2 * s + 1) as f64);
                let c = T::of((s * (s + 1)) as f64) / T::of(6.0);
                two_s1 * (T::one() - c * theta * theta)
            } else {
                ((sf + half) * theta).sin_cos_acc().0 / den
            }
        }
    }
}

pub fn eval_j(a: HalfInt, s: u64, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!("|x| <= 1 required, got {x}")));
    }
    if s == 0 {
        return Ok(1.0);
    }
    if a == HalfInt::PlusHalf && 1.0 - x < 1e-12 {
        return Ok(eval_j_recurrence(a, s, x));
    }
    Ok(eval_j_theta(a, s, x.acos()))
}

/// Three-term recurrence; works off [-1, 1] and for any scalar type.
pub fn eval_j_recurrence<T: Real>(a: HalfInt, s: u64, x: T) -> T {
    let two = T::of(2.0);
    let mut prev = T::one();
    if s == 0 {
        return prev;
    }
    let mut cur = match a {
        HalfInt::MinusHalf => x,
        HalfInt::PlusHalf => two * x + T::one(),
    };
    for _ in 1..s {
        let next = two * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Gauss-Legendre nodes and weights on [-1, 1], Newton-refined in `T`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let legendre = |x: T| -> (T, T) {
        let mut p0 = T::one();
        let mut p1 = x;
        for k in 2..=n {
            let kf = T::of(k as f64);
            let p2 = ((T::of(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let nf = T::of(n as f64);
        let dp = nf * (x * p1 - p0) / (x * x - T::one());
        (p1, dp)
    };
    if n == 1 {
        return (vec![T::zero()], vec![T::of(2.0)]);
    }
    for i in 0..(n + 1) / 2 {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = T::of(guess);
        for _ in 0..100 {
            let (p, dp) = legendre(x);
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::of(4.0) {
                let (p, dp) = legendre(x);
                x = x - p / dp;
                break;
            }
        }
        let (_, dp) = legendre(x);
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    (nodes, weights)
}

/// Gauss-Legendre rule in theta on a subinterval of [0, pi], with the two
/// Jacobi weights folded into the node weights.
#[derive(Debug, Clone)]
pub struct ThetaRule<T> {
    pub theta: Vec<T>,
    pub x: Vec<T>,
    pub w_minus: Vec<T>,
    pub w_plus: Vec<T>,
}

impl<T: Real> ThetaRule<T> {
    pub fn new(n: usize) -> Self {
        Self::on(T::zero(), T::PI(), n)
    }

    pub fn on(lo: T, hi: T, n: usize) -> Self {
        let (t, w) = gauss_legendre::<T>(n);
        let half = T::of(0.5);
        let mid = half * (lo + hi);
        let rad = half * (hi - lo);
        let mut rule = ThetaRule {
            theta: Vec::with_capacity(n),
            x: Vec::with_capacity(n),
            w_minus: Vec::with_capacity(n),
            w_plus: Vec::with_capacity(n),
        };
        for (ti, wi) in t.into_iter().zip(w) {
            let th = mid + rad * ti;
            let (_, c) = th.sin_cos_acc();
            let (sh, _) = (half * th).sin_cos_acc();
            let dw = rad * wi;
            rule.theta.push(th);
            rule.x.push(c);
            rule.w_minus.push(dw);
            rule.w_plus.push(dw * T::of(2.0) * sh * sh);
        }
        rule
    }

    pub fn weights(&self, a: HalfInt) -> &[T] {
        match a {
            HalfInt::MinusHalf => &self.w_minus,
            HalfInt::PlusHalf => &self.w_plus,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Integrand receives (x, theta).
    pub fn integrate<F: FnMut(T, T) -> T>(&self, a: HalfInt, mut f: F) -> T {
        let w = self.weights(a);
        let mut acc = T::zero();
        for i in 0..self.len() {
            acc = acc + w[i] * f(self.x[i], self.theta[i]);
        }
        acc
    }
}

/// Shared full-interval f64 rules keyed by node count.
pub fn theta_rule(n: usize) -> Arc<ThetaRule<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ThetaRule<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return r.clone();
    }
    let rule = Arc::new(ThetaRule::<f64>::new(n));
    cache.lock().unwrap().entry(n).or_insert(rule).clone()
}

pub fn weighted_integral<F: Fn(f64) -> f64>(f: F, a: HalfInt, q: &QuadratureSpec) -> f64 {
    theta_rule(q.theta_nodes).integrate(a, |x, _| f(x))
}

pub fn delta_reproduction_check<F: Fn(f64) -> f64>(
    t: F,
    zeta: f64,
    a: HalfInt,
    cutoff: u64,
    q: &QuadratureSpec,
) -> f64 {
    let rule = theta_rule(q.theta_nodes);
    let tv: Vec<f64> = rule.x.iter().map(|&x| t(x)).collect();
    let th_zeta = zeta.clamp(-1.0, 1.0).acos();
    let mut acc = 0.0;
    for k in 0..=cutoff {
        let mut i = 0;
        let coeff = rule.integrate(a, |_, th| {
            let v = tv[i] * eval_j_theta(a, k, th);
            i += 1;
            v
        });
        acc += normalization_w(a, k) / std::f64::consts::PI * eval_j_theta(a, k, th_zeta) * coeff;
    }
    acc
}
