use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar used by the quadrature and contour code.
///
/// `exp_acc` and `sin_cos_acc` must be correct to the working precision of
/// the type. The defaults only use field arithmetic, so they stay accurate
/// for extended types whose own transcendentals are loose.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("representable constant")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("representable integer")
    }

    fn lo(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn exp_acc(self) -> Self {
        if self.is_nan() {
            return self;
        }
        if self > Self::of(709.0) {
            return Self::infinity();
        }
        if self < Self::of(-745.0) {
            return Self::zero();
        }
        let ln2 = Self::LN_2();
        let k = (self / ln2).round();
        let r = self - k * ln2;
        let mut term = Self::one();
        let mut sum = Self::one();
        for j in 1..32 {
            term = term * r / Self::of(j as f64);
            sum = sum + term;
        }
        let k = k.to_i32().unwrap_or(0);
        sum * Self::of(2.0).powi(k)
    }

    fn sin_cos_acc(self) -> (Self, Self) {
        let half_pi = Self::FRAC_PI_2();
        let q = (self / half_pi).round();
        let r = self - q * half_pi;
        let r2 = r * r;
        let mut s = Self::zero();
        let mut c = Self::zero();
        let mut ts = r;
        let mut tc = Self::one();
        for j in 0..18 {
            s = s + ts;
            c = c + tc;
            let a = Self::of((2 * j + 2) as f64);
            let b = Self::of((2 * j + 3) as f64);
            ts = -ts * r2 / (a * b);
            tc = -tc * r2 / (a * (a - Self::one()));
        }
        match q.to_i64().unwrap_or(0).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Real for f64 {
    fn exp_acc(self) -> Self {
        self.exp()
    }
    fn sin_cos_acc(self) -> (Self, Self) {
        self.sin_cos()
    }
}

impl Real for f32 {
    fn exp_acc(self) -> Self {
        self.exp()
    }
    fn sin_cos_acc(self) -> (Self, Self) {
        self.sin_cos()
    }
}

pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    let m = z.re.exp_acc();
    let (s, c) = z.im.sin_cos_acc();
    Complex::new(m * c, m * s)
}

pub fn cpowi<T: Real>(z: Complex<T>, k: i64) -> Complex<T> {
    let mut base = if k < 0 { Complex::new(T::one(), T::zero()) / z } else { z };
    let mut e = k.unsigned_abs();
    let mut acc = Complex::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}
