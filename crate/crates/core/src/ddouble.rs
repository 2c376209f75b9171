//! Double-double arithmetic: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2,
//! giving about 32 significant digits.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

use crate::scalar::Real;

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub const fn c(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    fn newton_ln(self) -> Self {
        let mut y = Self::c(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp_acc() - Self::one();
        }
        y
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}{:+e}", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.hi, f)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        if !hi.is_finite() {
            return Self { hi, lo: 0.0 };
        }
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        if !hi.is_finite() {
            return Self { hi, lo: 0.0 };
        }
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Self::c(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::c(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - (self / b).trunc() * b
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

impl DivAssign for DoubleDouble {
    fn div_assign(&mut self, b: Self) {
        *self = *self / b;
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::c(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::c(1.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Self::c)
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        Some(t.hi as i64 + t.lo as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        if self.hi < 0.0 {
            return None;
        }
        let t = self.trunc();
        Some((t.hi as i128 + t.lo as i128) as u64)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        Some(Self::from_sum(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::from_sum(hi, lo))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Self::c(x))
    }
}

impl NumCast for DoubleDouble {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        n.to_f64().map(<Self as From<f64>>::from)
    }
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        Self::c(f64::NAN)
    }
    fn infinity() -> Self {
        Self::c(f64::INFINITY)
    }
    fn neg_infinity() -> Self {
        Self::c(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Self::c(-0.0)
    }
    fn min_value() -> Self {
        Self::c(f64::MIN)
    }
    fn min_positive_value() -> Self {
        Self::c(f64::MIN_POSITIVE)
    }
    fn max_value() -> Self {
        Self::c(f64::MAX)
    }
    fn epsilon() -> Self {
        Self::c(4.93038065763132e-32)
    }
    fn is_nan(self) -> bool {
        self.hi.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi.classify()
    }
    fn floor(self) -> Self {
        let fh = self.hi.floor();
        if fh == self.hi {
            let (hi, lo) = quick_two_sum(fh, self.lo.floor());
            Self { hi, lo }
        } else {
            Self::c(fh)
        }
    }
    fn ceil(self) -> Self {
        -(-self).floor()
    }
    fn round(self) -> Self {
        (self + Self::c(0.5)).floor()
    }
    fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            self.ceil()
        }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        Self::c(self.hi.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.hi.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    fn powf(self, n: Self) -> Self {
        (n * self.ln()).exp_acc()
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::c(self.hi.sqrt());
        }
        let a = 1.0 / self.hi.sqrt();
        let ax = self.hi * a;
        let r = self - Self::c(ax) * Self::c(ax);
        Self::c(ax) + Self::c(r.hi * a * 0.5)
    }
    fn exp(self) -> Self {
        self.exp_acc()
    }
    fn exp2(self) -> Self {
        (self * Self::LN_2()).exp_acc()
    }
    fn ln(self) -> Self {
        if self.hi <= 0.0 || !self.hi.is_finite() {
            return Self::c(self.hi.ln());
        }
        self.newton_ln()
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn log2(self) -> Self {
        self.ln() / Self::LN_2()
    }
    fn log10(self) -> Self {
        self.ln() / Self::LN_10()
    }
    fn max(self, other: Self) -> Self {
        if self >= other || other.is_nan() {
            self
        } else {
            other
        }
    }
    fn min(self, other: Self) -> Self {
        if self <= other || other.is_nan() {
            self
        } else {
            other
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::zero()
        }
    }
    fn cbrt(self) -> Self {
        let mut y = Self::c(self.hi.cbrt());
        if y.is_zero() || !y.is_finite() {
            return y;
        }
        for _ in 0..2 {
            y = y - (y * y * y - self) / (Self::c(3.0) * y * y);
        }
        y
    }
    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    fn sin(self) -> Self {
        self.sin_cos_acc().0
    }
    fn cos(self) -> Self {
        self.sin_cos_acc().1
    }
    fn tan(self) -> Self {
        let (s, c) = self.sin_cos_acc();
        s / c
    }
    fn asin(self) -> Self {
        self.atan2((Self::one() - self * self).sqrt())
    }
    fn acos(self) -> Self {
        (Self::one() - self * self).sqrt().atan2(self)
    }
    fn atan(self) -> Self {
        self.atan2(Self::one())
    }
    fn atan2(self, other: Self) -> Self {
        let r = self.hypot(other);
        if r.is_zero() {
            return Self::zero();
        }
        let (y, x) = (self / r, other / r);
        let mut a = Self::c(self.hi.atan2(other.hi));
        for _ in 0..2 {
            let (s, c) = a.sin_cos_acc();
            // rotate by the residual angle sin(theta - a)
            a = a + (y * c - x * s);
        }
        a
    }
    fn sin_cos(self) -> (Self, Self) {
        self.sin_cos_acc()
    }
    fn exp_m1(self) -> Self {
        if self.hi.abs() < 1e-3 {
            let mut term = self;
            let mut sum = self;
            for j in 2..20 {
                term = term * self / Self::c(j as f64);
                sum += term;
            }
            sum
        } else {
            self.exp_acc() - Self::one()
        }
    }
    fn ln_1p(self) -> Self {
        (Self::one() + self).ln()
    }
    fn sinh(self) -> Self {
        let e = self.exp_acc();
        (e - e.recip()) / Self::c(2.0)
    }
    fn cosh(self) -> Self {
        let e = self.exp_acc();
        (e + e.recip()) / Self::c(2.0)
    }
    fn tanh(self) -> Self {
        let e = (self * Self::c(2.0)).exp_acc();
        (e - Self::one()) / (e + Self::one())
    }
    fn asinh(self) -> Self {
        (self + (self * self + Self::one()).sqrt()).ln()
    }
    fn acosh(self) -> Self {
        (self + (self * self - Self::one()).sqrt()).ln()
    }
    fn atanh(self) -> Self {
        ((Self::one() + self) / (Self::one() - self)).ln() / Self::c(2.0)
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi.integer_decode()
    }
}

#[allow(non_snake_case)]
impl FloatConst for DoubleDouble {
    fn E() -> Self {
        Self::new(2.718281828459045, 1.4456468917292502e-16)
    }
    fn FRAC_1_PI() -> Self {
        Self::new(0.3183098861837907, -1.9678676675182486e-17)
    }
    fn FRAC_1_SQRT_2() -> Self {
        Self::new(0.7071067811865476, -4.833646656726457e-17)
    }
    fn FRAC_2_PI() -> Self {
        Self::new(0.6366197723675814, -3.935735335036497e-17)
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Self::new(1.1283791670955126, 1.533545961316588e-17)
    }
    fn FRAC_PI_2() -> Self {
        Self::new(1.5707963267948966, 6.123233995736766e-17)
    }
    fn FRAC_PI_3() -> Self {
        Self::new(1.0471975511965979, -1.072081766451091e-16)
    }
    fn FRAC_PI_4() -> Self {
        Self::new(0.7853981633974483, 3.061616997868383e-17)
    }
    fn FRAC_PI_6() -> Self {
        Self::new(0.5235987755982989, -5.360408832255455e-17)
    }
    fn FRAC_PI_8() -> Self {
        Self::new(0.39269908169872414, 1.5308084989341915e-17)
    }
    fn LN_10() -> Self {
        Self::new(2.302585092994046, -2.1707562233822494e-16)
    }
    fn LN_2() -> Self {
        Self::new(0.6931471805599453, 2.3190468138462996e-17)
    }
    fn LOG10_E() -> Self {
        Self::new(0.4342944819032518, 1.098319650216765e-17)
    }
    fn LOG2_E() -> Self {
        Self::new(1.4426950408889634, 2.0355273740931033e-17)
    }
    fn PI() -> Self {
        Self::new(3.141592653589793, 1.2246467991473532e-16)
    }
    fn SQRT_2() -> Self {
        Self::new(1.4142135623730951, -9.667293313452913e-17)
    }
    fn TAU() -> Self {
        Self::new(6.283185307179586, 2.4492935982947064e-16)
    }
    fn LOG10_2() -> Self {
        Self::new(0.3010299956639812, -2.8037281277851704e-18)
    }
    fn LOG2_10() -> Self {
        Self::new(3.321928094887362, 1.661617516973592e-16)
    }
}

impl Real for DoubleDouble {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type D = DoubleDouble;

    fn d(x: f64) -> D {
        D::c(x)
    }

    #[test]
    fn division_keeps_the_low_word() {
        let third = d(1.0) / d(3.0);
        assert!(third.lo() != 0.0);
        let r = third * d(3.0) - d(1.0);
        assert!(r.hi().abs() < 1e-31);
        let q = d(1.3) / d(7.0);
        assert!((q * d(7.0) - d(1.3)).hi().abs() < 1e-31);
    }

    #[test]
    fn constants_are_consistent() {
        let (s, c) = D::PI().sin_cos_acc();
        assert!(s.hi().abs() < 1e-31);
        assert!((c + d(1.0)).hi().abs() < 1e-31);
        assert!((d(2.0).ln() - D::LN_2()).hi().abs() < 1e-31);
        assert!((D::SQRT_2() * D::SQRT_2() - d(2.0)).hi().abs() < 1e-31);
        assert!((d(1.0).exp_acc() - D::E()).hi().abs() < 1e-30);
    }

    #[test]
    fn transcendental_round_trips() {
        for &x in &[-3.7, -0.5, 0.3, 1.0, 12.25, 80.0] {
            let v = d(x) / d(3.0);
            let back = v.exp_acc().ln();
            assert!((back - v).abs().hi() < 1e-30 * (1.0 + x.abs()));
            let e = v.exp_acc();
            let expect = v.hi().exp() * (1.0 + v.lo());
            assert!(((e.hi() - expect) / expect).abs() < 4e-16);
            let (s, c) = v.sin_cos_acc();
            assert!((s * s + c * c - d(1.0)).hi().abs() < 1e-30);
            let a = s.atan2(c);
            let wrapped = (v + D::PI()) % D::TAU() - D::PI();
            let target = if wrapped < -D::PI() { wrapped + D::TAU() } else { wrapped };
            assert!((a - target).hi().abs() < 1e-29, "{x}");
        }
        let x = d(0.3);
        assert!((x.acos().cos() - x).hi().abs() < 1e-30);
        assert!((x.sqrt() * x.sqrt() - x).hi().abs() < 1e-31);
    }

    #[test]
    fn rounding() {
        assert_eq!(d(2.5).floor(), d(2.0));
        assert_eq!(d(-2.5).floor(), d(-3.0));
        assert_eq!(d(-2.5).trunc(), d(-2.0));
        assert_eq!(D::new(3.0, -1e-20).floor(), d(2.0));
        assert_eq!(d(7.4).round().to_i64(), Some(7));
        assert_eq!(D::from_u64((1u64 << 60) + 3).unwrap().to_u64(), Some((1u64 << 60) + 3));
    }

    proptest! {
        #[test]
        fn field_identities(a in -1e6f64..1e6, b in 1e-3f64..1e6) {
            let x = d(a) / d(7.0);
            let y = d(b) / d(3.0);
            let q = x / y;
            prop_assert!((q * y - x).abs().hi() <= 1e-30 * x.abs().hi().max(1e-300));
            prop_assert!(((x + y) - y - x).abs().hi() <= 1e-30 * (x.abs().hi() + y.hi()));
        }
    }
}
