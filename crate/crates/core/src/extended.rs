//! Double-double ("twofold") arithmetic, about 106 bits of mantissa.
//!
//! Only what the alternating amplitude sums need: add, mul, div, sqrt, and a
//! complex wrapper. Error-free transforms follow Dekker and Knuth; products
//! use a fused multiply-add.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoFold {
    pub hi: f64,
    pub lo: f64,
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

impl TwoFold {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    /// Exact ratio of two integers below 2^53, rounded to twofold precision.
    pub fn ratio(num: u64, den: u64) -> Self {
        Self::from_f64(num as f64) / Self::from_f64(den as f64)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let residual = (self - Self { hi: p, lo: e }).hi;
        Self::renorm(s, residual / (2.0 * s))
    }
}

impl Neg for TwoFold {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for TwoFold {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Sub for TwoFold {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for TwoFold {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        Self::renorm(p, e + (self.hi * rhs.lo + self.lo * rhs.hi))
    }
}

impl Div for TwoFold {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Self::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Self::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        Self::renorm(q1, q2) + Self::from_f64(q3)
    }
}

/// Complex number with twofold real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoFoldComplex {
    pub re: TwoFold,
    pub im: TwoFold,
}

impl TwoFoldComplex {
    pub const ZERO: Self = Self { re: TwoFold::ZERO, im: TwoFold::ZERO };
    pub const ONE: Self = Self { re: TwoFold::ONE, im: TwoFold::ZERO };

    pub fn from_complex(z: Complex64) -> Self {
        Self { re: TwoFold::from_f64(z.re), im: TwoFold::from_f64(z.im) }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(self, k: TwoFold) -> Self {
        Self { re: self.re * k, im: self.im * k }
    }

    pub fn norm_sqr(self) -> TwoFold {
        self.re * self.re + self.im * self.im
    }

    /// |z| rounded to f64; only used for error bookkeeping.
    pub fn norm_f64(self) -> f64 {
        self.to_complex().norm()
    }
}

impl Add for TwoFoldComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Mul for TwoFoldComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for TwoFoldComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let den = rhs.norm_sqr();
        Self {
            re: (self.re * rhs.re + self.im * rhs.im) / den,
            im: (self.im * rhs.re - self.re * rhs.im) / den,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_bits_lost_in_plain_f64() {
        let big = TwoFold::from_f64(1e17);
        let sum = big + TwoFold::ONE - big;
        assert_eq!(sum.to_f64(), 1.0);
    }

    #[test]
    fn division_and_sqrt_round_trip() {
        let third = TwoFold::ratio(1, 3);
        let back = third * TwoFold::from_f64(3.0) - TwoFold::ONE;
        assert!(back.to_f64().abs() < 1e-31);

        let two = TwoFold::from_f64(2.0);
        let r = two.sqrt();
        assert!((r * r - two).to_f64().abs() < 1e-30);
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let a = TwoFoldComplex::from_complex(Complex64::new(0.3, -1.7));
        let b = TwoFoldComplex::from_complex(Complex64::new(-2.2, 0.9));
        let q = (a * b) / b;
        assert!((q.re - a.re).to_f64().abs() < 1e-30);
        assert!((q.im - a.im).to_f64().abs() < 1e-30);
    }
}
