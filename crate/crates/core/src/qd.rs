//! Quad-double arithmetic: an unevaluated sum of four binary64 numbers of
//! decreasing magnitude, about 212 bits of significand.
//!
//! Step-3 Carnot norms take cube roots of the third layer. Expanding by ε⁻¹
//! multiplies a third-layer coordinate by ν(ε)⁻³, so at ν(ε) = 2⁻¹² a stored
//! rounding error η turns into a distance of about (η·2³⁶)^{1/3}. Double-double
//! leaves that near 1e-7; quad-double puts it below 1e-17.
//!
//! The routines follow the "sloppy" variants of Hida, Li and Bailey's QD
//! library: errors are bounded relative to the operand magnitudes, which is
//! what cancelling group products need.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::dd::Dd;

#[derive(Debug, Clone, Copy, Default)]
pub struct Qd([f64; 4]);

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

/// (a, b, c) ← their sum as three terms.
#[inline]
fn three_sum(a: &mut f64, b: &mut f64, c: &mut f64) {
    let (t1, t2) = two_sum(*a, *b);
    let (s, t3) = two_sum(*c, t1);
    *a = s;
    let (u, v) = two_sum(t2, t3);
    *b = u;
    *c = v;
}

/// (a, b) ← the sum of a, b, c as two terms.
#[inline]
fn three_sum2(a: &mut f64, b: &mut f64, c: f64) {
    let (t1, t2) = two_sum(*a, *b);
    let (s, t3) = two_sum(c, t1);
    *a = s;
    *b = t2 + t3;
}

fn renorm(c: [f64; 5]) -> Qd {
    let [mut c0, mut c1, mut c2, mut c3, mut c4] = c;
    if !c0.is_finite() {
        return Qd([c0, c1, c2, c3]);
    }
    let (s, t) = quick_two_sum(c3, c4);
    c4 = t;
    let (s, t) = quick_two_sum(c2, s);
    c3 = t;
    let (s, t) = quick_two_sum(c1, s);
    c2 = t;
    let (s, t) = quick_two_sum(c0, s);
    c0 = s;
    c1 = t;

    let (mut s0, mut s1) = quick_two_sum(c0, c1);
    let (mut s2, mut s3) = (0.0, 0.0);
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
            if s3 != 0.0 {
                s3 += c4;
            } else {
                s2 += c4;
            }
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
            if s1 != 0.0 {
                (s1, s2) = quick_two_sum(s1, c4);
            } else {
                (s0, s1) = quick_two_sum(s0, c4);
            }
        }
    }
    Qd([s0, s1, s2, s3])
}

impl Qd {
    pub const ZERO: Qd = Qd([0.0; 4]);
    pub const ONE: Qd = Qd([1.0, 0.0, 0.0, 0.0]);

    pub const fn from_f64(x: f64) -> Self {
        Qd([x, 0.0, 0.0, 0.0])
    }

    pub fn to_f64(self) -> f64 {
        self.0[0] + self.0[1]
    }

    /// The components, largest first.
    pub fn parts(self) -> [f64; 4] {
        self.0
    }

    pub fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.0[0] == 0.0
    }

    pub fn square(self) -> Self {
        self * self
    }

    fn mul_f64(self, b: f64) -> Qd {
        let a = self.0;
        let (p0, q0) = two_prod(a[0], b);
        let (p1, mut q1) = two_prod(a[1], b);
        let (mut p2, mut q2) = two_prod(a[2], b);
        let p3 = a[3] * b;
        let (s1, mut s2) = two_sum(q0, p1);
        three_sum(&mut s2, &mut q1, &mut p2);
        three_sum2(&mut q1, &mut q2, p3);
        renorm([p0, s1, s2, q1, q2 + p2])
    }
}

impl From<f64> for Qd {
    fn from(x: f64) -> Self {
        Qd::from_f64(x)
    }
}

impl From<Dd> for Qd {
    fn from(x: Dd) -> Self {
        Qd([x.hi(), x.lo(), 0.0, 0.0])
    }
}

impl PartialEq for Qd {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Qd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.partial_cmp(b)? {
                Ordering::Equal => continue,
                ord => return Some(ord),
            }
        }
        Some(Ordering::Equal)
    }
}

impl fmt::Display for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl Neg for Qd {
    type Output = Qd;
    fn neg(self) -> Qd {
        Qd(self.0.map(|c| -c))
    }
}

impl Add for Qd {
    type Output = Qd;
    fn add(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        let (s0, t0) = two_sum(a[0], b[0]);
        let (s1, t1) = two_sum(a[1], b[1]);
        let (s2, t2) = two_sum(a[2], b[2]);
        let (s3, t3) = two_sum(a[3], b[3]);
        let (s1, t0) = two_sum(s1, t0);
        let (mut s2, mut t0, mut t1) = (s2, t0, t1);
        three_sum(&mut s2, &mut t0, &mut t1);
        let mut s3 = s3;
        three_sum2(&mut s3, &mut t0, t2);
        renorm([s0, s1, s2, s3, t0 + t1 + t3])
    }
}

impl Sub for Qd {
    type Output = Qd;
    fn sub(self, b: Qd) -> Qd {
        self + (-b)
    }
}

impl Mul for Qd {
    type Output = Qd;
    fn mul(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        let (p0, mut q0) = two_prod(a[0], b[0]);
        let (mut p1, mut q1) = two_prod(a[0], b[1]);
        let (mut p2, mut q2) = two_prod(a[1], b[0]);
        let (mut p3, q3) = two_prod(a[0], b[2]);
        let (mut p4, q4) = two_prod(a[1], b[1]);
        let (mut p5, q5) = two_prod(a[2], b[0]);

        three_sum(&mut p1, &mut p2, &mut q0);
        three_sum(&mut p2, &mut q1, &mut q2);
        three_sum(&mut p3, &mut p4, &mut p5);
        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let mut s2 = q2 + p5;
        let (mut s1, t0) = two_sum(s1, t0);
        s2 += t0 + t1;
        s1 += a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0 + q3 + q4 + q5;
        renorm([p0, p1, s0, s1, s2])
    }
}

impl Mul<f64> for Qd {
    type Output = Qd;
    fn mul(self, b: f64) -> Qd {
        self.mul_f64(b)
    }
}

impl Div for Qd {
    type Output = Qd;
    /// Long division, one binary64 quotient digit at a time.
    fn div(self, b: Qd) -> Qd {
        let d = b.0[0];
        let mut r = self;
        let mut q = [0.0; 5];
        for digit in q.iter_mut() {
            *digit = r.0[0] / d;
            r -= b * *digit;
        }
        renorm(q)
    }
}

impl AddAssign for Qd {
    fn add_assign(&mut self, b: Qd) {
        *self = *self + b;
    }
}

impl SubAssign for Qd {
    fn sub_assign(&mut self, b: Qd) {
        *self = *self - b;
    }
}

impl MulAssign for Qd {
    fn mul_assign(&mut self, b: Qd) {
        *self = *self * b;
    }
}

impl Sum for Qd {
    fn sum<I: Iterator<Item = Qd>>(iter: I) -> Qd {
        iter.fold(Qd::ZERO, |a, b| a + b)
    }
}

pub fn lift(xs: &[f64]) -> Vec<Qd> {
    xs.iter().copied().map(Qd::from).collect()
}

pub fn lower(xs: &[Qd]) -> Vec<f64> {
    xs.iter().map(|x| x.to_f64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    const SHIFT: u32 = 1200;

    /// x·2^SHIFT as an exact integer.
    fn exact(x: f64) -> BigInt {
        if x == 0.0 {
            return BigInt::from(0);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let shift = e + SHIFT as i64;
        assert!(shift >= 0);
        BigInt::from(sign) * (BigInt::from(mant) << shift as usize)
    }

    fn exact_qd(x: Qd) -> BigInt {
        x.0.iter().map(|c| exact(*c)).sum()
    }

    /// |err| / 2^SHIFT as f64 (coarse, via the bit length).
    fn magnitude(err: &BigInt) -> f64 {
        let bits = err.bits() as i64;
        if bits == 0 {
            0.0
        } else {
            2f64.powi((bits - SHIFT as i64) as i32)
        }
    }

    fn qd(a: f64, b: f64, c: f64) -> Qd {
        Qd::from(a) + Qd::from(b * 1e-17) + Qd::from(c * 1e-34)
    }

    #[test]
    fn third_times_three_is_one() {
        let third = Qd::ONE / Qd::from(3.0);
        let back = third * 3.0 - Qd::ONE;
        assert!(back.abs().to_f64() < 1e-62, "{:?}", back);
        assert!(third.parts()[3] != 0.0);
    }

    #[test]
    fn keeps_what_double_double_loses() {
        let a = Qd::ONE + Qd::from(1e-40);
        assert_eq!((a - Qd::ONE).to_f64(), 1e-40);
    }

    proptest! {
        #[test]
        fn add_matches_exact_sums(a in -10.0f64..10.0, b in -1.0f64..1.0, c in -1.0f64..1.0,
                                  d in -10.0f64..10.0, e in -1.0f64..1.0, f in -1.0f64..1.0) {
            let (x, y) = (qd(a, b, c), qd(d, e, f));
            let err = exact_qd(x + y) - (exact_qd(x) + exact_qd(y));
            prop_assert!(magnitude(&err) <= 1e-60 * (a.abs() + d.abs() + 1e-30));
        }

        #[test]
        fn cancellation_keeps_the_tail(a in -10.0f64..10.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
            let x = qd(a, b, c);
            let y = qd(a, b, 0.0);
            let diff = x - y;
            let err = exact_qd(diff) - (exact_qd(x) - exact_qd(y));
            prop_assert!(magnitude(&err) <= 1e-62 * (a.abs() + 1.0));
        }

        #[test]
        fn mul_matches_exact_products(a in -10.0f64..10.0, b in -1.0f64..1.0, c in -1.0f64..1.0,
                                      d in -10.0f64..10.0, e in -1.0f64..1.0, f in -1.0f64..1.0) {
            let (x, y) = (qd(a, b, c), qd(d, e, f));
            let err = (exact_qd(x * y) << SHIFT as usize) - exact_qd(x) * exact_qd(y);
            let err_mag = magnitude(&(err >> SHIFT as usize));
            prop_assert!(err_mag <= 1e-60 * (a.abs() * d.abs() + 1e-30));
        }

        #[test]
        fn division_inverts_multiplication(a in -10.0f64..10.0, b in -1.0f64..1.0, d in 0.1f64..10.0) {
            let x = qd(a, b, 0.3);
            let y = qd(d, 0.7, -0.2);
            let back = (x / y) * y - x;
            prop_assert!(back.abs().to_f64() <= 1e-60 * (1.0 + a.abs()));
        }
    }
}
