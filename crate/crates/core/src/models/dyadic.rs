//! The boundary of the dyadic tree, X^ω with X = {0, 1}, identified with the
//! 2-adic integers.
//!
//! A word is stored as the integer whose binary digits, least significant
//! first, are its letters. Only the first K letters are kept, and every point
//! records how many of its letters are actually determined.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::ConicalGroup;
use crate::error::{domain, LabError, Result};
use crate::report::ConvergenceReport;
use crate::scale::DyadicPower;

/// A dyadic integer known modulo 2^known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    digits: u64,
    known: u32,
}

fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl DyadicPoint {
    /// Letters 0..known as the low bits; higher bits are zero.
    pub fn digits(&self) -> u64 {
        self.digits
    }

    pub fn known(&self) -> u32 {
        self.known
    }

    /// Letter `i` (0-based), if determined.
    pub fn letter(&self, i: u32) -> Option<bool> {
        (i < self.known).then(|| (self.digits >> i) & 1 == 1)
    }
}

/// A tree isometry applied to finite prefixes.
///
/// Isometries of X^ω preserve prefix lengths, so they act on truncated
/// words without loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WIsometry {
    Identity,
    /// Flip the letters selected by the mask.
    Xor(u64),
    /// The odometer y ↦ y + 1.
    Odometer,
}

impl WIsometry {
    pub fn apply(&self, word: u64, len: u32) -> u64 {
        let out = match self {
            WIsometry::Identity => word,
            WIsometry::Xor(m) => word ^ m,
            WIsometry::Odometer => word.wrapping_add(1),
        };
        out & mask(len)
    }
}

/// A function (k, x) ↦ W^x_k ∈ Isom(X^ω).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WFamily {
    /// The same isometry for every k and x.
    Constant(WIsometry),
    /// W^x_k = flip by the tail of x after its first k letters. Smooth, since
    /// 2^{-k} d(W^x_k y, W^{x′}_k y) = d(x, x′).
    ShiftedXor,
}

impl WFamily {
    pub fn at(&self, k: u32, base: &DyadicPoint) -> WIsometry {
        match self {
            WFamily::Constant(w) => *w,
            WFamily::ShiftedXor => WIsometry::Xor(if k >= 64 { 0 } else { base.digits >> k }),
        }
    }
}

/// Words of length K over {0, 1} with d(x, y) = 2^{-m}, m the length of the
/// longest common prefix, and the dilatations δ^x_{2^p} y = x + 2^p(y − x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicBoundaryModel {
    precision: u32,
}

impl Default for DyadicBoundaryModel {
    fn default() -> Self {
        Self { precision: 64 }
    }
}

impl DyadicBoundaryModel {
    pub fn new(precision: u32) -> Result<Self> {
        if !(1..=64).contains(&precision) {
            return Err(LabError::Model(format!("dyadic precision must be in 1..=64, got {precision}")));
        }
        Ok(Self { precision })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The fully determined word with the binary digits of `value`.
    pub fn point(&self, value: u64) -> DyadicPoint {
        DyadicPoint { digits: value & mask(self.precision), known: self.precision }
    }

    /// A word of which only the first `known` letters are determined.
    pub fn partial(&self, value: u64, known: u32) -> Result<DyadicPoint> {
        if known > self.precision {
            return Err(LabError::PrecisionExhausted(format!(
                "{known} letters requested at precision {}",
                self.precision
            )));
        }
        Ok(DyadicPoint { digits: value & mask(known), known })
    }

    /// Parses a word written first letter first, e.g. "1100" is 3.
    pub fn from_word(&self, word: &str) -> Result<DyadicPoint> {
        let mut digits = 0u64;
        let mut n = 0u32;
        for c in word.chars() {
            let bit = match c {
                '0' => 0,
                '1' => 1,
                '_' => continue,
                _ => return Err(LabError::InvalidArgument(format!("letter {c:?} is not 0 or 1"))),
            };
            if n >= self.precision {
                return Err(LabError::PrecisionExhausted(format!("word longer than the precision {}", self.precision)));
            }
            digits |= bit << n;
            n += 1;
        }
        self.partial(digits, n)
    }

    /// The determined letters, first letter first.
    pub fn to_word(&self, p: &DyadicPoint) -> String {
        (0..p.known).map(|i| if (p.digits >> i) & 1 == 1 { '1' } else { '0' }).collect()
    }

    /// The 2-adic valuation, `None` for zero at full precision.
    pub fn try_valuation(&self, a: &DyadicPoint) -> Result<Option<u32>> {
        if a.digits != 0 {
            return Ok(Some(a.digits.trailing_zeros()));
        }
        if a.known >= self.precision {
            Ok(None)
        } else {
            Err(LabError::PrecisionExhausted(format!(
                "first {} letters vanish; the valuation is not determined",
                a.known
            )))
        }
    }

    /// The exact distance, or `PrecisionExhausted` when the known letters
    /// do not decide it.
    pub fn try_distance(&self, a: &DyadicPoint, b: &DyadicPoint) -> Result<f64> {
        let diff = self.product(&self.inverse(a), b);
        Ok(match self.try_valuation(&diff)? {
            Some(v) => (-(v as f64)).exp2(),
            None => 0.0,
        })
    }

    /// x + λ(y − x) for a dyadic integer λ, the affine combination behind
    /// the barycentric identity.
    pub fn affine_combination(&self, x: &DyadicPoint, lambda: &DyadicPoint, y: &DyadicPoint) -> DyadicPoint {
        let known = x.known.min(y.known).min(lambda.known);
        let m = mask(known);
        let diff = y.digits.wrapping_sub(x.digits);
        DyadicPoint { digits: x.digits.wrapping_add(lambda.digits.wrapping_mul(diff)) & m, known }
    }

    /// δ₂^x y built from an isometry family W:
    /// δ₂^{qαx} qᾱy = q α x̄₁ W^{qαx}_{|q|+1}(y), and δ₂^x x = x.
    ///
    /// The letter x̄₁ is the complement of the letter of the base that follows α.
    /// The output keeps K letters, so the last letter of W(y) is dropped.
    pub fn w_dilatation(&self, family: &WFamily, x: &DyadicPoint, y: &DyadicPoint) -> Result<DyadicPoint> {
        let m = x.known.min(y.known);
        let diff = (x.digits ^ y.digits) & mask(m);
        if diff == 0 {
            return if m >= self.precision {
                Ok(*x)
            } else {
                Err(LabError::PrecisionExhausted(format!("words agree on all {m} known letters")))
            };
        }
        let j = diff.trailing_zeros();
        if j + 1 >= m {
            return Err(LabError::PrecisionExhausted(format!(
                "the letter after position {j} is needed but only {m} are known"
            )));
        }
        let head = x.digits & mask(j + 1);
        let flipped = (!(x.digits >> (j + 1)) & 1) << (j + 1);
        let tail_len = m - j - 1;
        let w = family.at(j + 1, x).apply(y.digits >> (j + 1), tail_len);
        let shifted = if j + 2 >= 64 { 0 } else { w << (j + 2) };
        Ok(DyadicPoint { digits: (head | flipped | shifted) & mask(m), known: m })
    }

    /// 2^{-k} d(W^x_k(y), W^{x′}_k(y)) on the tails of length K − k.
    pub fn smoothness_defect(
        &self,
        family: &WFamily,
        x: &DyadicPoint,
        x2: &DyadicPoint,
        y: &DyadicPoint,
        k: u32,
    ) -> f64 {
        let len = self.precision.saturating_sub(k);
        let tail = if k >= 64 { 0 } else { y.digits >> k };
        let a = family.at(k, x).apply(tail, len);
        let b = family.at(k, x2).apply(tail, len);
        let d = match a ^ b {
            0 => 0.0,
            z => (-(z.trailing_zeros() as f64)).exp2(),
        };
        (-(k as f64)).exp2() * d
    }

    /// For closeness levels m = 1, 2, …, the sup of the smoothness quantity
    /// over sampled x, x′ sharing their first m letters, with k = m − 1 so
    /// that d(x, x′) < 2^{-k}. A smooth family drives the sup to zero.
    pub fn smoothness_report(
        &self,
        family: &WFamily,
        levels: u32,
        samples: usize,
        rng: &mut ChaCha8Rng,
    ) -> ConvergenceReport {
        let levels = levels.clamp(1, self.precision.saturating_sub(1).max(1));
        let mut nus = Vec::new();
        let mut sups = Vec::new();
        for m in 1..=levels {
            let mut sup: f64 = 0.0;
            for _ in 0..samples {
                let x = self.random_element(rng);
                let noise = rng.gen::<u64>() & !mask(m);
                let x2 = self.point(x.digits ^ noise);
                let y = self.random_element(rng);
                sup = sup.max(self.smoothness_defect(family, &x, &x2, &y, m - 1));
            }
            nus.push((-(m as f64)).exp2());
            sups.push(sup);
        }
        ConvergenceReport::new("w-smoothness", self.group_name(), nus, sups)
            .with_samples(samples, 0)
            .judge_convergent(f64::INFINITY)
    }
}

impl ConicalGroup for DyadicBoundaryModel {
    type Element = DyadicPoint;
    type Scale = DyadicPower;

    fn group_name(&self) -> String {
        format!("dyadic(K={})", self.precision)
    }

    fn identity(&self) -> DyadicPoint {
        self.point(0)
    }

    fn product(&self, a: &DyadicPoint, b: &DyadicPoint) -> DyadicPoint {
        let known = a.known.min(b.known);
        DyadicPoint { digits: a.digits.wrapping_add(b.digits) & mask(known), known }
    }

    fn inverse(&self, a: &DyadicPoint) -> DyadicPoint {
        DyadicPoint { digits: a.digits.wrapping_neg() & mask(a.known), known: a.known }
    }

    /// Multiplication by 2^p. Dividing by 2^q needs q known trailing zeros.
    fn scale_element(&self, eps: &DyadicPower, a: &DyadicPoint) -> Result<DyadicPoint> {
        let p = eps.exponent();
        if p >= 0 {
            let p = p as u32;
            let known = a.known.saturating_add(p).min(self.precision);
            let digits = if p >= 64 { 0 } else { a.digits << p };
            return Ok(DyadicPoint { digits: digits & mask(known), known });
        }
        let q = p.unsigned_abs();
        if a.known < q {
            return Err(LabError::PrecisionExhausted(format!(
                "division by 2^{q} needs {q} known letters, have {}",
                a.known
            )));
        }
        if a.digits & mask(q) != 0 {
            return Err(domain(format!("2^{p} times a word with valuation below {q} leaves the dyadic integers")));
        }
        let digits = if q >= 64 { 0 } else { a.digits >> q };
        Ok(DyadicPoint { digits, known: a.known - q })
    }

    /// 2^{-v(a)}; an undetermined zero prefix of length m gives the bound 2^{-m}.
    fn norm(&self, a: &DyadicPoint) -> f64 {
        if a.digits != 0 {
            (-(a.digits.trailing_zeros() as f64)).exp2()
        } else if a.known >= self.precision {
            0.0
        } else {
            (-(a.known as f64)).exp2()
        }
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> DyadicPoint {
        self.point(rng.gen())
    }

    /// center + 2^m·r with 2^{-m} ≤ radius and r random, fully determined
    /// wherever the centre is.
    fn sample_in_ball(&self, center: &DyadicPoint, radius: f64, rng: &mut ChaCha8Rng) -> DyadicPoint {
        let m = if radius >= 1.0 { 0 } else { (-radius.max(f64::MIN_POSITIVE).log2()).ceil() as u32 };
        let r: u64 = rng.gen();
        let step = if m >= 64 { 0 } else { r << m };
        DyadicPoint { digits: center.digits.wrapping_add(step) & mask(center.known), known: center.known }
    }

    fn basis_elements(&self) -> Vec<DyadicPoint> {
        vec![self.point(1)]
    }
}
