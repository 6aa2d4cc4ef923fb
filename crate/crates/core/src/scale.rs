//! Scale groups: commutative groups Γ with a valuation ν : Γ → (0, ∞).
//!
//! "ε → 0" is always read as ν(ε) → 0. Three concrete groups ship: the
//! positive reals (ν = id), integer powers of two seen as dyadic numbers
//! (ν(2^p) = 2^-p) and nonzero complex numbers (ν = |·|).

use std::fmt::Debug;

use num_complex::Complex64;

use crate::dd::Dd;
use crate::error::{LabError, Result};

/// An element of a scale group together with its valuation.
pub trait Scale: Clone + Debug + PartialEq + Send + Sync + 'static {
    /// ν(ε) ∈ (0, ∞).
    fn nu(&self) -> f64;

    /// Group product εμ.
    fn mul(&self, other: &Self) -> Self;

    /// Group inverse ε⁻¹.
    fn inv(&self) -> Self;

    /// Neutral element.
    fn one() -> Self;

    /// The canonical element of valuation exactly `nu`, if there is one.
    fn from_nu(nu: f64) -> Result<Self>;

    /// The canonical element with the largest valuation not above `nu`.
    ///
    /// Used by samplers that need to shrink a point into a ball.
    fn at_most(nu: f64) -> Self;

    fn label(&self) -> String;
}

fn check_nu(nu: f64) -> Result<()> {
    if nu.is_finite() && nu > 0.0 {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!("valuation must be finite and positive, got {nu}")))
    }
}

/// Γ = (0, ∞) under multiplication with ν = id.
///
/// The value is kept in double-double so that ε·ε⁻¹ = 1 to far below
/// binary64 rounding.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PositiveReal(Dd);

impl PositiveReal {
    pub fn new(value: f64) -> Result<Self> {
        check_nu(value)?;
        Ok(Self(Dd::from(value)))
    }

    pub fn from_dd(value: Dd) -> Result<Self> {
        check_nu(value.to_f64())?;
        Ok(Self(value))
    }

    pub fn value(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn exact(&self) -> Dd {
        self.0
    }
}

impl Scale for PositiveReal {
    fn nu(&self) -> f64 {
        self.0.to_f64()
    }

    fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    fn inv(&self) -> Self {
        Self(self.0.recip())
    }

    fn one() -> Self {
        Self(Dd::ONE)
    }

    fn from_nu(nu: f64) -> Result<Self> {
        Self::new(nu)
    }

    fn at_most(nu: f64) -> Self {
        Self(Dd::from(nu.max(f64::MIN_POSITIVE)))
    }

    fn label(&self) -> String {
        format!("{}", self.0)
    }
}

/// Γ = {2^p : p ∈ ℤ} ⊂ ℚ₂ with ν(2^p) = d(0, 2^p) = 2^-p.
///
/// Contracting scales therefore have positive exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicPower(i32);

impl DyadicPower {
    pub fn new(exponent: i32) -> Self {
        Self(exponent)
    }

    pub fn exponent(&self) -> i32 {
        self.0
    }
}

impl Scale for DyadicPower {
    fn nu(&self) -> f64 {
        (-(self.0 as f64)).exp2()
    }

    fn mul(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }

    fn inv(&self) -> Self {
        Self(-self.0)
    }

    fn one() -> Self {
        Self(0)
    }

    fn from_nu(nu: f64) -> Result<Self> {
        check_nu(nu)?;
        let p = -nu.log2();
        let rounded = p.round();
        if (p - rounded).abs() > 1e-9 {
            return Err(LabError::InvalidArgument(format!("valuation {nu} is not an integer power of two")));
        }
        Ok(Self(rounded as i32))
    }

    fn at_most(nu: f64) -> Self {
        let nu = nu.max(f64::MIN_POSITIVE);
        Self((-nu.log2()).ceil() as i32)
    }

    fn label(&self) -> String {
        format!("2^{}", self.0)
    }
}

/// Γ = ℂ* with ν(ε) = |ε|. The valuation is not injective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexScale {
    re: Dd,
    im: Dd,
}

impl ComplexScale {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) || value.norm() == 0.0 {
            return Err(LabError::InvalidArgument(format!("complex scale must be finite and nonzero, got {value}")));
        }
        Ok(Self { re: Dd::from(value.re), im: Dd::from(value.im) })
    }

    pub fn real(value: f64) -> Result<Self> {
        Self::new(Complex64::new(value, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Real and imaginary parts in double-double.
    pub fn parts(&self) -> (Dd, Dd) {
        (self.re, self.im)
    }

    /// |ε|².
    pub fn modulus_sq(&self) -> Dd {
        self.re * self.re + self.im * self.im
    }
}

impl Scale for ComplexScale {
    fn nu(&self) -> f64 {
        self.modulus_sq().sqrt().to_f64()
    }

    fn mul(&self, other: &Self) -> Self {
        Self { re: self.re * other.re - self.im * other.im, im: self.re * other.im + self.im * other.re }
    }

    fn inv(&self) -> Self {
        let m = self.modulus_sq();
        Self { re: self.re / m, im: -(self.im / m) }
    }

    fn one() -> Self {
        Self { re: Dd::ONE, im: Dd::ZERO }
    }

    fn from_nu(nu: f64) -> Result<Self> {
        check_nu(nu)?;
        Self::real(nu)
    }

    fn at_most(nu: f64) -> Self {
        Self { re: Dd::from(nu.max(f64::MIN_POSITIVE)), im: Dd::ZERO }
    }

    fn label(&self) -> String {
        let v = self.value();
        if v.im == 0.0 {
            format!("{}", v.re)
        } else {
            format!("{}{:+}i", v.re, v.im)
        }
    }
}

/// A list of scales with strictly decreasing valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsGrid<S: Scale> {
    scales: Vec<S>,
}

impl<S: Scale> EpsGrid<S> {
    pub fn new(scales: Vec<S>) -> Result<Self> {
        if scales.is_empty() {
            return Err(LabError::InvalidArgument("empty scale grid".into()));
        }
        for pair in scales.windows(2) {
            if pair[1].nu() >= pair[0].nu() {
                return Err(LabError::InvalidArgument(format!(
                    "grid must be strictly decreasing in valuation: {} then {}",
                    pair[0].label(),
                    pair[1].label()
                )));
            }
        }
        Ok(Self { scales })
    }

    /// The grid ν = 2^-k for k = kmin..=kmax.
    pub fn dyadic(kmin: i32, kmax: i32) -> Result<Self> {
        if kmax < kmin {
            return Err(LabError::InvalidArgument(format!("empty exponent range {kmin}..={kmax}")));
        }
        let scales = (kmin..=kmax).map(|k| S::from_nu((-(k as f64)).exp2())).collect::<Result<Vec<_>>>()?;
        Self::new(scales)
    }

    /// The default grid ν = 2^-2 .. 2^-12.
    pub fn standard() -> Self {
        Self::dyadic(2, 12).expect("the standard grid is valid in every scale group")
    }

    pub fn scales(&self) -> &[S] {
        &self.scales
    }

    pub fn nus(&self) -> Vec<f64> {
        self.scales.iter().map(Scale::nu).collect()
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn finest(&self) -> &S {
        self.scales.last().expect("grid is never empty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dyadic_valuation_follows_exponent() {
        assert_eq!(DyadicPower::new(3).nu(), 0.125);
        assert_eq!(DyadicPower::new(-2).nu(), 4.0);
        assert_eq!(DyadicPower::from_nu(0.25).unwrap(), DyadicPower::new(2));
        assert!(DyadicPower::from_nu(0.3).is_err());
        assert_eq!(DyadicPower::at_most(0.3), DyadicPower::new(2));
    }

    #[test]
    fn complex_valuation_is_not_injective() {
        let a = ComplexScale::real(0.5).unwrap();
        let b = ComplexScale::new(Complex64::from_polar(0.5, 1.1)).unwrap();
        assert_ne!(a, b);
        assert!((a.nu() - b.nu()).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_non_decreasing() {
        let g = EpsGrid::new(vec![PositiveReal::new(0.5).unwrap(), PositiveReal::new(0.5).unwrap()]);
        assert!(g.is_err());
        let g: EpsGrid<PositiveReal> = EpsGrid::standard();
        assert_eq!(g.len(), 11);
        assert_eq!(g.finest().nu(), 2f64.powi(-12));
    }

    proptest! {
        #[test]
        fn valuation_is_a_morphism(a in 1e-3f64..1e3, b in 1e-3f64..1e3, p in -40i32..40, q in -40i32..40,
                                   re in -3.0f64..3.0, im in 0.1f64..3.0) {
            let (x, y) = (PositiveReal::new(a).unwrap(), PositiveReal::new(b).unwrap());
            prop_assert!((x.mul(&y).nu() - x.nu() * y.nu()).abs() <= 1e-12 * x.nu() * y.nu());
            prop_assert!((x.inv().nu() - 1.0 / x.nu()).abs() <= 1e-12 / x.nu());
            let (u, v) = (DyadicPower(p), DyadicPower(q));
            prop_assert_eq!(u.mul(&v).nu(), u.nu() * v.nu());
            prop_assert_eq!(u.inv().nu(), 1.0 / u.nu());
            let z = ComplexScale::new(Complex64::new(re, im)).unwrap();
            prop_assert!((z.mul(&z.inv()).nu() - 1.0).abs() < 1e-12);
            prop_assert!((z.mul(&z).nu() - z.nu() * z.nu()).abs() < 1e-12 * z.nu() * z.nu());
        }
    }
}
