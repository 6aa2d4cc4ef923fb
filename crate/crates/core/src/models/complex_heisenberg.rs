use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::ConicalGroup;
use crate::dd::Dd;
use crate::error::{LabError, Result};
use crate::scale::ComplexScale;

/// A point (x, x′) of ℂ × ℝ with x = re + i·im.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexHeisenbergPoint {
    pub re: Dd,
    pub im: Dd,
    pub t: Dd,
}

impl ComplexHeisenbergPoint {
    pub fn new(re: f64, im: f64, t: f64) -> Self {
        Self { re: Dd::from(re), im: Dd::from(im), t: Dd::from(t) }
    }

    /// Coordinates as (Re x, Im x, x′).
    pub fn to_flat(&self) -> Vec<f64> {
        vec![self.re.to_f64(), self.im.to_f64(), self.t.to_f64()]
    }

    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        match coords {
            [re, im, t] => Ok(Self::new(*re, *im, *t)),
            _ => Err(LabError::InvalidArgument(format!("a point of C x R has 3 coordinates, got {}", coords.len()))),
        }
    }
}

/// N = ℂ × ℝ with (x, x′)(y, y′) = (x + y, x′ + y′ + ½ Im x ȳ) and
/// δ_ε(x, x′) = (εx, |ε|²x′) for ε ∈ ℂ*.
///
/// Dilatations by complex scales rotate the first factor, which is what makes
/// the composite of two dilatations with εμ = −1 neither a dilatation nor a
/// left translation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexHeisenbergModel;

impl ComplexHeisenbergModel {
    pub fn new() -> Self {
        Self
    }

    pub fn point(&self, re: f64, im: f64, t: f64) -> ComplexHeisenbergPoint {
        ComplexHeisenbergPoint::new(re, im, t)
    }
}

impl ConicalGroup for ComplexHeisenbergModel {
    type Element = ComplexHeisenbergPoint;
    type Scale = ComplexScale;

    fn group_name(&self) -> String {
        "complex_heisenberg".into()
    }

    fn identity(&self) -> ComplexHeisenbergPoint {
        ComplexHeisenbergPoint { re: Dd::ZERO, im: Dd::ZERO, t: Dd::ZERO }
    }

    fn product(&self, a: &ComplexHeisenbergPoint, b: &ComplexHeisenbergPoint) -> ComplexHeisenbergPoint {
        // Im(x ȳ) = Im x · Re y − Re x · Im y
        let cross = a.im * b.re - a.re * b.im;
        ComplexHeisenbergPoint { re: a.re + b.re, im: a.im + b.im, t: a.t + b.t + cross * 0.5 }
    }

    fn inverse(&self, a: &ComplexHeisenbergPoint) -> ComplexHeisenbergPoint {
        ComplexHeisenbergPoint { re: -a.re, im: -a.im, t: -a.t }
    }

    fn scale_element(&self, eps: &ComplexScale, a: &ComplexHeisenbergPoint) -> Result<ComplexHeisenbergPoint> {
        let (er, ei) = eps.parts();
        Ok(ComplexHeisenbergPoint { re: er * a.re - ei * a.im, im: er * a.im + ei * a.re, t: eps.modulus_sq() * a.t })
    }

    /// (|x|⁴ + 16x′²)^{1/4}.
    fn norm(&self, a: &ComplexHeisenbergPoint) -> f64 {
        let r2 = a.re.square() + a.im.square();
        (r2.square() + a.t.square() * 16.0).to_f64().sqrt().sqrt()
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> ComplexHeisenbergPoint {
        ComplexHeisenbergPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn basis_elements(&self) -> Vec<ComplexHeisenbergPoint> {
        vec![
            ComplexHeisenbergPoint::new(1.0, 0.0, 0.0),
            ComplexHeisenbergPoint::new(0.0, 1.0, 0.0),
            ComplexHeisenbergPoint::new(0.0, 0.0, 1.0),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::Scale;
    use num_complex::Complex64;
    use rand::SeedableRng;

    #[test]
    fn distinct_scales_share_a_valuation() {
        let a = ComplexScale::real(0.5).unwrap();
        let b = ComplexScale::new(Complex64::from_polar(0.5, 0.7)).unwrap();
        assert_ne!(a, b);
        assert!((a.nu() - b.nu()).abs() < 1e-15);
        let g = ComplexHeisenbergModel::new();
        let p = g.point(1.0, 0.0, 1.0);
        let (da, db) = (g.scale_element(&a, &p).unwrap(), g.scale_element(&b, &p).unwrap());
        assert_ne!(da, db);
        assert!((g.norm(&da) - g.norm(&db)).abs() < 1e-15);
    }

    #[test]
    fn complex_dilatations_are_automorphisms() {
        let g = ComplexHeisenbergModel::new();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let a = g.random_element(&mut rng);
            let b = g.random_element(&mut rng);
            let eps = ComplexScale::new(Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).unwrap();
            let lhs = g.scale_element(&eps, &g.product(&a, &b)).unwrap();
            let rhs = g.product(&g.scale_element(&eps, &a).unwrap(), &g.scale_element(&eps, &b).unwrap());
            for (x, y) in lhs.to_flat().iter().zip(rhs.to_flat()) {
                assert!((x - y).abs() < 1e-12);
            }
            let ratio = g.norm(&g.scale_element(&eps, &a).unwrap()) / g.norm(&a);
            assert!((ratio - eps.nu()).abs() < 1e-12);
        }
    }

    #[test]
    fn minus_one_rotates_the_plane() {
        let g = ComplexHeisenbergModel::new();
        let m = ComplexScale::real(-1.0).unwrap();
        assert_eq!(g.scale_element(&m, &g.point(1.0, 2.0, 3.0)).unwrap(), g.point(-1.0, -2.0, 3.0));
    }
}
