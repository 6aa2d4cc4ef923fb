use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{random_cube, unit_vector, ConicalGroup};
use crate::dd::{lift, lower, Dd};
use crate::error::{LabError, Result};
use crate::scale::PositiveReal;

/// A point (x, x̄) of H(n) = ℝ^{2n} × ℝ, in double-double coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergPoint {
    pub horizontal: Vec<Dd>,
    pub vertical: Dd,
}

impl HeisenbergPoint {
    pub fn new(horizontal: Vec<Dd>, vertical: Dd) -> Self {
        Self { horizontal, vertical }
    }

    /// Coordinates flattened as (x₁, …, x_{2n}, x̄).
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = lower(&self.horizontal);
        v.push(self.vertical.to_f64());
        v
    }

    /// Inverse of [`HeisenbergPoint::to_flat`]; needs an odd number of coordinates.
    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        if coords.len() < 3 || coords.len().is_multiple_of(2) {
            return Err(LabError::InvalidArgument(format!(
                "a point of H(n) has 2n+1 coordinates, got {}",
                coords.len()
            )));
        }
        let (h, t) = coords.split_at(coords.len() - 1);
        Ok(Self::new(lift(h), Dd::from(t[0])))
    }
}

/// The Heisenberg group H(n) with product
/// (x, x̄)(y, ȳ) = (x + y, x̄ + ȳ + ½ω(x, y)), dilatations
/// δ_ε(x, x̄) = (εx, ε²x̄) and the Cygan norm (|x|⁴ + 16x̄²)^{1/4}.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergModel {
    n: usize,
}

impl HeisenbergModel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LabError::Model("Heisenberg group needs n >= 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn point(&self, horizontal: &[f64], vertical: f64) -> HeisenbergPoint {
        assert_eq!(horizontal.len(), 2 * self.n, "horizontal part has 2n coordinates");
        HeisenbergPoint::new(lift(horizontal), Dd::from(vertical))
    }

    /// The standard symplectic form ω(x, y) = Σ xᵢ y_{n+i} − x_{n+i} yᵢ.
    pub fn omega(&self, x: &[Dd], y: &[Dd]) -> Dd {
        (0..self.n).map(|i| x[i] * y[self.n + i] - x[self.n + i] * y[i]).sum()
    }
}

impl ConicalGroup for HeisenbergModel {
    type Element = HeisenbergPoint;
    type Scale = PositiveReal;

    fn group_name(&self) -> String {
        format!("heisenberg(n={})", self.n)
    }

    fn identity(&self) -> HeisenbergPoint {
        HeisenbergPoint::new(vec![Dd::ZERO; 2 * self.n], Dd::ZERO)
    }

    fn product(&self, a: &HeisenbergPoint, b: &HeisenbergPoint) -> HeisenbergPoint {
        let horizontal = a.horizontal.iter().zip(&b.horizontal).map(|(p, q)| *p + *q).collect();
        let vertical = a.vertical + b.vertical + self.omega(&a.horizontal, &b.horizontal) * 0.5;
        HeisenbergPoint { horizontal, vertical }
    }

    fn inverse(&self, a: &HeisenbergPoint) -> HeisenbergPoint {
        HeisenbergPoint { horizontal: a.horizontal.iter().map(|x| -*x).collect(), vertical: -a.vertical }
    }

    fn scale_element(&self, eps: &PositiveReal, a: &HeisenbergPoint) -> Result<HeisenbergPoint> {
        let e = eps.exact();
        Ok(HeisenbergPoint { horizontal: a.horizontal.iter().map(|x| e * *x).collect(), vertical: e * e * a.vertical })
    }

    fn norm(&self, a: &HeisenbergPoint) -> f64 {
        let r2: Dd = a.horizontal.iter().map(|x| x.square()).sum();
        (r2.square() + a.vertical.square() * 16.0).to_f64().sqrt().sqrt()
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> HeisenbergPoint {
        HeisenbergPoint {
            horizontal: lift(&random_cube(2 * self.n, rng)),
            vertical: Dd::from(rng.gen_range(-1.0..1.0)),
        }
    }

    fn basis_elements(&self) -> Vec<HeisenbergPoint> {
        let mut out: Vec<_> =
            (0..2 * self.n).map(|i| HeisenbergPoint::new(lift(&unit_vector(2 * self.n, i)), Dd::ZERO)).collect();
        out.push(HeisenbergPoint::new(vec![Dd::ZERO; 2 * self.n], Dd::ONE));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{based_inverse, based_sum, left_translation};
    use crate::structure::DilatationStructure;
    use rand::SeedableRng;

    fn h1() -> HeisenbergModel {
        HeisenbergModel::new(1).unwrap()
    }

    #[test]
    fn product_of_generators() {
        let g = h1();
        let p = g.product(&g.point(&[1.0, 0.0], 0.0), &g.point(&[0.0, 1.0], 0.0));
        assert_eq!(p, g.point(&[1.0, 1.0], 0.5));
        let a = g.point(&[0.3, -2.0], 1.5);
        assert_eq!(g.product(&a, &g.identity()), a);
    }

    #[test]
    fn dilate_based_off_identity() {
        // x·δ_½(x⁻¹u) with x⁻¹u = (0, 1, −½) gives (1, 0.5, 0.125).
        let g = h1();
        let x = g.point(&[1.0, 0.0], 0.0);
        let u = g.point(&[1.0, 1.0], 0.0);
        let rel = g.product(&g.inverse(&x), &u);
        assert_eq!(rel, g.point(&[0.0, 1.0], -0.5));
        let got = g.dilate(&x, &PositiveReal::new(0.5).unwrap(), &u).unwrap();
        assert_eq!(got, g.point(&[1.0, 0.5], 0.125));
    }

    #[test]
    fn cygan_norm_is_homogeneous() {
        let g = h1();
        let v = g.point(&[0.0, 0.0], 1.0);
        assert_eq!(g.norm(&v), 2.0);
        let half = g.scale_element(&PositiveReal::new(0.5).unwrap(), &v).unwrap();
        assert_eq!(half, g.point(&[0.0, 0.0], 0.25));
        assert_eq!(g.norm(&half), 1.0);
        assert_eq!(g.norm(&g.identity()), 0.0);
    }

    #[test]
    fn left_translations_are_isometries() {
        let g = h1();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let w = g.random_element(&mut rng);
            let a = g.random_element(&mut rng);
            let b = g.random_element(&mut rng);
            let l = left_translation(&g, &w);
            assert!((g.distance(&l(&a), &l(&b)) - g.distance(&a, &b)).abs() < 1e-12);
        }
        let e = g.identity();
        let a = g.point(&[0.2, 0.1], -0.4);
        assert_eq!(left_translation(&g, &e)(&a), a);
    }

    #[test]
    fn based_inverse_cancels_in_based_sum() {
        let g = h1();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let u = g.random_element(&mut rng);
            let x = g.random_element(&mut rng);
            let back = based_sum(&g, &u, &x, &based_inverse(&g, &u, &x));
            assert!(g.distance(&back, &u) < 1e-14, "{back:?} vs {u:?}");
        }
    }

    #[test]
    fn cygan_subadditive_on_samples() {
        let g = HeisenbergModel::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let a = g.random_element(&mut rng);
            let b = g.random_element(&mut rng);
            assert!(g.norm(&g.product(&a, &b)) <= g.norm(&a) + g.norm(&b) + 1e-12);
        }
    }
}
