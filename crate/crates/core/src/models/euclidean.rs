use rand_chacha::ChaCha8Rng;

use super::{random_cube, unit_vector, ConicalGroup};
use crate::dd::{lift, Dd};
use crate::error::{LabError, Result};
use crate::scale::PositiveReal;

/// ℝⁿ with δ^x_ε y = x + ε(y − x) and the ℓ^p distance, in double-double
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanModel {
    dim: usize,
    exponent: f64,
}

impl EuclideanModel {
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_exponent(dim, 2.0)
    }

    pub fn with_exponent(dim: usize, exponent: f64) -> Result<Self> {
        if dim == 0 {
            return Err(LabError::Model("euclidean dimension must be positive".into()));
        }
        if !(exponent >= 1.0) {
            return Err(LabError::Model(format!("norm exponent must be at least 1, got {exponent}")));
        }
        Ok(Self { dim, exponent })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn origin(&self) -> Vec<Dd> {
        vec![Dd::ZERO; self.dim]
    }

    pub fn point(&self, coords: &[f64]) -> Vec<Dd> {
        assert_eq!(coords.len(), self.dim, "expected {} coordinates", self.dim);
        lift(coords)
    }

    /// The ℓ^p norm of a binary64 vector.
    pub fn norm_f64(&self, a: &[f64]) -> f64 {
        if self.exponent == 2.0 {
            a.iter().map(|x| x * x).sum::<f64>().sqrt()
        } else if self.exponent.is_infinite() {
            a.iter().fold(0.0, |m, x| m.max(x.abs()))
        } else {
            a.iter().map(|x| x.abs().powf(self.exponent)).sum::<f64>().powf(1.0 / self.exponent)
        }
    }
}

impl ConicalGroup for EuclideanModel {
    type Element = Vec<Dd>;
    type Scale = PositiveReal;

    fn group_name(&self) -> String {
        if self.exponent == 2.0 {
            format!("euclidean(n={})", self.dim)
        } else {
            format!("euclidean(n={},p={})", self.dim, self.exponent)
        }
    }

    fn identity(&self) -> Vec<Dd> {
        self.origin()
    }

    fn product(&self, a: &Vec<Dd>, b: &Vec<Dd>) -> Vec<Dd> {
        a.iter().zip(b).map(|(x, y)| *x + *y).collect()
    }

    fn inverse(&self, a: &Vec<Dd>) -> Vec<Dd> {
        a.iter().map(|x| -*x).collect()
    }

    fn scale_element(&self, eps: &PositiveReal, a: &Vec<Dd>) -> Result<Vec<Dd>> {
        let e = eps.exact();
        Ok(a.iter().map(|x| e * *x).collect())
    }

    fn norm(&self, a: &Vec<Dd>) -> f64 {
        if self.exponent == 2.0 {
            a.iter().map(|x| x.square()).sum::<Dd>().to_f64().sqrt()
        } else {
            let lowered: Vec<f64> = a.iter().map(|x| x.to_f64()).collect();
            self.norm_f64(&lowered)
        }
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> Vec<Dd> {
        lift(&random_cube(self.dim, rng))
    }

    fn basis_elements(&self) -> Vec<Vec<Dd>> {
        (0..self.dim).map(|i| lift(&unit_vector(self.dim, i))).collect()
    }
}
