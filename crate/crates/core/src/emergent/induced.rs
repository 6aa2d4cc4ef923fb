use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::scale::Scale;
use crate::structure::{approx_sum, rescaled_distance, DilatationStructure, DomainConstants};

/// The structure seen at a fixed scale μ around x: distance (δ^x, μ) and
/// dilatations δ̂^{x,u}_{μ,ε} v = δ^x_{μ⁻¹} δ^{δ^x_μ u}_ε δ^x_μ v.
pub struct InducedStructure<'a, S: DilatationStructure> {
    base: &'a S,
    x: S::Point,
    mu: S::Scale,
}

/// Builds the induced structure; needs ν(μ) ∈ (0, 1).
pub fn induced_structure<'a, S: DilatationStructure>(
    s: &'a S,
    x: S::Point,
    mu: S::Scale,
) -> Result<InducedStructure<'a, S>> {
    let nu = mu.nu();
    if !(nu > 0.0 && nu < 1.0) {
        return Err(LabError::InvalidArgument(format!("induced structure needs ν(μ) in (0,1), got {nu}")));
    }
    Ok(InducedStructure { base: s, x, mu })
}

impl<'a, S: DilatationStructure> InducedStructure<'a, S> {
    pub fn base_point(&self) -> &S::Point {
        &self.x
    }

    pub fn mu(&self) -> &S::Scale {
        &self.mu
    }

    /// |(δ^x,μ)(Σ^x_μ(u,v), Σ^x_μ(u,w)) − (δ^{δ^x_μ u},μ)(v,w)|: Σ^x_μ(u,·) is
    /// an isometry between the two rescaled distances.
    pub fn isometry_defect(&self, u: &S::Point, v: &S::Point, w: &S::Point) -> Result<f64> {
        let s = self.base;
        let sv = approx_sum(s, &self.x, &self.mu, u, v)?;
        let sw = approx_sum(s, &self.x, &self.mu, u, w)?;
        let lhs = rescaled_distance(s, &self.x, &self.mu, &sv, &sw)?;
        let shifted = s.dilate(&self.x, &self.mu, u)?;
        let rhs = rescaled_distance(s, &shifted, &self.mu, v, w)?;
        Ok((lhs - rhs).abs())
    }

    /// d(Σ^x_μ(u, δ^x_μ u), u).
    pub fn shifted_neutral_defect(&self, u: &S::Point) -> Result<f64> {
        let s = self.base;
        let du = s.dilate(&self.x, &self.mu, u)?;
        Ok(s.distance(&approx_sum(s, &self.x, &self.mu, u, &du)?, u))
    }
}

impl<'a, S: DilatationStructure> DilatationStructure for InducedStructure<'a, S> {
    type Point = S::Point;
    type Scale = S::Scale;

    fn name(&self) -> String {
        format!("induced({},mu={})", self.base.name(), self.mu.label())
    }

    fn distance(&self, a: &S::Point, b: &S::Point) -> f64 {
        rescaled_distance(self.base, &self.x, &self.mu, a, b).unwrap_or(f64::INFINITY)
    }

    fn dilate(&self, u: &S::Point, eps: &S::Scale, v: &S::Point) -> Result<S::Point> {
        let s = self.base;
        let mu_u = s.dilate(&self.x, &self.mu, u)?;
        let mu_v = s.dilate(&self.x, &self.mu, v)?;
        let moved = s.dilate(&mu_u, eps, &mu_v)?;
        s.dilate(&self.x, &self.mu.inv(), &moved)
    }

    fn domain(&self) -> DomainConstants {
        self.base.domain()
    }

    fn sample_point(&self, center: &S::Point, radius: f64, rng: &mut ChaCha8Rng) -> S::Point {
        self.base.sample_point(center, radius, rng)
    }

    fn lattice_points(&self, center: &S::Point, radius: f64) -> Vec<S::Point> {
        self.base.lattice_points(center, radius)
    }
}
