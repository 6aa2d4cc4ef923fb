//! Concrete dilatation structures.
//!
//! Group models implement [`ConicalGroup`]; the induced field of dilatations
//! δ^x_ε u = x δ_ε(x⁻¹u) and the left-invariant distance d(a, b) = ‖a⁻¹b‖
//! turn every conical group into a [`DilatationStructure`] through a blanket
//! implementation. [`PullbackModel`] transports a structure through charts.

mod carnot;
mod complex_heisenberg;
mod dyadic;
mod euclidean;
mod heisenberg;
mod pullback;
pub mod spec;

pub use carnot::{CarnotGroup, CarnotSpec};
pub use complex_heisenberg::{ComplexHeisenbergModel, ComplexHeisenbergPoint};
pub use dyadic::{DyadicBoundaryModel, DyadicPoint, WFamily, WIsometry};
pub use euclidean::EuclideanModel;
pub use heisenberg::{HeisenbergModel, HeisenbergPoint};
pub use pullback::{cubic, cubic_inverse, ChartFamily, PullbackModel};

use std::fmt::Debug;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::scale::Scale;
use crate::structure::{DilatationStructure, DomainConstants};

/// A group with dilatations δ_ε based at the neutral element that are group
/// automorphisms and scale a homogeneous norm: ‖δ_ε a‖ = ν(ε)‖a‖.
pub trait ConicalGroup: Sync {
    type Element: Clone + Debug + Send + Sync;
    type Scale: Scale;

    fn group_name(&self) -> String;

    fn identity(&self) -> Self::Element;

    fn product(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;

    fn inverse(&self, a: &Self::Element) -> Self::Element;

    /// δ_ε based at the neutral element.
    fn scale_element(&self, eps: &Self::Scale, a: &Self::Element) -> Result<Self::Element>;

    fn norm(&self, a: &Self::Element) -> f64;

    /// A random element of roughly unit size.
    fn random_element(&self, rng: &mut ChaCha8Rng) -> Self::Element;

    /// Deterministic probe directions (a generating set is enough).
    fn basis_elements(&self) -> Vec<Self::Element>;

    fn domain_constants(&self) -> DomainConstants {
        DomainConstants::global()
    }

    /// A point of the closed ball B̄(center, radius).
    fn sample_in_ball(&self, center: &Self::Element, radius: f64, rng: &mut ChaCha8Rng) -> Self::Element {
        let a = self.random_element(rng);
        let n = self.norm(&a);
        if n == 0.0 {
            return center.clone();
        }
        let t: f64 = radius * rng.gen_range(f64::EPSILON..=1.0);
        let s = Self::Scale::at_most(t / n);
        match self.scale_element(&s, &a) {
            Ok(small) => self.product(center, &small),
            Err(_) => center.clone(),
        }
    }
}

/// δ^x_ε u = x δ_ε(x⁻¹ u).
pub fn conical_dilate<G: ConicalGroup>(g: &G, x: &G::Element, eps: &G::Scale, u: &G::Element) -> Result<G::Element> {
    let rel = g.product(&g.inverse(x), u);
    Ok(g.product(x, &g.scale_element(eps, &rel)?))
}

/// d(a, b) = ‖a⁻¹ b‖.
pub fn group_distance<G: ConicalGroup>(g: &G, a: &G::Element, b: &G::Element) -> f64 {
    g.norm(&g.product(&g.inverse(a), b))
}

/// The map v ↦ u·v. It is an isometry of the left-invariant distance.
pub fn left_translation<'a, G: ConicalGroup>(
    g: &'a G,
    u: &G::Element,
) -> impl Fn(&G::Element) -> G::Element + Sync + 'a {
    let u = u.clone();
    move |v| g.product(&u, v)
}

/// x +_u v = x · u⁻¹ · v, the sum based at u.
pub fn based_sum<G: ConicalGroup>(g: &G, base: &G::Element, x: &G::Element, v: &G::Element) -> G::Element {
    g.product(&g.product(x, &g.inverse(base)), v)
}

/// inv^u(x) = u · x⁻¹ · u.
pub fn based_inverse<G: ConicalGroup>(g: &G, base: &G::Element, x: &G::Element) -> G::Element {
    g.product(&g.product(base, &g.inverse(x)), base)
}

impl<G: ConicalGroup> DilatationStructure for G {
    type Point = G::Element;
    type Scale = G::Scale;

    fn name(&self) -> String {
        self.group_name()
    }

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        group_distance(self, a, b)
    }

    fn dilate(&self, x: &Self::Point, eps: &Self::Scale, y: &Self::Point) -> Result<Self::Point> {
        conical_dilate(self, x, eps, y)
    }

    fn domain(&self) -> DomainConstants {
        self.domain_constants()
    }

    fn sample_point(&self, center: &Self::Point, radius: f64, rng: &mut ChaCha8Rng) -> Self::Point {
        self.sample_in_ball(center, radius, rng)
    }

    fn lattice_points(&self, center: &Self::Point, radius: f64) -> Vec<Self::Point> {
        let mut out = vec![center.clone()];
        for b in self.basis_elements() {
            let n = self.norm(&b);
            if n == 0.0 {
                continue;
            }
            let s = Self::Scale::at_most(0.5 * radius / n);
            for dir in [b.clone(), self.inverse(&b)] {
                if let Ok(step) = self.scale_element(&s, &dir) {
                    out.push(self.product(center, &step));
                }
            }
        }
        out
    }

    fn tangent_sum(&self, x: &Self::Point, u: &Self::Point, v: &Self::Point) -> Option<Self::Point> {
        Some(based_sum(self, x, u, v))
    }

    fn tangent_difference(&self, x: &Self::Point, u: &Self::Point, v: &Self::Point) -> Option<Self::Point> {
        Some(self.product(&self.product(x, &self.inverse(u)), v))
    }

    fn tangent_inverse(&self, x: &Self::Point, u: &Self::Point) -> Option<Self::Point> {
        Some(based_inverse(self, x, u))
    }
}

/// Points of ℝⁿ drawn uniformly from the cube [-1, 1]ⁿ.
pub(crate) fn random_cube(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub(crate) fn unit_vector(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}
