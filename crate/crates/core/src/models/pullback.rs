//! Dilatation structures transported through charts.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{random_cube, unit_vector, ConicalGroup, EuclideanModel};
use crate::error::{domain, Result};
use crate::scale::PositiveReal;
use crate::structure::{DilatationStructure, DomainConstants};

/// φ(t) = t + t³.
pub fn cubic(t: f64) -> f64 {
    t + t * t * t
}

/// The real root of t + t³ = s.
///
/// Newton's method from s (when |s| < 1) or from ∛s; both starts lie on the
/// convex side of the root, so the iteration decreases monotonically in |t|.
pub fn cubic_inverse(s: f64) -> f64 {
    if s == 0.0 || !s.is_finite() {
        return s;
    }
    let mut t = if s.abs() < 1.0 { s } else { s.cbrt() };
    for _ in 0..100 {
        let step = (cubic(t) - s) / (1.0 + 3.0 * t * t);
        let next = t - step;
        if next.abs() >= t.abs() {
            break;
        }
        t = next;
    }
    t
}

/// How the chart is attached to base points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartFamily {
    /// One chart for the whole space: δ̃^x_ε y = φ⁻¹(δ^{φx}_ε φy) and
    /// d̃(x, y) = d(φx, φy). An isometric copy of the base, hence linear.
    CubicFixed,
    /// A chart centred at each base point:
    /// δ̃^x_ε y = x + φ⁻¹(ε φ(y − x)), with the Euclidean distance of the
    /// carrier. Nonlinear at every finite scale.
    #[default]
    #[serde(alias = "cubic")]
    CubicCentered,
}

/// ℝⁿ with dilatations pulled back through φ(t) = t + t³ applied componentwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PullbackModel {
    base: EuclideanModel,
    chart: ChartFamily,
    chart_radius: f64,
}

impl PullbackModel {
    pub fn new(base: EuclideanModel, chart: ChartFamily) -> Self {
        Self { base, chart, chart_radius: 4.0 }
    }

    pub fn base(&self) -> &EuclideanModel {
        &self.base
    }

    pub fn chart(&self) -> ChartFamily {
        self.chart
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Ball on which the chart is used (bi-Lipschitz there).
    pub fn chart_radius(&self) -> f64 {
        self.chart_radius
    }

    pub fn phi(&self, v: &[f64]) -> Vec<f64> {
        v.iter().copied().map(cubic).collect()
    }

    pub fn phi_inverse(&self, v: &[f64]) -> Vec<f64> {
        v.iter().copied().map(cubic_inverse).collect()
    }

    fn in_chart(&self, v: &[f64]) -> Result<()> {
        let r = self.base.norm_f64(v);
        if r <= self.chart_radius {
            Ok(())
        } else {
            Err(domain(format!("point at radius {r} is outside the chart ball of radius {}", self.chart_radius)))
        }
    }

    /// d^x(u, v) = |φ(u − x) − φ(v − x)| for the centred chart; the fixed
    /// chart is conical and d^x = d̃.
    pub fn tangent_distance(&self, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
        match self.chart {
            ChartFamily::CubicCentered => {
                let a = self.phi(&sub(u, x));
                let b = self.phi(&sub(v, x));
                self.base.norm_f64(&sub(&a, &b))
            }
            ChartFamily::CubicFixed => self.distance(&u.to_vec(), &v.to_vec()),
        }
    }

    /// Σ^x(u, v) = x + φ⁻¹(φ(u − x) + φ(v − x)) for the centred chart.
    fn centered_sum(&self, x: &[f64], u: &[f64], v: &[f64]) -> Vec<f64> {
        let a = self.phi(&sub(u, x));
        let b = self.phi(&sub(v, x));
        add(x, &self.phi_inverse(&add(&a, &b)))
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

impl DilatationStructure for PullbackModel {
    type Point = Vec<f64>;
    type Scale = PositiveReal;

    fn name(&self) -> String {
        let chart = match self.chart {
            ChartFamily::CubicFixed => "cubic_fixed",
            ChartFamily::CubicCentered => "cubic",
        };
        format!("pullback({},{chart})", self.base.group_name())
    }

    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        match self.chart {
            ChartFamily::CubicCentered => self.base.norm_f64(&sub(a, b)),
            ChartFamily::CubicFixed => self.base.norm_f64(&sub(&self.phi(a), &self.phi(b))),
        }
    }

    fn dilate(&self, x: &Vec<f64>, eps: &PositiveReal, y: &Vec<f64>) -> Result<Vec<f64>> {
        match self.chart {
            ChartFamily::CubicCentered => {
                let rel = sub(y, x);
                self.in_chart(&rel)?;
                let e = eps.value();
                let image: Vec<f64> = self.phi(&rel).iter().map(|t| e * t).collect();
                let out = self.phi_inverse(&image);
                self.in_chart(&out)?;
                Ok(add(x, &out))
            }
            ChartFamily::CubicFixed => {
                self.in_chart(x)?;
                self.in_chart(y)?;
                let e = eps.value();
                let (px, py) = (self.phi(x), self.phi(y));
                let image: Vec<f64> = px.iter().zip(&py).map(|(a, b)| a + e * (b - a)).collect();
                let out = self.phi_inverse(&image);
                self.in_chart(&out)?;
                Ok(out)
            }
        }
    }

    fn domain(&self) -> DomainConstants {
        DomainConstants::global()
    }

    fn sample_point(&self, center: &Vec<f64>, radius: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let dir = random_cube(self.dim(), rng);
        let n = self.base.norm_f64(&dir).max(f64::MIN_POSITIVE);
        let r = radius * rng.gen_range(0.0..=1.0);
        match self.chart {
            ChartFamily::CubicCentered => center.iter().zip(&dir).map(|(c, d)| c + r * d / n).collect(),
            ChartFamily::CubicFixed => {
                // move by r in the chart, which is a step of d̃-length r
                let image: Vec<f64> = self.phi(center).iter().zip(&dir).map(|(c, d)| c + r * d / n).collect();
                self.phi_inverse(&image)
            }
        }
    }

    fn lattice_points(&self, center: &Vec<f64>, radius: f64) -> Vec<Vec<f64>> {
        let mut out = vec![center.clone()];
        for i in 0..self.dim() {
            for s in [0.5 * radius, -0.5 * radius] {
                let step: Vec<f64> = unit_vector(self.dim(), i).iter().map(|e| s * e).collect();
                match self.chart {
                    ChartFamily::CubicCentered => out.push(add(center, &step)),
                    ChartFamily::CubicFixed => out.push(self.phi_inverse(&add(&self.phi(center), &step))),
                }
            }
        }
        out
    }

    fn tangent_sum(&self, x: &Vec<f64>, u: &Vec<f64>, v: &Vec<f64>) -> Option<Vec<f64>> {
        match self.chart {
            ChartFamily::CubicCentered => Some(self.centered_sum(x, u, v)),
            ChartFamily::CubicFixed => {
                let (px, pu, pv) = (self.phi(x), self.phi(u), self.phi(v));
                Some(self.phi_inverse(&add(&sub(&pu, &px), &pv)))
            }
        }
    }

    fn tangent_difference(&self, x: &Vec<f64>, u: &Vec<f64>, v: &Vec<f64>) -> Option<Vec<f64>> {
        match self.chart {
            ChartFamily::CubicCentered => {
                let a = self.phi(&sub(u, x));
                let b = self.phi(&sub(v, x));
                Some(add(x, &self.phi_inverse(&sub(&b, &a))))
            }
            ChartFamily::CubicFixed => {
                let (px, pu, pv) = (self.phi(x), self.phi(u), self.phi(v));
                Some(self.phi_inverse(&add(&sub(&px, &pu), &pv)))
            }
        }
    }

    fn tangent_inverse(&self, x: &Vec<f64>, u: &Vec<f64>) -> Option<Vec<f64>> {
        self.tangent_difference(x, u, x)
    }
}
