//! The dilatation-structure abstraction and the operator calculus built on it.
//!
//! Every composite here is a literal composition of `dilate` calls, so the
//! identities that follow from axiom A1 hold up to rounding for any model.

use std::fmt::Debug;

use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::report::{non_increasing, ConvergenceReport, JITTER_FACTOR};
use crate::scale::{EpsGrid, Scale};

/// Radii that bound where dilatations are defined (Axiom 0) and how close
/// points must be for the approximate operations to make sense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainConstants {
    /// `A > 1`: the closed ball B̄(x, A) lies in the domain U(x).
    pub a: f64,
    /// `B > A`: expanding dilatations land in B(x, B).
    pub b: f64,
    /// Radius under which points count as "sufficiently close".
    pub closeness_budget: f64,
}

impl DomainConstants {
    pub fn new(a: f64, b: f64, closeness_budget: f64) -> Result<Self> {
        if !(a > 1.0 && b > a && closeness_budget > 0.0) {
            return Err(LabError::Model(format!(
                "domain constants need 1 < A < B and a positive budget, got A={a}, B={b}, budget={closeness_budget}"
            )));
        }
        Ok(Self { a, b, closeness_budget })
    }

    /// A = 2, B = 4, budget 0.1·A; used by every globally defined model.
    pub const fn global() -> Self {
        Self { a: 2.0, b: 4.0, closeness_budget: 0.2 }
    }
}

impl Default for DomainConstants {
    fn default() -> Self {
        Self::global()
    }
}

/// A metric space with a field of dilatations δ^x_ε indexed by a scale group.
pub trait DilatationStructure: Sync {
    type Point: Clone + Debug + Send + Sync;
    type Scale: Scale;

    fn name(&self) -> String;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// δ^x_ε y.
    fn dilate(&self, x: &Self::Point, eps: &Self::Scale, y: &Self::Point) -> Result<Self::Point>;

    fn domain(&self) -> DomainConstants {
        DomainConstants::global()
    }

    /// A point at distance at most `radius` from `center`, drawn from `rng`.
    fn sample_point(&self, center: &Self::Point, radius: f64, rng: &mut ChaCha8Rng) -> Self::Point;

    /// A fixed set of points at distance at most `radius` from `center`.
    fn lattice_points(&self, center: &Self::Point, radius: f64) -> Vec<Self::Point>;

    /// Exact Σ^x(u, v) when the model knows its tangent spaces in closed form.
    fn tangent_sum(&self, _x: &Self::Point, _u: &Self::Point, _v: &Self::Point) -> Option<Self::Point> {
        None
    }

    /// Exact Δ^x(u, v), see [`DilatationStructure::tangent_sum`].
    fn tangent_difference(&self, _x: &Self::Point, _u: &Self::Point, _v: &Self::Point) -> Option<Self::Point> {
        None
    }

    /// Exact inv^x(u), see [`DilatationStructure::tangent_sum`].
    fn tangent_inverse(&self, _x: &Self::Point, _u: &Self::Point) -> Option<Self::Point> {
        None
    }
}

fn require_contracting<S: Scale>(eps: &S) -> Result<()> {
    if eps.nu() <= 1.0 {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!("scale {} has valuation {} > 1", eps.label(), eps.nu())))
    }
}

/// Δ^x_ε(u, v) = δ^{δ^x_ε u}_{ε⁻¹} δ^x_ε v.
pub fn approx_difference<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    eps: &S::Scale,
    u: &S::Point,
    v: &S::Point,
) -> Result<S::Point> {
    require_contracting(eps)?;
    let base = s.dilate(x, eps, u)?;
    let moved = s.dilate(x, eps, v)?;
    s.dilate(&base, &eps.inv(), &moved)
}

/// Σ^x_ε(u, v) = δ^x_{ε⁻¹} δ^{δ^x_ε u}_ε v.
pub fn approx_sum<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    eps: &S::Scale,
    u: &S::Point,
    v: &S::Point,
) -> Result<S::Point> {
    require_contracting(eps)?;
    let base = s.dilate(x, eps, u)?;
    let moved = s.dilate(&base, eps, v)?;
    s.dilate(x, &eps.inv(), &moved)
}

/// inv^x_ε(u) = δ^{δ^x_ε u}_{ε⁻¹} x.
pub fn approx_inverse<S: DilatationStructure>(s: &S, x: &S::Point, eps: &S::Scale, u: &S::Point) -> Result<S::Point> {
    require_contracting(eps)?;
    let base = s.dilate(x, eps, u)?;
    s.dilate(&base, &eps.inv(), x)
}

/// (δ^x, μ)(u, v) = d(δ^x_μ u, δ^x_μ v) / ν(μ).
pub fn rescaled_distance<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    mu: &S::Scale,
    u: &S::Point,
    v: &S::Point,
) -> Result<f64> {
    let nu = mu.nu();
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(LabError::InvalidArgument(format!("rescaling needs ν(μ) in (0,1], got {nu}")));
    }
    let a = s.dilate(x, mu, u)?;
    let b = s.dilate(x, mu, v)?;
    Ok(s.distance(&a, &b) / nu)
}

/// The scale that takes the grid from its second-finest to its finest point;
/// each grid value is compared with its value one such step further.
pub(crate) fn refinement_step<S: Scale>(grid: &EpsGrid<S>) -> S {
    let scales = grid.scales();
    if scales.len() >= 2 {
        scales[scales.len() - 1].mul(&scales[scales.len() - 2].inv())
    } else {
        S::at_most(0.5)
    }
}

/// Estimates d^x(u, v) as the rescaled distance at the finest grid scale.
///
/// The report carries, per grid scale ε, the Cauchy gap between the rescaled
/// distance at ε and at the next refinement. The estimate is rejected when
/// those gaps grow along the grid.
pub fn estimate_dx<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    u: &S::Point,
    v: &S::Point,
    grid: &EpsGrid<S::Scale>,
) -> Result<(f64, ConvergenceReport)> {
    if grid.len() < 4 {
        return Err(LabError::InvalidArgument("estimate_dx needs at least 4 grid points".into()));
    }
    let step = refinement_step(grid);
    let mut values = Vec::with_capacity(grid.len());
    let mut gaps = Vec::with_capacity(grid.len());
    for eps in grid.scales() {
        let here = rescaled_distance(s, x, eps, u, v)?;
        let finer = rescaled_distance(s, x, &eps.mul(&step), u, v)?;
        values.push(here);
        gaps.push((here - finer).abs());
    }
    if !non_increasing(&gaps, JITTER_FACTOR) {
        return Err(LabError::NonConvergent(format!(
            "rescaled distances do not settle on {}: gaps {gaps:?}",
            s.name()
        )));
    }
    let estimate = *values.last().expect("grid is non-empty");
    let mut report = ConvergenceReport::new("dx", s.name(), grid.nus(), gaps);
    report.note(format!("estimate {estimate}"));
    report.tolerance = 0.0;
    report.verdict = crate::report::Verdict::Pass;
    Ok((estimate, report))
}
