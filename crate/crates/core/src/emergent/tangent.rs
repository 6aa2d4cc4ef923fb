use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::report::{ConvergenceReport, Verdict, NOISE_FLOOR};
use crate::scale::{EpsGrid, Scale};
use crate::structure::{
    approx_difference, approx_inverse, approx_sum, estimate_dx, refinement_step, DilatationStructure,
};

/// Successive Cauchy gaps must shrink at least by this factor.
const SHRINK: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentOp {
    Sum,
    Difference,
    Inverse,
}

impl TangentOp {
    pub fn as_str(self) -> &'static str {
        match self {
            TangentOp::Sum => "sum",
            TangentOp::Difference => "difference",
            TangentOp::Inverse => "inverse",
        }
    }
}

fn approx<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    eps: &S::Scale,
    u: &S::Point,
    v: &S::Point,
    op: TangentOp,
) -> Result<S::Point> {
    match op {
        TangentOp::Sum => approx_sum(s, x, eps, u, v),
        TangentOp::Difference => approx_difference(s, x, eps, u, v),
        TangentOp::Inverse => approx_inverse(s, x, eps, u),
    }
}

fn exact<S: DilatationStructure>(s: &S, x: &S::Point, u: &S::Point, v: &S::Point, op: TangentOp) -> Option<S::Point> {
    match op {
        TangentOp::Sum => s.tangent_sum(x, u, v),
        TangentOp::Difference => s.tangent_difference(x, u, v),
        TangentOp::Inverse => s.tangent_inverse(x, u),
    }
}

/// Σ^x(u, v), Δ^x(u, v) or inv^x(u) (which ignores `v`).
///
/// When the model knows the operation in closed form that value is returned
/// and the report holds the distances of the finite-ε composites to it,
/// which must decrease. Otherwise the value at the finest scale is returned
/// after a Cauchy check: the gaps d(P(ε), P(ερ)) must shrink by a factor of
/// at least 1.3 per grid step until they reach the noise floor.
pub fn tangent_limit<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    u: &S::Point,
    v: &S::Point,
    op: TangentOp,
    grid: &EpsGrid<S::Scale>,
) -> Result<(S::Point, ConvergenceReport)> {
    let label = format!("tangent-{}", op.as_str());
    if let Some(limit) = exact(s, x, u, v, op) {
        let defect = grid
            .scales()
            .iter()
            .map(|eps| Ok(s.distance(&approx(s, x, eps, u, v, op)?, &limit)))
            .collect::<Result<Vec<f64>>>()?;
        let mut rep = ConvergenceReport::new(label, s.name(), grid.nus(), defect);
        rep.note("closed-form limit; defects are distances of the finite-scale composites to it");
        let rep = rep.judge_decreasing(1.0);
        return Ok((limit, rep));
    }
    let step = refinement_step(grid);
    let mut gaps = Vec::with_capacity(grid.len());
    let mut last = None;
    for eps in grid.scales() {
        let here = approx(s, x, eps, u, v, op)?;
        let finer = approx(s, x, &eps.mul(&step), u, v, op)?;
        gaps.push(s.distance(&here, &finer));
        last = Some(finer);
    }
    let shrinking = gaps.windows(2).all(|w| w[1] * SHRINK <= w[0] || w[1] <= NOISE_FLOOR);
    if !shrinking {
        return Err(LabError::NonConvergent(format!(
            "tangent {} on {}: Cauchy gaps {gaps:?} do not shrink by {SHRINK}",
            op.as_str(),
            s.name()
        )));
    }
    let mut rep = ConvergenceReport::new(label, s.name(), grid.nus(), gaps);
    rep.verdict = Verdict::Pass;
    rep.note("numeric limit at the finest scale");
    Ok((last.expect("grid is non-empty"), rep))
}

/// δ̄^{x,u}_ε y = Σ^x(u, δ^x_ε Δ^x(u, y)).
pub fn tangent_dilate<S: DilatationStructure>(
    t: &TangentSpace<'_, S>,
    u: &S::Point,
    eps: &S::Scale,
    y: &S::Point,
) -> Result<S::Point> {
    let diff = t.difference(u, y)?;
    let scaled = t.structure().dilate(t.base(), eps, &diff)?;
    t.sum(u, &scaled)
}

/// Residuals of the local group laws of Σ^x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupLawDefects {
    /// d(Σ^x(x, u), u)
    pub left_neutral: f64,
    /// d(Σ^x(u, x), u)
    pub right_neutral: f64,
    /// d(Σ^x(Σ^x(u, v), w), Σ^x(u, Σ^x(v, w)))
    pub associativity: f64,
    /// d(Σ^x(u, inv^x(u)), x)
    pub inverse: f64,
}

impl GroupLawDefects {
    pub fn max(&self) -> f64 {
        self.left_neutral.max(self.right_neutral).max(self.associativity).max(self.inverse)
    }
}

/// The tangent space at x: the operations Σ^x, Δ^x, inv^x, the tangent
/// dilatations and the tangent distance d^x.
pub struct TangentSpace<'a, S: DilatationStructure> {
    s: &'a S,
    x: S::Point,
    grid: EpsGrid<S::Scale>,
}

impl<'a, S: DilatationStructure> TangentSpace<'a, S> {
    pub fn new(s: &'a S, x: S::Point, grid: EpsGrid<S::Scale>) -> Self {
        Self { s, x, grid }
    }

    pub fn structure(&self) -> &'a S {
        self.s
    }

    pub fn base(&self) -> &S::Point {
        &self.x
    }

    pub fn sum(&self, u: &S::Point, v: &S::Point) -> Result<S::Point> {
        Ok(tangent_limit(self.s, &self.x, u, v, TangentOp::Sum, &self.grid)?.0)
    }

    pub fn difference(&self, u: &S::Point, v: &S::Point) -> Result<S::Point> {
        Ok(tangent_limit(self.s, &self.x, u, v, TangentOp::Difference, &self.grid)?.0)
    }

    pub fn inverse(&self, u: &S::Point) -> Result<S::Point> {
        Ok(tangent_limit(self.s, &self.x, u, u, TangentOp::Inverse, &self.grid)?.0)
    }

    pub fn dilate(&self, u: &S::Point, eps: &S::Scale, y: &S::Point) -> Result<S::Point> {
        tangent_dilate(self, u, eps, y)
    }

    /// d^x(u, v).
    pub fn distance(&self, u: &S::Point, v: &S::Point) -> Result<f64> {
        Ok(estimate_dx(self.s, &self.x, u, v, &self.grid)?.0)
    }

    pub fn group_laws(&self, u: &S::Point, v: &S::Point, w: &S::Point) -> Result<GroupLawDefects> {
        let d = |a: &S::Point, b: &S::Point| self.s.distance(a, b);
        let x = &self.x;
        let uv = self.sum(u, v)?;
        Ok(GroupLawDefects {
            left_neutral: d(&self.sum(x, u)?, u),
            right_neutral: d(&self.sum(u, x)?, u),
            associativity: d(&self.sum(&uv, w)?, &self.sum(u, &self.sum(v, w)?)?),
            inverse: d(&self.sum(u, &self.inverse(u)?)?, x),
        })
    }
}
