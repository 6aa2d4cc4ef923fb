use super::menelaos::{menelaos_iterate, DEFAULT_MAX_ITER};
use crate::emergent::{tangent_limit, TangentOp};
use crate::error::{LabError, Result};
use crate::models::{DyadicBoundaryModel, DyadicPoint};
use crate::scale::{EpsGrid, Scale};
use crate::structure::DilatationStructure;

/// d(δ^x_ε y, δ^y_{1−ε} x), both scales taken as `Scale::from_nu`.
pub fn barycentric_defect<S: DilatationStructure>(s: &S, x: &S::Point, y: &S::Point, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LabError::InvalidArgument(format!("barycentric condition needs ε in (0,1), got {eps}")));
    }
    let e = S::Scale::from_nu(eps)?;
    let co = S::Scale::from_nu(1.0 - eps)?;
    Ok(s.distance(&s.dilate(x, &e, y)?, &s.dilate(y, &co, x)?))
}

/// The barycentric identity in ℤ₂ with λ = 2^p: the 2-adic distance between
/// x + λ(y − x) and y + (1 − λ)(x − y). Both sides are exact integers mod 2^K.
pub fn dyadic_barycentric_defect(m: &DyadicBoundaryModel, x: &DyadicPoint, y: &DyadicPoint, p: u32) -> Result<f64> {
    if p == 0 || p >= m.precision() {
        return Err(LabError::InvalidArgument(format!("need 0 < p < {}, got {p}", m.precision())));
    }
    let lambda = m.point(1u64 << p);
    let co = m.point(1u64.wrapping_sub(1u64 << p));
    let lhs = m.affine_combination(x, &lambda, y);
    let rhs = m.affine_combination(y, &co, x);
    m.try_distance(&lhs, &rhs)
}

/// d(inv^u(v), u) + d(u, δ^u_ε v) − d(inv^u(v), δ^u_ε v); zero when the
/// three points lie on a geodesic line.
pub fn collinearity_defect<S: DilatationStructure>(s: &S, u: &S::Point, v: &S::Point, eps: &S::Scale) -> Result<f64> {
    let inv = match s.tangent_inverse(u, v) {
        Some(p) => p,
        None => tangent_limit(s, u, v, v, TangentOp::Inverse, &EpsGrid::standard())?.0,
    };
    let dv = s.dilate(u, eps, v)?;
    Ok(s.distance(&inv, u) + s.distance(u, &dv) - s.distance(&inv, &dv))
}

/// Both sides of
/// d(x, w) ≤ ν(ε)/(1 − ν(εμ)) · d(x, δ^y_μ x) and
/// d(y, w) ≤ 1/(1 − ν(εμ)) · d(y, δ^x_ε y), w the Menelaos point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceEstimates {
    pub lhs_x: f64,
    pub rhs_x: f64,
    pub lhs_y: f64,
    pub rhs_y: f64,
    /// Both inequalities hold with slack factor 1 + 1e-9.
    pub holds: bool,
}

pub fn distance_estimates_check<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    y: &S::Point,
    eps: &S::Scale,
    mu: &S::Scale,
) -> Result<DistanceEstimates> {
    let w = menelaos_iterate(s, x, eps, y, mu, 1e-14, DEFAULT_MAX_ITER)?.w;
    let q = eps.mul(mu).nu();
    let lhs_x = s.distance(x, &w);
    let rhs_x = eps.nu() / (1.0 - q) * s.distance(x, &s.dilate(y, mu, x)?);
    let lhs_y = s.distance(y, &w);
    let rhs_y = 1.0 / (1.0 - q) * s.distance(y, &s.dilate(x, eps, y)?);
    let slack = 1.0 + 1e-9;
    let holds = lhs_x <= rhs_x * slack && lhs_y <= rhs_y * slack;
    Ok(DistanceEstimates { lhs_x, rhs_x, lhs_y, rhs_y, holds })
}
