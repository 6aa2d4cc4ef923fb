use crate::error::{LabError, Result};
use crate::models::{ConicalGroup, HeisenbergModel, HeisenbergPoint};
use crate::scale::Scale;

/// A truncated infinite product together with its tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated<E> {
    pub value: E,
    /// Upper bound on the distance from `value` to the full product.
    pub bound: f64,
    pub order: usize,
}

/// h_ε(x) = x δ_ε(x⁻¹) = δ^x_ε e.
pub fn h_map<G: ConicalGroup>(g: &G, eps: &G::Scale, x: &G::Element) -> Result<G::Element> {
    Ok(g.product(x, &g.scale_element(eps, &g.inverse(x))?))
}

/// g_ε(y) = y δ_ε(y) δ_{ε²}(y) ⋯ δ_{ε^N}(y), the inverse of h_ε up to a
/// tail of size at most ν(ε)^{N+1} ‖y‖ / (1 − ν(ε)).
pub fn g_map<G: ConicalGroup>(g: &G, eps: &G::Scale, y: &G::Element, order: usize) -> Result<Truncated<G::Element>> {
    let nu = eps.nu();
    if !(nu > 0.0 && nu < 1.0) {
        return Err(LabError::InvalidArgument(format!("g_eps needs ν(ε) in (0,1), got {nu}")));
    }
    if order == 0 {
        return Err(LabError::InvalidArgument("g_eps needs truncation order N >= 1".into()));
    }
    let mut value = y.clone();
    let mut power = eps.clone();
    for _ in 1..=order {
        value = g.product(&value, &g.scale_element(&power, y)?);
        power = power.mul(eps);
    }
    let bound = nu.powi(order as i32 + 1) / (1.0 - nu) * g.norm(y);
    Ok(Truncated { value, bound, order })
}

/// w(x, y, ε, μ) = g_{εμ}(h_ε(x) h_μ(δ_ε y)), the centre of δ^x_ε δ^y_μ.
pub fn ratio_point<G: ConicalGroup>(
    g: &G,
    x: &G::Element,
    y: &G::Element,
    eps: &G::Scale,
    mu: &G::Scale,
    order: usize,
) -> Result<Truncated<G::Element>> {
    for sc in [eps, mu] {
        if !(sc.nu() > 0.0 && sc.nu() < 1.0) {
            return Err(LabError::InvalidArgument(format!("ratio point needs ν in (0,1), got {}", sc.nu())));
        }
    }
    let a = g.product(&h_map(g, eps, x)?, &h_map(g, mu, &g.scale_element(eps, y)?)?);
    g_map(g, &eps.mul(mu), &a, order)
}

/// The closed form of w(X, Y, ε, μ) in H(n):
/// z = (1−ε)/(1−εμ) x + ε(1−μ)/(1−εμ) y and
/// z̄ = [(1−ε²) x̄ + ε²(1−μ²) ȳ + ε(1−ε)(1−μ)/2 · ω(x, y)] / (1 − ε²μ²).
pub fn heisenberg_ratio_closed_form(
    h: &HeisenbergModel,
    x: &HeisenbergPoint,
    y: &HeisenbergPoint,
    eps: f64,
    mu: f64,
) -> Result<HeisenbergPoint> {
    if eps * mu == 1.0 {
        return Err(LabError::InvalidArgument("closed form needs εμ ≠ 1".into()));
    }
    let (e, m) = (crate::Dd::from(eps), crate::Dd::from(mu));
    let one = crate::Dd::ONE;
    let em = e * m;
    let a = (one - e) / (one - em);
    let b = e * (one - m) / (one - em);
    let horizontal = x.horizontal.iter().zip(&y.horizontal).map(|(p, q)| a * *p + b * *q).collect();
    let denom = one - em.square();
    let omega = h.omega(&x.horizontal, &y.horizontal);
    let vertical = ((one - e.square()) * x.vertical
        + e.square() * (one - m.square()) * y.vertical
        + e * (one - e) * (one - m) * 0.5 * omega)
        / denom;
    Ok(HeisenbergPoint::new(horizontal, vertical))
}
