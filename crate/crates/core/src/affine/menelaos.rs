use crate::error::{LabError, Result};
use crate::scale::Scale;
use crate::structure::DilatationStructure;

pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Consecutive non-contracting steps after which an iteration is abandoned.
const STALL_STEPS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct MenelaosResult<P> {
    /// The common limit w of x_n and y_n.
    pub w: P,
    pub iterations: usize,
    /// d(x_n, y_n) at the first n where it is at most the tolerance.
    pub residual: f64,
    /// Geometric mean of the per-step contraction ratios.
    pub rate: f64,
    /// d(x_{n+1}, y_{n+1}) / d(x_n, y_n) for every step taken.
    pub step_rates: Vec<f64>,
    /// max over the probes u ∈ {x, y, δ^x_ε y} of d(δ^x_ε δ^y_μ u, δ^w_{εμ} u).
    pub probe_defect: f64,
}

/// The fixed point w with δ^x_ε δ^y_μ = δ^w_{εμ}, by the coupled iteration
/// x_{n+1} = δ^{δ^{x_n}_ε y_n}_μ x_n, y_{n+1} = δ^{x_n}_ε y_n.
pub fn menelaos_iterate<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    eps: &S::Scale,
    y: &S::Point,
    mu: &S::Scale,
    tol: f64,
    max_iter: usize,
) -> Result<MenelaosResult<S::Point>> {
    for (name, sc) in [("eps", eps), ("mu", mu)] {
        let nu = sc.nu();
        if !(nu > 0.0 && nu < 1.0) {
            return Err(LabError::InvalidArgument(format!("menelaos needs ν({name}) in (0,1), got {nu}")));
        }
    }
    let (mut xn, mut yn) = (x.clone(), y.clone());
    let mut d = s.distance(&xn, &yn);
    let d0 = d;
    let mut step_rates = Vec::new();
    let mut stalled = 0;
    let mut n = 0;
    while d > tol {
        if n == max_iter {
            return Err(LabError::MaxIterExceeded { max_iter, last_gap: d });
        }
        let y_next = s.dilate(&xn, eps, &yn)?;
        let x_next = s.dilate(&y_next, mu, &xn)?;
        let d_next = s.distance(&x_next, &y_next);
        let rate = d_next / d;
        step_rates.push(rate);
        stalled = if rate >= 1.0 { stalled + 1 } else { 0 };
        if stalled >= STALL_STEPS {
            return Err(LabError::MaxIterExceeded { max_iter: n + 1, last_gap: d_next });
        }
        (xn, yn, d) = (x_next, y_next, d_next);
        n += 1;
    }
    // The metric can be far coarser than the coordinates (a Cygan distance δ
    // allows coordinate errors near δ only horizontally), so run as many
    // steps again without bookkeeping; the common limit is unchanged.
    for _ in 0..n {
        let y_next = s.dilate(&xn, eps, &yn)?;
        let x_next = s.dilate(&y_next, mu, &xn)?;
        (xn, yn) = (x_next, y_next);
    }
    let rate = if n == 0 || d == 0.0 || d0 == 0.0 {
        step_rates.iter().copied().rfind(|r| *r > 0.0).unwrap_or(0.0)
    } else {
        (d / d0).powf(1.0 / n as f64)
    };
    let em = eps.mul(mu);
    let mut probe_defect: f64 = 0.0;
    for u in [x.clone(), y.clone(), s.dilate(x, eps, y)?] {
        let lhs = s.dilate(x, eps, &s.dilate(y, mu, &u)?)?;
        let rhs = s.dilate(&xn, &em, &u)?;
        probe_defect = probe_defect.max(s.distance(&lhs, &rhs));
    }
    Ok(MenelaosResult { w: xn, iterations: n, residual: d, rate, step_rates, probe_defect })
}

/// Fixed point of u ↦ δ^x_ε δ^y_μ u, a contraction of factor ν(εμ), iterated
/// from u0 until the a posteriori error bound drops below `tol` and then for
/// as many steps again.
pub fn banach_oracle<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    eps: &S::Scale,
    y: &S::Point,
    mu: &S::Scale,
    u0: &S::Point,
    tol: f64,
) -> Result<S::Point> {
    let q = eps.mul(mu).nu();
    if !(q < 1.0) {
        return Err(LabError::InvalidArgument(format!("banach oracle needs ν(εμ) < 1, got {q}")));
    }
    let map = |u: &S::Point| -> Result<S::Point> { s.dilate(x, eps, &s.dilate(y, mu, u)?) };
    let mut u = u0.clone();
    for n in 0..DEFAULT_MAX_ITER {
        let next = map(&u)?;
        let step = s.distance(&u, &next);
        if step == 0.0 {
            return Ok(u);
        }
        u = next;
        if step <= tol * (1.0 - q) {
            for _ in 0..=n {
                u = map(&u)?;
            }
            return Ok(u);
        }
    }
    Err(LabError::MaxIterExceeded { max_iter: DEFAULT_MAX_ITER, last_gap: f64::NAN })
}
