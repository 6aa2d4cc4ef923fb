use num_complex::Complex64;

use crate::error::Result;
use crate::models::{ComplexHeisenbergModel, ComplexHeisenbergPoint, ConicalGroup};
use crate::report::ConvergenceReport;
use crate::scale::{ComplexScale, Scale};
use crate::structure::DilatationStructure;

/// Threshold above which the composite is declared not a left translation.
const SEPARATION: f64 = 1e-6;

/// max over the probes u of d(C(u), C(e)·u) with C = δ^X_ε δ^Y_μ: zero
/// exactly when C is the left translation by C(e) on the probes.
pub fn translation_defect(
    m: &ComplexHeisenbergModel,
    x: &ComplexHeisenbergPoint,
    eps: &ComplexScale,
    y: &ComplexHeisenbergPoint,
    mu: &ComplexScale,
    probes: &[ComplexHeisenbergPoint],
) -> Result<f64> {
    let c = |u: &ComplexHeisenbergPoint| m.dilate(x, eps, &m.dilate(y, mu, u)?);
    let ce = c(&m.identity())?;
    let mut worst: f64 = 0.0;
    for u in probes {
        worst = worst.max(m.distance(&c(u)?, &m.product(&ce, u)));
    }
    Ok(worst)
}

/// Smallest max-over-probes distance between C = δ^X_ε δ^Y_μ and a
/// dilatation δ^W_λ, over a finite grid of centres W (each coordinate in
/// [−2, 2] with step 1/4) and coefficients λ (moduli ½, 1, 2 and eight
/// arguments). Returns the defect with the best (W, λ).
pub fn dilatation_search(
    m: &ComplexHeisenbergModel,
    x: &ComplexHeisenbergPoint,
    eps: &ComplexScale,
    y: &ComplexHeisenbergPoint,
    mu: &ComplexScale,
    probes: &[ComplexHeisenbergPoint],
) -> Result<(f64, ComplexHeisenbergPoint, ComplexScale)> {
    let images = probes.iter().map(|u| m.dilate(x, eps, &m.dilate(y, mu, u)?)).collect::<Result<Vec<_>>>()?;
    let coords: Vec<f64> = (0..=16).map(|i| -2.0 + 0.25 * i as f64).collect();
    let mut lambdas = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        for k in 0..8 {
            // quarter turns exactly, so that δ_{±1} and δ_{±i} are on the grid
            let c = match k {
                0 => Complex64::new(r, 0.0),
                2 => Complex64::new(0.0, r),
                4 => Complex64::new(-r, 0.0),
                6 => Complex64::new(0.0, -r),
                _ => Complex64::from_polar(r, std::f64::consts::FRAC_PI_4 * k as f64),
            };
            lambdas.push(ComplexScale::new(c)?);
        }
    }
    let mut best = (f64::INFINITY, m.identity(), ComplexScale::one());
    for &a in &coords {
        for &b in &coords {
            for &t in &coords {
                let w = m.point(a, b, t);
                for lam in &lambdas {
                    let mut worst: f64 = 0.0;
                    for (u, img) in probes.iter().zip(&images) {
                        worst = worst.max(m.distance(&m.dilate(&w, lam, u)?, img));
                        if worst >= best.0 {
                            break;
                        }
                    }
                    if worst < best.0 {
                        best = (worst, w.clone(), *lam);
                    }
                }
            }
        }
    }
    Ok(best)
}

/// The composite δ^X_ε δ^Y_μ with X = e and εμ = −1 on ℂ × ℝ.
///
/// The single row is the translation defect; the report passes when it
/// exceeds 1e-6, i.e. when the composite is not a left translation. The
/// best match found by [`dilatation_search`] goes in the notes.
pub fn counterexample_check(
    m: &ComplexHeisenbergModel,
    eps: f64,
    y: &ComplexHeisenbergPoint,
    probes: &[ComplexHeisenbergPoint],
) -> Result<ConvergenceReport> {
    let e = ComplexScale::real(eps)?;
    let mu = ComplexScale::real(-1.0 / eps)?;
    let x = m.identity();
    let defect = translation_defect(m, &x, &e, y, &mu, probes)?;
    let (dil, w, lam) = dilatation_search(m, &x, &e, y, &mu, probes)?;
    let mut rep =
        ConvergenceReport::new("counterexample", m.name(), vec![e.nu()], vec![defect]).with_samples(probes.len(), 0);
    rep.note(format!("closest grid dilatation: centre {:?} coefficient {} defect {dil:e}", w.to_flat(), lam.label()));
    rep.tolerance = SEPARATION;
    rep.verdict = if defect > SEPARATION { crate::report::Verdict::Pass } else { crate::report::Verdict::Fail };
    if !rep.passed() {
        rep.note("composite agrees with a left translation on the probes");
    }
    Ok(rep)
}
