use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::report::ConvergenceReport;
use crate::scale::{EpsGrid, Scale};
use crate::structure::{approx_difference, rescaled_distance, DilatationStructure};

/// Raw Lin values at or below this count as an exactly linear structure.
const LINEAR_FLOOR: f64 = 1e-9;

/// Lin(x, y, z; ε, μ) = d(δ^x_ε δ^y_μ z, δ^{δ^x_ε y}_μ δ^x_ε z).
pub fn lin_defect<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
    eps: &S::Scale,
    mu: &S::Scale,
) -> Result<f64> {
    let lhs = s.dilate(x, eps, &s.dilate(y, mu, z)?)?;
    let moved = s.dilate(x, eps, y)?;
    let rhs = s.dilate(&moved, mu, &s.dilate(x, eps, z)?)?;
    Ok(s.distance(&lhs, &rhs))
}

fn judge_lin(mut rep: ConvergenceReport, raw: &[f64]) -> ConvergenceReport {
    let worst = raw.iter().copied().fold(0.0, f64::max);
    rep.note(format!("max raw Lin {worst:e}"));
    if worst <= LINEAR_FLOOR {
        rep.note("linear: every raw Lin is at rounding level");
        let mut rep = rep.judge_max(f64::INFINITY);
        rep.tolerance = LINEAR_FLOOR;
        rep
    } else {
        rep.judge_decreasing(0.1)
    }
}

/// (1/ν(ε)²)·Lin(x, δ^x_ε y, z; ε, ε) over the grid.
///
/// Passes when every raw Lin is at rounding level, or when the rescaled
/// values decrease strictly and end below a tenth of the first.
pub fn inflin_scan<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
    grid: &EpsGrid<S::Scale>,
) -> Result<ConvergenceReport> {
    let mut raw = Vec::with_capacity(grid.len());
    let mut scaled = Vec::with_capacity(grid.len());
    for eps in grid.scales() {
        let ye = s.dilate(x, eps, y)?;
        let lin = lin_defect(s, x, &ye, z, eps, eps)?;
        let nu = eps.nu();
        raw.push(lin);
        scaled.push(lin / (nu * nu));
    }
    let rep = ConvergenceReport::new("inflin", s.name(), grid.nus(), scaled);
    Ok(judge_lin(rep, &raw))
}

/// (1/ν(ε))·(δ^x,ε)(δ^{y_ε}_ε v, δ̂^{x,y_ε}_ε v) with y_ε = δ^x_ε y, where
/// δ̂^{x,u}_ε v = δ^x_{ε⁻¹} δ^{δ^x_ε u}_ε δ^x_ε v.
pub fn plin1_scan<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    y: &S::Point,
    v: &S::Point,
    grid: &EpsGrid<S::Scale>,
) -> Result<ConvergenceReport> {
    let mut raw = Vec::with_capacity(grid.len());
    let mut scaled = Vec::with_capacity(grid.len());
    for eps in grid.scales() {
        let ye = s.dilate(x, eps, y)?;
        let direct = s.dilate(&ye, eps, v)?;
        let moved = s.dilate(x, eps, &ye)?;
        let induced = s.dilate(x, &eps.inv(), &s.dilate(&moved, eps, &s.dilate(x, eps, v)?)?)?;
        let d = rescaled_distance(s, x, eps, &direct, &induced)?;
        let nu = eps.nu();
        raw.push(d * nu);
        scaled.push(d / nu);
    }
    let rep = ConvergenceReport::new("plin1", s.name(), grid.nus(), scaled);
    Ok(judge_lin(rep, &raw))
}

/// d(Δ^x_ε(δ^x_μ u, δ^x_μ v), δ^{δ^x_{εμ} u}_μ Δ^x_{εμ}(u, v)).
pub fn translation_commutation_defect<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    u: &S::Point,
    v: &S::Point,
    eps: &S::Scale,
    mu: &S::Scale,
) -> Result<f64> {
    let lhs = approx_difference(s, x, eps, &s.dilate(x, mu, u)?, &s.dilate(x, mu, v)?)?;
    let em = eps.mul(mu);
    let base = s.dilate(x, &em, u)?;
    let rhs = s.dilate(&base, mu, &approx_difference(s, x, &em, u, v)?)?;
    Ok(s.distance(&lhs, &rhs))
}

/// For each grid scale ε, the sup over u, v with d(x,u), d(x,v) ≤ ν(ε) of
/// |d(u, v) − d^x(u, v)| / ν(ε).
///
/// d^x is the rescaled distance at the finest grid scale. Passes when the
/// sequence decreases.
pub fn metric_tangent_scan<S: DilatationStructure>(
    s: &S,
    x: &S::Point,
    grid: &EpsGrid<S::Scale>,
    samples: usize,
    seed: u64,
) -> Result<ConvergenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fine = grid.finest();
    let mut defect = Vec::with_capacity(grid.len());
    for eps in grid.scales() {
        let r = eps.nu();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let u = s.sample_point(x, r, &mut rng);
            let v = s.sample_point(x, r, &mut rng);
            let dx = rescaled_distance(s, x, fine, &u, &v)?;
            worst = worst.max((s.distance(&u, &v) - dx).abs() / r);
        }
        defect.push(worst);
    }
    let rep = ConvergenceReport::new("metric-tangent", s.name(), grid.nus(), defect).with_samples(samples, seed);
    Ok(rep.judge_decreasing(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ChartFamily, ConicalGroup, EuclideanModel, HeisenbergModel, PullbackModel};
    use crate::scale::PositiveReal;

    fn half() -> PositiveReal {
        PositiveReal::new(0.5).unwrap()
    }

    #[test]
    fn lin_vanishes_on_conical_groups() {
        let e = EuclideanModel::new(2).unwrap();
        let (x, y, z) = (e.point(&[0.1, 0.2]), e.point(&[0.5, -0.3]), e.point(&[-0.2, 0.4]));
        assert!(lin_defect(&e, &x, &y, &z, &half(), &PositiveReal::new(0.3).unwrap()).unwrap() < 1e-30);
        let h = HeisenbergModel::new(1).unwrap();
        let (x, y, z) = (h.point(&[0.1, 0.2], 0.3), h.point(&[0.5, -0.3], 0.1), h.point(&[-0.2, 0.4], -0.2));
        assert!(lin_defect(&h, &x, &y, &z, &half(), &PositiveReal::new(0.3).unwrap()).unwrap() <= 1e-9);
    }

    #[test]
    fn pullback_lin_is_positive() {
        let m = PullbackModel::new(EuclideanModel::new(2).unwrap(), ChartFamily::CubicCentered);
        let lin = lin_defect(&m, &vec![0.0, 0.0], &vec![0.2, 0.0], &vec![0.0, 0.2], &half(), &half()).unwrap();
        assert!(lin > 1e-4, "{lin}");
    }

    #[test]
    fn scans_pass_on_linear_and_pullback_models() {
        let grid = EpsGrid::<PositiveReal>::dyadic(3, 10).unwrap();
        let e = EuclideanModel::new(2).unwrap();
        let (x, y, z) = (e.point(&[0.0, 0.0]), e.point(&[0.2, 0.0]), e.point(&[0.0, 0.2]));
        let rep = inflin_scan(&e, &x, &y, &z, &grid).unwrap();
        assert!(rep.passed() && rep.max_defect() < 1e-20);

        let h = HeisenbergModel::new(1).unwrap();
        let (x, y, z) = (h.identity(), h.point(&[0.2, 0.1], 0.05), h.point(&[-0.1, 0.3], 0.02));
        assert!(inflin_scan(&h, &x, &y, &z, &grid).unwrap().passed());
        let rep = plin1_scan(&h, &x, &y, &z, &grid).unwrap();
        assert!(rep.passed() && rep.max_defect() <= 1e-9, "{rep:?}");

        let m = PullbackModel::new(e, ChartFamily::CubicCentered);
        let (x, y, z) = (vec![0.0, 0.0], vec![0.2, 0.0], vec![0.0, 0.2]);
        let rep = inflin_scan(&m, &x, &y, &z, &grid).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let rep = plin1_scan(&m, &x, &y, &z, &grid).unwrap();
        assert!(rep.passed() && rep.final_defect() < 1e-3, "{rep:?}");
    }

    #[test]
    fn translation_commutation_is_exact_on_heisenberg() {
        let h = HeisenbergModel::new(2).unwrap();
        let x = h.point(&[0.1, 0.0, -0.2, 0.1], 0.05);
        let u = h.point(&[0.3, 0.1, 0.0, -0.2], 0.1);
        let v = h.point(&[-0.1, 0.2, 0.2, 0.0], -0.1);
        let d = translation_commutation_defect(&h, &x, &u, &v, &half(), &PositiveReal::new(0.25).unwrap()).unwrap();
        assert!(d <= 1e-9, "{d}");
    }

    #[test]
    fn pullback_has_a_metric_tangent() {
        let m = PullbackModel::new(EuclideanModel::new(2).unwrap(), ChartFamily::CubicCentered);
        let grid = EpsGrid::<PositiveReal>::dyadic(1, 8).unwrap();
        let rep = metric_tangent_scan(&m, &vec![0.1, -0.1], &grid, 32, 3).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.defect[0] > 1e-3);
    }
}
