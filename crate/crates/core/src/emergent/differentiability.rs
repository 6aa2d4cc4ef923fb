use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::report::{non_increasing, ConvergenceReport, Verdict, JITTER_FACTOR};
use crate::scale::{EpsGrid, Scale};
use crate::structure::{approx_sum, refinement_step, DilatationStructure};

/// Cauchy gap below which a derivative estimate is accepted.
pub const DIFFERENTIABILITY_TOLERANCE: f64 = 1e-4;

/// Where and how densely a map is probed.
#[derive(Debug, Clone)]
pub struct AffineMapSamples<P> {
    pub center: P,
    pub radius: f64,
    pub count: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl<P> AffineMapSamples<P> {
    pub fn new(center: P, radius: f64, count: usize, seed: u64) -> Self {
        Self { center, radius, count, seed, tolerance: 1e-9 }
    }
}

/// Checks T δ^x_ε y = δ^{Tx}_ε T y and T Σ^x_ε(u, v) = Σ^{Tx}_ε(Tu, Tv).
///
/// One defect per scale in `eps`: the largest distance between the two sides
/// over the sampled triples. A failed evaluation counts as an infinite
/// defect. The Lipschitz ratio of T on the samples goes in the notes.
pub fn check_affine_map<S, F>(s: &S, t: F, samples: &AffineMapSamples<S::Point>, eps: &[S::Scale]) -> ConvergenceReport
where
    S: DilatationStructure,
    F: Fn(&S::Point) -> Result<S::Point>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(samples.seed);
    let triples: Vec<_> = (0..samples.count)
        .map(|_| {
            let c = &samples.center;
            (
                s.sample_point(c, samples.radius, &mut rng),
                s.sample_point(c, samples.radius, &mut rng),
                s.sample_point(c, samples.radius, &mut rng),
            )
        })
        .collect();
    let mut lipschitz: f64 = 0.0;
    for (x, u, _) in &triples {
        if let (Ok(tx), Ok(tu)) = (t(x), t(u)) {
            let d = s.distance(x, u);
            if d > 0.0 {
                lipschitz = lipschitz.max(s.distance(&tx, &tu) / d);
            }
        }
    }
    let one = |x: &S::Point, u: &S::Point, v: &S::Point, e: &S::Scale| -> Result<f64> {
        let (tx, tu, tv) = (t(x)?, t(u)?, t(v)?);
        let dil = s.distance(&t(&s.dilate(x, e, u)?)?, &s.dilate(&tx, e, &tu)?);
        let sum = s.distance(&t(&approx_sum(s, x, e, u, v)?)?, &approx_sum(s, &tx, e, &tu, &tv)?);
        Ok(dil.max(sum))
    };
    let defect: Vec<f64> = eps
        .iter()
        .map(|e| {
            triples
                .iter()
                .map(|(x, u, v)| {
                    one(x, u, v, e).map(|d| if d.is_nan() { f64::INFINITY } else { d }).unwrap_or(f64::INFINITY)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let nus = eps.iter().map(Scale::nu).collect();
    let mut rep = ConvergenceReport::new("affine-map", s.name(), nus, defect).with_samples(samples.count, samples.seed);
    rep.note(format!("lipschitz estimate {lipschitz}"));
    rep.judge_max(samples.tolerance)
}

/// Estimates Q^x(u) = lim δ^{f(x)}_{ε⁻¹} f(δ^x_ε u).
///
/// The estimate is the value at the finest scale. The report holds, per
/// scale, the residual (1/ν(ε)) d(f(δ^x_ε u), δ^{f(x)}_ε Q), and the Cauchy
/// gaps of the difference quotients go in the notes. Fails with
/// `NonConvergent` when the gaps grow or the last one is not below
/// [`DIFFERENTIABILITY_TOLERANCE`].
pub fn pansu_derivative<A, B, F>(
    src: &A,
    dst: &B,
    f: F,
    x: &A::Point,
    u: &A::Point,
    grid: &EpsGrid<A::Scale>,
) -> Result<(B::Point, ConvergenceReport)>
where
    A: DilatationStructure,
    B: DilatationStructure<Scale = A::Scale>,
    F: Fn(&A::Point) -> Result<B::Point>,
{
    let fx = f(x)?;
    let quotient = |eps: &A::Scale| -> Result<B::Point> { dst.dilate(&fx, &eps.inv(), &f(&src.dilate(x, eps, u)?)?) };
    let step = refinement_step(grid);
    let mut gaps = Vec::with_capacity(grid.len());
    let mut estimate = None;
    for eps in grid.scales() {
        let here = quotient(eps)?;
        let finer = quotient(&eps.mul(&step))?;
        gaps.push(dst.distance(&here, &finer));
        estimate = Some(here);
    }
    let q = estimate.expect("grid is non-empty");
    let last = *gaps.last().expect("grid is non-empty");
    if !non_increasing(&gaps, JITTER_FACTOR) || !(last < DIFFERENTIABILITY_TOLERANCE) {
        return Err(LabError::NonConvergent(format!(
            "difference quotients of the map into {} do not settle: gaps {gaps:?}",
            dst.name()
        )));
    }
    let residual = grid
        .scales()
        .iter()
        .map(|eps| Ok(dst.distance(&f(&src.dilate(x, eps, u)?)?, &dst.dilate(&fx, eps, &q)?) / eps.nu()))
        .collect::<Result<Vec<f64>>>()?;
    let mut rep = ConvergenceReport::new("pansu", format!("{}->{}", src.name(), dst.name()), grid.nus(), residual);
    rep.note(format!("cauchy gaps {gaps:?}"));
    rep.tolerance = DIFFERENTIABILITY_TOLERANCE;
    rep.verdict = Verdict::Pass;
    Ok((q, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::{lift, lower};
    use crate::models::{ConicalGroup, EuclideanModel, HeisenbergModel};
    use crate::scale::PositiveReal;

    fn grid() -> EpsGrid<PositiveReal> {
        EpsGrid::standard()
    }

    #[test]
    fn affine_maps_commute_and_squares_do_not() {
        let e = EuclideanModel::new(2).unwrap();
        let eps: Vec<_> = [0.5, 0.25, 0.125].iter().map(|v| PositiveReal::new(*v).unwrap()).collect();
        let samples = AffineMapSamples::new(e.point(&[0.0, 0.0]), 1.0, 32, 1);
        let affine = |v: &Vec<crate::Dd>| {
            let w = lower(v);
            Ok(lift(&[2.0 * w[0] - w[1] + 0.5, 0.3 * w[0] + w[1] - 1.0]))
        };
        let rep = check_affine_map(&e, affine, &samples, &eps);
        assert!(rep.passed() && rep.max_defect() < 1e-12, "{rep:?}");
        let square = |v: &Vec<crate::Dd>| Ok(vec![v[0] * v[0], v[1]]);
        let rep = check_affine_map(&e, square, &samples, &eps);
        assert!(!rep.passed() && rep.max_defect() > 0.01);

        let h = HeisenbergModel::new(1).unwrap();
        let w = h.point(&[0.3, -0.7], 0.2);
        let samples = AffineMapSamples::new(h.identity(), 1.0, 32, 2);
        let rep = check_affine_map(&h, |p| Ok(h.product(&w, p)), &samples, &eps);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn derivative_of_a_smooth_map_is_its_jacobian() {
        let e = EuclideanModel::new(2).unwrap();
        let f = |v: &Vec<crate::Dd>| {
            let w = lower(v);
            Ok(lift(&[w[0].sin() + w[1], w[0] * w[1].cos() + 2.0 * w[1]]))
        };
        let (q, rep) = pansu_derivative(&e, &e, f, &e.point(&[0.0, 0.0]), &e.point(&[0.5, -0.25]), &grid()).unwrap();
        // Jacobian at 0 is [[1, 1], [1, 2]]
        let q = lower(&q);
        assert!((q[0] - 0.25).abs() < 1e-3 && (q[1] - 0.0).abs() < 1e-3, "{q:?}");
        assert!(rep.passed());
    }

    #[test]
    fn identity_and_dilatations_differentiate_exactly() {
        let h = HeisenbergModel::new(1).unwrap();
        let (x, u) = (h.point(&[0.1, 0.2], 0.0), h.point(&[0.3, -0.1], 0.2));
        let (q, rep) = pansu_derivative(&h, &h, |p| Ok(p.clone()), &x, &u, &grid()).unwrap();
        assert!(h.distance(&q, &u) < 1e-12 && rep.max_defect() < 1e-9);
        let lambda = PositiveReal::new(0.7).unwrap();
        let f = |p: &crate::models::HeisenbergPoint| h.scale_element(&lambda, p);
        let (q, rep) = pansu_derivative(&h, &h, f, &h.identity(), &u, &grid()).unwrap();
        assert!(h.distance(&q, &h.scale_element(&lambda, &u).unwrap()) < 1e-9);
        assert!(rep.max_defect() <= 1e-9, "{rep:?}");
    }

    #[test]
    fn oscillating_map_is_not_differentiable() {
        let e = EuclideanModel::new(1).unwrap();
        let f = |v: &Vec<crate::Dd>| {
            let t = v[0].to_f64();
            Ok(lift(&[if t == 0.0 { 0.0 } else { t * t.abs().ln().sin() }]))
        };
        let err = pansu_derivative(&e, &e, f, &e.point(&[0.0]), &e.point(&[1.0]), &grid()).unwrap_err();
        assert!(matches!(err, LabError::NonConvergent(_)));
    }
}
