use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::menelaos::{menelaos_iterate, DEFAULT_MAX_ITER};
use crate::error::{LabError, Result};
use crate::models::{HeisenbergModel, HeisenbergPoint};
use crate::report::ConvergenceReport;
use crate::scale::{PositiveReal, Scale};
use crate::structure::DilatationStructure;

/// Deterministic probes in a probe set.
const LATTICE_PROBES: usize = 7;
/// Seeded random probes in a probe set.
const RANDOM_PROBES: usize = 9;

/// Points with exponents (x^α, y^β, z^γ) where αβγ = 1 and none is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CollinearTriple<P, Sc> {
    pub x: P,
    pub alpha: Sc,
    pub y: P,
    pub beta: Sc,
    pub z: P,
    pub gamma: Sc,
}

fn check_not_one<Sc: Scale>(name: &str, sc: &Sc) -> Result<()> {
    let near_one = (sc.nu() - 1.0).abs() <= 1e-12 && Sc::from_nu(sc.nu()).is_ok_and(|r| r == *sc);
    if *sc == Sc::one() || near_one {
        return Err(LabError::InvalidArgument(format!("exponent {name} must differ from 1")));
    }
    Ok(())
}

impl<P: Clone, Sc: Scale> CollinearTriple<P, Sc> {
    /// γ is derived as (αβ)⁻¹.
    pub fn new(x: P, alpha: Sc, y: P, beta: Sc, z: P) -> Result<Self> {
        let gamma = alpha.mul(&beta).inv();
        check_not_one("alpha", &alpha)?;
        check_not_one("beta", &beta)?;
        check_not_one("gamma", &gamma)?;
        Ok(Self { x, alpha, y, beta, z, gamma })
    }

    /// Accepts an explicit γ, rejected unless ν(αβγ) = 1 to 1e-12.
    pub fn with_gamma(x: P, alpha: Sc, y: P, beta: Sc, z: P, gamma: Sc) -> Result<Self> {
        let product = alpha.mul(&beta).mul(&gamma).nu();
        if (product - 1.0).abs() > 1e-12 {
            return Err(LabError::InvalidArgument(format!("αβγ must be 1, got valuation {product}")));
        }
        let t = Self::new(x, alpha, y, beta, z)?;
        Ok(Self { gamma, ..t })
    }

    /// r(x^α, y^β, z^γ) = α / (1 − αβ).
    pub fn ratio_norm(&self) -> f64 {
        self.alpha.nu() / (1.0 - self.alpha.mul(&self.beta).nu())
    }

    /// (y^β, z^γ, x^α).
    pub fn rotate(&self) -> Self {
        Self {
            x: self.y.clone(),
            alpha: self.beta.clone(),
            y: self.z.clone(),
            beta: self.gamma.clone(),
            z: self.x.clone(),
            gamma: self.alpha.clone(),
        }
    }
}

/// Seven deterministic points spanning B(center, radius) followed by nine
/// seeded random points of that ball.
pub fn probe_set<S: DilatationStructure>(s: &S, center: &S::Point, radius: f64, seed: u64) -> Vec<S::Point> {
    let mut out = vec![center.clone()];
    let mut r = radius;
    while out.len() < LATTICE_PROBES && r > radius * 1e-3 {
        out.extend(s.lattice_points(center, r).into_iter().skip(1));
        r /= 2.0;
    }
    out.truncate(LATTICE_PROBES);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.extend((0..RANDOM_PROBES).map(|_| s.sample_point(center, radius, &mut rng)));
    out
}

fn composite_defect<S: DilatationStructure>(
    s: &S,
    t: &CollinearTriple<S::Point, S::Scale>,
    probes: &[S::Point],
) -> f64 {
    probes
        .iter()
        .map(|u| {
            let image = s
                .dilate(&t.z, &t.gamma, u)
                .and_then(|v| s.dilate(&t.y, &t.beta, &v))
                .and_then(|v| s.dilate(&t.x, &t.alpha, &v));
            match image {
                Ok(v) => {
                    let d = s.distance(&v, u);
                    if d.is_nan() {
                        f64::INFINITY
                    } else {
                        d
                    }
                }
                Err(_) => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

/// max over the probes of d(δ^x_α δ^y_β δ^z_γ u, u). The ratio norm goes in
/// the notes.
pub fn check_collinear<S: DilatationStructure>(
    s: &S,
    triple: &CollinearTriple<S::Point, S::Scale>,
    probes: &[S::Point],
    tolerance: f64,
) -> ConvergenceReport {
    let defect = composite_defect(s, triple, probes);
    let mut rep = ConvergenceReport::new("collinear", s.name(), vec![triple.alpha.nu()], vec![defect])
        .with_samples(probes.len(), 0);
    rep.note(format!("ratio norm {}", triple.ratio_norm()));
    rep.judge_max(tolerance)
}

/// Collinear triples (x^α, y^β, w^{1/(αβ)}) with x, y drawn from the ball,
/// ν(α), ν(β) drawn from [0.2, 0.8] and w the Menelaos point of (x, y, α, β).
pub fn sample_collinear_triples<S: DilatationStructure>(
    s: &S,
    center: &S::Point,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<CollinearTriple<S::Point, S::Scale>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x = s.sample_point(center, radius, &mut rng);
            let y = s.sample_point(center, radius, &mut rng);
            let alpha = S::Scale::from_nu(rng.gen_range(0.2..0.8))?;
            let beta = S::Scale::from_nu(rng.gen_range(0.2..0.8))?;
            let w = menelaos_iterate(s, &x, &alpha, &y, &beta, 1e-14, DEFAULT_MAX_ITER)?.w;
            CollinearTriple::new(x, alpha, y, beta, w)
        })
        .collect()
}

/// For each triple (x^α, y^β, z^γ), the collinearity defect of
/// ((Tx)^α, (Ty)^β, (Tz)^γ) on the images of the probes. One row per triple.
pub fn geometric_affinity_check<S, F>(
    s: &S,
    t: F,
    triples: &[CollinearTriple<S::Point, S::Scale>],
    probes: &[S::Point],
    tolerance: f64,
) -> ConvergenceReport
where
    S: DilatationStructure,
    F: Fn(&S::Point) -> Result<S::Point>,
{
    let images: Vec<S::Point> = probes.iter().filter_map(|p| t(p).ok()).collect();
    let mut nus = Vec::with_capacity(triples.len());
    let mut defect = Vec::with_capacity(triples.len());
    for tr in triples {
        nus.push(tr.alpha.nu());
        let mapped = (t(&tr.x), t(&tr.y), t(&tr.z));
        let d = match mapped {
            (Ok(x), Ok(y), Ok(z)) => {
                let image = CollinearTriple {
                    x,
                    alpha: tr.alpha.clone(),
                    y,
                    beta: tr.beta.clone(),
                    z,
                    gamma: tr.gamma.clone(),
                };
                if images.len() < probes.len() {
                    f64::INFINITY
                } else {
                    composite_defect(s, &image, &images)
                }
            }
            _ => f64::INFINITY,
        };
        defect.push(d);
    }
    ConvergenceReport::new("geometric-affinity", s.name(), nus, defect)
        .with_samples(probes.len(), 0)
        .judge_max(tolerance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetrySearch {
    /// Smallest collinearity defect of (Y^β′, X^α′, Z^γ′) over the grid.
    pub min_defect: f64,
    pub best_alpha: f64,
    pub best_beta: f64,
    pub evaluated: usize,
}

/// Searches α′, β′ on an n × n grid of [lo, hi]² for a reversed collinear
/// triple (Y^β′, X^α′, Z^{1/(α′β′)}).
pub fn asymmetry_search(
    h: &HeisenbergModel,
    x: &HeisenbergPoint,
    y: &HeisenbergPoint,
    z: &HeisenbergPoint,
    n: usize,
    lo: f64,
    hi: f64,
    probes: &[HeisenbergPoint],
) -> Result<AsymmetrySearch> {
    if n < 2 || !(lo > 0.0 && hi > lo) {
        return Err(LabError::InvalidArgument(format!("bad search grid {n} x [{lo}, {hi}]")));
    }
    let at = |i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let mut best =
        AsymmetrySearch { min_defect: f64::INFINITY, best_alpha: f64::NAN, best_beta: f64::NAN, evaluated: 0 };
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (at(i), at(j));
            let t =
                CollinearTriple::new(y.clone(), PositiveReal::new(b)?, x.clone(), PositiveReal::new(a)?, z.clone())?;
            let d = composite_defect(h, &t, probes);
            best.evaluated += 1;
            if d < best.min_defect {
                best = AsymmetrySearch { min_defect: d, best_alpha: a, best_beta: b, evaluated: best.evaluated };
            }
        }
    }
    Ok(best)
}
