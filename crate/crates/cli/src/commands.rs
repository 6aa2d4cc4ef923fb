//! One function per subcommand, generic over the model.

use dilatation_core::affine::{
    banach_oracle, barycentric_defect, dilatation_search, dyadic_barycentric_defect, geometric_affinity_check,
    heisenberg_ratio_closed_form, menelaos_iterate, probe_set, ratio_point, sample_collinear_triples,
    translation_defect, DEFAULT_MAX_ITER,
};
use dilatation_core::emergent::{check_affine_map, inflin_scan, plin1_scan, tangent_limit, AffineMapSamples};
use dilatation_core::models::spec::BuiltModel;
use dilatation_core::models::{cubic, ComplexHeisenbergModel, ConicalGroup, DyadicBoundaryModel, EuclideanModel};
use dilatation_core::{verify_axiom, Axiom, Dd, DilatationStructure, EpsGrid, LabError, Region, Scale, SweepConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::codec::Codec;
use crate::config::{AxiomSelection, Command, GridSpec, MapSpec, ScaleValue, ScanKind};
use crate::error::CliError;
use crate::output::{num, Table};

/// What a command produced: the table, its verdict and free-form notes.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
    pub notes: Vec<(String, String)>,
}

impl Outcome {
    fn new(table: Table, passed: bool) -> Self {
        Self { table, passed, notes: Vec::new() }
    }

    fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.notes.push((key.into(), value.into()));
    }
}

const DEFAULT_RADIUS: f64 = 0.5;

type MapFn<'a, P> = Box<dyn Fn(&P) -> Result<P, LabError> + Sync + 'a>;

type ClosedForm<'a, P> = &'a dyn Fn(&P, &P, f64, f64) -> Result<P, LabError>;

fn grid<S: Scale>(spec: &Option<GridSpec>) -> Result<EpsGrid<S>, CliError> {
    Ok(match spec {
        None => EpsGrid::standard(),
        Some(GridSpec::Dyadic { kmin, kmax }) => EpsGrid::dyadic(*kmin, *kmax)?,
        Some(GridSpec::Values(nus)) => EpsGrid::new(nus.iter().map(|v| S::from_nu(*v)).collect::<Result<_, _>>()?)?,
    })
}

fn center<S: Codec>(s: &S, v: &Option<Value>) -> Result<S::Point, CliError> {
    match v {
        Some(v) => s.parse_point(v),
        None => Ok(s.origin()),
    }
}

fn scales<S: Scale>(nus: &[f64]) -> Result<Vec<S>, CliError> {
    Ok(nus.iter().map(|v| S::from_nu(*v)).collect::<Result<Vec<_>, _>>()?)
}

fn axioms(sel: &AxiomSelection) -> Result<Vec<Axiom>, CliError> {
    let names: Vec<&str> = match sel {
        AxiomSelection::One(s) if s.eq_ignore_ascii_case("all") => return Ok(Axiom::ALL.to_vec()),
        AxiomSelection::One(s) => vec![s.as_str()],
        AxiomSelection::Many(v) => v.iter().map(String::as_str).collect(),
    };
    if names.is_empty() {
        return Err(CliError::Config("`which` names no axiom".into()));
    }
    names.into_iter().map(|n| n.parse::<Axiom>().map_err(|e| CliError::Config(e.to_string()))).collect()
}

fn push_notes(out: &mut Outcome, prefix: &str, rep: &dilatation_core::ConvergenceReport) {
    if let Some(rate) = rep.fitted_rate {
        out.note(format!("{prefix} fitted_rate"), num(rate));
    }
    for n in &rep.notes {
        out.note(format!("{prefix} note"), n.clone());
    }
}

fn run_axioms<S: Codec>(s: &S, cmd: &Command) -> Result<Outcome, CliError> {
    let Command::Axioms { which, seed, samples, grid: g, tolerance, center: c, radius } = cmd else { unreachable!() };
    let cfg = SweepConfig::new(grid(g)?, samples.unwrap_or(64), *seed, tolerance.unwrap_or(1e-9));
    let region = Region::new(center(s, c)?, radius.unwrap_or(DEFAULT_RADIUS));
    let mut table = Table::new(&["axiom", "eps_nu", "defect", "verdict"]);
    let mut reports = Vec::new();
    for ax in axioms(which)? {
        let rep = verify_axiom(s, ax, &region, &cfg)?;
        for (nu, d) in rep.eps_nu.iter().zip(&rep.defect) {
            table.push(vec![ax.as_str().into(), num(*nu), num(*d), rep.verdict.as_str().into()]);
        }
        reports.push(rep);
    }
    let mut out = Outcome::new(table, reports.iter().all(|r| r.passed()));
    for r in &reports {
        push_notes(&mut out, &r.label, r);
    }
    Ok(out)
}

fn run_tangent<S: Codec>(s: &S, cmd: &Command) -> Result<Outcome, CliError> {
    let Command::Tangent { x, u, v, op, grid: g } = cmd else { unreachable!() };
    let (x, u) = (s.parse_point(x)?, s.parse_point(u)?);
    let v = match v {
        Some(v) => s.parse_point(v)?,
        None => u.clone(),
    };
    let (limit, rep) = tangent_limit(s, &x, &u, &v, *op, &grid(g)?)?;
    let mut table = Table::new(&["eps_nu", "defect"]);
    for (nu, d) in rep.eps_nu.iter().zip(&rep.defect) {
        table.push(vec![num(*nu), num(*d)]);
    }
    let mut out = Outcome::new(table, rep.passed());
    out.note("limit", s.format_point(&limit));
    push_notes(&mut out, op.as_str(), &rep);
    Ok(out)
}

fn run_menelaos<S: Codec>(s: &S, cmd: &Command) -> Result<Outcome, CliError> {
    let Command::Menelaos { x, y, eps, mu, tol, max_iter } = cmd else { unreachable!() };
    let (x, y) = (s.parse_point(x)?, s.parse_point(y)?);
    let (eps, mu) = (s.parse_scale(eps)?, s.parse_scale(mu)?);
    let tol = tol.unwrap_or(1e-12);
    let r = menelaos_iterate(s, &x, &eps, &y, &mu, tol, max_iter.unwrap_or(DEFAULT_MAX_ITER))?;
    let banach = banach_oracle(s, &x, &eps, &y, &mu, &x, tol)?;
    let gap = s.distance(&banach, &r.w);
    let expected = eps.mul(&mu).nu();
    let mut table = Table::new(&["w", "iterations", "residual", "rate", "expected_rate", "probe_defect", "banach_gap"]);
    table.push(vec![
        s.format_point(&r.w),
        r.iterations.to_string(),
        num(r.residual),
        num(r.rate),
        num(expected),
        num(r.probe_defect),
        num(gap),
    ]);
    let rate_ok = r.iterations == 0 || (r.rate - expected).abs() <= 0.1 * expected;
    let passed = r.residual <= tol && rate_ok && r.probe_defect <= 1e-9 && gap <= 1e-9;
    Ok(Outcome::new(table, passed))
}

fn run_ratio<G: ConicalGroup + Codec<Point = <G as ConicalGroup>::Element, Scale = <G as ConicalGroup>::Scale>>(
    g: &G,
    cmd: &Command,
    closed_form: Option<ClosedForm<'_, G::Element>>,
) -> Result<Outcome, CliError> {
    let Command::Ratio { x, y, eps, mu, order, tol } = cmd else { unreachable!() };
    let (x, y) = (g.parse_point(x)?, g.parse_point(y)?);
    let (e, m) = (g.parse_scale(eps)?, g.parse_scale(mu)?);
    let tol = tol.unwrap_or(1e-13);
    let mut oracles = vec![
        ("menelaos", menelaos_iterate(g, &x, &e, &y, &m, tol, DEFAULT_MAX_ITER)?.w),
        ("banach", banach_oracle(g, &x, &e, &y, &m, &x, tol)?),
    ];
    let truncated = ratio_point(g, &x, &y, &e, &m, order.unwrap_or(64))?;
    oracles.push(("ratio_point", truncated.value.clone()));
    if let Some(f) = closed_form {
        oracles.push(("closed_form", f(&x, &y, g.real_value(&e), g.real_value(&m))?));
    }
    let mut table = Table::new(&["oracle", "point", "distance_to_menelaos"]);
    for (name, p) in &oracles {
        table.push(vec![(*name).into(), g.format_point(p), num(DilatationStructure::distance(g, &oracles[0].1, p))]);
    }
    let mut worst: f64 = 0.0;
    for i in 0..oracles.len() {
        for j in (i + 1)..oracles.len() {
            worst = worst.max(DilatationStructure::distance(g, &oracles[i].1, &oracles[j].1));
        }
    }
    let mut out = Outcome::new(table, worst <= 1e-9);
    out.note("max_pairwise_disagreement", num(worst));
    out.note("ratio_point_tail_bound", num(truncated.bound));
    Ok(out)
}

fn run_linscan<S: Codec>(s: &S, cmd: &Command) -> Result<Outcome, CliError> {
    let Command::Linscan { x, y, z, grid: g, scan } = cmd else { unreachable!() };
    let (x, y, z) = (s.parse_point(x)?, s.parse_point(y)?, s.parse_point(z)?);
    let g = grid(g)?;
    let rep = match scan {
        ScanKind::Inflin => inflin_scan(s, &x, &y, &z, &g)?,
        ScanKind::Plin1 => plin1_scan(s, &x, &y, &z, &g)?,
    };
    let mut table = Table::new(&["eps_nu", "value"]);
    for (nu, d) in rep.eps_nu.iter().zip(&rep.defect) {
        table.push(vec![num(*nu), num(*d)]);
    }
    let mut out = Outcome::new(table, rep.passed());
    push_notes(&mut out, &rep.label, &rep);
    Ok(out)
}

struct BarycentricParams<P> {
    seed: u64,
    samples: usize,
    eps: Vec<f64>,
    center: P,
    radius: f64,
    tolerance: f64,
}

fn barycentric_params<S: Codec>(s: &S, cmd: &Command) -> Result<BarycentricParams<S::Point>, CliError> {
    let Command::Barycentric { seed, samples, eps, center: c, radius, tolerance } = cmd else { unreachable!() };
    Ok(BarycentricParams {
        seed: *seed,
        samples: samples.unwrap_or(32),
        eps: eps.clone().unwrap_or_else(|| vec![0.5]),
        center: center(s, c)?,
        radius: radius.unwrap_or(1.0),
        tolerance: tolerance.unwrap_or(1e-12),
    })
}

fn barycentric_rows<S: Codec>(
    s: &S,
    p: &BarycentricParams<S::Point>,
    defect: impl Fn(&S::Point, &S::Point, f64) -> Result<f64, LabError>,
) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut table = Table::new(&["index", "eps", "x", "y", "defect"]);
    let mut worst: f64 = 0.0;
    for i in 0..p.samples {
        let x = s.sample_point(&p.center, p.radius, &mut rng);
        let y = s.sample_point(&p.center, p.radius, &mut rng);
        for &e in &p.eps {
            let d = defect(&x, &y, e)?;
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
            table.push(vec![i.to_string(), num(e), s.format_point(&x), s.format_point(&y), num(d)]);
        }
    }
    let mut out = Outcome::new(table, worst <= p.tolerance);
    out.note("max_defect", num(worst));
    Ok(out)
}

fn run_barycentric<S: Codec>(s: &S, cmd: &Command) -> Result<Outcome, CliError> {
    let p = barycentric_params(s, cmd)?;
    barycentric_rows(s, &p, |x, y, e| barycentric_defect(s, x, y, e))
}

/// In ℤ₂ the multiplier is λ = 2^p with ν(λ) = ε, so ε must be a power of ½.
fn run_dyadic_barycentric(m: &DyadicBoundaryModel, cmd: &Command) -> Result<Outcome, CliError> {
    let p = barycentric_params(m, cmd)?;
    barycentric_rows(m, &p, |x, y, e| {
        let power = dilatation_core::DyadicPower::from_nu(e)?;
        let k = u32::try_from(power.exponent())
            .map_err(|_| LabError::InvalidArgument(format!("ε = {e} is not a contracting power of 1/2")))?;
        dyadic_barycentric_defect(m, x, y, k)
    })
}

fn run_counterexample(m: &ComplexHeisenbergModel, cmd: &Command) -> Result<Outcome, CliError> {
    let Command::Counterexample { eps, y, seed, mu, radius } = cmd else { unreachable!() };
    if !(*eps > 0.0 && *eps < 1.0) {
        return Err(CliError::Config(format!("counterexample needs eps in (0,1), got {eps}")));
    }
    let y = m.parse_point(y)?;
    let e = m.parse_scale(&ScaleValue::Real(*eps))?;
    let mu = m.parse_scale(&mu.unwrap_or(ScaleValue::Real(-1.0 / eps)))?;
    let probes = probe_set(m, &m.origin(), radius.unwrap_or(1.0), *seed);
    let x = m.origin();
    let defect = translation_defect(m, &x, &e, &y, &mu, &probes)?;
    let (dil, w, lam) = dilatation_search(m, &x, &e, &y, &mu, &probes)?;
    let product = e.mul(&mu).value();
    let expect_translation = (product - num_complex::Complex64::new(1.0, 0.0)).norm() <= 1e-12;
    let passed = if expect_translation { defect <= 1e-9 } else { defect > 1e-6 };
    let mut table = Table::new(&["eps", "mu_re", "mu_im", "translation_defect", "dilatation_grid_defect"]);
    let muv = mu.value();
    table.push(vec![num(*eps), num(muv.re), num(muv.im), num(defect), num(dil)]);
    let mut out = Outcome::new(table, passed);
    out.note(
        "expectation",
        if expect_translation { "eps*mu = 1: a left translation" } else { "eps*mu != 1: not a left translation" },
    );
    out.note("closest_grid_dilatation", format!("center {} coefficient {}", m.format_point(&w), lam.label()));
    Ok(out)
}

fn generic_map<'a, S: Codec>(s: &'a S, spec: &MapSpec) -> Result<Option<MapFn<'a, S::Point>>, CliError> {
    Ok(match spec {
        MapSpec::Identity => Some(Box::new(|p: &S::Point| Ok(p.clone()))),
        MapSpec::Dilatation { center, scale } => {
            let c = s.parse_point(center)?;
            let l = s.parse_scale(scale)?;
            Some(Box::new(move |p: &S::Point| s.dilate(&c, &l, p)))
        }
        _ => None,
    })
}

fn group_map<'a, G>(g: &'a G, spec: &MapSpec) -> Result<MapFn<'a, G::Element>, CliError>
where
    G: ConicalGroup + Codec<Point = <G as ConicalGroup>::Element>,
{
    if let Some(f) = generic_map(g, spec)? {
        return Ok(f);
    }
    match spec {
        MapSpec::LeftTranslation { by } => {
            let w = g.parse_point(by)?;
            Ok(Box::new(move |p: &G::Element| Ok(g.product(&w, p))))
        }
        other => Err(CliError::Config(format!("map {other:?} is not available on {}", g.group_name()))),
    }
}

fn euclidean_map<'a>(e: &'a EuclideanModel, spec: &MapSpec) -> Result<MapFn<'a, Vec<Dd>>, CliError> {
    let n = e.dim();
    match spec {
        MapSpec::Affine { matrix, offset } => {
            if matrix.len() != n || matrix.iter().any(|r| r.len() != n) || offset.len() != n {
                return Err(CliError::Config(format!("affine map on R^{n} needs an {n}x{n} matrix and {n} offsets")));
            }
            let (m, b) = (matrix.clone(), offset.clone());
            Ok(Box::new(move |p: &Vec<Dd>| {
                Ok((0..n).map(|i| (0..n).map(|j| p[j] * m[i][j]).sum::<Dd>() + b[i]).collect())
            }))
        }
        MapSpec::SquareFirst => Ok(Box::new(|p: &Vec<Dd>| {
            let mut q = p.clone();
            q[0] = p[0].square();
            Ok(q)
        })),
        MapSpec::Cubic => Ok(Box::new(|p: &Vec<Dd>| Ok(p.iter().map(|t| Dd::from(cubic(t.to_f64()))).collect()))),
        other => group_map(e, other),
    }
}

fn run_affinemap<'a, S: Codec>(s: &'a S, cmd: &Command, map: MapFn<'a, S::Point>) -> Result<Outcome, CliError> {
    let Command::Affinemap { seed, samples, eps, center: c, radius, tolerance, triples, .. } = cmd else {
        unreachable!()
    };
    let center = center(s, c)?;
    let radius = radius.unwrap_or(1.0);
    let tolerance = tolerance.unwrap_or(1e-9);
    let eps: Vec<S::Scale> = scales(eps.as_deref().unwrap_or(&[0.5, 0.25, 0.125]))?;
    let mut samp = AffineMapSamples::new(center.clone(), radius, samples.unwrap_or(32), *seed);
    samp.tolerance = tolerance;
    let commutation = check_affine_map(s, &map, &samp, &eps);
    let tr = sample_collinear_triples(s, &center, radius, triples.unwrap_or(16), *seed)?;
    let probes = probe_set(s, &center, radius, seed.wrapping_add(1));
    let geometric = geometric_affinity_check(s, &map, &tr, &probes, tolerance);
    let mut table = Table::new(&["check", "index", "eps_nu", "defect"]);
    for (name, rep) in [("commutation", &commutation), ("geometric", &geometric)] {
        for (i, (nu, d)) in rep.eps_nu.iter().zip(&rep.defect).enumerate() {
            table.push(vec![name.into(), i.to_string(), num(*nu), num(*d)]);
        }
    }
    let mut out = Outcome::new(table, commutation.passed() && geometric.passed());
    out.note("commutation verdict", commutation.verdict.as_str());
    out.note("geometric verdict", geometric.verdict.as_str());
    push_notes(&mut out, "commutation", &commutation);
    Ok(out)
}

fn common<S: Codec>(s: &S, cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Axioms { .. } => run_axioms(s, cmd),
        Command::Tangent { .. } => run_tangent(s, cmd),
        Command::Menelaos { .. } => run_menelaos(s, cmd),
        Command::Linscan { .. } => run_linscan(s, cmd),
        Command::Barycentric { .. } => run_barycentric(s, cmd),
        other => Err(CliError::Config(format!("command `{}` is not available on {}", other.name(), s.name()))),
    }
}

fn group<G>(g: &G, cmd: &Command) -> Result<Outcome, CliError>
where
    G: ConicalGroup + Codec<Point = <G as ConicalGroup>::Element, Scale = <G as ConicalGroup>::Scale>,
{
    match cmd {
        Command::Ratio { .. } => run_ratio(g, cmd, None),
        Command::Affinemap { map, .. } => run_affinemap(g, cmd, group_map(g, map)?),
        _ => common(g, cmd),
    }
}

/// Runs a parsed command on a built model.
pub fn execute(model: &BuiltModel, cmd: &Command) -> Result<Outcome, CliError> {
    match model {
        BuiltModel::Euclidean(e) => match cmd {
            Command::Affinemap { map, .. } => run_affinemap(e, cmd, euclidean_map(e, map)?),
            _ => group(e, cmd),
        },
        BuiltModel::Heisenberg(h) => match cmd {
            Command::Ratio { .. } => {
                let closed = |x: &_, y: &_, e: f64, m: f64| heisenberg_ratio_closed_form(h, x, y, e, m);
                run_ratio(h, cmd, Some(&closed))
            }
            _ => group(h, cmd),
        },
        BuiltModel::Carnot(c) => group(c, cmd),
        BuiltModel::Dyadic(d) => match cmd {
            Command::Barycentric { .. } => run_dyadic_barycentric(d, cmd),
            _ => group(d, cmd),
        },
        BuiltModel::ComplexHeisenberg(c) => match cmd {
            Command::Counterexample { .. } => run_counterexample(c, cmd),
            _ => group(c, cmd),
        },
        BuiltModel::Pullback(p) => match cmd {
            Command::Affinemap { map, .. } => match generic_map(p, map)? {
                Some(f) => run_affinemap(p, cmd, f),
                None => Err(CliError::Config(format!("map {map:?} is not available on {}", p.name()))),
            },
            _ => common(p, cmd),
        },
    }
}
