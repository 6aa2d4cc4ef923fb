//! Defect-versus-scale records produced by every sweep in the crate.

use serde::Serialize;

/// Increases by at most this factor between neighbouring grid points are
/// tolerated when deciding monotonicity.
pub const JITTER_FACTOR: f64 = 1.5;

/// Defects at or below this level count as numerically zero.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    /// The estimated tangent distance vanishes between distinct points.
    Degenerate,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// What was measured, e.g. `A3` or `inflin`.
    pub label: String,
    pub model: String,
    /// Valuations ν(ε) of the grid, strictly decreasing.
    pub eps_nu: Vec<f64>,
    /// One defect per grid point.
    pub defect: Vec<f64>,
    /// Log-log slope of defect against ν(ε); `None` when fewer than two
    /// defects rise above the noise floor.
    pub fitted_rate: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub samples: usize,
    pub seed: u64,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    pub fn new(label: impl Into<String>, model: impl Into<String>, eps_nu: Vec<f64>, defect: Vec<f64>) -> Self {
        assert_eq!(eps_nu.len(), defect.len(), "one defect per grid point");
        let fitted_rate = fit_loglog_slope(&eps_nu, &defect);
        Self {
            label: label.into(),
            model: model.into(),
            eps_nu,
            defect,
            fitted_rate,
            tolerance: 0.0,
            verdict: Verdict::Fail,
            samples: 0,
            seed: 0,
            notes: Vec::new(),
        }
    }

    pub fn with_samples(mut self, samples: usize, seed: u64) -> Self {
        self.samples = samples;
        self.seed = seed;
        self
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Pass iff the final defect is below `tolerance` and the sequence is
    /// non-increasing up to [`JITTER_FACTOR`].
    pub fn judge_convergent(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        let final_ok = self.final_defect() < tolerance;
        let mono = non_increasing(&self.defect, JITTER_FACTOR);
        if !final_ok {
            self.note(format!("final defect {:e} not below {tolerance:e}", self.final_defect()));
        }
        if !mono {
            self.note("defects increase along the grid");
        }
        self.verdict = if final_ok && mono { Verdict::Pass } else { Verdict::Fail };
        self
    }

    /// Pass iff the largest defect is below `tolerance`.
    pub fn judge_max(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        let ok = self.max_defect() <= tolerance;
        if !ok {
            self.note(format!("max defect {:e} above {tolerance:e}", self.max_defect()));
        }
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        self
    }

    /// Pass iff defects decrease monotonically (strictly, above the noise
    /// floor) and the last is below `fraction` of the first.
    pub fn judge_decreasing(mut self, fraction: f64) -> Self {
        self.tolerance = fraction;
        let strictly = self.defect.windows(2).all(|w| w[1] < w[0] || (w[0] <= NOISE_FLOOR && w[1] <= NOISE_FLOOR));
        let first = self.defect.first().copied().unwrap_or(0.0);
        let shrunk = self.final_defect() < fraction * first || first <= NOISE_FLOOR;
        if !strictly {
            self.note("sequence is not monotone decreasing");
        }
        if !shrunk {
            self.note(format!("final value not below {fraction} x initial"));
        }
        self.verdict = if strictly && shrunk { Verdict::Pass } else { Verdict::Fail };
        self
    }

    pub fn final_defect(&self) -> f64 {
        self.defect.last().copied().unwrap_or(0.0)
    }

    pub fn max_defect(&self) -> f64 {
        self.defect.iter().copied().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// True when every value is at most `jitter` times its predecessor, or sits
/// under the noise floor.
pub fn non_increasing(values: &[f64], jitter: f64) -> bool {
    values.windows(2).all(|w| w[1] <= jitter * w[0] || w[1] <= NOISE_FLOOR)
}

/// Least-squares slope of log(defect) against log(ν) over the points whose
/// defect exceeds the noise floor.
pub fn fit_loglog_slope(nu: &[f64], defect: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = nu
        .iter()
        .zip(defect)
        .filter(|(n, d)| **n > 0.0 && **d > NOISE_FLOOR && d.is_finite())
        .map(|(n, d)| (n.ln(), d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
