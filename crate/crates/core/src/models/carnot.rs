use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{unit_vector, ConicalGroup};
use crate::error::{LabError, Result};
use crate::qd::{lift, Qd};
use crate::scale::PositiveReal;

const JACOBI_TOLERANCE: f64 = 1e-12;

/// A stratified nilpotent Lie algebra of step at most 3, given on a graded basis.
///
/// Basis vectors are numbered layer by layer. A bracket entry `[i, j, k, c]`
/// declares `[e_i, e_j] = c·e_k`; the entry for `[e_j, e_i]` is implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarnotSpec {
    pub step: usize,
    pub layers: Vec<usize>,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, usize, f64)>,
}

impl CarnotSpec {
    /// H(n) as a step-2 algebra: [e_i, e_{n+i}] = e_{2n}.
    pub fn heisenberg(n: usize) -> Self {
        Self { step: 2, layers: vec![2 * n, 1], brackets: (0..n).map(|i| (i, n + i, 2 * n, 1.0)).collect() }
    }

    /// The Engel algebra: [e₀, e₁] = e₂, [e₀, e₂] = e₃.
    pub fn engel() -> Self {
        Self { step: 3, layers: vec![2, 1, 1], brackets: vec![(0, 1, 2, 1.0), (0, 2, 3, 1.0)] }
    }

    pub fn dimension(&self) -> usize {
        self.layers.iter().sum()
    }

    /// Q = Σ i·dim Vᵢ.
    pub fn homogeneous_dimension(&self) -> usize {
        self.layers.iter().enumerate().map(|(i, d)| (i + 1) * d).sum()
    }

    /// Layer (1-based) of every basis vector.
    pub fn weights(&self) -> Vec<usize> {
        self.layers.iter().enumerate().flat_map(|(i, &d)| std::iter::repeat_n(i + 1, d)).collect()
    }
}

/// The simply connected group of a [`CarnotSpec`] in exponential coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CarnotGroup {
    spec: CarnotSpec,
    weights: Vec<usize>,
    // (i, j, k, c) with both orientations present
    table: Vec<(usize, usize, usize, Qd)>,
}

fn model_err(msg: impl Into<String>) -> LabError {
    LabError::Model(msg.into())
}

fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs())) else {
            break;
        };
        if rows[p][c].abs() < 1e-12 {
            continue;
        }
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][c] / rows[r][c];
                for j in c..cols {
                    rows[i][j] -= f * rows[r][j];
                }
            }
        }
        r += 1;
    }
    r
}

impl CarnotGroup {
    pub fn new(spec: CarnotSpec) -> Result<Self> {
        if !(1..=3).contains(&spec.step) {
            return Err(model_err(format!("step must be 1, 2 or 3, got {}", spec.step)));
        }
        if spec.layers.len() != spec.step {
            return Err(model_err(format!(
                "step {} needs {} layer dimensions, got {:?}",
                spec.step, spec.step, spec.layers
            )));
        }
        if spec.layers.contains(&0) {
            return Err(model_err("every layer must be non-empty"));
        }
        let dim = spec.dimension();
        let weights = spec.weights();
        let mut seen = std::collections::HashSet::new();
        let mut table = Vec::new();
        for &(i, j, k, c) in &spec.brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(model_err(format!("bracket index out of range in [{i}, {j}, {k}, {c}]")));
            }
            if !c.is_finite() {
                return Err(model_err(format!("non-finite structure constant in [{i}, {j}, {k}, {c}]")));
            }
            if i == j {
                if c != 0.0 {
                    return Err(model_err(format!("[e{i}, e{i}] must vanish")));
                }
                continue;
            }
            if !seen.insert((i.min(j), i.max(j), k)) {
                return Err(model_err(format!("bracket [e{i}, e{j}] along e{k} given twice")));
            }
            if c == 0.0 {
                continue;
            }
            if weights[i] + weights[j] != weights[k] {
                return Err(model_err(format!(
                    "[V{}, V{}] must land in V{}, but e{k} lies in V{}",
                    weights[i],
                    weights[j],
                    weights[i] + weights[j],
                    weights[k]
                )));
            }
            table.push((i, j, k, Qd::from(c)));
            table.push((j, i, k, Qd::from(-c)));
        }
        let g = Self { spec, weights, table };
        g.check_jacobi()?;
        g.check_stratified()?;
        Ok(g)
    }

    pub fn spec(&self) -> &CarnotSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn point(&self, coords: &[f64]) -> Result<Vec<Qd>> {
        if coords.len() != self.dimension() {
            return Err(LabError::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.dimension(),
                coords.len()
            )));
        }
        Ok(lift(coords))
    }

    pub fn bracket(&self, x: &[Qd], y: &[Qd]) -> Vec<Qd> {
        let mut out = vec![Qd::ZERO; self.dimension()];
        for &(i, j, k, c) in &self.table {
            out[k] += c * x[i] * y[j];
        }
        out
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dimension();
        let basis: Vec<Vec<Qd>> = (0..n).map(|i| lift(&unit_vector(n, i))).collect();
        for a in &basis {
            for b in &basis {
                for c in &basis {
                    let t1 = self.bracket(a, &self.bracket(b, c));
                    let t2 = self.bracket(b, &self.bracket(c, a));
                    let t3 = self.bracket(c, &self.bracket(a, b));
                    let worst = (0..n).map(|k| (t1[k] + t2[k] + t3[k]).abs().to_f64()).fold(0.0, f64::max);
                    if worst > JACOBI_TOLERANCE {
                        return Err(model_err(format!("Jacobi identity fails with residual {worst:e}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// V_{i+1} = [V₁, Vᵢ]: the brackets of the first layer with layer i span layer i+1.
    fn check_stratified(&self) -> Result<()> {
        let n = self.dimension();
        let layer = |w: usize| (0..n).filter(move |&i| self.weights[i] == w);
        for w in 1..self.spec.step {
            let target: Vec<usize> = layer(w + 1).collect();
            let mut rows = Vec::new();
            for a in layer(1) {
                for b in layer(w) {
                    let br = self.bracket(&lift(&unit_vector(n, a)), &lift(&unit_vector(n, b)));
                    rows.push(target.iter().map(|&k| br[k].to_f64()).collect());
                }
            }
            if rank(rows) < target.len() {
                return Err(model_err(format!("layer {} is not generated by [V1, V{w}]", w + 1)));
            }
        }
        Ok(())
    }

    /// Smallest C with ‖ab‖ ≤ C(‖a‖ + ‖b‖) seen over `samples` random pairs.
    pub fn subadditivity_constant(&self, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let a = self.random_element(rng);
            let b = self.random_element(rng);
            let denom = self.norm(&a) + self.norm(&b);
            if denom > 0.0 {
                worst = worst.max(self.norm(&self.product(&a, &b)) / denom);
            }
        }
        worst
    }
}

impl ConicalGroup for CarnotGroup {
    type Element = Vec<Qd>;
    type Scale = PositiveReal;

    fn group_name(&self) -> String {
        format!("carnot(step={},layers={:?})", self.spec.step, self.spec.layers)
    }

    fn identity(&self) -> Vec<Qd> {
        vec![Qd::ZERO; self.dimension()]
    }

    /// Baker–Campbell–Hausdorff through degree 3:
    /// X + Y + ½[X,Y] + (1/12)[X,[X,Y]] − (1/12)[Y,[X,Y]].
    fn product(&self, a: &Vec<Qd>, b: &Vec<Qd>) -> Vec<Qd> {
        let mut out: Vec<Qd> = a.iter().zip(b).map(|(x, y)| *x + *y).collect();
        if self.spec.step == 1 {
            return out;
        }
        let xy = self.bracket(a, b);
        for (o, t) in out.iter_mut().zip(&xy) {
            *o += *t * 0.5;
        }
        if self.spec.step == 3 {
            let twelfth = Qd::ONE / Qd::from(12.0);
            let xxy = self.bracket(a, &xy);
            let yxy = self.bracket(b, &xy);
            for k in 0..out.len() {
                out[k] += (xxy[k] - yxy[k]) * twelfth;
            }
        }
        out
    }

    fn inverse(&self, a: &Vec<Qd>) -> Vec<Qd> {
        a.iter().map(|x| -*x).collect()
    }

    fn scale_element(&self, eps: &PositiveReal, a: &Vec<Qd>) -> Result<Vec<Qd>> {
        let e = Qd::from(eps.exact());
        let powers = [e, e * e, e * e * e];
        Ok(a.iter().zip(&self.weights).map(|(x, &w)| powers[w - 1] * *x).collect())
    }

    /// max over layers of ‖aᵢ‖^{1/i}, a homogeneous quasi-norm.
    fn norm(&self, a: &Vec<Qd>) -> f64 {
        let mut sq = [Qd::ZERO; 3];
        for (x, &w) in a.iter().zip(&self.weights) {
            sq[w - 1] += x.square();
        }
        sq.iter().enumerate().map(|(i, s)| s.to_f64().powf(1.0 / (2.0 * (i + 1) as f64))).fold(0.0, f64::max)
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> Vec<Qd> {
        (0..self.dimension()).map(|_| Qd::from(rng.gen_range(-1.0..1.0))).collect()
    }

    fn basis_elements(&self) -> Vec<Vec<Qd>> {
        let n = self.dimension();
        (0..n).map(|i| lift(&unit_vector(n, i))).collect()
    }
}
