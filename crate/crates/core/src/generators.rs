//! Seeded instance factories and the counterexample constructions.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::SparsityGraph;
use crate::model::{ComponentMatrix, ComponentVector, Instance, MeasurementSet, Shape, SparseNoise};
use crate::scalar::Real;

/// Value assigned to a corrupted entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseValue {
    Constant(f64),
    Uniform(f64, f64),
    /// `±v` with equal probability.
    SignedConstant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    density: f64,
    value: NoiseValue,
}

impl NoiseModel {
    pub fn new(density: f64, value: NoiseValue) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidArgument(format!("noise density {density} outside [0, 1]")));
        }
        if let NoiseValue::Uniform(lo, hi) = value {
            if !(lo < hi) {
                return Err(Error::InvalidArgument("uniform noise needs lo < hi".into()));
            }
        }
        Ok(Self { density, value })
    }

    /// Entries set to `+value` with probability `density`.
    pub fn constant(density: f64, value: f64) -> Result<Self> {
        Self::new(density, NoiseValue::Constant(value))
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn value(&self) -> NoiseValue {
        self.value
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")))
    }
}

/// Bernoulli(p) measurement pattern. Symmetric shapes draw every `i ≤ j`
/// (diagonal included) in row-major order; asymmetric shapes every `(i, j)`.
pub fn sample_omega<R: Rng + ?Sized>(shape: Shape, p: f64, rng: &mut R) -> Result<MeasurementSet> {
    check_probability(p)?;
    match shape {
        Shape::Symmetric { n } => {
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in i..n {
                    if rng.random_bool(p) {
                        pairs.push((i, j));
                    }
                }
            }
            MeasurementSet::symmetric(n, pairs)
        }
        Shape::Asymmetric { m, n } => {
            let mut pairs = Vec::new();
            for i in 0..m {
                for j in 0..n {
                    if rng.random_bool(p) {
                        pairs.push((i, j));
                    }
                }
            }
            MeasurementSet::asymmetric(m, n, pairs)
        }
    }
}

/// Re-samples a symmetric pattern until its sparsity graph is connected with
/// no bipartite component.
pub fn sample_identifiable_omega<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    rng: &mut R,
    max_attempts: usize,
) -> Result<MeasurementSet> {
    for _ in 0..max_attempts {
        let omega = sample_omega(Shape::Symmetric { n }, p, rng)?;
        let report = SparsityGraph::from_omega(&omega).analyze();
        if report.connected && !report.has_bipartite_component() {
            return Ok(omega);
        }
    }
    Err(Error::InvalidArgument(format!(
        "no connected non-bipartite pattern after {max_attempts} draws at n={n}, p={p}"
    )))
}

/// Independently corrupts each pair of `omega` with probability `density`.
pub fn sample_noise<T: Real, R: Rng + ?Sized>(omega: &MeasurementSet, model: &NoiseModel, rng: &mut R) -> SparseNoise<T> {
    let mut entries = Vec::new();
    for &pair in omega.pairs() {
        if rng.random_bool(model.density) {
            let v = match model.value {
                NoiseValue::Constant(v) => v,
                NoiseValue::Uniform(lo, hi) => rng.random_range(lo..hi),
                NoiseValue::SignedConstant(v) => {
                    if rng.random_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                }
            };
            entries.push((pair, T::lit(v)));
        }
    }
    SparseNoise::from_entries(entries)
}

fn uniform_positive<T: Real, R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> T {
    loop {
        let x = lo + (hi - lo) * rng.random::<f64>();
        if x > 0.0 {
            return T::lit(x);
        }
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo >= 0.0 && lo < hi && hi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("truth range [{lo}, {hi}) must satisfy 0 <= lo < hi")))
    }
}

/// I.i.d. `U[lo, hi)` entries; exact zeros are redrawn.
pub fn gen_truth<T: Real, R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Result<ComponentVector<T>> {
    check_range(lo, hi)?;
    ComponentVector::new((0..n).map(|_| uniform_positive(lo, hi, rng)).collect())
}

/// `n × r` factor with i.i.d. `U[lo, hi)` entries drawn row-major.
pub fn gen_truth_matrix<T: Real, R: Rng + ?Sized>(
    n: usize,
    r: usize,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<ComponentMatrix<T>> {
    check_range(lo, hi)?;
    ComponentMatrix::new(n, r, (0..n * r).map(|_| uniform_positive(lo, hi, rng)).collect())
}

/// `u*` with a zero at `zero_index` and ones elsewhere, all pairs observed
/// except `(zero_index, zero_index)`, no noise. For `n = 3`, `zero_index = 2`
/// the point `e_3` is a spurious local minimum of the ℓ1 loss.
pub fn build_prop1_counterexample<T: Real>(n: usize, zero_index: usize) -> Result<Instance<T>> {
    if n < 2 || zero_index >= n {
        return Err(Error::InvalidArgument(format!("need n >= 2 and zero_index < n (got {n}, {zero_index})")));
    }
    let truth: Vec<T> = (0..n).map(|k| if k == zero_index { T::zero() } else { T::one() }).collect();
    let pairs = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).filter(|&(i, j)| !(i == zero_index && j == zero_index));
    Instance::symmetric(ComponentVector::new(truth)?, MeasurementSet::symmetric(n, pairs)?, SparseNoise::empty())
}

/// Noiseless instance on `omega` plus a second zero-loss point obtained by
/// rescaling one bipartite component: with `ε = 0.01 u_min` and `r` the
/// first vertex of the component,
/// `û_i = u_i (1 + ε/u_r)` on the side of `r` and `û_i = u_i − u_i ε/(u_r + ε)`
/// on the other side, so every product across the cut is unchanged.
pub fn build_bipartite_counterexample<T: Real>(
    u_star: ComponentVector<T>,
    omega: MeasurementSet,
) -> Result<(Instance<T>, Vec<T>)> {
    if !u_star.is_strictly_positive() {
        return Err(Error::NotStrictlyPositive(u_star.min().to_f64_lossy()));
    }
    let graph = SparsityGraph::from_omega(&omega);
    if graph.bipartite_shape().is_some() {
        return Err(Error::InvalidArgument("expected a symmetric measurement set".into()));
    }
    let report = graph.analyze();
    let candidates: Vec<usize> = (0..report.component_count()).filter(|&c| report.bipartite[c]).collect();
    let chosen = candidates
        .iter()
        .copied()
        .find(|&c| report.components[c].len() > 1)
        .or_else(|| candidates.first().copied())
        .ok_or(Error::NotBipartite)?;
    let (near, far) = graph
        .bipartition(report.components[chosen][0])
        .expect("component flagged bipartite has a two-colouring");
    let inst = Instance::symmetric(u_star, omega, SparseNoise::empty())?;
    let u = inst.truth_vector().expect("symmetric instance has a vector truth");
    let eps = T::lit(0.01) * u.iter().copied().fold(T::infinity(), T::min);
    let ur = u[near[0]];
    let mut hat = u.to_vec();
    for &i in &near {
        hat[i] = u[i] + u[i] / ur * eps;
    }
    for &i in &far {
        hat[i] = u[i] - u[i] / (ur + eps) * eps;
    }
    Ok((inst, hat))
}
