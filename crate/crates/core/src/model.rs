//! Problem instances of the spiked model `X = U* U*ᵀ + S` (or `u* v*ᵀ + S`)
//! observed on an index set Ω.
//!
//! All indices are zero-based in the API. Symmetric measurement sets store
//! each unordered pair once as `(i, j)` with `i <= j`; diagonal pairs are
//! ordinary measurements (self-loops of the sparsity graph).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{max_of, min_of, Real};

/// Non-negative component vector (`u*`, `v*`, or an iterate).
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentVector<T> {
    entries: Vec<T>,
}

impl<T: Real> ComponentVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("component vector must be non-empty".into()));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite() || **v < T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "component entries must be finite and non-negative, got {bad}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<T> {
        self.entries
    }

    pub fn max(&self) -> T {
        max_of(&self.entries)
    }

    pub fn min(&self) -> T {
        min_of(&self.entries)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.min() > T::zero()
    }

    pub fn condition_number(&self) -> Result<T> {
        condition_number(&self.entries)
    }
}

/// `κ(x) = x_max / x_min` for a strictly positive vector.
pub fn condition_number<T: Real>(x: &[T]) -> Result<T> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("empty vector".into()));
    }
    let lo = min_of(x);
    if lo <= T::zero() || lo.is_nan() {
        return Err(Error::NotStrictlyPositive(lo.to_f64_lossy()));
    }
    Ok(max_of(x) / lo)
}

/// Non-negative `rows × rank` factor, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMatrix<T> {
    rows: usize,
    rank: usize,
    entries: Vec<T>,
}

impl<T: Real> ComponentMatrix<T> {
    pub fn new(rows: usize, rank: usize, entries: Vec<T>) -> Result<Self> {
        if rows == 0 || rank == 0 {
            return Err(Error::InvalidArgument("factor must have rows >= 1 and rank >= 1".into()));
        }
        if entries.len() != rows * rank {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{rank} factor, got {}",
                rows * rank,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidArgument("factor entries must be finite and non-negative".into()));
        }
        Ok(Self { rows, rank, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.rank..(i + 1) * self.rank]
    }

    /// `⟨U_i, U_j⟩` accumulated from zero in column order.
    pub fn gram(&self, i: usize, j: usize) -> T {
        row_dot(self.row(i), self.row(j))
    }
}

pub(crate) fn row_dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + *x * *y;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Pairs `(i, j)` with `i <= j < n`.
    Symmetric { n: usize },
    /// Pairs `(i, j)` with `i < m`, `j < n`.
    Asymmetric { m: usize, n: usize },
}

impl Shape {
    /// Number of candidate index pairs.
    pub fn capacity(&self) -> usize {
        match *self {
            Shape::Symmetric { n } => n * (n + 1) / 2,
            Shape::Asymmetric { m, n } => m * n,
        }
    }

    /// Vertex count of the (bipartite) sparsity graph.
    pub fn vertex_count(&self) -> usize {
        match *self {
            Shape::Symmetric { n } => n,
            Shape::Asymmetric { m, n } => m + n,
        }
    }
}

/// Observed index set Ω. Pairs are kept sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementSet {
    shape: Shape,
    pairs: Vec<(usize, usize)>,
}

impl MeasurementSet {
    /// Symmetric set on `n` indices; `(i, j)` and `(j, i)` denote the same pair.
    pub fn symmetric<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = Vec::new();
        for (i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange(i, j));
            }
            out.push((i.min(j), i.max(j)));
        }
        Ok(Self::from_sorted(Shape::Symmetric { n }, out))
    }

    pub fn asymmetric<I>(m: usize, n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = Vec::new();
        for (i, j) in pairs {
            if i >= m || j >= n {
                return Err(Error::IndexOutOfRange(i, j));
            }
            out.push((i, j));
        }
        Ok(Self::from_sorted(Shape::Asymmetric { m, n }, out))
    }

    pub fn full_symmetric(n: usize) -> Self {
        let pairs = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        Self { shape: Shape::Symmetric { n }, pairs }
    }

    pub fn full_asymmetric(m: usize, n: usize) -> Self {
        let pairs = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        Self { shape: Shape::Asymmetric { m, n }, pairs }
    }

    fn from_sorted(shape: Shape, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Self { shape, pairs }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn normalize(&self, i: usize, j: usize) -> (usize, usize) {
        match self.shape {
            Shape::Symmetric { .. } => (i.min(j), i.max(j)),
            Shape::Asymmetric { .. } => (i, j),
        }
    }

    /// Position of a pair in [`pairs`](Self::pairs).
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        self.pairs.binary_search(&self.normalize(i, j)).ok()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.position(i, j).is_some()
    }
}

/// Sparse corruption `S`. Zero values are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseNoise<T> {
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: Real> SparseNoise<T> {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// Build from `(i, j, value)` triples. For symmetric use the key is
    /// normalised by the instance constructor, so either orientation works.
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = ((usize, usize), T)>,
    {
        let entries = entries.into_iter().filter(|(_, v)| *v != T::zero()).collect();
        Self { entries }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries.get(&(i, j)).copied().unwrap_or_else(T::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    fn normalized(&self, shape: Shape) -> Self {
        match shape {
            Shape::Asymmetric { .. } => self.clone(),
            Shape::Symmetric { .. } => Self {
                entries: self.entries.iter().map(|(&(i, j), &v)| ((i.min(j), i.max(j)), v)).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Symmetric,
    Asymmetric,
    RankR(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Truth<T> {
    Symmetric(ComponentVector<T>),
    Asymmetric { u: ComponentVector<T>, v: ComponentVector<T> },
    RankR(ComponentMatrix<T>),
    /// Observed data without a known decomposition (e.g. video frames).
    Unknown,
}

/// An observed instance: truth, Ω, sparse noise and the observed values
/// `X_ij` for every `(i, j) ∈ Ω` (same order as `omega.pairs()`).
#[derive(Debug, Clone)]
pub struct Instance<T> {
    truth: Truth<T>,
    omega: MeasurementSet,
    noise: SparseNoise<T>,
    observed: Vec<T>,
    bad: Vec<bool>,
}

impl<T: Real> Instance<T> {
    /// `X_ij = u*_i u*_j + S_ij` on a symmetric Ω.
    pub fn symmetric(u_star: ComponentVector<T>, omega: MeasurementSet, noise: SparseNoise<T>) -> Result<Self> {
        let n = u_star.len();
        match omega.shape() {
            Shape::Symmetric { n: on } if on == n => {}
            other => {
                return Err(Error::Dimension(format!(
                    "symmetric instance of size {n} needs a symmetric Ω on {n} indices, got {other:?}"
                )))
            }
        }
        let u = u_star.as_slice().to_vec();
        Self::assemble(Truth::Symmetric(u_star), omega, noise, |i, j| u[i] * u[j])
    }

    /// `X_ij = u*_i v*_j + S_ij` on an `m × n` Ω.
    pub fn asymmetric(
        u_star: ComponentVector<T>,
        v_star: ComponentVector<T>,
        omega: MeasurementSet,
        noise: SparseNoise<T>,
    ) -> Result<Self> {
        let (m, n) = (u_star.len(), v_star.len());
        match omega.shape() {
            Shape::Asymmetric { m: om, n: on } if om == m && on == n => {}
            other => {
                return Err(Error::Dimension(format!(
                    "asymmetric instance {m}x{n} needs an asymmetric Ω of the same shape, got {other:?}"
                )))
            }
        }
        let (u, v) = (u_star.as_slice().to_vec(), v_star.as_slice().to_vec());
        Self::assemble(Truth::Asymmetric { u: u_star, v: v_star }, omega, noise, |i, j| u[i] * v[j])
    }

    /// `X_ij = ⟨U*_i, U*_j⟩ + S_ij` on a symmetric Ω.
    pub fn rank_r(u_star: ComponentMatrix<T>, omega: MeasurementSet, noise: SparseNoise<T>) -> Result<Self> {
        let n = u_star.rows();
        if u_star.rank() > n {
            return Err(Error::InvalidArgument(format!("rank {} exceeds dimension {n}", u_star.rank())));
        }
        match omega.shape() {
            Shape::Symmetric { n: on } if on == n => {}
            other => {
                return Err(Error::Dimension(format!(
                    "rank-r instance of size {n} needs a symmetric Ω on {n} indices, got {other:?}"
                )))
            }
        }
        let factor = u_star.clone();
        Self::assemble(Truth::RankR(u_star), omega, noise, |i, j| factor.gram(i, j))
    }

    /// Instance from raw observations `values`, aligned with `omega.pairs()`,
    /// with no known truth and no noise split.
    pub fn from_observations(omega: MeasurementSet, values: Vec<T>) -> Result<Self> {
        if values.len() != omega.len() {
            return Err(Error::Dimension(format!("{} values for {} observed pairs", values.len(), omega.len())));
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("observation {x} is not finite")));
        }
        let bad = vec![false; values.len()];
        Ok(Self { truth: Truth::Unknown, omega, noise: SparseNoise::empty(), observed: values, bad })
    }

    fn assemble(
        truth: Truth<T>,
        omega: MeasurementSet,
        noise: SparseNoise<T>,
        signal: impl Fn(usize, usize) -> T,
    ) -> Result<Self> {
        let noise = noise.normalized(omega.shape());
        for ((i, j), _) in noise.iter() {
            if !omega.contains(i, j) {
                return Err(Error::NoiseOutsideOmega(i, j));
            }
        }
        let mut observed = Vec::with_capacity(omega.len());
        let mut bad = Vec::with_capacity(omega.len());
        for &(i, j) in omega.pairs() {
            let s = noise.get(i, j);
            observed.push(signal(i, j) + s);
            bad.push(s != T::zero());
        }
        Ok(Self { truth, omega, noise, observed, bad })
    }

    pub fn kind(&self) -> Kind {
        match &self.truth {
            Truth::Symmetric(_) => Kind::Symmetric,
            Truth::Asymmetric { .. } => Kind::Asymmetric,
            Truth::RankR(f) => Kind::RankR(f.rank()),
            Truth::Unknown => match self.omega.shape() {
                Shape::Symmetric { .. } => Kind::Symmetric,
                Shape::Asymmetric { .. } => Kind::Asymmetric,
            },
        }
    }

    pub fn truth(&self) -> &Truth<T> {
        &self.truth
    }

    /// Ground-truth vector for symmetric instances.
    pub fn truth_vector(&self) -> Option<&[T]> {
        match &self.truth {
            Truth::Symmetric(u) => Some(u.as_slice()),
            _ => None,
        }
    }

    pub fn omega(&self) -> &MeasurementSet {
        &self.omega
    }

    pub fn noise(&self) -> &SparseNoise<T> {
        &self.noise
    }

    /// Observed values aligned with `omega().pairs()`.
    pub fn observed(&self) -> &[T] {
        &self.observed
    }

    pub fn observed_at(&self, i: usize, j: usize) -> Option<T> {
        self.omega.position(i, j).map(|k| self.observed[k])
    }

    /// Row dimension (`n` for symmetric/rank-r, `m` for asymmetric).
    pub fn rows(&self) -> usize {
        match self.omega.shape() {
            Shape::Symmetric { n } => n,
            Shape::Asymmetric { m, .. } => m,
        }
    }

    /// Bad measurements `B = {(i,j) ∈ Ω : S_ij ≠ 0}`.
    pub fn bad_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.omega.pairs().iter().zip(&self.bad).filter(|(_, b)| **b).map(|(p, _)| *p)
    }

    /// Good measurements `G = Ω \ B`.
    pub fn good_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.omega.pairs().iter().zip(&self.bad).filter(|(_, b)| !**b).map(|(p, _)| *p)
    }

    pub fn is_bad(&self, k: usize) -> bool {
        self.bad[k]
    }
}

/// Symmetric embedding of an asymmetric instance on `m + n` indices.
///
/// Pair `(i, j)` of the original maps to `(i, j + m)`. The stored truth
/// `w* = [u*; v*]` is rescaled so that `‖u*‖ = ‖v*‖`, which leaves `u* v*ᵀ`
/// unchanged and makes `w*` the balanced minimiser of the regularised problem.
#[derive(Debug, Clone)]
pub struct SymmetrizedInstance<T> {
    inner: Instance<T>,
    split: (usize, usize),
    alpha: T,
}

pub const DEFAULT_ALPHA: f64 = 1.0;

/// Symmetrize an asymmetric instance (balance weight `alpha > 0`).
pub fn symmetrize<T: Real>(inst: &Instance<T>, alpha: T) -> Result<SymmetrizedInstance<T>> {
    let (m, n) = match inst.omega().shape() {
        Shape::Asymmetric { m, n } => (m, n),
        Shape::Symmetric { .. } => {
            return Err(Error::InvalidArgument("symmetrize expects an asymmetric instance".into()))
        }
    };
    if !(alpha > T::zero()) {
        return Err(Error::InvalidArgument("balance weight alpha must be positive".into()));
    }
    let truth = match inst.truth() {
        Truth::Asymmetric { u, v } => {
            let (u, v) = (u.as_slice(), v.as_slice());
            let nu = u.iter().map(|&x| x * x).sum::<T>().sqrt();
            let nv = v.iter().map(|&x| x * x).sum::<T>().sqrt();
            let scale = if nu > T::zero() && nv > T::zero() { (nv / nu).sqrt() } else { T::one() };
            let mut w: Vec<T> = u.iter().map(|&x| x * scale).collect();
            w.extend(v.iter().map(|&x| x / scale));
            Truth::Symmetric(ComponentVector::new(w)?)
        }
        _ => Truth::Unknown,
    };

    let pairs: Vec<(usize, usize)> = inst.omega().pairs().iter().map(|&(i, j)| (i, j + m)).collect();
    let observed: Vec<T> = inst.observed().to_vec();
    let bad: Vec<bool> = inst.bad.clone();
    let noise = SparseNoise { entries: inst.noise().iter().map(|((i, j), s)| ((i, j + m), s)).collect() };
    let omega = MeasurementSet { shape: Shape::Symmetric { n: m + n }, pairs };
    debug_assert!(omega.pairs.windows(2).all(|p| p[0] < p[1]));
    let inner = Instance {
        truth,
        omega,
        noise,
        observed,
        bad,
    };
    Ok(SymmetrizedInstance { inner, split: (m, n), alpha })
}

impl<T: Real> SymmetrizedInstance<T> {
    /// The embedded symmetric instance on `m + n` indices.
    pub fn instance(&self) -> &Instance<T> {
        &self.inner
    }

    pub fn split(&self) -> (usize, usize) {
        self.split
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Balanced concatenated truth `w*`, when the truth is known.
    pub fn truth_vector(&self) -> Option<&[T]> {
        self.inner.truth_vector()
    }
}

fn frobenius_ratio<T: Real>(
    rows: usize,
    cols: usize,
    estimate: impl Fn(usize, usize) -> T,
    truth: impl Fn(usize, usize) -> T,
) -> Result<T> {
    let (mut diff, mut base) = (T::zero(), T::zero());
    for i in 0..rows {
        for j in 0..cols {
            let t = truth(i, j);
            let e = estimate(i, j) - t;
            diff = diff + e * e;
            base = base + t * t;
        }
    }
    if base == T::zero() {
        return Err(Error::ZeroTruth);
    }
    Ok((diff / base).sqrt())
}

/// `‖uuᵀ − u*u*ᵀ‖_F / ‖u*u*ᵀ‖_F`.
pub fn recovery_error<T: Real>(u: &[T], truth: &[T]) -> Result<T> {
    if u.len() != truth.len() {
        return Err(Error::Dimension(format!("iterate has {} entries, truth {}", u.len(), truth.len())));
    }
    let n = u.len();
    frobenius_ratio(n, n, |i, j| u[i] * u[j], |i, j| truth[i] * truth[j])
}

/// `‖uvᵀ − u*v*ᵀ‖_F / ‖u*v*ᵀ‖_F`.
pub fn recovery_error_asymmetric<T: Real>(u: &[T], v: &[T], u_star: &[T], v_star: &[T]) -> Result<T> {
    if u.len() != u_star.len() || v.len() != v_star.len() {
        return Err(Error::Dimension("asymmetric factors do not match the truth".into()));
    }
    frobenius_ratio(u.len(), v.len(), |i, j| u[i] * v[j], |i, j| u_star[i] * v_star[j])
}

/// `‖UUᵀ − U*U*ᵀ‖_F / ‖U*U*ᵀ‖_F`; the two factors may have different ranks.
pub fn recovery_error_factor<T: Real>(u: &[T], rank: usize, truth: &ComponentMatrix<T>) -> Result<T> {
    let n = truth.rows();
    if rank == 0 || u.len() != n * rank {
        return Err(Error::Dimension(format!("factor has {} entries, expected {n}x{rank}", u.len())));
    }
    let row = |i: usize| &u[i * rank..(i + 1) * rank];
    frobenius_ratio(n, n, |i, j| row_dot(row(i), row(j)), |i, j| truth.gram(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(x: &[f64]) -> ComponentVector<f64> {
        ComponentVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn noiseless_rank_one_observations() {
        let omega = MeasurementSet::symmetric(2, [(0, 0), (0, 1), (1, 1)]).unwrap();
        let inst = Instance::symmetric(cv(&[1.0, 1.0]), omega, SparseNoise::empty()).unwrap();
        assert_eq!(inst.observed(), &[1.0, 1.0, 1.0]);
        assert_eq!(inst.bad_pairs().count(), 0);
        assert_eq!(inst.good_pairs().count(), 3);
    }

    #[test]
    fn corrupted_entry_is_bad() {
        let omega = MeasurementSet::symmetric(2, [(0, 1)]).unwrap();
        let noise = SparseNoise::from_entries([((0, 1), 3.0)]);
        let inst = Instance::symmetric(cv(&[1.0, 2.0]), omega, noise).unwrap();
        assert_eq!(inst.observed_at(0, 1), Some(5.0));
        assert_eq!(inst.observed_at(1, 0), Some(5.0));
        assert_eq!(inst.bad_pairs().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn zero_entry_shape_observations() {
        let pairs = (0..3).flat_map(|i| (i..3).map(move |j| (i, j))).filter(|&p| p != (2, 2));
        let omega = MeasurementSet::symmetric(3, pairs).unwrap();
        let inst = Instance::symmetric(cv(&[1.0, 1.0, 0.0]), omega, SparseNoise::empty()).unwrap();
        // pairs in order (0,0) (0,1) (0,2) (1,1) (1,2)
        assert_eq!(inst.observed(), &[1.0, 1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn symmetric_pairs_are_normalised_and_deduplicated() {
        let omega = MeasurementSet::symmetric(3, [(2, 0), (0, 2), (1, 1)]).unwrap();
        assert_eq!(omega.pairs(), &[(0, 2), (1, 1)]);
        assert!(omega.contains(2, 0));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(MeasurementSet::symmetric(2, [(0, 2)]), Err(Error::IndexOutOfRange(0, 2))));
        let omega = MeasurementSet::symmetric(2, [(0, 0)]).unwrap();
        assert!(matches!(
            Instance::symmetric(cv(&[1.0, 1.0, 1.0]), omega.clone(), SparseNoise::empty()),
            Err(Error::Dimension(_))
        ));
        let noise = SparseNoise::from_entries([((0, 1), 1.0)]);
        assert!(matches!(
            Instance::symmetric(cv(&[1.0, 1.0]), omega, noise),
            Err(Error::NoiseOutsideOmega(0, 1))
        ));
        assert!(ComponentVector::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn asymmetric_observations() {
        let omega = MeasurementSet::full_asymmetric(1, 2);
        let inst = Instance::asymmetric(cv(&[1.0]), cv(&[1.0, 1.0]), omega, SparseNoise::empty()).unwrap();
        assert_eq!(inst.observed(), &[1.0, 1.0]);

        let omega = MeasurementSet::asymmetric(2, 2, [(0, 1), (1, 0)]).unwrap();
        let noise = SparseNoise::from_entries([((1, 0), -0.5)]);
        let inst = Instance::asymmetric(cv(&[2.0, 1.0]), cv(&[1.0, 3.0]), omega, noise).unwrap();
        assert_eq!(inst.observed_at(0, 1), Some(6.0));
        assert_eq!(inst.observed_at(1, 0), Some(0.5));
    }

    #[test]
    fn symmetrize_shifts_columns() {
        let omega = MeasurementSet::full_asymmetric(1, 1);
        let inst = Instance::asymmetric(cv(&[1.0]), cv(&[1.0]), omega, SparseNoise::empty()).unwrap();
        let sym = symmetrize(&inst, 1.0).unwrap();
        assert_eq!(sym.instance().omega().pairs(), &[(0, 1)]);

        let omega = MeasurementSet::full_asymmetric(2, 3);
        let noise = SparseNoise::from_entries([((0, 1), 4.0)]);
        let inst = Instance::asymmetric(cv(&[1.0, 2.0]), cv(&[1.0, 1.0, 3.0]), omega, noise).unwrap();
        let sym = symmetrize(&inst, 1.0).unwrap();
        assert!(sym.instance().omega().contains(1, 4));
        assert_eq!(sym.instance().noise().get(0, 3), 4.0);
        assert_eq!(sym.instance().observed_at(1, 4), inst.observed_at(1, 2));
        assert_eq!(sym.split(), (2, 3));
        assert!(symmetrize(&inst, 0.0).is_err());
    }

    #[test]
    fn symmetrized_truth_is_balanced() {
        let omega = MeasurementSet::full_asymmetric(2, 2);
        let inst = Instance::asymmetric(cv(&[4.0, 4.0]), cv(&[1.0, 1.0]), omega, SparseNoise::empty()).unwrap();
        let sym = symmetrize(&inst, 1.0).unwrap();
        let w = sym.truth_vector().unwrap();
        let su: f64 = w[..2].iter().map(|x| x * x).sum();
        let sv: f64 = w[2..].iter().map(|x| x * x).sum();
        assert!((su - sv).abs() < 1e-12);
        assert!((w[0] * w[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn condition_numbers() {
        assert_eq!(condition_number(&[2.0, 2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(condition_number(&[1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(condition_number(&[0.5, 2.5]).unwrap(), 5.0);
        assert!(matches!(condition_number(&[0.0, 1.0]), Err(Error::NotStrictlyPositive(_))));
    }

    #[test]
    fn recovery_error_examples() {
        let t = [1.0, 2.0, 0.5];
        assert_eq!(recovery_error(&t, &t).unwrap(), 0.0);
        let doubled: Vec<f64> = t.iter().map(|x| 2.0 * x).collect();
        assert!((recovery_error(&doubled, &t).unwrap() - 3.0).abs() < 1e-12);
        // brute force: uuᵀ = diag(1,0), u*u*ᵀ = diag(0,1)
        let e = recovery_error(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((e - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(recovery_error(&[1.0], &[0.0]), Err(Error::ZeroTruth)));
    }

    #[test]
    fn rank_r_observations_match_gram() {
        let f = ComponentMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let inst = Instance::rank_r(f.clone(), MeasurementSet::full_symmetric(2), SparseNoise::empty()).unwrap();
        assert_eq!(inst.observed(), &[5.0, 11.0, 25.0]);
        assert_eq!(recovery_error_factor(f.as_slice(), 2, &f).unwrap(), 0.0);
        assert_eq!(inst.kind(), Kind::RankR(2));
    }
}
