//! The non-smooth ℓ1 objectives, their exact one-sided directional
//! derivatives, a subgradient selection, and constructive descent directions.
//!
//! For a symmetric instance the objective is
//!
//! ```text
//! f(u) = Σ_{(i,j)∈Ω} |u_i u_j − X_ij| + λ Σ_i max(u_i − β, 0)⁴
//! ```
//!
//! with every stored pair counted once. Asymmetric problems are evaluated on
//! their symmetric embedding `w = [u; v]` and add the balance penalty
//! `α |Σ_{i<m} w_i² − Σ_{i≥m} w_i²|`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{Instance, Shape, SymmetrizedInstance};
use crate::scalar::{norm2, Real};

/// Relative tolerance when grouping indices by extremal ratio.
pub const RATIO_TIE_TOL: f64 = 1e-9;
/// A directional derivative below `-STATIONARITY_TOL` certifies descent.
pub const STATIONARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// ℓ1 loss only.
    NoiselessSym,
    /// ℓ1 loss on the symmetric embedding plus balance penalty.
    NoiselessAsym,
    /// ℓ1 loss plus the quartic regulariser.
    RegularizedSym,
    /// ℓ1 loss, balance penalty and quartic regulariser.
    RegularizedAsym,
}

impl Variant {
    pub fn is_asymmetric(self) -> bool {
        matches!(self, Variant::NoiselessAsym | Variant::RegularizedAsym)
    }

    pub fn is_regularized(self) -> bool {
        matches!(self, Variant::RegularizedSym | Variant::RegularizedAsym)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveSpec<T> {
    pub variant: Variant,
    pub lambda: T,
    pub beta: T,
    pub alpha: T,
}

impl<T: Real> ObjectiveSpec<T> {
    pub fn noiseless_sym() -> Self {
        Self { variant: Variant::NoiselessSym, lambda: T::zero(), beta: T::one(), alpha: T::one() }
    }

    pub fn noiseless_asym(alpha: T) -> Self {
        Self { variant: Variant::NoiselessAsym, lambda: T::zero(), beta: T::one(), alpha }
    }

    /// `β = 1`, `λ = n/2`.
    pub fn regularized_sym(n: usize) -> Self {
        Self {
            variant: Variant::RegularizedSym,
            lambda: T::lit(n as f64 / 2.0),
            beta: T::one(),
            alpha: T::one(),
        }
    }

    /// `β = 1`, `λ = (m+n)/2`.
    pub fn regularized_asym(m: usize, n: usize, alpha: T) -> Self {
        Self {
            variant: Variant::RegularizedAsym,
            lambda: T::lit((m + n) as f64 / 2.0),
            beta: T::one(),
            alpha,
        }
    }

    fn effective_lambda(&self) -> T {
        if self.variant.is_regularized() {
            self.lambda
        } else {
            T::zero()
        }
    }
}

/// `R(u) = λ Σ max(u_i − β, 0)⁴`.
pub fn eval_regularizer<T: Real>(u: &[T], lambda: T, beta: T) -> T {
    lambda * u.iter().map(|&x| (x - beta).max(T::zero()).powi(4)).sum::<T>()
}

/// An objective bound to an instance.
#[derive(Debug, Clone)]
pub struct Objective<'a, T> {
    pairs: &'a [(usize, usize)],
    values: &'a [T],
    dim: usize,
    split: Option<usize>,
    lambda: T,
    beta: T,
    alpha: T,
    truth: Option<&'a [T]>,
    spec: ObjectiveSpec<T>,
}

/// How a [`DirectionReport`] direction was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Extremal-ratio sets `T1`, `T2`, `N` (with the γ correction on
    /// asymmetric problems).
    ExtremalRatio,
    /// Rescaling `u ↓, v ↑` (or the reverse) that reduces the balance
    /// penalty when `uvᵀ` already matches the truth.
    BalanceRescaling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport<T> {
    pub direction: Vec<T>,
    pub forward: T,
    pub backward: T,
    /// Indices with `u*_i / u_i` at the extremal ratio (under-estimated).
    pub t1: Vec<usize>,
    /// Indices with `u_i / u*_i` at the extremal ratio (over-estimated).
    pub t2: Vec<usize>,
    pub neutral: Vec<usize>,
    /// Extremal ratio `max_i max(u*_i/u_i, u_i/u*_i)`.
    pub ratio: T,
    pub gamma: Option<T>,
    pub construction: Construction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stationarity<T> {
    CertifiedDescent { direction: Vec<T>, derivative: T },
    NoDescentFound { min_derivative: T, directions_tested: usize },
}

impl<T> Stationarity<T> {
    pub fn is_descent(&self) -> bool {
        matches!(self, Stationarity::CertifiedDescent { .. })
    }
}

impl<'a, T: Real> Objective<'a, T> {
    /// Symmetric variants over an instance with a symmetric Ω (symmetric or
    /// rank-r kind). The ground truth, when it is a vector, enables
    /// [`descent_direction`](Self::descent_direction).
    pub fn symmetric(inst: &'a Instance<T>, spec: ObjectiveSpec<T>) -> Result<Self> {
        if spec.variant.is_asymmetric() {
            return Err(Error::InvalidArgument(
                "asymmetric variants are evaluated on a symmetrized instance".into(),
            ));
        }
        let n = match inst.omega().shape() {
            Shape::Symmetric { n } => n,
            Shape::Asymmetric { .. } => {
                return Err(Error::InvalidArgument("symmetric objective needs a symmetric Ω".into()))
            }
        };
        Self::checked(Self {
            pairs: inst.omega().pairs(),
            values: inst.observed(),
            dim: n,
            split: None,
            lambda: spec.effective_lambda(),
            beta: spec.beta,
            alpha: spec.alpha,
            truth: inst.truth_vector(),
            spec,
        })
    }

    /// Asymmetric variants on the symmetric embedding `w = [u; v]`.
    /// The balance weight comes from `spec.alpha`.
    pub fn asymmetric(inst: &'a SymmetrizedInstance<T>, spec: ObjectiveSpec<T>) -> Result<Self> {
        if !spec.variant.is_asymmetric() {
            return Err(Error::InvalidArgument("symmetric variant used on a symmetrized instance".into()));
        }
        if !(spec.alpha > T::zero()) {
            return Err(Error::InvalidArgument("balance weight alpha must be positive".into()));
        }
        let (m, n) = inst.split();
        Self::checked(Self {
            pairs: inst.instance().omega().pairs(),
            values: inst.instance().observed(),
            dim: m + n,
            split: Some(m),
            lambda: spec.effective_lambda(),
            beta: spec.beta,
            alpha: spec.alpha,
            truth: inst.truth_vector(),
            spec,
        })
    }

    fn checked(self) -> Result<Self> {
        if self.lambda < T::zero() || !(self.beta > T::zero()) {
            return Err(Error::InvalidArgument("regulariser needs lambda >= 0 and beta > 0".into()));
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &ObjectiveSpec<T> {
        &self.spec
    }

    pub fn split(&self) -> Option<usize> {
        self.split
    }

    pub fn truth(&self) -> Option<&'a [T]> {
        self.truth
    }

    fn check_point(&self, u: &[T]) -> Result<()> {
        if u.len() != self.dim {
            return Err(Error::Dimension(format!("point has {} entries, objective expects {}", u.len(), self.dim)));
        }
        if let Some(x) = u.iter().find(|x| !(**x >= T::zero())) {
            return Err(Error::InvalidArgument(format!("point must be non-negative, found {x}")));
        }
        Ok(())
    }

    fn balance(&self, w: &[T]) -> T {
        match self.split {
            Some(m) => {
                let su: T = w[..m].iter().map(|&x| x * x).sum();
                let sv: T = w[m..].iter().map(|&x| x * x).sum();
                su - sv
            }
            None => T::zero(),
        }
    }

    /// `Σ_{(i,j)∈Ω} |u_i u_j − X_ij|`.
    pub fn loss(&self, u: &[T]) -> T {
        let mut acc = T::zero();
        for (&(i, j), &x) in self.pairs.iter().zip(self.values) {
            acc = acc + (u[i] * u[j] - x).abs();
        }
        acc
    }

    pub fn value(&self, u: &[T]) -> Result<T> {
        self.check_point(u)?;
        Ok(self.value_unchecked(u))
    }

    pub(crate) fn value_unchecked(&self, u: &[T]) -> T {
        let mut f = self.loss(u);
        if self.split.is_some() {
            f = f + self.alpha * self.balance(u).abs();
        }
        if self.lambda > T::zero() {
            f = f + eval_regularizer(u, self.lambda, self.beta);
        }
        f
    }

    pub fn regularizer(&self, u: &[T]) -> T {
        eval_regularizer(u, self.lambda, self.beta)
    }

    /// Exact one-sided derivative `lim_{t↓0} (f(u + t d) − f(u)) / t`.
    pub fn directional_derivative(&self, u: &[T], d: &[T]) -> Result<T> {
        self.check_point(u)?;
        if d.len() != self.dim {
            return Err(Error::Dimension("direction length does not match the point".into()));
        }
        if let Some(k) = (0..self.dim).find(|&k| u[k] == T::zero() && d[k] < T::zero()) {
            return Err(Error::InfeasibleDirection(k));
        }
        Ok(self.directional_derivative_unchecked(u, d))
    }

    fn directional_derivative_unchecked(&self, u: &[T], d: &[T]) -> T {
        let two = T::lit(2.0);
        let mut acc = T::zero();
        for (&(i, j), &x) in self.pairs.iter().zip(self.values) {
            let residual = u[i] * u[j] - x;
            let rate = if i == j { two * u[i] * d[i] } else { d[i] * u[j] + d[j] * u[i] };
            acc = acc + if residual == T::zero() { rate.abs() } else { residual.sign0() * rate };
        }
        if let Some(m) = self.split {
            let s = self.balance(u);
            let rate = two
                * (u[..m].iter().zip(&d[..m]).map(|(a, b)| *a * *b).sum::<T>()
                    - u[m..].iter().zip(&d[m..]).map(|(a, b)| *a * *b).sum::<T>());
            acc = acc + self.alpha * if s == T::zero() { rate.abs() } else { s.sign0() * rate };
        }
        if self.lambda > T::zero() {
            let four = T::lit(4.0);
            for (&ui, &di) in u.iter().zip(d) {
                let excess = (ui - self.beta).max(T::zero());
                acc = acc + four * self.lambda * excess.powi(3) * di;
            }
        }
        acc
    }

    /// Subgradient with `sign(0) = 0` at every kink; the gradient wherever
    /// the objective is differentiable.
    pub fn subgradient(&self, u: &[T]) -> Result<Vec<T>> {
        self.check_point(u)?;
        let mut g = vec![T::zero(); self.dim];
        self.value_and_subgradient(u, &mut g);
        Ok(g)
    }

    /// Objective value, with the subgradient written into `g`. No checks.
    pub(crate) fn value_and_subgradient(&self, u: &[T], g: &mut [T]) -> T {
        let two = T::lit(2.0);
        g.iter_mut().for_each(|x| *x = T::zero());
        let mut f = T::zero();
        for (&(i, j), &x) in self.pairs.iter().zip(self.values) {
            let residual = u[i] * u[j] - x;
            f = f + residual.abs();
            let s = residual.sign0();
            if i == j {
                g[i] = g[i] + two * s * u[i];
            } else {
                g[i] = g[i] + s * u[j];
                g[j] = g[j] + s * u[i];
            }
        }
        if let Some(m) = self.split {
            let b = self.balance(u);
            f = f + self.alpha * b.abs();
            let coef = two * self.alpha * b.sign0();
            for (k, gk) in g.iter_mut().enumerate() {
                let dk = if k < m { coef * u[k] } else { -coef * u[k] };
                *gk = *gk + dk;
            }
        }
        if self.lambda > T::zero() {
            let four = T::lit(4.0);
            for (gk, &uk) in g.iter_mut().zip(u) {
                let excess = (uk - self.beta).max(T::zero());
                f = f + self.lambda * excess.powi(4);
                *gk = *gk + four * self.lambda * excess.powi(3);
            }
        }
        f
    }

    /// Constructive descent direction at a strictly positive non-optimal
    /// point, built from the sets of indices whose ratio to the truth is
    /// extremal:
    ///
    /// * `R = max_i max(u*_i/u_i, u_i/u*_i)`;
    /// * `T1 = {i : u*_i/u_i = R}`, `T2 = {i : u_i/u*_i = R}`, `N` the rest;
    /// * `d_i = u_i/u_r` on `T1`, `−u_i/u_r` on `T2`, `0` on `N`, where `r` is
    ///   the first index of `T1` (of `T2` if `T1` is empty).
    ///
    /// Every measured pair touching `T1 ∪ T2` then moves towards its target
    /// except pairs between `T1` and `T2`, which sit exactly on a kink with
    /// zero first-order change. On asymmetric problems a rescaling term
    /// `∓γ w_i` keeps `Σ_{i<m} w_i² − Σ_{i≥m} w_i²` constant to first order;
    /// if the ℓ1 part is already matched (`uvᵀ = u*v*ᵀ`) the balance-reducing
    /// rescaling is returned instead.
    pub fn descent_direction(&self, u: &[T]) -> Result<DirectionReport<T>> {
        self.check_point(u)?;
        let truth = self
            .truth
            .ok_or_else(|| Error::InvalidArgument("descent direction needs a vector ground truth".into()))?;
        if let Some(&x) = u.iter().find(|&&x| x <= T::zero()) {
            return Err(Error::NotStrictlyPositive(x.to_f64_lossy()));
        }
        if truth.iter().any(|&x| x <= T::zero()) {
            return Err(Error::InvalidArgument("descent direction needs a strictly positive truth".into()));
        }
        let tol = T::lit(RATIO_TIE_TOL);
        let under: Vec<T> = truth.iter().zip(u).map(|(t, x)| *t / *x).collect();
        let over: Vec<T> = under.iter().map(|r| T::one() / *r).collect();
        let (mut reference, mut ratio) = (0, T::zero());
        for k in 0..self.dim {
            let e = under[k].max(over[k]);
            if e > ratio {
                ratio = e;
                reference = k;
            }
        }
        if ratio - T::one() <= tol {
            return Err(Error::AtTruth);
        }
        let cut = ratio * (T::one() - tol);
        let (mut t1, mut t2, mut neutral) = (Vec::new(), Vec::new(), Vec::new());
        for k in 0..self.dim {
            if under[k] >= cut {
                t1.push(k);
            } else if over[k] >= cut {
                t2.push(k);
            } else {
                neutral.push(k);
            }
        }
        // Scale by an under-estimated index when one exists.
        if let Some(&k) = t1.first() {
            reference = k;
        }
        let ur = u[reference];
        let mut d = vec![T::zero(); self.dim];
        for &k in &t1 {
            d[k] = u[k] / ur;
        }
        for &k in &t2 {
            d[k] = -u[k] / ur;
        }

        let mut gamma = None;
        if let Some(m) = self.split {
            // γ = (Σ_{T1u} w² − Σ_{T2u} w² − Σ_{T1v} w² + Σ_{T2v} w²) / (w_r Σ w²)
            let signed_sq = |set: &[usize], side_u: bool| -> T {
                set.iter().filter(|&&k| (k < m) == side_u).map(|&k| u[k] * u[k]).sum::<T>()
            };
            let num = signed_sq(&t1, true) - signed_sq(&t2, true) - signed_sq(&t1, false) + signed_sq(&t2, false);
            let total: T = u.iter().map(|&x| x * x).sum();
            let g = num / (ur * total);
            for (k, dk) in d.iter_mut().enumerate() {
                *dk = if k < m { *dk - u[k] * g } else { *dk + u[k] * g };
            }
            gamma = Some(g);
        }

        let mut construction = Construction::ExtremalRatio;
        let mut forward = self.directional_derivative_unchecked(u, &d);
        if let Some(m) = self.split {
            if !(forward < -T::lit(STATIONARITY_TOL)) {
                let s = self.balance(u).sign0();
                if s != T::zero() {
                    let alt: Vec<T> =
                        (0..self.dim).map(|k| if k < m { -s * u[k] / ur } else { s * u[k] / ur }).collect();
                    let alt_forward = self.directional_derivative_unchecked(u, &alt);
                    if alt_forward < forward {
                        d = alt;
                        forward = alt_forward;
                        construction = Construction::BalanceRescaling;
                    }
                }
            }
        }
        let neg: Vec<T> = d.iter().map(|&x| -x).collect();
        let backward = self.directional_derivative_unchecked(u, &neg);
        Ok(DirectionReport { direction: d, forward, backward, t1, t2, neutral, ratio, gamma, construction })
    }

    /// Falsification test for D-min-stationarity: evaluates the one-sided
    /// derivative along all feasible ±coordinate directions, the constructive
    /// direction (when available) and `budget` random unit feasible
    /// directions. `NoDescentFound` is not a proof of stationarity.
    pub fn d_stationarity_test<R: Rng + ?Sized>(&self, u: &[T], budget: usize, rng: &mut R) -> Result<Stationarity<T>> {
        self.check_point(u)?;
        let tol = T::lit(STATIONARITY_TOL);
        let mut best: Option<(Vec<T>, T)> = None;
        let mut tested = 0usize;
        let mut consider = |d: Vec<T>, best: &mut Option<(Vec<T>, T)>| {
            let v = self.directional_derivative_unchecked(u, &d);
            tested += 1;
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                *best = Some((d, v));
            }
        };
        for k in 0..self.dim {
            let mut e = vec![T::zero(); self.dim];
            e[k] = T::one();
            consider(e.clone(), &mut best);
            if u[k] > T::zero() {
                e[k] = -T::one();
                consider(e, &mut best);
            }
        }
        if u.iter().all(|&x| x > T::zero()) && self.truth.is_some() {
            if let Ok(report) = self.descent_direction(u) {
                let scale = norm2(&report.direction);
                if scale > T::zero() {
                    consider(report.direction.iter().map(|&x| x / scale).collect(), &mut best);
                }
            }
        }
        for _ in 0..budget {
            let mut d: Vec<T> = (0..self.dim)
                .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                .collect();
            for (dk, &uk) in d.iter_mut().zip(u) {
                if uk == T::zero() {
                    *dk = dk.abs();
                }
            }
            let scale = norm2(&d);
            if scale > T::zero() {
                d.iter_mut().for_each(|x| *x = *x / scale);
                consider(d, &mut best);
            }
        }
        let (direction, derivative) = best.expect("at least one direction is always tested");
        Ok(if derivative < -tol {
            Stationarity::CertifiedDescent { direction, derivative }
        } else {
            Stationarity::NoDescentFound { min_derivative: derivative, directions_tested: tested }
        })
    }
}
