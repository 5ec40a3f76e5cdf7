//! Projected subgradient method with geometrically decaying steps.
//!
//! Each iteration takes `w ← max(w − μ_k g/‖g‖, ε_pos)` with
//! `μ_k = μ_0 q^k`, optionally halving `μ_k` first while the raw step would
//! leave the positive orthant. The best iterate seen is returned.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    recovery_error, recovery_error_asymmetric, recovery_error_factor, symmetrize, Instance, Kind, Shape, Truth,
};
use crate::objective::{Objective, ObjectiveSpec};
use crate::rng::{stream, Purpose};
use crate::scalar::{norm2, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Initial step; `None` means `0.1 ‖w_0‖`.
    pub mu0: Option<f64>,
    pub decay: f64,
    pub max_iters: usize,
    pub positivity_floor: f64,
    /// Relative best-objective improvement below which a window counts as a
    /// plateau. Only checked once `μ_k ≤ √stop_tol · max(‖w_k‖, 1)`.
    pub stop_tol: f64,
    pub plateau_window: usize,
    /// Divide the subgradient by its norm before stepping.
    pub normalize_step: bool,
    /// Maximum halvings of `μ_k` per iteration to keep the raw step positive.
    pub max_halvings: u32,
    /// Stop once `μ_k < step_floor · max(‖w_k‖, 1)`.
    pub step_floor: f64,
    /// Objective trace is recorded every this many iterations.
    pub trace_every: usize,
    /// Seed for the default random start.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu0: None,
            decay: 0.995,
            max_iters: 20_000,
            positivity_floor: 1e-12,
            stop_tol: 1e-10,
            plateau_window: 100,
            max_halvings: 60,
            normalize_step: true,
            step_floor: 1e-15,
            trace_every: 50,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::InvalidArgument(format!("decay {} must lie in (0, 1)", self.decay)));
        }
        if let Some(mu0) = self.mu0 {
            if !(mu0 > 0.0) {
                return Err(Error::InvalidArgument(format!("mu0 {mu0} must be positive")));
            }
        }
        if !(self.positivity_floor > 0.0) {
            return Err(Error::InvalidArgument("positivity floor must be positive".into()));
        }
        if self.plateau_window == 0 || self.trace_every == 0 {
            return Err(Error::InvalidArgument("plateau window and trace interval must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxIters,
    /// No relative best-objective progress over a window, a zero objective,
    /// or a zero subgradient.
    Plateau,
    StepFloor,
}

#[derive(Debug, Clone)]
pub struct SolverResult<T> {
    /// Best iterate: `u`, `[u; v]`, or `U` row-major.
    pub iterate: Vec<T>,
    pub objective: T,
    /// `(iteration, objective at that iteration)`, every `trace_every` steps.
    pub trace: Vec<(usize, T)>,
    pub iterations: usize,
    pub recovery_error: Option<T>,
    pub wall_time: Duration,
    pub termination: Termination,
    split: Option<usize>,
    rank: usize,
}

impl<T: Real> SolverResult<T> {
    /// First block (`u`); the whole iterate for symmetric problems.
    pub fn u(&self) -> &[T] {
        match self.split {
            Some(m) => &self.iterate[..m],
            None => &self.iterate,
        }
    }

    /// Second block of an asymmetric solve.
    pub fn v(&self) -> Option<&[T]> {
        self.split.map(|m| &self.iterate[m..])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `Σ u_i² − Σ v_j²` for asymmetric solves.
    pub fn balance(&self) -> Option<T> {
        self.v().map(|v| self.u().iter().map(|&x| x * x).sum::<T>() - v.iter().map(|&x| x * x).sum::<T>())
    }
}

/// Evaluates the objective and writes a subgradient.
pub(crate) trait Subdifferentiable<T> {
    fn dim(&self) -> usize;
    fn value_and_subgradient(&self, w: &[T], g: &mut [T]) -> T;
}

impl<T: Real> Subdifferentiable<T> for Objective<'_, T> {
    fn dim(&self) -> usize {
        Objective::dim(self)
    }

    fn value_and_subgradient(&self, w: &[T], g: &mut [T]) -> T {
        Objective::value_and_subgradient(self, w, g)
    }
}

/// `Σ_{(i,j)∈Ω} |⟨U_i, U_j⟩ − X_ij|` over a row-major `n × r` factor.
pub(crate) struct FactorLoss<'a, T> {
    pairs: &'a [(usize, usize)],
    values: &'a [T],
    rows: usize,
    rank: usize,
}

impl<T: Real> Subdifferentiable<T> for FactorLoss<'_, T> {
    fn dim(&self) -> usize {
        self.rows * self.rank
    }

    fn value_and_subgradient(&self, w: &[T], g: &mut [T]) -> T {
        let r = self.rank;
        let two = T::lit(2.0);
        g.iter_mut().for_each(|x| *x = T::zero());
        let mut f = T::zero();
        for (&(i, j), &x) in self.pairs.iter().zip(self.values) {
            let (ri, rj) = (&w[i * r..(i + 1) * r], &w[j * r..(j + 1) * r]);
            let mut gram = T::zero();
            for k in 0..r {
                gram = gram + ri[k] * rj[k];
            }
            let residual = gram - x;
            f = f + residual.abs();
            let s = residual.sign0();
            for k in 0..r {
                if i == j {
                    g[i * r + k] = g[i * r + k] + two * s * w[i * r + k];
                } else {
                    g[i * r + k] = g[i * r + k] + s * w[j * r + k];
                    g[j * r + k] = g[j * r + k] + s * w[i * r + k];
                }
            }
        }
        f
    }
}

/// Uniform `(floor, 1]` start.
pub fn random_start<T: Real, R: Rng + ?Sized>(dim: usize, floor: f64, rng: &mut R) -> Vec<T> {
    (0..dim).map(|_| T::lit(floor + (1.0 - floor) * (1.0 - rng.random::<f64>()))).collect()
}

fn start_point<T: Real>(dim: usize, cfg: &SolverConfig, w0: Option<&[T]>) -> Result<Vec<T>> {
    match w0 {
        Some(w) => {
            if w.len() != dim {
                return Err(Error::Dimension(format!("start has {} entries, expected {dim}", w.len())));
            }
            if let Some(&x) = w.iter().find(|&&x| !(x > T::zero())) {
                return Err(Error::NotStrictlyPositive(x.to_f64_lossy()));
            }
            Ok(w.to_vec())
        }
        None => Ok(random_start(dim, cfg.positivity_floor, &mut stream(cfg.seed, 0, Purpose::Init))),
    }
}

struct Run<T> {
    best: Vec<T>,
    best_value: T,
    trace: Vec<(usize, T)>,
    iterations: usize,
    termination: Termination,
}

fn run<T: Real, P: Subdifferentiable<T>>(problem: &P, cfg: &SolverConfig, mut w: Vec<T>) -> Run<T> {
    let dim = problem.dim();
    let floor = T::lit(cfg.positivity_floor);
    let stop_tol = T::lit(cfg.stop_tol);
    let plateau_step = T::lit(cfg.stop_tol.sqrt());
    let step_floor = T::lit(cfg.step_floor);
    let decay = T::lit(cfg.decay);
    let half = T::lit(0.5);
    let mut mu = cfg.mu0.map(T::lit).unwrap_or_else(|| T::lit(0.1) * norm2(&w));
    let mut g = vec![T::zero(); dim];
    let mut best = w.clone();
    let mut best_value = T::infinity();
    // best objective at the start of each window
    let mut history: Vec<T> = Vec::with_capacity(cfg.max_iters / cfg.plateau_window + 2);
    let mut trace = Vec::new();
    let mut termination = Termination::MaxIters;
    let mut k = 0;
    while k < cfg.max_iters {
        let f = problem.value_and_subgradient(&w, &mut g);
        if k % cfg.trace_every == 0 {
            trace.push((k, f));
        }
        if f < best_value {
            best_value = f;
            best.copy_from_slice(&w);
        }
        if k % cfg.plateau_window == 0 {
            // While steps are still long the best value can sit still for a
            // whole window without the method having converged.
            let settled = mu <= plateau_step * norm2(&w).max(T::one());
            if let Some(&previous) = history.last() {
                if settled && previous - best_value <= stop_tol * previous.abs() {
                    termination = Termination::Plateau;
                    break;
                }
            }
            history.push(best_value);
        }
        let gnorm = norm2(&g);
        if f == T::zero() || gnorm == T::zero() {
            termination = Termination::Plateau;
            break;
        }
        if mu < step_floor * norm2(&w).max(T::one()) {
            termination = Termination::StepFloor;
            break;
        }
        let scale = if cfg.normalize_step { mu / gnorm } else { mu };
        let mut step = scale;
        for _ in 0..cfg.max_halvings {
            // Coordinates already on the floor are held there by the projection.
            if w.iter().zip(&g).all(|(&wi, &gi)| wi <= floor || wi - step * gi > T::zero()) {
                break;
            }
            step = step * half;
        }
        for (wi, &gi) in w.iter_mut().zip(&g) {
            *wi = (*wi - step * gi).max(floor);
        }
        debug_assert!(w.iter().all(|&x| x >= floor));
        mu = mu * decay;
        k += 1;
    }
    if k == cfg.max_iters {
        let f = problem.value_and_subgradient(&w, &mut g);
        if f < best_value {
            best_value = f;
            best.copy_from_slice(&w);
        }
    }
    if trace.last().map(|t| t.0) != Some(k) {
        trace.push((k, best_value));
    }
    Run { best, best_value, trace, iterations: k, termination }
}

fn finish<T: Real>(r: Run<T>, started: Instant, split: Option<usize>, rank: usize, err: Option<T>) -> SolverResult<T> {
    SolverResult {
        iterate: r.best,
        objective: r.best_value,
        trace: r.trace,
        iterations: r.iterations,
        recovery_error: err,
        wall_time: started.elapsed(),
        termination: r.termination,
        split,
        rank,
    }
}

/// Rescales the best `[u; v]` to `(s u, v / s)` with `‖s u‖ = ‖v / s‖`.
/// The product `u vᵀ` is unchanged, so the balance term drops to zero; the
/// result is kept only if the full objective does not increase.
fn rebalance<T: Real>(objective: &Objective<'_, T>, r: &mut Run<T>, m: usize, floor: T) {
    let (u, v) = r.best.split_at(m);
    let su: T = u.iter().map(|&x| x * x).sum();
    let sv: T = v.iter().map(|&x| x * x).sum();
    if !(su > T::zero() && sv > T::zero()) {
        return;
    }
    let s = (sv / su).sqrt().sqrt();
    let candidate: Vec<T> =
        r.best.iter().enumerate().map(|(k, &x)| if k < m { x * s } else { x / s }.max(floor)).collect();
    if let Ok(value) = objective.value(&candidate) {
        if value <= r.best_value {
            r.best = candidate;
            r.best_value = value;
        }
    }
}

/// Minimises a symmetric objective (`NoiselessSym` or `RegularizedSym`).
pub fn solve_symmetric<T: Real>(
    inst: &Instance<T>,
    spec: &ObjectiveSpec<T>,
    cfg: &SolverConfig,
    u0: Option<&[T]>,
) -> Result<SolverResult<T>> {
    cfg.validate()?;
    let started = Instant::now();
    let objective = Objective::symmetric(inst, *spec)?;
    let w = start_point(objective.dim(), cfg, u0)?;
    let r = run(&objective, cfg, w);
    let err = match inst.truth() {
        Truth::Symmetric(t) => Some(recovery_error(&r.best, t.as_slice())?),
        Truth::RankR(t) => Some(recovery_error_factor(&r.best, 1, t)?),
        Truth::Asymmetric { .. } | Truth::Unknown => None,
    };
    Ok(finish(r, started, None, 1, err))
}

/// Minimises an asymmetric objective on the symmetric embedding with
/// balance weight `spec.alpha`. The iterate is `[u; v]`. The returned
/// iterate is rescaled to `(s u, v / s)` with equal block norms whenever that
/// does not raise the objective.
pub fn solve_asymmetric<T: Real>(
    inst: &Instance<T>,
    spec: &ObjectiveSpec<T>,
    cfg: &SolverConfig,
    w0: Option<&[T]>,
) -> Result<SolverResult<T>> {
    cfg.validate()?;
    let started = Instant::now();
    let sym = symmetrize(inst, spec.alpha)?;
    let objective = Objective::asymmetric(&sym, *spec)?;
    let w = start_point(objective.dim(), cfg, w0)?;
    let (m, _) = sym.split();
    let mut r = run(&objective, cfg, w);
    rebalance(&objective, &mut r, m, T::lit(cfg.positivity_floor));
    let err = match inst.truth() {
        Truth::Asymmetric { u, v } => Some(recovery_error_asymmetric(&r.best[..m], &r.best[m..], u.as_slice(), v.as_slice())?),
        _ => None,
    };
    Ok(finish(r, started, Some(m), 1, err))
}

/// Minimises `Σ_Ω |⟨U_i, U_j⟩ − X_ij|` over non-negative `n × r` factors.
/// With `r = 1` the iterates coincide with [`solve_symmetric`] on the
/// unregularised objective.
pub fn solve_rank_r<T: Real>(inst: &Instance<T>, cfg: &SolverConfig, u0: Option<&[T]>) -> Result<SolverResult<T>> {
    cfg.validate()?;
    let started = Instant::now();
    let rank = match inst.kind() {
        Kind::RankR(r) => r,
        Kind::Symmetric => 1,
        Kind::Asymmetric => return Err(Error::InvalidArgument("rank-r solver needs a symmetric Ω".into())),
    };
    let rows = match inst.omega().shape() {
        Shape::Symmetric { n } => n,
        Shape::Asymmetric { .. } => unreachable!("kind checked above"),
    };
    if rank == 0 || rank > rows {
        return Err(Error::InvalidArgument(format!("rank {rank} must lie in 1..={rows}")));
    }
    let loss = FactorLoss { pairs: inst.omega().pairs(), values: inst.observed(), rows, rank };
    let w = start_point(loss.dim(), cfg, u0)?;
    let r = run(&loss, cfg, w);
    let err = match inst.truth() {
        Truth::RankR(t) => Some(recovery_error_factor(&r.best, rank, t)?),
        Truth::Symmetric(t) => Some(recovery_error(&r.best, t.as_slice())?),
        Truth::Asymmetric { .. } | Truth::Unknown => None,
    };
    Ok(finish(r, started, None, rank, err))
}
