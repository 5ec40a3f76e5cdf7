//! Recovery guarantees as executable checks.
//!
//! Deterministic checks read the degree structure of the good and bad
//! measurement graphs; probabilistic checks evaluate the sampling thresholds
//! for given `(n, p, d, κ, c, η)`. Thresholds are reported even when they
//! exceed one (the constants are conservative), with a note.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{good_bad_subgraphs, SparsityGraph};
use crate::model::{condition_number, symmetrize, Instance, Kind};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl Condition {
    fn new(name: &str, lhs: f64, rhs: f64, pass: bool) -> Self {
        Self { name: name.to_string(), lhs, rhs, pass, note: None }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// `lhs − rhs`, signed so that positive means satisfied for `>` checks.
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub theorem: String,
    /// Conditions that together decide [`passed`](Self::passed).
    pub conditions: Vec<Condition>,
    /// Extra diagnostics that do not enter the verdict.
    pub supplementary: Vec<Condition>,
    pub c: f64,
    pub kappa: Option<f64>,
    pub eta: Option<f64>,
    pub success_probability: Option<f64>,
}

impl CertificateReport {
    pub const CSV_HEADER: &'static str = "theorem,condition,lhs,rhs,pass,required,note";

    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().chain(&self.supplementary).find(|c| c.name == name)
    }

    /// One CSV row per condition, header included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let rows = self.conditions.iter().map(|c| (c, true)).chain(self.supplementary.iter().map(|c| (c, false)));
        for (c, required) in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.theorem,
                c.name,
                c.lhs,
                c.rhs,
                c.pass,
                required,
                c.note.as_deref().unwrap_or("")
            );
        }
        out
    }
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("constant c = {c} must lie in (0, 1]")))
    }
}

/// `c = min(1, min_Ω X_ij / u*²_min)`; asymmetric instances use the balanced
/// `w*`. A value `≤ 0` means the assumption fails for every `c > 0`.
pub fn assumption1_constant<T: Real>(inst: &Instance<T>) -> Result<f64> {
    let (min_truth, observed): (f64, Vec<f64>) = match inst.kind() {
        Kind::Symmetric => {
            let u = inst.truth_vector().ok_or(Error::InvalidArgument("instance has no known truth".into()))?;
            (u.iter().map(|x| x.to_f64_lossy()).fold(f64::INFINITY, f64::min), to_f64(inst.observed()))
        }
        Kind::Asymmetric => {
            let sym = symmetrize(inst, T::one())?;
            let w = sym.truth_vector().ok_or(Error::InvalidArgument("instance has no known truth".into()))?;
            (w.iter().map(|x| x.to_f64_lossy()).fold(f64::INFINITY, f64::min), to_f64(inst.observed()))
        }
        Kind::RankR(_) => return Err(Error::InvalidArgument("assumption constant needs a rank-one truth".into())),
    };
    if min_truth <= 0.0 {
        return Ok(0.0);
    }
    let min_x = observed.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((min_x / (min_truth * min_truth)).min(1.0))
}

fn to_f64<T: Real>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.to_f64_lossy()).collect()
}

fn degree_condition(delta_good: usize, max_bad: usize, kappa: f64, c: f64) -> Condition {
    let rhs = if max_bad == 0 { 0.0 } else { 48.0 / (c * c) * kappa.powi(4) * max_bad as f64 };
    Condition::new("good_min_degree_vs_bad_max_degree", delta_good as f64, rhs, delta_good as f64 > rhs)
}

/// Deterministic symmetric guarantee: `u* > 0`,
/// `δ(G(G)) > (48/c²) κ⁴ Δ(G(B))`, and `G(Ω)` without bipartite component.
/// Connectivity of `G(Ω)` is reported as a supplementary entry.
pub fn check_det_symmetric<T: Real>(inst: &Instance<T>, c: f64) -> Result<CertificateReport> {
    check_c(c)?;
    if inst.kind() != Kind::Symmetric {
        return Err(Error::InvalidArgument("symmetric certificate needs a symmetric instance".into()));
    }
    let u = to_f64(inst.truth_vector().ok_or(Error::InvalidArgument("instance has no known truth".into()))?);
    let u_min = u.iter().copied().fold(f64::INFINITY, f64::min);
    let kappa = condition_number(&u).ok();
    let (good, bad) = good_bad_subgraphs(inst);
    let omega = SparsityGraph::from_omega(inst.omega()).analyze();
    let bip = omega.bipartite.iter().filter(|&&b| b).count();
    let conditions = vec![
        Condition::new("truth_strictly_positive", u_min, 0.0, u_min > 0.0),
        degree_condition(good.min_degree, bad.max_degree, kappa.unwrap_or(f64::INFINITY), c),
        Condition::new("no_bipartite_component", bip as f64, 0.0, bip == 0),
    ];
    let supplementary = vec![Condition::new(
        "omega_connected",
        omega.component_count() as f64,
        1.0,
        omega.connected,
    )];
    Ok(CertificateReport {
        theorem: "deterministic_symmetric".into(),
        conditions,
        supplementary,
        c,
        kappa,
        eta: None,
        success_probability: None,
    })
}

/// Deterministic asymmetric guarantee on the symmetrized instance:
/// `u*, v* > 0`, `δ(G(Ḡ)) > (48/c²) κ(w*)⁴ Δ(G(B̄))`, `G(Ḡ)` connected.
/// `κ(w*)` uses the balanced truth.
pub fn check_det_asymmetric<T: Real>(inst: &Instance<T>, c: f64) -> Result<CertificateReport> {
    check_c(c)?;
    if inst.kind() != Kind::Asymmetric {
        return Err(Error::InvalidArgument("asymmetric certificate needs an asymmetric instance".into()));
    }
    let sym = symmetrize(inst, T::one())?;
    let w = to_f64(sym.truth_vector().ok_or(Error::InvalidArgument("instance has no known truth".into()))?);
    let w_min = w.iter().copied().fold(f64::INFINITY, f64::min);
    let kappa = condition_number(&w).ok();
    let (good, bad) = good_bad_subgraphs(inst);
    let conditions = vec![
        Condition::new("truth_strictly_positive", w_min, 0.0, w_min > 0.0),
        degree_condition(good.min_degree, bad.max_degree, kappa.unwrap_or(f64::INFINITY), c),
        Condition::new("good_graph_connected", good.component_count() as f64, 1.0, good.connected),
    ];
    Ok(CertificateReport {
        theorem: "deterministic_asymmetric".into(),
        conditions,
        supplementary: Vec::new(),
        c,
        kappa,
        eta: None,
        success_probability: None,
    })
}

fn check_common(p: f64, d: f64, kappa: f64, c: f64, eta: f64) -> Result<()> {
    check_c(c)?;
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidArgument("p and d must lie in [0, 1]".into()));
    }
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!("condition number {kappa} must be finite and >= 1")));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument("eta must be positive".into()));
    }
    Ok(())
}

fn threshold_condition(name: &str, value: f64, threshold: f64, below: bool, vacuous_above: f64) -> Condition {
    let pass = if below { value < threshold } else { value > threshold };
    let cond = Condition::new(name, value, threshold, pass);
    if threshold > vacuous_above || (below && threshold <= 0.0) {
        cond.with_note("threshold infeasible")
    } else {
        cond
    }
}

/// Random symmetric model: `d < 1/((144/c²)κ⁴ + 1)` and
/// `p > (1740/c²) κ⁴ (1+η) log n / n`; success probability `1 − 3n^{−η}`.
pub fn check_prob_symmetric(n: usize, p: f64, d: f64, kappa: f64, c: f64, eta: f64) -> Result<CertificateReport> {
    check_common(p, d, kappa, c, eta)?;
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let k4 = kappa.powi(4);
    let nf = n as f64;
    let d_max = 1.0 / (144.0 / (c * c) * k4 + 1.0);
    let p_min = 1740.0 / (c * c) * k4 * (1.0 + eta) * nf.ln() / nf;
    Ok(CertificateReport {
        theorem: "probabilistic_symmetric".into(),
        conditions: vec![
            threshold_condition("noise_density", d, d_max, true, 1.0),
            threshold_condition("sampling_probability", p, p_min, false, 1.0),
        ],
        supplementary: Vec::new(),
        c,
        kappa: Some(kappa),
        eta: Some(eta),
        success_probability: Some(1.0 - 3.0 * nf.powf(-eta)),
    })
}

/// Random asymmetric model with `m ≤ n`, `r = m/n`:
/// `d < r/((144/c²)κ⁴ + r)` and `p > (1740/c²) κ⁴ (1+η) n log n / m²`;
/// success probability `1 − 10 n^{−η}`.
pub fn check_prob_asymmetric(
    m: usize,
    n: usize,
    p: f64,
    d: f64,
    kappa_w: f64,
    c: f64,
    eta: f64,
) -> Result<CertificateReport> {
    check_common(p, d, kappa_w, c, eta)?;
    if m > n {
        return Err(Error::InvalidArgument(format!("expected m <= n, got m={m}, n={n}")));
    }
    if m < 2 {
        return Err(Error::InvalidArgument("m must be at least 2".into()));
    }
    let (mf, nf) = (m as f64, n as f64);
    let r = mf / nf;
    let k4 = kappa_w.powi(4);
    let d_max = r / (144.0 / (c * c) * k4 + r);
    let p_min = 1740.0 / (c * c) * k4 * (1.0 + eta) * nf * nf.ln() / (mf * mf);
    Ok(CertificateReport {
        theorem: "probabilistic_asymmetric".into(),
        conditions: vec![
            threshold_condition("noise_density", d, d_max, true, 1.0),
            threshold_condition("sampling_probability", p, p_min, false, 1.0),
        ],
        supplementary: Vec::new(),
        c,
        kappa: Some(kappa_w),
        eta: Some(eta),
        success_probability: Some(1.0 - 10.0 * nf.powf(-eta)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphModel {
    /// Symmetric pattern on `n` vertices.
    Symmetric { n: usize },
    /// Bipartite pattern between `m` rows and `n` columns.
    Bipartite { m: usize, n: usize },
}

/// Sampling probability above which the pattern is connected (and, in the
/// symmetric case, non-bipartite) with high probability:
/// `min{1, ((2η+2) log n + 2)/(n−1)}` or
/// `min{1, (m+n)((1+η) log(mn) + 1)/((m−1)(n−1))}`.
pub fn connectivity_threshold(model: GraphModel, eta: f64) -> Result<f64> {
    if !(eta >= 1.0) {
        return Err(Error::InvalidArgument(format!("eta = {eta} must be at least 1")));
    }
    match model {
        GraphModel::Symmetric { n } => {
            if n < 2 {
                return Err(Error::InvalidArgument("n must be at least 2".into()));
            }
            let nf = n as f64;
            Ok((((2.0 * eta + 2.0) * nf.ln() + 2.0) / (nf - 1.0)).min(1.0))
        }
        GraphModel::Bipartite { m, n } => {
            if m < 2 || n < 2 {
                return Err(Error::InvalidArgument("m and n must be at least 2".into()));
            }
            let (mf, nf) = (m as f64, n as f64);
            Ok(((mf + nf) * ((1.0 + eta) * (mf * nf).ln() + 1.0) / ((mf - 1.0) * (nf - 1.0))).min(1.0))
        }
    }
}

/// Guaranteed probability that a pattern drawn at
/// [`connectivity_threshold`] has the property:
/// `1 − 1.5 n^{−η}` (symmetric) or `1 − 2(mn)^{−η} − 4(mn)^{−2η}`.
pub fn connectivity_probability(model: GraphModel, eta: f64) -> f64 {
    match model {
        GraphModel::Symmetric { n } => 1.0 - 1.5 * (n as f64).powf(-eta),
        GraphModel::Bipartite { m, n } => {
            let mn = (m * n) as f64;
            1.0 - 2.0 * mn.powf(-eta) - 4.0 * mn.powf(-2.0 * eta)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeBounds {
    /// `Δ ≥ max_degree_bound` happens with probability at most `failure_probability`.
    pub max_degree_bound: f64,
    /// `δ ≤ min_degree_bound` happens with probability at most
    /// `failure_probability`, when `min_bound_applicable`.
    pub min_degree_bound: f64,
    pub min_bound_applicable: bool,
    pub failure_probability: f64,
}

/// Degree concentration for random patterns.
///
/// Symmetric: `Δ ≥ max{3np/2, 18(1+η) log n}` and `δ ≤ np/2` (the latter
/// for `p ≥ 12(1+η) log n / n`), each with probability at most `n^{−η}`.
/// Bipartite: `Δ ≥ max{3np/2, 18(1+η) n log n / m}` and `δ ≤ mp/2` (for
/// `p ≥ 12(1+η) log n / m`), each with probability at most `2n^{−η}`.
pub fn degree_concentration_bounds(model: GraphModel, p: f64, eta: f64) -> Result<DegreeBounds> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in (0, 1]")));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument("eta must be positive".into()));
    }
    Ok(match model {
        GraphModel::Symmetric { n } => {
            let nf = n as f64;
            DegreeBounds {
                max_degree_bound: (1.5 * nf * p).max(18.0 * (1.0 + eta) * nf.ln()),
                min_degree_bound: nf * p / 2.0,
                min_bound_applicable: p >= 12.0 * (1.0 + eta) * nf.ln() / nf,
                failure_probability: nf.powf(-eta),
            }
        }
        GraphModel::Bipartite { m, n } => {
            let (mf, nf) = (m as f64, n as f64);
            DegreeBounds {
                max_degree_bound: (1.5 * nf * p).max(18.0 * (1.0 + eta) * nf * nf.ln() / mf),
                min_degree_bound: mf * p / 2.0,
                min_bound_applicable: p >= 12.0 * (1.0 + eta) * nf.ln() / mf,
                failure_probability: 2.0 * nf.powf(-eta),
            }
        }
    })
}

/// Box that stationary points of the regularised objective must lie in:
/// after rescaling truth and candidate so that `max u* = 1`, every candidate
/// entry must lie in `[(c/2) u*²_min, 2]`. `candidate` and `truth` are
/// concatenated `[u; v]` and balanced `w*` for asymmetric problems.
pub fn stationary_box_check<T: Real>(candidate: &[T], c: f64, truth: &[T]) -> bool {
    let t = to_f64(truth);
    let t_max = t.iter().copied().fold(0.0, f64::max);
    if t_max <= 0.0 || candidate.len() != truth.len() {
        return false;
    }
    let t_min = t.iter().copied().fold(f64::INFINITY, f64::min) / t_max;
    let lower = c / 2.0 * t_min * t_min;
    candidate.iter().all(|x| {
        let v = x.to_f64_lossy() / t_max;
        v >= lower && v <= 2.0
    })
}
