//! Seeded experiment drivers producing CSV rows (and PGM frames for video).
//!
//! Trial `t` of grid cell `c` draws from the streams of trial id
//! `(c << 32) | t`, so results do not depend on thread scheduling. Trials
//! within a cell run in parallel and are reduced in trial order.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::certificates::{connectivity_probability, connectivity_threshold, degree_concentration_bounds, GraphModel};
use crate::error::{Error, Result};
use crate::generators::{build_prop1_counterexample, gen_truth, gen_truth_matrix, sample_noise, sample_omega, NoiseModel};
use crate::graph::SparsityGraph;
use crate::model::{Instance, MeasurementSet, Shape};
use crate::objective::ObjectiveSpec;
use crate::pgm::{self, GrayImage};
use crate::rng::{stream, Purpose};
use crate::solver::{random_start, solve_asymmetric, solve_rank_r, solve_symmetric, SolverConfig};

/// A CSV-serialisable result row.
pub trait CsvRow {
    const HEADER: &'static str;
    fn csv_row(&self) -> String;
}

pub fn to_csv<R: CsvRow>(rows: &[R]) -> String {
    let mut out = format!("{}\n", R::HEADER);
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

fn trial_id(cell: usize, trial: usize) -> u64 {
    ((cell as u64) << 32) | trial as u64
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trial count must be at least 1".into()));
    }
    Ok(())
}

fn check_density(d: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidArgument(format!("density {d} must lie in [0, 1]")));
    }
    Ok(())
}

fn rate(hits: usize, trials: usize) -> f64 {
    hits as f64 / trials as f64
}

/// Settings shared by the synthetic recovery experiments.
#[derive(Debug, Clone)]
pub struct TrialSettings {
    pub trials: usize,
    pub seed: u64,
    /// Sampling probability of Ω; `1.0` observes every entry.
    pub p: f64,
    /// Value of each corrupted entry.
    pub noise_value: f64,
    /// Recovery threshold on the relative Frobenius error.
    pub tol: f64,
    pub solver: SolverConfig,
}

impl Default for TrialSettings {
    fn default() -> Self {
        Self { trials: 100, seed: 0, p: 1.0, noise_value: 2.0, tol: 1e-4, solver: SolverConfig::default() }
    }
}

impl TrialSettings {
    /// Slower step decay and a larger iteration budget; rank-`r` factors
    /// with `r ≥ 2` stall short of recovery under the default schedule.
    pub fn rank_sweep() -> Self {
        let solver = SolverConfig { decay: 0.998, max_iters: 40_000, ..SolverConfig::default() };
        Self { solver, ..Self::default() }
    }
}

fn sample_pattern(n: usize, p: f64, seed: u64, id: u64) -> Result<MeasurementSet> {
    if p >= 1.0 {
        Ok(MeasurementSet::full_symmetric(n))
    } else {
        sample_omega(Shape::Symmetric { n }, p, &mut stream(seed, id, Purpose::Omega))
    }
}

/// Noisy symmetric instance `u* ~ U(0, 2)` with `d`-dense constant noise.
pub fn heatmap_instance(n: usize, d: f64, s: &TrialSettings, id: u64) -> Result<Instance<f64>> {
    let truth = gen_truth(n, 0.0, 2.0, &mut stream(s.seed, id, Purpose::Truth))?;
    let omega = sample_pattern(n, s.p, s.seed, id)?;
    let noise = sample_noise(&omega, &NoiseModel::constant(d, s.noise_value)?, &mut stream(s.seed, id, Purpose::Noise));
    Instance::symmetric(truth, omega, noise)
}

fn solve_trial(inst: &Instance<f64>, s: &TrialSettings, id: u64) -> Result<(f64, f64)> {
    let n = inst.rows();
    let u0: Vec<f64> = random_start(n, s.solver.positivity_floor, &mut stream(s.seed, id, Purpose::Init));
    let started = Instant::now();
    let res = solve_symmetric(inst, &ObjectiveSpec::noiseless_sym(), &s.solver, Some(&u0))?;
    let secs = started.elapsed().as_secs_f64();
    Ok((res.recovery_error.expect("synthetic truth is known"), secs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapRow {
    pub n: usize,
    pub d: f64,
    pub recovery_rate: f64,
    pub trials: usize,
}

impl CsvRow for HeatmapRow {
    const HEADER: &'static str = "n,d,recovery_rate,trials";
    fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.n, self.d, self.recovery_rate, self.trials)
    }
}

/// Exact-recovery rate over the `(n, d)` grid, `n` outer and `d` inner.
pub fn run_heatmap(n_list: &[usize], d_list: &[f64], s: &TrialSettings) -> Result<Vec<HeatmapRow>> {
    check_trials(s.trials)?;
    d_list.iter().try_for_each(|&d| check_density(d))?;
    let mut rows = Vec::new();
    for (a, &n) in n_list.iter().enumerate() {
        for (b, &d) in d_list.iter().enumerate() {
            let cell = a * d_list.len() + b;
            let errors = (0..s.trials)
                .into_par_iter()
                .map(|t| {
                    let id = trial_id(cell, t);
                    solve_trial(&heatmap_instance(n, d, s, id)?, s, id).map(|(e, _)| e)
                })
                .collect::<Result<Vec<_>>>()?;
            let hits = errors.iter().filter(|&&e| e <= s.tol).count();
            rows.push(HeatmapRow { n, d, recovery_rate: rate(hits, s.trials), trials: s.trials });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeRow {
    pub n: usize,
    pub d: f64,
    pub trials: usize,
    pub mean_seconds: f64,
    pub min_seconds: f64,
    pub max_seconds: f64,
    pub recovery_rate: f64,
}

impl CsvRow for RuntimeRow {
    const HEADER: &'static str = "n,d,trials,mean_seconds,min_seconds,max_seconds,recovery_rate";
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{}",
            self.n, self.d, self.trials, self.mean_seconds, self.min_seconds, self.max_seconds, self.recovery_rate
        )
    }
}

/// Wall time of single solves. Trials run sequentially so timings are not
/// distorted by sharing cores; the timings themselves vary between runs.
pub fn run_runtime(n_list: &[usize], d: f64, s: &TrialSettings) -> Result<Vec<RuntimeRow>> {
    check_trials(s.trials)?;
    check_density(d)?;
    let mut rows = Vec::new();
    for (cell, &n) in n_list.iter().enumerate() {
        let mut times = Vec::with_capacity(s.trials);
        let mut hits = 0;
        for t in 0..s.trials {
            let id = trial_id(cell, t);
            let (err, secs) = solve_trial(&heatmap_instance(n, d, s, id)?, s, id)?;
            hits += usize::from(err <= s.tol);
            times.push(secs);
        }
        rows.push(RuntimeRow {
            n,
            d,
            trials: s.trials,
            mean_seconds: times.iter().sum::<f64>() / s.trials as f64,
            min_seconds: times.iter().copied().fold(f64::INFINITY, f64::min),
            max_seconds: times.iter().copied().fold(0.0, f64::max),
            recovery_rate: rate(hits, s.trials),
        });
    }
    Ok(rows)
}

/// Errors above this count as convergence to a spurious point.
pub const SPURIOUS_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialClass {
    Exact,
    Spurious,
    Other,
}

impl TrialClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialClass::Exact => "exact",
            TrialClass::Spurious => "spurious",
            TrialClass::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub trial: usize,
    pub recovery_error: f64,
    pub class: TrialClass,
}

impl CsvRow for HistogramRow {
    const HEADER: &'static str = "trial,recovery_error,class";
    fn csv_row(&self) -> String {
        format!("{},{:e},{}", self.trial, self.recovery_error, self.class.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramSummary {
    pub trials: usize,
    pub exact_fraction: f64,
    pub spurious_fraction: f64,
}

impl HistogramSummary {
    pub fn from_rows(rows: &[HistogramRow]) -> Self {
        let count = |c| rows.iter().filter(|r| r.class == c).count();
        Self {
            trials: rows.len(),
            exact_fraction: rate(count(TrialClass::Exact), rows.len()),
            spurious_fraction: rate(count(TrialClass::Spurious), rows.len()),
        }
    }
}

/// Random starts on the three-dimensional instance with a spurious local
/// minimum at `e_3`; one row per start.
pub fn run_histogram(s: &TrialSettings) -> Result<Vec<HistogramRow>> {
    check_trials(s.trials)?;
    let inst = build_prop1_counterexample::<f64>(3, 2)?;
    (0..s.trials)
        .into_par_iter()
        .map(|t| {
            let u0: Vec<f64> = random_start(3, s.solver.positivity_floor, &mut stream(s.seed, t as u64, Purpose::Init));
            let res = solve_symmetric(&inst, &ObjectiveSpec::noiseless_sym(), &s.solver, Some(&u0))?;
            let err = res.recovery_error.expect("synthetic truth is known");
            let class = if err <= s.tol {
                TrialClass::Exact
            } else if err > SPURIOUS_THRESHOLD {
                TrialClass::Spurious
            } else {
                TrialClass::Other
            };
            Ok(HistogramRow { trial: t, recovery_error: err, class })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankSweepRow {
    pub n: usize,
    pub r: usize,
    pub d: f64,
    pub success_rate: f64,
    pub trials: usize,
}

impl CsvRow for RankSweepRow {
    const HEADER: &'static str = "n,r,d,success_rate,trials";
    fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.n, self.r, self.d, self.success_rate, self.trials)
    }
}

/// Noisy rank-`r` instance with `U* ~ U(0.5, 2.5)`.
pub fn rank_instance(n: usize, r: usize, d: f64, s: &TrialSettings, id: u64) -> Result<Instance<f64>> {
    let truth = gen_truth_matrix(n, r, 0.5, 2.5, &mut stream(s.seed, id, Purpose::Truth))?;
    let omega = sample_pattern(n, s.p, s.seed, id)?;
    let noise = sample_noise(&omega, &NoiseModel::constant(d, s.noise_value)?, &mut stream(s.seed, id, Purpose::Noise));
    Instance::rank_r(truth, omega, noise)
}

/// Rank-`r` recovery rate over the `(r, d)` grid, `r` outer and `d` inner.
pub fn run_rank_sweep(n: usize, r_list: &[usize], d_list: &[f64], s: &TrialSettings) -> Result<Vec<RankSweepRow>> {
    check_trials(s.trials)?;
    d_list.iter().try_for_each(|&d| check_density(d))?;
    if r_list.contains(&0) {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for (a, &r) in r_list.iter().enumerate() {
        for (b, &d) in d_list.iter().enumerate() {
            let cell = a * d_list.len() + b;
            let errors = (0..s.trials)
                .into_par_iter()
                .map(|t| {
                    let id = trial_id(cell, t);
                    let inst = rank_instance(n, r, d, s, id)?;
                    let u0: Vec<f64> =
                        random_start(n * r, s.solver.positivity_floor, &mut stream(s.seed, id, Purpose::Init));
                    let res = solve_rank_r(&inst, &s.solver, Some(&u0))?;
                    Ok(res.recovery_error.expect("synthetic truth is known"))
                })
                .collect::<Result<Vec<_>>>()?;
            let hits = errors.iter().filter(|&&e| e <= s.tol).count();
            rows.push(RankSweepRow { n, r, d, success_rate: rate(hits, s.trials), trials: s.trials });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct VideoConfig {
    /// Balance weight of the asymmetric objective.
    pub alpha: f64,
    pub solver: SolverConfig,
}

impl Default for VideoConfig {
    fn default() -> Self {
        Self { alpha: 1.0, solver: SolverConfig::default() }
    }
}

#[derive(Debug, Clone)]
pub struct VideoOutput {
    pub background: PathBuf,
    pub foreground: Vec<PathBuf>,
    pub objective: f64,
    pub iterations: usize,
}

/// `*.pgm` files of a directory in lexicographic order.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut frames: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
        .collect();
    frames.sort();
    if frames.is_empty() {
        return Err(Error::InvalidArgument(format!("no .pgm frames in {}", dir.display())));
    }
    Ok(frames)
}

/// Pixel-by-frame instance with every entry observed and each intensity
/// raised by one.
pub fn video_instance(frames: &[GrayImage]) -> Result<Instance<f64>> {
    let first = frames.first().ok_or_else(|| Error::InvalidArgument("no frames".into()))?;
    let (w, h) = (first.width(), first.height());
    if let Some((k, f)) = frames.iter().enumerate().find(|(_, f)| (f.width(), f.height()) != (w, h)) {
        return Err(Error::Pgm(format!("frame {k} is {}x{}, expected {w}x{h}", f.width(), f.height())));
    }
    let (m, n) = (w * h, frames.len());
    let mut values = Vec::with_capacity(m * n);
    for i in 0..m {
        values.extend(frames.iter().map(|f| f64::from(f.pixels()[i]) + 1.0));
    }
    Instance::from_observations(MeasurementSet::full_asymmetric(m, n), values)
}

fn to_byte(x: f64) -> u8 {
    x.round().clamp(0.0, 255.0) as u8
}

/// Writes `background.pgm` (the pixel factor rescaled to `[0, 255]`) and
/// `foreground_NNNN.pgm` (`|X − u v_j|` per frame, clamped) to `out_dir`.
pub fn run_video(frames_dir: &Path, out_dir: &Path, cfg: &VideoConfig) -> Result<VideoOutput> {
    let frames = list_frames(frames_dir)?.iter().map(|p| pgm::read(p)).collect::<Result<Vec<_>>>()?;
    let inst = video_instance(&frames)?;
    let (w, h, n) = (frames[0].width(), frames[0].height(), frames.len());
    let res = solve_asymmetric(&inst, &ObjectiveSpec::noiseless_asym(cfg.alpha), &cfg.solver, None)?;
    let (u, v) = (res.u(), res.v().expect("asymmetric solve"));

    fs::create_dir_all(out_dir)?;
    let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let bg = GrayImage::new(w, h, u.iter().map(|&x| to_byte(255.0 * (x - lo) / span)).collect())?;
    let background = out_dir.join("background.pgm");
    pgm::write(&background, &bg)?;

    let observed = inst.observed();
    let mut foreground = Vec::with_capacity(n);
    for (j, &vj) in v.iter().enumerate() {
        let pixels = (0..w * h).map(|i| to_byte((observed[i * n + j] - u[i] * vj).abs())).collect();
        let path = out_dir.join(format!("foreground_{j:04}.pgm"));
        pgm::write(&path, &GrayImage::new(w, h, pixels)?)?;
        foreground.push(path);
    }
    Ok(VideoOutput { background, foreground, objective: res.objective, iterations: res.iterations })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphMcRow {
    pub statistic: &'static str,
    pub trials: usize,
    /// Empirical frequency (or mean, for degree statistics).
    pub value: f64,
    /// Guaranteed upper bound on the frequency, when one applies.
    pub bound: Option<f64>,
    /// Binomial standard error of a frequency at the bound.
    pub std_error: Option<f64>,
    pub within_bound: Option<bool>,
}

impl GraphMcRow {
    fn plain(statistic: &'static str, trials: usize, value: f64) -> Self {
        Self { statistic, trials, value, bound: None, std_error: None, within_bound: None }
    }

    fn bounded(statistic: &'static str, trials: usize, value: f64, bound: Option<f64>) -> Self {
        let Some(b) = bound else {
            return Self::plain(statistic, trials, value);
        };
        let q = b.clamp(0.0, 1.0);
        let se = (q * (1.0 - q) / trials as f64).sqrt();
        Self { statistic, trials, value, bound: Some(b), std_error: Some(se), within_bound: Some(value <= b + 3.0 * se) }
    }
}

impl CsvRow for GraphMcRow {
    const HEADER: &'static str = "statistic,trials,value,bound,std_error,within_bound";
    fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(|x| x.to_string()).unwrap_or_default();
        let within = self.within_bound.map(|b| b.to_string()).unwrap_or_default();
        format!("{},{},{},{},{},{}", self.statistic, self.trials, self.value, opt(self.bound), opt(self.std_error), within)
    }
}

/// Monte Carlo check of the random-pattern guarantees at sampling probability
/// `p`. Failure frequencies are reported next to their guaranteed bounds;
/// a bound is omitted when its hypotheses on `p` or `η` fail.
pub fn run_graph_montecarlo(model: GraphModel, p: f64, eta: f64, trials: usize, seed: u64) -> Result<Vec<GraphMcRow>> {
    check_trials(trials)?;
    check_density(p)?;
    let shape = match model {
        GraphModel::Symmetric { n } => Shape::Symmetric { n },
        GraphModel::Bipartite { m, n } => Shape::Asymmetric { m, n },
    };
    let degrees = if p > 0.0 { Some(degree_concentration_bounds(model, p, eta)?) } else { None };
    struct Sample {
        connected: bool,
        property: bool,
        min_degree: usize,
        max_degree: usize,
    }
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let omega = sample_omega(shape, p, &mut stream(seed, t as u64, Purpose::Omega))?;
            let g = SparsityGraph::from_omega(&omega);
            let report = g.analyze();
            let property = match model {
                GraphModel::Symmetric { .. } => report.connected && !report.has_bipartite_component(),
                GraphModel::Bipartite { .. } => report.connected,
            };
            let deg = g.degrees();
            Ok(Sample {
                connected: report.connected,
                property,
                min_degree: deg.iter().copied().min().unwrap_or(0),
                max_degree: deg.iter().copied().max().unwrap_or(0),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let freq = |f: &dyn Fn(&Sample) -> bool| rate(samples.iter().filter(|s| f(s)).count(), trials);
    let mean = |f: &dyn Fn(&Sample) -> usize| samples.iter().map(f).sum::<usize>() as f64 / trials as f64;
    let threshold_met = connectivity_threshold(model, eta).is_ok_and(|th| p >= th);
    let property_bound = threshold_met.then(|| 1.0 - connectivity_probability(model, eta));

    let mut rows = vec![
        GraphMcRow::plain("connected", trials, freq(&|s| s.connected)),
        GraphMcRow::bounded("property_failure", trials, freq(&|s| !s.property), property_bound),
        GraphMcRow::plain("mean_min_degree", trials, mean(&|s| s.min_degree)),
        GraphMcRow::plain("mean_max_degree", trials, mean(&|s| s.max_degree)),
    ];
    if let Some(b) = degrees {
        rows.push(GraphMcRow::bounded(
            "max_degree_violation",
            trials,
            freq(&|s| s.max_degree as f64 >= b.max_degree_bound),
            Some(b.failure_probability),
        ));
        rows.push(GraphMcRow::bounded(
            "min_degree_violation",
            trials,
            freq(&|s| s.min_degree as f64 <= b.min_degree_bound),
            b.min_bound_applicable.then_some(b.failure_probability),
        ));
    }
    Ok(rows)
}
