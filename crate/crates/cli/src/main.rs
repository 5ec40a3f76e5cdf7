use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nnrpca::certificates::{check_det_asymmetric, check_det_symmetric, connectivity_threshold, GraphModel};
use nnrpca::experiments::HistogramSummary;
use nnrpca::rng::{stream, Purpose};
use nnrpca::{
    assumption1_constant, gen_truth, sample_noise, sample_omega, solve_asymmetric, solve_rank_r, solve_symmetric,
    to_csv, Instance, Kind, MeasurementSet, NoiseModel, ObjectiveSpec, Shape, SolverConfig, TrialSettings,
    VideoConfig,
};

#[derive(Parser)]
#[command(name = "nnrpca", version, about = "Non-negative rank-one robust PCA experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials per grid cell.
    #[arg(long)]
    trials: Option<usize>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recovery threshold on the relative error.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
}

impl Common {
    fn settings(&self, default_trials: usize, base: TrialSettings) -> TrialSettings {
        TrialSettings { trials: self.trials.unwrap_or(default_trials), seed: self.seed, tol: self.tol, ..base }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact-recovery rate over a grid of dimensions and noise densities.
    Heatmap {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60,70,80,90,100")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5")]
        d: Vec<f64>,
        /// Sampling probability of the observed entries.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        noise_value: f64,
    },
    /// Wall time of single solves.
    Runtime {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "100,200")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.2)]
        d: f64,
    },
    /// Per-start errors on the three-dimensional spurious-minimum instance.
    Histogram {
        #[command(flatten)]
        common: Common,
    },
    /// Rank-r recovery rate over ranks and noise densities.
    RankSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        r: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.25,0.3")]
        d: Vec<f64>,
    },
    /// Background/foreground separation of a directory of PGM frames.
    Video {
        /// Directory of binary PGM frames, read in name order.
        #[arg(long)]
        frames: PathBuf,
        /// Output directory for the background and foreground frames.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo statistics of random measurement patterns against their bounds.
    GraphMc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        /// Row count; gives a bipartite pattern.
        #[arg(long)]
        m: Option<usize>,
        /// Sampling probability (defaults to the connectivity threshold).
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
    },
    /// Deterministic recovery certificate of an instance file, as CSV.
    Certify {
        instance: PathBuf,
        /// Constant c (defaults to the largest value the instance admits).
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solves one instance file and prints `key: value` lines.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Noiseless)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a random symmetric instance file.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Noise density.
        #[arg(long, default_value_t = 0.0)]
        d: f64,
        #[arg(long, default_value_t = 2.0)]
        noise_value: f64,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 2.0)]
        hi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Noiseless,
    Regularized,
}

fn input(msg: &str) -> anyhow::Error {
    nnrpca::Error::InvalidArgument(msg.into()).into()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn solve_report(inst: &Instance<f64>, objective: ObjectiveArg, alpha: f64, seed: u64, tol: f64) -> Result<String> {
    let cfg = SolverConfig::with_seed(seed);
    let (m, n) = match inst.omega().shape() {
        Shape::Symmetric { n } => (n, n),
        Shape::Asymmetric { m, n } => (m, n),
    };
    let res = match (inst.kind(), objective) {
        (Kind::Symmetric, ObjectiveArg::Noiseless) => solve_symmetric(inst, &ObjectiveSpec::noiseless_sym(), &cfg, None)?,
        (Kind::Symmetric, ObjectiveArg::Regularized) => {
            solve_symmetric(inst, &ObjectiveSpec::regularized_sym(n), &cfg, None)?
        }
        (Kind::Asymmetric, ObjectiveArg::Noiseless) => {
            solve_asymmetric(inst, &ObjectiveSpec::noiseless_asym(alpha), &cfg, None)?
        }
        (Kind::Asymmetric, ObjectiveArg::Regularized) => {
            solve_asymmetric(inst, &ObjectiveSpec::regularized_asym(m, n, alpha), &cfg, None)?
        }
        (Kind::RankR(_), ObjectiveArg::Noiseless) => solve_rank_r(inst, &cfg, None)?,
        (Kind::RankR(_), ObjectiveArg::Regularized) => return Err(input("rank-r instances support only the noiseless objective")),
    };
    let kind = match inst.kind() {
        Kind::Symmetric => "symmetric".to_string(),
        Kind::Asymmetric => "asymmetric".to_string(),
        Kind::RankR(r) => format!("rank_r {r}"),
    };
    let mut out = String::new();
    writeln!(out, "kind: {kind}")?;
    writeln!(out, "objective: {}", res.objective)?;
    writeln!(out, "iterations: {}", res.iterations)?;
    writeln!(out, "termination: {:?}", res.termination)?;
    writeln!(out, "wall_time_seconds: {:.6}", res.wall_time.as_secs_f64())?;
    match res.recovery_error {
        Some(e) => {
            writeln!(out, "recovery_error: {e:e}")?;
            writeln!(out, "recovered: {}", e <= tol)?;
        }
        None => writeln!(out, "recovery_error: unknown")?,
    }
    if let Some(b) = res.balance() {
        writeln!(out, "balance: {b:e}")?;
    }
    writeln!(out, "u: {}", join(res.u()))?;
    if let Some(v) = res.v() {
        writeln!(out, "v: {}", join(v))?;
    }
    Ok(out)
}

fn certify_csv(inst: &Instance<f64>, c: Option<f64>) -> Result<String> {
    let c = match c {
        Some(c) => c,
        None => assumption1_constant(inst)?,
    };
    if c <= 0.0 {
        return Ok(format!(
            "{}\nassumption,assumption_constant,{c},0,false,true,no positive c exists\n",
            nnrpca::CertificateReport::CSV_HEADER
        ));
    }
    let report = match inst.kind() {
        Kind::Symmetric => check_det_symmetric(inst, c)?,
        Kind::Asymmetric => check_det_asymmetric(inst, c)?,
        Kind::RankR(_) => return Err(input("certificates apply to rank-one instances only")),
    };
    Ok(report.to_csv())
}

fn generate(n: usize, p: f64, d: f64, noise_value: f64, (lo, hi): (f64, f64), seed: u64) -> Result<Instance<f64>> {
    let truth = gen_truth(n, lo, hi, &mut stream(seed, 0, Purpose::Truth))?;
    let omega = if p >= 1.0 {
        MeasurementSet::full_symmetric(n)
    } else {
        sample_omega(Shape::Symmetric { n }, p, &mut stream(seed, 0, Purpose::Omega))?
    };
    let noise = sample_noise(&omega, &NoiseModel::constant(d, noise_value)?, &mut stream(seed, 0, Purpose::Noise));
    Ok(Instance::symmetric(truth, omega, noise)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Heatmap { common, n, d, p, noise_value } => {
            let s = TrialSettings { p, noise_value, ..common.settings(100, TrialSettings::default()) };
            emit(common.out.as_deref(), &to_csv(&nnrpca::run_heatmap(&n, &d, &s)?))
        }
        Command::Runtime { common, n, d } => {
            let s = common.settings(10, TrialSettings::default());
            emit(common.out.as_deref(), &to_csv(&nnrpca::run_runtime(&n, d, &s)?))
        }
        Command::Histogram { common } => {
            let rows = nnrpca::run_histogram(&common.settings(1000, TrialSettings::default()))?;
            let summary = HistogramSummary::from_rows(&rows);
            eprintln!(
                "trials: {}, exact fraction: {}, spurious fraction: {}",
                summary.trials, summary.exact_fraction, summary.spurious_fraction
            );
            emit(common.out.as_deref(), &to_csv(&rows))
        }
        Command::RankSweep { common, n, r, d } => {
            let s = common.settings(100, TrialSettings::rank_sweep());
            emit(common.out.as_deref(), &to_csv(&nnrpca::run_rank_sweep(n, &r, &d, &s)?))
        }
        Command::Video { frames, out, alpha, seed } => {
            let cfg = VideoConfig { alpha, solver: SolverConfig::with_seed(seed) };
            let res = nnrpca::run_video(&frames, &out, &cfg)?;
            println!("background: {}", res.background.display());
            println!("foreground_frames: {}", res.foreground.len());
            println!("objective: {}", res.objective);
            println!("iterations: {}", res.iterations);
            Ok(())
        }
        Command::GraphMc { common, n, m, p, eta } => {
            let model = match m {
                Some(m) => GraphModel::Bipartite { m, n },
                None => GraphModel::Symmetric { n },
            };
            let p = match p {
                Some(p) => p,
                None => connectivity_threshold(model, eta)?,
            };
            let rows = nnrpca::run_graph_montecarlo(model, p, eta, common.trials.unwrap_or(2000), common.seed)?;
            emit(common.out.as_deref(), &to_csv(&rows))
        }
        Command::Certify { instance, c, out } => {
            let inst = nnrpca::read_instance::<f64>(&instance)?;
            emit(out.as_deref(), &certify_csv(&inst, c)?)
        }
        Command::Solve { instance, objective, alpha, seed, tol, out } => {
            let inst = nnrpca::read_instance::<f64>(&instance)?;
            emit(out.as_deref(), &solve_report(&inst, objective, alpha, seed, tol)?)
        }
        Command::Generate { n, p, d, noise_value, lo, hi, seed, out } => {
            let inst = generate(n, p, d, noise_value, (lo, hi), seed)?;
            emit(out.as_deref(), &nnrpca::format_instance(&inst))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let input = err.downcast_ref::<nnrpca::Error>().is_some_and(nnrpca::Error::is_input_error);
            ExitCode::from(if input { 2 } else { 1 })
        }
    }
}
