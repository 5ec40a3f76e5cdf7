//! Non-negative rank-one robust PCA: ℓ1 objectives over partially observed,
//! sparsely corrupted matrices, a subgradient solver, deterministic and
//! probabilistic recovery certificates, and the experiment drivers built on
//! them.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases at the crate root cover the common case.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod io;
pub mod model;
pub mod objective;
pub mod pgm;
pub mod rng;
pub mod scalar;
pub mod solver;

pub use certificates::{
    assumption1_constant, check_det_asymmetric, check_det_symmetric, check_prob_asymmetric, check_prob_symmetric,
    connectivity_probability, connectivity_threshold, degree_concentration_bounds, stationary_box_check,
    CertificateReport, Condition, DegreeBounds, GraphModel,
};
pub use error::{Error, Result};
pub use graph::{analyze, good_bad_subgraphs, GraphReport, SparsityGraph, UnionFind};
pub use model::{
    condition_number, recovery_error, recovery_error_asymmetric, recovery_error_factor, symmetrize, ComponentMatrix,
    ComponentVector, Instance, Kind, MeasurementSet, Shape, SparseNoise, SymmetrizedInstance, Truth,
};
pub use objective::{
    eval_regularizer, Construction, DirectionReport, Objective, ObjectiveSpec, Stationarity, Variant,
};
pub use generators::{
    build_bipartite_counterexample, build_prop1_counterexample, gen_truth, gen_truth_matrix, sample_identifiable_omega,
    sample_noise, sample_omega, NoiseModel, NoiseValue,
};
pub use experiments::{
    run_graph_montecarlo, run_heatmap, run_histogram, run_rank_sweep, run_runtime, run_video, to_csv, CsvRow, GraphMcRow,
    HeatmapRow, HistogramRow, HistogramSummary, RankSweepRow, RuntimeRow, TrialClass, TrialSettings, VideoConfig,
    VideoOutput,
};
pub use io::{format_instance, parse_instance, read_instance, write_instance};
pub use pgm::GrayImage;
pub use scalar::Real;
pub use solver::{random_start, solve_asymmetric, solve_rank_r, solve_symmetric, SolverConfig, SolverResult, Termination};

pub type InstanceF64 = Instance<f64>;
pub type InstanceF32 = Instance<f32>;
pub type ComponentVectorF64 = ComponentVector<f64>;
pub type ComponentVectorF32 = ComponentVector<f32>;
pub type ComponentMatrixF64 = ComponentMatrix<f64>;
pub type SparseNoiseF64 = SparseNoise<f64>;
pub type ObjectiveSpecF64 = ObjectiveSpec<f64>;
pub type SolverResultF64 = SolverResult<f64>;
