#![allow(dead_code)]

use nnrpca::certificates::{connectivity_threshold, GraphModel};
use nnrpca::rng::{stream, Purpose};
use nnrpca::{
    gen_truth, sample_identifiable_omega, sample_omega, ComponentVector, Instance, MeasurementSet, Shape, SparseNoise,
};
use rand::seq::SliceRandom;

pub fn threshold(n: usize) -> f64 {
    connectivity_threshold(GraphModel::Symmetric { n }, 1.0).unwrap()
}

/// Noiseless symmetric instance with `n = 3 + trial mod 18`, `u* ~ U[0.1, 2]`
/// and a connected non-bipartite pattern sampled at the threshold.
pub fn noiseless_instance(seed: u64, trial: u64) -> Instance<f64> {
    let n = 3 + (trial as usize % 18);
    let u = gen_truth(n, 0.1, 2.0, &mut stream(seed, trial, Purpose::Truth)).unwrap();
    let omega = sample_identifiable_omega(n, threshold(n), &mut stream(seed, trial, Purpose::Omega), 10_000).unwrap();
    Instance::symmetric(u, omega, SparseNoise::empty()).unwrap()
}

/// Same pattern as [`noiseless_instance`] with the truth rescaled to
/// `max u* = 1`.
pub fn normalized_noiseless_instance(seed: u64, trial: u64) -> Instance<f64> {
    let base = noiseless_instance(seed, trial);
    let u = base.truth_vector().unwrap();
    let top = u.iter().copied().fold(0.0, f64::max);
    let scaled = ComponentVector::new(u.iter().map(|x| x / top).collect()).unwrap();
    Instance::symmetric(scaled, base.omega().clone(), SparseNoise::empty()).unwrap()
}

/// Fully observed instance, `n = 80`, `u*` in `[0.9, 1]` with `max u* = 1`,
/// and `k` corrupted off-diagonal pairs forming a matching (so every vertex
/// touches at most one bad measurement).
pub fn noisy_matching_instance(seed: u64, trial: u64, k: usize) -> Instance<f64> {
    let n = 80;
    let raw = gen_truth::<f64, _>(n, 0.9, 1.0, &mut stream(seed, trial, Purpose::Truth)).unwrap();
    let top = raw.max();
    let u = ComponentVector::new(raw.as_slice().iter().map(|x| x / top).collect()).unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut stream(seed, trial, Purpose::Noise));
    let noise = SparseNoise::from_entries((0..k).map(|e| ((order[2 * e], order[2 * e + 1]), 2.0)));
    Instance::symmetric(u, MeasurementSet::full_symmetric(n), noise).unwrap()
}

/// Noiseless asymmetric instance with `2 ≤ m, n ≤ 15`, `u*, v* ~ U[0.1, 2]`,
/// sampled at the bipartite threshold until connected.
pub fn asymmetric_instance(seed: u64, trial: u64) -> Instance<f64> {
    let m = 2 + (trial as usize * 7 % 14);
    let n = 2 + (trial as usize * 3 % 14);
    let mut rng = stream(seed, trial, Purpose::Truth);
    let u = gen_truth(m, 0.1, 2.0, &mut rng).unwrap();
    let v = gen_truth(n, 0.1, 2.0, &mut rng).unwrap();
    let p = connectivity_threshold(GraphModel::Bipartite { m, n }, 1.0).unwrap();
    let mut orng = stream(seed, trial, Purpose::Omega);
    let omega = loop {
        let omega = sample_omega(Shape::Asymmetric { m, n }, p, &mut orng).unwrap();
        if nnrpca::SparsityGraph::from_omega(&omega).analyze().connected {
            break omega;
        }
    };
    Instance::asymmetric(u, v, omega, SparseNoise::empty()).unwrap()
}
