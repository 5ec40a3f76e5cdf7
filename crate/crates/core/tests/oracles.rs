//! Library results against independent reference computations.

mod common;

use approx::assert_relative_eq;
use nnrpca::certificates::{
    check_det_symmetric, check_prob_asymmetric, check_prob_symmetric, connectivity_threshold,
    degree_concentration_bounds, GraphModel,
};
use nnrpca::rng::{stream, Purpose};
use nnrpca::{
    build_bipartite_counterexample, build_prop1_counterexample, gen_truth, recovery_error, sample_noise, sample_omega,
    solve_symmetric, symmetrize, ComponentVector, Instance, MeasurementSet, NoiseModel, Objective, ObjectiveSpec,
    Shape, SolverConfig, SparseNoise, SparsityGraph, Stationarity,
};
use rand::Rng;

/// `Σ_{(i,j) ∈ Ω, i ≤ j} |u_i u_j − X_ij|` from a dense matrix.
fn l1_oracle(n: usize, x: &[Vec<Option<f64>>], u: &[f64]) -> f64 {
    let mut f = 0.0;
    for i in 0..n {
        for j in i..n {
            if let Some(v) = x[i][j] {
                f += (u[i] * u[j] - v).abs();
            }
        }
    }
    f
}

fn dense(inst: &Instance<f64>, n: usize) -> Vec<Vec<Option<f64>>> {
    let mut x = vec![vec![None; n]; n];
    for (k, &(i, j)) in inst.omega().pairs().iter().enumerate() {
        x[i][j] = Some(inst.observed()[k]);
    }
    x
}

fn frobenius_oracle(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in 0..n {
            num += (a[i] * a[j] - b[i] * b[j]).powi(2);
            den += (b[i] * b[j]).powi(2);
        }
    }
    (num / den).sqrt()
}

#[test]
fn recovery_error_against_dense_frobenius() {
    assert_relative_eq!(recovery_error(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2f64.sqrt(), max_relative = 1e-15);
    let mut rng = stream(1, 0, Purpose::Misc);
    for _ in 0..200 {
        let n = rng.random_range(1..8);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        assert_relative_eq!(recovery_error(&a, &b).unwrap(), frobenius_oracle(&a, &b), max_relative = 1e-12);
    }
}

/// Bipartite iff some 0/1 colouring of the component makes every edge
/// bichromatic; self-loops never are. Exhaustive over colourings.
fn bipartite_by_enumeration(vertices: &[usize], edges: &[(usize, usize)]) -> bool {
    let k = vertices.len();
    let pos = |v: usize| vertices.iter().position(|&x| x == v);
    let local: Vec<(usize, usize)> =
        edges.iter().filter_map(|&(a, b)| Some((pos(a)?, pos(b)?))).collect();
    (0u32..1 << k).any(|mask| local.iter().all(|&(a, b)| (mask >> a & 1) != (mask >> b & 1)))
}

/// Components by repeated relaxation of a reachability matrix.
fn components_by_closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        reach[a][b] = true;
        reach[b][a] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if !seen[i] {
            let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j]).collect();
            comp.iter().for_each(|&j| seen[j] = true);
            out.push(comp);
        }
    }
    out
}

#[test]
fn graph_structure_against_exhaustive_search() {
    let edges = [(0, 1), (0, 0), (2, 3)];
    let report = SparsityGraph::new(4, edges).analyze();
    assert_eq!(report.components, vec![vec![0, 1], vec![2, 3]]);
    assert_eq!(report.bipartite, vec![false, true]);

    let mut rng = stream(2, 0, Purpose::Misc);
    for _ in 0..300 {
        let n = rng.random_range(1..9);
        let p = rng.random_range(0.05..0.6);
        let omega = sample_omega(Shape::Symmetric { n }, p, &mut rng).unwrap();
        let report = SparsityGraph::from_omega(&omega).analyze();
        let expected = components_by_closure(n, omega.pairs());
        assert_eq!(report.components, expected);
        for (c, comp) in expected.iter().enumerate() {
            assert_eq!(report.bipartite[c], bipartite_by_enumeration(comp, omega.pairs()), "{:?}", omega.pairs());
        }
    }
}

/// Degree with a self-loop counted once.
fn degrees_oracle(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut deg = vec![0; n];
    for (i, j) in pairs {
        deg[i] += 1;
        if i != j {
            deg[j] += 1;
        }
    }
    deg
}

#[test]
fn good_and_bad_degrees_by_direct_count() {
    let noise = SparseNoise::from_entries([((0, 1), 1.0)]);
    let inst = Instance::symmetric(
        ComponentVector::new(vec![1.0, 1.0]).unwrap(),
        MeasurementSet::full_symmetric(2),
        noise,
    )
    .unwrap();
    let good = degrees_oracle(2, inst.good_pairs());
    let bad = degrees_oracle(2, inst.bad_pairs());
    assert_eq!((good.iter().min(), bad.iter().max()), (Some(&1), Some(&1)));
    let (g, b) = nnrpca::good_bad_subgraphs(&inst);
    assert_eq!((g.min_degree, b.max_degree), (1, 1));

    let zeroed = build_prop1_counterexample::<f64>(3, 2).unwrap();
    let good = degrees_oracle(3, zeroed.good_pairs());
    assert_eq!(good, vec![3, 3, 2]);
    let (g, b) = nnrpca::good_bad_subgraphs(&zeroed);
    assert_eq!((g.min_degree, b.max_degree), (2, 0));
}

#[test]
fn objective_and_derivative_against_finite_differences() {
    let inst = Instance::symmetric(
        ComponentVector::new(vec![1.0, 1.0]).unwrap(),
        MeasurementSet::full_symmetric(2),
        SparseNoise::empty(),
    )
    .unwrap();
    let obj = Objective::symmetric(&inst, ObjectiveSpec::noiseless_sym()).unwrap();
    let x = dense(&inst, 2);
    let (u, d) = ([2.0, 0.5], [-4.0, 1.0]);
    let t = 1e-8;
    let moved = [u[0] + t * d[0], u[1] + t * d[1]];
    let fd = (l1_oracle(2, &x, &moved) - l1_oracle(2, &x, &u)) / t;
    let exact = obj.directional_derivative(&u, &d).unwrap();
    assert_relative_eq!(exact, -17.0, max_relative = 1e-12);
    assert!((fd - exact).abs() <= 1e-5 * exact.abs());

    // Central differences of the oracle at points where no residual vanishes.
    let mut rng = stream(3, 0, Purpose::Misc);
    for _ in 0..100 {
        let n = rng.random_range(2..7);
        let truth = gen_truth(n, 0.2, 2.0, &mut rng).unwrap();
        let omega = sample_omega(Shape::Symmetric { n }, 0.8, &mut rng).unwrap();
        let noise = sample_noise(&omega, &NoiseModel::constant(0.2, 2.0).unwrap(), &mut rng);
        let inst = Instance::symmetric(truth, omega, noise).unwrap();
        let x = dense(&inst, n);
        let obj = Objective::symmetric(&inst, ObjectiveSpec::noiseless_sym()).unwrap();
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let g = obj.subgradient(&u).unwrap();
        let h = 1e-6;
        for k in 0..n {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[k] += h;
            dn[k] -= h;
            let central = (l1_oracle(n, &x, &up) - l1_oracle(n, &x, &dn)) / (2.0 * h);
            assert!((central - g[k]).abs() <= 1e-5 * g[k].abs().max(1.0), "{central} vs {}", g[k]);
        }
        assert_relative_eq!(obj.value(&u).unwrap(), l1_oracle(n, &x, &u), max_relative = 1e-12);
    }
}

#[test]
fn descent_directions_confirmed_by_oracle() {
    let inst = Instance::symmetric(
        ComponentVector::new(vec![1.0, 1.0]).unwrap(),
        MeasurementSet::full_symmetric(2),
        SparseNoise::empty(),
    )
    .unwrap();
    let x = dense(&inst, 2);
    let obj = Objective::symmetric(&inst, ObjectiveSpec::noiseless_sym()).unwrap();
    let rep = obj.descent_direction(&[2.0, 0.5]).unwrap();
    assert_eq!((rep.t1.clone(), rep.t2.clone()), (vec![1], vec![0]));
    assert_eq!(rep.direction, vec![-4.0, 1.0]);
    let t = 1e-7;
    let f0 = l1_oracle(2, &x, &[2.0, 0.5]);
    assert!(l1_oracle(2, &x, &[2.0 - 4.0 * t, 0.5 + t]) < f0);
    assert!(l1_oracle(2, &x, &[2.0 + 4.0 * t, 0.5 - t]) > f0);

    // u = c u*: every index over-estimated, direction parallel to −u.
    let inst = common::noiseless_instance(4, 7);
    let truth = inst.truth_vector().unwrap().to_vec();
    let n = truth.len();
    let x = dense(&inst, n);
    let obj = Objective::symmetric(&inst, ObjectiveSpec::noiseless_sym()).unwrap();
    let u: Vec<f64> = truth.iter().map(|v| 1.5 * v).collect();
    let rep = obj.descent_direction(&u).unwrap();
    assert_eq!(rep.t2, (0..n).collect::<Vec<_>>());
    let scale = -rep.direction[0] / u[0];
    for (d, ui) in rep.direction.iter().zip(&u) {
        assert_relative_eq!(*d, -scale * ui, max_relative = 1e-12);
    }
    let moved: Vec<f64> = u.iter().zip(&rep.direction).map(|(a, b)| a + t * b).collect();
    assert!(l1_oracle(n, &x, &moved) < l1_oracle(n, &x, &u));
}

#[test]
fn asymmetric_direction_keeps_balance_to_first_order() {
    let mut rng = stream(5, 0, Purpose::Misc);
    for trial in 0..50 {
        let inst = common::asymmetric_instance(5, trial);
        let sym = symmetrize(&inst, 1.0).unwrap();
        let obj = Objective::asymmetric(&sym, ObjectiveSpec::noiseless_asym(1.0)).unwrap();
        let (m, _) = sym.split();
        let mut w: Vec<f64> = (0..obj.dim()).map(|_| rng.random_range(0.2..2.0)).collect();
        // Balance the point so the γ correction is the active construction.
        let (su, sv): (f64, f64) = (w[..m].iter().map(|x| x * x).sum(), w[m..].iter().map(|x| x * x).sum());
        let s = (sv / su).sqrt().sqrt();
        w.iter_mut().enumerate().for_each(|(k, x)| *x = if k < m { *x * s } else { *x / s });
        let rep = match obj.descent_direction(&w) {
            Ok(rep) => rep,
            Err(nnrpca::Error::AtTruth) => continue,
            Err(e) => panic!("{e}"),
        };
        let linear: f64 = w.iter().zip(&rep.direction).enumerate().map(|(k, (a, b))| {
            let side = if k < m { 1.0 } else { -1.0 };
            2.0 * side * a * b
        }).sum();
        let scale: f64 = w.iter().map(|x| x * x).sum();
        assert!(linear.abs() <= 1e-10 * scale, "first-order balance change {linear}");
    }
}

#[test]
fn threshold_arithmetic() {
    let ln = f64::ln;
    assert_relative_eq!(
        connectivity_threshold(GraphModel::Symmetric { n: 50 }, 1.0).unwrap(),
        (4.0 * ln(50.0) + 2.0) / 49.0,
        max_relative = 1e-14
    );
    assert!((connectivity_threshold(GraphModel::Symmetric { n: 50 }, 1.0).unwrap() - 0.360).abs() < 5e-4);
    assert_eq!(connectivity_threshold(GraphModel::Symmetric { n: 2 }, 1.0).unwrap(), 1.0);
    assert!(20.0 * (2.0 * ln(100.0) + 1.0) / 81.0 > 2.5);
    assert_eq!(connectivity_threshold(GraphModel::Bipartite { m: 10, n: 10 }, 1.0).unwrap(), 1.0);

    let b = degree_concentration_bounds(GraphModel::Symmetric { n: 100 }, 1.0, 1.0).unwrap();
    assert_relative_eq!(b.max_degree_bound, 36.0 * ln(100.0), max_relative = 1e-14);
    assert!((b.max_degree_bound - 165.8).abs() < 0.05);
    let b = degree_concentration_bounds(GraphModel::Bipartite { m: 40, n: 40 }, 1.0, 1.0).unwrap();
    assert_eq!(b.min_degree_bound, 20.0);

    let r = check_prob_symmetric(100, 0.5, 0.001, 1.0, 1.0, 0.1).unwrap();
    let p_min = 1740.0 * 1.1 * ln(100.0) / 100.0;
    assert!((p_min - 88.1).abs() < 0.05);
    let cond = r.condition("sampling_probability").unwrap();
    assert_relative_eq!(cond.rhs, p_min, max_relative = 1e-12);
    assert!(!cond.pass && cond.note.is_some());
    assert_relative_eq!(r.condition("noise_density").unwrap().rhs, 1.0 / 145.0, max_relative = 1e-12);

    let r = check_prob_asymmetric(50, 50, 0.5, 0.001, 1.0, 1.0, 1.0).unwrap();
    assert_relative_eq!(r.condition("noise_density").unwrap().rhs, 1.0 / 145.0, max_relative = 1e-12);
    let r = check_prob_asymmetric(25, 50, 0.5, 0.001, 1.0, 1.0, 1.0).unwrap();
    assert_relative_eq!(r.condition("noise_density").unwrap().rhs, 0.5 / 144.5, max_relative = 1e-12);
}

#[test]
fn deterministic_degree_threshold_arithmetic() {
    // u* = [1, 2]: κ = 2. One bad off-diagonal pair, so Δ(B) = 1.
    let inst = Instance::symmetric(
        ComponentVector::new(vec![1.0, 2.0]).unwrap(),
        MeasurementSet::full_symmetric(2),
        SparseNoise::from_entries([((0, 1), 5.0)]),
    )
    .unwrap();
    let r = check_det_symmetric(&inst, 1.0).unwrap();
    let cond = r.condition("good_min_degree_vs_bad_max_degree").unwrap();
    assert_eq!(cond.rhs, 768.0);
    assert_eq!(cond.lhs, 1.0);
    assert!(!r.passed());
}

#[test]
fn sampling_concentration() {
    let n = 1000;
    let omega = sample_omega(Shape::Symmetric { n }, 0.5, &mut stream(6, 0, Purpose::Omega)).unwrap();
    let frac = omega.len() as f64 / (n * (n + 1) / 2) as f64;
    assert!((frac - 0.5).abs() <= 0.01, "{frac}");

    let full = MeasurementSet::full_symmetric(100);
    assert_eq!(full.len(), 5050);
    let noise = sample_noise::<f64, _>(&full, &NoiseModel::constant(0.2, 2.0).unwrap(), &mut stream(6, 0, Purpose::Noise));
    let sd = (5050.0f64 * 0.16).sqrt();
    assert!((noise.len() as f64 - 1010.0).abs() <= 3.0 * sd, "{}", noise.len());

    let u = gen_truth::<f64, _>(10_000, 0.0, 2.0, &mut stream(6, 0, Purpose::Truth)).unwrap();
    let mean = u.as_slice().iter().sum::<f64>() / 1e4;
    assert!((mean - 1.0).abs() <= 0.05, "{mean}");
}

#[test]
fn zero_entry_truth_has_a_spurious_minimum() {
    let inst = build_prop1_counterexample::<f64>(3, 2).unwrap();
    let obj = Objective::symmetric(&inst, ObjectiveSpec::noiseless_sym()).unwrap();
    let res = obj.d_stationarity_test(&[0.0, 0.0, 1.0], 10_000, &mut stream(7, 0, Purpose::Directions)).unwrap();
    assert!(matches!(res, Stationarity::NoDescentFound { .. }));
    assert!(obj.value(&[0.0, 0.0, 1.0]).unwrap() > 0.0);

    // Observing (3, 3) as well removes it: every start recovers.
    let full = Instance::symmetric(
        ComponentVector::new(vec![1.0, 1.0, 0.0]).unwrap(),
        MeasurementSet::full_symmetric(3),
        SparseNoise::empty(),
    )
    .unwrap();
    for seed in 0..100 {
        let res = solve_symmetric(&full, &ObjectiveSpec::noiseless_sym(), &SolverConfig::with_seed(seed), None).unwrap();
        assert!(res.recovery_error.unwrap() <= 1e-4, "seed {seed}: {:?}", res.recovery_error);
    }
}

#[test]
fn bipartite_counterexamples() {
    let omega = MeasurementSet::symmetric(2, [(0, 1)]).unwrap();
    let (inst, hat) = build_bipartite_counterexample(ComponentVector::new(vec![1.0, 1.0]).unwrap(), omega).unwrap();
    assert_relative_eq!(hat[0], 1.01, max_relative = 1e-15);
    assert_relative_eq!(hat[1], 1.0 / 1.01, max_relative = 1e-15);
    let x = dense(&inst, 2);
    assert!(l1_oracle(2, &x, &hat) <= 1e-12);
    assert_eq!(l1_oracle(2, &x, &[1.0, 1.0]), 0.0);

    let omega = MeasurementSet::symmetric(3, [(0, 1), (1, 2)]).unwrap();
    let (inst, hat) =
        build_bipartite_counterexample(ComponentVector::new(vec![0.5, 1.5, 1.0]).unwrap(), omega).unwrap();
    let x = dense(&inst, 3);
    assert!(l1_oracle(3, &x, &hat) <= 1e-12);
    assert!(frobenius_oracle(&hat, inst.truth_vector().unwrap()) > 1e-3);
}

#[test]
fn origin_is_a_local_maximum() {
    let inst = common::noiseless_instance(8, 4);
    let n = inst.rows();
    let x = dense(&inst, n);
    let f0 = l1_oracle(n, &x, &vec![0.0; n]);
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1e-3;
        assert!(l1_oracle(n, &x, &e) <= f0);
    }
    let all = vec![1e-3; n];
    assert!(l1_oracle(n, &x, &all) < f0);
}
