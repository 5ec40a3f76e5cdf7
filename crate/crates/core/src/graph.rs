//! Sparsity graphs induced by index sets, with connectivity, bipartiteness
//! and degree statistics.
//!
//! Self-loop convention: an edge `(i, i)` contributes one to the degree of
//! `i` (it is a single measurement of row `i`) and makes its component
//! non-bipartite.

use std::collections::VecDeque;

use crate::model::{Instance, MeasurementSet, Shape};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    bipartite_shape: Option<(usize, usize)>,
}

impl SparsityGraph {
    /// Graph on `vertex_count` vertices from arbitrary undirected edges.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<_> = edges
            .into_iter()
            .map(|(a, b)| {
                assert!(a < vertex_count && b < vertex_count, "edge ({a}, {b}) out of range");
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Self { vertex_count, edges, bipartite_shape: None }
    }

    /// `G(Ω)` for symmetric Ω, or the bipartite `G_{m,n}(Ω)` with edges
    /// `(i, j + m)` for asymmetric Ω.
    pub fn from_omega(omega: &MeasurementSet) -> Self {
        Self::from_pairs(omega.shape(), omega.pairs().iter().copied())
    }

    pub(crate) fn from_pairs(shape: Shape, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        match shape {
            Shape::Symmetric { n } => Self::new(n, pairs),
            Shape::Asymmetric { m, n } => {
                let mut g = Self::new(m + n, pairs.into_iter().map(|(i, j)| (i, j + m)));
                g.bipartite_shape = Some((m, n));
                g
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn bipartite_shape(&self) -> Option<(usize, usize)> {
        self.bipartite_shape
    }

    /// Degree of every vertex, self-loops counted once.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            if a != b {
                deg[b] += 1;
            }
        }
        deg
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            if a != b {
                adj[b].push(a);
            }
        }
        adj
    }

    pub fn analyze(&self) -> GraphReport {
        analyze(self)
    }

    /// Two-colouring of the component containing `start`, as `(side of
    /// start, other side)`, each sorted. `None` if that component has a
    /// self-loop or an odd cycle.
    pub fn bipartition(&self, start: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let adj = self.adjacency();
        let mut colour: Vec<Option<bool>> = vec![None; self.vertex_count];
        colour[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let cv = colour[v]?;
            for &w in &adj[v] {
                match colour[w] {
                    None => {
                        colour[w] = Some(!cv);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cv => return None,
                    Some(_) => {}
                }
            }
        }
        let mut sides = (Vec::new(), Vec::new());
        for (v, c) in colour.iter().enumerate() {
            match c {
                Some(false) => sides.0.push(v),
                Some(true) => sides.1.push(v),
                None => {}
            }
        }
        Some(sides)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphReport {
    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest member.
    pub components: Vec<Vec<usize>>,
    pub bipartite: Vec<bool>,
    pub degrees: Vec<usize>,
    pub max_degree: usize,
    pub min_degree: usize,
    pub connected: bool,
}

impl GraphReport {
    pub fn has_bipartite_component(&self) -> bool {
        self.bipartite.iter().any(|&b| b)
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Short CSV row: `vertices,components,connected,bipartite_components,max_degree,min_degree`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.degrees.len(),
            self.components.len(),
            self.connected,
            self.bipartite.iter().filter(|&&b| b).count(),
            self.max_degree,
            self.min_degree
        )
    }

    pub const CSV_HEADER: &'static str = "vertices,components,connected,bipartite_components,max_degree,min_degree";
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

pub fn analyze(g: &SparsityGraph) -> GraphReport {
    let n = g.vertex_count;
    let mut uf = UnionFind::new(n);
    for &(a, b) in &g.edges {
        uf.union(a, b);
    }
    let mut comp_of_root = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        if comp_of_root[r] == usize::MAX {
            comp_of_root[r] = components.len();
            components.push(Vec::new());
        }
        components[comp_of_root[r]].push(v);
    }

    // 2-colouring by BFS; a self-loop or an odd cycle breaks it.
    let adj = g.adjacency();
    let mut colour: Vec<Option<bool>> = vec![None; n];
    let bipartite = components
        .iter()
        .map(|comp| {
            let start = comp[0];
            colour[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            let mut ok = true;
            while let Some(v) = queue.pop_front() {
                let cv = colour[v].expect("queued vertices are coloured");
                for &w in &adj[v] {
                    match colour[w] {
                        None => {
                            colour[w] = Some(!cv);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cv => ok = false,
                        Some(_) => {}
                    }
                }
            }
            ok
        })
        .collect();

    let degrees = g.degrees();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let min_degree = degrees.iter().copied().min().unwrap_or(0);
    GraphReport { connected: components.len() == 1, components, bipartite, degrees, max_degree, min_degree }
}

/// Reports for the sparsity graphs of the good set `G` and the bad set `B`.
/// Both graphs span all vertices, so rows without good measurements have
/// good-degree zero.
pub fn good_bad_subgraphs<T: Real>(inst: &Instance<T>) -> (GraphReport, GraphReport) {
    let shape = inst.omega().shape();
    let good = SparsityGraph::from_pairs(shape, inst.good_pairs());
    let bad = SparsityGraph::from_pairs(shape, inst.bad_pairs());
    (good.analyze(), bad.analyze())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ComponentVector, SparseNoise};

    #[test]
    fn path_and_self_loop_construction() {
        let omega = MeasurementSet::symmetric(3, [(0, 1), (1, 2)]).unwrap();
        let g = SparsityGraph::from_omega(&omega);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        let g = SparsityGraph::from_omega(&MeasurementSet::symmetric(1, [(0, 0)]).unwrap());
        assert_eq!(g.edges(), &[(0, 0)]);
        assert_eq!(g.degrees(), vec![1]);
    }

    #[test]
    fn asymmetric_matching_is_bipartite_graph() {
        let omega = MeasurementSet::asymmetric(2, 2, [(0, 0), (1, 1)]).unwrap();
        let g = SparsityGraph::from_omega(&omega);
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edges(), &[(0, 2), (1, 3)]);
        assert_eq!(g.bipartite_shape(), Some((2, 2)));
        let r = g.analyze();
        assert_eq!(r.component_count(), 2);
        assert!(r.bipartite.iter().all(|&b| b));
    }

    #[test]
    fn triangle_path_and_mixed() {
        let tri = SparsityGraph::new(3, [(0, 1), (1, 2), (0, 2)]).analyze();
        assert!(tri.connected);
        assert_eq!(tri.bipartite, vec![false]);
        assert_eq!((tri.max_degree, tri.min_degree), (2, 2));

        let path = SparsityGraph::new(3, [(0, 1), (1, 2)]).analyze();
        assert!(path.connected);
        assert_eq!(path.bipartite, vec![true]);
        assert_eq!((path.max_degree, path.min_degree), (2, 1));

        let mixed = SparsityGraph::new(4, [(0, 1), (0, 0), (2, 3)]).analyze();
        assert_eq!(mixed.components, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(mixed.bipartite, vec![false, true]);
        assert!(!mixed.connected);
    }

    #[test]
    fn bipartition_of_path_and_triangle() {
        let path = SparsityGraph::new(4, [(0, 1), (1, 2)]);
        assert_eq!(path.bipartition(1), Some((vec![1], vec![0, 2])));
        assert_eq!(path.bipartition(3), Some((vec![3], vec![])));
        let tri = SparsityGraph::new(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(tri.bipartition(0), None);
    }

    #[test]
    fn isolated_vertices_have_degree_zero() {
        let r = SparsityGraph::new(3, [(0, 1)]).analyze();
        assert_eq!(r.min_degree, 0);
        assert_eq!(r.component_count(), 2);
        assert!(r.bipartite.iter().all(|&b| b));
    }

    fn cv(x: &[f64]) -> ComponentVector<f64> {
        ComponentVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn good_bad_degrees() {
        let inst = Instance::symmetric(cv(&[1.0, 2.0]), MeasurementSet::full_symmetric(2), SparseNoise::empty()).unwrap();
        let (_, bad) = good_bad_subgraphs(&inst);
        assert_eq!(bad.max_degree, 0);

        let noise = SparseNoise::from_entries([((0, 1), 1.0)]);
        let inst = Instance::symmetric(cv(&[1.0, 1.0]), MeasurementSet::full_symmetric(2), noise).unwrap();
        let (good, bad) = good_bad_subgraphs(&inst);
        assert_eq!(good.min_degree, 1);
        assert_eq!(bad.max_degree, 1);

        let pairs = (0..3).flat_map(|i| (i..3).map(move |j| (i, j))).filter(|&p| p != (2, 2));
        let omega = MeasurementSet::symmetric(3, pairs).unwrap();
        let inst = Instance::symmetric(cv(&[1.0, 1.0, 0.0]), omega, SparseNoise::empty()).unwrap();
        let (good, bad) = good_bad_subgraphs(&inst);
        assert_eq!(bad.max_degree, 0);
        assert_eq!(good.min_degree, 2);
    }
}
