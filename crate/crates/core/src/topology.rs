//! Isolated trees, the giant component and trees hanging off it.

use crate::error::Result;
use crate::graph::Graph;
use crate::typicality::{tau, TAU_TOL};

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
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

    pub fn size_of(&mut self, v: usize) -> usize {
        let r = self.find(v);
        self.size[r]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeStats {
    pub n: usize,
    /// Number of components that are trees.
    pub trees: usize,
    /// Edges inside those trees.
    pub tree_edges: usize,
    pub giant_size: usize,
    /// Edges removed by repeatedly stripping degree-1 vertices from the giant.
    pub planted_edges: usize,
    /// `tree_counts[j - 1]` is the number of isolated trees on `j` vertices, `j <= j_max`.
    pub tree_counts: Vec<usize>,
    pub components: usize,
    pub warnings: Vec<String>,
}

/// Component statistics of `g`. The giant is the largest component, ties
/// going to the one containing the smallest vertex id.
pub fn component_stats(g: &Graph, j_max: usize) -> TreeStats {
    let n = g.n();
    let mut uf = UnionFind::new(n);
    for (u, v) in g.edges() {
        uf.union(u as usize, v as usize);
    }
    let mut root_of = vec![0usize; n];
    let mut vertices = vec![0usize; n];
    let mut edges = vec![0usize; n];
    for v in 0..n {
        let r = uf.find(v);
        root_of[v] = r;
        vertices[r] += 1;
    }
    for (u, _) in g.edges() {
        edges[root_of[u as usize]] += 1;
    }
    let mut stats = TreeStats {
        n,
        trees: 0,
        tree_edges: 0,
        giant_size: 0,
        planted_edges: 0,
        tree_counts: vec![0; j_max],
        components: 0,
        warnings: Vec::new(),
    };
    let mut giant_root = None;
    for v in 0..n {
        if root_of[v] != v {
            continue;
        }
        stats.components += 1;
        let (j, e) = (vertices[v], edges[v]);
        if e + 1 == j {
            stats.trees += 1;
            stats.tree_edges += e;
            if j <= j_max {
                stats.tree_counts[j - 1] += 1;
            }
        }
        if j > stats.giant_size {
            stats.giant_size = j;
            giant_root = Some(v);
        }
    }
    if let Some(root) = giant_root {
        stats.planted_edges = strip_leaves(g, |v| root_of[v] == root);
    }
    if (stats.giant_size as f64) < 0.01 * n as f64 {
        stats.warnings.push(format!(
            "largest component has {} of {n} vertices: no giant component",
            stats.giant_size
        ));
    }
    stats
}

/// Repeatedly deletes degree-1 vertices among `member` vertices and returns
/// the number of deleted edges.
fn strip_leaves(g: &Graph, member: impl Fn(usize) -> bool) -> usize {
    let n = g.n();
    let mut degree = vec![0usize; n];
    let mut alive = vec![false; n];
    let mut queue = Vec::new();
    for v in (0..n).filter(|&v| member(v)) {
        alive[v] = true;
        degree[v] = g.degree(v);
        if degree[v] == 1 {
            queue.push(v);
        }
    }
    let mut stripped = 0;
    while let Some(v) = queue.pop() {
        if !alive[v] || degree[v] != 1 {
            continue;
        }
        alive[v] = false;
        degree[v] = 0;
        let u = g
            .neighbors(v)
            .iter()
            .map(|&u| u as usize)
            .find(|&u| alive[u])
            .expect("a degree-1 vertex has one live neighbor");
        stripped += 1;
        degree[u] -= 1;
        if degree[u] == 1 {
            queue.push(u);
        }
    }
    stripped
}

/// Asymptotic fractions for mean degree `d > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictedFractions {
    pub tau: f64,
    /// Isolated trees per vertex, `(tau/d)(1 - tau/2)`.
    pub trees: f64,
    /// Isolated-tree edges per vertex, `tau^2 / 2d`.
    pub tree_edges: f64,
    /// Giant component share, `1 - tau/d`.
    pub giant: f64,
    /// Planted-tree edges per vertex, `(d - tau) e^{-(d - tau)}`.
    pub planted_edges: f64,
}

pub fn predicted_fractions_for_degree(d: f64) -> Result<PredictedFractions> {
    let t = tau(d, TAU_TOL)?;
    Ok(PredictedFractions {
        tau: t,
        trees: t / d * (1.0 - t / 2.0),
        tree_edges: t * t / (2.0 * d),
        giant: 1.0 - t / d,
        planted_edges: (d - t) * (-(d - t)).exp(),
    })
}

pub fn predicted_fractions(a: f64, b: f64, k: usize) -> Result<PredictedFractions> {
    predicted_fractions_for_degree((a + (k as f64 - 1.0) * b) / k as f64)
}

/// `tau_j = j^{j-2} (d e^{-d})^j / j!`; `tau_j / d` is the asymptotic number
/// of isolated `j`-vertex trees per vertex.
pub fn tau_j(d: f64, j: usize) -> f64 {
    let jf = j as f64;
    let ln_fact: f64 = (1..=j).map(|i| (i as f64).ln()).sum();
    ((jf - 2.0) * jf.ln() + jf * (d.ln() - d) - ln_fact).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_paths() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let s = component_stats(&g, 4);
        assert_eq!((s.trees, s.tree_edges, s.giant_size, s.planted_edges), (2, 4, 3, 2));
        assert_eq!(s.tree_counts, vec![0, 0, 2, 0]);
    }

    #[test]
    fn complete_graph() {
        let edges: Vec<_> = (0..5u32).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        let s = component_stats(&Graph::from_edges(5, &edges).unwrap(), 3);
        assert_eq!((s.trees, s.tree_edges, s.giant_size, s.planted_edges), (0, 0, 5, 0));
    }

    #[test]
    fn vertex_plus_triangle() {
        let g = Graph::from_edges(4, &[(1, 2), (2, 3), (1, 3)]).unwrap();
        let s = component_stats(&g, 3);
        assert_eq!(s.tree_counts[0], 1);
        assert_eq!((s.trees, s.tree_edges, s.giant_size, s.planted_edges), (1, 0, 3, 0));
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn hanging_trees_are_stripped() {
        // Square 0-1-2-3 with a path 3-4-5 and a leaf 6 on 0.
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (0, 3), (3, 4), (4, 5), (0, 6)]).unwrap();
        assert_eq!(component_stats(&g, 1).planted_edges, 3);
    }

    #[test]
    fn tree_series_matches_closed_form() {
        for d in [1.5, 2.0, 3.0] {
            let p = predicted_fractions_for_degree(d).unwrap();
            let series: f64 = (1..=200).map(|j| tau_j(d, j) / d).sum();
            assert!((series - p.trees).abs() < 1e-6, "d={d}: {series} vs {}", p.trees);
        }
        let p = predicted_fractions_for_degree(2.0).unwrap();
        assert!((p.giant - 0.7968).abs() < 1e-4);
        assert!(predicted_fractions_for_degree(1.0 + 1e-9).unwrap().giant < 1e-3);
    }
}
