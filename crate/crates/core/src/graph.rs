//! Immutable sparse simple graphs and community labelings.

use crate::error::{Error, Result};

/// Undirected simple graph in compressed sparse row form.
///
/// Each vertex's neighbors are stored sorted. The position of `v'` inside the
/// neighbor list of `v` doubles as the index of the directed edge `(v, v')`,
/// so directed edges are enumerated lexicographically and
/// `reverse(e)` maps `(v, v')` to `(v', v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    sources: Vec<u32>,
    reverse: Vec<usize>,
    edge_id: Vec<usize>,
}

impl Graph {
    /// Builds a graph from undirected edges. Edges may come in any order and
    /// orientation; self-loops, duplicates and out-of-range ids are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::InvalidGraph(format!("{n} vertices exceed u32 ids")));
        }
        let mut canon: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "parallel edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted_unique(n, &canon))
    }

    /// `edges` must be sorted, unique, with `u < v` and ids below `n`.
    pub(crate) fn from_sorted_unique(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut targets = vec![0u32; total];
        let mut sources = vec![0u32; total];
        let mut fill = offsets[..n].to_vec();
        // Sorted (u, v) pairs with u < v: appending v to u and u to v keeps every
        // neighbor list sorted because for a fixed vertex w, neighbors smaller
        // than w arrive (as (x, w)) before neighbors larger than w (as (w, y)).
        for &(u, v) in edges {
            let (u, v) = (u as usize, v as usize);
            targets[fill[u]] = v as u32;
            sources[fill[u]] = u as u32;
            fill[u] += 1;
            targets[fill[v]] = u as u32;
            sources[fill[v]] = v as u32;
            fill[v] += 1;
        }
        let mut g = Self {
            n,
            offsets,
            targets,
            sources,
            reverse: Vec::new(),
            edge_id: Vec::new(),
        };
        let mut reverse = vec![0usize; total];
        let mut edge_id = vec![0usize; total];
        let mut next_id = 0;
        for e in 0..total {
            let (u, v) = (g.sources[e], g.targets[e]);
            if u < v {
                let r = g.directed_index(v, u).expect("symmetric adjacency");
                reverse[e] = r;
                reverse[r] = e;
                edge_id[e] = next_id;
                edge_id[r] = next_id;
                next_id += 1;
            }
        }
        g.reverse = reverse;
        g.edge_id = edge_id;
        g
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, &[])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn num_directed(&self) -> usize {
        self.targets.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Directed edge indices leaving `v`, aligned with [`Graph::neighbors`].
    pub fn out_edges(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn source(&self, e: usize) -> usize {
        self.sources[e] as usize
    }

    pub fn target(&self, e: usize) -> usize {
        self.targets[e] as usize
    }

    pub fn reverse(&self, e: usize) -> usize {
        self.reverse[e]
    }

    /// Index of the undirected edge underlying directed edge `e`, in
    /// lexicographic order of `(min, max)` pairs.
    pub fn edge_id(&self, e: usize) -> usize {
        self.edge_id[e]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.directed_index(u as u32, v as u32).is_some()
    }

    pub fn directed_index(&self, u: u32, v: u32) -> Option<usize> {
        let u = u as usize;
        self.neighbors(u)
            .binary_search(&v)
            .ok()
            .map(|j| self.offsets[u] + j)
    }

    /// Undirected edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_directed()).filter_map(move |e| {
            let (u, v) = (self.sources[e], self.targets[e]);
            (u < v).then_some((u, v))
        })
    }

    /// The subgraph on the same vertex set keeping only edges whose
    /// undirected id satisfies `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize) -> bool) -> Graph {
        let kept: Vec<(u32, u32)> = self
            .edges()
            .enumerate()
            .filter_map(|(id, uv)| keep(id).then_some(uv))
            .collect();
        Graph::from_sorted_unique(self.n, &kept)
    }

    /// BFS distances from `start`; unreachable vertices get `usize::MAX`.
    pub fn bfs_distances(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[start] = 0;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                let w = w as usize;
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.num_directed() as f64 / self.n as f64
        }
    }
}

/// Community assignment `sigma` with values in `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    sigma: Vec<u32>,
    k: usize,
}

impl Labeling {
    pub fn new(sigma: Vec<u32>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidLabeling("k must be positive".into()));
        }
        if let Some((v, &c)) = sigma.iter().enumerate().find(|(_, &c)| c as usize >= k) {
            return Err(Error::InvalidLabeling(format!(
                "vertex {v} has community {c} >= k = {k}"
            )));
        }
        Ok(Self { sigma, k })
    }

    /// Uses `max + 1` (at least 1) as the community count.
    pub fn from_vec(sigma: Vec<u32>) -> Self {
        let k = sigma.iter().max().map_or(1, |&m| m as usize + 1);
        Self { sigma, k }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.sigma
    }

    pub fn get(&self, v: usize) -> usize {
        self.sigma[v] as usize
    }

    /// Same assignment viewed with a larger community count.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.sigma.clone(), k)
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.sigma {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Applies `perm` to every label: `sigma_v -> perm[sigma_v]`.
    pub fn permuted(&self, perm: &[u32]) -> Self {
        Self {
            sigma: self.sigma.iter().map(|&c| perm[c as usize]).collect(),
            k: self.k,
        }
    }
}
