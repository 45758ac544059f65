//! Generalized `r`-nonbacktracking walks.
//!
//! An `r`-nonbacktracking walk `v_0, ..., v_m` never revisits a vertex within
//! a window of `r` steps: `v_i != v_j` whenever `|i - j| <= r`. `r = 2` is the
//! usual nonbacktracking condition.
//!
//! [`WalkOperator`] is the walk matrix `W^(r)` over directed paths of length
//! `r - 1`: it shifts a path forward by one vertex, dropping the first one,
//! provided the dropped vertex differs from the new last vertex. For `r = 2`
//! this is the Hashimoto matrix on directed edges. The matrix is never
//! materialized; each basis path stores the indices of the paths feeding it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::Partition;
use crate::rng::{mix64, SbmRng};

/// Brute-force count of `r`-nonbacktracking walks of length `m` from `from` to `to`.
///
/// Exponential in `m`; meant as an oracle on small graphs.
pub fn nb_walk_count(g: &Graph, r: usize, m: usize, from: usize, to: usize) -> u64 {
    fn extend(g: &Graph, r: usize, m: usize, to: usize, walk: &mut Vec<usize>) -> u64 {
        let last = *walk.last().unwrap();
        if walk.len() == m + 1 {
            return u64::from(last == to);
        }
        let mut count = 0;
        for &w in g.neighbors(last) {
            let w = w as usize;
            let window = walk.len().saturating_sub(r);
            if walk[window..].contains(&w) {
                continue;
            }
            walk.push(w);
            count += extend(g, r, m, to, walk);
            walk.pop();
        }
        count
    }
    let mut walk = vec![from];
    extend(g, r, m, to, &mut walk)
}

/// Order-independent fingerprint of a graph's edge set.
fn graph_fingerprint(g: &Graph) -> u64 {
    g.edges().fold(mix64(g.n() as u64), |acc, (u, v)| {
        acc.wrapping_add(mix64(((u as u64) << 32) | v as u64))
    })
}

/// All directed paths `(v_1, ..., v_r)` with distinct vertices, in
/// lexicographic order, together with the predecessor structure of `W^(r)`.
#[derive(Clone, Debug)]
pub struct PathBasis {
    r: usize,
    paths: Vec<u32>,
    pred_offsets: Vec<usize>,
    preds: Vec<u32>,
    fingerprint: u64,
}

impl PathBasis {
    pub fn new(g: &Graph, r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::ParameterOutOfRange(format!("r = {r}, need r >= 2")));
        }
        let mut paths = Vec::new();
        let mut stack = Vec::with_capacity(r);
        for v in 0..g.n() {
            stack.push(v as u32);
            enumerate_paths(g, r, &mut stack, &mut paths);
            stack.pop();
        }
        let count = paths.len() / r;
        let mut basis = Self {
            r,
            paths,
            pred_offsets: Vec::with_capacity(count + 1),
            preds: Vec::new(),
            fingerprint: graph_fingerprint(g),
        };
        basis.pred_offsets.push(0);
        let mut preds = Vec::new();
        let mut probe = vec![0u32; r];
        for q in 0..count {
            let path = basis.path(q);
            let (head, tail_last) = (path[0], path[r - 1]);
            // Inputs are (u, v_1, ..., v_{r-1}) with u outside the output path.
            probe[1..].copy_from_slice(&path[..r - 1]);
            for &u in g.neighbors(head as usize) {
                if u == tail_last || path[..r - 1].contains(&u) {
                    continue;
                }
                probe[0] = u;
                let idx = basis.index_of(&probe).expect("shifted path is in the basis");
                preds.push(idx as u32);
            }
            basis.pred_offsets.push(preds.len());
        }
        basis.preds = preds;
        Ok(basis)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.paths.len() / self.r
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn path(&self, i: usize) -> &[u32] {
        &self.paths[i * self.r..(i + 1) * self.r]
    }

    /// Position of `path` in the basis (binary search on the sorted enumeration).
    pub fn index_of(&self, path: &[u32]) -> Option<usize> {
        if path.len() != self.r {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.path(mid).cmp(path) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn predecessors(&self, i: usize) -> &[u32] {
        &self.preds[self.pred_offsets[i]..self.pred_offsets[i + 1]]
    }

    pub fn belongs_to(&self, g: &Graph) -> bool {
        self.fingerprint == graph_fingerprint(g)
    }

    /// Lifts per-directed-edge message values (indexed as in [`Graph`]) to the
    /// basis: path `(v_1, v_2, ...)` takes the value of directed edge `(v_2, v_1)`.
    ///
    /// With this convention, the message on directed edge `(v, v')` after `t`
    /// propagation steps equals the sum of `W^(r)`-iterates over paths ending
    /// in `(..., v', v)`.
    pub fn lift_edge_values(&self, g: &Graph, edge_values: &[f64]) -> NbVector {
        let values = (0..self.len())
            .map(|i| {
                let p = self.path(i);
                let e = g.directed_index(p[1], p[0]).expect("path edge exists");
                edge_values[e]
            })
            .collect();
        NbVector { values }
    }

    /// Sums basis values into vertices by the last vertex of each path.
    pub fn vertex_scores(&self, n: usize, x: &NbVector) -> Vec<f64> {
        let mut scores = vec![0.0; n];
        for (i, &val) in x.values.iter().enumerate() {
            scores[self.path(i)[self.r - 1] as usize] += val;
        }
        scores
    }

    /// Sums basis values onto directed edges `(v_r, v_{r-1})` (message orientation).
    pub fn edge_sums(&self, g: &Graph, x: &NbVector) -> Vec<f64> {
        let mut out = vec![0.0; g.num_directed()];
        for (i, &val) in x.values.iter().enumerate() {
            let p = self.path(i);
            let e = g
                .directed_index(p[self.r - 1], p[self.r - 2])
                .expect("path edge exists");
            out[e] += val;
        }
        out
    }
}

fn enumerate_paths(g: &Graph, r: usize, stack: &mut Vec<u32>, out: &mut Vec<u32>) {
    if stack.len() == r {
        out.extend_from_slice(stack);
        return;
    }
    let last = *stack.last().unwrap() as usize;
    for &w in g.neighbors(last) {
        if stack.contains(&w) {
            continue;
        }
        stack.push(w);
        enumerate_paths(g, r, stack, out);
        stack.pop();
    }
}

/// One real value per basis path.
#[derive(Clone, Debug, PartialEq)]
pub struct NbVector {
    pub values: Vec<f64>,
}

impl NbVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
        }
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Applies `W^(r)` to `x` without forming the matrix.
pub fn w_r_apply(g: &Graph, basis: &PathBasis, x: &NbVector) -> Result<NbVector> {
    if !basis.belongs_to(g) {
        return Err(Error::BasisMismatch);
    }
    if x.values.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            actual: x.values.len(),
        });
    }
    Ok(apply_unchecked(basis, x, 0.0))
}

/// `(W^(r) - shift I) x`.
fn apply_unchecked(basis: &PathBasis, x: &NbVector, shift: f64) -> NbVector {
    let values = (0..basis.len())
        .into_par_iter()
        .map(|q| {
            let s: f64 = basis.predecessors(q).iter().map(|&p| x.values[p as usize]).sum();
            s - shift * x.values[q]
        })
        .collect();
    NbVector { values }
}

/// Runs `m - m_prime - 1` plain applications of `W^(r)` followed by
/// `m_prime` applications of `W^(r) - lambda1 I`, starting from `init`.
///
/// With `normalize`, the iterate is divided by its Euclidean norm after every
/// step. The final vector is returned.
pub fn power_iterate(
    basis: &PathBasis,
    init: NbVector,
    m: usize,
    m_prime: usize,
    lambda1: f64,
    normalize: bool,
) -> Result<NbVector> {
    if m == 0 || m_prime >= m {
        return Err(Error::ParameterOutOfRange(format!(
            "need m > m' >= 0 and m >= 1, got m = {m}, m' = {m_prime}"
        )));
    }
    if init.values.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            actual: init.values.len(),
        });
    }
    let mut y = init;
    for step in 0..m - 1 {
        let shift = if step >= m - m_prime - 1 { lambda1 } else { 0.0 };
        y = apply_unchecked(basis, &y, shift);
        if normalize {
            let norm = y.norm();
            if norm > 0.0 {
                y.values.iter_mut().for_each(|v| *v /= norm);
            }
        }
    }
    Ok(y)
}

/// Spectral detection with `W^(r)`: Gaussian start, `m - m'` powers,
/// `m'` shifted powers cancelling the `lambda1` direction, vertex sums, sign split.
pub fn power_iteration_detect(
    g: &Graph,
    r: usize,
    m: usize,
    m_prime: usize,
    lambda1: f64,
    seed: u64,
) -> Result<Partition> {
    if g.num_edges() == 0 {
        return Ok(Partition::from_scores(vec![0.0; g.n()]));
    }
    let basis = PathBasis::new(g, r)?;
    if basis.is_empty() {
        return Err(Error::EmptyBasis(r - 1));
    }
    let mut rng = SbmRng::new(seed);
    let init = NbVector {
        values: rng.gaussian_vec(basis.len()),
    };
    let y = power_iterate(&basis, init, m, m_prime, lambda1, true)?;
    Ok(Partition::from_scores(basis.vertex_scores(g.n(), &y)))
}

/// Estimates the Perron root of `W^(r)` by `iters` normalized power steps
/// from a Gaussian start, as the growth of the norm over one final step.
///
/// The shifted steps of [`power_iteration_detect`] cancel the top direction
/// only as well as `lambda1` matches this root, so on finite graphs the
/// empirical value is usually the better shift.
pub fn perron_root(g: &Graph, r: usize, iters: usize, seed: u64) -> Result<f64> {
    let basis = PathBasis::new(g, r)?;
    if basis.is_empty() {
        return Ok(0.0);
    }
    let mut rng = SbmRng::new(seed);
    let init = NbVector {
        values: rng.gaussian_vec(basis.len()),
    };
    let y = power_iterate(&basis, init, iters.max(1) + 1, 0, 0.0, true)?;
    Ok(apply_unchecked(&basis, &y, 0.0).norm() / y.norm().max(f64::MIN_POSITIVE))
}

/// Largest `n` accepted by the dense walk-count recursion.
pub const SIGMA_MAX_N: usize = 2000;

/// Dense `n x n` matrix of nonbacktracking walk counts, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkCounts {
    pub n: usize,
    pub data: Vec<i64>,
}

impl WalkCounts {
    pub fn get(&self, u: usize, v: usize) -> i64 {
        self.data[u * self.n + v]
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|v| self.get(v, v)).sum()
    }
}

/// `Sigma^(0), ..., Sigma^(t_max)`: `Sigma^(t)_{u,v}` is the number of
/// (2-)nonbacktracking walks of length `t` from `u` to `v`.
///
/// `Sigma^(2)` is set directly to common-neighbor counts with a zero
/// diagonal; from `t = 3` on, `Sigma^(t) = A Sigma^(t-1) - D Sigma^(t-2)`
/// with `D = diag(deg - 1)`.
pub fn sigma_sequence(g: &Graph, t_max: usize) -> Result<Vec<WalkCounts>> {
    let n = g.n();
    if n > SIGMA_MAX_N {
        return Err(Error::SizeGuard(format!(
            "dense walk counts need n <= {SIGMA_MAX_N}, got {n}"
        )));
    }
    let identity = {
        let mut data = vec![0i64; n * n];
        (0..n).for_each(|v| data[v * n + v] = 1);
        WalkCounts { n, data }
    };
    let adjacency = {
        let mut data = vec![0i64; n * n];
        for (u, v) in g.edges() {
            data[u as usize * n + v as usize] = 1;
            data[v as usize * n + u as usize] = 1;
        }
        WalkCounts { n, data }
    };
    // A * M using the sparse rows of A.
    let sparse_mul = |m: &WalkCounts| -> Vec<i64> {
        let mut out = vec![0i64; n * n];
        out.par_chunks_mut(n.max(1)).enumerate().for_each(|(u, row)| {
            for &w in g.neighbors(u) {
                let src = &m.data[w as usize * n..(w as usize + 1) * n];
                row.iter_mut().zip(src).for_each(|(o, s)| *o += s);
            }
        });
        out
    };
    let mut seq = vec![identity];
    if t_max >= 1 {
        seq.push(adjacency);
    }
    if t_max >= 2 {
        let mut data = sparse_mul(&seq[1]);
        (0..n).for_each(|v| data[v * n + v] = 0);
        seq.push(WalkCounts { n, data });
    }
    for t in 3..=t_max {
        let mut data = sparse_mul(&seq[t - 1]);
        let prev2 = &seq[t - 2];
        for u in 0..n {
            let excess = g.degree(u) as i64 - 1;
            for v in 0..n {
                data[u * n + v] -= excess * prev2.data[u * n + v];
            }
        }
        seq.push(WalkCounts { n, data });
    }
    Ok(seq)
}

pub fn sigma_t(g: &Graph, t: usize) -> Result<WalkCounts> {
    Ok(sigma_sequence(g, t)?.pop().expect("sequence is nonempty"))
}
