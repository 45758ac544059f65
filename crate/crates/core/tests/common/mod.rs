#![allow(dead_code)]

use sbmlab::rng::SbmRng;
use sbmlab::Graph;

/// G(n, p) from a seed.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = SbmRng::new(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.bernoulli(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Closed nonbacktracking walks of length `m` at `v`, by brute force.
pub fn closed_nb_walks_at(g: &Graph, v: usize, m: usize) -> u64 {
    fn go(g: &Graph, start: usize, prev: usize, cur: usize, left: usize) -> u64 {
        if left == 0 {
            return u64::from(cur == start);
        }
        g.neighbors(cur)
            .iter()
            .map(|&w| w as usize)
            .filter(|&w| w != prev)
            .map(|w| go(g, start, cur, w, left - 1))
            .sum()
    }
    go(g, v, usize::MAX, v, m)
}

/// Dense Hashimoto matrix over the graph's directed edge indices:
/// `B[e][f] = 1` when `target(e) = source(f)` and `f` is not the reverse of `e`.
pub fn hashimoto(g: &Graph) -> Vec<Vec<u64>> {
    let m = g.num_directed();
    let mut b = vec![vec![0u64; m]; m];
    for e in 0..m {
        for f in g.out_edges(g.target(e)) {
            if f != g.reverse(e) {
                b[e][f] = 1;
            }
        }
    }
    b
}

pub fn matmul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut c = vec![vec![0u64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
