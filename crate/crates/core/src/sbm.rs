//! Stochastic block model parameters, sampling and the `PQ` spectrum.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::rng::SbmRng;

const PARAM_TOL: f64 = 1e-12;

/// Default relative tolerance for grouping equal eigenvalues.
pub const DEFAULT_EIG_TOL: f64 = 1e-9;

/// `SBM(n, p, Q/n)`: community prior `p` and connectivity matrix `Q`
/// (row-major, `k x k`). Vertices in communities `i` and `j` are joined
/// with probability `Q[i][j] / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SbmParams {
    p: Vec<f64>,
    q: Vec<f64>,
}

impl SbmParams {
    pub fn new(p: Vec<f64>, q: Vec<Vec<f64>>) -> Result<Self> {
        let k = p.len();
        if k < 2 {
            return Err(Error::ParameterOutOfRange(format!("k = {k}, need at least 2")));
        }
        if p.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::ParameterOutOfRange("prior entries must be positive".into()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PARAM_TOL {
            return Err(Error::ParameterOutOfRange(format!("prior sums to {sum}")));
        }
        if q.len() != k || q.iter().any(|row| row.len() != k) {
            return Err(Error::ParameterOutOfRange(format!("Q must be {k}x{k}")));
        }
        for i in 0..k {
            for j in 0..k {
                let x = q[i][j];
                if !(x >= 0.0) || !x.is_finite() {
                    return Err(Error::ParameterOutOfRange(format!("Q[{i}][{j}] = {x}")));
                }
                if (x - q[j][i]).abs() > PARAM_TOL {
                    return Err(Error::ParameterOutOfRange(format!(
                        "Q not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            p,
            q: q.into_iter().flatten().collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn prior(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.k() + j]
    }

    /// Expected degree of a vertex in community `i`: `sum_j p_j Q_ij`.
    pub fn expected_degree(&self, i: usize) -> f64 {
        (0..self.k()).map(|j| self.p[j] * self.q(i, j)).sum()
    }
}

/// `SBM(n, k, a, b)`: uniform prior, `Q_ii = a`, `Q_ij = b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricSbm {
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
}

impl SymmetricSbm {
    pub fn new(n: usize, k: usize, a: f64, b: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::ParameterOutOfRange(format!("k = {k}, need at least 2")));
        }
        if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::ParameterOutOfRange(format!("a = {a}, b = {b}")));
        }
        Ok(Self { n, k, a, b })
    }

    /// Average degree `(a + (k-1) b) / k`.
    pub fn d(&self) -> f64 {
        (self.a + (self.k as f64 - 1.0) * self.b) / self.k as f64
    }

    pub fn lambda1(&self) -> f64 {
        self.d()
    }

    pub fn lambda2(&self) -> f64 {
        (self.a - self.b) / self.k as f64
    }

    pub fn snr(&self) -> Result<f64> {
        snr_symmetric(self.k, self.a, self.b)
    }

    pub fn params(&self) -> SbmParams {
        let k = self.k;
        let p = vec![1.0 / k as f64; k];
        let q = (0..k)
            .map(|i| (0..k).map(|j| if i == j { self.a } else { self.b }).collect())
            .collect();
        // 1/k summed k times may be off by a few ulps; renormalize exactly.
        let s: f64 = p.iter().sum();
        let p = p.into_iter().map(|x| x / s).collect();
        SbmParams::new(p, q).expect("symmetric parameters are valid")
    }

    pub fn sample(&self, seed: u64) -> Result<(Labeling, Graph)> {
        sample(&self.params(), self.n, seed)
    }
}

/// `(a - b)^2 / (k (a + (k-1) b))`.
pub fn snr_symmetric(k: usize, a: f64, b: f64) -> Result<f64> {
    let denom = k as f64 * (a + (k as f64 - 1.0) * b);
    if denom == 0.0 {
        return Err(Error::DivisionByZero("a + (k-1) b = 0".into()));
    }
    Ok((a - b).powi(2) / denom)
}

/// Draws `(sigma, G)` from `SBM(n, p, Q/n)`.
///
/// Labels are drawn first (one uniform per vertex, inverse CDF), then each
/// community block is filled with geometric skipping so the cost is
/// `O(n + |E|)`. Blocks are visited in `(i, j)`, `i <= j` order.
pub fn sample(params: &SbmParams, n: usize, seed: u64) -> Result<(Labeling, Graph)> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange("n must be at least 1".into()));
    }
    let k = params.k();
    for i in 0..k {
        for j in 0..k {
            if params.q(i, j) / n as f64 > 1.0 {
                return Err(Error::ParameterOutOfRange(format!(
                    "Q[{i}][{j}] / n = {} > 1",
                    params.q(i, j) / n as f64
                )));
            }
        }
    }
    let mut rng = SbmRng::new(seed);
    let mut cdf = Vec::with_capacity(k);
    let mut acc = 0.0;
    for &pi in params.prior() {
        acc += pi;
        cdf.push(acc);
    }
    let sigma: Vec<u32> = (0..n)
        .map(|_| {
            let u = rng.uniform();
            cdf.iter().position(|&c| u < c).unwrap_or(k - 1) as u32
        })
        .collect();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (v, &c) in sigma.iter().enumerate() {
        members[c as usize].push(v as u32);
    }

    let mut edges: Vec<(u32, u32)> = Vec::new();
    for i in 0..k {
        for j in i..k {
            let prob = params.q(i, j) / n as f64;
            if prob <= 0.0 {
                continue;
            }
            if i == j {
                sample_within(&members[i], prob, &mut rng, &mut edges);
            } else {
                sample_between(&members[i], &members[j], prob, &mut rng, &mut edges);
            }
        }
    }
    for e in edges.iter_mut() {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    let labels = Labeling::new(sigma, k)?;
    Ok((labels, Graph::from_sorted_unique(n, &edges)))
}

/// Pairs `(row, col)` with `col < row` inside one community, enumerated
/// row by row and skipped geometrically.
fn sample_within(vs: &[u32], prob: f64, rng: &mut SbmRng, out: &mut Vec<(u32, u32)>) {
    let s = vs.len();
    if s < 2 {
        return;
    }
    if prob >= 1.0 {
        for r in 1..s {
            for c in 0..r {
                out.push((vs[c], vs[r]));
            }
        }
        return;
    }
    let lp = (1.0 - prob).ln();
    let (mut row, mut col) = (1usize, 0usize);
    loop {
        let mut skip = rng.geometric_skip(lp);
        // Advance `skip` positions in the lower triangle.
        loop {
            let remaining = (row - col) as u64;
            if skip < remaining {
                col += skip as usize;
                break;
            }
            skip -= remaining;
            row += 1;
            col = 0;
            if row >= s {
                return;
            }
        }
        out.push((vs[col], vs[row]));
        col += 1;
        if col >= row {
            row += 1;
            col = 0;
            if row >= s {
                return;
            }
        }
    }
}

fn sample_between(
    left: &[u32],
    right: &[u32],
    prob: f64,
    rng: &mut SbmRng,
    out: &mut Vec<(u32, u32)>,
) {
    let total = left.len() as u64 * right.len() as u64;
    if total == 0 {
        return;
    }
    let width = right.len() as u64;
    if prob >= 1.0 {
        for &u in left {
            for &v in right {
                out.push((u, v));
            }
        }
        return;
    }
    let lp = (1.0 - prob).ln();
    let mut idx: u64 = 0;
    loop {
        let skip = rng.geometric_skip(lp);
        idx = match idx.checked_add(skip) {
            Some(i) if i < total => i,
            _ => return,
        };
        out.push((left[(idx / width) as usize], right[(idx % width) as usize]));
        idx += 1;
        if idx >= total {
            return;
        }
    }
}

/// Eigen-structure of `PQ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// All `k` eigenvalues, ordered by nonincreasing magnitude (positive first on ties).
    pub all_eigs: Vec<f64>,
    /// Distinct values `lambda_1, ..., lambda_h`, same ordering.
    pub distinct: Vec<f64>,
    /// Multiplicity of each distinct value.
    pub multiplicity: Vec<usize>,
    /// 3 when `h > 2` and `|lambda_2| = |lambda_3|` (up to tolerance), else 2.
    pub s: usize,
    /// `lambda_2^2 / lambda_1` (0 when `h = 1`).
    pub snr: f64,
}

impl Spectrum {
    pub fn lambda1(&self) -> f64 {
        self.distinct[0]
    }

    pub fn lambda2(&self) -> Option<f64> {
        self.distinct.get(1).copied()
    }
}

/// Eigenvalues of `PQ`, computed from the similar symmetric matrix
/// `P^{1/2} Q P^{1/2}`.
///
/// Two eigenvalues are merged into one distinct value when they differ by at
/// most `magnitude_tol * |lambda_1|`. Values of equal magnitude and opposite
/// sign stay distinct; they are what triggers `s = 3`.
pub fn spectrum(params: &SbmParams, magnitude_tol: f64) -> Result<Spectrum> {
    if !(magnitude_tol > 0.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "magnitude tolerance {magnitude_tol} must be positive"
        )));
    }
    let k = params.k();
    let sqrt_p: Vec<f64> = params.prior().iter().map(|x| x.sqrt()).collect();
    let m = DMatrix::from_fn(k, k, |i, j| sqrt_p[i] * params.q(i, j) * sqrt_p[j]);
    let mut eigs: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    eigs.sort_by(|x, y| {
        y.abs()
            .partial_cmp(&x.abs())
            .unwrap()
            .then(y.partial_cmp(x).unwrap())
    });
    let scale = eigs[0].abs();
    if scale == 0.0 {
        return Err(Error::DegenerateSpectrum("lambda_1 = 0".into()));
    }
    let tol = magnitude_tol * scale;
    let mut distinct: Vec<f64> = Vec::new();
    let mut multiplicity: Vec<usize> = Vec::new();
    for &e in &eigs {
        match distinct.iter().position(|&d| (d - e).abs() <= tol) {
            Some(i) => multiplicity[i] += 1,
            None => {
                distinct.push(e);
                multiplicity.push(1);
            }
        }
    }
    // Snap near-zero values (round-off from the eigensolver) to exactly zero.
    for d in distinct.iter_mut() {
        if d.abs() <= tol {
            *d = 0.0;
        }
    }
    let s = if distinct.len() > 2 && (distinct[1].abs() - distinct[2].abs()).abs() <= tol {
        3
    } else {
        2
    };
    let snr = distinct.get(1).map_or(0.0, |l2| l2 * l2 / distinct[0]);
    Ok(Spectrum {
        all_eigs: eigs,
        distinct,
        multiplicity,
        s,
        snr,
    })
}
