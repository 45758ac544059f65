//! Detection quality measures.

use crate::error::{Error, Result};
use crate::graph::Labeling;

/// Largest `k` for which [`agreement`] searches all of `S_k` exhaustively.
pub const EXHAUSTIVE_K_MAX: usize = 10;

/// A two-set output `(S, S^c)`: `side[v] == 1` iff `v` is in `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub side: Vec<u8>,
    /// Vertex scores the split was derived from, when the algorithm has them.
    pub scores: Option<Vec<f64>>,
}

impl Partition {
    pub fn new(side: Vec<u8>) -> Self {
        Self { side, scores: None }
    }

    /// `S = {v : score_v > 0}`; ties at zero go to the complement.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let side = scores.iter().map(|&s| u8::from(s > 0.0)).collect();
        Self {
            side,
            scores: Some(scores),
        }
    }

    pub fn len(&self) -> usize {
        self.side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side.is_empty()
    }

    /// The partition viewed as a two-community labeling.
    pub fn as_labeling(&self) -> Labeling {
        Labeling::new(self.side.iter().map(|&s| s as u32).collect(), 2)
            .expect("sides are 0 or 1")
    }
}

/// `max_{i,j} |Omega_i ∩ S|/|Omega_i| - |Omega_j ∩ S|/|Omega_j|`.
pub fn detection_margin(labels: &Labeling, part: &Partition) -> Result<f64> {
    if labels.len() != part.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            actual: part.len(),
        });
    }
    let k = labels.k();
    let mut total = vec![0usize; k];
    let mut in_s = vec![0usize; k];
    for (v, &s) in part.side.iter().enumerate() {
        let c = labels.get(v);
        total[c] += 1;
        in_s[c] += s as usize;
    }
    if let Some(i) = total.iter().position(|&t| t == 0) {
        return Err(Error::EmptyCommunity(i));
    }
    let fractions = total.iter().zip(&in_s).map(|(&t, &s)| s as f64 / t as f64);
    let (lo, hi) = fractions.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
        (lo.min(f), hi.max(f))
    });
    Ok(hi - lo)
}

/// How the permutation maximum in [`agreement`] was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgreementMethod {
    /// Every permutation of `[k]` was scored (`k <= EXHAUSTIVE_K_MAX`).
    Exhaustive,
    /// Maximum-weight assignment on the confusion matrix (Hungarian algorithm).
    Assignment,
}

/// `k x k` confusion counts, `c[i][j] = #{v : x_v = i, y_v = j}`.
fn confusion(x: &Labeling, y: &Labeling) -> Result<(usize, Vec<Vec<u64>>)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let k = x.k().max(y.k());
    let mut c = vec![vec![0u64; k]; k];
    for (&a, &b) in x.as_slice().iter().zip(y.as_slice()) {
        c[a as usize][b as usize] += 1;
    }
    Ok((k, c))
}

/// Number of vertices matched under the best relabeling of `y`.
fn best_matches(c: &[Vec<u64>], method: AgreementMethod) -> u64 {
    let k = c.len();
    match method {
        AgreementMethod::Exhaustive => {
            // Heap's algorithm over pi, scoring sum_j c[pi(j)][j].
            let mut perm: Vec<usize> = (0..k).collect();
            let score = |p: &[usize]| (0..k).map(|j| c[p[j]][j]).sum::<u64>();
            let mut best = score(&perm);
            let mut stack = vec![0usize; k];
            let mut i = 1;
            while i < k {
                if stack[i] < i {
                    if i % 2 == 0 {
                        perm.swap(0, i);
                    } else {
                        perm.swap(stack[i], i);
                    }
                    best = best.max(score(&perm));
                    stack[i] += 1;
                    i = 1;
                } else {
                    stack[i] = 0;
                    i += 1;
                }
            }
            best
        }
        AgreementMethod::Assignment => {
            let max = c.iter().flatten().copied().max().unwrap_or(0) as i64;
            let cost: Vec<Vec<i64>> = c
                .iter()
                .map(|row| row.iter().map(|&v| max - v as i64).collect())
                .collect();
            let assign = hungarian(&cost);
            assign.iter().enumerate().map(|(i, &j)| c[i][j]).sum()
        }
    }
}

/// Minimum-cost perfect assignment for a square cost matrix; returns the
/// column assigned to each row. O(k^3) shortest augmenting path form.
pub fn hungarian(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = i64::MAX / 4;
    // 1-based potentials, as in the classical formulation.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// `A(x, y) = max_pi (1/n) sum_i 1(x_i = pi(y_i))`.
///
/// Exhaustive over `S_k` for `k <= EXHAUSTIVE_K_MAX`, optimal assignment above
/// that. Both arguments are viewed with `k = max(x.k, y.k)`.
pub fn agreement(x: &Labeling, y: &Labeling) -> Result<f64> {
    agreement_with_method(x, y).map(|(a, _)| a)
}

pub fn agreement_with_method(x: &Labeling, y: &Labeling) -> Result<(f64, AgreementMethod)> {
    let (k, c) = confusion(x, y)?;
    let method = if k <= EXHAUSTIVE_K_MAX {
        AgreementMethod::Exhaustive
    } else {
        AgreementMethod::Assignment
    };
    if x.is_empty() {
        return Ok((1.0, method));
    }
    Ok((best_matches(&c, method) as f64 / x.len() as f64, method))
}

/// Agreement forced through a specific method (used to cross-check the two).
pub fn agreement_using(x: &Labeling, y: &Labeling, method: AgreementMethod) -> Result<f64> {
    let (_, c) = confusion(x, y)?;
    if x.is_empty() {
        return Ok(1.0);
    }
    Ok(best_matches(&c, method) as f64 / x.len() as f64)
}

/// Permutation-minimized Hamming distance `d_*(x, y)`.
pub fn permutation_distance(x: &Labeling, y: &Labeling) -> Result<usize> {
    let (k, c) = confusion(x, y)?;
    let method = if k <= EXHAUSTIVE_K_MAX {
        AgreementMethod::Exhaustive
    } else {
        AgreementMethod::Assignment
    };
    Ok(x.len() - best_matches(&c, method) as usize)
}

/// Whether `y` lies in the bad set `B_eps(x)`: `d_*(x, y)/n > 1 - 1/k - eps`.
pub fn bad_set_membership(x: &Labeling, y: &Labeling, eps: f64) -> Result<bool> {
    let k = x.k().max(y.k());
    let d = permutation_distance(x, y)?;
    if x.is_empty() {
        return Ok(false);
    }
    Ok(d as f64 / x.len() as f64 > 1.0 - 1.0 / k as f64 - eps)
}
