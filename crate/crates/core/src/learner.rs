//! Estimating `(a, b, k)` from short-cycle statistics.
//!
//! In `SBM(n, k, a, b)` the number of `c`-cycles is asymptotically Poisson
//! with mean `(d^c + (k-1) mu^c) / 2c`, where `d = (a + (k-1)b)/k` and
//! `mu = (a - b)/k`. Cycles are counted through closed nonbacktracking walks,
//! which are cheap to count. A closed nonbacktracking walk of length `m` at
//! `u` is either a cycle traversal (possibly wound several times) or a tail
//! of length `j` from `u` into a cycle, a traversal of length `m - 2j`, and
//! the same tail back. Counting tails as `d^j` per cycle vertex gives
//!
//! `E[walks(m)] ~ sum_{j >= 0} d^j sum_{c >= 3, c | m - 2j} (d^c + (k-1) mu^c)`.
//!
//! [`estimate_params`] fits `mu` to the observed walk counts for each
//! candidate `k` by weighted least squares.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Work bound for exact cycle enumeration.
pub const CYCLE_WORK_LIMIT: f64 = 1e10;

/// Number of simple cycles of length exactly `m`.
pub fn count_cycles(g: &Graph, m: usize) -> Result<u64> {
    if m < 3 {
        return Err(Error::ParameterOutOfRange(format!("cycle length {m} < 3")));
    }
    let max_deg = (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0);
    let work = g.num_directed() as f64 * (max_deg.saturating_sub(1) as f64).powi(m as i32 - 2);
    if work > CYCLE_WORK_LIMIT {
        return Err(Error::SizeGuard(format!(
            "exact {m}-cycle enumeration needs ~{work:.1e} steps"
        )));
    }
    let total: u64 = (0..g.n())
        .into_par_iter()
        .map(|s| {
            let mut path = vec![s];
            cycles_from(g, s, m, &mut path)
        })
        .sum();
    // Each cycle is found once per direction from its smallest vertex.
    Ok(total / 2)
}

fn cycles_from(g: &Graph, start: usize, m: usize, path: &mut Vec<usize>) -> u64 {
    let last = *path.last().unwrap();
    if path.len() == m {
        return u64::from(g.has_edge(last, start));
    }
    let mut count = 0;
    for &w in g.neighbors(last) {
        let w = w as usize;
        if w <= start || path.contains(&w) {
            continue;
        }
        path.push(w);
        count += cycles_from(g, start, m, path);
        path.pop();
    }
    count
}

/// Closed nonbacktracking walks of length `m`, summed over start vertices.
pub fn nb_closed_walks_total(g: &Graph, m: usize) -> Result<u64> {
    Ok(nb_closed_walks_profile(g, m)?[m])
}

/// `profile[m]` = closed nonbacktracking walks of length `m` for `m <= m_max`
/// (entries below 3 are 0).
///
/// Each walk is split in the middle: `A_t(u, p -> w)` counts nonbacktracking
/// walks of length `t` from `u` whose last step is `p -> w`, and a closed walk
/// of length `m` at `u` is a pair of such half-walks meeting at `w` through
/// distinct last vertices.
pub fn nb_closed_walks_profile(g: &Graph, m_max: usize) -> Result<Vec<u64>> {
    if m_max < 3 {
        return Err(Error::ParameterOutOfRange(format!("walk length {m_max} < 3")));
    }
    let half_max = m_max.div_ceil(2);
    let per_vertex = |u: usize| -> Vec<u64> {
        let layers = half_walks(g, u, half_max);
        let mut out = vec![0u64; m_max + 1];
        for (m, slot) in out.iter_mut().enumerate().skip(3) {
            let h = m / 2;
            *slot = join_halves(g, &layers[h - 1], &layers[m - h - 1]);
        }
        out
    };
    Ok((0..g.n())
        .into_par_iter()
        .map(per_vertex)
        .reduce(
            || vec![0u64; m_max + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        ))
}

/// `layers[t - 1]`: walk counts of length `t` keyed by the reverse of the
/// last directed edge (so entries group by the walk's endpoint), sorted.
fn half_walks(g: &Graph, u: usize, t_max: usize) -> Vec<Vec<(usize, u64)>> {
    let mut layers = Vec::with_capacity(t_max);
    let mut current: Vec<(usize, u64)> = g.out_edges(u).map(|e| (g.reverse(e), 1)).collect();
    current.sort_unstable();
    layers.push(current);
    for _ in 1..t_max {
        let prev = layers.last().unwrap();
        let mut next = Vec::new();
        for &(key, c) in prev {
            // key = (y -> x) for a walk ending with x -> y.
            let (y, x) = (g.source(key), g.target(key));
            for f in g.out_edges(y) {
                if g.target(f) != x {
                    next.push((g.reverse(f), c));
                }
            }
        }
        next.sort_unstable_by_key(|&(k, _)| k);
        let mut merged: Vec<(usize, u64)> = Vec::with_capacity(next.len());
        for (k, c) in next {
            match merged.last_mut() {
                Some((lk, lc)) if *lk == k => *lc += c,
                _ => merged.push((k, c)),
            }
        }
        layers.push(merged);
    }
    layers
}

/// `sum_w (S1(w) S2(w) - sum_p A(p->w) B(p->w))`.
fn join_halves(g: &Graph, a: &[(usize, u64)], b: &[(usize, u64)]) -> u64 {
    let mut total = 0u64;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let wa = g.source(a[i].0);
        let wb = g.source(b[j].0);
        if wa < wb {
            i += 1;
            while i < a.len() && g.source(a[i].0) == wa {
                i += 1;
            }
            continue;
        }
        if wb < wa {
            j += 1;
            while j < b.len() && g.source(b[j].0) == wb {
                j += 1;
            }
            continue;
        }
        let w = wa;
        let (i0, j0) = (i, j);
        while i < a.len() && g.source(a[i].0) == w {
            i += 1;
        }
        while j < b.len() && g.source(b[j].0) == w {
            j += 1;
        }
        let (ga, gb) = (&a[i0..i], &b[j0..j]);
        let s1: u64 = ga.iter().map(|x| x.1).sum();
        let s2: u64 = gb.iter().map(|x| x.1).sum();
        let mut diag = 0;
        let (mut p, mut q) = (0, 0);
        while p < ga.len() && q < gb.len() {
            match ga[p].0.cmp(&gb[q].0) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    diag += ga[p].1 * gb[q].1;
                    p += 1;
                    q += 1;
                }
            }
        }
        total += s1 * s2 - diag;
    }
    total
}

/// `(d^m + (k-1) mu^m) / 2m`: expected number of `m`-cycles.
pub fn expected_cycle_count(k: usize, a: f64, b: f64, m: usize) -> f64 {
    let kf = k as f64;
    let d = (a + (kf - 1.0) * b) / kf;
    let mu = (a - b) / kf;
    (d.powi(m as i32) + (kf - 1.0) * mu.powi(m as i32)) / (2.0 * m as f64)
}

/// Expected closed nonbacktracking walks of length `m`, tails and windings included.
pub fn expected_nb_closed(d: f64, k: usize, mu: f64, m: usize) -> f64 {
    let mut total = 0.0;
    let mut j = 0;
    while m >= 2 * j + 3 {
        let len = m - 2 * j;
        let cycles: f64 = (3..=len)
            .filter(|c| len % c == 0)
            .map(|c| d.powi(c as i32) + (k as f64 - 1.0) * mu.powi(c as i32))
            .sum();
        total += d.powi(j as i32) * cycles;
        j += 1;
    }
    total
}

/// Residual excess (weighted units) below which a larger `k` is not preferred
/// over a smaller one: the 95% point of a one-degree chi-square.
pub const K_SELECT_CHI2: f64 = 3.84;

/// Smallest residual gain over `mu = 0` that counts as signal: the expected
/// gain of a one-parameter fit to pure noise.
pub const NO_SIGNAL_FLOOR: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct KFit {
    pub k: usize,
    pub mu: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamEstimate {
    pub a: f64,
    pub b: f64,
    pub k: usize,
    pub d: f64,
    pub mu: f64,
    /// Best residual per candidate `k`.
    pub fits: Vec<KFit>,
    /// Residual of the `mu = 0` model.
    pub null_residual: f64,
    pub no_signal: bool,
    /// `observed[m]` closed nonbacktracking walk counts.
    pub observed: Vec<u64>,
    pub warnings: Vec<String>,
}

fn residual(obs: &[u64], d: f64, k: usize, mu: f64, m_range: std::ops::RangeInclusive<usize>) -> f64 {
    m_range
        .map(|m| {
            let null = expected_nb_closed(d, k, 0.0, m);
            // Walk counts are cycle counts scaled by about 2m, so their
            // variance is about 2m times their mean.
            let w = 1.0 / (2.0 * m as f64 * null.max(1.0));
            let r = obs[m] as f64 - expected_nb_closed(d, k, mu, m);
            w * r * r
        })
        .sum()
}

fn fit_mu(obs: &[u64], d: f64, k: usize, m_max: usize) -> KFit {
    let lo = -d / (k as f64 - 1.0);
    let hi = d;
    let f = |mu: f64| residual(obs, d, k, mu, 3..=m_max);
    const GRID: usize = 400;
    let step = (hi - lo) / GRID as f64;
    let (best_i, _) = (0..=GRID)
        .map(|i| (i, f(lo + step * i as f64)))
        .fold((0, f64::INFINITY), |acc, (i, r)| if r < acc.1 { (i, r) } else { acc });
    let mut a = (lo + step * (best_i as f64 - 1.0)).max(lo);
    let mut b = (lo + step * (best_i as f64 + 1.0)).min(hi);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    let mut mu = 0.5 * (a + b);
    let mut res = f(mu);
    let grid_mu = lo + step * best_i as f64;
    let grid_res = f(grid_mu);
    if grid_res < res {
        mu = grid_mu;
        res = grid_res;
    }
    KFit { k, mu, residual: res }
}

/// Fits `(a, b, k)` to closed nonbacktracking walk counts of lengths `3..=m_max`.
///
/// For each `k` in `2..=k_max`, `mu` is fitted by a grid search over
/// `[-d/(k-1), d]` followed by golden-section refinement. The smallest `k`
/// whose residual exceeds the best one by at most [`K_SELECT_CHI2`] is
/// chosen. The fit is flagged `no_signal` (and `a = b = d` returned) when the
/// improvement over `mu = 0` is below 5% of the null residual or below
/// [`NO_SIGNAL_FLOOR`].
pub fn estimate_params(g: &Graph, m_max: usize, k_max: usize) -> Result<ParamEstimate> {
    if m_max < 5 {
        return Err(Error::ParameterOutOfRange(format!("m_max = {m_max} < 5")));
    }
    if k_max < 2 {
        return Err(Error::ParameterOutOfRange(format!("k_max = {k_max} < 2")));
    }
    if g.n() == 0 || g.num_edges() == 0 {
        return Err(Error::InvalidGraph("cannot learn from a graph without edges".into()));
    }
    let d = g.mean_degree();
    let mut warnings = Vec::new();
    if d > 1.0 {
        let cap = ((g.n() as f64).ln() / d.ln()).powf(0.25).floor() as usize;
        if m_max > cap {
            warnings.push(format!(
                "m_max = {m_max} exceeds log_d(n)^(1/4) = {cap}; short-cycle counts may interact"
            ));
        }
    }
    let observed = nb_closed_walks_profile(g, m_max)?;
    let mut est = fit_profile(observed, d, k_max)?;
    est.warnings.splice(0..0, warnings);
    Ok(est)
}

/// The fitting half of [`estimate_params`]: `observed[m]` holds closed
/// nonbacktracking walk counts for `m = 0..=m_max`, `d` the mean degree.
pub fn fit_profile(observed: Vec<u64>, d: f64, k_max: usize) -> Result<ParamEstimate> {
    if observed.len() < 6 {
        return Err(Error::ParameterOutOfRange(format!(
            "profile reaches m = {}, need at least 5",
            observed.len() as isize - 1
        )));
    }
    if k_max < 2 {
        return Err(Error::ParameterOutOfRange(format!("k_max = {k_max} < 2")));
    }
    let m_max = observed.len() - 1;
    let fits: Vec<KFit> = (2..=k_max).map(|k| fit_mu(&observed, d, k, m_max)).collect();
    let best = fits.iter().map(|f| f.residual).fold(f64::INFINITY, f64::min);
    let chosen = fits
        .iter()
        .find(|f| f.residual <= best + K_SELECT_CHI2)
        .expect("at least one candidate")
        .clone();
    let null_residual = residual(&observed, d, 2, 0.0, 3..=m_max);
    let gain = null_residual - chosen.residual;
    let no_signal = gain < (0.05 * null_residual).max(NO_SIGNAL_FLOOR);
    let (k, mu) = if no_signal { (chosen.k, 0.0) } else { (chosen.k, chosen.mu) };
    Ok(ParamEstimate {
        a: d + (k as f64 - 1.0) * mu,
        b: d - mu,
        k,
        d,
        mu,
        fits,
        null_residual,
        no_signal,
        observed,
        warnings: Vec::new(),
    })
}
