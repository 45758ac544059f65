//! General ABP: edge split, eigenvalue compensation, depth aggregation and
//! randomized assignment.

use rayon::prelude::*;

use super::cycles::find_short_cycles;
use super::messages::MessageState;
use super::AbpConfig;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::Partition;
use crate::rng::{derive_seed, stream, SbmRng};

/// Relative tolerance for the `|lambda_2| = |lambda_3|` test.
const EQUAL_MAGNITUDE_TOL: f64 = 1e-9;

/// `Y (prod_j M_j^{e_j}) e_m`, where `Y` is given by its columns
/// `Y_{., 1..=m}` and `M_j` has ones on the diagonal and `-lambdas[j]` on the
/// superdiagonal.
///
/// The length-`m` coefficient vector is formed first, then `Y` is applied once.
pub fn compensate(columns: &[Vec<f64>], lambdas: &[f64], exponents: &[usize]) -> Result<Vec<f64>> {
    if lambdas.len() != exponents.len() {
        return Err(Error::LengthMismatch {
            expected: lambdas.len(),
            actual: exponents.len(),
        });
    }
    let m = columns.len();
    let total: usize = exponents.iter().sum();
    if m == 0 || total >= m {
        return Err(Error::ExponentOverflow {
            total,
            available: m.saturating_sub(1),
        });
    }
    let n = columns[0].len();
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: c.len(),
        });
    }
    let mut coef = vec![0.0; m];
    coef[m - 1] = 1.0;
    for (&lambda, &e) in lambdas.iter().zip(exponents) {
        for _ in 0..e {
            // (M w)_i = w_i - lambda w_{i+1}
            for i in 0..m - 1 {
                coef[i] -= lambda * coef[i + 1];
            }
        }
    }
    let first = m - 1 - total;
    Ok((0..n)
        .into_par_iter()
        .map(|v| (first..m).map(|t| columns[t][v] * coef[t]).sum())
        .collect())
}

/// `y''_v = sum of y'_u over vertices u at shortest-path distance exactly `depth` from `v`.
pub fn aggregate_depth(g: &Graph, y_prime: &[f64], depth: usize) -> Vec<f64> {
    if depth == 0 {
        return y_prime.to_vec();
    }
    if depth == 1 {
        return (0..g.n())
            .into_par_iter()
            .map(|v| g.neighbors(v).iter().map(|&u| y_prime[u as usize]).sum())
            .collect();
    }
    (0..g.n())
        .into_par_iter()
        .map_init(
            || (vec![usize::MAX; g.n()], Vec::new()),
            |(dist, touched), v| {
                let mut frontier = vec![v];
                dist[v] = 0;
                touched.push(v);
                for level in 1..=depth {
                    let mut next = Vec::new();
                    for &u in &frontier {
                        for &w in g.neighbors(u) {
                            let w = w as usize;
                            if dist[w] == usize::MAX {
                                dist[w] = level;
                                touched.push(w);
                                next.push(w);
                            }
                        }
                    }
                    frontier = next;
                }
                let total = frontier.iter().map(|&u| y_prime[u]).sum();
                for &u in touched.iter() {
                    dist[u] = usize::MAX;
                }
                touched.clear();
                total
            },
        )
        .collect()
}

/// `max(1, floor(sqrt(ln ln n)))`.
pub fn default_depth(n: usize) -> usize {
    let lnln = (n as f64).ln().ln();
    if lnln.is_finite() && lnln > 0.0 {
        (lnln.sqrt().floor() as usize).max(1)
    } else {
        1
    }
}

/// Probability of placing a vertex with score `y` in the positive set, for band
/// half-width `c_prime`: `1/2 + y / 2c'` clipped to `[0, 1]`.
pub fn assign_probability(y: f64, c_prime: f64) -> f64 {
    if c_prime > 0.0 {
        (0.5 + y / (2.0 * c_prime)).clamp(0.0, 1.0)
    } else if y > 0.0 {
        1.0
    } else if y < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Derived constants of one [`abp_full`] run.
#[derive(Clone, Debug, PartialEq)]
pub struct FullAbpPlan {
    pub s: usize,
    pub gamma: f64,
    pub l: f64,
    /// `(1 - gamma) lambda_{s'}` for `s' < s`.
    pub lambdas: Vec<f64>,
    /// `ceil((m - r - (2r + 1) s') / l)` for `s' < s`, floored at 0.
    pub exponents: Vec<usize>,
    pub depth: usize,
    pub warnings: Vec<String>,
}

impl FullAbpPlan {
    pub fn new(distinct_eigs: &[f64], cfg: &AbpConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        if distinct_eigs.len() < 2 {
            return Err(Error::DegenerateSpectrum(
                "need at least two distinct eigenvalues".into(),
            ));
        }
        let l1 = distinct_eigs[0];
        let l2 = distinct_eigs[1];
        if l1 == 0.0 || !distinct_eigs.iter().all(|x| x.is_finite()) {
            return Err(Error::DegenerateSpectrum(format!("lambda_1 = {l1}")));
        }
        if distinct_eigs.windows(2).any(|w| w[1].abs() > w[0].abs() * (1.0 + EQUAL_MAGNITUDE_TOL)) {
            return Err(Error::DegenerateSpectrum(
                "eigenvalues must be ordered by nonincreasing magnitude".into(),
            ));
        }
        let mut warnings = Vec::new();
        let s = if distinct_eigs.len() > 2
            && (l2.abs() - distinct_eigs[2].abs()).abs() <= EQUAL_MAGNITUDE_TOL * l1.abs()
        {
            3
        } else {
            2
        };
        let gamma = match cfg.gamma {
            Some(g) => g,
            None => {
                let g = (1.0 - l1 / (l2 * l2)) / 2.0;
                if !(l2 * l2 > l1) {
                    warnings.push(format!(
                        "lambda_2^2 = {} <= lambda_1 = {l1}: below the threshold, using gamma = 0",
                        l2 * l2
                    ));
                    0.0
                } else {
                    g
                }
            }
        };
        let r = cfg.r as f64;
        let floor_l = 2.0 * (2.0 * r + 1.0) * (s as f64 - 1.0);
        let base = (1.0 - gamma) * distinct_eigs[s - 1].abs();
        let l = if base > 1.0 {
            ((s as f64 - 1.0) / base.ln() + s as f64 - 1.0).max(floor_l)
        } else {
            warnings.push(format!(
                "(1 - gamma)|lambda_{s}| = {base} <= 1: l falls back to {floor_l}"
            ));
            floor_l
        };
        let mut lambdas = Vec::with_capacity(s - 1);
        let mut exponents = Vec::with_capacity(s - 1);
        for sp in 1..s {
            lambdas.push((1.0 - gamma) * distinct_eigs[sp - 1]);
            let num = cfg.m as f64 - r - (2.0 * r + 1.0) * sp as f64;
            exponents.push((num / l).ceil().max(0.0) as usize);
        }
        Ok(Self {
            s,
            gamma,
            l,
            lambdas,
            exponents,
            depth: default_depth(n),
            warnings,
        })
    }
}

/// Output of [`abp_full_detailed`].
#[derive(Clone, Debug)]
pub struct FullAbpRun {
    pub partition: Partition,
    pub plan: FullAbpPlan,
    /// Number of edges moved to `Gamma`.
    pub gamma_edges: usize,
}

/// General ABP. Side 1 is `S_2` (the set favoured by positive scores).
pub fn abp_full(g: &Graph, cfg: &AbpConfig, distinct_eigs: &[f64]) -> Result<Partition> {
    abp_full_detailed(g, cfg, distinct_eigs).map(|run| run.partition)
}

pub fn abp_full_detailed(g: &Graph, cfg: &AbpConfig, distinct_eigs: &[f64]) -> Result<FullAbpRun> {
    let plan = FullAbpPlan::new(distinct_eigs, cfg, g.n())?;
    let mut rng = SbmRng::new(derive_seed(cfg.seed, stream::ALGORITHM, 1));

    let in_gamma: Vec<bool> = (0..g.num_edges()).map(|_| rng.bernoulli(plan.gamma)).collect();
    let gamma_edges = in_gamma.iter().filter(|&&x| x).count();
    let kept = g.filter_edges(|id| !in_gamma[id]);
    let split = g.filter_edges(|id| in_gamma[id]);

    let x = rng.gaussian_vec(g.n());
    let init: Vec<f64> = (0..kept.num_directed()).map(|e| x[kept.target(e)]).collect();
    let cycles = find_short_cycles(&kept, cfg.r);
    let mut state = MessageState::new(&kept, &cycles, init, false, true)?;
    state.run_to(cfg.m)?;
    let columns = state.into_columns().expect("columns recorded");
    let y_m = compensate(&columns, &plan.lambdas, &plan.exponents)?;

    let y_prime: Vec<f64> = (0..g.n())
        .map(|v| split.neighbors(v).iter().map(|&u| y_m[u as usize]).sum())
        .collect();
    let y_second = aggregate_depth(&kept, &y_prime, plan.depth);

    let n = g.n().max(1) as f64;
    let c_prime = cfg.c * (y_second.iter().map(|y| y * y).sum::<f64>() / n).sqrt();
    let side = y_second
        .iter()
        .map(|&y| {
            if y < -c_prime {
                0
            } else if y > c_prime {
                1
            } else {
                u8::from(rng.bernoulli(assign_probability(y, c_prime)))
            }
        })
        .collect();
    Ok(FullAbpRun {
        partition: Partition {
            side,
            scores: Some(y_second),
        },
        plan,
        gamma_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensate_examples() {
        let cols = vec![vec![1.0], vec![4.0], vec![10.0]];
        assert_eq!(compensate(&cols, &[2.0], &[1]).unwrap(), vec![2.0]);
        assert_eq!(compensate(&cols, &[2.0], &[0]).unwrap(), vec![10.0]);
        assert_eq!(compensate(&cols, &[], &[]).unwrap(), vec![10.0]);
        // Two applications: y3 - 4 y2 + 4 y1.
        assert_eq!(compensate(&cols, &[2.0], &[2]).unwrap(), vec![-2.0]);
        assert!(matches!(
            compensate(&cols, &[2.0], &[3]),
            Err(Error::ExponentOverflow { total: 3, available: 2 })
        ));
    }

    #[test]
    fn compensate_annihilates_geometric_columns() {
        let lambda: f64 = 3.0;
        let cols: Vec<Vec<f64>> = (1..=10).map(|t| vec![lambda.powi(t), -2.0 * lambda.powi(t)]).collect();
        for e in 1..5 {
            let out = compensate(&cols, &[lambda], &[e]).unwrap();
            assert!(out.iter().all(|x| x.abs() < 1e-6), "{out:?}");
        }
    }

    #[test]
    fn aggregate_examples() {
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let y = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(aggregate_depth(&star, &y, 0), y.to_vec());
        assert_eq!(aggregate_depth(&star, &y, 1), vec![9.0, 1.0, 1.0, 1.0]);
        // Leaves see the other two leaves at distance 2.
        assert_eq!(aggregate_depth(&star, &y, 2), vec![0.0, 7.0, 6.0, 5.0]);
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(aggregate_depth(&tri, &[1.0, 2.0, 4.0], 1), vec![6.0, 5.0, 3.0]);
    }

    #[test]
    fn depth_defaults() {
        assert_eq!(default_depth(1), 1);
        assert_eq!(default_depth(3), 1);
        assert_eq!(default_depth(1_000_000), 1);
    }

    #[test]
    fn plan_for_symmetric_k3() {
        // k = 3, a = 8, b = 1: lambda_1 = 10/3, lambda_2 = 7/3.
        let cfg = AbpConfig::new(49, 0);
        let plan = FullAbpPlan::new(&[10.0 / 3.0, 7.0 / 3.0], &cfg, 50_000).unwrap();
        assert_eq!(plan.s, 2);
        let gamma = (1.0 - (10.0 / 3.0) / (49.0 / 9.0)) / 2.0;
        assert!((plan.gamma - gamma).abs() < 1e-15);
        assert_eq!(plan.l, 10.0);
        assert_eq!(plan.exponents, vec![5]);
        assert!(plan.warnings.is_empty());
    }

    #[test]
    fn plan_s3_and_fallbacks() {
        let cfg = AbpConfig::new(60, 0);
        let plan = FullAbpPlan::new(&[4.0, 3.0, -3.0], &cfg, 1000).unwrap();
        assert_eq!(plan.s, 3);
        assert_eq!(plan.lambdas.len(), 2);
        // Below threshold: gamma clamps to 0 with a warning.
        let plan = FullAbpPlan::new(&[3.0, 1.0], &cfg, 1000).unwrap();
        assert_eq!(plan.gamma, 0.0);
        assert_eq!(plan.l, 10.0);
        assert_eq!(plan.warnings.len(), 2);
        assert!(FullAbpPlan::new(&[3.0], &cfg, 10).is_err());
        assert!(FullAbpPlan::new(&[1.0, 3.0], &cfg, 10).is_err());
    }

    #[test]
    fn assign_probability_is_monotone_and_clipped() {
        let mut prev = 0.0;
        for i in -40..=40 {
            let p = assign_probability(i as f64 / 10.0, 2.0);
            assert!((0.0..=1.0).contains(&p));
            assert!(p >= prev);
            prev = p;
        }
        assert_eq!(assign_probability(0.0, 0.0), 0.5);
    }
}
