//! Acyclic belief propagation.
//!
//! Three detectors share one message-passing engine ([`MessageState`]):
//!
//! * [`abp_star`]: symmetric-model version. Messages are mean-centered at
//!   every step, vertices are split on the sign of their summed messages.
//! * [`abp_star_retro`]: no centering during propagation; the dominant
//!   eigenvalue is cancelled afterwards by the bidiagonal compensation
//!   `y' = Y M^{m'} e_m`.
//! * [`abp_full`]: the general version with the random edge split `Gamma`,
//!   eigenvalue compensation for every eigenvalue above the detected one,
//!   depth aggregation and randomized assignment.
//!
//! With `r >= 3`, messages flowing around cycles of length at most `r` are
//! cancelled, so the iterates count `r`-nonbacktracking walks.

pub mod cycles;
mod full;
pub mod messages;

pub use cycles::{find_short_cycles, CycleRecord, ShortCycleIndex};
pub use full::{
    abp_full, abp_full_detailed, aggregate_depth, assign_probability, compensate,
    default_depth, FullAbpPlan, FullAbpRun,
};
pub use messages::{mean_centered, pairwise_sum, vertex_sums, MessageState};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::Partition;
use crate::rng::{derive_seed, stream, SbmRng};

/// Upper bound applied to the automatic choice of `m`.
pub const DEFAULT_M_CAP: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct AbpConfig {
    /// Number of propagation rounds (`y^(1)` through `y^(m)`).
    pub m: usize,
    /// Nonbacktracking order; `2` skips cycle handling entirely.
    pub r: usize,
    /// Width of the randomized assignment band, in units of the rms score.
    pub c: f64,
    /// Edge split probability; `None` lets [`abp_full`] derive it from the spectrum.
    pub gamma: Option<f64>,
    pub seed: u64,
    /// Center messages at every step ([`abp_star`] only).
    pub mean_subtract: bool,
}

impl AbpConfig {
    pub fn new(m: usize, seed: u64) -> Self {
        Self {
            m,
            r: 2,
            c: 1.0,
            gamma: None,
            seed,
            mean_subtract: true,
        }
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_mean_subtract(mut self, on: bool) -> Self {
        self.mean_subtract = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::ParameterOutOfRange(format!("m = {} < 2", self.m)));
        }
        if self.r < 2 {
            return Err(Error::ParameterOutOfRange(format!("r = {} < 2", self.r)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("c = {} must be positive", self.c)));
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(Error::ParameterOutOfRange(format!("gamma = {g} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// `ceil(2 ln n / ln snr) + 4`, capped at [`DEFAULT_M_CAP`].
///
/// Below the threshold (`snr <= 1`) no depth is enough; `ceil(2 ln n) + 4`
/// is used so the run stays cheap.
pub fn default_m(n: usize, snr: f64) -> usize {
    let ln_n = (n.max(2) as f64).ln();
    let m = if snr > 1.0 {
        (2.0 * ln_n / snr.ln()).ceil() + 4.0
    } else {
        (2.0 * ln_n).ceil() + 4.0
    };
    (m as usize).clamp(2, DEFAULT_M_CAP)
}

/// `ceil(m ln(lambda1^2 / lambda2^2) / ln n) + 1`, kept below `m`.
pub fn default_m_prime(m: usize, n: usize, lambda1: f64, lambda2: f64) -> usize {
    let ln_n = (n.max(2) as f64).ln();
    let ratio = (lambda1 * lambda1 / (lambda2 * lambda2)).ln();
    let mp = if ratio.is_finite() {
        (m as f64 * ratio / ln_n).ceil().max(0.0) as usize + 1
    } else {
        m - 1
    };
    mp.min(m - 1)
}

/// Draws `y^(1)` for [`abp_star`]: one standard normal per directed edge.
pub fn gaussian_edge_init(g: &Graph, seed: u64) -> Vec<f64> {
    SbmRng::new(derive_seed(seed, stream::ALGORITHM, 0)).gaussian_vec(g.num_directed())
}

/// Symmetric-model ABP with per-step mean centering.
///
/// Returns `({v : y'_v > 0}, {v : y'_v <= 0})` as side 1 and side 0, with
/// `y'_v = sum_{v'} y^(m)_{v,v'}` kept as scores.
pub fn abp_star(g: &Graph, cfg: &AbpConfig) -> Result<Partition> {
    cfg.validate()?;
    abp_star_with_init(g, cfg, gaussian_edge_init(g, cfg.seed))
}

/// [`abp_star`] from a caller-supplied `y^(1)`.
pub fn abp_star_with_init(g: &Graph, cfg: &AbpConfig, init: Vec<f64>) -> Result<Partition> {
    cfg.validate()?;
    let cycles = find_short_cycles(g, cfg.r);
    let mut state = MessageState::new(g, &cycles, init, cfg.mean_subtract, false)?;
    state.run_to(cfg.m)?;
    Ok(Partition::from_scores(state.vertex_scores()))
}

/// ABP without centering; the `lambda1` direction is removed afterwards by
/// `y' = Y M^{m'} e_m` with `M = I - lambda1 * (superdiagonal)`.
pub fn abp_star_retro(g: &Graph, cfg: &AbpConfig, lambda1: f64, m_prime: usize) -> Result<Partition> {
    cfg.validate()?;
    let cycles = find_short_cycles(g, cfg.r);
    let init = gaussian_edge_init(g, cfg.seed);
    let mut state = MessageState::new(g, &cycles, init, false, true)?;
    state.run_to(cfg.m)?;
    let columns = state.into_columns().expect("columns recorded");
    let scores = compensate(&columns, &[lambda1], &[m_prime])?;
    Ok(Partition::from_scores(scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbm::SymmetricSbm;

    #[test]
    fn config_validation() {
        assert!(AbpConfig::new(10, 0).validate().is_ok());
        assert!(AbpConfig::new(1, 0).validate().is_err());
        assert!(AbpConfig::new(10, 0).with_r(1).validate().is_err());
        assert!(AbpConfig::new(10, 0).with_c(0.0).validate().is_err());
        assert!(AbpConfig::new(10, 0).with_gamma(1.0).validate().is_err());
        assert!(AbpConfig::new(10, 0).with_gamma(0.0).validate().is_ok());
    }

    #[test]
    fn default_m_values() {
        // 2 ln(50000) / ln(4/3) = 75.2...
        assert_eq!(default_m(50_000, 4.0 / 3.0), 80);
        assert_eq!(default_m(1000, 0.5), (2.0 * 1000f64.ln()).ceil() as usize + 4);
        assert_eq!(default_m(1000, 1.0 + 1e-12), DEFAULT_M_CAP);
        let mp = default_m_prime(80, 50_000, 3.0, 2.0);
        assert_eq!(mp, (80.0 * (9.0f64 / 4.0).ln() / 50_000f64.ln()).ceil() as usize + 1);
    }

    #[test]
    fn empty_graph_goes_to_second_set() {
        let g = Graph::empty(7);
        let p = abp_star(&g, &AbpConfig::new(5, 1)).unwrap();
        assert_eq!(p.side, vec![0; 7]);
        assert_eq!(p.scores.unwrap(), vec![0.0; 7]);
    }

    #[test]
    fn deterministic_given_seed() {
        let (_, g) = SymmetricSbm::new(2000, 2, 5.0, 1.0).unwrap().sample(3).unwrap();
        let cfg = AbpConfig::new(12, 9).with_r(3);
        assert_eq!(abp_star(&g, &cfg).unwrap(), abp_star(&g, &cfg).unwrap());
        let other = AbpConfig::new(12, 10).with_r(3);
        assert_ne!(abp_star(&g, &cfg).unwrap(), abp_star(&g, &other).unwrap());
    }

    #[test]
    fn tree_ignores_r() {
        let edges = [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (4, 6), (0, 7)];
        let g = Graph::from_edges(8, &edges).unwrap();
        let base = abp_star(&g, &AbpConfig::new(6, 2)).unwrap();
        for r in 3..6 {
            assert_eq!(abp_star(&g, &AbpConfig::new(6, 2).with_r(r)).unwrap(), base);
        }
    }

    #[test]
    fn retro_with_zero_shift_matches_plain() {
        let (_, g) = SymmetricSbm::new(500, 2, 4.0, 1.0).unwrap().sample(5).unwrap();
        let cfg = AbpConfig::new(8, 4).with_mean_subtract(false);
        let plain = abp_star(&g, &cfg).unwrap();
        let retro = abp_star_retro(&g, &cfg, 0.0, 0).unwrap();
        assert_eq!(plain.scores, retro.scores);
    }
}
