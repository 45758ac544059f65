//! The message-passing engine shared by every ABP variant.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::cycles::ShortCycleIndex;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Rescaling kicks in once a message magnitude exceeds `2^RESCALE_BITS`.
const RESCALE_BITS: i32 = 600;

/// Deterministic pairwise sum: the reduction tree depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 1024;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
    a + b
}

/// `values` minus their mean.
pub fn mean_centered(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let mean = pairwise_sum(values) / values.len() as f64;
    values.par_iter().map(|x| x - mean).collect()
}

/// Per-vertex sums of directed-edge values over out-edges.
pub fn vertex_sums(g: &Graph, edge_values: &[f64]) -> Vec<f64> {
    (0..g.n())
        .into_par_iter()
        .map(|v| edge_values[g.out_edges(v)].iter().sum())
        .collect()
}

/// Messages `y^(t)` on directed edges, indexed as in [`Graph`]: entry `e`
/// with source `v` and target `v'` holds `y_{v,v'}`.
///
/// Each [`MessageState::step`] computes
/// `y^(t+1)_{v,v'} = sum_{v'' ~ v', v'' != v} z^(t)_{v',v''}` minus the
/// short-cycle corrections, where `z` is `y` with the mean removed when
/// `mean_subtract` is set and `y` itself otherwise.
///
/// All stored state is kept as `stored * 2^scale_exp`: whenever a value grows
/// past `2^600`, everything (messages, history and recorded columns) is
/// multiplied by the same power of two. Signs and linear combinations are
/// unaffected.
pub struct MessageState<'a> {
    g: &'a Graph,
    cycles: &'a ShortCycleIndex,
    mean_subtract: bool,
    t: usize,
    y: Vec<f64>,
    /// `z^(1)`, used by the correction at `t = r'`.
    z_first: Vec<f64>,
    /// `(z^(t'), vertex sums of z^(t'))` for `t' = t, t-1, ...`, newest first.
    history: VecDeque<(Vec<f64>, Vec<f64>)>,
    /// Columns `Y_{., t'} = sum_{v'} y^(t')_{v,v'}`, when recording.
    columns: Option<Vec<Vec<f64>>>,
    scale_exp: i32,
}

impl<'a> MessageState<'a> {
    /// Starts at `t = 1` with `y^(1) = init`.
    pub fn new(
        g: &'a Graph,
        cycles: &'a ShortCycleIndex,
        init: Vec<f64>,
        mean_subtract: bool,
        record_columns: bool,
    ) -> Result<Self> {
        if init.len() != g.num_directed() {
            return Err(Error::LengthMismatch {
                expected: g.num_directed(),
                actual: init.len(),
            });
        }
        if cycles.records_len() != g.num_directed() {
            return Err(Error::InvalidGraph(
                "cycle index was built for a different graph".into(),
            ));
        }
        if init.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { iteration: 1 });
        }
        let columns = record_columns.then(|| vec![vertex_sums(g, &init)]);
        let mut state = Self {
            g,
            cycles,
            mean_subtract,
            t: 1,
            y: init,
            z_first: Vec::new(),
            history: VecDeque::new(),
            columns,
            scale_exp: 0,
        };
        state.z_first = state.centered_messages();
        Ok(state)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Current `y^(t)` in stored scale.
    pub fn messages(&self) -> &[f64] {
        &self.y
    }

    /// `log2` of the factor stored values must be multiplied by.
    pub fn scale_exp(&self) -> i32 {
        self.scale_exp
    }

    /// `z^(t)`: the current messages, mean-centered when enabled.
    pub fn centered_messages(&self) -> Vec<f64> {
        if self.mean_subtract {
            mean_centered(&self.y)
        } else {
            self.y.clone()
        }
    }

    /// `y'_v = sum_{v'} y^(t)_{v,v'}` in stored scale.
    pub fn vertex_scores(&self) -> Vec<f64> {
        vertex_sums(self.g, &self.y)
    }

    /// Recorded columns `Y_{., 1..=t}` (stored scale), if recording was enabled.
    pub fn columns(&self) -> Option<&[Vec<f64>]> {
        self.columns.as_deref()
    }

    pub fn into_columns(self) -> Option<Vec<Vec<f64>>> {
        self.columns
    }

    /// Advances from `y^(t)` to `y^(t+1)`.
    pub fn step(&mut self) -> Result<()> {
        let g = self.g;
        let z = if self.t == 1 {
            self.z_first.clone()
        } else {
            self.centered_messages()
        };
        let sums = vertex_sums(g, &z);
        self.history.push_front((z, sums));
        self.history.truncate(self.cycles.r().max(1));
        let next_t = self.t + 1;
        let (z, sums) = &self.history[0];
        let history = &self.history;
        let z_first = &self.z_first;
        let cycles = self.cycles;
        let next: Vec<f64> = (0..g.num_directed())
            .into_par_iter()
            .map(|e| {
                let vp = g.target(e);
                let mut val = sums[vp] - z[g.reverse(e)];
                let records = cycles.records(e);
                if records.is_empty() {
                    return val;
                }
                let v = g.source(e);
                for rec in records {
                    let count = rec.count as f64;
                    let len = rec.len;
                    if next_t == len {
                        let back = g
                            .directed_index(rec.other, v as u32)
                            .expect("cycle edge exists");
                        val -= count * z_first[back];
                    } else if next_t > len {
                        let (zr, sr) = &history[len - 1];
                        let to_other = g
                            .directed_index(v as u32, rec.other)
                            .expect("cycle edge exists");
                        val -= count * (sr[v] - zr[e] - zr[to_other]);
                    }
                }
                val
            })
            .collect();
        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { iteration: next_t });
        }
        self.y = next;
        self.t = next_t;
        if let Some(cols) = self.columns.as_mut() {
            cols.push(vertex_sums(g, &self.y));
        }
        self.rescale_if_needed();
        Ok(())
    }

    fn rescale_if_needed(&mut self) {
        let max = self.y.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if max < 2f64.powi(RESCALE_BITS) {
            return;
        }
        let factor = 2f64.powi(-RESCALE_BITS);
        let scale = |v: &mut Vec<f64>| v.iter_mut().for_each(|x| *x *= factor);
        scale(&mut self.y);
        scale(&mut self.z_first);
        for (z, s) in self.history.iter_mut() {
            scale(z);
            scale(s);
        }
        if let Some(cols) = self.columns.as_mut() {
            cols.iter_mut().for_each(scale);
        }
        self.scale_exp += RESCALE_BITS;
    }

    /// Steps until `t = m`.
    pub fn run_to(&mut self, m: usize) -> Result<()> {
        while self.t < m {
            self.step()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abp::cycles::find_short_cycles;
    use crate::rng::SbmRng;

    #[test]
    fn pairwise_sum_matches_naive() {
        let mut rng = SbmRng::new(3);
        let v = rng.gaussian_vec(10_000);
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-9);
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v));
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn path_two_steps() {
        // u - v - w with ids 0 - 1 - 2. Directed edges: (0,1) (1,0) (1,2) (2,1).
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let cycles = find_short_cycles(&g, 2);
        let init = vec![1.0, -1.0, 1.0, -1.0];
        let mut st = MessageState::new(&g, &cycles, init.clone(), true, false).unwrap();
        st.step().unwrap();
        let z = mean_centered(&init);
        // y^(2)_{v,u} = sum over v'' ~ u, v'' != v: nothing (u is a leaf).
        assert_eq!(st.messages()[g.directed_index(1, 0).unwrap()], 0.0);
        // y^(2)_{u,v} = z_{v,w}: the centered message from v toward w.
        let uv = g.directed_index(0, 1).unwrap();
        assert_eq!(st.messages()[uv], z[g.directed_index(1, 2).unwrap()]);
    }

    #[test]
    fn rescaling_keeps_direction() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
        let cycles = find_short_cycles(&g, 2);
        let init: Vec<f64> = (0..g.num_directed()).map(|i| 1e300 * (i as f64 - 4.5)).collect();
        let mut st = MessageState::new(&g, &cycles, init, false, true).unwrap();
        st.run_to(6).unwrap();
        assert!(st.scale_exp() > 0);
        assert!(st.messages().iter().all(|x| x.is_finite()));
        assert_eq!(st.columns().unwrap().len(), 6);
    }

    #[test]
    fn mismatched_init_rejected() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let cycles = find_short_cycles(&g, 2);
        assert!(MessageState::new(&g, &cycles, vec![0.0; 3], true, false).is_err());
        assert!(matches!(
            MessageState::new(&g, &cycles, vec![f64::NAN, 0.0], true, false),
            Err(Error::NonFinite { iteration: 1 })
        ));
    }
}
