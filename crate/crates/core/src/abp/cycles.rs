//! Short simple cycles through directed edges.

use crate::graph::Graph;

/// One family of short cycles through a directed edge `(v, v')`: every cycle
/// of length `len` visiting `other, v, v'` consecutively, where `other` is the
/// cycle's second neighbor of `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    pub len: usize,
    pub other: u32,
    /// Number of distinct such cycles.
    pub count: u32,
}

/// Per directed edge, the simple cycles of length at most `r` through it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortCycleIndex {
    r: usize,
    offsets: Vec<usize>,
    records: Vec<CycleRecord>,
    multi_cycle: bool,
}

impl ShortCycleIndex {
    pub fn empty(g: &Graph, r: usize) -> Self {
        Self {
            r,
            offsets: vec![0; g.num_directed() + 1],
            records: Vec::new(),
            multi_cycle: false,
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Records for directed edge `e`, sorted by `(len, other)`.
    pub fn records(&self, e: usize) -> &[CycleRecord] {
        &self.records[self.offsets[e]..self.offsets[e + 1]]
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of directed edges the index covers.
    pub fn records_len(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of directed edges carrying at least one record.
    pub fn edges_on_cycles(&self) -> usize {
        self.offsets.windows(2).filter(|w| w[1] > w[0]).count()
    }

    /// True if some directed edge lies on more than one short cycle.
    pub fn multi_cycle(&self) -> bool {
        self.multi_cycle
    }
}

/// Finds, for every directed edge, the simple cycles of length `3..=r` through it.
///
/// For `r <= 2` the index is empty: nonbacktracking walks already exclude
/// the only cycles of length 2.
pub fn find_short_cycles(g: &Graph, r: usize) -> ShortCycleIndex {
    if r < 3 {
        return ShortCycleIndex::empty(g, r);
    }
    let mut offsets = Vec::with_capacity(g.num_directed() + 1);
    offsets.push(0);
    let mut records = Vec::new();
    let mut multi_cycle = false;
    let mut found: Vec<(usize, u32)> = Vec::new();
    let mut path = Vec::with_capacity(r);
    for e in 0..g.num_directed() {
        let (v, vp) = (g.source(e) as u32, g.target(e) as u32);
        found.clear();
        // Simple paths v' -> ... -> v''' of at most r - 2 edges avoiding v,
        // closed by the edges (v''', v) and (v, v').
        path.clear();
        path.push(vp);
        extend_paths(g, r, v, &mut path, &mut found);
        if found.len() > 1 {
            multi_cycle = true;
        }
        found.sort_unstable();
        let start = records.len();
        for &(len, other) in &found {
            match records[start..].last_mut() {
                Some(CycleRecord { len: l, other: o, count }) if *l == len && *o == other => {
                    *count += 1
                }
                _ => records.push(CycleRecord {
                    len,
                    other,
                    count: 1,
                }),
            }
        }
        offsets.push(records.len());
    }
    ShortCycleIndex {
        r,
        offsets,
        records,
        multi_cycle,
    }
}

fn extend_paths(g: &Graph, r: usize, v: u32, path: &mut Vec<u32>, found: &mut Vec<(usize, u32)>) {
    let last = *path.last().unwrap();
    // Cycle length is the path's vertex count plus v.
    if path.len() >= 2 && g.has_edge(last as usize, v as usize) {
        found.push((path.len() + 1, last));
    }
    if path.len() + 1 >= r {
        return;
    }
    for &w in g.neighbors(last as usize) {
        if w == v || path.contains(&w) {
            continue;
        }
        path.push(w);
        extend_paths(g, r, v, path, found);
        path.pop();
    }
}
