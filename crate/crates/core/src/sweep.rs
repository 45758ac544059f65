//! Phase-transition sweeps over the symmetric model, written as CSV.
//!
//! Every `(point, replicate)` run draws its seed from
//! `derive_seed(base_seed, point_index, replicate_index)`; the graph is
//! sampled from a further derived stream, and the detector consumes the run
//! seed. Rows are emitted in canonical order whatever the worker count.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::abp::{abp_full, abp_star, default_m, default_m_prime, AbpConfig};
use crate::error::{Error, Result};
use crate::metrics::{agreement, detection_margin, Partition};
use crate::nonbacktracking::power_iteration_detect;
use crate::rng::{derive_seed, stream};
use crate::sbm::SymmetricSbm;

pub const SCHEMA_LINE: &str = "# sbmlab sweep v1";
pub const HEADER: &str = "n,k,a,b,snr,algo,m,r,seed,agreement,detection_margin,runtime_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    AbpStar,
    AbpFull,
    NbPower,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::AbpStar => "abp-star",
            Algo::AbpFull => "abp-full",
            Algo::NbPower => "nb-power",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "abp-star" => Some(Algo::AbpStar),
            "abp-full" => Some(Algo::AbpFull),
            "nb-power" => Some(Algo::NbPower),
            _ => None,
        }
    }
}

/// What stays fixed while `a` varies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fixed {
    /// Mean degree `d`; `b = (k d - a)/(k - 1)`.
    MeanDegree(f64),
    /// Inter-community rate `b`.
    B(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub n: usize,
    pub k: usize,
    pub fixed: Fixed,
    pub a_from: f64,
    pub a_to: f64,
    pub a_step: f64,
    pub seeds: usize,
    pub algo: Algo,
    /// Propagation depth; `None` picks [`default_m`] per point.
    pub m: Option<usize>,
    pub r: usize,
    pub base_seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Record wall-clock time per run. Off by default so output is byte-stable.
    pub timing: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(Error::ParameterOutOfRange("seeds must be at least 1".into()));
        }
        if self.k < 2 {
            return Err(Error::ParameterOutOfRange(format!("k = {} < 2", self.k)));
        }
        if !(self.a_step > 0.0) || self.a_to < self.a_from {
            return Err(Error::ParameterOutOfRange(format!(
                "empty range {}..={} step {}",
                self.a_from, self.a_to, self.a_step
            )));
        }
        Ok(())
    }

    /// `(a, b)` for every point, `b` derived from the fixed quantity.
    pub fn points(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let count = ((self.a_to - self.a_from) / self.a_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let a = self.a_from + self.a_step * i as f64;
                let b = match self.fixed {
                    Fixed::MeanDegree(d) => (self.k as f64 * d - a) / (self.k as f64 - 1.0),
                    Fixed::B(b) => b,
                };
                if b < -1e-12 {
                    return Err(Error::ParameterOutOfRange(format!(
                        "a = {a} gives negative b = {b}"
                    )));
                }
                Ok((a, b.max(0.0)))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub a: f64,
    pub b: f64,
    pub snr: f64,
    pub m: usize,
    pub seed: u64,
    pub agreement: f64,
    pub detection_margin: f64,
    pub runtime_ms: Option<f64>,
}

/// Runs one detector on one sampled graph.
pub fn run_point(spec: &SweepSpec, a: f64, b: f64, seed: u64) -> Result<RunRecord> {
    let model = SymmetricSbm::new(spec.n, spec.k, a, b)?;
    let snr = model.snr()?;
    let m = spec.m.unwrap_or_else(|| default_m(spec.n, snr));
    let (labels, g) = model.sample(derive_seed(seed, stream::GRAPH, 0))?;
    let start = Instant::now();
    let part: Partition = match spec.algo {
        Algo::AbpStar => abp_star(&g, &AbpConfig::new(m, seed).with_r(spec.r))?,
        Algo::AbpFull => abp_full(
            &g,
            &AbpConfig::new(m, seed).with_r(spec.r),
            &[model.lambda1(), model.lambda2()],
        )?,
        Algo::NbPower => {
            let mp = default_m_prime(m, spec.n, model.lambda1(), model.lambda2());
            power_iteration_detect(&g, spec.r, m, mp, model.lambda1(), seed)?
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(RunRecord {
        a,
        b,
        snr,
        m,
        seed,
        agreement: agreement(&labels, &part.as_labeling())?,
        detection_margin: detection_margin(&labels, &part)?,
        runtime_ms: spec.timing.then_some(elapsed),
    })
}

/// All runs, grouped by point in sweep order.
pub fn run_records(spec: &SweepSpec) -> Result<Vec<Vec<RunRecord>>> {
    let points = spec.points()?;
    let work = || -> Result<Vec<Vec<RunRecord>>> {
        points
            .par_iter()
            .enumerate()
            .map(|(pi, &(a, b))| {
                (0..spec.seeds)
                    .into_par_iter()
                    .map(|rep| run_point(spec, a, b, derive_seed(spec.base_seed, pi as u64, rep as u64)))
                    .collect()
            })
            .collect()
    };
    match spec.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::ParameterOutOfRange(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

fn fmt_runtime(ms: Option<f64>) -> String {
    ms.map_or_else(|| "NA".to_string(), |t| format!("{t:.3}"))
}

/// The sweep as CSV text: schema line, header, then per point one row per
/// replicate and a summary row whose `seed` column is `mean`.
pub fn run_sweep(spec: &SweepSpec) -> Result<String> {
    let groups = run_records(spec)?;
    let mut out = String::new();
    writeln!(out, "{SCHEMA_LINE}").unwrap();
    writeln!(out, "{HEADER}").unwrap();
    let algo = spec.algo.name();
    let (n, k, r) = (spec.n, spec.k, spec.r);
    for runs in &groups {
        for rec in runs {
            writeln!(
                out,
                "{n},{k},{:.6},{:.6},{:.6},{algo},{},{r},{},{:.6},{:.6},{}",
                rec.a,
                rec.b,
                rec.snr,
                rec.m,
                rec.seed,
                rec.agreement,
                rec.detection_margin,
                fmt_runtime(rec.runtime_ms)
            )
            .unwrap();
        }
        let count = runs.len() as f64;
        let first = &runs[0];
        let mean = |f: fn(&RunRecord) -> f64| runs.iter().map(f).sum::<f64>() / count;
        let runtime = spec
            .timing
            .then(|| runs.iter().filter_map(|r| r.runtime_ms).sum::<f64>() / count);
        writeln!(
            out,
            "{n},{k},{:.6},{:.6},{:.6},{algo},{},{r},mean,{:.6},{:.6},{}",
            first.a,
            first.b,
            first.snr,
            first.m,
            mean(|r| r.agreement),
            mean(|r| r.detection_margin),
            fmt_runtime(runtime)
        )
        .unwrap();
    }
    Ok(out)
}

pub fn write_sweep(spec: &SweepSpec, path: &Path) -> Result<()> {
    let csv = run_sweep(spec)?;
    std::fs::write(path, csv).map_err(|e| Error::io(path, e))
}
