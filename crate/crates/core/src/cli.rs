//! The `sbmlab` command line.
//!
//! Exit codes: 0 on success, 1 on a usage error (bad or missing flags, usage
//! on stderr), 2 on a runtime error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::abp::{abp_full_detailed, abp_star, default_m, default_m_prime, AbpConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::io;
use crate::learner::estimate_params;
use crate::metrics::{agreement, detection_margin, Partition};
use crate::nonbacktracking::{nb_walk_count, perron_root, power_iteration_detect};
use crate::sbm::SymmetricSbm;
use crate::sweep::{Algo, Fixed, SweepSpec};
use crate::topology::{component_stats, predicted_fractions};
use crate::typicality::{it_bound_report, sample_typical, BalanceTolerance, ThresholdReport, TypicalityParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "sbmlab", version, about = "Community detection in sparse stochastic block models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a graph from SBM(n, k, a, b).
    Generate(GenerateArgs),
    /// Run a detector and write a two-way partition.
    Detect(DetectArgs),
    /// Estimate (a, b, k) from closed nonbacktracking walk counts.
    Learn(LearnArgs),
    /// Tree and giant-component statistics.
    Stats(StatsArgs),
    /// Closed-form threshold quantities as one CSV row.
    Thresholds(ThresholdsArgs),
    /// Draw a uniform labeling from the typical set (tiny graphs only).
    SampleTypical(SampleTypicalArgs),
    /// Count r-nonbacktracking walks between two vertices.
    NbCount(NbCountArgs),
    /// Phase-transition sweep written as CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge-list output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Label output path.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    AbpStar,
    AbpFull,
    NbPower,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::AbpStar => Algo::AbpStar,
            AlgoArg::AbpFull => Algo::AbpFull,
            AlgoArg::NbPower => Algo::NbPower,
        }
    }
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Ground truth; enables the metric lines.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgoArg::AbpStar)]
    pub algo: AlgoArg,
    /// Propagation depth. Defaults from n and the SNR of --eigs, or 2 ln n + 4.
    #[arg(long)]
    pub m: Option<usize>,
    /// Power-iteration deflation steps for nb-power.
    #[arg(long)]
    pub m_prime: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Override the edge-split probability of abp-full.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Distinct eigenvalues of PQ, largest magnitude first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eigs: Vec<f64>,
    /// Vertex count, when isolated trailing vertices are absent from the edge list.
    #[arg(long)]
    pub n: Option<usize>,
    /// Partition output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LearnArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub mmax: usize,
    #[arg(long, default_value_t = 4)]
    pub kmax: usize,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, requires_all = ["b", "k"])]
    pub a: Option<f64>,
    #[arg(long, requires_all = ["a", "k"])]
    pub b: Option<f64>,
    #[arg(long, requires_all = ["a", "b"])]
    pub k: Option<usize>,
    /// Largest isolated-tree size to tabulate.
    #[arg(long, default_value_t = 5)]
    pub jmax: usize,
}

#[derive(Args, Debug)]
pub struct ThresholdsArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
}

#[derive(Args, Debug)]
pub struct SampleTypicalArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rates; estimated from the labeled graph when absent.
    #[arg(long, requires = "b")]
    pub a: Option<f64>,
    #[arg(long, requires = "a")]
    pub b: Option<f64>,
    /// Use the ln n / sqrt n balance window instead of delta.
    #[arg(long)]
    pub balance_sqrt: bool,
}

#[derive(Args, Debug)]
pub struct NbCountArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub from: usize,
    #[arg(long)]
    pub to: usize,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    /// Fixed mean degree.
    #[arg(long, conflicts_with = "b", required_unless_present = "b")]
    pub d: Option<f64>,
    /// Fixed inter-community rate.
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub a_from: f64,
    #[arg(long)]
    pub a_to: f64,
    #[arg(long)]
    pub a_step: f64,
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    #[arg(long, value_enum, default_value_t = AlgoArg::AbpStar)]
    pub algo: AlgoArg,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "SBMLAB_JOBS")]
    pub jobs: Option<usize>,
    /// Fill runtime_ms with wall-clock times (output is then not byte-stable).
    #[arg(long)]
    pub timing: bool,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(Error::io(Path::new("<stdout>"), e))
    }
}

type CliResult = std::result::Result<(), Failure>;

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Generate(a) => generate(a, out),
        Command::Detect(a) => detect(a, out, err),
        Command::Learn(a) => learn(a, out, err),
        Command::Stats(a) => stats(a, out, err),
        Command::Thresholds(a) => thresholds(a, out),
        Command::SampleTypical(a) => sample_typical_cmd(a, out),
        Command::NbCount(a) => nb_count(a, out),
        Command::Sweep(a) => sweep(a, out),
    }
}

fn generate(args: GenerateArgs, out: &mut dyn Write) -> CliResult {
    let model = SymmetricSbm::new(args.n, args.k, args.a, args.b)?;
    let (labels, g) = model.sample(args.seed)?;
    io::write_edge_list(&args.out, &g)?;
    if let Some(path) = &args.labels {
        io::write_labels(path, &labels)?;
    }
    writeln!(out, "n={} edges={} mean_degree={:.6}", g.n(), g.num_edges(), g.mean_degree())?;
    Ok(())
}

/// Reads the graph, sized by `--n`, else by the label file, else by the largest id.
fn load_graph(path: &Path, n: Option<usize>, labels: Option<&Labeling>) -> Result<Graph> {
    io::read_edge_list(path, n.or(labels.map(Labeling::len)))
}

/// Power steps behind the default nb-power shift.
const PERRON_ITERS: usize = 100;

fn detect(args: DetectArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let labels = args.labels.as_deref().map(io::read_labels).transpose()?;
    let g = load_graph(&args.graph, args.n, labels.as_ref())?;
    let n = g.n();
    let snr = match args.eigs.as_slice() {
        [l1, l2, ..] if *l1 != 0.0 => l2 * l2 / l1,
        _ => 0.0,
    };
    let m = args.m.unwrap_or_else(|| default_m(n, snr));
    let mut cfg = AbpConfig::new(m, args.seed).with_r(args.r).with_c(args.c);
    if let Some(gamma) = args.gamma {
        cfg = cfg.with_gamma(gamma);
    }
    let part: Partition = match args.algo {
        AlgoArg::AbpStar => abp_star(&g, &cfg)?,
        AlgoArg::AbpFull => {
            if args.eigs.len() < 2 {
                return Err(Failure::Usage("--algo abp-full needs --eigs with at least two values".into()));
            }
            let run = abp_full_detailed(&g, &cfg, &args.eigs)?;
            for w in &run.plan.warnings {
                writeln!(err, "warning: {w}")?;
            }
            run.partition
        }
        AlgoArg::NbPower => {
            let lambda1 = match args.eigs.first() {
                Some(&l1) => l1,
                None => perron_root(&g, args.r, PERRON_ITERS, args.seed)?,
            };
            let m_prime = match (args.m_prime, args.eigs.get(1)) {
                (Some(mp), _) => mp,
                (None, Some(&l2)) => default_m_prime(m, n, lambda1, l2),
                (None, None) => 3.min(m.saturating_sub(1)),
            };
            power_iteration_detect(&g, args.r, m, m_prime, lambda1, args.seed)?
        }
    };
    let text = io::format_partition(&part);
    match &args.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| Error::io(path, e))?,
        None => out.write_all(text.as_bytes())?,
    }
    if let Some(labels) = &labels {
        // Metrics go to stdout with a file output, to stderr otherwise so the
        // partition stream stays clean.
        let sink: &mut dyn Write = if args.out.is_some() { out } else { err };
        writeln!(sink, "agreement={:.6}", agreement(labels, &part.as_labeling())?)?;
        writeln!(sink, "detection_margin={:.6}", detection_margin(labels, &part)?)?;
    }
    Ok(())
}

fn learn(args: LearnArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let g = load_graph(&args.graph, args.n, None)?;
    let est = estimate_params(&g, args.mmax, args.kmax)?;
    for w in &est.warnings {
        writeln!(err, "warning: {w}")?;
    }
    writeln!(out, "# sbmlab learn v1")?;
    let mut header = "a_hat,b_hat,k_hat,d_hat,mu_hat,no_signal,null_residual".to_string();
    let mut row = format!(
        "{:.6},{:.6},{},{:.6},{:.6},{},{:.6}",
        est.a, est.b, est.k, est.d, est.mu, est.no_signal, est.null_residual
    );
    for fit in &est.fits {
        header.push_str(&format!(",residual_k{}", fit.k));
        row.push_str(&format!(",{:.6}", fit.residual));
    }
    writeln!(out, "{header}\n{row}")?;
    Ok(())
}

fn stats(args: StatsArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let g = load_graph(&args.graph, args.n, None)?;
    let s = component_stats(&g, args.jmax);
    for w in &s.warnings {
        writeln!(err, "warning: {w}")?;
    }
    let n = s.n.max(1) as f64;
    let predicted = match (args.a, args.b, args.k) {
        (Some(a), Some(b), Some(k)) => Some(predicted_fractions(a, b, k)?),
        _ => None,
    };
    writeln!(out, "# sbmlab stats v1")?;
    writeln!(out, "quantity,observed,per_vertex,predicted_per_vertex")?;
    let mut line = |name: &str, count: usize, pred: Option<f64>| {
        let pred = pred.map_or_else(|| "NA".to_string(), |p| format!("{p:.6}"));
        writeln!(out, "{name},{count},{:.6},{pred}", count as f64 / n)
    };
    line("trees", s.trees, predicted.map(|p| p.trees))?;
    line("tree_edges", s.tree_edges, predicted.map(|p| p.tree_edges))?;
    line("giant_size", s.giant_size, predicted.map(|p| p.giant))?;
    line("planted_edges", s.planted_edges, predicted.map(|p| p.planted_edges))?;
    line("components", s.components, None)?;
    for (j, &c) in s.tree_counts.iter().enumerate() {
        let pred = predicted.map(|_| {
            let (a, b, k) = (args.a.unwrap(), args.b.unwrap(), args.k.unwrap());
            let d = (a + (k as f64 - 1.0) * b) / k as f64;
            crate::topology::tau_j(d, j + 1) / d
        });
        line(&format!("trees_{}", j + 1), c, pred)?;
    }
    Ok(())
}

fn thresholds(args: ThresholdsArgs, out: &mut dyn Write) -> CliResult {
    let report = it_bound_report(args.a, args.b, args.k)?;
    writeln!(out, "# sbmlab thresholds v1")?;
    writeln!(out, "{}\n{}", ThresholdReport::CSV_HEADER, report.csv_row())?;
    Ok(())
}

/// Plug-in rates from a labeled graph: `a = 2k e_in / n`, `b = 2k e_out / (n (k - 1))`.
fn rates_from_labels(g: &Graph, labels: &Labeling) -> (f64, f64) {
    let (e_in, e_out) = crate::typicality::edge_counts(labels.as_slice(), g);
    let (n, k) = (g.n() as f64, labels.k() as f64);
    (2.0 * k * e_in as f64 / n, 2.0 * k * e_out as f64 / (n * (k - 1.0)))
}

fn sample_typical_cmd(args: SampleTypicalArgs, out: &mut dyn Write) -> CliResult {
    let labels = io::read_labels(&args.labels)?;
    let g = load_graph(&args.graph, None, Some(&labels))?;
    let k = labels.k();
    if k < 2 {
        return Err(Failure::Usage("labels must use at least two communities".into()));
    }
    let (a, b) = match (args.a, args.b) {
        (Some(a), Some(b)) => (a, b),
        _ => rates_from_labels(&g, &labels),
    };
    let mut params = TypicalityParams::new(k, a, b, args.delta)?;
    if args.balance_sqrt {
        params = params.with_balance(BalanceTolerance::LogOverSqrtN);
    }
    let x = sample_typical(&g, &params, args.seed)?;
    out.write_all(io::format_labels(x.as_slice()).as_bytes())?;
    writeln!(out, "# agreement={:.6}", agreement(&labels, &x)?)?;
    Ok(())
}

fn nb_count(args: NbCountArgs, out: &mut dyn Write) -> CliResult {
    let g = load_graph(&args.graph, args.n, None)?;
    if args.from >= g.n() || args.to >= g.n() {
        return Err(Failure::Usage(format!("vertex out of range for n = {}", g.n())));
    }
    if args.r == 0 {
        return Err(Failure::Usage("--r must be at least 1".into()));
    }
    writeln!(out, "{}", nb_walk_count(&g, args.r, args.m, args.from, args.to))?;
    Ok(())
}

fn sweep(args: SweepArgs, out: &mut dyn Write) -> CliResult {
    let fixed = match (args.d, args.b) {
        (Some(d), None) => Fixed::MeanDegree(d),
        (None, Some(b)) => Fixed::B(b),
        _ => return Err(Failure::Usage("give exactly one of --d and --b".into())),
    };
    let spec = SweepSpec {
        n: args.n,
        k: args.k,
        fixed,
        a_from: args.a_from,
        a_to: args.a_to,
        a_step: args.a_step,
        seeds: args.seeds,
        algo: args.algo.into(),
        m: args.m,
        r: args.r,
        base_seed: args.seed,
        jobs: args.jobs,
        timing: args.timing,
    };
    let csv = crate::sweep::run_sweep(&spec)?;
    match &args.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| Error::io(path, e))?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}
