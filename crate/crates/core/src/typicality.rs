//! Typical-set detection and closed-form threshold quantities.
//!
//! A labeling `x` is typical for `G` when it is balanced and its intra- and
//! inter-community edge counts are within a factor `1 -/+ delta` of their
//! expectations under `SBM(n, k, a, b)`. The sampler draws uniformly from the
//! typical set, which is only feasible by exhaustive enumeration at tiny `n`.
//!
//! Logarithms are natural and `0 ln 0 = 0` throughout.

use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::rng::{derive_seed, stream, SbmRng};

/// Largest `k^n` that [`enumerate_typical`] will walk.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

/// `x ln x` with `0 ln 0 = 0`.
pub fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn mean_degree(a: f64, b: f64, k: usize) -> f64 {
    (a + (k as f64 - 1.0) * b) / k as f64
}

fn check_rates(a: f64, b: f64, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::ParameterOutOfRange(format!("k = {k} < 2")));
    }
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("rates a = {a}, b = {b} must be nonnegative")));
    }
    Ok(())
}

/// Default bisection tolerance for [`tau`].
pub const TAU_TOL: f64 = 1e-12;

/// The root in `(0, 1)` of `tau e^{-tau} = d e^{-d}`, by bisection.
pub fn tau(d: f64, tol: f64) -> Result<f64> {
    if !(d > 1.0) || !d.is_finite() {
        return Err(Error::Domain(format!("tau needs d > 1, got {d}")));
    }
    let target = d * (-d).exp();
    let g = |t: f64| t * (-t).exp() - target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut mid = 0.5;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let r = g(mid);
        if r.abs() < tol || hi - lo < f64::EPSILON {
            break;
        }
        // t e^{-t} is increasing on (0, 1).
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// `sum_{j=1}^{terms} j^{j-1}/j! (d e^{-d})^j`.
pub fn tau_series(d: f64, terms: usize) -> f64 {
    let ln_x = d.ln() - d;
    let mut ln_fact = 0.0;
    let mut total = 0.0;
    for j in 1..=terms {
        let jf = j as f64;
        ln_fact += jf.ln();
        total += ((jf - 1.0) * jf.ln() - ln_fact + jf * ln_x).exp();
    }
    total
}

/// `f(tau, d) = (1 - tau) / (1 - tau / d)`.
pub fn f_tau(tau: f64, d: f64) -> f64 {
    (1.0 - tau) / (1.0 - tau / d)
}

/// How the balance window `|{u : x_u = i}|/n in [1/k - eps, 1/k + eps]` is sized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceTolerance {
    /// `eps = delta`.
    Delta,
    /// `eps = ln n / sqrt n`.
    LogOverSqrtN,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypicalityParams {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub balance: BalanceTolerance,
}

impl TypicalityParams {
    pub fn new(k: usize, a: f64, b: f64, delta: f64) -> Result<Self> {
        check_rates(a, b, k)?;
        if !(delta > 0.0) {
            return Err(Error::ParameterOutOfRange(format!("delta = {delta} must be positive")));
        }
        Ok(Self {
            k,
            a,
            b,
            delta,
            balance: BalanceTolerance::Delta,
        })
    }

    pub fn with_balance(mut self, balance: BalanceTolerance) -> Self {
        self.balance = balance;
        self
    }

    fn balance_eps(&self, n: usize) -> f64 {
        match self.balance {
            BalanceTolerance::Delta => self.delta,
            BalanceTolerance::LogOverSqrtN => {
                let n = n.max(2) as f64;
                n.ln() / n.sqrt()
            }
        }
    }

    /// `(a n / 2k, b n (k-1) / 2k)`: expected intra and inter edge counts.
    fn expected_counts(&self, n: usize) -> (f64, f64) {
        let (n, k) = (n as f64, self.k as f64);
        (self.a * n / (2.0 * k), self.b * n * (k - 1.0) / (2.0 * k))
    }
}

/// Intra- and inter-community edge counts of `g` under labeling `x`.
pub fn edge_counts(x: &[u32], g: &Graph) -> (usize, usize) {
    let intra = g.edges().filter(|&(u, v)| x[u as usize] == x[v as usize]).count();
    (intra, g.num_edges() - intra)
}

fn is_balanced(x: &[u32], k: usize, eps: f64, scratch: &mut [usize]) -> bool {
    scratch.iter_mut().for_each(|c| *c = 0);
    for &c in x {
        if c as usize >= k {
            return false;
        }
        scratch[c as usize] += 1;
    }
    let n = x.len() as f64;
    let lo = 1.0 / k as f64 - eps;
    let hi = 1.0 / k as f64 + eps;
    // Small slack so exact boundary cases are not lost to rounding.
    scratch.iter().all(|&c| {
        let f = c as f64 / n;
        f >= lo - 1e-12 && f <= hi + 1e-12
    })
}

fn typical_unchecked(x: &[u32], g: &Graph, p: &TypicalityParams, scratch: &mut [usize]) -> bool {
    if !is_balanced(x, p.k, p.balance_eps(x.len()), scratch) {
        return false;
    }
    let (intra, inter) = edge_counts(x, g);
    let (e_in, e_out) = p.expected_counts(x.len());
    let (intra, inter) = (intra as f64, inter as f64);
    let d = p.delta;
    if p.a >= p.b {
        intra >= e_in * (1.0 - d) - 1e-9 && inter <= e_out * (1.0 + d) + 1e-9
    } else {
        intra <= e_in * (1.0 + d) + 1e-9 && inter >= e_out * (1.0 - d) - 1e-9
    }
}

/// Whether `x` lies in the typical set `T_delta(G)`.
///
/// For `a >= b` this asks for at least `(a n/2k)(1 - delta)` intra-community
/// edges and at most `(b n (k-1)/2k)(1 + delta)` inter-community edges. For
/// `a < b` both inequalities flip: at most `(a n/2k)(1 + delta)` intra and at
/// least `(b n (k-1)/2k)(1 - delta)` inter.
pub fn is_typical(x: &Labeling, g: &Graph, p: &TypicalityParams) -> bool {
    if x.len() != g.n() {
        return false;
    }
    let mut scratch = vec![0usize; p.k];
    typical_unchecked(x.as_slice(), g, p, &mut scratch)
}

/// Lexicographic walk over `[k]^n` (vertex 0 most significant) yielding the
/// typical labelings.
pub struct TypicalIter<'a> {
    g: &'a Graph,
    p: TypicalityParams,
    current: Vec<u32>,
    done: bool,
    quotient: bool,
    scratch: Vec<usize>,
}

impl TypicalIter<'_> {
    fn advance(&mut self) {
        let k = self.p.k as u32;
        for i in (0..self.current.len()).rev() {
            if self.current[i] + 1 < k {
                self.current[i] += 1;
                return;
            }
            self.current[i] = 0;
        }
        self.done = true;
    }

    /// Canonical up to relabeling: each new label is the smallest unused one.
    fn is_canonical(&self) -> bool {
        let mut next = 0;
        for &c in &self.current {
            if c > next {
                return false;
            }
            if c == next {
                next += 1;
            }
        }
        true
    }
}

impl Iterator for TypicalIter<'_> {
    type Item = Labeling;

    fn next(&mut self) -> Option<Labeling> {
        while !self.done {
            let hit = (!self.quotient || self.is_canonical())
                && typical_unchecked(&self.current, self.g, &self.p, &mut self.scratch);
            let found = hit.then(|| self.current.clone());
            self.advance();
            if let Some(x) = found {
                return Some(Labeling::new(x, self.p.k).expect("labels below k"));
            }
        }
        None
    }
}

/// Streams `T_delta(G)` in lexicographic order.
///
/// With `quotient`, only one representative per global relabeling is kept
/// (the one whose labels first appear in increasing order).
pub fn enumerate_typical<'a>(g: &'a Graph, p: &TypicalityParams, quotient: bool) -> Result<TypicalIter<'a>> {
    let n = g.n();
    let size = (p.k as f64).powi(n as i32);
    if size > ENUMERATION_LIMIT as f64 {
        return Err(Error::SizeGuard(format!(
            "k^n = {}^{n} exceeds the enumeration limit {ENUMERATION_LIMIT}",
            p.k
        )));
    }
    Ok(TypicalIter {
        g,
        p: *p,
        current: vec![0; n],
        done: false,
        quotient,
        scratch: vec![0; p.k],
    })
}

pub fn count_typical(g: &Graph, p: &TypicalityParams, quotient: bool) -> Result<usize> {
    Ok(enumerate_typical(g, p, quotient)?.count())
}

/// A uniform draw from `T_delta(G)`.
pub fn sample_typical(g: &Graph, p: &TypicalityParams, seed: u64) -> Result<Labeling> {
    let mut all: Vec<Labeling> = enumerate_typical(g, p, false)?.collect();
    if all.is_empty() {
        return Err(Error::EmptyTypicalSet);
    }
    let mut rng = SbmRng::new(derive_seed(seed, stream::ALGORITHM, 2));
    let i = rng.below(all.len() as u64) as usize;
    Ok(all.swap_remove(i))
}

/// `A(0,0) = (a + (k-1)b)/2 ln(k/(a + (k-1)b)) + (a/2) ln a + (b(k-1)/2) ln b`.
pub fn bad_atypicality_exponent(a: f64, b: f64, k: usize) -> f64 {
    let kf = k as f64;
    let s = a + (kf - 1.0) * b;
    let first = if s == 0.0 { 0.0 } else { s / 2.0 * (kf / s).ln() };
    first + xlnx(a) / 2.0 + (kf - 1.0) * xlnx(b) / 2.0
}

/// `(a ln a + (k-1) b ln b)/k - d ln d`.
pub fn entropy_gap(a: f64, b: f64, k: usize) -> f64 {
    let kf = k as f64;
    (xlnx(a) + (kf - 1.0) * xlnx(b)) / kf - xlnx(mean_degree(a, b, k))
}

/// `entropy_gap / (2 ln k)`.
pub fn union_bound_lhs(a: f64, b: f64, k: usize) -> f64 {
    entropy_gap(a, b, k) / (2.0 * (k as f64).ln())
}

/// Detection by union bound: `union_bound_lhs > 1`.
pub fn union_bound_holds(a: f64, b: f64, k: usize) -> bool {
    union_bound_lhs(a, b, k) > 1.0
}

/// `e^{-a/k} (1 - (1 - e^{-b/k})^{k-1})`.
pub fn giant_bound_exponent(a: f64, b: f64, k: usize) -> f64 {
    let kf = k as f64;
    (-a / kf).exp() * (1.0 - (1.0 - (-b / kf).exp()).powi(k as i32 - 1))
}

/// The size exponent `psi` of the typical set.
pub fn psi(a: f64, b: f64, k: usize) -> Result<f64> {
    check_rates(a, b, k)?;
    let d = mean_degree(a, b, k);
    let t = tau(d, TAU_TOL)?;
    let kf = k as f64;
    let s = a + (kf - 1.0) * b;
    // sum_i nu_i ln(1/nu_i) with nu = (a/s, (k-1)b/s).
    let entropy = -xlnx(a / s) - xlnx((kf - 1.0) * b / s) + (kf - 1.0) * b / s * (kf - 1.0).ln();
    Ok(t / d * (1.0 - t / 2.0)
        + entropy / kf.ln() * (t * t / (2.0 * d) + (d - t) * (-(d - t)).exp()))
}

/// Every quantity of the threshold calculator for one `(k, a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub tau: f64,
    pub snr: f64,
    pub ks_holds: bool,
    pub union_bound_lhs: f64,
    pub union_bound_holds: bool,
    /// Left side of the typical-set condition, `entropy_gap`.
    pub it_lhs: f64,
    /// Right side: the min of the two branches below.
    pub it_rhs: f64,
    pub it_rhs_tree: f64,
    pub it_rhs_giant: f64,
    pub it_bound_holds: bool,
    pub f: f64,
    pub psi: f64,
    pub giant_exponent: f64,
    pub a0: f64,
}

impl ThresholdReport {
    pub const CSV_HEADER: &'static str = "k,a,b,d,tau,snr,ks_holds,union_bound_lhs,union_bound_holds,it_lhs,it_rhs,it_bound_holds,f,psi,giant_exponent,A0";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.k,
            self.a,
            self.b,
            self.d,
            self.tau,
            self.snr,
            self.ks_holds,
            self.union_bound_lhs,
            self.union_bound_holds,
            self.it_lhs,
            self.it_rhs,
            self.it_bound_holds,
            self.f,
            self.psi,
            self.giant_exponent,
            self.a0
        )
    }
}

/// The typical-set condition: `entropy_gap` exceeds
/// `min(f(tau, d) 2 ln k, 2 ln k - 2 ln 2 * giant_bound_exponent)`.
pub fn it_bound_report(a: f64, b: f64, k: usize) -> Result<ThresholdReport> {
    check_rates(a, b, k)?;
    let d = mean_degree(a, b, k);
    let t = tau(d, TAU_TOL)?;
    let kf = k as f64;
    let ln_k = kf.ln();
    let f = f_tau(t, d);
    let giant = giant_bound_exponent(a, b, k);
    let it_lhs = entropy_gap(a, b, k);
    let it_rhs_tree = f * 2.0 * ln_k;
    let it_rhs_giant = 2.0 * ln_k - 2.0 * std::f64::consts::LN_2 * giant;
    let it_rhs = it_rhs_tree.min(it_rhs_giant);
    let lambda2 = (a - b) / kf;
    Ok(ThresholdReport {
        k,
        a,
        b,
        d,
        tau: t,
        snr: lambda2 * lambda2 / d,
        ks_holds: lambda2 * lambda2 / d > 1.0,
        union_bound_lhs: union_bound_lhs(a, b, k),
        union_bound_holds: union_bound_holds(a, b, k),
        it_lhs,
        it_rhs,
        it_rhs_tree,
        it_rhs_giant,
        it_bound_holds: it_lhs > it_rhs,
        f,
        psi: psi(a, b, k)?,
        giant_exponent: giant,
        a0: bad_atypicality_exponent(a, b, k),
    })
}

pub fn it_bound_holds(a: f64, b: f64, k: usize) -> Result<bool> {
    Ok(it_bound_report(a, b, k)?.it_bound_holds)
}

/// Right side of the `a = 0` condition
/// `b > 2k ln k / ((k-1) ln(k/(k-1))) * f(tau, b(k-1)/k)`.
pub fn a0_threshold_rhs(b: f64, k: usize) -> Result<f64> {
    let kf = k as f64;
    let d = b * (kf - 1.0) / kf;
    let t = tau(d, TAU_TOL)?;
    Ok(2.0 * kf * kf.ln() / ((kf - 1.0) * (kf / (kf - 1.0)).ln()) * f_tau(t, d))
}

/// `s - t + t ln(t/s)`.
pub fn binomial_exponent(s: f64, t: f64) -> f64 {
    s - t + xlnx(t) - t * s.ln()
}

/// `ln P{Bin(trials, p) = j}`, from sums of logarithms.
pub fn binomial_ln_pmf(trials: u64, p: f64, j: u64) -> f64 {
    if j > trials {
        return f64::NEG_INFINITY;
    }
    let ln_choose: f64 = (1..=j).map(|i| ((trials - j + i) as f64).ln() - (i as f64).ln()).sum();
    let success = if j == 0 { 0.0 } else { j as f64 * p.ln() };
    let failure = if trials == j { 0.0 } else { (trials - j) as f64 * (-p).ln_1p() };
    ln_choose + success + failure
}
