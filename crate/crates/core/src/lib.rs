//! Community detection in sparse stochastic block models.
//!
//! The crate covers the full pipeline used to study the detection phase
//! transition in `SBM(n, p, Q/n)`:
//!
//! * [`sbm`]: model parameters, graph sampling, the `PQ` spectrum and SNR.
//! * [`abp`]: acyclic belief propagation (the simplified symmetric variant,
//!   the retroactive-compensation variant and the general version with the
//!   edge split, eigenvalue compensation and randomized assignment).
//! * [`nonbacktracking`]: generalized `r`-nonbacktracking walks, the `W^(r)`
//!   operator with an implicit matvec, power-iteration detection and the
//!   `Sigma^(t)` walk-count recursion.
//! * [`typicality`]: typical-set membership, exhaustive typical-set sampling
//!   at tiny `n`, and closed-form threshold quantities.
//! * [`topology`]: isolated trees, the giant component and planted trees.
//! * [`learner`]: estimation of `(a, b, k)` from short-cycle statistics.
//! * [`metrics`]: detection margin, permutation-maximized agreement.
//! * [`sweep`]: deterministic phase-transition sweeps written as CSV.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory; the `sbmlab` binary exposes the same operations as subcommands.

pub mod abp;
pub mod cli;
pub mod error;
pub mod graph;
pub mod io;
pub mod learner;
pub mod metrics;
pub mod nonbacktracking;
pub mod rng;
pub mod sbm;
pub mod sweep;
pub mod topology;
pub mod typicality;

pub use error::{Error, Result};
pub use graph::{Graph, Labeling};
pub use metrics::Partition;
pub use sbm::{SbmParams, Spectrum, SymmetricSbm};
