//! A short deterministic sweep across the threshold at fixed mean degree.
use sbmlab::sweep::{run_sweep, Algo, Fixed, SweepSpec};

fn main() -> sbmlab::Result<()> {
    let spec = SweepSpec {
        n: 5000,
        k: 2,
        fixed: Fixed::MeanDegree(3.0),
        a_from: 4.0,
        a_to: 6.0,
        a_step: 0.5,
        seeds: 3,
        algo: Algo::AbpStar,
        m: None,
        r: 2,
        base_seed: 1,
        jobs: None,
        timing: false,
    };
    print!("{}", run_sweep(&spec)?);
    Ok(())
}
