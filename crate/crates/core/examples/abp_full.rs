//! The general ABP variant: edge split, eigenvalue compensation and
//! randomized assignment. The plan shows the derived depth and exponents.
use sbmlab::abp::{abp_full_detailed, abp_star, AbpConfig};
use sbmlab::metrics::detection_margin;
use sbmlab::SymmetricSbm;

fn main() -> sbmlab::Result<()> {
    let model = SymmetricSbm::new(20_000, 3, 8.0, 1.0)?;
    let (labels, g) = model.sample(5)?;
    let cfg = AbpConfig::new(30, 5);
    let run = abp_full_detailed(&g, &cfg, &[model.lambda1(), model.lambda2()])?;
    println!(
        "s={} gamma={:.3} l={:.3} lambdas {:?} exponents {:?} depth {} gamma edges {}",
        run.plan.s, run.plan.gamma, run.plan.l, run.plan.lambdas, run.plan.exponents,
        run.plan.depth, run.gamma_edges
    );
    for w in &run.plan.warnings {
        println!("warning: {w}");
    }
    println!("full margin {:.3}", detection_margin(&labels, &run.partition)?);
    let star = abp_star(&g, &cfg)?;
    println!("star margin {:.3}", detection_margin(&labels, &star)?);
    Ok(())
}
