//! Estimate (a, b, k) from short nonbacktracking closed-walk counts.
use sbmlab::learner::estimate_params;
use sbmlab::SymmetricSbm;

fn main() -> sbmlab::Result<()> {
    let model = SymmetricSbm::new(50_000, 2, 9.0, 1.0)?;
    let (_, g) = model.sample(4)?;
    let est = estimate_params(&g, 8, 4)?;
    println!("true a={} b={} k={}", model.a, model.b, model.k);
    println!(
        "estimate a={:.2} b={:.2} k={} mu={:.3} no_signal={}",
        est.a, est.b, est.k, est.mu, est.no_signal
    );
    for fit in &est.fits {
        println!("  k={} mu={:.3} residual {:.2}", fit.k, fit.mu, fit.residual);
    }
    println!("  null residual {:.2}", est.null_residual);
    Ok(())
}
