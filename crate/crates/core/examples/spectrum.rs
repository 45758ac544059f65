//! Sample a symmetric graph and print the `PQ` spectrum and SNR.
use sbmlab::sbm::{spectrum, DEFAULT_EIG_TOL};
use sbmlab::SymmetricSbm;

fn main() -> sbmlab::Result<()> {
    let model = SymmetricSbm::new(2000, 3, 8.0, 1.0)?;
    let spec = spectrum(&model.params(), DEFAULT_EIG_TOL)?;
    println!("eigenvalues {:?}", spec.all_eigs);
    println!("distinct {:?} multiplicity {:?} s={}", spec.distinct, spec.multiplicity, spec.s);
    println!("snr {:.4}", spec.snr);

    let (labels, g) = model.sample(7)?;
    println!(
        "n={} edges={} mean degree {:.3} (model {:.3}) community sizes {:?}",
        g.n(),
        g.num_edges(),
        g.mean_degree(),
        model.d(),
        labels.community_sizes()
    );
    Ok(())
}
