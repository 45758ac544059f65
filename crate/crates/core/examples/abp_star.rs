//! Simplified acyclic belief propagation on two communities.
use sbmlab::abp::{abp_star, default_m, AbpConfig};
use sbmlab::metrics::{agreement, detection_margin};
use sbmlab::SymmetricSbm;

fn main() -> sbmlab::Result<()> {
    let model = SymmetricSbm::new(20_000, 2, 5.0, 1.0)?;
    let snr = model.snr()?;
    let m = default_m(model.n, snr);
    let (labels, g) = model.sample(11)?;
    for r in [2, 3] {
        let part = abp_star(&g, &AbpConfig::new(m, 11).with_r(r))?;
        println!(
            "snr {snr:.2} m={m} r={r}: agreement {:.3}, margin {:.3}",
            agreement(&labels, &part.as_labeling())?,
            detection_margin(&labels, &part)?
        );
    }
    Ok(())
}
