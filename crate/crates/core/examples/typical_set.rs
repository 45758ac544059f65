//! Exhaustive typical-set enumeration and uniform sampling at tiny n.
use sbmlab::metrics::agreement;
use sbmlab::typicality::{count_typical, is_typical, sample_typical, TypicalityParams};
use sbmlab::SymmetricSbm;

fn main() -> sbmlab::Result<()> {
    let model = SymmetricSbm::new(12, 2, 10.0, 4.0)?;
    let (labels, g) = model.sample(21)?;
    let params = TypicalityParams::new(2, 10.0, 4.0, 0.5)?;
    println!("planted labeling typical: {}", is_typical(&labels, &g, &params));
    println!(
        "|T| = {} labelings, {} up to relabeling",
        count_typical(&g, &params, false)?,
        count_typical(&g, &params, true)?
    );
    for seed in 0..3 {
        let x = sample_typical(&g, &params, seed)?;
        println!("draw {seed}: {:?} agreement {:.3}", x.as_slice(), agreement(&labels, &x)?);
    }
    Ok(())
}
