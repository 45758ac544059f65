//! Threshold quantities across a few parameter settings.
use sbmlab::typicality::{binomial_exponent, it_bound_report, ThresholdReport};

fn main() -> sbmlab::Result<()> {
    println!("{}", ThresholdReport::CSV_HEADER);
    for (k, a, b) in [(2, 5.0, 1.0), (4, 0.0, 11.95), (5, 20.0, 1.0), (2, 5.0, 0.0)] {
        println!("{}", it_bound_report(a, b, k)?.csv_row());
    }
    println!("binomial exponent (s=2, t=1): {:.6}", binomial_exponent(2.0, 1.0));
    Ok(())
}
