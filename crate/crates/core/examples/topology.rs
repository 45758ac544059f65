//! Isolated trees, giant component and planted trees against their
//! asymptotic per-vertex predictions.
use sbmlab::topology::{component_stats, predicted_fractions, tau_j};
use sbmlab::SymmetricSbm;

fn main() -> sbmlab::Result<()> {
    let (a, b, k) = (3.0, 3.0, 2);
    let model = SymmetricSbm::new(100_000, k, a, b)?;
    let (_, g) = model.sample(9)?;
    let stats = component_stats(&g, 4);
    let pred = predicted_fractions(a, b, k)?;
    let n = stats.n as f64;
    println!("tau {:.6}", pred.tau);
    println!("trees/n        {:.5}  predicted {:.5}", stats.trees as f64 / n, pred.trees);
    println!("tree edges/n   {:.5}  predicted {:.5}", stats.tree_edges as f64 / n, pred.tree_edges);
    println!("giant/n        {:.5}  predicted {:.5}", stats.giant_size as f64 / n, pred.giant);
    println!("planted/n      {:.5}  predicted {:.5}", stats.planted_edges as f64 / n, pred.planted_edges);
    let d = model.d();
    for (j, c) in stats.tree_counts.iter().enumerate() {
        let j = j + 1;
        println!("{j}-vertex trees/n {:.5}  predicted {:.5}", *c as f64 / n, tau_j(d, j) / d);
    }
    Ok(())
}
