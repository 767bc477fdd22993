//! r is not locally Hölder at the block matrix A, and not Lipschitz near 0.

use maxspec::continuity::{holder_experiment, lipschitz_counterexample};

fn main() -> maxspec::Result<()> {
    for alpha in [0.5, 1.0, 2.0] {
        let rep = holder_experiment(alpha, &[2, 4, 8, 16])?;
        for r in &rep.rows {
            println!(
                "alpha {alpha:<4} k {:<3} n_k {:<5} r(B_k) >= {:.8}  ratio {:>10.4}  k/2 = {}",
                r.k, r.n_k, r.block_mean, r.ratio, r.ratio_bound
            );
        }
    }
    let c = lipschitz_counterexample(0.5, 0.25, 12)?;
    for r in &c.rows {
        println!("n {:<3} r(C) = {:.6}  |r(B) - r(C)| / ||B - C|| = {:.4}", r.n, r.r_c, r.ratio);
    }
    Ok(())
}
