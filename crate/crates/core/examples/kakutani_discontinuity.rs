//! Nilpotent cutoffs converge to the Kakutani shift while the radius jumps by 1/2.

use maxspec::continuity::kakutani_experiment;

fn main() -> maxspec::Result<()> {
    let rep = kakutani_experiment(10)?;
    println!("{:>3} {:>7} {:>10} {:>12} {:>12}", "m", "window", "nilpotent", "||A-A_m||", "2^-m");
    for r in &rep.rows {
        println!("{:>3} {:>7} {:>10} {:>12.6e} {:>12.6e}", r.m, r.window, r.power_vanishes && r.index_exact, r.distance, r.distance_claimed);
    }
    println!("||A^{}||^(1/{}) on N = {}: {:.6} (closed form {:.6})", rep.gelfand_k, rep.gelfand_k, rep.gelfand_window, rep.gelfand_value, rep.closed_form);
    println!("gap r(A) - lim r(A_m) ~ {:.6}", rep.gap);
    Ok(())
}
