//! Lipschitz power bound, the weaker Hölder bound for mu, and semicontinuity
//! along convergent sequences.

use maxspec::continuity::{
    convergent_sequence, lipschitz_power_bound_check, mu_bump_experiment, semicontinuity_scan, weaker_holder_bound_check,
    SequenceKind,
};
use maxspec::FiniteMaxMatrix;

fn main() -> maxspec::Result<()> {
    let a = FiniteMaxMatrix::from_rows(&[vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 1.5], vec![0.8, 0.0, 0.3]])?;
    let b = FiniteMaxMatrix::from_rows(&[vec![0.0, 2.1, 0.0], vec![0.0, 0.2, 1.5], vec![0.7, 0.0, 0.3]])?;
    for k in [1, 2, 8, 32] {
        let rep = lipschitz_power_bound_check(&a, &b, k)?;
        let i = &rep.inequalities[0];
        println!("k = {k:<3} ||A^k - B^k|| = {:.4e} <= {:.4e}: {}", i.lhs, i.rhs, i.holds);
    }
    let w = weaker_holder_bound_check(&a, &b, 0.1)?;
    for i in &w.inequalities {
        println!("{}: {:.6} <= {:.6}: {}", i.name, i.lhs, i.rhs, i.holds);
    }
    let e = FiniteMaxMatrix::from_fn(3, |_, _| 1.0);
    for kind in [SequenceKind::Bump, SequenceKind::Shrink] {
        let rep = semicontinuity_scan(&convergent_sequence(kind, &a, &e, 64)?, &a, 1e-9)?;
        println!("{kind:?}: tail max r {:.12} vs r(A) {:.12}", rep.tail_max_r, rep.r_target);
    }
    for row in mu_bump_experiment(&[2, 8, 64, 512])? {
        println!("mu(B_{}) = {:.9} = k^(-1/k) {:.9}", row.k, row.mu, row.closed_form);
    }
    Ok(())
}
