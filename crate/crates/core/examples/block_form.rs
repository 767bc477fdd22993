//! Frobenius normal form and the level decomposition by local radius.

use maxspec::blockform::{fnf, verify_block_form};
use maxspec::FiniteMaxMatrix;

fn main() -> maxspec::Result<()> {
    let a = FiniteMaxMatrix::from_rows(&[
        vec![0.5, 0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 2.0, 0.0, 0.0],
        vec![0.0, 2.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0, 9.0, 0.0],
    ])?;
    let d = fnf(&a);
    let one = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    println!("permutation {:?}", one(&d.permutation));
    for (c, r) in d.classes.iter().zip(&d.class_radii) {
        println!("class {:?} radius {}", one(c), r.to_f64());
    }
    for l in &d.levels {
        println!("level {} -> {:?}", l.value.to_f64(), one(&l.indices));
    }
    let check = verify_block_form(&a.permute(&d.permutation), &renumbered(&d.classes, &d.permutation))?;
    println!("block lower triangular: {}", check.ok);
    Ok(())
}

/// Classes expressed in the permuted numbering.
fn renumbered(classes: &[Vec<usize>], perm: &[usize]) -> Vec<Vec<usize>> {
    let mut pos = vec![0; perm.len()];
    for (p, &i) in perm.iter().enumerate() {
        pos[i] = p;
    }
    classes.iter().map(|c| { let mut v: Vec<usize> = c.iter().map(|&i| pos[i]).collect(); v.sort(); v }).collect()
}
