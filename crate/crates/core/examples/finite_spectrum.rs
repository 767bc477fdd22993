//! Radius, critical cycle, local radii and eigenvectors of a small reducible matrix.

use maxspec::spectral::{eigvec_finite, finite_spectrum, lower_spectral_radius, min_modulus};
use maxspec::FiniteMaxMatrix;

fn main() -> maxspec::Result<()> {
    // two classes: a 2-cycle of mean 3 feeding a loop of weight 1
    let a = FiniteMaxMatrix::from_rows(&[
        vec![0.0, 9.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 2.0, 1.0],
    ])?;
    let s = finite_spectrum(&a);
    println!("r(A) = mu(A) = {}", s.radius.to_f64());
    if let Some(c) = &s.critical_witness {
        println!("critical cycle {:?} with mean {}", c.one_based(), c.geometric_mean.to_f64());
    }
    for (j, r) in s.local_radii.iter().enumerate() {
        println!("r_e{} = {}", j + 1, r.to_f64());
    }
    for t in &s.point_spectrum {
        let x = eigvec_finite(&a, *t)?;
        let residual = a.mat_vec(&x)?.sup_distance(&x.scale(*t));
        println!("t = {:<6} x = {:?} residual {}", t.to_f64(), x.to_f64(), residual.to_f64());
    }
    println!("s(A) = {}", min_modulus(&a).to_f64());
    println!("d(A) ~ {}", lower_spectral_radius(&a, 32)?.value.to_f64());
    Ok(())
}
