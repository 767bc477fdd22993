//! The series e_1 + (A/t) e_1 + ... on windows of the star example, and its
//! failure on the forward shift.

use maxspec::estimate::eigenvector_construct;
use maxspec::gallery::{gallery, Params};

fn main() -> maxspec::Result<()> {
    let star = gallery("star_means", &Params::new())?;
    let shift = gallery("forward_shift", &Params::new())?;
    for n in [32, 64, 128, 256, 512] {
        let c = eigenvector_construct(&star, 1, 1.0, n, None)?;
        let f = eigenvector_construct(&shift, 1, 1.0, n, None)?;
        println!(
            "N = {n:<4} star residual {:.3e} (depth {}, x_2 = {}, x_5 = {})   shift residual {}",
            c.residual, c.depth, c.x[1], c.x[4], f.residual
        );
    }
    Ok(())
}
