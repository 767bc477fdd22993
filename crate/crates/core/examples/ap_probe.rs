//! Approximate eigenvalue probes on the backward shift and the inverse diagonal.

use maxspec::estimate::ap_spectrum_probe;
use maxspec::gallery::{gallery, Params};

fn main() -> maxspec::Result<()> {
    let back = gallery("backward_shift", &Params::new())?;
    for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
        let p = ap_spectrum_probe(&back, t, 1000, 8)?;
        println!("backward_shift t = {t:<5} best {:.3e} via {}", p.value, p.candidate);
    }
    let diag = gallery("diag_inverse", &Params::new())?;
    for j in [1, 2, 3, 10] {
        let p = ap_spectrum_probe(&diag, 1.0 / j as f64, 64, 4)?;
        println!("diag_inverse t = 1/{j:<3} best {:.3e} via {}", p.value, p.candidate);
    }
    Ok(())
}
