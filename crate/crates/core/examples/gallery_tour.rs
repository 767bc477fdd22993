//! Window estimates for every gallery entry next to the known values.

use maxspec::estimate::{mu_estimate, radius_estimate, TOL_REL};
use maxspec::gallery::{gallery, Params, REGISTRY};

fn main() -> maxspec::Result<()> {
    for info in REGISTRY {
        let mut p = Params::new();
        match info.name {
            "kakutani_cutoff" => {
                p.insert("m".into(), 3.0);
            }
            "shift_perturbed" => {
                p.insert("n".into(), 6.0);
                p.insert("eps_prime".into(), 0.25);
            }
            "diag_const" => {
                p.insert("c".into(), 0.7);
            }
            _ => {}
        }
        let o = gallery(info.name, &p)?;
        let mu = mu_estimate(&o, 256, TOL_REL)?;
        let r = radius_estimate(&o, 256, 64, TOL_REL)?;
        println!(
            "{:<16} mu in [{:.6}, {}]  r in [{:.6}, {}]  known r = {:?}",
            info.name,
            mu.lower,
            fmt(mu.upper),
            r.lower,
            fmt(r.upper),
            o.known_value("r"),
        );
    }
    Ok(())
}

fn fmt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.6}"))
}
