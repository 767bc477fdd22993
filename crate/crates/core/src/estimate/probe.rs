//! Approximate point spectrum probes, power tables and irreducibility verdicts.

use rayon::prelude::*;
use serde::Serialize;

use super::check_window;
use crate::error::{MaxError, Result};
use crate::graph;
use crate::matrix::{MaxVector, SparseMaxMatrix};
use crate::oracle::MatrixOracle;
use crate::scalar::MaxScalar;

const BASIS_CANDIDATES: usize = 16;

#[derive(Clone, Debug, Serialize)]
pub struct ApProbe {
    pub t: f64,
    #[serde(rename = "N")]
    pub n_window: usize,
    /// Smallest `‖A x - t x‖` found over unit candidates.
    pub value: f64,
    pub candidate: String,
    /// Rows of the full oracle that enter the residual.
    pub rows_checked: usize,
    /// True when the support hint guarantees that no unchecked row sees the window.
    pub rigorous: bool,
}

struct ResidualRows {
    window: SparseMaxMatrix,
    /// Rows below the window restricted to window columns.
    extra: Vec<Vec<(usize, MaxScalar)>>,
}

impl ResidualRows {
    fn residual(&self, x: &MaxVector, t: MaxScalar) -> MaxScalar {
        let ax = self.window.mat_vec(x);
        let inside = ax.0.iter().zip(&x.0).map(|(&a, &b)| a.abs_diff(t.mul(b))).max().unwrap_or(MaxScalar::ZERO);
        let outside = self
            .extra
            .iter()
            .map(|row| row.iter().map(|&(j, a)| a.mul(x.0[j])).fold(MaxScalar::ZERO, MaxScalar::max))
            .max()
            .unwrap_or(MaxScalar::ZERO);
        inside.max(outside)
    }
}

fn normalized(x: MaxVector) -> Option<MaxVector> {
    let n = x.norm();
    (!n.is_zero()).then(|| x.scale(MaxScalar::ONE.div(n)))
}

/// Upper bound on `inf_{‖x‖=1} ‖A x - t x‖` from explicit window candidates.
pub fn ap_spectrum_probe(o: &MatrixOracle, t: f64, n_window: usize, k_max: usize) -> Result<ApProbe> {
    check_window(n_window)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(MaxError::InvalidParam(format!("t must be nonnegative, got {t}")));
    }
    let window = o.truncate(n_window)?.matrix;
    let below = o.hints.support.rows_below();
    let extra_rows = below.unwrap_or(n_window);
    let extra: Result<Vec<Vec<(usize, MaxScalar)>>> = (n_window + 1..=n_window + extra_rows)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for j in o.hints.support.row_columns(i, n_window) {
                let v = o.entry(i, j)?;
                if !v.is_zero() {
                    row.push((j - 1, v));
                }
            }
            Ok(row)
        })
        .collect();
    let rows = ResidualRows { window, extra: extra? };
    let ts = MaxScalar::from_f64(t);
    let n = n_window;

    let mut cands: Vec<(String, MaxVector)> = Vec::new();
    for j in 0..n.min(BASIS_CANDIDATES) {
        let mut x = MaxVector::basis(n, j);
        let mut series = x.clone();
        for m in 0..=k_max {
            cands.push((format!("A^{m} e_{}", j + 1), x.clone()));
            if m > 0 {
                if let Some(s) = normalized(series.clone()) {
                    cands.push((format!("series(e_{}, depth {m})", j + 1), s));
                }
            }
            let next = rows.window.mat_vec(&x);
            match normalized(next.clone()) {
                Some(y) => {
                    if !ts.is_zero() {
                        series = series.oplus(&next.scale(MaxScalar::ONE.div(ts.powi(m as u64 + 1))));
                        if series.norm() > MaxScalar::from_f64(1e300) {
                            break;
                        }
                    }
                    x = y;
                }
                None => break,
            }
        }
    }
    for s in [t, if t > 0.0 { 1.0 / t } else { 0.0 }] {
        if s > 0.0 && s <= 1.0 {
            let ss = MaxScalar::from_f64(s);
            cands.push((format!("geometric({s})"), MaxVector((0..n).map(|i| ss.powi(i as u64)).collect())));
        }
    }
    let nf = n as f64;
    cands.push(("ramp_down".into(), MaxVector((0..n).map(|i| MaxScalar::from_f64((nf - i as f64) / nf)).collect())));
    cands.push(("ramp_up".into(), MaxVector((0..n).map(|i| MaxScalar::from_f64((i as f64 + 1.0) / nf)).collect())));

    let scored: Vec<(MaxScalar, usize)> = cands.par_iter().enumerate().map(|(p, (_, x))| (rows.residual(x, ts), p)).collect();
    let (best, p) = scored.into_iter().min().expect("at least the ramps");
    Ok(ApProbe {
        t,
        n_window,
        value: best.to_f64(),
        candidate: cands[p].0.clone(),
        rows_checked: n_window + extra_rows,
        rigorous: below.is_some(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerTable {
    #[serde(rename = "N")]
    pub n_window: usize,
    /// `‖A_N^k‖` for `k = 1..=K`.
    pub norms: Vec<f64>,
    pub sup: f64,
    pub bounded: bool,
    pub threshold: f64,
}

/// Window power norms with a boundedness verdict against `10^3 max(1, ‖A_N‖)`.
pub fn power_bound_check(o: &MatrixOracle, n_window: usize, k_max: usize) -> Result<PowerTable> {
    check_window(n_window)?;
    let a = o.truncate(n_window)?.matrix;
    let table = a.pow_norm_table(k_max);
    let threshold = 1e3 * a.norm().to_f64().max(1.0);
    let sup = table.iter().copied().max().unwrap_or(MaxScalar::ZERO).to_f64();
    Ok(PowerTable { n_window, norms: table.iter().map(|v| v.to_f64()).collect(), sup, bounded: sup <= threshold, threshold })
}

#[derive(Clone, Debug, Serialize)]
pub struct IrreducibilityReport {
    #[serde(rename = "N")]
    pub n_window: usize,
    pub window_classes: usize,
    pub window_irreducible: bool,
    /// From hints only; absent when the hints say nothing.
    pub oracle_irreducible: Option<bool>,
}

pub fn irreducibility_check(o: &MatrixOracle, n_window: usize) -> Result<IrreducibilityReport> {
    check_window(n_window)?;
    let a = o.truncate(n_window)?.matrix;
    let classes = graph::tarjan(&graph::successors(&a)).len();
    let oracle_irreducible = o.hints.irreducible.or(if matches!(o.hints.support, crate::oracle::Support::Diagonal) { Some(false) } else { None });
    Ok(IrreducibilityReport { n_window, window_classes: classes, window_irreducible: classes == 1, oracle_irreducible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{gallery, Params};

    fn g(name: &str) -> MatrixOracle {
        gallery(name, &Params::new()).unwrap()
    }

    #[test]
    fn diagonal_eigenvalues_are_hit() {
        let o = g("diag_inverse");
        for j in [1usize, 2, 5] {
            let p = ap_spectrum_probe(&o, 1.0 / j as f64, 64, 8).unwrap();
            assert_eq!(p.value, 0.0);
            assert!(p.rigorous);
        }
    }

    #[test]
    fn backward_shift_interval() {
        let o = g("backward_shift");
        for t in [0.0, 0.3, 0.7, 0.95, 1.0] {
            let p = ap_spectrum_probe(&o, t, 1000, 8).unwrap();
            assert!(p.value <= 1.0 / 1000.0 + 1e-12, "t = {t}: {} via {}", p.value, p.candidate);
        }
    }

    #[test]
    fn unknown_support_is_not_rigorous() {
        let mut p = Params::new();
        p.insert("eps".into(), 0.5);
        let o = gallery("epsilon_cycle", &p).unwrap();
        assert!(!ap_spectrum_probe(&o, 1.0, 32, 4).unwrap().rigorous);
    }

    #[test]
    fn power_tables() {
        let star = power_bound_check(&g("star_means"), 64, 32).unwrap();
        assert!(star.bounded && star.sup <= 1.0);
        let mut p = Params::new();
        p.insert("c".into(), 1.0);
        let one = power_bound_check(&gallery("diag_const", &p).unwrap(), 16, 10).unwrap();
        assert!(one.norms.iter().all(|&v| v == 1.0));
        let mut p = Params::new();
        p.insert("scale".into(), 2.0);
        let two = power_bound_check(&gallery("backward_shift", &p).unwrap(), 64, 16).unwrap();
        assert_eq!(two.norms[9], 1024.0);
        assert!(!two.bounded);
    }

    #[test]
    fn irreducibility() {
        let mut p = Params::new();
        p.insert("eps".into(), 0.5);
        let e = irreducibility_check(&gallery("epsilon_cycle", &p).unwrap(), 32).unwrap();
        assert!(e.window_irreducible && e.oracle_irreducible == Some(true));
        let d = irreducibility_check(&g("diag_inverse"), 8).unwrap();
        assert_eq!((d.window_classes, d.oracle_irreducible), (8, Some(false)));
        for n in [2usize, 5, 40] {
            assert!(irreducibility_check(&g("star_means"), n).unwrap().window_irreducible);
        }
    }
}
