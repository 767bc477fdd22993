//! Eigenvector candidates from the series `e_{i0} ⊕ (A/t) e_{i0} ⊕ (A/t)^2 e_{i0} ⊕ ...`.

use serde::Serialize;

use super::check_window;
use crate::error::{MaxError, Result};
use crate::matrix::MaxVector;
use crate::oracle::MatrixOracle;
use crate::scalar::MaxScalar;

/// Norm at which the partial series counts as unbounded.
pub const SERIES_CAP: f64 = 1e3;

#[derive(Clone, Debug, Serialize)]
pub struct EigenCandidate {
    pub i0: usize,
    pub t: f64,
    #[serde(rename = "N")]
    pub n_window: usize,
    /// Window coordinates `x_1..x_N`.
    pub x: Vec<f64>,
    /// Number of series terms added.
    pub depth: usize,
    /// The partial sums reached a fixed point before the depth limit.
    pub stabilized: bool,
    /// `max_i |(A x)_i - t x_i|` over the checked rows.
    pub residual: f64,
    /// Rows `1..=residual_rows` enter the residual.
    pub residual_rows: usize,
    /// Whether the margin comes from a support hint.
    pub margin_known: bool,
}

/// Builds the partial series on the leading window. `depth` defaults to `4N`.
pub fn eigenvector_construct(o: &MatrixOracle, i0: usize, t: f64, n_window: usize, depth: Option<usize>) -> Result<EigenCandidate> {
    check_window(n_window)?;
    if i0 == 0 || i0 > n_window {
        return Err(MaxError::IndexOutOfRange { index: i0, dim: n_window });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(MaxError::InvalidParam(format!("t must be positive, got {t}")));
    }
    let depth_cap = depth.unwrap_or(4 * n_window);
    let a = o.truncate(n_window)?.matrix;
    let ts = MaxScalar::from_f64(t);
    let cap = MaxScalar::from_f64(SERIES_CAP);
    let e = MaxVector::basis(n_window, i0 - 1);
    let mut x = e.clone();
    let mut used = 0;
    let mut stabilized = false;
    while used < depth_cap {
        let next = e.oplus(&a.mat_vec(&x).scale(MaxScalar::ONE.div(ts)));
        used += 1;
        if next == x {
            stabilized = true;
            break;
        }
        x = next;
        let norm = x.norm();
        if norm > cap {
            return Err(MaxError::PowerUnbounded { norm: norm.to_f64(), cap: SERIES_CAP, depth: used });
        }
    }
    let margin = o.hints.support.cols_above();
    let rows = n_window.saturating_sub(margin.unwrap_or(0));
    let ax = a.mat_vec(&x);
    let residual = (0..rows).map(|i| ax.0[i].abs_diff(ts.mul(x.0[i]))).max().unwrap_or(MaxScalar::ZERO);
    Ok(EigenCandidate {
        i0,
        t,
        n_window,
        x: x.to_f64(),
        depth: used,
        stabilized,
        residual: residual.to_f64(),
        residual_rows: rows,
        margin_known: margin.is_some(),
    })
}
