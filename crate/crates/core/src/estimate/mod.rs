//! Truncation-based estimators for infinite oracles.
//!
//! Every estimate carries a lower bound that is reproduced by a finite
//! computation on a recorded window, an upper bound only when the norm bound,
//! a hint or a closed form justifies one, and the full schedule of window
//! values. Quantities that are limits over the index set (`m_e`, `r'`,
//! `r_ess`) are reported as window proxies.

pub mod eigen;
pub mod paths;
pub mod probe;

use rayon::prelude::*;
use serde::Serialize;

use crate::blockform;
use crate::error::{MaxError, Result};
use crate::matrix::{MaxVector, SparseMaxMatrix};
use crate::oracle::{KnownValue, MatrixOracle, Support};
use crate::scalar::MaxScalar;
use crate::spectral::{self, CycleWitness};

pub use eigen::{eigenvector_construct, EigenCandidate};
pub use paths::{r_prime_estimate, simple_path_sup, PathMode};
pub use probe::{ap_spectrum_probe, irreducibility_check, power_bound_check, ApProbe, IrreducibilityReport, PowerTable};

/// Default relative tolerance for convergence flags.
pub const TOL_REL: f64 = 1e-6;

/// Certificate behind a lower bound, with 1-based indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Cycle { indices: Vec<usize>, geometric_mean: f64, length: usize },
    Path { indices: Vec<usize>, weight: f64 },
}

impl Witness {
    pub fn from_cycle(c: &CycleWitness, offset: usize) -> Self {
        Witness::Cycle {
            indices: c.indices.iter().map(|i| i + 1 + offset).collect(),
            geometric_mean: c.geometric_mean.to_f64(),
            length: c.length,
        }
    }

    /// Recomputes the certified value from oracle probes.
    pub fn evaluate(&self, o: &MatrixOracle) -> Result<MaxScalar> {
        let idx = match self {
            Witness::Cycle { indices, .. } => {
                let mut c = indices.clone();
                c.push(indices[0]);
                c
            }
            Witness::Path { indices, .. } => indices.clone(),
        };
        let mut w = MaxScalar::ONE;
        for s in idx.windows(2) {
            w = w.mul(o.entry(s[1], s[0])?);
        }
        Ok(match self {
            Witness::Cycle { length, .. } => w.root(*length),
            Witness::Path { .. } => w,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleEntry {
    #[serde(rename = "N")]
    pub n_window: usize,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Tail offset or index parameter of the record.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralEstimate {
    pub quantity: String,
    pub lower: f64,
    pub upper: Option<f64>,
    /// Whether `lower` is a proven lower bound (false for window proxies).
    pub certified: bool,
    /// Uncertified window value, such as a window Gelfand term.
    pub heuristic: Option<f64>,
    pub witness: Option<Witness>,
    pub schedule: Vec<ScheduleEntry>,
    pub converged: bool,
    pub known: Option<KnownValue>,
    pub notes: Vec<String>,
}

impl SpectralEstimate {
    fn new(quantity: &str) -> Self {
        SpectralEstimate {
            quantity: quantity.into(),
            lower: 0.0,
            upper: None,
            certified: true,
            heuristic: None,
            witness: None,
            schedule: Vec::new(),
            converged: false,
            known: None,
            notes: Vec::new(),
        }
    }

    /// Schedule values are nondecreasing in `N`.
    pub fn schedule_nondecreasing(&self) -> bool {
        self.schedule.windows(2).all(|w| w[0].n_window > w[1].n_window || w[0].value <= w[1].value)
    }

    pub fn bracket_ok(&self) -> bool {
        self.upper.is_none_or(|u| self.lower <= u * (1.0 + 1e-12))
    }

    pub fn contains_known(&self, tol: f64) -> bool {
        match self.known.as_ref().and_then(|k| k.value) {
            Some(k) => self.lower <= k + tol && self.upper.is_none_or(|u| k <= u + tol),
            None => true,
        }
    }
}

/// `16, 32, ..., N` with `N` itself as the last entry.
pub fn doubling_schedule(n_max: usize) -> Vec<usize> {
    let mut s = Vec::new();
    let mut n = 16usize;
    while n < n_max {
        s.push(n);
        n *= 2;
    }
    s.push(n_max);
    s
}

/// Stable over two consecutive doublings.
pub(crate) fn stable(values: &[f64], tol: f64) -> bool {
    if values.len() < 3 {
        return false;
    }
    let tail = &values[values.len() - 3..];
    tail.windows(2).all(|w| (w[1] - w[0]).abs() <= tol * w[1].abs().max(w[0].abs()).max(f64::MIN_POSITIVE))
}

/// The reported bracket agrees with a known value, if any.
pub(crate) fn consistent(e: &SpectralEstimate, tol: f64) -> bool {
    match e.known.as_ref().and_then(|k| k.value) {
        Some(k) => {
            let near = (k - e.lower).abs() <= tol * k.abs().max(1.0);
            near && e.contains_known(tol)
        }
        None => true,
    }
}

fn finalize(mut e: SpectralEstimate, o: &MatrixOracle, known_key: &str, tol: f64) -> SpectralEstimate {
    e.known = o.known_entry(known_key).cloned();
    let values: Vec<f64> = e.schedule.iter().map(|s| s.value).collect();
    let tight = e.upper.is_some_and(|u| (u - e.lower).abs() <= tol * u.abs().max(1.0));
    e.converged = (tight || stable(&values, tol)) && consistent(&e, tol);
    if !e.converged && e.known.is_some() {
        e.notes.push("not converged; known value attached".into());
    }
    e
}

pub(crate) fn check_window(n_window: usize) -> Result<()> {
    if n_window == 0 {
        return Err(MaxError::InvalidParam("window size N must be at least 1".into()));
    }
    if n_window > 1 << 16 {
        return Err(MaxError::ResourceCap(format!("window size {n_window} exceeds 65536")));
    }
    Ok(())
}

/// Leading windows for the schedule, realizing the largest once.
pub(crate) fn windows(o: &MatrixOracle, sched: &[usize]) -> Result<Vec<SparseMaxMatrix>> {
    let largest = *sched.iter().max().expect("nonempty schedule");
    let big = o.truncate(largest)?.matrix;
    Ok(sched.iter().map(|&n| if n == largest { big.clone() } else { big.restrict(&(0..n).collect::<Vec<_>>()) }).collect())
}

/// Certified upper bound on `r(A)`, and hence on `μ`, `m`, `r_ess`, `r'` and local radii.
pub(crate) fn radius_upper(o: &MatrixOracle) -> (f64, &'static str) {
    match o.hints.radius_upper {
        Some(r) if r < o.norm_bound => (r, "dominator bound"),
        _ => (o.norm_bound, "norm bound"),
    }
}

fn finite_support_within(o: &MatrixOracle, n_window: usize) -> bool {
    matches!(o.hints.support, Support::Finite { size } if size <= n_window)
}

/// `μ(A)` from leading windows; the Karp value of each window is a lower bound.
pub fn mu_estimate(o: &MatrixOracle, n_window: usize, tol: f64) -> Result<SpectralEstimate> {
    check_window(n_window)?;
    let sched = doubling_schedule(n_window);
    let wins = windows(o, &sched)?;
    let results: Vec<(MaxScalar, Option<CycleWitness>)> =
        wins.par_iter().map(spectral::max_cycle_geom_mean_sparse).collect();
    let mut e = SpectralEstimate::new("mu");
    for (&n, (v, _)) in sched.iter().zip(&results) {
        e.schedule.push(ScheduleEntry { n_window: n, k: None, n: None, value: v.to_f64() });
    }
    let (last, wit) = results.last().cloned().expect("nonempty schedule");
    e.lower = last.to_f64();
    e.witness = wit.as_ref().map(|c| Witness::from_cycle(c, 0));
    let (up, why) = radius_upper(o);
    e.upper = Some(up);
    e.notes.push(format!("upper from {why}"));
    if o.hints.acyclic == Some(true) {
        e.upper = Some(0.0);
        e.notes.push("acyclic by hint: mu = 0".into());
    }
    if finite_support_within(o, n_window) {
        e.upper = Some(e.lower);
        e.notes.push("finite support inside the window: exact".into());
    } else if matches!(o.hints.support, Support::Diagonal) && o.hints.tail_monotone {
        e.upper = Some(o.entry(1, 1)?.to_f64());
        e.notes.push("nonincreasing diagonal: mu = a_11".into());
    }
    Ok(finalize(e, o, "mu", tol))
}

/// Local radii of every window index for each window in the schedule.
fn window_local_radii(wins: &[SparseMaxMatrix]) -> Vec<Vec<MaxScalar>> {
    wins.par_iter().map(blockform::access_radii_sparse).collect()
}

/// `r_{e_j}(A)` (1-based `j`) from leading windows containing `j`.
pub fn local_radius_estimate(o: &MatrixOracle, j: usize, n_window: usize, tol: f64) -> Result<SpectralEstimate> {
    check_window(n_window)?;
    if j == 0 || j > n_window {
        return Err(MaxError::IndexOutOfRange { index: j, dim: n_window });
    }
    let sched: Vec<usize> = doubling_schedule(n_window).into_iter().filter(|&n| n >= j).collect();
    let wins = windows(o, &sched)?;
    let vals: Vec<MaxScalar> = wins.par_iter().map(|w| spectral::local_radius_sparse(w, j - 1)).collect();
    let mut e = SpectralEstimate::new(&format!("local_radius({j})"));
    for (&n, v) in sched.iter().zip(&vals) {
        e.schedule.push(ScheduleEntry { n_window: n, k: None, n: Some(j), value: v.to_f64() });
    }
    e.lower = vals.last().expect("nonempty").to_f64();
    let (up, why) = radius_upper(o);
    e.upper = Some(up);
    e.notes.push(format!("upper from {why}"));
    if matches!(o.hints.support, Support::Diagonal) {
        e.upper = Some(e.lower);
        e.notes.push("diagonal: r_{e_j} = a_jj".into());
    } else if finite_support_within(o, n_window) {
        e.upper = Some(e.lower);
        e.notes.push("finite support inside the window: exact".into());
    }
    let tight = e.upper.is_some_and(|u| (u - e.lower).abs() <= tol * u.abs().max(1.0));
    let mut e = finalize(e, o, "local_radius", tol);
    if let Some(k) = &e.known {
        if k.value.is_none() {
            // a symbolic value cannot confirm a stable window sequence
            e.converged = tight;
            e.notes.push(format!("known: {}", k.description));
        }
    }
    Ok(e)
}

/// `m(A) = sup_j r_{e_j}(A)` over `j <= J`.
pub fn m_estimate(o: &MatrixOracle, j_max: usize, n_window: usize, tol: f64) -> Result<SpectralEstimate> {
    check_window(n_window)?;
    let sched = doubling_schedule(n_window);
    let wins = windows(o, &sched)?;
    let radii = window_local_radii(&wins);
    let mut e = SpectralEstimate::new("m");
    for (&n, r) in sched.iter().zip(&radii) {
        let v = r.iter().take(j_max).copied().max().unwrap_or(MaxScalar::ZERO);
        e.schedule.push(ScheduleEntry { n_window: n, k: None, n: Some(j_max.min(n)), value: v.to_f64() });
    }
    e.lower = e.schedule.last().expect("nonempty").value;
    let (up, why) = radius_upper(o);
    e.upper = Some(up);
    e.notes.push(format!("upper from {why}"));
    if finite_support_within(o, n_window) {
        e.upper = Some(e.lower);
    } else if matches!(o.hints.support, Support::Diagonal) && o.hints.tail_monotone {
        e.upper = Some(o.entry(1, 1)?.to_f64());
    }
    Ok(finalize(e, o, "m", tol))
}

/// Window proxy for `m_e(A) = limsup_j r_{e_j}(A)`: the largest local radius among
/// the last `j_window` indices of each window.
pub fn m_e_estimate(o: &MatrixOracle, j_window: usize, n_window: usize, tol: f64) -> Result<SpectralEstimate> {
    check_window(n_window)?;
    if j_window == 0 {
        return Err(MaxError::InvalidParam("the trailing index window must be nonempty".into()));
    }
    let sched = doubling_schedule(n_window);
    let wins = windows(o, &sched)?;
    let radii = window_local_radii(&wins);
    let mut e = SpectralEstimate::new("m_e");
    e.certified = false;
    for (&n, r) in sched.iter().zip(&radii) {
        let from = n.saturating_sub(j_window);
        let v = r[from..].iter().copied().max().unwrap_or(MaxScalar::ZERO);
        e.schedule.push(ScheduleEntry { n_window: n, k: None, n: Some(from + 1), value: v.to_f64() });
    }
    e.lower = e.schedule.last().expect("nonempty").value;
    e.notes.push(format!("proxy over the trailing {j_window} indices of each window; limsup is not decided by finite data"));
    let (up, why) = radius_upper(o);
    e.upper = Some(up);
    e.notes.push(format!("upper from {why}"));
    if finite_support_within(o, n_window) {
        e.upper = Some(0.0);
        e.lower = 0.0;
        e.certified = true;
        e.notes.push("finite support: all far local radii vanish".into());
    }
    Ok(finalize(e, o, "m_e", tol))
}

/// Essential radius: radii of tail windows `[n+1..N]` for each `n` in the schedule.
pub fn r_ess_estimate(o: &MatrixOracle, n_schedule: &[usize], n_window: usize, tol: f64) -> Result<SpectralEstimate> {
    check_window(n_window)?;
    if n_schedule.is_empty() {
        return Err(MaxError::InvalidParam("tail schedule must be nonempty".into()));
    }
    if n_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MaxError::InvalidParam("tail schedule must be strictly increasing".into()));
    }
    if let Some(&bad) = n_schedule.iter().find(|&&n| n >= n_window) {
        return Err(MaxError::InvalidParam(format!("tail offset {bad} must be below N = {n_window}")));
    }
    let lead = o.truncate(n_window)?.matrix;
    let vals: Vec<(MaxScalar, Option<CycleWitness>)> = n_schedule
        .par_iter()
        .map(|&n| spectral::max_cycle_geom_mean_sparse(&lead.restrict(&(n..n_window).collect::<Vec<_>>())))
        .collect();
    let mut e = SpectralEstimate::new("r_ess");
    for (&n, (v, _)) in n_schedule.iter().zip(&vals) {
        e.schedule.push(ScheduleEntry { n_window, k: None, n: Some(n), value: v.to_f64() });
    }
    let table_min = e.schedule.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    e.heuristic = Some(table_min);
    e.lower = 0.0;
    let last_n = *n_schedule.last().expect("nonempty");
    let (up, why) = radius_upper(o);
    e.upper = Some(up);
    let mut exact = false;
    match o.hints.support {
        Support::Star { center } if last_n >= center => {
            e.upper = Some(0.0);
            exact = true;
            e.notes.push(format!("P_n A P_n = 0 for n >= {center}"));
        }
        Support::Finite { size } if last_n >= size => {
            e.upper = Some(0.0);
            exact = true;
            e.notes.push(format!("P_n A P_n = 0 for n >= {size}"));
        }
        Support::Diagonal if o.hints.tail_monotone => {
            e.upper = Some(o.entry(last_n + 1, last_n + 1)?.to_f64());
            e.notes.push("nonincreasing diagonal: r(P_n A P_n) = a_{n+1,n+1}".into());
        }
        _ => e.notes.push(format!("upper from {why}")),
    }
    if !exact {
        e.notes.push("tail-window radii under-approximate r(P_n A P_n); lower bound is trivial".into());
    }
    e.known = o.known_entry("r_ess").cloned();
    let values: Vec<f64> = e.schedule.iter().map(|s| s.value).collect();
    let settled = exact || stable(&values, tol) || (values.len() < 3 && values.windows(2).all(|w| w[0] == w[1]));
    let agrees = match e.known.as_ref().and_then(|k| k.value) {
        Some(k) => (table_min - k).abs() <= tol * k.abs().max(1.0) && e.contains_known(tol),
        None => true,
    };
    e.converged = settled && agrees;
    if !e.converged && e.known.is_some() {
        e.notes.push("not converged; known value attached".into());
    }
    Ok(e)
}

/// Window Gelfand terms `‖A_N^k‖^{1/k}` for `k = 1..=K`.
pub fn window_gelfand(o: &MatrixOracle, n_window: usize, k_max: usize) -> Result<Vec<MaxScalar>> {
    check_window(n_window)?;
    let a = o.truncate(n_window)?.matrix;
    Ok(a.pow_norm_table(k_max).into_iter().enumerate().map(|(k, v)| v.root(k + 1)).collect())
}

/// `r(A)`: certified lower bound `max(μ, m)` from windows, upper from the norm
/// bound, dominators or closed forms, and the window Gelfand minimum as a heuristic.
pub fn radius_estimate(o: &MatrixOracle, n_window: usize, k_max: usize, tol: f64) -> Result<SpectralEstimate> {
    check_window(n_window)?;
    if k_max == 0 {
        return Err(MaxError::InvalidParam("K must be at least 1".into()));
    }
    let mu = mu_estimate(o, n_window, tol)?;
    let m = m_estimate(o, n_window, n_window, tol)?;
    let gel = window_gelfand(o, n_window, k_max)?;
    let gel_min = gel.iter().copied().min().unwrap_or(MaxScalar::ZERO);

    let mut e = SpectralEstimate::new("r");
    for (a, b) in mu.schedule.iter().zip(&m.schedule) {
        e.schedule.push(ScheduleEntry { n_window: a.n_window, k: None, n: None, value: a.value.max(b.value) });
    }
    e.schedule.push(ScheduleEntry { n_window, k: Some(k_max), n: None, value: gel[k_max - 1].to_f64() });
    e.schedule.retain(|s| s.k.is_none());
    e.lower = mu.lower.max(m.lower);
    e.witness = mu.witness.clone();
    e.heuristic = Some(gel_min.to_f64());
    e.notes.push(format!(
        "window Gelfand: ||A_N^K||^(1/K) = {} at N = {n_window}, K = {k_max}; min over k <= K = {}",
        gel[k_max - 1].to_f64(),
        gel_min.to_f64()
    ));

    let (up, why) = radius_upper(o);
    e.upper = Some(up);
    e.notes.push(format!("upper from {why}"));
    if finite_support_within(o, n_window) {
        e.upper = Some(e.lower);
        e.notes.push("finite support inside the window: exact".into());
    } else if matches!(o.hints.support, Support::Diagonal) && o.hints.tail_monotone {
        e.upper = Some(o.entry(1, 1)?.to_f64());
    }
    let e = finalize(e, o, "r", tol);
    if let Some(u) = e.upper {
        if e.lower > u * (1.0 + 1e-12) {
            return Err(MaxError::Precondition(format!("radius bracket inverted: lower {} > upper {u}", e.lower)));
        }
    }
    Ok(e)
}

/// `c(e_j)`: best closed walk weight through `j` divided by `t^k`, over `k <= K`.
pub fn c_ej_estimate(o: &MatrixOracle, j: usize, t: f64, n_window: usize, k_max: usize) -> Result<SpectralEstimate> {
    check_window(n_window)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(MaxError::InvalidParam(format!("t must be positive, got {t}")));
    }
    if j == 0 || j > n_window {
        return Err(MaxError::IndexOutOfRange { index: j, dim: n_window });
    }
    let ts = MaxScalar::from_f64(t);
    let a = o.truncate(n_window)?.matrix;
    let n = a.n();
    let mut x = MaxVector::basis(n, j - 1);
    // parents[k][v]: predecessor of v on the best walk of length k+1 from j
    let mut parents: Vec<Vec<u32>> = Vec::with_capacity(k_max);
    let mut best = (MaxScalar::ZERO, 0usize);
    let mut e = SpectralEstimate::new(&format!("c_e({j})"));
    for k in 1..=k_max {
        let mut y = MaxVector::zeros(n);
        let mut par = vec![u32::MAX; n];
        for v in 0..n {
            for &(u, w) in a.row(v) {
                let cand = w.div(ts).mul(x.0[u]);
                if cand > y.0[v] {
                    y.0[v] = cand;
                    par[v] = u as u32;
                }
            }
        }
        parents.push(par);
        let closed = y.0[j - 1];
        if closed > best.0 {
            best = (closed, k);
        }
        e.schedule.push(ScheduleEntry { n_window, k: Some(k), n: Some(j), value: closed.to_f64() });
        if y.norm().is_zero() {
            break;
        }
        x = y;
    }
    e.lower = best.0.to_f64();
    if best.1 > 0 {
        let mut walk = vec![j - 1];
        let mut cur = j - 1;
        for k in (0..best.1).rev() {
            cur = parents[k][cur] as usize;
            walk.push(cur);
        }
        walk.reverse();
        e.witness = Some(Witness::Path { indices: walk.iter().map(|i| i + 1).collect(), weight: best.0.mul(ts.powi(best.1 as u64)).to_f64() });
    }
    e.schedule.retain(|s| s.value > 0.0 || s.k == Some(1));
    e.notes.push(format!("closed walks of length <= {k_max} through j, weights divided by t^k"));
    Ok(e)
}
