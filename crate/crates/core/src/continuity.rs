//! Perturbation experiments: the Lipschitz power bound, semicontinuity of `r`
//! and `μ`, the Kakutani discontinuity and the Hölder counterexamples.

use serde::Serialize;

use crate::error::{MaxError, Result};
use crate::gallery::{self, HolderLayout, Params};
use crate::matrix::{FiniteMaxMatrix, SparseMaxMatrix};
use crate::oracle::{MatrixOracle, RowSupportFn, Support};
use crate::scalar::MaxScalar;
use crate::spectral::{max_cycle_geom_mean, max_cycle_geom_mean_sparse};

/// Relative slack for floating-point evaluation of both sides.
pub const REL_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    fn le(name: &str, lhs: MaxScalar, rhs: MaxScalar) -> Self {
        let holds = lhs.to_f64() <= rhs.to_f64() * (1.0 + REL_SLACK) || lhs <= rhs;
        Inequality { name: name.into(), lhs: lhs.to_f64(), rhs: rhs.to_f64(), holds }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    pub base: Vec<Vec<f64>>,
    pub perturbed: Vec<Vec<f64>>,
    pub distance: f64,
    pub r_base: f64,
    pub r_perturbed: f64,
    pub mu_base: f64,
    pub mu_perturbed: f64,
    pub k: Vec<usize>,
    pub inequalities: Vec<Inequality>,
}

impl PerturbationReport {
    pub fn holds(&self) -> bool {
        self.inequalities.iter().all(|i| i.holds)
    }

    fn new(a: &FiniteMaxMatrix, b: &FiniteMaxMatrix) -> Result<Self> {
        let d = a.distance(b)?;
        let (ra, _) = max_cycle_geom_mean(a);
        let (rb, _) = max_cycle_geom_mean(b);
        Ok(PerturbationReport {
            base: a.to_rows(),
            perturbed: b.to_rows(),
            distance: d.to_f64(),
            r_base: ra.to_f64(),
            r_perturbed: rb.to_f64(),
            mu_base: ra.to_f64(),
            mu_perturbed: rb.to_f64(),
            k: Vec::new(),
            inequalities: Vec::new(),
        })
    }
}

/// `‖A^k - B^k‖ <= k ‖A - B‖ max(‖A‖, ‖B‖)^{k-1}`.
pub fn lipschitz_power_bound_check(a: &FiniteMaxMatrix, b: &FiniteMaxMatrix, k: usize) -> Result<PerturbationReport> {
    if k == 0 {
        return Err(MaxError::InvalidParam("k must be at least 1".into()));
    }
    let mut rep = PerturbationReport::new(a, b)?;
    let lhs = a.power(k as u64).distance(&b.power(k as u64))?;
    let m = a.norm().max(b.norm());
    let rhs = a.distance(b)?.scale(k as f64).mul(m.powi(k as u64 - 1));
    rep.k.push(k);
    rep.inequalities.push(Inequality::le("power_lipschitz", lhs, rhs));
    Ok(rep)
}

/// Weaker Hölder-type bounds for `μ` with `k` taken from critical cycles.
pub fn weaker_holder_bound_check(a: &FiniteMaxMatrix, b: &FiniteMaxMatrix, eps: f64) -> Result<PerturbationReport> {
    let (mu_a, wa) = max_cycle_geom_mean(a);
    let (mu_b, wb) = max_cycle_geom_mean(b);
    let e = MaxScalar::from_f64(eps);
    if eps.is_nan() || eps <= 0.0 || mu_b <= e || mu_a.is_zero() {
        return Err(MaxError::Precondition(format!(
            "need mu(B) > eps > 0 and mu(A) > 0, got mu(A) = {}, mu(B) = {}, eps = {eps}",
            mu_a.to_f64(),
            mu_b.to_f64()
        )));
    }
    let mut rep = PerturbationReport::new(a, b)?;
    let d = a.distance(b)?;
    let m = a.norm().max(b.norm());
    let term = |k: usize| MaxScalar::from_f64(k as f64).root(k).mul(d.root(k)).mul(m.powi(k as u64 - 1).root(k));
    let kb = wb.expect("mu(B) > 0 has a critical cycle").length;
    let ka = wa.expect("mu(A) > 0 has a critical cycle").length;
    rep.k = vec![kb, ka];
    // mu(B) - eps <= mu(A) + term(kb)
    let lhs = MaxScalar::from_f64(mu_b.to_f64() - eps);
    rep.inequalities.push(Inequality::le("mu_B_minus_eps", lhs, mu_a.add(term(kb))));
    // mu(A) - term(ka) <= mu(B) + eps
    let lower = (mu_a.to_f64() - term(ka).to_f64()).max(0.0);
    rep.inequalities.push(Inequality::le("mu_A_minus_term", MaxScalar::from_f64(lower), mu_b.add(e)));
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct KakutaniRow {
    pub m: usize,
    /// Window length: two periods of the cutoff pattern.
    pub window: usize,
    /// `A_m^{2^{m+1}} = 0` on the window.
    pub power_vanishes: bool,
    /// `A_m^{2^{m+1}-1} != 0`, so the nilpotency index is exact.
    pub index_exact: bool,
    pub r_cutoff: f64,
    pub distance: f64,
    pub distance_claimed: f64,
    pub distance_matches_claim: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KakutaniReport {
    pub m_max: usize,
    pub rows: Vec<KakutaniRow>,
    #[serde(rename = "K")]
    pub gelfand_k: usize,
    #[serde(rename = "N")]
    pub gelfand_window: usize,
    /// `‖A_N^K‖^{1/K}` on the window.
    pub gelfand_value: f64,
    /// `2^{-(sum_{j<m} j 2^{-j-1} + m 2^{-m})}` with `m = m_max`.
    pub closed_form: f64,
    pub r_known: f64,
    /// `gelfand_value - max_m r(A_m)`.
    pub gap: f64,
}

/// Sup-distance of two windows of equal size.
pub fn window_distance(a: &SparseMaxMatrix, b: &SparseMaxMatrix) -> Result<MaxScalar> {
    if a.n() != b.n() {
        return Err(MaxError::DimensionMismatch { left: a.n(), right: b.n() });
    }
    let mut d = MaxScalar::ZERO;
    for i in 0..a.n() {
        for &(j, _) in a.row(i).iter().chain(b.row(i)) {
            d = d.max(a.get(i, j).abs_diff(b.get(i, j)));
        }
    }
    Ok(d)
}

pub fn kakutani_experiment(m_max: usize) -> Result<KakutaniReport> {
    if m_max == 0 {
        return Err(MaxError::InvalidParam("m_max must be at least 1".into()));
    }
    if m_max > 12 {
        return Err(MaxError::ResourceCap(format!("m_max = {m_max} exceeds 12")));
    }
    let full = gallery::gallery("kakutani", &Params::new())?;
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let mut p = Params::new();
        p.insert("m".into(), m as f64);
        let cut = gallery::gallery("kakutani_cutoff", &p)?;
        let period = 1usize << (m + 1);
        let window = 2 * period;
        let am = cut.truncate(window)?.matrix;
        let norms = am.pow_norm_table(period);
        let power_vanishes = norms[period - 1].is_zero();
        let index_exact = !norms[period - 2].is_zero();
        let distance = window_distance(&full.truncate(window)?.matrix, &am)?.to_f64();
        let claimed = (-(m as f64)).exp2();
        rows.push(KakutaniRow {
            m,
            window,
            power_vanishes,
            index_exact,
            r_cutoff: if power_vanishes { 0.0 } else { f64::NAN },
            distance,
            distance_claimed: claimed,
            distance_matches_claim: distance == claimed,
        });
    }
    let k = 1usize << m_max;
    let n = 2 * k;
    let a = full.truncate(n)?.matrix;
    let gelfand_value = a.pow_norm_table(k)[k - 1].root(k).to_f64();
    let mf = m_max as f64;
    let exponent: f64 = (1..m_max).map(|j| j as f64 * (-(j as f64) - 1.0).exp2()).sum::<f64>() + mf * (-mf).exp2();
    let r_cut_max = rows.iter().map(|r| r.r_cutoff).fold(0.0, f64::max);
    Ok(KakutaniReport {
        m_max,
        rows,
        gelfand_k: k,
        gelfand_window: n,
        gelfand_value,
        closed_form: (-exponent).exp2(),
        r_known: 0.5,
        gap: gelfand_value - r_cut_max,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderRow {
    pub k: usize,
    pub n_k: usize,
    /// Mean of the closed chain of block `k`, a lower bound for `r(B_k)`.
    pub block_mean: f64,
    /// Largest cycle mean over blocks `1..=k` of the window.
    pub window_mu: f64,
    pub window: usize,
    pub distance: f64,
    pub distance_closed: f64,
    pub r_base: f64,
    pub ratio: f64,
    pub ratio_bound: f64,
    pub exceeds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderReport {
    pub alpha: f64,
    pub rows: Vec<HolderRow>,
}

pub fn holder_experiment(alpha: f64, ks: &[usize]) -> Result<HolderReport> {
    let base = gallery::holder_family(alpha, None)?;
    let layout = HolderLayout::new(alpha);
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let pert = gallery::holder_family(alpha, Some(k))?;
        let n_k = gallery::holder_block_size(k, alpha)?;
        let window = layout.flat(k, n_k);
        let bw = pert.truncate(window)?.matrix;
        let distance = window_distance(&base.truncate(window)?.matrix, &bw)?.to_f64();
        let (window_mu, _) = max_cycle_geom_mean_sparse(&bw);
        let block_mean = gallery::holder_block_mean(k, k, alpha)?;
        let r_base = 1.0;
        let r_lower = block_mean.max(r_base);
        let distance_closed = (k as f64).powf(-2.0 / alpha);
        let ratio = (r_lower - r_base) / distance_closed.powf(alpha);
        let ratio_bound = k as f64 / 2.0;
        rows.push(HolderRow {
            k,
            n_k,
            block_mean,
            window_mu: window_mu.to_f64(),
            window,
            distance,
            distance_closed,
            r_base,
            ratio,
            ratio_bound,
            exceeds: ratio > ratio_bound,
        });
    }
    Ok(HolderReport { alpha, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleRow {
    pub n: usize,
    pub r_b: f64,
    pub r_c: f64,
    pub r_c_closed: f64,
    pub dist_zero_b: f64,
    pub dist_zero_c: f64,
    pub dist_b_c: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub eps: f64,
    pub eps_prime: f64,
    /// Rows for `n = 2..=n_max`.
    pub rows: Vec<CounterexampleRow>,
}

/// `B_{n,ε}` (0-based storage), with the closing entry `ε'` when given.
fn chain(n: usize, eps: f64, closing: f64) -> FiniteMaxMatrix {
    FiniteMaxMatrix::from_fn(n, |i, j| {
        if j == i + 1 {
            eps
        } else if i == n - 1 && j == 0 {
            closing
        } else {
            0.0
        }
    })
}

pub fn lipschitz_counterexample(eps: f64, eps_prime: f64, n_max: usize) -> Result<CounterexampleReport> {
    if !(eps_prime > 0.0 && eps_prime < eps && eps.is_finite()) || n_max < 2 {
        return Err(MaxError::InvalidParam(format!(
            "need 0 < eps' < eps and n >= 2, got eps = {eps}, eps' = {eps_prime}, n = {n_max}"
        )));
    }
    let mut rows = Vec::new();
    for n in 2..=n_max {
        let b = chain(n, eps, 0.0);
        let c = chain(n, eps, eps_prime);
        let zero = FiniteMaxMatrix::zeros(n);
        let (r_b, _) = max_cycle_geom_mean(&b);
        let (r_c, _) = max_cycle_geom_mean(&c);
        let dist_b_c = b.distance(&c)?.to_f64();
        rows.push(CounterexampleRow {
            n,
            r_b: r_b.to_f64(),
            r_c: r_c.to_f64(),
            r_c_closed: MaxScalar::from_f64(eps).powi(n as u64 - 1).mul(MaxScalar::from_f64(eps_prime)).root(n).to_f64(),
            dist_zero_b: zero.distance(&b)?.to_f64(),
            dist_zero_c: zero.distance(&c)?.to_f64(),
            dist_b_c,
            ratio: (r_c.to_f64() - r_b.to_f64()).abs() / dist_b_c,
        });
    }
    Ok(CounterexampleReport { eps, eps_prime, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct SemicontinuityReport {
    pub length: usize,
    pub distances: Vec<f64>,
    pub r: Vec<f64>,
    pub mu: Vec<f64>,
    pub r_target: f64,
    pub mu_target: f64,
    /// Largest `r(A_n)` over the last quarter.
    pub tail_max_r: f64,
    /// Smallest `μ(A_n)` over the last quarter.
    pub tail_min_mu: f64,
    pub tol: f64,
    pub r_upper_ok: bool,
    pub mu_lower_ok: bool,
}

/// Checks `limsup r(A_n) <= r(A)` and `liminf μ(A_n) >= μ(A)` on a finite prefix.
pub fn semicontinuity_scan(seq: &[FiniteMaxMatrix], target: &FiniteMaxMatrix, tol: f64) -> Result<SemicontinuityReport> {
    if seq.len() < 4 {
        return Err(MaxError::InvalidParam("a sequence needs at least four terms".into()));
    }
    let distances: Vec<MaxScalar> = seq.iter().map(|a| a.distance(target)).collect::<Result<_>>()?;
    let decreasing = distances.windows(2).all(|w| w[1] <= w[0]) && (distances[0].is_zero() || distances[seq.len() - 1] < distances[0]);
    if !decreasing {
        return Err(MaxError::Precondition("sequence distances to the target do not decrease".into()));
    }
    let radii: Vec<MaxScalar> = seq.iter().map(|a| max_cycle_geom_mean(a).0).collect();
    let (rt, _) = max_cycle_geom_mean(target);
    let tail = &radii[seq.len() - seq.len() / 4..];
    let tail_max = tail.iter().copied().max().expect("nonempty tail");
    let tail_min = tail.iter().copied().min().expect("nonempty tail");
    let rt_f = rt.to_f64();
    Ok(SemicontinuityReport {
        length: seq.len(),
        distances: distances.iter().map(|d| d.to_f64()).collect(),
        r: radii.iter().map(|r| r.to_f64()).collect(),
        mu: radii.iter().map(|r| r.to_f64()).collect(),
        r_target: rt_f,
        mu_target: rt_f,
        tail_max_r: tail_max.to_f64(),
        tail_min_mu: tail_min.to_f64(),
        tol,
        r_upper_ok: tail_max.to_f64() <= rt_f + tol,
        mu_lower_ok: tail_min.to_f64() >= rt_f - tol,
    })
}

/// Convergent sequences toward a finite matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    /// `A + 2^{-8n} E`, approaching from above.
    Bump,
    /// `(1 - 2^{-n}) A`, approaching from below.
    Shrink,
}

pub fn convergent_sequence(kind: SequenceKind, a: &FiniteMaxMatrix, e: &FiniteMaxMatrix, len: usize) -> Result<Vec<FiniteMaxMatrix>> {
    if a.n() != e.n() {
        return Err(MaxError::DimensionMismatch { left: a.n(), right: e.n() });
    }
    Ok((1..=len)
        .map(|n| match kind {
            Bump => {
                let s = MaxScalar::pow2(-8 * n as i64);
                FiniteMaxMatrix::from_scalar_fn(a.n(), |i, j| a.get(i, j).add(s.mul(e.get(i, j))))
            }
            Shrink => a.scale(MaxScalar::from_f64(1.0 - (-(n as f64)).exp2())),
        })
        .collect())
}

use SequenceKind::{Bump, Shrink};

#[derive(Clone, Debug, Serialize)]
pub struct MuBumpRow {
    pub k: usize,
    pub mu: f64,
    pub closed_form: f64,
    pub distance: f64,
    /// Cycle through the bump, 1-based.
    pub witness: Vec<usize>,
}

/// Forward shift plus `1/k` at `(1, k)`.
pub fn mu_bump_oracle(k: usize) -> Result<MatrixOracle> {
    if k < 2 {
        return Err(MaxError::InvalidParam(format!("k must be at least 2, got {k}")));
    }
    let support: RowSupportFn = std::sync::Arc::new(move |i, n| {
        let mut c = Vec::new();
        if i == 1 && k <= n {
            c.push(k);
        }
        if i >= 2 && i - 1 <= n {
            c.push(i - 1);
        }
        c
    });
    Ok(MatrixOracle::new(format!("mu_bump(k={k})"), 1.0, move |i, j| {
        if i == j + 1 {
            1.0
        } else if i == 1 && j == k {
            1.0 / k as f64
        } else {
            0.0
        }
    })
    .with_support(Support::Rule(support)))
}

/// `μ(B_k) = k^{-1/k}` while `‖B_k - A‖ = 1/k` and `μ(A) = 0`.
pub fn mu_bump_experiment(ks: &[usize]) -> Result<Vec<MuBumpRow>> {
    let shift = gallery::gallery("forward_shift", &Params::new())?;
    ks.iter()
        .map(|&k| {
            let o = mu_bump_oracle(k)?;
            // cycles must use the bump, so the leading k x k window holds all of them
            let w = o.truncate(k)?.matrix;
            let (mu, wit) = max_cycle_geom_mean_sparse(&w);
            let distance = window_distance(&w, &shift.truncate(k)?.matrix)?.to_f64();
            Ok(MuBumpRow {
                k,
                mu: mu.to_f64(),
                closed_form: MaxScalar::from_f64(k as f64).root(k).to_f64().recip(),
                distance,
                witness: wit.map(|c| c.one_based()).unwrap_or_default(),
            })
        })
        .collect()
}
