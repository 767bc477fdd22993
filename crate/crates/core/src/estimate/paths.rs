//! Heaviest simple paths of a given length and the `r'` proxy.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{check_window, radius_upper, stable, ScheduleEntry, SpectralEstimate, Witness};
use crate::error::{MaxError, Result};
use crate::graph;
use crate::matrix::SparseMaxMatrix;
use crate::oracle::{MatrixOracle, Support};
use crate::scalar::MaxScalar;

const SUBSET_DP_MAX: usize = 20;
const BEAM_WIDTH: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    /// Exact when possible, beam search otherwise.
    Auto,
    /// Exact or an error.
    Exact,
    /// Beam search even on small windows.
    Heuristic,
}

/// Best simple path with `k` steps found on a window.
#[derive(Clone, Debug, Serialize)]
pub struct SimplePathSup {
    pub k: usize,
    #[serde(rename = "N")]
    pub n_window: usize,
    pub weight: f64,
    #[serde(skip)]
    pub weight_scalar: MaxScalar,
    /// 1-based, in path-weight orientation.
    pub path: Vec<usize>,
    /// Whether `weight` is the exact maximum over the window.
    pub exact: bool,
    pub method: &'static str,
}

impl SimplePathSup {
    pub fn witness(&self) -> Witness {
        Witness::Path { indices: self.path.clone(), weight: self.weight }
    }
}

/// `c_k` restricted to the leading window: the heaviest path through `k + 1` distinct indices.
pub fn simple_path_sup(o: &MatrixOracle, n_window: usize, k: usize, mode: PathMode) -> Result<SimplePathSup> {
    check_window(n_window)?;
    if k == 0 || k >= n_window {
        return Err(MaxError::InvalidParam(format!("path length k = {k} must lie in 1..N = {n_window}")));
    }
    let a = o.truncate(n_window)?.matrix;
    window_path_sup(&a, k, mode)
}

pub(crate) fn window_path_sup(a: &SparseMaxMatrix, k: usize, mode: PathMode) -> Result<SimplePathSup> {
    let n = a.n();
    let dag = graph::acyclic_modulo_loops(&graph::successors(a));
    let (w, path, exact, method) = if dag && mode != PathMode::Heuristic {
        let (w, p) = dag_dp(a, k);
        (w, p, true, "dag_dp")
    } else if n <= SUBSET_DP_MAX && mode != PathMode::Heuristic {
        let (w, p) = subset_dp(a, k);
        (w, p, true, "subset_dp")
    } else if mode == PathMode::Exact {
        return Err(MaxError::ResourceCap(format!(
            "exact simple-path search on a cyclic window needs N <= {SUBSET_DP_MAX}, got {n}"
        )));
    } else {
        let (w, p) = beam(a, k);
        (w, p, false, "beam")
    };
    Ok(SimplePathSup {
        k,
        n_window: n,
        weight: w.to_f64(),
        weight_scalar: w,
        path: path.iter().map(|i| i + 1).collect(),
        exact,
        method,
    })
}

/// Longest `k`-step walk after dropping loops; every such walk is simple on a DAG.
fn dag_dp(a: &SparseMaxMatrix, k: usize) -> (MaxScalar, Vec<usize>) {
    let n = a.n();
    let mut x = vec![MaxScalar::ONE; n];
    let mut parents: Vec<Vec<u32>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut y = vec![MaxScalar::ZERO; n];
        let mut par = vec![u32::MAX; n];
        for (q, (yq, pq)) in y.iter_mut().zip(par.iter_mut()).enumerate() {
            for &(p, w) in a.row(q) {
                if p == q {
                    continue;
                }
                let c = w.mul(x[p]);
                if c > *yq {
                    *yq = c;
                    *pq = p as u32;
                }
            }
        }
        parents.push(par);
        x = y;
    }
    let (end, best) = best_index(&x);
    if best.is_zero() {
        return (best, Vec::new());
    }
    let mut path = vec![end];
    let mut cur = end;
    for par in parents.iter().rev() {
        cur = par[cur] as usize;
        path.push(cur);
    }
    path.reverse();
    (best, path)
}

fn best_index(x: &[MaxScalar]) -> (usize, MaxScalar) {
    let mut best = (0, MaxScalar::ZERO);
    for (i, &v) in x.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

type Layer = HashMap<(u32, u8), (MaxScalar, u8)>;

/// Layered dynamic program over visited sets; `n <= 20`.
fn subset_dp(a: &SparseMaxMatrix, k: usize) -> (MaxScalar, Vec<usize>) {
    let n = a.n();
    let mut layers: Vec<Layer> = Vec::with_capacity(k + 1);
    layers.push((0..n).map(|v| ((1u32 << v, v as u8), (MaxScalar::ONE, u8::MAX))).collect());
    for _ in 0..k {
        let prev = layers.last().expect("first layer");
        let mut next: Layer = HashMap::new();
        for (&(mask, p), &(w, _)) in prev {
            for &(q, aq) in a.col(p as usize) {
                if mask & (1 << q) != 0 {
                    continue;
                }
                let key = (mask | (1 << q), q as u8);
                let cand = aq.mul(w);
                let slot = next.entry(key).or_insert((MaxScalar::ZERO, u8::MAX));
                if cand > slot.0 || (cand == slot.0 && p < slot.1) {
                    *slot = (cand, p);
                }
            }
        }
        if next.is_empty() {
            return (MaxScalar::ZERO, Vec::new());
        }
        layers.push(next);
    }
    let last = layers.last().expect("layer k");
    let (&(mut mask, mut v), &(best, _)) = last
        .iter()
        .max_by(|x, y| x.1 .0.cmp(&y.1 .0).then_with(|| y.0.cmp(x.0)))
        .expect("nonempty layer");
    let mut path = vec![v as usize];
    for layer in layers.iter().rev().take(k) {
        let p = layer[&(mask, v)].1;
        mask &= !(1 << v);
        v = p;
        path.push(v as usize);
    }
    path.reverse();
    (best, path)
}

/// Beam search keeping the heaviest partial simple paths.
fn beam(a: &SparseMaxMatrix, k: usize) -> (MaxScalar, Vec<usize>) {
    let mut states: Vec<(MaxScalar, Vec<usize>)> = (0..a.n()).map(|v| (MaxScalar::ONE, vec![v])).collect();
    for _ in 0..k {
        let mut next: Vec<(MaxScalar, Vec<usize>)> = states
            .par_iter()
            .flat_map_iter(|(w, path)| {
                let p = *path.last().expect("nonempty path");
                a.col(p).iter().filter(|(q, _)| !path.contains(q)).map(move |&(q, aq)| {
                    let mut np = path.clone();
                    np.push(q);
                    (aq.mul(*w), np)
                })
            })
            .collect();
        if next.is_empty() {
            return (MaxScalar::ZERO, Vec::new());
        }
        next.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
        next.truncate(BEAM_WIDTH);
        states = next;
    }
    states.into_iter().next().expect("nonempty beam")
}

/// Certified upper bound on `r'` via `r' <= r_ess`.
fn r_prime_upper(o: &MatrixOracle) -> (f64, &'static str) {
    match o.hints.support {
        Support::Star { .. } | Support::Finite { .. } | Support::Diagonal => (0.0, "no long simple paths"),
        _ => radius_upper(o),
    }
}

/// Window proxy for `r' = limsup_k c_k^{1/k}` over the lengths `ks`.
pub fn r_prime_estimate(o: &MatrixOracle, n_window: usize, ks: &[usize], mode: PathMode, tol: f64) -> Result<SpectralEstimate> {
    check_window(n_window)?;
    if ks.is_empty() {
        return Err(MaxError::InvalidParam("at least one path length is needed".into()));
    }
    let a = o.truncate(n_window)?.matrix;
    let sups: Vec<Result<SimplePathSup>> = ks
        .par_iter()
        .map(|&k| {
            if k == 0 || k >= n_window {
                Err(MaxError::InvalidParam(format!("path length k = {k} must lie in 1..N = {n_window}")))
            } else {
                window_path_sup(&a, k, mode)
            }
        })
        .collect();
    let mut e = SpectralEstimate::new("r_prime");
    e.certified = false;
    let mut best: Option<(MaxScalar, SimplePathSup)> = None;
    for s in sups {
        let s = s?;
        let v = s.weight_scalar.root(s.k);
        e.schedule.push(ScheduleEntry { n_window, k: Some(s.k), n: None, value: v.to_f64() });
        if !s.exact {
            e.notes.push(format!("c_{} from beam search is a lower bound only", s.k));
        }
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, s));
        }
    }
    let (v, s) = best.expect("nonempty");
    e.lower = v.to_f64();
    e.witness = (!s.path.is_empty()).then(|| s.witness());
    let (up, why) = r_prime_upper(o);
    e.upper = Some(up);
    e.notes.push(format!("upper from {why}; lower is max_k c_k^(1/k), a proxy for the limsup"));
    if e.lower > up {
        e.notes.push(format!("proxy {} exceeds the certified upper bound and is clipped", e.lower));
        e.lower = up;
    }
    e.known = o.known_entry("r_prime").cloned();
    let values: Vec<f64> = e.schedule.iter().map(|s| s.value).collect();
    e.converged = (stable(&values, tol) || e.upper == Some(e.lower)) && super::consistent(&e, tol);
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{gallery, Params};
    use crate::matrix::FiniteMaxMatrix;
    use proptest::prelude::*;

    fn brute(a: &FiniteMaxMatrix, k: usize) -> MaxScalar {
        fn go(a: &FiniteMaxMatrix, path: &mut Vec<usize>, k: usize, w: MaxScalar, best: &mut MaxScalar) {
            if path.len() == k + 1 {
                *best = (*best).max(w);
                return;
            }
            let p = *path.last().unwrap();
            for q in 0..a.n() {
                if !path.contains(&q) && !a.get(q, p).is_zero() {
                    path.push(q);
                    go(a, path, k, w.mul(a.get(q, p)), best);
                    path.pop();
                }
            }
        }
        let mut best = MaxScalar::ZERO;
        for s in 0..a.n() {
            go(a, &mut vec![s], k, MaxScalar::ONE, &mut best);
        }
        best
    }

    fn check_path(a: &SparseMaxMatrix, s: &SimplePathSup) {
        let d = a.to_dense();
        let idx: Vec<usize> = s.path.iter().map(|i| i - 1).collect();
        let mut seen = idx.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), s.k + 1);
        assert_eq!(d.path_weight(&idx).unwrap().weight, s.weight_scalar);
    }

    #[test]
    fn shifts_have_unit_paths() {
        for name in ["backward_shift", "forward_shift"] {
            let o = gallery(name, &Params::new()).unwrap();
            let s = simple_path_sup(&o, 64, 40, PathMode::Exact).unwrap();
            assert_eq!((s.weight, s.exact, s.method), (1.0, true, "dag_dp"));
            check_path(&o.truncate(64).unwrap().matrix, &s);
        }
    }

    #[test]
    fn star_has_no_long_paths() {
        let o = gallery("star_means", &Params::new()).unwrap();
        let s = simple_path_sup(&o, 12, 3, PathMode::Exact).unwrap();
        assert_eq!(s.weight, 0.0);
        let s2 = simple_path_sup(&o, 12, 2, PathMode::Exact).unwrap();
        assert!((s2.weight - (11.0f64 / 12.0) * (10.0 / 11.0)).abs() < 1e-15);
        assert!(simple_path_sup(&o, 64, 3, PathMode::Exact).is_err());
        let e = r_prime_estimate(&o, 64, &[4, 8, 16], PathMode::Auto, 1e-6).unwrap();
        assert_eq!((e.lower, e.upper), (0.0, Some(0.0)));
    }

    #[test]
    fn kakutani_proxy() {
        let o = gallery("kakutani", &Params::new()).unwrap();
        let e = r_prime_estimate(&o, 2048, &[256, 512, 1024], PathMode::Exact, 1e-6).unwrap();
        assert!((e.lower - (-255.0f64 / 256.0).exp2()).abs() < 1e-12);
        assert!((e.schedule[2].value - (-1023.0f64 / 1024.0).exp2()).abs() < 1e-12);
        assert!(!e.certified);
    }

    #[test]
    fn invalid_lengths() {
        let o = gallery("backward_shift", &Params::new()).unwrap();
        assert!(simple_path_sup(&o, 8, 8, PathMode::Auto).is_err());
        assert!(simple_path_sup(&o, 8, 0, PathMode::Auto).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn exact_modes_match_enumeration(
            n in 2usize..7,
            k in 1usize..6,
            vals in proptest::collection::vec(prop_oneof![Just(0.0), 0.1f64..3.0], 49),
        ) {
            let k = k.min(n - 1);
            let d = FiniteMaxMatrix::from_fn(n, |i, j| vals[i * 7 + j]);
            let a = SparseMaxMatrix::from_dense(&d);
            let s = window_path_sup(&a, k, PathMode::Exact).unwrap();
            prop_assert_eq!(s.weight_scalar, brute(&d, k));
            if !s.path.is_empty() {
                check_path(&a, &s);
            }
            let h = window_path_sup(&a, k, PathMode::Heuristic).unwrap();
            prop_assert!(h.weight_scalar <= s.weight_scalar);
        }
    }
}
