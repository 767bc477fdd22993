//! Exact spectral quantities of finite nonnegative matrices.
//!
//! The spectral radius equals the maximum cycle geometric mean, computed per
//! strongly connected class with Karp's dynamic program on `log2` weights.
//! The reported value is always the exact geometric mean of a concrete cycle,
//! so every radius comes with a [`CycleWitness`] that can be re-evaluated.

use serde::Serialize;

use crate::blockform;
use crate::error::{MaxError, Result};
use crate::graph;
use crate::matrix::{log_close, FiniteMaxMatrix, MaxVector, SparseMaxMatrix};
use crate::scalar::MaxScalar;

/// A cycle `i_1, ..., i_k, i_1` in the path-weight orientation: consecutive
/// indices `p, q` contribute the factor `a_{q p}`. Indices are 0-based and
/// rotated so that the smallest comes first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleWitness {
    pub indices: Vec<usize>,
    pub geometric_mean: MaxScalar,
    pub length: usize,
}

impl CycleWitness {
    /// Product of the cycle's entries.
    pub fn weight(&self) -> MaxScalar {
        self.geometric_mean.powi(self.length as u64)
    }

    /// The closed index sequence `i_1, ..., i_k, i_1`.
    pub fn closed(&self) -> Vec<usize> {
        let mut c = self.indices.clone();
        c.push(self.indices[0]);
        c
    }

    /// Checks distinctness and recomputes the weight against `a`.
    pub fn verify(&self, a: &FiniteMaxMatrix, tol: f64) -> bool {
        let mut seen = self.indices.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.indices.len() || self.length != self.indices.len() || self.length == 0 {
            return false;
        }
        match a.path_weight(&self.closed()) {
            Ok(p) => !p.weight.is_zero() && log_close(p.weight, self.weight(), tol),
            Err(_) => false,
        }
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }
}

/// Builds a witness from a cycle given along digraph edges `c_0 -> c_1 -> ... -> c_0`.
fn witness_from_digraph_cycle(a: &SparseMaxMatrix, cyc: &[usize]) -> CycleWitness {
    let k = cyc.len();
    let weight = (0..k).fold(MaxScalar::ONE, |w, t| w.mul(a.get(cyc[t], cyc[(t + 1) % k])));
    let mut indices: Vec<usize> = cyc.iter().rev().copied().collect();
    let start = (0..k).min_by_key(|&p| indices[p]).unwrap_or(0);
    indices.rotate_left(start);
    CycleWitness { indices, geometric_mean: weight.root(k), length: k }
}

/// Splits a walk into the simple cycles it closes.
fn walk_cycles(walk: &[usize], n: usize, out: &mut Vec<Vec<usize>>) {
    let mut pos = vec![usize::MAX; n];
    let mut stack: Vec<usize> = Vec::with_capacity(walk.len());
    for &v in walk {
        if pos[v] != usize::MAX {
            let p = pos[v];
            let cyc: Vec<usize> = stack.drain(p..).collect();
            for &u in &cyc {
                pos[u] = usize::MAX;
            }
            out.push(cyc);
        }
        pos[v] = stack.len();
        stack.push(v);
    }
}

/// Maximum cycle geometric mean of the principal submatrix on `class`, which
/// should be strongly connected (sorted global indices). Zero with no witness
/// for a trivial class.
pub fn class_radius(a: &SparseMaxMatrix, class: &[usize]) -> (MaxScalar, Option<CycleWitness>) {
    match class.len() {
        0 => return (MaxScalar::ZERO, None),
        1 => {
            let v = class[0];
            let w = a.get(v, v);
            if w.is_zero() {
                return (MaxScalar::ZERO, None);
            }
            return (w, Some(CycleWitness { indices: vec![v], geometric_mean: w, length: 1 }));
        }
        _ => {}
    }
    let m = class.len();
    let local = a.restrict(class);
    let edges: Vec<(usize, usize, f64)> = (0..m)
        .flat_map(|u| local.row(u).iter().map(move |&(w, x)| (u, w, x.log2())))
        .collect();

    let neg = f64::NEG_INFINITY;
    let mut d = vec![neg; (m + 1) * m];
    let mut parent = vec![u32::MAX; (m + 1) * m];
    d[0] = 0.0;
    for k in 1..=m {
        let (prev, cur) = d.split_at_mut(k * m);
        let prev = &prev[(k - 1) * m..];
        let cur = &mut cur[..m];
        for &(u, w, l) in &edges {
            if prev[u] == neg {
                continue;
            }
            let cand = prev[u] + l;
            if cand > cur[w] {
                cur[w] = cand;
                parent[k * m + w] = u as u32;
            }
        }
    }

    let mut lambda = neg;
    let mut vals = vec![neg; m];
    for v in 0..m {
        let dm = d[m * m + v];
        if dm == neg {
            continue;
        }
        let mut worst = f64::INFINITY;
        for k in 0..m {
            let dk = d[k * m + v];
            if dk != neg {
                worst = worst.min((dm - dk) / (m - k) as f64);
            }
        }
        vals[v] = worst;
        lambda = lambda.max(worst);
    }
    if lambda == neg {
        return (MaxScalar::ZERO, None);
    }

    let slack = 1e-9 * lambda.abs().max(1.0);
    let mut cycles = Vec::new();
    for v in 0..m {
        if vals[v] < lambda - slack {
            continue;
        }
        let mut walk = vec![0usize; m + 1];
        walk[m] = v;
        for k in (1..=m).rev() {
            walk[k - 1] = parent[k * m + walk[k]] as usize;
        }
        walk_cycles(&walk, m, &mut cycles);
    }

    let best = cycles
        .iter()
        .map(|c| {
            let global: Vec<usize> = c.iter().map(|&p| class[p]).collect();
            witness_from_digraph_cycle(a, &global)
        })
        .max_by(|x, y| x.geometric_mean.cmp(&y.geometric_mean).then_with(|| y.indices.cmp(&x.indices)));
    match best {
        Some(w) => (w.geometric_mean, Some(w)),
        None => (MaxScalar::from_log2(lambda), None),
    }
}

/// Picks the better of two class results: larger mean, then smaller witness.
pub(crate) fn better(
    x: (MaxScalar, Option<CycleWitness>),
    y: (MaxScalar, Option<CycleWitness>),
) -> (MaxScalar, Option<CycleWitness>) {
    use std::cmp::Ordering::*;
    match x.0.cmp(&y.0) {
        Greater => x,
        Less => y,
        Equal => match (&x.1, &y.1) {
            (Some(a), Some(b)) if b.indices < a.indices => y,
            (None, Some(_)) => y,
            _ => x,
        },
    }
}

/// `μ(A)` on a sparse matrix together with a critical cycle.
pub fn max_cycle_geom_mean_sparse(a: &SparseMaxMatrix) -> (MaxScalar, Option<CycleWitness>) {
    let comps = graph::tarjan(&graph::successors(a));
    comps
        .iter()
        .map(|c| class_radius(a, c))
        .fold((MaxScalar::ZERO, None), better)
}

/// `μ(A)`, which equals `r(A)` for finite matrices, with a critical cycle.
pub fn max_cycle_geom_mean(a: &FiniteMaxMatrix) -> (MaxScalar, Option<CycleWitness>) {
    max_cycle_geom_mean_sparse(&SparseMaxMatrix::from_dense(a))
}

pub fn radius_finite(a: &FiniteMaxMatrix) -> MaxScalar {
    max_cycle_geom_mean(a).0
}

/// `r_{e_j}(A)`: the largest class radius among classes from which `j` is reachable.
pub fn local_radius_finite(a: &FiniteMaxMatrix, j: usize) -> Result<MaxScalar> {
    if j >= a.n() {
        return Err(MaxError::IndexOutOfRange { index: j + 1, dim: a.n() });
    }
    Ok(local_radius_sparse(&SparseMaxMatrix::from_dense(a), j))
}

pub fn local_radius_sparse(a: &SparseMaxMatrix, j: usize) -> MaxScalar {
    let anc = graph::ancestors(a, j);
    let sub = a.restrict(&anc);
    graph::tarjan(&graph::successors(&sub))
        .iter()
        .map(|c| {
            let global: Vec<usize> = c.iter().map(|&p| anc[p]).collect();
            class_radius(a, &global).0
        })
        .fold(MaxScalar::ZERO, MaxScalar::max)
}

/// All local radii `r_{e_1}, ..., r_{e_n}`.
pub fn local_radii(a: &FiniteMaxMatrix) -> Vec<MaxScalar> {
    blockform::access_radii_sparse(&SparseMaxMatrix::from_dense(a))
}

/// Distinct local radii in decreasing order.
pub fn point_spectrum_finite(a: &FiniteMaxMatrix) -> Vec<MaxScalar> {
    distinct_desc(local_radii(a))
}

fn distinct_desc(mut v: Vec<MaxScalar>) -> Vec<MaxScalar> {
    v.sort_unstable_by(|x, y| y.cmp(x));
    v.dedup();
    v
}

/// An eigenvector `x != 0` with `A ⊗ x = t x`.
pub fn eigvec_finite(a: &FiniteMaxMatrix, t: MaxScalar) -> Result<MaxVector> {
    let n = a.n();
    let sparse = SparseMaxMatrix::from_dense(a);
    if t.is_zero() {
        return match (0..n).find(|&j| sparse.col(j).is_empty()) {
            Some(j) => Ok(MaxVector::basis(n, j)),
            None => Err(MaxError::Precondition("0 is not an eigenvalue: no zero column".into())),
        };
    }
    let radii = blockform::access_radii_sparse(&sparse);
    let t = radii
        .iter()
        .copied()
        .find(|&r| log_close(r, t, 1e-12))
        .ok_or_else(|| MaxError::Precondition(format!("{t} is not in the point spectrum")))?;

    let comps = graph::tarjan(&graph::successors(&sparse));
    let lab = graph::labels(n, &comps);
    let mut start: Option<usize> = None;
    let mut best_min = usize::MAX;
    for c in &comps {
        if radii[c[0]] != t || c[0] >= best_min {
            continue;
        }
        let (r, w) = class_radius(&sparse, c);
        if r == t {
            if let Some(w) = w {
                best_min = c[0];
                start = Some(w.indices[0]);
            }
        }
    }
    let i0 = start.ok_or_else(|| MaxError::Precondition("no critical class for the eigenvalue".into()))?;
    debug_assert!(lab[i0] < comps.len());

    let inside: Vec<usize> = (0..n).filter(|&j| radii[j] <= t).collect();
    let mut pos = vec![usize::MAX; n];
    for (p, &j) in inside.iter().enumerate() {
        pos[j] = p;
    }
    let scaled = SparseMaxMatrix::from_triplets(
        inside.len(),
        inside
            .iter()
            .flat_map(|&i| {
                let pos = &pos;
                sparse.row(i).iter().filter(move |&&(j, _)| pos[j] != usize::MAX).map(move |&(j, v)| (pos[i], pos[j], v.div(t)))
            })
            .collect::<Vec<_>>(),
    );
    let mut y = MaxVector::basis(inside.len(), pos[i0]);
    let mut acc = y.clone();
    for _ in 1..inside.len() {
        y = scaled.mat_vec(&y);
        acc = acc.oplus(&y);
    }
    let mut x = MaxVector::zeros(n);
    for (p, &j) in inside.iter().enumerate() {
        x.0[j] = acc.0[p];
    }
    Ok(x)
}

/// `s(A)`: the smallest column maximum.
pub fn min_modulus(a: &FiniteMaxMatrix) -> MaxScalar {
    (0..a.n()).map(|j| a.column(j).norm()).min().unwrap_or(MaxScalar::ZERO)
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerSpectralRadius {
    /// `s(A^K)^{1/K}`.
    pub value: MaxScalar,
    /// `s(A^k)^{1/k}` for `k = 1..=K`.
    pub sequence: Vec<MaxScalar>,
}

/// Finite-`K` value of `d(A) = lim s(A^k)^{1/k}`.
pub fn lower_spectral_radius(a: &FiniteMaxMatrix, k_max: usize) -> Result<LowerSpectralRadius> {
    if k_max == 0 {
        return Err(MaxError::InvalidParam("K must be at least 1".into()));
    }
    let mut p = a.clone();
    let mut sequence = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k > 1 {
            p = p.otimes(a)?;
        }
        sequence.push(min_modulus(&p).root(k));
    }
    Ok(LowerSpectralRadius { value: *sequence.last().expect("K >= 1"), sequence })
}

/// Cycle time vector `χ(A)`, with `χ(A)_j = r_{e_j}(A^T)`.
pub fn cycle_time_vector(a: &FiniteMaxMatrix) -> MaxVector {
    MaxVector(blockform::access_radii_sparse(&SparseMaxMatrix::from_dense(a).transpose()))
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteSpectrum {
    pub radius: MaxScalar,
    pub mu: MaxScalar,
    pub local_radii: Vec<MaxScalar>,
    pub point_spectrum: Vec<MaxScalar>,
    pub critical_witness: Option<CycleWitness>,
}

pub fn finite_spectrum(a: &FiniteMaxMatrix) -> FiniteSpectrum {
    let (mu, critical_witness) = max_cycle_geom_mean(a);
    let local_radii = local_radii(a);
    FiniteSpectrum {
        radius: mu,
        mu,
        point_spectrum: distinct_desc(local_radii.clone()),
        local_radii,
        critical_witness,
    }
}
