//! Condensation, Frobenius normal form and level decomposition.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{MaxError, Result};
use crate::graph;
use crate::matrix::{FiniteMaxMatrix, SparseMaxMatrix};
use crate::oracle::MatrixOracle;
use crate::scalar::MaxScalar;
use crate::spectral::{class_radius, CycleWitness};

/// Strongly connected classes and the reduced digraph between them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condensation {
    /// Classes in canonical order, each sorted.
    pub classes: Vec<Vec<usize>>,
    /// `(μ, ν)` when some `a_kj > 0` with `k` in class `μ` and `j` in class `ν`.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    pub value: MaxScalar,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockDecomposition {
    /// `permutation[p]` is the original index placed at position `p`.
    pub permutation: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    pub class_radii: Vec<MaxScalar>,
    pub class_witnesses: Vec<Option<CycleWitness>>,
    /// Single node without a self-loop.
    pub trivial: Vec<bool>,
    pub levels: Vec<Level>,
    pub condensation_edges: Vec<(usize, usize)>,
}

/// Orders classes so that every condensation edge points to an earlier class,
/// choosing the class with the smallest member whenever several are ready.
fn canonical_order(comps: Vec<Vec<usize>>, adj: &[Vec<usize>], n: usize) -> Condensation {
    let lab = graph::labels(n, &comps);
    let raw = graph::condensation(adj, &lab);
    let c = comps.len();
    let mut pending = vec![0usize; c];
    let mut preds = vec![Vec::new(); c];
    for &(u, v) in &raw {
        pending[u] += 1;
        preds[v].push(u);
    }
    let mut ready: BTreeSet<(usize, usize)> =
        (0..c).filter(|&u| pending[u] == 0).map(|u| (comps[u][0], u)).collect();
    let mut order = Vec::with_capacity(c);
    while let Some(&first) = ready.iter().next() {
        ready.remove(&first);
        let u = first.1;
        order.push(u);
        for &p in &preds[u] {
            pending[p] -= 1;
            if pending[p] == 0 {
                ready.insert((comps[p][0], p));
            }
        }
    }
    let mut rank = vec![0usize; c];
    for (pos, &u) in order.iter().enumerate() {
        rank[u] = pos;
    }
    let mut edges: Vec<(usize, usize)> = raw.iter().map(|&(u, v)| (rank[u], rank[v])).collect();
    edges.sort_unstable();
    let classes = order.into_iter().map(|u| comps[u].clone()).collect();
    Condensation { classes, edges }
}

pub fn scc_condensation_sparse(a: &SparseMaxMatrix) -> Condensation {
    let adj = graph::successors(a);
    let comps = graph::tarjan(&adj);
    canonical_order(comps, &adj, a.n())
}

pub fn scc_condensation(a: &FiniteMaxMatrix) -> Condensation {
    scc_condensation_sparse(&SparseMaxMatrix::from_dense(a))
}

/// Local radii of all nodes by propagating class radii along the reduced digraph.
pub fn access_radii_sparse(a: &SparseMaxMatrix) -> Vec<MaxScalar> {
    let adj = graph::successors(a);
    let comps = graph::tarjan(&adj);
    let lab = graph::labels(a.n(), &comps);
    let radii: Vec<MaxScalar> = comps.par_iter().map(|c| class_radius(a, c).0).collect();
    let mut succ = vec![Vec::new(); comps.len()];
    for (u, v) in graph::condensation(&adj, &lab) {
        succ[u].push(v);
    }
    // tarjan lists every class after all classes it reaches
    let mut reach = radii;
    for u in (0..comps.len()).rev() {
        for &v in &succ[u] {
            reach[v] = reach[v].max(reach[u]);
        }
    }
    (0..a.n()).map(|j| reach[lab[j]]).collect()
}

pub fn access_radii(a: &FiniteMaxMatrix) -> Vec<MaxScalar> {
    access_radii_sparse(&SparseMaxMatrix::from_dense(a))
}

/// `r_{e_j}(A)` as the largest radius of a class accessing `j`.
pub fn access_radius(a: &FiniteMaxMatrix, j: usize) -> Result<MaxScalar> {
    if j >= a.n() {
        return Err(MaxError::IndexOutOfRange { index: j + 1, dim: a.n() });
    }
    Ok(access_radii(a)[j])
}

/// Groups indices by local radius, in strictly decreasing order of value.
pub fn levels_from_radii(radii: &[MaxScalar]) -> Vec<Level> {
    let mut values: Vec<MaxScalar> = radii.to_vec();
    values.sort_unstable_by(|x, y| y.cmp(x));
    values.dedup();
    values
        .into_iter()
        .map(|value| Level { value, indices: (0..radii.len()).filter(|&j| radii[j] == value).collect() })
        .collect()
}

pub fn level_decomposition(a: &FiniteMaxMatrix) -> Vec<Level> {
    levels_from_radii(&access_radii(a))
}

pub fn fnf_sparse(a: &SparseMaxMatrix) -> BlockDecomposition {
    let cond = scc_condensation_sparse(a);
    let per_class: Vec<(MaxScalar, Option<CycleWitness>)> =
        cond.classes.par_iter().map(|c| class_radius(a, c)).collect();
    let trivial = cond.classes.iter().map(|c| c.len() == 1 && a.get(c[0], c[0]).is_zero()).collect();
    let (class_radii, class_witnesses) = per_class.into_iter().unzip();
    BlockDecomposition {
        permutation: cond.classes.iter().flatten().copied().collect(),
        levels: levels_from_radii(&access_radii_sparse(a)),
        classes: cond.classes,
        class_radii,
        class_witnesses,
        trivial,
        condensation_edges: cond.edges,
    }
}

/// Frobenius normal form: a permutation making the matrix block lower triangular
/// with irreducible diagonal blocks.
pub fn fnf(a: &FiniteMaxMatrix) -> BlockDecomposition {
    fnf_sparse(&SparseMaxMatrix::from_dense(a))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockCheck {
    pub ok: bool,
    /// First nonzero entry `(i, j)` above the diagonal blocks (original indices).
    pub violation: Option<(usize, usize)>,
    /// First block whose digraph is not strongly connected.
    pub reducible_block: Option<usize>,
}

/// Checks that `classes`, read in order, put `a` in block lower triangular form
/// with strongly connected diagonal blocks.
pub fn verify_block_form(a: &FiniteMaxMatrix, classes: &[Vec<usize>]) -> Result<BlockCheck> {
    let n = a.n();
    let mut block = vec![usize::MAX; n];
    for (b, c) in classes.iter().enumerate() {
        if c.is_empty() {
            return Err(MaxError::Precondition(format!("block {b} is empty")));
        }
        for &i in c {
            if i >= n {
                return Err(MaxError::IndexOutOfRange { index: i + 1, dim: n });
            }
            if block[i] != usize::MAX {
                return Err(MaxError::Precondition(format!("index {} appears twice", i + 1)));
            }
            block[i] = b;
        }
    }
    if let Some(i) = block.iter().position(|&b| b == usize::MAX) {
        return Err(MaxError::Precondition(format!("index {} is not covered", i + 1)));
    }
    let order: Vec<usize> = classes.iter().flatten().copied().collect();
    let violation = order
        .iter()
        .flat_map(|&i| order.iter().map(move |&j| (i, j)))
        .find(|&(i, j)| block[i] < block[j] && !a.get(i, j).is_zero());
    let sparse = SparseMaxMatrix::from_dense(a);
    let reducible_block = classes.iter().position(|c| {
        let sub = sparse.restrict(&{
            let mut s = c.clone();
            s.sort_unstable();
            s
        });
        graph::tarjan(&graph::successors(&sub)).len() != 1
    });
    Ok(BlockCheck { ok: violation.is_none() && reducible_block.is_none(), violation, reducible_block })
}

/// Levels of a leading window of an oracle; indices are 1-based.
#[derive(Clone, Debug, Serialize)]
pub struct WindowLevels {
    #[serde(rename = "N")]
    pub n_window: usize,
    /// Values are lower bounds of the true level values.
    pub levels: Vec<WindowLevel>,
    /// First index of the tail block `N+1, N+2, ...`, never decomposed.
    pub tail_from: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowLevel {
    pub value: f64,
    pub indices: Vec<usize>,
}

pub fn window_levels(o: &MatrixOracle, n_window: usize) -> Result<WindowLevels> {
    let a = o.truncate(n_window)?.matrix;
    let levels = levels_from_radii(&access_radii_sparse(&a))
        .into_iter()
        .map(|l| WindowLevel { value: l.value.to_f64(), indices: l.indices.iter().map(|i| i + 1).collect() })
        .collect();
    Ok(WindowLevels { n_window, levels, tail_from: n_window + 1 })
}
