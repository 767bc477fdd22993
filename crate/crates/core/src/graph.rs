//! Digraph utilities: the associated digraph has an edge `i -> j` iff `a_ij > 0`.

use std::collections::BTreeSet;

use crate::matrix::SparseMaxMatrix;

/// Successor lists of the associated digraph.
pub fn successors(a: &SparseMaxMatrix) -> Vec<Vec<usize>> {
    (0..a.n()).map(|i| a.row(i).iter().map(|e| e.0).collect()).collect()
}

/// Strongly connected components, each sorted, listed in the order Tarjan's
/// algorithm completes them (every edge between components points from a
/// later component to an earlier one).
pub fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0usize;
    // explicit call stack of (node, next successor position)
    let mut calls: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        calls.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Component label per node for a list of components.
pub fn labels(n: usize, comps: &[Vec<usize>]) -> Vec<usize> {
    let mut lab = vec![usize::MAX; n];
    for (c, comp) in comps.iter().enumerate() {
        for &v in comp {
            lab[v] = c;
        }
    }
    lab
}

/// Edges `(c, d)` with `c != d` of the condensation, sorted and deduplicated.
pub fn condensation(adj: &[Vec<usize>], lab: &[usize]) -> Vec<(usize, usize)> {
    let mut set = BTreeSet::new();
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            if lab[v] != lab[w] {
                set.insert((lab[v], lab[w]));
            }
        }
    }
    set.into_iter().collect()
}

/// Nodes from which `target` can be reached (including `target`), sorted.
pub fn ancestors(a: &SparseMaxMatrix, target: usize) -> Vec<usize> {
    let mut seen = vec![false; a.n()];
    let mut queue = vec![target];
    seen[target] = true;
    while let Some(v) = queue.pop() {
        for &(u, _) in a.col(v) {
            if !seen[u] {
                seen[u] = true;
                queue.push(u);
            }
        }
    }
    (0..a.n()).filter(|&v| seen[v]).collect()
}

/// Whether the digraph has no cycle other than self-loops.
pub fn acyclic_modulo_loops(adj: &[Vec<usize>]) -> bool {
    tarjan(adj).iter().all(|c| c.len() == 1)
}
