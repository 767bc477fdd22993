//! Dense and sparse max-times matrices, vectors and path weights.
//!
//! Indices are 0-based in the Rust API. The JSON formats use 1-based indices.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{MaxError, Result};
use crate::scalar::MaxScalar;

/// Nonnegative vector over the max-times semiring.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MaxVector(pub Vec<MaxScalar>);

impl MaxVector {
    pub fn zeros(n: usize) -> Self {
        MaxVector(vec![MaxScalar::ZERO; n])
    }

    pub fn ones(n: usize) -> Self {
        MaxVector(vec![MaxScalar::ONE; n])
    }

    /// Standard basis vector `e_j`.
    pub fn basis(n: usize, j: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[j] = MaxScalar::ONE;
        v
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                MaxScalar::new(x).ok_or(MaxError::InvalidEntry { row: i + 1, col: 1, value: x })
            })
            .collect::<Result<Vec<_>>>()
            .map(MaxVector)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> MaxScalar {
        self.0.iter().copied().fold(MaxScalar::ZERO, MaxScalar::max)
    }

    pub fn scale(&self, c: MaxScalar) -> Self {
        MaxVector(self.0.iter().map(|x| x.mul(c)).collect())
    }

    pub fn oplus(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        MaxVector(self.0.iter().zip(&other.0).map(|(&a, &b)| a.max(b)).collect())
    }

    /// `max_i |x_i - y_i|`.
    pub fn sup_distance(&self, other: &Self) -> MaxScalar {
        assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .fold(MaxScalar::ZERO, MaxScalar::max)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|x| x.to_f64()).collect()
    }
}

/// Dense `n x n` nonnegative matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteMaxMatrix {
    n: usize,
    data: Vec<MaxScalar>,
}

impl std::fmt::Debug for FiniteMaxMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "FiniteMaxMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl FiniteMaxMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be positive");
        FiniteMaxMatrix { n, data: vec![MaxScalar::ZERO; n * n] }
    }

    /// The ⊗-identity: ones on the diagonal.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, MaxScalar::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(MaxError::Precondition("matrix must have at least one row".into()));
        }
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MaxError::DimensionMismatch { left: n, right: row.len() });
            }
            for (j, &x) in row.iter().enumerate() {
                let v = MaxScalar::new(x).ok_or(MaxError::InvalidEntry { row: i + 1, col: j + 1, value: x })?;
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, MaxScalar::from_f64(f(i, j)));
            }
        }
        m
    }

    pub fn from_scalar_fn(n: usize, mut f: impl FnMut(usize, usize) -> MaxScalar) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> MaxScalar {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: MaxScalar) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[MaxScalar] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> MaxVector {
        MaxVector((0..self.n).map(|i| self.get(i, j)).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).iter().map(|x| x.to_f64()).collect()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, MaxScalar)> + '_ {
        self.data.iter().enumerate().map(move |(k, &v)| (k / self.n, k % self.n, v))
    }

    pub fn transpose(&self) -> Self {
        Self::from_scalar_fn(self.n, |i, j| self.get(j, i))
    }

    /// `P A P^T` where `perm[p]` is the original index placed at position `p`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        Self::from_scalar_fn(self.n, |p, q| self.get(perm[p], perm[q]))
    }

    /// Principal submatrix on `indices` (in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self::from_scalar_fn(indices.len(), |p, q| self.get(indices[p], indices[q]))
    }

    /// Entrywise ordinary product with `c > 0`.
    pub fn scale(&self, c: MaxScalar) -> Self {
        FiniteMaxMatrix { n: self.n, data: self.data.iter().map(|x| x.mul(c)).collect() }
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.n != other {
            return Err(MaxError::DimensionMismatch { left: self.n, right: other });
        }
        Ok(())
    }

    /// Entrywise maximum.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        Ok(FiniteMaxMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a.max(b)).collect(),
        })
    }

    /// `(A ⊗ B)_ij = max_k a_ik b_kj`.
    pub fn otimes(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.mul(other.get(k, j));
                    if v > out.get(i, j) {
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(A ⊗ x)_i = max_j a_ij x_j`.
    pub fn mat_vec(&self, x: &MaxVector) -> Result<MaxVector> {
        self.check_dim(x.len())?;
        Ok(MaxVector(
            (0..self.n)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(&x.0)
                        .map(|(a, b)| a.mul(*b))
                        .fold(MaxScalar::ZERO, MaxScalar::max)
                })
                .collect(),
        ))
    }

    /// k-th max power by repeated squaring; `k = 0` gives the identity.
    pub fn power(&self, k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.otimes(&base).expect("same dimension");
            }
            k >>= 1;
            if k > 0 {
                base = base.otimes(&base).expect("same dimension");
            }
        }
        acc
    }

    /// `‖A‖ = max_ij a_ij`.
    pub fn norm(&self) -> MaxScalar {
        self.data.iter().copied().fold(MaxScalar::ZERO, MaxScalar::max)
    }

    /// `max_ij |a_ij - b_ij|`.
    pub fn distance(&self, other: &Self) -> Result<MaxScalar> {
        self.check_dim(other.n)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.abs_diff(*b))
            .fold(MaxScalar::ZERO, MaxScalar::max))
    }

    /// Weight `A(i_k, ..., i_0) = prod_t a_{i_{t+1} i_t}` of the walk `indices = [i_0, ..., i_k]`.
    pub fn path_weight(&self, indices: &[usize]) -> Result<PathWitness> {
        if indices.is_empty() {
            return Err(MaxError::Precondition("a path needs at least one index".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(MaxError::IndexOutOfRange { index: bad, dim: self.n });
        }
        let weight = indices
            .windows(2)
            .fold(MaxScalar::ONE, |w, step| w.mul(self.get(step[1], step[0])));
        Ok(PathWitness { indices: indices.to_vec(), weight })
    }

    /// `‖A^k‖^{1/k}` for `k = 1..=kmax`; every term bounds the spectral radius from above.
    pub fn pow_norm_seq(&self, kmax: usize) -> Vec<MaxScalar> {
        let sparse = SparseMaxMatrix::from_dense(self);
        sparse.pow_norm_table(kmax).into_iter().enumerate().map(|(k, v)| v.root(k + 1)).collect()
    }

    /// Whether every entry of `self` is `<=` the matching entry of `other`.
    pub fn le(&self, other: &Self) -> bool {
        self.n == other.n && self.data.iter().zip(&other.data).all(|(a, b)| a <= b)
    }
}

/// A walk `i_0, ..., i_k` together with its weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathWitness {
    pub indices: Vec<usize>,
    pub weight: MaxScalar,
}

impl PathWitness {
    pub fn len(&self) -> usize {
        self.indices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Recomputes the weight against `a` and compares in log domain.
    pub fn verify(&self, a: &FiniteMaxMatrix, tol: f64) -> bool {
        match a.path_weight(&self.indices) {
            Ok(p) => log_close(p.weight, self.weight, tol),
            Err(_) => false,
        }
    }
}

/// Log-domain agreement: both zero, or `|log a - log b| <= tol * max(1, |log a|)`.
pub fn log_close(a: MaxScalar, b: MaxScalar, tol: f64) -> bool {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => true,
        (false, false) => {
            let (la, lb) = (a.log2(), b.log2());
            (la - lb).abs() <= tol * la.abs().max(1.0)
        }
        _ => false,
    }
}

/// Row and column adjacency lists of the nonzero entries of a square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMaxMatrix {
    n: usize,
    rows: Vec<Vec<(usize, MaxScalar)>>,
    cols: Vec<Vec<(usize, MaxScalar)>>,
}

impl SparseMaxMatrix {
    /// Builds from `(row, col, value)` triplets; zero values are dropped, later duplicates win.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, MaxScalar)>) -> Self {
        let mut rows: Vec<Vec<(usize, MaxScalar)>> = vec![Vec::new(); n];
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside dimension {n}");
            if v.is_zero() {
                continue;
            }
            rows[i].push((j, v));
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
            row.dedup_by(|later, earlier| {
                if later.0 == earlier.0 {
                    earlier.1 = later.1;
                    true
                } else {
                    false
                }
            });
        }
        let mut cols: Vec<Vec<(usize, MaxScalar)>> = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                cols[j].push((i, v));
            }
        }
        SparseMaxMatrix { n, rows, cols }
    }

    pub fn from_dense(a: &FiniteMaxMatrix) -> Self {
        Self::from_triplets(a.n(), a.entries().filter(|e| !e.2.is_zero()))
    }

    pub fn to_dense(&self) -> FiniteMaxMatrix {
        let mut m = FiniteMaxMatrix::zeros(self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Nonzeros `(j, a_ij)` of row `i`.
    pub fn row(&self, i: usize) -> &[(usize, MaxScalar)] {
        &self.rows[i]
    }

    /// Nonzeros `(i, a_ij)` of column `j`.
    pub fn col(&self, j: usize) -> &[(usize, MaxScalar)] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> MaxScalar {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|p| self.rows[i][p].1)
            .unwrap_or(MaxScalar::ZERO)
    }

    pub fn norm(&self) -> MaxScalar {
        self.rows.iter().flatten().map(|e| e.1).fold(MaxScalar::ZERO, MaxScalar::max)
    }

    pub fn transpose(&self) -> Self {
        SparseMaxMatrix { n: self.n, rows: self.cols.clone(), cols: self.rows.clone() }
    }

    pub fn mat_vec(&self, x: &MaxVector) -> MaxVector {
        assert_eq!(x.len(), self.n);
        MaxVector(
            self.rows
                .iter()
                .map(|row| row.iter().map(|&(j, a)| a.mul(x.0[j])).fold(MaxScalar::ZERO, MaxScalar::max))
                .collect(),
        )
    }

    /// `‖A^k‖` for `k = 1..=kmax`, computed as `‖A^k ⊗ 1‖`.
    pub fn pow_norm_table(&self, kmax: usize) -> Vec<MaxScalar> {
        let mut x = MaxVector::ones(self.n);
        let mut out = Vec::with_capacity(kmax);
        for _ in 0..kmax {
            x = self.mat_vec(&x);
            out.push(x.norm());
        }
        out
    }

    /// Principal submatrix on sorted `indices`, renumbered `0..indices.len()`.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (p, &i) in indices.iter().enumerate() {
            pos[i] = p;
        }
        let trip = indices.iter().enumerate().flat_map(|(p, &i)| {
            let pos = &pos;
            self.rows[i].iter().filter_map(move |&(j, v)| (pos[j] != usize::MAX).then_some((p, pos[j], v)))
        });
        Self::from_triplets(indices.len(), trip.collect::<Vec<_>>())
    }
}

/// JSON form of a finite matrix: dense rows or 1-based sparse triplets.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Dense { n: usize, entries: Vec<Vec<f64>> },
    Sparse { n: usize, triplets: Vec<(usize, usize, f64)> },
}

impl MatrixJson {
    pub fn into_matrix(self) -> Result<FiniteMaxMatrix> {
        match self {
            MatrixJson::Dense { n, entries } => {
                if entries.len() != n {
                    return Err(MaxError::DimensionMismatch { left: n, right: entries.len() });
                }
                FiniteMaxMatrix::from_rows(&entries)
            }
            MatrixJson::Sparse { n, triplets } => {
                if n == 0 {
                    return Err(MaxError::Precondition("matrix dimension must be positive".into()));
                }
                let mut m = FiniteMaxMatrix::zeros(n);
                let mut seen = BTreeSet::new();
                for (i, j, x) in triplets {
                    if i == 0 || i > n {
                        return Err(MaxError::IndexOutOfRange { index: i, dim: n });
                    }
                    if j == 0 || j > n {
                        return Err(MaxError::IndexOutOfRange { index: j, dim: n });
                    }
                    if !seen.insert((i, j)) {
                        return Err(MaxError::Parse(format!("duplicate triplet entry ({i}, {j})")));
                    }
                    let v = MaxScalar::new(x).ok_or(MaxError::InvalidEntry { row: i, col: j, value: x })?;
                    m.set(i - 1, j - 1, v);
                }
                Ok(m)
            }
        }
    }

    pub fn from_matrix(a: &FiniteMaxMatrix) -> Self {
        MatrixJson::Dense { n: a.n(), entries: a.to_rows() }
    }
}

impl FiniteMaxMatrix {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<MatrixJson>(text)?.into_matrix()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson::from_matrix(self)).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> FiniteMaxMatrix {
        FiniteMaxMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn backward_shift(n: usize) -> FiniteMaxMatrix {
        FiniteMaxMatrix::from_fn(n, |i, j| if j == i + 1 { 1.0 } else { 0.0 })
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = FiniteMaxMatrix> {
        proptest::collection::vec(prop_oneof![Just(0.0), 0.1f64..10.0], n * n)
            .prop_map(move |v| FiniteMaxMatrix::from_fn(n, |i, j| v[i * n + j]))
    }

    #[test]
    fn oplus_examples() {
        let a = m(&[&[1.0, 2.0], &[3.0, 0.0]]);
        let b = m(&[&[0.0, 5.0], &[1.0, 1.0]]);
        assert_eq!(a.oplus(&b).unwrap(), m(&[&[1.0, 5.0], &[3.0, 1.0]]));
        assert_eq!(a.oplus(&FiniteMaxMatrix::zeros(2)).unwrap(), a);
        assert!(a.oplus(&FiniteMaxMatrix::zeros(3)).is_err());
    }

    #[test]
    fn otimes_identity_and_shift() {
        let a = m(&[&[1.0, 2.0], &[3.0, 0.5]]);
        assert_eq!(a.otimes(&FiniteMaxMatrix::identity(2)).unwrap(), a);
        let s2 = backward_shift(3).power(2);
        let mut expect = FiniteMaxMatrix::zeros(3);
        expect.set(0, 2, MaxScalar::ONE);
        assert_eq!(s2, expect);
        assert!(a.otimes(&FiniteMaxMatrix::zeros(3)).is_err());
    }

    #[test]
    fn mat_vec_examples() {
        let a = m(&[&[1.0, 2.0], &[3.0, 0.0]]);
        assert_eq!(a.mat_vec(&MaxVector::basis(2, 1)).unwrap(), a.column(1));
        let z = FiniteMaxMatrix::zeros(2);
        assert_eq!(z.mat_vec(&MaxVector::ones(2)).unwrap(), MaxVector::zeros(2));

        // leading 4x4 block of the star matrix with a_1j = a_j1 = (j-1)/j
        let star = FiniteMaxMatrix::from_fn(4, |i, j| match (i, j) {
            (0, j) if j > 0 => j as f64 / (j + 1) as f64,
            (i, 0) if i > 0 => i as f64 / (i + 1) as f64,
            _ => 0.0,
        });
        let y = star.mat_vec(&MaxVector::ones(4)).unwrap().to_f64();
        let expect = [3.0 / 4.0, 1.0 / 2.0, 2.0 / 3.0, 3.0 / 4.0];
        for (a, b) in y.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn power_edge_cases() {
        assert_eq!(FiniteMaxMatrix::identity(3).power(7), FiniteMaxMatrix::identity(3));
        assert_eq!(backward_shift(5).power(5), FiniteMaxMatrix::zeros(5));
        let a = m(&[&[1.0, 2.0], &[3.0, 0.0]]);
        assert_eq!(a.power(0), FiniteMaxMatrix::identity(2));
    }

    #[test]
    fn norm_examples() {
        assert!(FiniteMaxMatrix::zeros(3).norm().is_zero());
        assert_eq!(m(&[&[1.0, 2.0], &[3.0, 0.0]]).norm().to_f64(), 3.0);
    }

    #[test]
    fn path_weight_examples() {
        let a = m(&[&[1.0, 2.0], &[3.0, 0.0]]);
        assert_eq!(a.path_weight(&[1]).unwrap().weight, MaxScalar::ONE);
        // a_{10} * a_{01} = 3 * 2
        assert_eq!(a.path_weight(&[0, 1, 0]).unwrap().weight.to_f64(), 6.0);
        assert!(a.path_weight(&[1, 1]).unwrap().weight.is_zero());
        assert!(a.path_weight(&[0, 2]).is_err());
    }

    #[test]
    fn kakutani_path_weight() {
        // weighted shift a_{i,i+1} = 2^{-v2(i)} (1-based i); the walk 1 -> 2 -> ... -> 1025
        // in the weight convention uses a_{i_{t+1} i_t}, so we walk the transpose direction.
        let n = 1025;
        let w = |i: usize| MaxScalar::pow2(-(i.trailing_zeros() as i64));
        let trip = (1..n).map(|i| (i, i - 1, w(i)));
        let a = SparseMaxMatrix::from_triplets(n, trip).to_dense();
        let path: Vec<usize> = (0..n).collect();
        let p = a.path_weight(&path).unwrap();
        let expect: i64 = (1..=9).map(|j: i64| j * (1 << (9 - j))).sum::<i64>() + 10;
        assert_eq!(p.weight.log2(), -(expect as f64));
        assert_eq!(expect, 1023);
    }

    #[test]
    fn pow_norm_seq_examples() {
        for v in FiniteMaxMatrix::identity(3).pow_norm_seq(5) {
            assert_eq!(v, MaxScalar::ONE);
        }
        let a = m(&[&[0.0, 4.0], &[1.0, 0.0]]);
        let s = a.pow_norm_seq(6);
        assert_eq!(s[0].to_f64(), 4.0);
        for k in [1, 3, 5] {
            assert!((s[k].to_f64() - 2.0).abs() < 1e-14);
        }
        assert!((s[2].to_f64() - 16f64.powf(1.0 / 3.0)).abs() < 1e-14);
        for v in FiniteMaxMatrix::diag(&[0.5, 0.5]).pow_norm_seq(4) {
            assert!((v.to_f64() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn json_dense_and_sparse() {
        let a = FiniteMaxMatrix::from_json(r#"{"n":2,"entries":[[0.1,2],[3,0]]}"#).unwrap();
        assert_eq!(a.get(0, 0).to_f64(), 0.1);
        let text = a.to_json();
        assert_eq!(text, r#"{"n":2,"entries":[[0.1,2.0],[3.0,0.0]]}"#);
        assert_eq!(FiniteMaxMatrix::from_json(&text).unwrap(), a);

        let b = FiniteMaxMatrix::from_json(r#"{"n":2,"triplets":[[1,2,2.5]]}"#).unwrap();
        assert_eq!(b.get(0, 1).to_f64(), 2.5);
        assert!(FiniteMaxMatrix::from_json(r#"{"n":2,"triplets":[[1,2,1],[1,2,3]]}"#).is_err());
        assert!(FiniteMaxMatrix::from_json(r#"{"n":2,"triplets":[[0,1,1]]}"#).is_err());
        assert!(FiniteMaxMatrix::from_json(r#"{"n":1,"entries":[[-1]]}"#).is_err());
    }

    fn naive_otimes(a: &FiniteMaxMatrix, b: &FiniteMaxMatrix) -> Vec<Vec<f64>> {
        let n = a.n();
        let (ra, rb) = (a.to_rows(), b.to_rows());
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| ra[i][k] * rb[k][j]).fold(0.0, f64::max)).collect())
            .collect()
    }

    proptest! {
        #[test]
        fn oplus_associative(a in arb_matrix(3), b in arb_matrix(3), c in arb_matrix(3)) {
            let l = a.oplus(&b).unwrap().oplus(&c).unwrap();
            let r = a.oplus(&b.oplus(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn otimes_matches_naive(a in arb_matrix(4), b in arb_matrix(4)) {
            let p = a.otimes(&b).unwrap().to_rows();
            let q = naive_otimes(&a, &b);
            for i in 0..4 { for j in 0..4 {
                prop_assert!((p[i][j] - q[i][j]).abs() <= 1e-12 * q[i][j]);
            }}
        }

        #[test]
        fn squaring_matches_sequential(a in arb_matrix(4)) {
            let fast = a.power(5);
            let mut slow = a.clone();
            for _ in 1..5 { slow = slow.otimes(&a).unwrap(); }
            for (x, y) in fast.entries().zip(slow.entries()) {
                prop_assert!(log_close(x.2, y.2, 1e-12));
            }
        }

        #[test]
        fn norm_submultiplicative(a in arb_matrix(4), b in arb_matrix(4)) {
            let lhs = a.otimes(&b).unwrap().norm();
            let rhs = a.norm().mul(b.norm());
            prop_assert!(lhs <= rhs);
        }

        #[test]
        fn power_norms_submultiplicative(a in arb_matrix(4)) {
            let table = SparseMaxMatrix::from_dense(&a).pow_norm_table(32);
            for k in 1..=16usize { for j in 1..=16usize {
                let lhs = table[k + j - 1];
                let rhs = table[k - 1].mul(table[j - 1]);
                prop_assert!(lhs.log2() <= rhs.log2() + 1e-12 * rhs.log2().abs().max(1.0) || lhs.is_zero());
            }}
        }

        #[test]
        fn homogeneity_of_powers(a in arb_matrix(3), c in 0.1f64..10.0, k in 1u64..8) {
            let c = MaxScalar::from_f64(c);
            let lhs = a.scale(c).power(k);
            let rhs = a.power(k).scale(c.powi(k));
            for (x, y) in lhs.entries().zip(rhs.entries()) {
                prop_assert!(log_close(x.2, y.2, 1e-12));
            }
        }

        #[test]
        fn power_norm_is_best_path(a in arb_matrix(4), k in 1usize..=4) {
            // exhaustive enumeration of all walks of length k
            let n = a.n();
            let mut best = MaxScalar::ZERO;
            let total = n.pow(k as u32 + 1);
            for code in 0..total {
                let mut c = code;
                let walk: Vec<usize> = (0..=k).map(|_| { let d = c % n; c /= n; d }).collect();
                best = best.max(a.path_weight(&walk).unwrap().weight);
            }
            prop_assert!(log_close(a.power(k as u64).norm(), best, 1e-12));
        }

        #[test]
        fn log_and_linear_agree(a in arb_matrix(4), b in arb_matrix(4)) {
            let p = a.otimes(&b).unwrap();
            for (i, j, v) in p.entries() {
                let lin = (0..4).map(|k| a.get(i, k).to_f64() * b.get(k, j).to_f64()).fold(0.0, f64::max);
                if lin > 1e-200 {
                    prop_assert!((v.to_f64() - lin).abs() <= 1e-12 * lin);
                }
            }
        }
    }
}
