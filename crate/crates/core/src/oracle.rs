//! Infinite bounded nonnegative matrices as lazy entry oracles.
//!
//! An oracle answers `entry(i, j)` for 1-based `i, j`, declares a bound on all
//! entries, and may carry structural hints (which entries can be nonzero) and
//! known exact spectral values. Finite windows are realized sparsely from the
//! support hint and cached.

use std::fmt;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MaxError, Result};
use crate::matrix::{FiniteMaxMatrix, MatrixJson, SparseMaxMatrix};
use crate::scalar::MaxScalar;

pub type EntryFn = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;
/// Nonzero columns of row `i` inside `1..=N`, for arguments `(i, N)`.
pub type RowSupportFn = Arc<dyn Fn(usize, usize) -> Vec<usize> + Send + Sync>;

/// Where the nonzero entries of an oracle can sit (1-based).
#[derive(Clone)]
pub enum Support {
    Dense,
    /// `a_ij = 0` unless `i - below <= j <= i + above`.
    Band { below: usize, above: usize },
    Diagonal,
    /// Nonzero entries only in row `center` and column `center`.
    Star { center: usize },
    /// Nonzero entries only in the leading `size x size` block.
    Finite { size: usize },
    Rule(RowSupportFn),
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Dense => write!(f, "Dense"),
            Support::Band { below, above } => write!(f, "Band {{ below: {below}, above: {above} }}"),
            Support::Diagonal => write!(f, "Diagonal"),
            Support::Star { center } => write!(f, "Star {{ center: {center} }}"),
            Support::Finite { size } => write!(f, "Finite {{ size: {size} }}"),
            Support::Rule(_) => write!(f, "Rule"),
        }
    }
}

impl Support {
    /// Candidate nonzero columns of row `i` within `1..=n`.
    pub fn row_columns(&self, i: usize, n: usize) -> Vec<usize> {
        match self {
            Support::Dense => (1..=n).collect(),
            Support::Band { below, above } => (i.saturating_sub(*below).max(1)..=(i + above).min(n)).collect(),
            Support::Diagonal => {
                if i <= n {
                    vec![i]
                } else {
                    vec![]
                }
            }
            Support::Star { center } => {
                if i == *center {
                    (1..=n).collect()
                } else if *center <= n {
                    vec![*center]
                } else {
                    vec![]
                }
            }
            Support::Finite { size } => {
                if i <= *size {
                    (1..=n.min(*size)).collect()
                } else {
                    vec![]
                }
            }
            Support::Rule(f) => f(i, n),
        }
    }

    /// Number of rows below the window `1..=n` that can hold a nonzero entry
    /// in a column of the window; `None` when unbounded or unknown.
    pub fn rows_below(&self) -> Option<usize> {
        match self {
            Support::Band { below, .. } => Some(*below),
            Support::Diagonal | Support::Finite { .. } => Some(0),
            _ => None,
        }
    }

    /// Number of columns right of the window that a window row can reach;
    /// `None` when unbounded or unknown.
    pub fn cols_above(&self) -> Option<usize> {
        match self {
            Support::Band { above, .. } => Some(*above),
            Support::Diagonal | Support::Finite { .. } => Some(0),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Hints {
    pub support: Support,
    /// The digraph has no cycles, loops included.
    pub acyclic: Option<bool>,
    pub irreducible: Option<bool>,
    /// Diagonal entries are nonincreasing along the diagonal.
    pub tail_monotone: bool,
    /// An upper bound on `r(A)` from an entrywise dominator.
    pub radius_upper: Option<f64>,
}

impl Default for Hints {
    fn default() -> Self {
        Hints { support: Support::Dense, acyclic: None, irreducible: None, tail_monotone: false, radius_upper: None }
    }
}

/// A known exact value with a short justification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnownValue {
    pub quantity: String,
    pub value: Option<f64>,
    pub description: String,
    pub justification: String,
}

impl KnownValue {
    pub fn number(quantity: &str, value: f64, justification: &str) -> Self {
        KnownValue {
            quantity: quantity.into(),
            value: Some(value),
            description: format!("{value}"),
            justification: justification.into(),
        }
    }

    pub fn symbolic(quantity: &str, description: &str, justification: &str) -> Self {
        KnownValue { quantity: quantity.into(), value: None, description: description.into(), justification: justification.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowKind {
    /// Rows and columns `1..=N`.
    Leading { n_window: usize },
    /// Rows and columns `n+1..=N`.
    Tail { n: usize, n_window: usize },
}

/// A finite window of an oracle, realized exactly.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub kind: WindowKind,
    pub matrix: SparseMaxMatrix,
}

impl Truncation {
    pub fn dense(&self) -> FiniteMaxMatrix {
        self.matrix.to_dense()
    }

    /// First 1-based index of the window.
    pub fn offset(&self) -> usize {
        match self.kind {
            WindowKind::Leading { .. } => 0,
            WindowKind::Tail { n, .. } => n,
        }
    }
}

#[derive(Clone)]
pub struct MatrixOracle {
    pub name: String,
    entry: EntryFn,
    pub norm_bound: f64,
    pub hints: Hints,
    pub known: Vec<KnownValue>,
    cache: Arc<Mutex<Option<SparseMaxMatrix>>>,
}

impl fmt::Debug for MatrixOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixOracle")
            .field("name", &self.name)
            .field("norm_bound", &self.norm_bound)
            .field("hints", &self.hints)
            .field("known", &self.known)
            .finish()
    }
}

impl MatrixOracle {
    pub fn new(name: impl Into<String>, norm_bound: f64, entry: impl Fn(usize, usize) -> f64 + Send + Sync + 'static) -> Self {
        MatrixOracle {
            name: name.into(),
            entry: Arc::new(entry),
            norm_bound,
            hints: Hints::default(),
            known: Vec::new(),
            cache: Arc::new(Mutex::new(None)),
        }
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.hints.support = support;
        self
    }

    pub fn with_hints(mut self, f: impl FnOnce(&mut Hints)) -> Self {
        f(&mut self.hints);
        self
    }

    pub fn with_known(mut self, known: Vec<KnownValue>) -> Self {
        self.known = known;
        self
    }

    /// Raw probe without validation.
    pub fn raw(&self, i: usize, j: usize) -> f64 {
        (self.entry)(i, j)
    }

    /// Validated probe at 1-based `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> Result<MaxScalar> {
        if i == 0 || j == 0 {
            return Err(MaxError::IndexOutOfRange { index: 0, dim: usize::MAX });
        }
        let x = (self.entry)(i, j);
        match MaxScalar::new(x) {
            Some(v) if x <= self.norm_bound => Ok(v),
            _ => Err(MaxError::OracleViolation { oracle: self.name.clone(), row: i, col: j, value: x, bound: self.norm_bound }),
        }
    }

    pub fn norm_bound_scalar(&self) -> MaxScalar {
        MaxScalar::from_f64(self.norm_bound)
    }

    pub fn known_value(&self, quantity: &str) -> Option<f64> {
        self.known.iter().find(|k| k.quantity == quantity).and_then(|k| k.value)
    }

    pub fn known_entry(&self, quantity: &str) -> Option<&KnownValue> {
        self.known.iter().find(|k| k.quantity == quantity)
    }

    fn realize_rows(&self, rows: std::ops::RangeInclusive<usize>, n: usize) -> Result<Vec<(usize, usize, MaxScalar)>> {
        let per_row: Vec<Result<Vec<(usize, usize, MaxScalar)>>> = rows
            .into_par_iter()
            .map(|i| {
                let mut out = Vec::new();
                for j in self.hints.support.row_columns(i, n) {
                    let v = self.entry(i, j)?;
                    if !v.is_zero() {
                        out.push((i - 1, j - 1, v));
                    }
                }
                Ok(out)
            })
            .collect();
        let mut trip = Vec::new();
        for r in per_row {
            trip.extend(r?);
        }
        Ok(trip)
    }

    fn leading_sparse(&self, n: usize) -> Result<SparseMaxMatrix> {
        if n == 0 {
            return Err(MaxError::InvalidParam("window size N must be at least 1".into()));
        }
        let mut guard = self.cache.lock().expect("oracle cache poisoned");
        if let Some(c) = guard.as_ref() {
            if c.n() == n {
                return Ok(c.clone());
            }
            if c.n() > n {
                return Ok(c.restrict(&(0..n).collect::<Vec<_>>()));
            }
        }
        let m = SparseMaxMatrix::from_triplets(n, self.realize_rows(1..=n, n)?);
        *guard = Some(m.clone());
        Ok(m)
    }

    /// Leading `N x N` window.
    pub fn truncate(&self, n_window: usize) -> Result<Truncation> {
        Ok(Truncation { kind: WindowKind::Leading { n_window }, matrix: self.leading_sparse(n_window)? })
    }

    /// Window on rows and columns `n+1..=N`, i.e. the nonzero part of `P_n A P_n` cut at `N`.
    pub fn tail_truncate(&self, n: usize, n_window: usize) -> Result<Truncation> {
        if n >= n_window {
            return Err(MaxError::InvalidParam(format!("tail window needs n < N, got n = {n}, N = {n_window}")));
        }
        let lead = self.leading_sparse(n_window)?;
        Ok(Truncation { kind: WindowKind::Tail { n, n_window }, matrix: lead.restrict(&(n..n_window).collect::<Vec<_>>()) })
    }

    /// Probes `samples` random positions in `1..=max_index` and checks the contract.
    pub fn spot_check(&self, samples: usize, max_index: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let i = rng.gen_range(1..=max_index);
            let j = rng.gen_range(1..=max_index);
            let a = self.entry(i, j)?;
            if (self.entry)(i, j).to_bits() != a.to_f64().to_bits() {
                return Err(MaxError::Precondition(format!("oracle `{}` is not deterministic at ({i}, {j})", self.name)));
            }
        }
        Ok(())
    }

    /// The oracle `c A` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(MaxError::InvalidParam(format!("scale must be positive, got {c}")));
        }
        let inner = self.entry.clone();
        let homogeneous = ["r", "mu", "r_prime", "r_ess", "m", "m_e"];
        let known = self
            .known
            .iter()
            .map(|k| match (k.value, homogeneous.contains(&k.quantity.as_str())) {
                (Some(v), true) => KnownValue::number(&k.quantity, v * c, &format!("{} (scaled by {c})", k.justification)),
                _ => k.clone(),
            })
            .filter(|k| homogeneous.contains(&k.quantity.as_str()))
            .collect();
        let mut hints = self.hints.clone();
        hints.radius_upper = hints.radius_upper.map(|r| r * c);
        Ok(MatrixOracle {
            name: format!("{}*{c}", self.name),
            entry: Arc::new(move |i, j| c * inner(i, j)),
            norm_bound: self.norm_bound * c,
            hints,
            known,
            cache: Arc::new(Mutex::new(None)),
        })
    }

    /// Parses a custom oracle specification.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: OracleSpec = serde_json::from_str(text)?;
        spec.build()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Band {
    /// `j - i` for the entries of this band.
    pub offset: i64,
    #[serde(default)]
    pub value: Option<f64>,
    /// Periodic values along the band, indexed by row.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerOf {
    I,
    J,
}

/// One family of entries: a whole row, a whole column, or a diagonal band,
/// valued `scale * ratio^p` with `p` the row or column index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Rule {
    #[serde(default)]
    pub row: Option<usize>,
    #[serde(default)]
    pub col: Option<usize>,
    #[serde(default)]
    pub offset: Option<i64>,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default = "one")]
    pub ratio: f64,
    #[serde(default = "power_j")]
    pub power_of: PowerOf,
}

fn one() -> f64 {
    1.0
}

fn power_j() -> PowerOf {
    PowerOf::J
}

impl Rule {
    fn applies(&self, i: usize, j: usize) -> bool {
        match (self.row, self.col, self.offset) {
            (Some(r), None, None) => i == r,
            (None, Some(c), None) => j == c,
            (None, None, Some(d)) => j as i64 - i as i64 == d,
            _ => false,
        }
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        let p = match self.power_of {
            PowerOf::I => i,
            PowerOf::J => j,
        };
        self.scale * self.ratio.powi(p as i32)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    Table {
        #[serde(default)]
        name: Option<String>,
        #[serde(flatten)]
        matrix: MatrixJson,
        #[serde(default)]
        norm_bound: Option<f64>,
    },
    Banded {
        #[serde(default)]
        name: Option<String>,
        norm_bound: Option<f64>,
        bands: Vec<Band>,
    },
    SparseRule {
        #[serde(default)]
        name: Option<String>,
        norm_bound: Option<f64>,
        rules: Vec<Rule>,
    },
}

impl OracleSpec {
    pub fn build(self) -> Result<MatrixOracle> {
        let oracle = match self {
            OracleSpec::Table { name, matrix, norm_bound } => {
                let a = matrix.into_matrix()?;
                let norm = a.norm().to_f64();
                let bound = norm_bound.unwrap_or(norm);
                if bound < norm {
                    return Err(MaxError::InvalidParam(format!("norm_bound {bound} is below the largest entry {norm}")));
                }
                let n = a.n();
                let rows = a.to_rows();
                MatrixOracle::new(name.unwrap_or_else(|| "table".into()), bound, move |i, j| {
                    if i <= n && j <= n {
                        rows[i - 1][j - 1]
                    } else {
                        0.0
                    }
                })
                .with_support(Support::Finite { size: n })
                .with_hints(|h| h.radius_upper = Some(norm))
            }
            OracleSpec::Banded { name, norm_bound, bands } => {
                let bound = norm_bound.ok_or_else(|| MaxError::InvalidParam("banded oracle needs a norm_bound".into()))?;
                for b in &bands {
                    match (&b.value, &b.values) {
                        (Some(_), None) => {}
                        (None, Some(v)) if !v.is_empty() => {}
                        _ => return Err(MaxError::InvalidParam(format!("band {} needs exactly one of value or values", b.offset))),
                    }
                }
                let below = bands.iter().map(|b| (-b.offset).max(0) as usize).max().unwrap_or(0);
                let above = bands.iter().map(|b| b.offset.max(0) as usize).max().unwrap_or(0);
                MatrixOracle::new(name.unwrap_or_else(|| "banded".into()), bound, move |i, j| {
                    let d = j as i64 - i as i64;
                    bands
                        .iter()
                        .filter(|b| b.offset == d)
                        .map(|b| match (&b.value, &b.values) {
                            (Some(v), _) => *v,
                            (None, Some(vs)) => vs[(i - 1) % vs.len()],
                            _ => 0.0,
                        })
                        .fold(0.0, f64::max)
                })
                .with_support(Support::Band { below, above })
            }
            OracleSpec::SparseRule { name, norm_bound, rules } => {
                let bound = norm_bound.ok_or_else(|| MaxError::InvalidParam("sparse_rule oracle needs a norm_bound".into()))?;
                for r in &rules {
                    let set = [r.row.is_some(), r.col.is_some(), r.offset.is_some()].iter().filter(|&&b| b).count();
                    if set != 1 {
                        return Err(MaxError::InvalidParam("each rule needs exactly one of row, col, offset".into()));
                    }
                }
                let rules = Arc::new(rules);
                let support_rules = rules.clone();
                let support: RowSupportFn = Arc::new(move |i, n| {
                    let mut cols = std::collections::BTreeSet::new();
                    for r in support_rules.iter() {
                        match (r.row, r.col, r.offset) {
                            (Some(row), _, _) if row == i => cols.extend(1..=n),
                            (_, Some(c), _) if c <= n => {
                                cols.insert(c);
                            }
                            (_, _, Some(d)) => {
                                let j = i as i64 + d;
                                if j >= 1 && j as usize <= n {
                                    cols.insert(j as usize);
                                }
                            }
                            _ => {}
                        }
                    }
                    cols.into_iter().collect()
                });
                MatrixOracle::new(name.unwrap_or_else(|| "sparse_rule".into()), bound, move |i, j| {
                    rules.iter().filter(|r| r.applies(i, j)).map(|r| r.value(i, j)).fold(0.0, f64::max)
                })
                .with_support(Support::Rule(support))
            }
        };
        oracle.spot_check(10_000, 4096, 0x5eed)?;
        Ok(oracle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift() -> MatrixOracle {
        MatrixOracle::new("shift", 1.0, |i, j| if j == i + 1 { 1.0 } else { 0.0 })
            .with_support(Support::Band { below: 0, above: 1 })
    }

    #[test]
    fn leading_and_tail_windows() {
        let o = shift();
        let t = o.truncate(3).unwrap().dense();
        assert_eq!(t.to_rows(), vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]]);
        let big = o.truncate(10).unwrap().dense();
        assert_eq!(o.truncate(3).unwrap().dense(), big.submatrix(&[0, 1, 2]));
        let tail = o.tail_truncate(2, 5).unwrap();
        assert_eq!(tail.matrix.n(), 3);
        assert_eq!(tail.offset(), 2);
        assert!(o.tail_truncate(5, 5).is_err());
        assert!(o.truncate(0).is_err());
    }

    #[test]
    fn window_entries_match_probes() {
        let o = MatrixOracle::new("dense", 1.0, |i, j| 1.0 / (i + j) as f64);
        let t = o.truncate(7).unwrap().dense();
        for i in 1..=7 {
            for j in 1..=7 {
                assert_eq!(t.get(i - 1, j - 1).to_f64().to_bits(), o.raw(i, j).to_bits());
            }
        }
    }

    #[test]
    fn violations_are_reported() {
        let o = MatrixOracle::new("bad", 1.0, |i, j| if i == 3 && j == 2 { -0.5 } else { 0.5 });
        match o.truncate(4) {
            Err(MaxError::OracleViolation { row, col, .. }) => assert_eq!((row, col), (3, 2)),
            other => panic!("expected violation, got {other:?}"),
        }
        let big = MatrixOracle::new("big", 1.0, |_, _| 2.0);
        assert!(big.spot_check(10, 10, 1).is_err());
    }

    #[test]
    fn support_shapes() {
        assert_eq!(Support::Band { below: 1, above: 2 }.row_columns(1, 10), vec![1, 2, 3]);
        assert_eq!(Support::Star { center: 1 }.row_columns(4, 6), vec![1]);
        assert_eq!(Support::Star { center: 1 }.row_columns(1, 3), vec![1, 2, 3]);
        assert!(Support::Finite { size: 2 }.row_columns(3, 5).is_empty());
    }

    #[test]
    fn custom_specs() {
        let t = MatrixOracle::from_json(r#"{"kind":"table","n":2,"entries":[[0,2],[0.5,0]]}"#).unwrap();
        assert_eq!(t.norm_bound, 2.0);
        assert_eq!(t.entry(1, 2).unwrap().to_f64(), 2.0);
        assert!(t.entry(5, 5).unwrap().is_zero());

        let b = MatrixOracle::from_json(
            r#"{"kind":"banded","norm_bound":1,"bands":[{"offset":1,"value":1},{"offset":0,"values":[0.5,0.25]}]}"#,
        )
        .unwrap();
        assert_eq!(b.entry(3, 4).unwrap().to_f64(), 1.0);
        assert_eq!(b.entry(2, 2).unwrap().to_f64(), 0.25);
        assert!(b.entry(4, 3).unwrap().is_zero());

        let r = MatrixOracle::from_json(
            r#"{"kind":"sparse_rule","norm_bound":1,"rules":[{"row":1,"ratio":0.5},{"offset":-1}]}"#,
        )
        .unwrap();
        assert_eq!(r.entry(1, 3).unwrap().to_f64(), 0.125);
        assert_eq!(r.entry(5, 4).unwrap().to_f64(), 1.0);
        assert_eq!(r.truncate(4).unwrap().matrix.nnz(), 4 + 3);

        assert!(MatrixOracle::from_json(r#"{"kind":"banded","bands":[{"offset":1,"value":1}]}"#).is_err());
        assert!(MatrixOracle::from_json(r#"{"kind":"sparse_rule","norm_bound":0.5,"rules":[{"offset":1}]}"#).is_err());
        assert!(MatrixOracle::from_json(r#"{"kind":"table","n":1,"entries":[[3]],"norm_bound":1}"#).is_err());
    }

    #[test]
    fn scaling_scales_known_values() {
        let o = shift().with_known(vec![KnownValue::number("r", 1.0, "shift")]);
        let s = o.scaled(2.0).unwrap();
        assert_eq!(s.known_value("r"), Some(2.0));
        assert_eq!(s.entry(1, 2).unwrap().to_f64(), 2.0);
        assert!(o.scaled(-1.0).is_err());
    }
}
