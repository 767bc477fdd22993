//! Named example matrices with their known spectral data.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use crate::error::{MaxError, Result};
use crate::oracle::{KnownValue, MatrixOracle, RowSupportFn, Support};

pub type Params = BTreeMap<String, f64>;

/// Registry entry: identifier, parameters and a one-line description.
pub struct GalleryInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub description: &'static str,
}

pub const REGISTRY: &[GalleryInfo] = &[
    GalleryInfo { name: "backward_shift", params: "", description: "a_{i,i+1} = 1; r = 1 while mu = m = 0" },
    GalleryInfo { name: "forward_shift", params: "", description: "a_{i+1,i} = 1; r = r_ess = r' = m = m_e = 1, mu = 0, no eigenvalues" },
    GalleryInfo { name: "diag_ratio", params: "", description: "a_ii = i/(i+1); mu = r = 1, supremum not attained" },
    GalleryInfo { name: "diag_inverse", params: "", description: "a_ii = 1/i; local radii 1/j, r_ess = r' = m_e = 0, mu = m = r = 1" },
    GalleryInfo { name: "star_means", params: "", description: "a_1j = a_j1 = (j-1)/j; mu = m = m_e = r = 1, r_ess = 0" },
    GalleryInfo { name: "epsilon_cycle", params: "eps in (0,1), default 0.5", description: "a_1j = eps^j, a_{j+1,j} = 1; irreducible, r = r_ess = 1, mu = eps" },
    GalleryInfo { name: "kakutani", params: "", description: "a_{i,i+1} = 2^{-v2(i)}; r = 1/2, mu = 0" },
    GalleryInfo { name: "kakutani_cutoff", params: "m >= 1", description: "kakutani weights below 2^{-m} removed; nilpotent, r = 0" },
    GalleryInfo { name: "holder_family", params: "alpha > 0, optional k >= 2", description: "chains of length n_i with weights 1 + 1/i; with k, each chain closed by k^{-2/alpha}" },
    GalleryInfo { name: "shift_perturbed", params: "n >= 2, 0 < eps' < eps (eps' = 0 allowed)", description: "a_{i,i+1} = eps for i < n, a_{n,1} = eps'; r = (eps^{n-1} eps')^{1/n}" },
    GalleryInfo { name: "zero", params: "", description: "the zero matrix" },
    GalleryInfo { name: "diag_const", params: "c > 0, default 1", description: "c times the identity" },
];

fn param(p: &Params, key: &str, default: Option<f64>) -> Result<f64> {
    match (p.get(key), default) {
        (Some(&v), _) => Ok(v),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(MaxError::InvalidParam(format!("missing parameter `{key}`"))),
    }
}

/// Parameter keys accepted by a gallery entry, besides `scale`.
pub fn param_keys(name: &str) -> Result<&'static [&'static str]> {
    Ok(match name {
        "epsilon_cycle" => &["eps"],
        "kakutani_cutoff" => &["m"],
        "holder_family" => &["alpha", "k"],
        "shift_perturbed" => &["n", "eps", "eps_prime"],
        "diag_const" => &["c"],
        _ if REGISTRY.iter().any(|g| g.name == name) => &[],
        _ => return Err(MaxError::UnknownGallery(name.to_string())),
    })
}

fn check_keys(p: &Params, allowed: &[&str]) -> Result<()> {
    match p.keys().find(|k| !allowed.contains(&k.as_str()) && k.as_str() != "scale") {
        Some(k) => Err(MaxError::InvalidParam(format!("unexpected parameter `{k}`"))),
        None => Ok(()),
    }
}

fn positive_int(x: f64, key: &str, min: usize) -> Result<usize> {
    if x.fract() != 0.0 || x < min as f64 || x > 1e9 {
        return Err(MaxError::InvalidParam(format!("`{key}` must be an integer >= {min}, got {x}")));
    }
    Ok(x as usize)
}

/// `w_k = 2^{-j}` where `k = 2^j l` with `l` odd.
pub fn kakutani_weight(k: usize) -> f64 {
    (-(k.trailing_zeros() as f64)).exp2()
}

/// Smallest `n` with `(1 + 1/k)^{(n-1)/n} k^{-2/(alpha n)} > 1 + 1/(2k)`, found by
/// doubling and bisection on the monotone left side. `n_1 = 1`.
pub fn holder_block_size(k: usize, alpha: f64) -> Result<usize> {
    if k <= 1 {
        return Ok(1);
    }
    let kf = k as f64;
    let holds = |n: usize| {
        let nf = n as f64;
        ((nf - 1.0) / nf) * (1.0 / kf).ln_1p() - 2.0 / (alpha * nf) * kf.ln() > (0.5 / kf).ln_1p()
    };
    let mut hi = 1usize;
    while !holds(hi) {
        hi = hi.checked_mul(2).filter(|&h| h <= 1 << 40).ok_or_else(|| {
            MaxError::ResourceCap(format!("block size search for k = {k}, alpha = {alpha} overflowed"))
        })?;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Block layout of the flattened Hölder family: block `i` occupies the
/// 1-based indices `start_i + 1 ..= start_i + n_i`, blocks laid out in order.
#[derive(Clone)]
pub struct HolderLayout {
    pub alpha: f64,
    starts: Arc<RwLock<Vec<usize>>>,
}

impl HolderLayout {
    pub fn new(alpha: f64) -> Self {
        HolderLayout { alpha, starts: Arc::new(RwLock::new(vec![0, 0])) }
    }

    /// Block size `n_i`.
    pub fn size(&self, i: usize) -> usize {
        holder_block_size(i, self.alpha).expect("block size search")
    }

    /// Offset of block `i`, so that block `i` starts at `offset + 1`.
    pub fn start(&self, i: usize) -> usize {
        {
            let s = self.starts.read().expect("layout lock");
            if i < s.len() {
                return s[i];
            }
        }
        let mut s = self.starts.write().expect("layout lock");
        while s.len() <= i {
            let b = s.len() - 1;
            let next = s[b] + self.size(b);
            s.push(next);
        }
        s[i]
    }

    /// `(block, position)` of a 1-based flat index, position 1-based.
    pub fn locate(&self, idx: usize) -> (usize, usize) {
        // blocks have size >= 1, so block idx ends at or after idx
        let (mut lo, mut hi) = (1usize, idx);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.start(mid) < idx {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        (lo, idx - self.start(lo))
    }

    /// Flat 1-based index of `(block, position)`.
    pub fn flat(&self, block: usize, pos: usize) -> usize {
        self.start(block) + pos
    }
}

fn holder_entry(layout: &HolderLayout, closing: Option<f64>, i: usize, j: usize) -> f64 {
    let (bi, pi) = layout.locate(i);
    let (bj, pj) = layout.locate(j);
    if bi != bj {
        return 0.0;
    }
    if bi == 1 {
        return 1.0;
    }
    let n = layout.size(bi);
    if pi == pj + 1 {
        1.0 + 1.0 / bi as f64
    } else if pi == 1 && pj == n {
        closing.unwrap_or(0.0)
    } else {
        0.0
    }
}

/// Mean of the closed chain of block `i` in `B_k`.
pub fn holder_block_mean(i: usize, k: usize, alpha: f64) -> Result<f64> {
    let n = holder_block_size(i, alpha)? as f64;
    let l = (n - 1.0) * (1.0 / i as f64).ln_1p() - 2.0 / alpha * (k as f64).ln();
    Ok((l / n).exp())
}

pub fn holder_family(alpha: f64, k: Option<usize>) -> Result<MatrixOracle> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(MaxError::InvalidParam(format!("alpha must be positive, got {alpha}")));
    }
    if let Some(k) = k {
        if k < 2 {
            return Err(MaxError::InvalidParam(format!("k must be at least 2, got {k}")));
        }
    }
    let layout = HolderLayout::new(alpha);
    let closing = k.map(|k| (k as f64).powf(-2.0 / alpha));
    let support_layout = layout.clone();
    let support: RowSupportFn = Arc::new(move |i, n| {
        let (b, p) = support_layout.locate(i);
        let size = support_layout.size(b);
        let mut cols = Vec::new();
        if b == 1 {
            cols.push(i);
        } else {
            if p > 1 {
                cols.push(i - 1);
            }
            if p == 1 && closing.is_some() {
                cols.push(support_layout.flat(b, size));
            }
        }
        cols.retain(|&j| j <= n);
        cols.sort_unstable();
        cols.dedup();
        cols
    });
    let entry_layout = layout.clone();
    let name = match k {
        Some(k) => format!("holder_family(alpha={alpha},k={k})"),
        None => format!("holder_family(alpha={alpha})"),
    };
    let mut known = Vec::new();
    if k.is_none() {
        known.push(KnownValue::number("r", 1.0, "chain weights 1 + 1/i tend to 1 and block 1 is a unit loop"));
        known.push(KnownValue::number("mu", 1.0, "the only cycle is the unit loop at the first index"));
    }
    Ok(MatrixOracle::new(name, 1.5, move |i, j| holder_entry(&entry_layout, closing, i, j))
        .with_support(Support::Rule(support))
        .with_known(known))
}

fn shift_perturbed(n: usize, eps: f64, eps_prime: f64) -> Result<MatrixOracle> {
    if n < 2 || !(eps > 0.0 && eps < 1.0) || !(0.0..eps).contains(&eps_prime) {
        return Err(MaxError::InvalidParam(format!(
            "shift_perturbed needs n >= 2 and 0 <= eps' < eps < 1, got n = {n}, eps = {eps}, eps' = {eps_prime}"
        )));
    }
    let r = if eps_prime > 0.0 { (eps.powi(n as i32 - 1) * eps_prime).powf(1.0 / n as f64) } else { 0.0 };
    Ok(MatrixOracle::new(format!("shift_perturbed(n={n},eps={eps},eps_prime={eps_prime})"), eps, move |i, j| {
        if i < n && j == i + 1 {
            eps
        } else if i == n && j == 1 {
            eps_prime
        } else {
            0.0
        }
    })
    .with_support(Support::Finite { size: n })
    .with_hints(|h| {
        h.radius_upper = Some(r);
        h.acyclic = Some(eps_prime == 0.0);
    })
    .with_known(vec![
        KnownValue::number("r", r, "the single cycle 1 -> n -> ... -> 1 has mean (eps^{n-1} eps')^{1/n}"),
        KnownValue::number("mu", r, "finite support, so mu = r"),
    ]))
}

/// Builds a gallery oracle. Every entry also accepts `scale = c > 0`.
pub fn gallery(name: &str, params: &Params) -> Result<MatrixOracle> {
    let oracle = match name {
        "backward_shift" => {
            check_keys(params, &[])?;
            MatrixOracle::new("backward_shift", 1.0, |i, j| if j == i + 1 { 1.0 } else { 0.0 })
                .with_support(Support::Band { below: 0, above: 1 })
                .with_hints(|h| {
                    h.acyclic = Some(true);
                    h.irreducible = Some(false);
                })
                .with_known(vec![
                    KnownValue::number("r", 1.0, "every power has norm 1"),
                    KnownValue::number("mu", 0.0, "no cycles"),
                    KnownValue::number("m", 0.0, "each e_j is annihilated by A^j"),
                    KnownValue::number("m_e", 0.0, "all local radii vanish"),
                    KnownValue::number("r_prime", 1.0, "r = max(mu, r') with mu = 0"),
                    KnownValue::number("r_ess", 1.0, "r' <= r_ess <= r"),
                    KnownValue::symbolic("local_radius", "0 for every j", "A^j e_j = 0"),
                ])
        }
        "forward_shift" => {
            check_keys(params, &[])?;
            MatrixOracle::new("forward_shift", 1.0, |i, j| if i == j + 1 { 1.0 } else { 0.0 })
                .with_support(Support::Band { below: 1, above: 0 })
                .with_hints(|h| {
                    h.acyclic = Some(true);
                    h.irreducible = Some(false);
                })
                .with_known(vec![
                    KnownValue::number("r", 1.0, "A^k e_j = e_{j+k}"),
                    KnownValue::number("r_ess", 1.0, "tail compressions are again forward shifts"),
                    KnownValue::number("r_prime", 1.0, "unit simple paths of every length"),
                    KnownValue::number("m", 1.0, "every local radius is 1"),
                    KnownValue::number("m_e", 1.0, "every local radius is 1"),
                    KnownValue::number("mu", 0.0, "no cycles"),
                    KnownValue::symbolic("local_radius", "1 for every j", "A^k e_j = e_{j+k}"),
                    KnownValue::symbolic("sigma_p", "empty", "A x = t x forces x = 0"),
                ])
        }
        "diag_ratio" => {
            check_keys(params, &[])?;
            MatrixOracle::new("diag_ratio", 1.0, |i, j| if i == j { i as f64 / (i + 1) as f64 } else { 0.0 })
                .with_support(Support::Diagonal)
                .with_known(vec![
                    KnownValue::number("r", 1.0, "loops i/(i+1) tend to 1"),
                    KnownValue::number("mu", 1.0, "supremum of the loops, not attained"),
                    KnownValue::symbolic("local_radius", "j/(j+1)", "decoupled loops"),
                ])
        }
        "diag_inverse" => {
            check_keys(params, &[])?;
            MatrixOracle::new("diag_inverse", 1.0, |i, j| if i == j { 1.0 / i as f64 } else { 0.0 })
                .with_support(Support::Diagonal)
                .with_hints(|h| {
                    h.tail_monotone = true;
                    h.irreducible = Some(false);
                })
                .with_known(vec![
                    KnownValue::number("r", 1.0, "largest loop a_11 = 1"),
                    KnownValue::number("mu", 1.0, "largest loop a_11 = 1"),
                    KnownValue::number("m", 1.0, "r_{e_1} = 1"),
                    KnownValue::number("m_e", 0.0, "r_{e_j} = 1/j tends to 0"),
                    KnownValue::number("r_prime", 0.0, "r' <= r_ess"),
                    KnownValue::number("r_ess", 0.0, "r(P_n A P_n) = 1/(n+1)"),
                    KnownValue::symbolic("local_radius", "1/j", "decoupled loops"),
                ])
        }
        "star_means" => {
            check_keys(params, &[])?;
            MatrixOracle::new("star_means", 1.0, |i, j| match (i, j) {
                (1, j) if j >= 2 => (j - 1) as f64 / j as f64,
                (i, 1) if i >= 2 => (i - 1) as f64 / i as f64,
                _ => 0.0,
            })
            .with_support(Support::Star { center: 1 })
            .with_hints(|h| h.irreducible = Some(true))
            .with_known(vec![
                KnownValue::number("r", 1.0, "two-cycles (1, n) have mean (n-1)/n and the norm is 1"),
                KnownValue::number("mu", 1.0, "two-cycles (1, n) have mean (n-1)/n"),
                KnownValue::number("m", 1.0, "r_{e_j} = 1 for j >= 2"),
                KnownValue::number("m_e", 1.0, "r_{e_j} = 1 for j >= 2"),
                KnownValue::number("r_ess", 0.0, "P_1 A P_1 = 0"),
                KnownValue::number("r_prime", 0.0, "r' <= r_ess"),
                KnownValue::symbolic("local_radius", "1 for every j >= 2", "walks 1, n, 1, ..., j"),
                KnownValue::symbolic("eigenvector", "x_n = (n-1)/n x_1", "solves A x = x"),
            ])
        }
        "epsilon_cycle" => {
            check_keys(params, &["eps"])?;
            let eps = param(params, "eps", Some(0.5))?;
            if !(eps > 0.0 && eps < 1.0) {
                return Err(MaxError::InvalidParam(format!("eps must lie in (0, 1), got {eps}")));
            }
            MatrixOracle::new(format!("epsilon_cycle(eps={eps})"), 1.0, move |i, j| {
                if i == 1 {
                    eps.powi(j.min(i32::MAX as usize) as i32)
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            })
            .with_support(Support::Rule(Arc::new(|i, n| {
                if i == 1 {
                    (1..=n).collect()
                } else if i - 1 <= n {
                    vec![i - 1]
                } else {
                    vec![]
                }
            })))
            .with_hints(|h| h.irreducible = Some(true))
            .with_known(vec![
                KnownValue::number("r", 1.0, "unit paths along the subdiagonal"),
                KnownValue::number("mu", eps, "every cycle 1 -> j -> ... -> 1 has weight eps^j"),
                KnownValue::number("r_ess", 1.0, "tail compressions keep the unit subdiagonal"),
                KnownValue::symbolic("sigma_p", "empty", "1 is not an eigenvalue and r_ess = r"),
            ])
        }
        "kakutani" => {
            check_keys(params, &[])?;
            MatrixOracle::new("kakutani", 1.0, |i, j| if j == i + 1 { kakutani_weight(i) } else { 0.0 })
                .with_support(Support::Band { below: 0, above: 1 })
                .with_hints(|h| h.acyclic = Some(true))
                .with_known(vec![
                    KnownValue::number("r", 0.5, "||A^{2^m}||^{1/2^m} = prod of weights tends to 2^{-1}"),
                    KnownValue::number("mu", 0.0, "no cycles"),
                    KnownValue::number("m", 0.0, "each e_j is annihilated by A^j"),
                    KnownValue::number("r_prime", 0.5, "r = max(mu, r') with mu = 0"),
                    KnownValue::number("r_ess", 0.5, "r' <= r_ess <= r"),
                ])
        }
        "kakutani_cutoff" => {
            check_keys(params, &["m"])?;
            let m = positive_int(param(params, "m", None)?, "m", 1)?;
            if m > 60 {
                return Err(MaxError::InvalidParam(format!("m must be at most 60, got {m}")));
            }
            MatrixOracle::new(format!("kakutani_cutoff(m={m})"), 1.0, move |i, j| {
                if j == i + 1 && (i.trailing_zeros() as usize) <= m {
                    kakutani_weight(i)
                } else {
                    0.0
                }
            })
            .with_support(Support::Band { below: 0, above: 1 })
            .with_hints(|h| h.acyclic = Some(true))
            .with_known(vec![
                KnownValue::number("r", 0.0, "the 2^{m+1}-th power vanishes"),
                KnownValue::number("mu", 0.0, "no cycles"),
            ])
        }
        "holder_family" => {
            check_keys(params, &["alpha", "k"])?;
            let alpha = param(params, "alpha", Some(1.0))?;
            let k = match params.get("k") {
                Some(&k) => Some(positive_int(k, "k", 2)?),
                None => None,
            };
            holder_family(alpha, k)?
        }
        "shift_perturbed" => {
            check_keys(params, &["n", "eps", "eps_prime"])?;
            let n = positive_int(param(params, "n", None)?, "n", 2)?;
            shift_perturbed(n, param(params, "eps", Some(0.5))?, param(params, "eps_prime", Some(0.0))?)?
        }
        "zero" => {
            check_keys(params, &[])?;
            let zeros = ["r", "mu", "m", "m_e", "r_prime", "r_ess"].map(|q| KnownValue::number(q, 0.0, "zero matrix"));
            MatrixOracle::new("zero", 0.0, |_, _| 0.0)
                .with_support(Support::Finite { size: 0 })
                .with_hints(|h| {
                    h.acyclic = Some(true);
                    h.radius_upper = Some(0.0);
                })
                .with_known(zeros.to_vec())
        }
        "diag_const" => {
            check_keys(params, &["c"])?;
            let c = param(params, "c", Some(1.0))?;
            if !(c > 0.0 && c.is_finite()) {
                return Err(MaxError::InvalidParam(format!("c must be positive, got {c}")));
            }
            let vals = ["r", "mu", "m", "m_e", "r_ess"].map(|q| KnownValue::number(q, c, "constant loops"));
            MatrixOracle::new(format!("diag_const(c={c})"), c, move |i, j| if i == j { c } else { 0.0 })
                .with_support(Support::Diagonal)
                .with_hints(|h| h.tail_monotone = true)
                .with_known(vals.to_vec())
        }
        other => return Err(MaxError::UnknownGallery(other.to_string())),
    };
    match params.get("scale") {
        Some(&c) => oracle.scaled(c),
        None => Ok(oracle),
    }
}

/// Parses `k=v,k2=v2` or repeated `k=v` items into parameters.
pub fn parse_params<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<Params> {
    let mut p = Params::new();
    for item in items {
        for kv in item.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| MaxError::InvalidParam(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| MaxError::InvalidParam(format!("value of `{}` is not a number: `{v}`", k.trim())))?;
            p.insert(k.trim().to_string(), v);
        }
    }
    Ok(p)
}
