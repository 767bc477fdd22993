//! Command-line front end. Every report is JSON with the run configuration
//! embedded under `config`; `--format csv` projects series data.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::blockform;
use crate::continuity;
use crate::error::{MaxError, Result};
use crate::estimate::{self, PathMode};
use crate::gallery::{self, Params, REGISTRY};
use crate::matrix::FiniteMaxMatrix;
use crate::oracle::MatrixOracle;
use crate::scalar::MaxScalar;
use crate::spectral;

#[derive(Parser, Debug)]
#[command(name = "maxspec", version, about = "Spectral quantities of nonnegative matrices in max algebra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Matrix or oracle JSON file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Second matrix for perturbation probes.
    #[arg(long, global = true)]
    pub perturbed: Option<PathBuf>,
    /// Gallery entry name.
    #[arg(long, global = true)]
    pub gallery: Option<String>,
    /// `key=value` pairs, comma separated or repeated.
    #[arg(long, global = true)]
    pub params: Vec<String>,
    /// Window size.
    #[arg(long = "N", global = true)]
    pub n_window: Option<usize>,
    /// Power or path length.
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
    /// Relative tolerance for convergence flags.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Radius, local radii, point spectrum and critical cycle of a finite matrix.
    Spectrum,
    /// Certified bracket and schedule for one spectral quantity of an oracle.
    Estimate {
        #[arg(value_enum)]
        quantity: Quantity,
    },
    /// Eigenvector candidate from the series at `i0` with scale `t`.
    Eig,
    /// Frobenius normal form of a matrix, or window levels of an oracle.
    Blocks,
    /// Perturbation experiments, approximate point spectrum and power tables.
    Probe {
        #[arg(value_enum)]
        experiment: Experiment,
    },
    /// Built-in example operators.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum GalleryAction {
    /// Names, parameters and one-line descriptions.
    List,
    /// Hints and known values of one entry.
    Show { name: String },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    R,
    Mu,
    Rprime,
    Ress,
    M,
    Me,
    Cej,
    Local,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Ap,
    Lipschitz,
    Kakutani,
    Holder,
    Semicontinuity,
    Weaker,
    Counterexample,
    Power,
    Irreducible,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub const DEFAULT_N: usize = 256;
pub const DEFAULT_K: usize = 64;

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub perturbed: Option<PathBuf>,
    pub gallery: Option<String>,
    pub gallery_params: Params,
    pub run_params: BTreeMap<String, String>,
    pub n_window: usize,
    pub k: usize,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn raw_params(items: &[String]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for item in items {
        for kv in item.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| MaxError::InvalidParam(format!("expected key=value, got `{kv}`")))?;
            if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(MaxError::InvalidParam(format!("parameter `{}` given twice", k.trim())));
            }
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let mut run_params = raw_params(&cli.params)?;
        let mut gallery_params = Params::new();
        if let Some(name) = &cli.gallery {
            let keys = gallery::param_keys(name)?;
            for key in keys.iter().copied().chain(["scale"]) {
                if let Some(v) = run_params.remove(key) {
                    let x = gallery::parse_params([format!("{key}={v}").as_str()])?;
                    gallery_params.extend(x);
                }
            }
        }
        let n_window = cli.n_window.unwrap_or(DEFAULT_N);
        let k = cli.k.unwrap_or(DEFAULT_K);
        let tol = cli.tol.unwrap_or(estimate::TOL_REL);
        if n_window == 0 || k == 0 {
            return Err(MaxError::InvalidParam("N and K must be at least 1".into()));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(MaxError::InvalidParam(format!("tol must lie in (0, 1), got {tol}")));
        }
        if cli.input.is_some() && cli.gallery.is_some() {
            return Err(MaxError::InvalidParam("give either --input or --gallery, not both".into()));
        }
        Ok(RunConfig {
            command: cli.command,
            input: cli.input,
            perturbed: cli.perturbed,
            gallery: cli.gallery,
            gallery_params,
            run_params,
            n_window,
            k,
            tol,
            output: cli.output,
            format: cli.format,
        })
    }

    fn command_name(&self) -> String {
        match &self.command {
            Command::Spectrum => "spectrum".into(),
            Command::Estimate { quantity } => format!("estimate {}", enum_name(quantity)),
            Command::Eig => "eig".into(),
            Command::Blocks => "blocks".into(),
            Command::Probe { experiment } => format!("probe {}", enum_name(experiment)),
            Command::Gallery { action: GalleryAction::List } => "gallery list".into(),
            Command::Gallery { action: GalleryAction::Show { name } } => format!("gallery show {name}"),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command_name()));
        if let Some(p) = &self.input {
            m.insert("input".into(), json!(p.display().to_string()));
        }
        if let Some(p) = &self.perturbed {
            m.insert("perturbed".into(), json!(p.display().to_string()));
        }
        if let Some(g) = &self.gallery {
            m.insert("gallery".into(), json!(g));
            m.insert("gallery_params".into(), json!(self.gallery_params));
        }
        m.insert("params".into(), json!(self.run_params));
        m.insert("N".into(), json!(self.n_window));
        m.insert("K".into(), json!(self.k));
        m.insert("tol".into(), json!(self.tol));
        Value::Object(m)
    }

    fn param<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.run_params.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| MaxError::InvalidParam(format!("bad value for `{key}`: `{v}`"))),
        }
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.param(key)?.ok_or_else(|| MaxError::InvalidParam(format!("missing parameter `{key}`")))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.run_params.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(':')
                .map(|s| s.trim().parse().map_err(|_| MaxError::InvalidParam(format!("bad list for `{key}`: `{v}`"))))
                .collect::<Result<Vec<usize>>>()
                .map(Some),
        }
    }

    /// Rejects run parameters that the command does not read.
    fn check_params(&self, allowed: &[&str]) -> Result<()> {
        match self.run_params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(MaxError::InvalidParam(format!("unexpected parameter `{k}`"))),
            None => Ok(()),
        }
    }
}

fn enum_name<T: Serialize>(x: &T) -> String {
    serde_json::to_value(x).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn read(path: &PathBuf) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn ingest_matrix(path: &PathBuf) -> Result<FiniteMaxMatrix> {
    FiniteMaxMatrix::from_json(&read(path)?)
}

/// Custom oracle specs carry a `kind`; plain matrices become zero-extended tables.
pub fn ingest_oracle(path: &PathBuf) -> Result<MatrixOracle> {
    let text = read(path)?;
    let mut v: Value = serde_json::from_str(&text)?;
    if let Some(obj) = v.as_object_mut() {
        if !obj.contains_key("kind") {
            obj.insert("kind".into(), json!("table"));
        }
    }
    MatrixOracle::from_json(&v.to_string())
}

fn oracle(cfg: &RunConfig) -> Result<MatrixOracle> {
    match (&cfg.gallery, &cfg.input) {
        (Some(name), _) => gallery::gallery(name, &cfg.gallery_params),
        (None, Some(p)) => ingest_oracle(p),
        (None, None) => Err(MaxError::InvalidParam("an --input file or a --gallery name is required".into())),
    }
}

fn matrix(cfg: &RunConfig) -> Result<FiniteMaxMatrix> {
    match &cfg.input {
        Some(p) => ingest_matrix(p),
        None => Err(MaxError::InvalidParam("a finite --input matrix is required".into())),
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn spectrum_json(a: &FiniteMaxMatrix) -> Value {
    let s = spectral::finite_spectrum(a);
    let f = |v: &[MaxScalar]| v.iter().map(|x| x.to_f64()).collect::<Vec<_>>();
    json!({
        "n": a.n(),
        "radius": s.radius.to_f64(),
        "mu": s.mu.to_f64(),
        "local_radii": f(&s.local_radii),
        "point_spectrum": f(&s.point_spectrum),
        "critical_witness": s.critical_witness.map(|c| json!({
            "indices": c.one_based(),
            "geometric_mean": c.geometric_mean.to_f64(),
            "length": c.length,
        })),
    })
}

fn blocks_json(a: &FiniteMaxMatrix) -> Value {
    let d = blockform::fnf(a);
    let one = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    json!({
        "permutation": one(&d.permutation),
        "classes": d.classes.iter().map(|c| one(c)).collect::<Vec<_>>(),
        "class_radii": d.class_radii.iter().map(|r| r.to_f64()).collect::<Vec<_>>(),
        "trivial": d.trivial,
        "levels": d.levels.iter().map(|l| json!({"value": l.value.to_f64(), "indices": one(&l.indices)})).collect::<Vec<_>>(),
        "condensation_edges": d.condensation_edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect::<Vec<_>>(),
    })
}

fn default_ks(k: usize, n: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = [k / 4, k / 2, k].into_iter().filter(|&x| x >= 1 && x < n).collect();
    ks.dedup();
    if ks.is_empty() {
        ks.push(1);
    }
    ks
}

fn default_tails(n: usize) -> Vec<usize> {
    let mut s = vec![1];
    while s.last().unwrap() * 2 < n / 2 + 1 && s.last().unwrap() * 2 < n {
        s.push(s.last().unwrap() * 2);
    }
    s
}

fn run_estimate(cfg: &RunConfig, q: Quantity) -> Result<Value> {
    let o = oracle(cfg)?;
    let (n, k, tol) = (cfg.n_window, cfg.k, cfg.tol);
    let e = match q {
        Quantity::R => {
            cfg.check_params(&[])?;
            estimate::radius_estimate(&o, n, k, tol)?
        }
        Quantity::Mu => {
            cfg.check_params(&[])?;
            estimate::mu_estimate(&o, n, tol)?
        }
        Quantity::Rprime => {
            cfg.check_params(&["ks", "mode"])?;
            let ks = cfg.list("ks")?.unwrap_or_else(|| default_ks(k, n));
            let mode = match cfg.run_params.get("mode").map(String::as_str) {
                None | Some("auto") => PathMode::Auto,
                Some("exact") => PathMode::Exact,
                Some("heuristic") => PathMode::Heuristic,
                Some(other) => return Err(MaxError::InvalidParam(format!("unknown mode `{other}`"))),
            };
            estimate::r_prime_estimate(&o, n, &ks, mode, tol)?
        }
        Quantity::Ress => {
            cfg.check_params(&["tails"])?;
            let tails = cfg.list("tails")?.unwrap_or_else(|| default_tails(n));
            estimate::r_ess_estimate(&o, &tails, n, tol)?
        }
        Quantity::M => {
            cfg.check_params(&["J"])?;
            estimate::m_estimate(&o, cfg.param("J")?.unwrap_or(n), n, tol)?
        }
        Quantity::Me => {
            cfg.check_params(&["jwindow"])?;
            estimate::m_e_estimate(&o, cfg.param("jwindow")?.unwrap_or((n / 4).max(1)), n, tol)?
        }
        Quantity::Cej => {
            cfg.check_params(&["j", "t"])?;
            estimate::c_ej_estimate(&o, cfg.param("j")?.unwrap_or(1), cfg.required("t")?, n, k)?
        }
        Quantity::Local => {
            cfg.check_params(&["j"])?;
            estimate::local_radius_estimate(&o, cfg.param("j")?.unwrap_or(1), n, tol)?
        }
    };
    to_value(&e)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> FiniteMaxMatrix {
    FiniteMaxMatrix::from_fn(n, |_, _| if rng.gen_bool(0.5) { rng.gen_range(0.1..10.0) } else { 0.0 })
}

fn run_probe(cfg: &RunConfig, x: Experiment) -> Result<Value> {
    match x {
        Experiment::Ap => {
            cfg.check_params(&["t"])?;
            to_value(&estimate::ap_spectrum_probe(&oracle(cfg)?, cfg.required("t")?, cfg.n_window, cfg.k)?)
        }
        Experiment::Power => {
            cfg.check_params(&[])?;
            to_value(&estimate::power_bound_check(&oracle(cfg)?, cfg.n_window, cfg.k)?)
        }
        Experiment::Irreducible => {
            cfg.check_params(&[])?;
            to_value(&estimate::irreducibility_check(&oracle(cfg)?, cfg.n_window)?)
        }
        Experiment::Lipschitz => {
            cfg.check_params(&["k", "seed", "pairs", "n"])?;
            let k = cfg.param("k")?.unwrap_or(8usize);
            if cfg.input.is_some() || cfg.perturbed.is_some() {
                let (a, b) = (matrix(cfg)?, ingest_matrix(cfg.perturbed.as_ref().ok_or_else(|| {
                    MaxError::InvalidParam("--perturbed is required with --input".into())
                })?)?);
                return to_value(&continuity::lipschitz_power_bound_check(&a, &b, k)?);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.param("seed")?.unwrap_or(0));
            let pairs: usize = cfg.param("pairs")?.unwrap_or(100);
            let n: usize = cfg.param("n")?.unwrap_or(5);
            let mut violations = 0usize;
            let mut worst = 0.0f64;
            for _ in 0..pairs {
                let (a, b) = (random_matrix(&mut rng, n), random_matrix(&mut rng, n));
                let rep = continuity::lipschitz_power_bound_check(&a, &b, k)?;
                let ineq = &rep.inequalities[0];
                if !ineq.holds {
                    violations += 1;
                }
                if ineq.rhs > 0.0 {
                    worst = worst.max(ineq.lhs / ineq.rhs);
                }
            }
            Ok(json!({"pairs": pairs, "n": n, "k": k, "violations": violations, "max_lhs_over_rhs": worst}))
        }
        Experiment::Weaker => {
            cfg.check_params(&["eps"])?;
            let a = matrix(cfg)?;
            let b = ingest_matrix(cfg.perturbed.as_ref().ok_or_else(|| MaxError::InvalidParam("--perturbed is required".into()))?)?;
            let eps = match cfg.param("eps")? {
                Some(e) => e,
                None => spectral::radius_finite(&b).to_f64() / 2.0,
            };
            to_value(&continuity::weaker_holder_bound_check(&a, &b, eps)?)
        }
        Experiment::Kakutani => {
            cfg.check_params(&["m_max"])?;
            to_value(&continuity::kakutani_experiment(cfg.param("m_max")?.unwrap_or(10))?)
        }
        Experiment::Holder => {
            cfg.check_params(&["alpha", "ks"])?;
            let ks = cfg.list("ks")?.unwrap_or_else(|| vec![2, 4, 8]);
            to_value(&continuity::holder_experiment(cfg.param("alpha")?.unwrap_or(1.0), &ks)?)
        }
        Experiment::Counterexample => {
            cfg.check_params(&["eps", "eps_prime", "n"])?;
            to_value(&continuity::lipschitz_counterexample(
                cfg.param("eps")?.unwrap_or(0.5),
                cfg.param("eps_prime")?.unwrap_or(0.25),
                cfg.param("n")?.unwrap_or(8),
            )?)
        }
        Experiment::Semicontinuity => {
            cfg.check_params(&["ks", "len", "m_max"])?;
            let ks = cfg.list("ks")?.unwrap_or_else(|| vec![2, 4, 8, 16, 32, 64]);
            let mut out = Map::new();
            out.insert("mu_bump".into(), to_value(&continuity::mu_bump_experiment(&ks)?)?);
            let kak = continuity::kakutani_experiment(cfg.param("m_max")?.unwrap_or(6))?;
            out.insert(
                "kakutani".into(),
                json!({"r_cutoffs": kak.rows.iter().map(|r| r.r_cutoff).collect::<Vec<_>>(), "r_window_gelfand": kak.gelfand_value, "r_known": kak.r_known}),
            );
            if cfg.input.is_some() {
                let a = matrix(cfg)?;
                let e = FiniteMaxMatrix::from_fn(a.n(), |_, _| 1.0);
                let len = cfg.param("len")?.unwrap_or(64);
                for (name, kind) in [("bump", continuity::SequenceKind::Bump), ("shrink", continuity::SequenceKind::Shrink)] {
                    let seq = continuity::convergent_sequence(kind, &a, &e, len)?;
                    out.insert(name.into(), to_value(&continuity::semicontinuity_scan(&seq, &a, 1e-9)?)?);
                }
            }
            Ok(Value::Object(out))
        }
    }
}

fn gallery_show(cfg: &RunConfig, name: &str) -> Result<Value> {
    let params = match &cfg.gallery {
        Some(g) if g == name => cfg.gallery_params.clone(),
        _ => gallery::parse_params(cfg.run_params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().iter().map(String::as_str))?,
    };
    let o = gallery::gallery(name, &params)?;
    let info = REGISTRY.iter().find(|g| g.name == name).expect("registered");
    let w = cfg.n_window.min(8);
    let window = o.truncate(w)?.dense().to_rows();
    Ok(json!({
        "name": o.name,
        "params": info.params,
        "description": info.description,
        "norm_bound": o.norm_bound,
        "support": format!("{:?}", o.hints.support),
        "known": o.known,
        "window": window,
    }))
}

/// Runs a validated configuration and returns the report text.
pub fn run(cfg: &RunConfig) -> Result<String> {
    let report = match &cfg.command {
        Command::Spectrum => {
            cfg.check_params(&[])?;
            spectrum_json(&matrix(cfg)?)
        }
        Command::Estimate { quantity } => run_estimate(cfg, *quantity)?,
        Command::Eig => {
            cfg.check_params(&["i0", "t", "depth"])?;
            let c = estimate::eigenvector_construct(
                &oracle(cfg)?,
                cfg.param("i0")?.unwrap_or(1),
                cfg.required("t")?,
                cfg.n_window,
                cfg.param("depth")?,
            )?;
            to_value(&c)?
        }
        Command::Blocks => {
            cfg.check_params(&[])?;
            match (&cfg.input, &cfg.gallery) {
                (Some(_), _) => blocks_json(&matrix(cfg)?),
                (None, Some(_)) => to_value(&blockform::window_levels(&oracle(cfg)?, cfg.n_window)?)?,
                (None, None) => return Err(MaxError::InvalidParam("an --input file or a --gallery name is required".into())),
            }
        }
        Command::Probe { experiment } => run_probe(cfg, *experiment)?,
        Command::Gallery { action: GalleryAction::List } => json!({
            "entries": REGISTRY.iter().map(|g| json!({"name": g.name, "params": g.params, "description": g.description})).collect::<Vec<_>>()
        }),
        Command::Gallery { action: GalleryAction::Show { name } } => gallery_show(cfg, name)?,
    };
    match cfg.format {
        Format::Json => {
            let mut obj = match report {
                Value::Object(m) => m,
                other => {
                    let mut m = Map::new();
                    m.insert("result".into(), other);
                    m
                }
            };
            obj.insert("config".into(), cfg.to_json());
            Ok(serde_json::to_string_pretty(&Value::Object(obj))? + "\n")
        }
        Format::Csv => csv_projection(&report),
    }
}

/// Series in a report as CSV: `schedule`, `rows` or `norms`.
pub fn csv_projection(report: &Value) -> Result<String> {
    let rows: Vec<Value> = if let Some(s) = report.get("schedule").and_then(Value::as_array) {
        s.clone()
    } else if let Some(s) = report.get("rows").and_then(Value::as_array) {
        s.clone()
    } else if let Some(s) = report.get("norms").and_then(Value::as_array) {
        s.iter().enumerate().map(|(k, v)| json!({"k": k + 1, "norm": v})).collect()
    } else {
        return Err(MaxError::InvalidParam("this report has no series to emit as CSV".into()));
    };
    let mut cols: Vec<String> = Vec::new();
    for r in &rows {
        if let Some(obj) = r.as_object() {
            for (k, v) in obj {
                if !v.is_array() && !v.is_object() && !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    let mut out = cols.join(",") + "\n";
    for r in &rows {
        let line: Vec<String> = cols
            .iter()
            .map(|c| match r.get(c) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
            })
            .collect();
        out += &line.join(",");
        out.push('\n');
    }
    Ok(out)
}

/// Exit status for an error: 2 validation, 3 oracle violation, 4 resource cap.
pub fn exit_code(e: &MaxError) -> i32 {
    match e {
        MaxError::OracleViolation { .. } => 3,
        MaxError::ResourceCap(_) | MaxError::PowerUnbounded { .. } => 4,
        _ => 2,
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("MAXSPEC_THREADS") {
        let n: usize = v.parse().map_err(|_| MaxError::InvalidParam(format!("MAXSPEC_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(MaxError::InvalidParam("MAXSPEC_THREADS must be positive".into()));
        }
        // a pool may already exist when embedded; the cap then stays as it was
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses arguments, runs, writes the report and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|_| RunConfig::from_cli(cli)).and_then(|cfg| {
        let text = run(&cfg)?;
        match &cfg.output {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
