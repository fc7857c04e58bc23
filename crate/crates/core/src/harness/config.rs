use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::benchgen::{GnParams, LfrParams};
use crate::error::{Error, Result};
use crate::revision::{Variant, DEFAULT_ALPHA};
use crate::{nmf, spectral};

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Gn(GnParams),
    Lfr(LfrParams),
    Files { edges: PathBuf, labels: PathBuf },
}

impl Dataset {
    pub fn is_synthetic(&self) -> bool {
        !matches!(self, Dataset::Files { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Nmf,
    Spectral,
    /// Partitions computed by an outside tool, read from `external_dir`.
    External,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Nmf => "nmf",
            Method::Spectral => "spectral",
            Method::External => "external",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Nmf, Method::Spectral, Method::External]
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

pub const DEFAULT_FRACTIONS: [f64; 5] = [0.0, 0.05, 0.10, 0.15, 0.20];
pub const DEFAULT_TRIALS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    pub methods: Vec<Method>,
    pub variants: Vec<Variant>,
    pub fractions: Vec<f64>,
    pub trials: usize,
    /// Community count; `None` uses the ground truth's.
    pub k: Option<usize>,
    pub master_seed: u64,
    pub alpha: f64,
    pub nmf_iterations: usize,
    pub laplacian_exponent: f64,
    /// Reuse one synthetic graph for every trial.
    pub fixed_graph: bool,
    pub external_dir: Option<PathBuf>,
    /// Where to write each trial's revised matrices as weighted edge lists.
    pub export_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: Dataset::Gn(GnParams::default()),
            methods: vec![Method::Nmf],
            variants: vec![Variant::A, Variant::B1, Variant::B2],
            fractions: DEFAULT_FRACTIONS.to_vec(),
            trials: DEFAULT_TRIALS,
            k: None,
            master_seed: 0,
            alpha: DEFAULT_ALPHA,
            nmf_iterations: nmf::DEFAULT_ITERATIONS,
            laplacian_exponent: spectral::DEFAULT_EXPONENT,
            fixed_graph: false,
            external_dir: None,
            export_dir: None,
        }
    }
}

const GN_KEYS: [&str; 4] = ["z_in", "z_out", "groups", "group_size"];
const LFR_KEYS: [&str; 8] = [
    "n", "avg_deg", "max_deg", "gamma", "beta", "mu", "min_comm", "max_comm",
];
const FILE_KEYS: [&str; 2] = ["edges", "labels"];
const COMMON_KEYS: [&str; 13] = [
    "dataset",
    "methods",
    "variants",
    "fractions",
    "trials",
    "k",
    "seed",
    "alpha",
    "iterations",
    "exponent",
    "fixed_graph",
    "external_dir",
    "export_dir",
];

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.k == Some(0) {
            return bad("k must be at least 1".into());
        }
        if self.methods.is_empty() || self.variants.is_empty() || self.fractions.is_empty() {
            return bad("methods, variants and fractions must be non-empty".into());
        }
        if let Some(f) = self.fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return bad(format!("fraction {f} outside [0, 1]"));
        }
        if self.fractions.windows(2).any(|w| w[0] >= w[1]) {
            return bad("fractions must be strictly ascending".into());
        }
        if has_duplicates(&self.methods) || has_duplicates(&self.variants) {
            return bad("methods and variants must not repeat".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha = {} must be positive", self.alpha));
        }
        if self.nmf_iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if self.methods.contains(&Method::External) && self.external_dir.is_none() {
            return bad("method external needs external_dir".into());
        }
        Ok(())
    }

    /// Builds a config from `key = value` settings; absent keys keep their
    /// defaults. Dataset parameters must match the chosen `dataset`.
    pub fn from_settings(settings: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = Self::default();
        let dataset = settings.get("dataset").map_or("gn", String::as_str);
        let dataset_keys: &[&str] = match dataset {
            "gn" => &GN_KEYS,
            "lfr" => &LFR_KEYS,
            "files" => &FILE_KEYS,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown dataset {other:?}"
                )))
            }
        };
        for key in settings.keys() {
            if !COMMON_KEYS.contains(&key.as_str()) && !dataset_keys.contains(&key.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "key {key:?} does not apply to dataset {dataset}"
                )));
            }
        }
        let get = |key: &str| settings.get(key).map(String::as_str);

        c.dataset = match dataset {
            "gn" => {
                let mut p = GnParams::default();
                set(&mut p.z_in, get("z_in"), "z_in")?;
                set(&mut p.z_out, get("z_out"), "z_out")?;
                set(&mut p.groups, get("groups"), "groups")?;
                set(&mut p.group_size, get("group_size"), "group_size")?;
                Dataset::Gn(p)
            }
            "lfr" => {
                let mut p = LfrParams::default();
                set(&mut p.n, get("n"), "n")?;
                set(&mut p.avg_deg, get("avg_deg"), "avg_deg")?;
                set(&mut p.max_deg, get("max_deg"), "max_deg")?;
                set(&mut p.gamma, get("gamma"), "gamma")?;
                set(&mut p.beta, get("beta"), "beta")?;
                set(&mut p.mu, get("mu"), "mu")?;
                if let Some(v) = get("min_comm") {
                    p.min_comm = Some(parse(v, "min_comm")?);
                }
                if let Some(v) = get("max_comm") {
                    p.max_comm = Some(parse(v, "max_comm")?);
                }
                Dataset::Lfr(p)
            }
            _ => {
                let path = |key: &str| {
                    get(key).map(PathBuf::from).ok_or_else(|| {
                        Error::InvalidParameter(format!("dataset files needs {key}"))
                    })
                };
                Dataset::Files {
                    edges: path("edges")?,
                    labels: path("labels")?,
                }
            }
        };

        if let Some(v) = get("methods") {
            c.methods = parse_list(v, "methods")?;
        }
        if let Some(v) = get("variants") {
            c.variants = parse_list(v, "variants")?;
        }
        if let Some(v) = get("fractions") {
            c.fractions = parse_list(v, "fractions")?;
        }
        set(&mut c.trials, get("trials"), "trials")?;
        if let Some(v) = get("k") {
            c.k = Some(parse(v, "k")?);
        }
        set(&mut c.master_seed, get("seed"), "seed")?;
        set(&mut c.alpha, get("alpha"), "alpha")?;
        set(&mut c.nmf_iterations, get("iterations"), "iterations")?;
        set(&mut c.laplacian_exponent, get("exponent"), "exponent")?;
        set(&mut c.fixed_graph, get("fixed_graph"), "fixed_graph")?;
        c.external_dir = get("external_dir").map(PathBuf::from);
        c.export_dir = get("export_dir").map(PathBuf::from);
        c.validate()?;
        Ok(c)
    }
}

fn has_duplicates<T: Ord + Copy>(items: &[T]) -> bool {
    let mut sorted = items.to_vec();
    sorted.sort();
    sorted.windows(2).any(|w| w[0] == w[1])
}

fn parse<T: FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{key} = {value:?} is not valid")))
}

fn set<T: FromStr>(slot: &mut T, value: Option<&str>, key: &str) -> Result<()> {
    if let Some(v) = value {
        *slot = parse(v, key)?;
    }
    Ok(())
}

fn parse_list<T: FromStr>(value: &str, key: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s, key))
        .collect()
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// repeated keys are an error.
pub fn parse_settings(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(idx + 1, "expected key = value"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::parse(idx + 1, "empty key"));
        }
        if out
            .insert(key.to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(Error::parse(idx + 1, format!("key {key:?} repeated")));
        }
    }
    Ok(out)
}
