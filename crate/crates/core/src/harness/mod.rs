//! Seeded multi-trial experiments, the football case study, and result
//! emission.
//!
//! Trial `t` draws everything from `seed::trial_seed(master_seed, t)`: the
//! graph (synthetic datasets), one constraint sample per fraction, and the
//! detector initializations. All variants of one trial and fraction share the
//! same sample and the same detector seed, so variant comparisons are paired.

mod case_study;
mod config;
mod report;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

pub use case_study::{run_case_study, CaseStudyReport, CaseStudyRow, DetectionOutcome};
pub use config::{
    parse_settings, Dataset, ExperimentConfig, Method, DEFAULT_FRACTIONS, DEFAULT_TRIALS,
};
pub use report::{emit_results, write_csv, write_svg, CSV_HEADER};

use crate::benchgen::{generate_gn, generate_lfr};
use crate::constraints::sample_constraints;
use crate::error::{Error, Result};
use crate::graph::{Graph, GroundTruth};
use crate::metrics::nmi_against_truth;
use crate::nmf::{nmf_communities, NmfOptions};
use crate::partition::Partition;
use crate::revision::{revise, Variant};
use crate::seed;
use crate::spectral::{spectral_cluster, SpectralOptions};

const GRAPH_STREAM: u64 = 1;
const SAMPLE_STREAM: u64 = 2;
const NMF_STREAM: u64 = 3;
const SPECTRAL_STREAM: u64 = 4;

/// A trial fails the whole run once more than this share of trials error.
pub const MAX_FAILED_SHARE: f64 = 0.2;

/// NMI and constraint counts of one (method, variant, fraction) cell in one
/// trial.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub method: Method,
    pub variant: Variant,
    pub fraction: f64,
    pub nmi: f64,
    pub constraints_before: usize,
    pub constraints_after: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub cells: Vec<CellOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    pub variant: Variant,
    pub fraction: f64,
    pub mean_nmi: f64,
    /// Sample standard deviation; zero for a single trial.
    pub std_nmi: f64,
    pub constraints_before: f64,
    pub constraints_after: f64,
    /// Per-trial NMI in trial order, failed trials omitted.
    pub nmi_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<TrialFailure>,
}

impl ResultTable {
    pub fn row(&self, method: Method, variant: Variant, fraction: f64) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.variant == variant && r.fraction == fraction)
    }
}

/// A configuration with its file dataset (if any) loaded.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    fixed: Option<(Graph, GroundTruth)>,
}

impl Experiment {
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let fixed = match &config.dataset {
            Dataset::Files { edges, labels } => Some(load_dataset(edges, labels)?),
            _ if config.fixed_graph => Some(generate(
                &config.dataset,
                seed::derive(config.master_seed, GRAPH_STREAM),
            )?),
            _ => None,
        };
        Ok(Self { config, fixed })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn run_trial(&self, trial: usize) -> Result<TrialOutcome> {
        let c = &self.config;
        let ts = seed::trial_seed(c.master_seed, trial);
        let generated;
        let (graph, truth) = match &self.fixed {
            Some((g, gt)) => (g, gt),
            None => {
                generated = generate(&c.dataset, seed::derive(ts, GRAPH_STREAM))?;
                (&generated.0, &generated.1)
            }
        };
        let n = graph.node_count();
        let k = c.k.unwrap_or_else(|| truth.community_count());
        let a = graph.adjacency();
        let nmf_opts = NmfOptions {
            iterations: c.nmf_iterations,
            tolerance: None,
        };
        let spectral_opts = SpectralOptions {
            exponent: c.laplacian_exponent,
            ..SpectralOptions::default()
        };

        let mut cells = Vec::new();
        for (fi, &fraction) in c.fractions.iter().enumerate() {
            let mut rng = seed::rng(seed::derive(seed::derive(ts, SAMPLE_STREAM), fi as u64));
            let sample = sample_constraints(truth, n, fraction, &mut rng)?;
            for &variant in &c.variants {
                let (before, after) = variant.constraints(&sample)?;
                let b = revise(&a, &after, c.alpha)?;
                if let Some(dir) = &c.export_dir {
                    export_matrix(dir, variant, fraction, trial, b.matrix())?;
                }
                for &method in &c.methods {
                    let method_seed = |stream| seed::derive(seed::derive(ts, stream), fi as u64);
                    let partition = match method {
                        Method::Nmf => {
                            nmf_communities(&b, k, &nmf_opts, method_seed(NMF_STREAM))?.0
                        }
                        Method::Spectral => {
                            spectral_cluster(&b, k, &spectral_opts, method_seed(SPECTRAL_STREAM))?
                                .partition
                        }
                        Method::External => {
                            let dir = c.external_dir.as_deref().expect("validated");
                            load_external(dir, variant, fraction, trial, n)?
                        }
                    };
                    cells.push(CellOutcome {
                        method,
                        variant,
                        fraction,
                        nmi: nmi_against_truth(&partition, truth)?,
                        constraints_before: before.len(),
                        constraints_after: after.len(),
                    });
                }
            }
        }
        Ok(TrialOutcome { trial, cells })
    }

    /// Runs every trial in parallel and aggregates in trial order.
    pub fn run(&self) -> Result<ResultTable> {
        let trials = self.config.trials;
        let outcomes: Vec<Result<TrialOutcome>> = (0..trials)
            .into_par_iter()
            .map(|t| self.run_trial(t))
            .collect();

        let mut done = Vec::new();
        let mut failures = Vec::new();
        for (t, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(o) => done.push(o),
                Err(e) => {
                    log::warn!("trial {t} failed: {e}");
                    failures.push(TrialFailure {
                        trial: t,
                        message: e.to_string(),
                    });
                }
            }
        }
        if failures.len() as f64 > MAX_FAILED_SHARE * trials as f64 {
            return Err(Error::TrialFailures {
                failed: failures.len(),
                trials,
            });
        }
        Ok(ResultTable {
            rows: aggregate(&self.config, &done),
            failures,
        })
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    Experiment::prepare(config.clone())?.run()
}

/// Rows ordered by method, variant (config order), then fraction.
fn aggregate(c: &ExperimentConfig, trials: &[TrialOutcome]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for &method in &c.methods {
        for &variant in &c.variants {
            for &fraction in &c.fractions {
                let cells: Vec<&CellOutcome> = trials
                    .iter()
                    .flat_map(|t| &t.cells)
                    .filter(|x| {
                        x.method == method && x.variant == variant && x.fraction == fraction
                    })
                    .collect();
                let nmi_values: Vec<f64> = cells.iter().map(|x| x.nmi).collect();
                let (mean_nmi, std_nmi) = mean_and_std(&nmi_values);
                let before: Vec<f64> = cells.iter().map(|x| x.constraints_before as f64).collect();
                let after: Vec<f64> = cells.iter().map(|x| x.constraints_after as f64).collect();
                rows.push(ResultRow {
                    method,
                    variant,
                    fraction,
                    mean_nmi,
                    std_nmi,
                    constraints_before: mean_and_std(&before).0,
                    constraints_after: mean_and_std(&after).0,
                    nmi_values,
                });
            }
        }
    }
    rows
}

/// Mean and sample standard deviation. An empty slice gives NaN for both.
pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn generate(dataset: &Dataset, seed: u64) -> Result<(Graph, GroundTruth)> {
    match dataset {
        Dataset::Gn(p) => generate_gn(p, seed),
        Dataset::Lfr(p) => generate_lfr(p, seed),
        Dataset::Files { .. } => unreachable!("file datasets are loaded once"),
    }
}

/// Reads an edge list and a label file and checks they agree on node range.
pub fn load_dataset(edges: &Path, labels: &Path) -> Result<(Graph, GroundTruth)> {
    let graph = Graph::load_edge_list(BufReader::new(File::open(edges)?))?;
    let truth = GroundTruth::load_labels(BufReader::new(File::open(labels)?))?;
    truth.check_range(graph.node_count())?;
    Ok((graph, truth))
}

/// File name under `external_dir` holding the outside tool's partition.
pub fn external_file_name(variant: Variant, fraction: f64, trial: usize) -> String {
    format!("{}_f{}_t{}.tsv", variant.name(), fraction, trial)
}

fn load_external(
    dir: &Path,
    variant: Variant,
    fraction: f64,
    trial: usize,
    n: usize,
) -> Result<Partition> {
    let path = dir.join(external_file_name(variant, fraction, trial));
    import_external_partition(&path, Some(n))
}

/// Reads a `node<TAB>community` partition produced outside this crate.
pub fn import_external_partition(path: &Path, n: Option<usize>) -> Result<Partition> {
    Partition::load(BufReader::new(File::open(path)?), n)
}

/// Writes the upper triangle of `b` as `i<TAB>j<TAB>weight` rows (1-based),
/// the usual input of weighted community-detection tools.
fn export_matrix(
    dir: &Path,
    variant: Variant,
    fraction: f64,
    trial: usize,
    b: &nalgebra::DMatrix<f64>,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let name = format!("{}_f{}_t{}.edges.tsv", variant.name(), fraction, trial);
    let mut out = BufWriter::new(File::create(dir.join(name))?);
    for i in 0..b.nrows() {
        for j in (i + 1)..b.ncols() {
            if b[(i, j)] != 0.0 {
                writeln!(out, "{}\t{}\t{}", i + 1, j + 1, b[(i, j)])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::GnParams;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            dataset: Dataset::Gn(GnParams {
                z_in: 6.0,
                z_out: 1.0,
                groups: 2,
                group_size: 16,
            }),
            fractions: vec![0.0, 0.1],
            trials: 3,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn one_row_per_cell() {
        let t = run_experiment(&small()).unwrap();
        assert_eq!(t.rows.len(), 3 * 2);
        assert!(t.failures.is_empty());
        assert!(t.rows.iter().all(|r| r.nmi_values.len() == 3));
    }

    #[test]
    fn zero_fraction_variants_coincide() {
        let t = run_experiment(&small()).unwrap();
        let a = t.row(Method::Nmf, Variant::A, 0.0).unwrap();
        for v in [Variant::B1, Variant::B2] {
            let r = t.row(Method::Nmf, v, 0.0).unwrap();
            assert_eq!(r.nmi_values, a.nmi_values);
            assert_eq!(r.constraints_after, 0.0);
        }
    }

    #[test]
    fn enhancement_never_lowers_counts() {
        let t = run_experiment(&small()).unwrap();
        assert!(t
            .rows
            .iter()
            .all(|r| r.constraints_after >= r.constraints_before));
        let b2 = t.row(Method::Nmf, Variant::B2, 0.1).unwrap();
        let b1 = t.row(Method::Nmf, Variant::B1, 0.1).unwrap();
        assert_eq!(b1.constraints_before, b2.constraints_before);
        assert!(b2.constraints_after > b1.constraints_after);
    }

    #[test]
    fn too_many_failures_abort() {
        let mut c = small();
        // Every trial fails: k above the node count.
        c.k = Some(100);
        assert!(matches!(
            run_experiment(&c),
            Err(Error::TrialFailures {
                failed: 3,
                trials: 3
            })
        ));
    }

    #[test]
    fn statistics() {
        let (m, s) = mean_and_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_std(&[0.7]), (0.7, 0.0));
    }
}
