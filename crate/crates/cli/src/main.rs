use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use semicom::benchgen::{generate_gn, generate_lfr, GnParams, LfrParams};
use semicom::harness::{
    emit_results, import_external_partition, load_dataset, parse_settings, run_case_study,
    Experiment, ExperimentConfig,
};
use semicom::nmf::{nmf_communities, NmfOptions};
use semicom::spectral::{spectral_cluster, SpectralOptions};
use semicom::{
    build_variant, misclustered, nmi, nmi_against_truth, sample_constraints, seed, ConstraintSet,
    ErrorKind, Graph, GroundTruth, Partition, Variant,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Semi-supervised community detection with must-link / cannot-link pairs.
///
/// Node ids in every file are 1-based.
#[derive(Debug, Parser)]
#[command(name = "semicom", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Generate a benchmark graph and its ground truth.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Sample a fraction of labeled node pairs as ML/CL constraints.
    Sample(SampleArgs),
    /// Close a constraint set under the two inference rules.
    Enhance(EnhanceArgs),
    /// Write the revised objective matrix of a variant.
    Revise(ReviseArgs),
    /// Detect communities on a (revised) adjacency matrix.
    #[command(subcommand)]
    Detect(DetectCommand),
    /// Score a partition against ground truth or another partition.
    Nmi(NmiArgs),
    /// Run a seeded multi-trial experiment and write results.csv plus plots.
    Experiment(ExperimentArgs),
    /// NMF with and without enhancement on a labeled network, k = 11.
    CaseStudy(CaseStudyArgs),
    /// Validate a partition produced by an outside tool.
    ImportPartition(ImportArgs),
}

#[derive(Debug, Args)]
struct OutputFiles {
    /// Edge list output.
    #[arg(long)]
    edges: PathBuf,
    /// Ground-truth label output.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Planted partition: equal groups, z_in / z_out expected neighbors.
    Gn {
        #[arg(long, default_value_t = 6.0)]
        z_in: f64,
        #[arg(long, default_value_t = 10.0)]
        z_out: f64,
        #[arg(long, default_value_t = 4)]
        groups: usize,
        #[arg(long, default_value_t = 32)]
        group_size: usize,
        #[command(flatten)]
        out: OutputFiles,
    },
    /// Power-law degrees and community sizes with mixing parameter mu.
    Lfr {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 20.0)]
        avg_deg: f64,
        #[arg(long, default_value_t = 50)]
        max_deg: usize,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.9)]
        mu: f64,
        #[arg(long)]
        min_comm: Option<usize>,
        #[arg(long)]
        max_comm: Option<usize>,
        #[command(flatten)]
        out: OutputFiles,
    },
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constraint file output; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnhanceArgs {
    #[arg(long)]
    constraints: PathBuf,
    /// Node count; inferred from the largest id if absent.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MatrixInput {
    #[arg(long)]
    edges: PathBuf,
    /// Constraint file; required for every variant except A.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// A, B1, B2, B1_ML, B1_CL or B2_ML.
    #[arg(long, default_value = "A")]
    variant: Variant,
    #[arg(long, default_value_t = semicom::revision::DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Debug, Args)]
struct ReviseArgs {
    #[command(flatten)]
    input: MatrixInput,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    input: MatrixInput,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Partition output; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum DetectCommand {
    Nmf {
        #[command(flatten)]
        args: DetectArgs,
        #[arg(long, default_value_t = semicom::nmf::DEFAULT_ITERATIONS)]
        iterations: usize,
    },
    Spectral {
        #[command(flatten)]
        args: DetectArgs,
        /// Degree exponent of the normalization D^e B D^e.
        #[arg(
            long = "laplacian-exponent",
            visible_alias = "exponent",
            default_value_t = semicom::spectral::DEFAULT_EXPONENT,
            allow_hyphen_values = true
        )]
        exponent: f64,
    },
}

#[derive(Debug, Args)]
struct NmiArgs {
    #[arg(long)]
    partition: PathBuf,
    /// Ground-truth labels; also lists misclustered nodes.
    #[arg(long, conflicts_with = "other", required_unless_present = "other")]
    labels: Option<PathBuf>,
    /// Second partition over the same nodes.
    #[arg(long)]
    other: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// key = value settings file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra setting such as `mu=0.3`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// gn, lfr or files.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    edges: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    /// Comma list of nmf, spectral, external.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    variants: Option<String>,
    #[arg(long)]
    fractions: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(
        long = "laplacian-exponent",
        visible_alias = "exponent",
        allow_hyphen_values = true
    )]
    exponent: Option<String>,
    /// Reuse one synthetic graph across trials.
    #[arg(long)]
    fixed_graph: bool,
    /// Directory of `{variant}_f{fraction}_t{trial}.tsv` partitions.
    #[arg(long)]
    external_dir: Option<String>,
    /// Write each trial's revised matrices here as weighted edge lists.
    #[arg(long)]
    export_dir: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CaseStudyArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.2")]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write each arm's partition to `<dir>/f<fraction>_<arm>.tsv`.
    #[arg(long)]
    partitions: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ImportArgs {
    /// `node<TAB>community` file.
    #[arg(long)]
    file: PathBuf,
    /// Dataset edge list; every node must be covered.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Ground truth to score against.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Canonical re-serialization output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = c
            .downcast_ref::<std::io::Error>()
            .or_else(|| match c.downcast_ref() {
                Some(semicom::Error::Io(io)) => Some(io),
                _ => None,
            });
        io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<semicom::Error>() {
            return match err.kind() {
                ErrorKind::Usage => EXIT_USAGE,
                ErrorKind::Numeric => EXIT_NUMERIC,
                ErrorKind::Data => EXIT_DATA,
            };
        }
    }
    EXIT_DATA
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(g) => gen(g),
        Command::Sample(a) => {
            let graph = read_graph(&a.edges)?;
            let truth = read_labels(&a.labels)?;
            let s = sample_constraints(
                &truth,
                graph.node_count(),
                a.fraction,
                &mut seed::rng(a.seed),
            )?;
            write_to(a.out.as_deref(), |w| s.write(w))
        }
        Command::Enhance(a) => {
            let s = read_constraints(&a.constraints, a.nodes)?;
            let (closed, report) = s.enhance()?;
            eprintln!(
                "{} ML / {} CL in, {} ML / {} CL out ({} must-link classes)",
                s.ml().len(),
                s.cl().len(),
                closed.ml().len(),
                closed.cl().len(),
                report.ml_classes.len()
            );
            write_to(a.out.as_deref(), |w| closed.write(w))
        }
        Command::Revise(a) => {
            let b = revised_matrix(&a.input)?;
            write_to(a.out.as_deref(), |w| b.write_tsv(w))
        }
        Command::Detect(d) => detect(d),
        Command::Nmi(a) => {
            let p = read_partition(&a.partition, None)?;
            if let Some(labels) = &a.labels {
                let truth = read_labels(labels)?;
                println!("nmi\t{:.6}", nmi_against_truth(&p, &truth)?);
                let wrong: Vec<String> = misclustered(&p, &truth)?
                    .iter()
                    .map(usize::to_string)
                    .collect();
                println!(
                    "misclustered\t{}",
                    if wrong.is_empty() {
                        "-".into()
                    } else {
                        wrong.join(",")
                    }
                );
            } else {
                let other = read_partition(
                    a.other.as_deref().expect("clap enforces one"),
                    Some(p.len()),
                )?;
                println!("nmi\t{:.6}", nmi(&p, &other)?);
            }
            Ok(())
        }
        Command::Experiment(a) => experiment(a),
        Command::CaseStudy(a) => {
            let (graph, truth) = load_dataset(&a.edges, &a.labels)?;
            let report = run_case_study(&graph, &truth, &a.fractions, a.seed)?;
            print!("{report}");
            if let Some(dir) = &a.partitions {
                fs::create_dir_all(dir)?;
                for r in &report.rows {
                    for (arm, o) in [("plain", &r.plain), ("enhanced", &r.enhanced)] {
                        let path = dir.join(format!("f{}_{arm}.tsv", r.fraction));
                        write_to(Some(&path), |w| o.partition.write(w))?;
                    }
                }
            }
            Ok(())
        }
        Command::ImportPartition(a) => {
            let n = a
                .edges
                .as_deref()
                .map(read_graph)
                .transpose()?
                .map(|g| g.node_count());
            let p = import_external_partition(&a.file, n)
                .with_context(|| format!("importing {}", a.file.display()))?
                .canonical();
            eprintln!("{} nodes in {} communities", p.len(), p.community_count());
            if let Some(labels) = &a.labels {
                println!("nmi\t{:.6}", nmi_against_truth(&p, &read_labels(labels)?)?);
            }
            match &a.out {
                Some(path) => write_to(Some(path), |w| p.write(w)),
                None => Ok(()),
            }
        }
    }
}

fn gen(g: GenCommand) -> Result<()> {
    let ((graph, truth), out) = match g {
        GenCommand::Gn {
            z_in,
            z_out,
            groups,
            group_size,
            out,
        } => {
            let p = GnParams {
                z_in,
                z_out,
                groups,
                group_size,
            };
            (generate_gn(&p, out.seed)?, out)
        }
        GenCommand::Lfr {
            n,
            avg_deg,
            max_deg,
            gamma,
            beta,
            mu,
            min_comm,
            max_comm,
            out,
        } => {
            let p = LfrParams {
                n,
                avg_deg,
                max_deg,
                gamma,
                beta,
                mu,
                min_comm,
                max_comm,
                ..LfrParams::default()
            };
            (generate_lfr(&p, out.seed)?, out)
        }
    };
    write_to(Some(&out.edges), |w| graph.write_edge_list(w))?;
    write_to(Some(&out.labels), |w| {
        truth.write_labels(graph.node_count(), w)
    })?;
    eprintln!(
        "{} nodes, {} edges, {} communities",
        graph.node_count(),
        graph.edge_count(),
        truth.community_count()
    );
    Ok(())
}

fn detect(d: DetectCommand) -> Result<()> {
    let (partition, args) = match d {
        DetectCommand::Nmf { args, iterations } => {
            let b = revised_matrix(&args.input)?;
            let opts = NmfOptions {
                iterations,
                tolerance: None,
            };
            let (p, f) = nmf_communities(&b, args.k, &opts, args.seed)?;
            eprintln!("final objective {:.6}", f.final_objective());
            (p, args)
        }
        DetectCommand::Spectral { args, exponent } => {
            let b = revised_matrix(&args.input)?;
            let opts = SpectralOptions {
                exponent,
                ..SpectralOptions::default()
            };
            (
                spectral_cluster(&b, args.k, &opts, args.seed)?.partition,
                args,
            )
        }
    };
    write_to(args.out.as_deref(), |w| partition.write(w))
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let mut settings = match &a.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_settings(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => BTreeMap::new(),
    };
    let flags = [
        ("dataset", &a.dataset),
        ("edges", &a.edges),
        ("labels", &a.labels),
        ("methods", &a.methods),
        ("variants", &a.variants),
        ("fractions", &a.fractions),
        ("trials", &a.trials),
        ("k", &a.k),
        ("seed", &a.seed),
        ("alpha", &a.alpha),
        ("iterations", &a.iterations),
        ("exponent", &a.exponent),
        ("external_dir", &a.external_dir),
        ("export_dir", &a.export_dir),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            settings.insert(key.to_string(), v.clone());
        }
    }
    if a.fixed_graph {
        settings.insert("fixed_graph".into(), "true".into());
    }
    for entry in &a.set {
        let (key, value) = entry.split_once('=').ok_or_else(|| {
            semicom::Error::InvalidParameter(format!("--set {entry:?} is not KEY=VALUE"))
        })?;
        settings.insert(key.trim().to_string(), value.trim().to_string());
    }

    let config = ExperimentConfig::from_settings(&settings)?;
    let table = Experiment::prepare(config)?.run()?;
    for f in &table.failures {
        eprintln!("trial {} excluded: {}", f.trial, f.message);
    }
    for path in emit_results(&table, &a.out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn revised_matrix(input: &MatrixInput) -> Result<semicom::RevisedMatrix> {
    let graph = read_graph(&input.edges)?;
    let n = graph.node_count();
    let s = match &input.constraints {
        Some(path) => read_constraints(path, Some(n))?,
        None if input.variant == Variant::A => ConstraintSet::new(n),
        None => anyhow::bail!(semicom::Error::InvalidParameter(format!(
            "variant {} needs --constraints",
            input.variant
        ))),
    };
    Ok(build_variant(
        &graph.adjacency(),
        &s,
        input.variant,
        input.alpha,
    )?)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::load_edge_list(open(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_labels(path: &Path) -> Result<GroundTruth> {
    GroundTruth::load_labels(open(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_constraints(path: &Path, n: Option<usize>) -> Result<ConstraintSet> {
    ConstraintSet::load(open(path)?, n).with_context(|| format!("in {}", path.display()))
}

fn read_partition(path: &Path, n: Option<usize>) -> Result<Partition> {
    Partition::load(open(path)?, n).with_context(|| format!("in {}", path.display()))
}

fn write_to<F>(path: Option<&Path>, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> semicom::Result<()>,
{
    match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(f);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
