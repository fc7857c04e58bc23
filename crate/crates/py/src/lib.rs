//! Python bindings. Node ids are 0-based here, unlike the 1-based files.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;

use semicom::benchgen::{self, GnParams, LfrParams};
use semicom::nmf::NmfOptions;
use semicom::spectral::SpectralOptions;
use semicom::{ErrorKind, Variant};

create_exception!(semicom_py, SemicomError, PyException);

fn to_py(e: semicom::Error) -> PyErr {
    match (&e, e.kind()) {
        (semicom::Error::Io(_), _) => PyOSError::new_err(e.to_string()),
        (_, ErrorKind::Usage) => PyValueError::new_err(e.to_string()),
        _ => SemicomError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for semicom::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[pyclass(name = "Graph", frozen)]
struct PyGraph(semicom::Graph);

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        semicom::Graph::from_edges(n, edges).py().map(Self)
    }

    /// Parses `u v` rows with 1-based ids.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        semicom::Graph::parse_edge_list(text).py().map(Self)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().collect()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.0.has_edge(u, v)
    }

    /// Dense adjacency with a unit diagonal.
    fn adjacency(&self) -> Vec<Vec<f64>> {
        rows(self.0.adjacency().matrix())
    }

    fn to_edge_list(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.0.write_edge_list(&mut buf).py()?;
        Ok(String::from_utf8_lossy(&buf).into_owned())
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.0.node_count(),
            self.0.edge_count()
        )
    }
}

#[pyclass(name = "GroundTruth", frozen)]
struct PyGroundTruth(semicom::GroundTruth);

#[pymethods]
impl PyGroundTruth {
    /// One community id per node.
    #[new]
    fn new(assignment: Vec<usize>) -> Self {
        Self(semicom::GroundTruth::from_assignment(&assignment))
    }

    /// Parses `node<TAB>label` rows; `-` marks an unlabeled node.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        semicom::GroundTruth::parse_labels(text).py().map(Self)
    }

    fn label(&self, node: usize) -> Option<usize> {
        self.0.label(node)
    }

    fn labeled_nodes(&self) -> Vec<usize> {
        self.0.labeled_nodes()
    }

    #[getter]
    fn community_count(&self) -> usize {
        self.0.community_count()
    }

    fn communities(&self) -> Vec<Vec<usize>> {
        self.0.communities()
    }
}

#[pyclass(name = "ConstraintSet", frozen)]
struct PyConstraintSet(semicom::ConstraintSet);

#[pymethods]
impl PyConstraintSet {
    #[new]
    #[pyo3(signature = (n, must_link = Vec::new(), cannot_link = Vec::new()))]
    fn new(
        n: usize,
        must_link: Vec<(usize, usize)>,
        cannot_link: Vec<(usize, usize)>,
    ) -> PyResult<Self> {
        semicom::ConstraintSet::from_pairs(n, must_link, cannot_link)
            .py()
            .map(Self)
    }

    #[getter]
    fn universe(&self) -> usize {
        self.0.universe()
    }

    #[getter]
    fn must_link(&self) -> Vec<(usize, usize)> {
        self.0.ml().iter().copied().collect()
    }

    #[getter]
    fn cannot_link(&self) -> Vec<(usize, usize)> {
        self.0.cl().iter().copied().collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn is_consistent(&self) -> bool {
        self.0.is_consistent()
    }

    /// Closure under both inference rules.
    fn enhance(&self) -> PyResult<Self> {
        self.0.enhance().py().map(|(s, _)| Self(s))
    }

    fn __repr__(&self) -> String {
        format!(
            "ConstraintSet(ml={}, cl={})",
            self.0.ml().len(),
            self.0.cl().len()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (z_in = 6.0, z_out = 10.0, groups = 4, group_size = 32, seed = 0))]
fn gn(
    z_in: f64,
    z_out: f64,
    groups: usize,
    group_size: usize,
    seed: u64,
) -> PyResult<(PyGraph, PyGroundTruth)> {
    let p = GnParams {
        z_in,
        z_out,
        groups,
        group_size,
    };
    let (g, gt) = benchgen::generate_gn(&p, seed).py()?;
    Ok((PyGraph(g), PyGroundTruth(gt)))
}

#[pyfunction]
#[pyo3(signature = (n = 1000, avg_deg = 20.0, max_deg = 50, gamma = 2.0, beta = 1.0, mu = 0.9, min_comm = None, max_comm = None, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn lfr(
    n: usize,
    avg_deg: f64,
    max_deg: usize,
    gamma: f64,
    beta: f64,
    mu: f64,
    min_comm: Option<usize>,
    max_comm: Option<usize>,
    seed: u64,
) -> PyResult<(PyGraph, PyGroundTruth)> {
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
    let (g, gt) = benchgen::generate_lfr(&p, seed).py()?;
    Ok((PyGraph(g), PyGroundTruth(gt)))
}

#[pyfunction]
#[pyo3(signature = (truth, n, fraction, seed = 0))]
fn sample_constraints(
    truth: &PyGroundTruth,
    n: usize,
    fraction: f64,
    seed: u64,
) -> PyResult<PyConstraintSet> {
    semicom::sample_constraints(&truth.0, n, fraction, &mut semicom::seed::rng(seed))
        .py()
        .map(PyConstraintSet)
}

fn revised(
    graph: &PyGraph,
    constraints: Option<&PyConstraintSet>,
    variant: &str,
    alpha: f64,
) -> PyResult<semicom::RevisedMatrix> {
    let variant: Variant = variant.parse().py()?;
    let empty;
    let s = match constraints {
        Some(s) => &s.0,
        None => {
            empty = semicom::ConstraintSet::new(graph.0.node_count());
            &empty
        }
    };
    semicom::build_variant(&graph.0.adjacency(), s, variant, alpha).py()
}

/// The revised matrix of a variant (A, B1, B2, B1_ML, B1_CL, B2_ML).
#[pyfunction]
#[pyo3(signature = (graph, constraints = None, variant = "B2", alpha = 2.0))]
fn revise(
    graph: &PyGraph,
    constraints: Option<&PyConstraintSet>,
    variant: &str,
    alpha: f64,
) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(revised(graph, constraints, variant, alpha)?.matrix()))
}

#[pyfunction]
#[pyo3(signature = (graph, k, constraints = None, variant = "A", alpha = 2.0, iterations = 100, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn nmf(
    py: Python<'_>,
    graph: &PyGraph,
    k: usize,
    constraints: Option<&PyConstraintSet>,
    variant: &str,
    alpha: f64,
    iterations: usize,
    seed: u64,
) -> PyResult<Vec<usize>> {
    let b = revised(graph, constraints, variant, alpha)?;
    let opts = NmfOptions {
        iterations,
        tolerance: None,
    };
    let (p, _) = py
        .detach(|| semicom::nmf::nmf_communities(&b, k, &opts, seed))
        .py()?;
    Ok(p.into_vec())
}

#[pyfunction]
#[pyo3(signature = (graph, k, constraints = None, variant = "A", alpha = 2.0, seed = 0))]
fn spectral(
    py: Python<'_>,
    graph: &PyGraph,
    k: usize,
    constraints: Option<&PyConstraintSet>,
    variant: &str,
    alpha: f64,
    seed: u64,
) -> PyResult<Vec<usize>> {
    let b = revised(graph, constraints, variant, alpha)?;
    let opts = SpectralOptions::default();
    let r = py
        .detach(|| semicom::spectral::spectral_cluster(&b, k, &opts, seed))
        .py()?;
    Ok(r.partition.into_vec())
}

/// NMI between two labelings of the same nodes.
#[pyfunction]
fn nmi(a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    semicom::metrics::nmi_labels(&a, &b).py()
}

/// NMI of a partition over the labeled nodes of `truth`.
#[pyfunction]
fn nmi_against_truth(partition: Vec<usize>, truth: &PyGroundTruth) -> PyResult<f64> {
    semicom::nmi_against_truth(&semicom::Partition::new(partition), &truth.0).py()
}

/// Labeled nodes (1-based ids) that the best cluster-to-label matching gets wrong.
#[pyfunction]
fn misclustered(partition: Vec<usize>, truth: &PyGroundTruth) -> PyResult<Vec<usize>> {
    semicom::misclustered(&semicom::Partition::new(partition), &truth.0).py()
}

#[pymodule]
fn semicom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SemicomError", m.py().get_type::<SemicomError>())?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyGroundTruth>()?;
    m.add_class::<PyConstraintSet>()?;
    m.add_function(wrap_pyfunction!(gn, m)?)?;
    m.add_function(wrap_pyfunction!(lfr, m)?)?;
    m.add_function(wrap_pyfunction!(sample_constraints, m)?)?;
    m.add_function(wrap_pyfunction!(revise, m)?)?;
    m.add_function(wrap_pyfunction!(nmf, m)?)?;
    m.add_function(wrap_pyfunction!(spectral, m)?)?;
    m.add_function(wrap_pyfunction!(nmi, m)?)?;
    m.add_function(wrap_pyfunction!(nmi_against_truth, m)?)?;
    m.add_function(wrap_pyfunction!(misclustered, m)?)?;
    Ok(())
}
