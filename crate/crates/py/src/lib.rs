//! Python bindings for the biclique search library.
//!
//! Exposes the graph type, the two search drivers, snapshot distributions,
//! and the iteration math. Subsets cross the boundary as binary label
//! strings (`v1` first), matching the CLI output.

// The pymethods/pyfunction expansions insert error conversions that newer
// clippy releases flag; the lint fires inside generated code only.
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use qmbs::bigraph::{BipartiteGraph, Objective, SizeTarget, VertexSubset};
use qmbs::grover::{self, SearchError, SearchOptions};
use qmbs::oracle::build_plan_with_fallback;
use qmbs::sim::{self, Engine, EngineRun};

fn parse_objective(name: &str) -> PyResult<Objective> {
    match name {
        "edges" => Ok(Objective::Edges),
        "vertices" => Ok(Objective::Vertices),
        "balanced" => Ok(Objective::Balanced),
        other => Err(PyValueError::new_err(format!(
            "unknown objective {other:?}; expected \"edges\", \"vertices\" or \"balanced\""
        ))),
    }
}

fn parse_engine(name: &str) -> PyResult<Engine> {
    match name {
        "dense" => Ok(Engine::Dense),
        "tracked" => Ok(Engine::Tracked),
        other => Err(PyValueError::new_err(format!(
            "unknown engine {other:?}; expected \"dense\" or \"tracked\""
        ))),
    }
}

fn target_for(k: u32, at_least: bool) -> SizeTarget {
    if at_least {
        SizeTarget::AtLeast(k)
    } else {
        SizeTarget::Exact(k)
    }
}

fn parse_label(label: &str, width: u32) -> PyResult<VertexSubset> {
    if label.len() != width as usize || !label.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(PyValueError::new_err(format!(
            "label must be {width} binary digits, got {label:?}"
        )));
    }
    let bits = u32::from_str_radix(label, 2)
        .map_err(|e| PyValueError::new_err(format!("bad label {label:?}: {e}")))?;
    Ok(VertexSubset::from_bits(bits, width))
}

fn search_err(e: SearchError) -> PyErr {
    match e {
        SearchError::Sim(inner) => PyRuntimeError::new_err(inner.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Bipartite graph with 1-based vertex names on each side.
#[pyclass(frozen)]
struct Graph {
    inner: BipartiteGraph,
}

#[pymethods]
impl Graph {
    #[new]
    fn new(left: u32, right: u32, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        let inner = BipartiteGraph::new(left, right, edges)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Graph { inner })
    }

    /// Parses the text graph format (header `left right`, one edge per
    /// line).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner =
            BipartiteGraph::parse(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Graph { inner })
    }

    /// Seeded random graph with exactly `edges` edges.
    #[staticmethod]
    #[pyo3(signature = (left, right, edges, seed = 0))]
    fn synthetic(left: u32, right: u32, edges: usize, seed: u64) -> PyResult<Self> {
        let inner = BipartiteGraph::synthetic(left, right, edges, seed)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Graph { inner })
    }

    #[getter]
    fn left_count(&self) -> u32 {
        self.inner.left_count()
    }

    #[getter]
    fn right_count(&self) -> u32 {
        self.inner.right_count()
    }

    #[getter]
    fn vertex_count(&self) -> u32 {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Number of subsets that form a biclique of the targeted size.
    #[pyo3(signature = (objective, k, at_least = false))]
    fn count_bicliques(&self, objective: &str, k: u32, at_least: bool) -> PyResult<u64> {
        Ok(self.inner.count_bicliques(parse_objective(objective)?, target_for(k, at_least)))
    }

    /// Exhaustive optimum as `(label, size)`.
    fn brute_force_max(&self, objective: &str) -> PyResult<(String, u32)> {
        let (subset, size) = self
            .inner
            .brute_force_max(parse_objective(objective)?)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok((subset.label(), size))
    }

    /// Whether the labeled subset is a biclique of the targeted size.
    #[pyo3(signature = (label, objective, k, at_least = false))]
    fn satisfies(&self, label: &str, objective: &str, k: u32, at_least: bool) -> PyResult<bool> {
        let c = parse_label(label, self.inner.vertex_count())?;
        Ok(self.inner.satisfies(c, parse_objective(objective)?, target_for(k, at_least)))
    }

    /// Objective size of the labeled subset, or None when it is not a
    /// biclique.
    fn biclique_size(&self, label: &str, objective: &str) -> PyResult<Option<u32>> {
        let c = parse_label(label, self.inner.vertex_count())?;
        Ok(self.inner.biclique_size(c, parse_objective(objective)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(left={}, right={}, edges={})",
            self.inner.left_count(),
            self.inner.right_count(),
            self.inner.edge_count(),
        )
    }
}

fn options(engine: &str, seed: u64, repeats: u32, fallback_iterations: usize) -> PyResult<SearchOptions> {
    Ok(SearchOptions { engine: parse_engine(engine)?, seed, repeats, fallback_iterations })
}

/// Amplified search for a biclique of one size. Returns a dict with the
/// exact solution count, rounds run, measurement attempts, and the verified
/// subset label (or None).
#[pyfunction]
#[pyo3(signature = (graph, k, objective = "edges", at_least = false, engine = "tracked",
                    seed = 0, repeats = 3, fallback_iterations = 0))]
#[allow(clippy::too_many_arguments)]
fn search_fixed<'py>(
    py: Python<'py>,
    graph: &Graph,
    k: u32,
    objective: &str,
    at_least: bool,
    engine: &str,
    seed: u64,
    repeats: u32,
    fallback_iterations: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = options(engine, seed, repeats, fallback_iterations)?;
    let r = grover::search_fixed(
        &graph.inner,
        parse_objective(objective)?,
        target_for(k, at_least),
        &opts,
    )
    .map_err(search_err)?;
    let out = PyDict::new_bound(py);
    out.set_item("solutions", r.solutions)?;
    out.set_item("iterations", r.iterations)?;
    out.set_item("attempts", r.attempts)?;
    out.set_item("subset", r.subset.map(|c| c.label()))?;
    out.set_item("verified", r.subset.is_some())?;
    Ok(out)
}

/// Maximum-biclique search. Returns a dict with the optimal size, the
/// witness label (or None), the verification flag, and the probe trace.
#[pyfunction]
#[pyo3(signature = (graph, objective = "edges", engine = "tracked", seed = 0, repeats = 3,
                    fallback_iterations = 0))]
fn search_max<'py>(
    py: Python<'py>,
    graph: &Graph,
    objective: &str,
    engine: &str,
    seed: u64,
    repeats: u32,
    fallback_iterations: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = options(engine, seed, repeats, fallback_iterations)?;
    let r = grover::search_max(&graph.inner, parse_objective(objective)?, &opts)
        .map_err(search_err)?;
    let probes = PyList::empty_bound(py);
    for p in &r.probes {
        let row = PyDict::new_bound(py);
        row.set_item("target", p.target.to_string())?;
        row.set_item("solutions", p.solutions)?;
        row.set_item("iterations", p.iterations)?;
        row.set_item("attempts", p.attempts)?;
        row.set_item("found", p.found.map(|c| c.label()))?;
        probes.append(row)?;
    }
    let out = PyDict::new_bound(py);
    out.set_item("objective", objective)?;
    out.set_item("size", r.size)?;
    out.set_item("subset", r.subset.map(|c| c.label()))?;
    out.set_item("verified", r.verified)?;
    out.set_item("probes", probes)?;
    Ok(out)
}

/// Exact vertex-register distributions of a fixed-size plan: one dict
/// (label -> probability) after the preparation and one after each
/// amplification round.
#[pyfunction]
#[pyo3(signature = (graph, k, objective = "edges", at_least = false, engine = "tracked",
                    fallback_iterations = 0))]
fn distributions<'py>(
    py: Python<'py>,
    graph: &Graph,
    k: u32,
    objective: &str,
    at_least: bool,
    engine: &str,
    fallback_iterations: usize,
) -> PyResult<Bound<'py, PyList>> {
    let g = &graph.inner;
    let objective = parse_objective(objective)?;
    let target = target_for(k, at_least);
    let solutions = g.count_bicliques(objective, target);
    let plan = build_plan_with_fallback(g, objective, target, solutions, fallback_iterations)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let run: EngineRun = sim::run_plan(&plan, parse_engine(engine)?)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let snapshots = PyList::empty_bound(py);
    for dist in &run.snapshots {
        let d = PyDict::new_bound(py);
        for label in 0..dist.len() as u32 {
            d.set_item(dist.label(label), dist.prob(label))?;
        }
        snapshots.append(d)?;
    }
    Ok(snapshots)
}

/// `floor(pi/4 * sqrt(space / solutions))`.
#[pyfunction]
fn iteration_count(space: u64, solutions: u64) -> PyResult<usize> {
    grover::iteration_count(space, solutions).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// `sin^2((2T+1) * asin(sqrt(solutions / space)))`.
#[pyfunction]
fn success_probability(space: u64, solutions: u64, iterations: usize) -> f64 {
    grover::success_probability(space, solutions, iterations)
}

#[pymodule]
fn qmbs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(search_fixed, m)?)?;
    m.add_function(wrap_pyfunction!(search_max, m)?)?;
    m.add_function(wrap_pyfunction!(distributions, m)?)?;
    m.add_function(wrap_pyfunction!(iteration_count, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability, m)?)?;
    Ok(())
}
