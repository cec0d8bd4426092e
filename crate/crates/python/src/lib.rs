//! Python bindings: graphs, graph sums, Poisson presets, operator evaluation,
//! the Hochschild structure and the Maurer–Cartan solver.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dqgraph::eval::apply_graph;
use dqgraph::homological::{graph_compose, graph_delta, graph_gerstenhaber, leibniz_generators};
use dqgraph::mc::{self, SolverConfig, StarSeries};
use dqgraph::poisson::{parse_preset, PoissonStructure};
use dqgraph::rational::{format_ratio, parse_rational};
use dqgraph::{canonical_form, enumerate_graphs, parse_graph, DirectedGraph, GraphFilter, Poly};

fn py_err(e: dqgraph::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.kind()))
}

/// An admissible graph in the text encoding `n m ; v: a b / ...`.
#[pyclass(name = "Graph", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyGraph {
    inner: DirectedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: parse_graph(text).map_err(py_err)? })
    }

    /// Number of internal vertices.
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Number of arguments.
    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn has_wheel(&self) -> bool {
        self.inner.has_wheel()
    }

    /// `(representative, sign)` with `self = sign * representative`.
    fn canonical(&self) -> (PyGraph, i8) {
        let class = canonical_form(&self.inner);
        (PyGraph { inner: class.rep }, class.sign)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Graph('{}')", self.inner)
    }
}

/// A rational combination of canonical graph classes of one arity.
#[pyclass(name = "GraphSum", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyGraphSum {
    inner: dqgraph::GraphSum,
}

#[pymethods]
impl PyGraphSum {
    /// Parses the `p/q <tab> graph` file format.
    #[new]
    #[pyo3(signature = (text = "", arity = None))]
    fn new(text: &str, arity: Option<usize>) -> PyResult<Self> {
        Ok(PyGraphSum { inner: dqgraph::GraphSum::parse(text, arity).map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (graph, coefficient = "1"))]
    fn from_graph(graph: &PyGraph, coefficient: &str) -> PyResult<Self> {
        let c = parse_rational(coefficient).map_err(py_err)?;
        Ok(PyGraphSum { inner: dqgraph::GraphSum::from_graph(&graph.inner).scale(&c) })
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    /// `[(coefficient, graph)]` in canonical order; coefficients as `p/q`.
    fn terms(&self) -> Vec<(String, PyGraph)> {
        self.inner.terms().map(|(g, c)| (format_ratio(c), PyGraph { inner: g.clone() })).collect()
    }

    fn coefficient(&self, graph: &PyGraph) -> String {
        let class = canonical_form(&graph.inner);
        let c = self.inner.coefficient(&class.rep) * dqgraph::rational::int(i64::from(class.sign));
        format_ratio(&c)
    }

    fn is_wheel_free(&self) -> bool {
        self.inner.is_wheel_free()
    }

    fn scale(&self, coefficient: &str) -> PyResult<Self> {
        let c = parse_rational(coefficient).map_err(py_err)?;
        Ok(PyGraphSum { inner: self.inner.scale(&c) })
    }

    /// Hochschild differential.
    fn delta(&self) -> Self {
        PyGraphSum { inner: graph_delta(&self.inner) }
    }

    /// Insertion composition `self ∘ other`.
    fn compose(&self, other: &PyGraphSum) -> Self {
        PyGraphSum { inner: graph_compose(&self.inner, &other.inner) }
    }

    /// Gerstenhaber bracket `[self, other]`.
    fn bracket(&self, other: &PyGraphSum) -> Self {
        PyGraphSum { inner: graph_gerstenhaber(&self.inner, &other.inner) }
    }

    /// Applies the operator on a Poisson structure to polynomial arguments.
    fn apply(&self, poisson: &PyPoisson, args: Vec<String>) -> PyResult<String> {
        let d = poisson.inner.dim();
        let args: Vec<Poly> = args.iter().map(|a| Poly::parse(a, d)).collect::<Result<_, _>>().map_err(py_err)?;
        Ok(apply_graph(&self.inner, &poisson.inner, &args).map_err(py_err)?.to_string())
    }

    fn __add__(&self, other: &PyGraphSum) -> PyResult<Self> {
        self.check_arity(other)?;
        Ok(PyGraphSum { inner: self.inner.add(&other.inner) })
    }

    fn __sub__(&self, other: &PyGraphSum) -> PyResult<Self> {
        self.check_arity(other)?;
        Ok(PyGraphSum { inner: self.inner.sub(&other.inner) })
    }

    fn __neg__(&self) -> Self {
        PyGraphSum { inner: self.inner.neg() }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("GraphSum(<{} terms, arity {}>)", self.inner.len(), self.inner.arity())
    }
}

impl PyGraphSum {
    fn check_arity(&self, other: &PyGraphSum) -> PyResult<()> {
        if self.inner.arity() != other.inner.arity() {
            return Err(PyValueError::new_err(format!(
                "arity_mismatch: {} vs {}",
                self.inner.arity(),
                other.inner.arity()
            )));
        }
        Ok(())
    }
}

/// A Poisson bivector from a named preset such as `so3` or `jacobian(x1*x2*x3)`.
#[pyclass(name = "Poisson", frozen)]
struct PyPoisson {
    inner: PoissonStructure,
}

#[pymethods]
impl PyPoisson {
    #[new]
    fn new(preset: &str) -> PyResult<Self> {
        Ok(PyPoisson { inner: parse_preset(preset).map_err(py_err)? })
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// `p^{ij}` with 0-based indices.
    fn entry(&self, i: usize, j: usize) -> PyResult<String> {
        let d = self.inner.dim();
        if i >= d || j >= d {
            return Err(PyValueError::new_err(format!("index_out_of_range: ({i}, {j}) in dimension {d}")));
        }
        Ok(self.inner.entry(i, j).to_string())
    }

    fn is_poisson(&self) -> bool {
        self.inner.is_poisson()
    }

    fn __repr__(&self) -> String {
        format!("Poisson('{}')", self.inner.name())
    }
}

/// `(classes, labeled_count)` for `K_{n,m}` under a filter.
#[pyfunction]
#[pyo3(signature = (n, m, filter = "all"))]
fn enumerate(n: usize, m: usize, filter: &str) -> PyResult<(Vec<PyGraph>, u64)> {
    let filter: GraphFilter = filter.parse().map_err(py_err)?;
    let e = enumerate_graphs(n, m, filter).map_err(py_err)?;
    Ok((e.classes.into_iter().map(|inner| PyGraph { inner }).collect(), e.labeled_count))
}

/// `[(skeleton, expansion)]` for Leibniz generators with `n` vertices in total.
#[pyfunction]
#[pyo3(signature = (n, m = 3, wheel_free = false))]
fn leibniz(n: usize, m: usize, wheel_free: bool) -> PyResult<Vec<(String, PyGraphSum)>> {
    let gens = leibniz_generators(n, m, wheel_free).map_err(py_err)?;
    Ok(gens.into_iter().map(|g| (g.skeleton.to_string(), PyGraphSum { inner: g.expansion })).collect())
}

/// Kontsevich's star-product through order 2, in the series file format.
#[pyfunction]
fn kontsevich_k2() -> String {
    mc::kontsevich_k2().to_string()
}

fn series_from(text: &str) -> PyResult<StarSeries> {
    mc::named_series(text).or_else(|_| StarSeries::parse(text)).map_err(py_err)
}

/// Number of monomial triples of degree ≤ `degree` on which the order-`k`
/// associativity defect of a series does not vanish.
#[pyfunction]
fn verify_assoc(series: &str, order: usize, preset: &str, degree: u32) -> PyResult<usize> {
    let s = series_from(series)?;
    let p = parse_preset(preset).map_err(py_err)?;
    Ok(mc::residual_on_triples(&s, order, &p, degree).map_err(py_err)?.len())
}

/// Solves the Maurer–Cartan equations up to `max_order`; returns the list of
/// per-order reports as JSON.
#[pyfunction]
#[pyo3(signature = (max_order, wheel_free = true, seed = 7))]
fn solve_mc(py: Python<'_>, max_order: usize, wheel_free: bool, seed: u64) -> PyResult<String> {
    let config = SolverConfig { wheel_free, max_order, seed, ..SolverConfig::default() };
    let (_, reports) = py.detach(|| mc::solve_series(max_order, &config)).map_err(py_err)?;
    serde_json::to_string(&reports).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// A basis of the kernel of the differential on `K_{n,2}` graph sums.
#[pyfunction]
#[pyo3(signature = (n, wheel_free = true, modulo_leibniz = false))]
fn cocycle_kernel(n: usize, wheel_free: bool, modulo_leibniz: bool) -> PyResult<Vec<PyGraphSum>> {
    let basis = mc::cocycle_kernel(n, wheel_free, modulo_leibniz).map_err(py_err)?;
    Ok(basis.into_iter().map(|inner| PyGraphSum { inner }).collect())
}

#[pymodule]
fn dqgraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyGraphSum>()?;
    m.add_class::<PyPoisson>()?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(leibniz, m)?)?;
    m.add_function(wrap_pyfunction!(kontsevich_k2, m)?)?;
    m.add_function(wrap_pyfunction!(verify_assoc, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mc, m)?)?;
    m.add_function(wrap_pyfunction!(cocycle_kernel, m)?)?;
    Ok(())
}
