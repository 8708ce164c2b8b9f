//! Python bindings for `mdiforest-core`.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mdiforest_core::cart::{self, FitParams};
use mdiforest_core::forest::{self, ForestParams};
use mdiforest_core::geometry::Cell;
use mdiforest_core::mdi::{self, MdiReport};
use mdiforest_core::oracle::{self, PopulationModel, Rect, TieBreak};
use mdiforest_core::synthdata::{self, ComponentFn};
use mdiforest_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn cell(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Cell> {
    Cell::new(lower, upper).map_err(to_py)
}

#[pyclass(frozen)]
struct ModelSpec(synthdata::ModelSpec);

#[pymethods]
impl ModelSpec {
    #[staticmethod]
    #[pyo3(signature = (alphas, sigma=0.1))]
    fn linear(alphas: Vec<f64>, sigma: f64) -> PyResult<Self> {
        synthdata::ModelSpec::linear(alphas, sigma)
            .map(Self)
            .map_err(to_py)
    }

    /// Component names: `identity`, `centered_quadratic`, `sine`.
    #[staticmethod]
    #[pyo3(signature = (components, sigma=0.1))]
    fn additive(components: Vec<String>, sigma: f64) -> PyResult<Self> {
        let fns = components
            .iter()
            .map(|c| c.parse::<ComponentFn>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py)?;
        synthdata::ModelSpec::additive(fns, sigma)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (alpha, d, sigma=0.1))]
    fn multiplicative(alpha: f64, d: usize, sigma: f64) -> PyResult<Self> {
        synthdata::ModelSpec::multiplicative(alpha, d, sigma)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (beta, alpha, sigma=0.1))]
    fn correlated(beta: u32, alpha: f64, sigma: f64) -> PyResult<Self> {
        synthdata::ModelSpec::correlated(beta, alpha, sigma)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    /// Regression function at one point.
    fn regression(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.0.d() {
            return Err(to_py(Error::DimensionMismatch {
                expected: self.0.d(),
                got: x.len(),
            }));
        }
        Ok(self.0.regression(&x))
    }

    fn generate(&self, n: usize, seed: u64) -> PyResult<Dataset> {
        synthdata::generate(&self.0, n, seed)
            .map(Dataset)
            .map_err(to_py)
    }

    /// `V[m(X)]` and, where defined, the per-variable shares.
    fn population_variance(&self) -> PyResult<(f64, Vec<Option<f64>>)> {
        let r = synthdata::population_variance(&self.0).map_err(to_py)?;
        Ok((r.total, r.per_variable))
    }

    fn __repr__(&self) -> String {
        format!("ModelSpec({:?})", self.0)
    }
}

#[pyclass(frozen)]
struct Dataset(synthdata::Dataset);

#[pymethods]
impl Dataset {
    #[new]
    fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> PyResult<Self> {
        synthdata::Dataset::from_rows(&x, y)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        (0..self.0.n()).map(|i| self.0.row(i).to_vec()).collect()
    }

    #[getter]
    fn y(&self) -> Vec<f64> {
        self.0.y().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }
}

#[pyclass(frozen, get_all)]
struct Mdi {
    per_variable: Vec<f64>,
    total_mdi: f64,
    empirical_variance_y: f64,
    risk: f64,
    r_squared: f64,
    identity_residual: f64,
}

impl From<MdiReport> for Mdi {
    fn from(r: MdiReport) -> Self {
        Mdi {
            per_variable: r.per_variable,
            total_mdi: r.total_mdi,
            empirical_variance_y: r.empirical_variance_y,
            risk: r.risk,
            r_squared: r.r_squared,
            identity_residual: r.identity_residual,
        }
    }
}

#[pymethods]
impl Mdi {
    fn __repr__(&self) -> String {
        format!(
            "Mdi(per_variable={:?}, total_mdi={}, risk={})",
            self.per_variable, self.total_mdi, self.risk
        )
    }
}

#[pyclass(frozen)]
struct Tree(cart::Tree);

#[pymethods]
impl Tree {
    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    #[getter]
    fn n_leaves(&self) -> usize {
        self.0.n_leaves()
    }

    fn truncate(&self, k: usize) -> Tree {
        Tree(self.0.truncate(k))
    }

    fn predict(&self, points: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        points
            .iter()
            .map(|p| self.0.predict(p).map_err(to_py))
            .collect()
    }

    fn mdi(&self, data: &Dataset) -> PyResult<Mdi> {
        mdi::empirical_mdi(&self.0, &data.0)
            .map(Mdi::from)
            .map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }
}

#[pyfunction]
#[pyo3(signature = (data, nodesize=1, max_depth=None, mtry=None, seed=0))]
fn fit_tree(
    data: &Dataset,
    nodesize: usize,
    max_depth: Option<usize>,
    mtry: Option<usize>,
    seed: u64,
) -> PyResult<Tree> {
    let params = FitParams {
        nodesize,
        max_depth,
        mtry,
        seed,
    };
    cart::fit_tree(&data.0, &params).map(Tree).map_err(to_py)
}

#[pyclass(frozen)]
struct Forest(forest::Forest);

#[pymethods]
impl Forest {
    #[getter]
    fn n_trees(&self) -> usize {
        self.0.trees().len()
    }

    fn predict(&self, points: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        points
            .iter()
            .map(|p| self.0.predict(p).map_err(to_py))
            .collect()
    }

    /// Average of the per-tree decompositions on their bootstrap samples.
    fn mdi(&self, data: &Dataset) -> PyResult<Mdi> {
        forest::forest_mdi(&self.0, &data.0)
            .map(Mdi::from)
            .map_err(to_py)
    }
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (data, n_trees=100, mtry=None, nodesize=1, max_depth=None, bootstrap=true, seed=0))]
fn fit_forest(
    py: Python<'_>,
    data: &Dataset,
    n_trees: usize,
    mtry: Option<usize>,
    nodesize: usize,
    max_depth: Option<usize>,
    bootstrap: bool,
    seed: u64,
) -> PyResult<Forest> {
    let params = ForestParams {
        n_trees,
        mtry,
        nodesize,
        max_depth,
        bootstrap,
        seed,
    };
    py.detach(|| forest::fit_forest(&data.0, &params))
        .map(Forest)
        .map_err(to_py)
}

fn population_model(spec: &ModelSpec) -> PyResult<PopulationModel> {
    PopulationModel::from_spec(&spec.0).map_err(to_py)
}

/// Closed-form population criterion of splitting the cell at `s` along `j`
/// (0-based).
#[pyfunction]
fn population_criterion(
    model: &ModelSpec,
    lower: Vec<f64>,
    upper: Vec<f64>,
    j: usize,
    s: f64,
) -> PyResult<f64> {
    let m = population_model(model)?;
    let c = cell(lower, upper)?;
    c.check_split(&mdiforest_core::geometry::Split::new(j, s))
        .map_err(to_py)?;
    m.criterion(&Rect::<f64>::from_cell(&c), j, &s)
        .map_err(to_py)
}

/// Monte Carlo estimate of the same criterion: `(value, std_error, acceptance)`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (model, lower, upper, j, s, n_draws=100_000, seed=0))]
fn mc_criterion(
    py: Python<'_>,
    model: &ModelSpec,
    lower: Vec<f64>,
    upper: Vec<f64>,
    j: usize,
    s: f64,
    n_draws: usize,
    seed: u64,
) -> PyResult<(f64, f64, f64)> {
    let c = cell(lower, upper)?;
    let e = py
        .detach(|| oracle::mc_criterion(&model.0, &c, j, s, n_draws, seed))
        .map_err(to_py)?;
    Ok((e.value, e.std_error, e.acceptance_rate))
}

/// Population MDI of the depth-`k` theoretical tree.
#[pyfunction]
#[pyo3(signature = (model, k, tie_break="prefer-low-dim"))]
fn theoretical_mdi(model: &ModelSpec, k: usize, tie_break: &str) -> PyResult<Vec<f64>> {
    let m = population_model(model)?;
    let tb: TieBreak = tie_break.parse().map_err(to_py)?;
    let tree = oracle::build_theoretical_tree::<f64>(&m, k, tb).map_err(to_py)?;
    Ok(tree.population_mdi())
}

/// Text dump of the depth-`k` theoretical tree.
#[pyfunction]
#[pyo3(signature = (model, k, tie_break="prefer-low-dim"))]
fn theoretical_tree_text(model: &ModelSpec, k: usize, tie_break: &str) -> PyResult<String> {
    let m = population_model(model)?;
    let tb: TieBreak = tie_break.parse().map_err(to_py)?;
    let tree = oracle::build_theoretical_tree::<f64>(&m, k, tb).map_err(to_py)?;
    Ok(tree.to_text())
}

/// Gap in the first variable's MDI between the two extreme tie-breaking
/// trees of depth `k`, computed in exact arithmetic.
#[pyfunction]
fn tree_disagreement(model: &ModelSpec, k: usize) -> PyResult<f64> {
    oracle::tree_disagreement(&population_model(model)?, k).map_err(to_py)
}

#[pyfunction]
fn grid_verify_center_split<'py>(py: Python<'py>, beta: u32) -> PyResult<Bound<'py, PyDict>> {
    let r = oracle::grid_verify_center_split(beta).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("beta", r.beta)?;
    d.set_item("pitch", r.pitch)?;
    d.set_item("threshold", r.threshold)?;
    d.set_item("n_points", r.n_points)?;
    d.set_item("max_outside", r.max_outside)?;
    d.set_item("argmax", r.argmax)?;
    d.set_item("max_value", r.max_value)?;
    d.set_item("certified", r.certified)?;
    Ok(d)
}

#[pymodule]
fn mdiforest(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<ModelSpec>()?;
    m.add_class::<Dataset>()?;
    m.add_class::<Tree>()?;
    m.add_class::<Forest>()?;
    m.add_class::<Mdi>()?;
    m.add_function(wrap_pyfunction!(fit_tree, m)?)?;
    m.add_function(wrap_pyfunction!(fit_forest, m)?)?;
    m.add_function(wrap_pyfunction!(population_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(mc_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_mdi, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_tree_text, m)?)?;
    m.add_function(wrap_pyfunction!(tree_disagreement, m)?)?;
    m.add_function(wrap_pyfunction!(grid_verify_center_split, m)?)?;
    Ok(())
}
