//! Python bindings: label maps, decompositions, shapes, generators and the
//! regularity metrics.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use shapereg::graph::{adjacency_graph, edge_stats};
use shapereg::io::{Axes, Series};
use shapereg::metrics::{self, UeFormula};
use shapereg::synth::{self, GrayImage, NoiseSpec, QuadtreeParams, ShapeKind};
use shapereg::{ConnectivityPolicy, Error};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        Error::EmptyInput | Error::DegeneratePolygon | Error::ShapeVanished => {
            PyRuntimeError::new_err(err.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_kind(kind: &str) -> PyResult<ShapeKind> {
    kind.parse().map_err(to_py)
}

fn parse_policy(policy: &str) -> PyResult<ConnectivityPolicy> {
    match policy {
        "split" => Ok(ConnectivityPolicy::SplitDisconnected),
        "strict" => Ok(ConnectivityPolicy::Strict),
        other => Err(PyValueError::new_err(format!(
            "policy must be 'split' or 'strict', got {other:?}"
        ))),
    }
}

fn shape_metrics_dict<'py>(py: Python<'py>, m: &metrics::ShapeMetrics) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("circularity", m.circularity)?;
    d.set_item("solidity", m.solidity)?;
    d.set_item("vxy", m.vxy)?;
    d.set_item("contour_smoothness", m.contour_smoothness)?;
    d.set_item("src", m.src_term)?;
    Ok(d)
}

/// Row-major grid of superpixel labels.
#[pyclass(name = "LabelMap", module = "pyshapereg", skip_from_py_object)]
#[derive(Clone)]
struct PyLabelMap {
    inner: shapereg::LabelMap,
}

#[pymethods]
impl PyLabelMap {
    #[new]
    fn new(width: u32, height: u32, labels: Vec<u32>) -> PyResult<Self> {
        Ok(PyLabelMap {
            inner: shapereg::LabelMap::new(width, height, labels).map_err(to_py)?,
        })
    }

    /// Reads a `.pgm`, `.png` or `.csv` label map.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyLabelMap {
            inner: shapereg::io::load_label_map(path).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        shapereg::io::save_label_map(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.height()
    }

    #[getter]
    fn labels(&self) -> Vec<u32> {
        self.inner.labels().to_vec()
    }

    fn get(&self, x: u32, y: u32) -> PyResult<u32> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(PyValueError::new_err(format!("({x}, {y}) is outside the map")));
        }
        Ok(self.inner.get(x, y))
    }

    fn distinct_labels(&self) -> usize {
        self.inner.distinct_labels()
    }

    /// Splits the map into 4-connected superpixels.
    #[pyo3(signature = (policy = "split"))]
    fn decompose(&self, policy: &str) -> PyResult<PyDecomposition> {
        let inner = shapereg::extract_superpixels(&self.inner, parse_policy(policy)?).map_err(to_py)?;
        Ok(PyDecomposition { inner })
    }

    fn __eq__(&self, other: PyRef<'_, PyLabelMap>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("LabelMap({}x{})", self.inner.width(), self.inner.height())
    }
}

/// One superpixel.
#[pyclass(name = "Shape", module = "pyshapereg", skip_from_py_object)]
#[derive(Clone)]
struct PyShape {
    inner: shapereg::Shape,
}

#[pymethods]
impl PyShape {
    #[new]
    #[pyo3(signature = (pixels, label = 1))]
    fn new(pixels: Vec<(u32, u32)>, label: u32) -> PyResult<Self> {
        let inner = shapereg::Shape::from_pixels(
            label,
            pixels.into_iter().map(|(x, y)| shapereg::PixelCoord::new(x, y)),
        )
        .map_err(to_py)?;
        Ok(PyShape { inner })
    }

    #[getter]
    fn label(&self) -> u32 {
        self.inner.label
    }

    #[getter]
    fn area(&self) -> usize {
        self.inner.area()
    }

    #[getter]
    fn perimeter(&self) -> usize {
        self.inner.perimeter()
    }

    #[getter]
    fn barycenter(&self) -> (f64, f64) {
        self.inner.barycenter()
    }

    #[getter]
    fn sigma(&self) -> (f64, f64) {
        (self.inner.sigma_x(), self.inner.sigma_y())
    }

    fn pixels(&self) -> Vec<(u32, u32)> {
        self.inner.pixels().iter().map(|p| (p.x, p.y)).collect()
    }

    /// `(hull_area_px, hull_perimeter_px)`.
    fn hull_stats(&self) -> (usize, usize) {
        let h = shapereg::geometry::hull_stats(&self.inner);
        (h.hull_area_px, h.hull_perimeter_px)
    }

    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        shape_metrics_dict(py, &metrics::ShapeMetrics::of(&self.inner))
    }

    fn circularity_raw(&self) -> f64 {
        metrics::circularity_raw(&self.inner)
    }

    #[pyo3(signature = (amplitude, rounds = NoiseSpec::DEFAULT_ROUNDS, seed = 0))]
    fn perturb(&self, amplitude: f64, rounds: u32, seed: u64) -> PyResult<PyShape> {
        let spec = NoiseSpec::new(amplitude, rounds, seed).map_err(to_py)?;
        Ok(PyShape {
            inner: synth::perturb_boundary(&self.inner, &spec).map_err(to_py)?,
        })
    }

    fn translate(&self, x0: u32, y0: u32) -> PyResult<PyShape> {
        Ok(PyShape {
            inner: synth::translate(&self.inner, x0, y0).map_err(to_py)?,
        })
    }

    fn rotate90(&self) -> PyResult<PyShape> {
        Ok(PyShape {
            inner: synth::rotate90(&self.inner).map_err(to_py)?,
        })
    }

    fn to_label_map(&self, width: u32, height: u32) -> PyLabelMap {
        PyLabelMap {
            inner: self.inner.to_label_map(width, height),
        }
    }

    fn __repr__(&self) -> String {
        format!("Shape(label={}, area={})", self.inner.label, self.inner.area())
    }
}

/// A label map split into 4-connected shapes.
#[pyclass(name = "Decomposition", module = "pyshapereg")]
struct PyDecomposition {
    inner: shapereg::Decomposition,
}

#[pymethods]
impl PyDecomposition {
    #[getter]
    fn n_superpixels(&self) -> usize {
        self.inner.shapes().len()
    }

    fn shapes(&self) -> Vec<PyShape> {
        self.inner
            .shapes()
            .iter()
            .map(|s| PyShape { inner: s.clone() })
            .collect()
    }

    fn src(&self) -> f64 {
        metrics::src(&self.inner)
    }

    /// Area-weighted decomposition scores.
    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = metrics::decomposition_metrics(&self.inner);
        let d = PyDict::new(py);
        d.set_item("src", m.src)?;
        d.set_item("circularity_mean", m.circularity_mean)?;
        d.set_item("solidity_mean", m.solidity_mean)?;
        d.set_item("vxy_mean", m.vxy_mean)?;
        d.set_item("contour_smoothness_mean", m.contour_smoothness_mean)?;
        d.set_item("n_superpixels", m.n_superpixels)?;
        Ok(d)
    }

    fn shape_metrics<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        metrics::shape_metrics(&self.inner)
            .iter()
            .map(|m| shape_metrics_dict(py, m))
            .collect()
    }

    /// Undersegmentation error; `formula` is `"min_in_out"` or `"leakage"`.
    #[pyo3(signature = (gt, formula = "min_in_out"))]
    fn undersegmentation_error(&self, gt: PyRef<'_, PyLabelMap>, formula: &str) -> PyResult<f64> {
        let f = match formula {
            "min_in_out" => UeFormula::MinInOut,
            "leakage" => UeFormula::Leakage,
            other => return Err(PyValueError::new_err(format!("unknown UE formula {other:?}"))),
        };
        metrics::undersegmentation_error_with(&self.inner, &gt.inner, f).map_err(to_py)
    }

    #[pyo3(signature = (gt, eps = metrics::DEFAULT_BR_EPS))]
    fn boundary_recall(&self, gt: PyRef<'_, PyLabelMap>, eps: u32) -> PyResult<f64> {
        metrics::boundary_recall(&self.inner, &gt.inner, eps).map_err(to_py)
    }

    /// Adjacency edges as `(label_a, label_b, length)`.
    fn graph_edges(&self) -> Vec<(u32, u32, f64)> {
        let g = adjacency_graph(&self.inner);
        g.edges
            .iter()
            .map(|e| (g.nodes[e.a].label, g.nodes[e.b].label, e.length))
            .collect()
    }

    fn edge_stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = edge_stats(&adjacency_graph(&self.inner)).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("n_edges", s.n_edges)?;
        d.set_item("mean_length", s.mean_length)?;
        d.set_item("stddev_length", s.stddev_length)?;
        d.set_item("coefficient_of_variation", s.coefficient_of_variation)?;
        d.set_item("min", s.min)?;
        d.set_item("max", s.max)?;
        Ok(d)
    }

    fn graph_svg(&self) -> String {
        shapereg::graph::graph_svg(&self.inner, &adjacency_graph(&self.inner))
    }
}

/// One of: square, circle, hexagon, ellipse, cross, bean, w, split, u.
#[pyfunction]
fn make_shape(kind: &str, size: u32) -> PyResult<PyShape> {
    Ok(PyShape {
        inner: synth::make_shape(parse_kind(kind)?, size).map_err(to_py)?,
    })
}

#[pyfunction]
fn shape_kinds() -> Vec<&'static str> {
    ShapeKind::ALL.iter().map(|k| k.name()).collect()
}

#[pyfunction]
fn square_grid(width: u32, height: u32, k: u32) -> PyResult<PyLabelMap> {
    Ok(PyLabelMap {
        inner: synth::square_grid(width, height, k).map_err(to_py)?,
    })
}

#[pyfunction]
fn hex_grid(width: u32, height: u32, k: u32) -> PyResult<PyLabelMap> {
    Ok(PyLabelMap {
        inner: synth::hex_grid(width, height, k).map_err(to_py)?,
    })
}

/// Quadtree of a square power-of-two intensity image given row-major.
#[pyfunction]
#[pyo3(signature = (values, side, threshold, min_block, max_block = None))]
fn quadtree(
    values: Vec<f64>,
    side: u32,
    threshold: f64,
    min_block: u32,
    max_block: Option<u32>,
) -> PyResult<PyLabelMap> {
    let image = GrayImage::new(side, side, values).map_err(to_py)?;
    let params = QuadtreeParams {
        variance_threshold: threshold,
        min_block,
        max_block: max_block.unwrap_or(side),
    };
    Ok(PyLabelMap {
        inner: synth::quadtree(&image, &params).map_err(to_py)?,
    })
}

/// Seed-averaged `(amplitude, src_mean, circularity_mean)` rows.
#[pyfunction]
#[pyo3(signature = (kind, size, amplitudes, seeds = 20, rounds = NoiseSpec::DEFAULT_ROUNDS))]
fn study_noise(
    kind: &str,
    size: u32,
    amplitudes: Vec<f64>,
    seeds: u32,
    rounds: u32,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let rows = shapereg::study::study_noise(parse_kind(kind)?, size, &amplitudes, seeds, rounds)
        .map_err(to_py)?;
    Ok(rows
        .iter()
        .map(|r| (r.amplitude, r.src_mean, r.circularity_mean))
        .collect())
}

/// SVG line plot of named `(x, y)` series.
#[pyfunction]
#[pyo3(signature = (series, title = "", x_label = "", y_label = ""))]
fn emit_plot(
    series: Vec<(String, Vec<(f64, f64)>)>,
    title: &str,
    x_label: &str,
    y_label: &str,
) -> PyResult<String> {
    let series: Vec<Series> = series.into_iter().map(|(n, p)| Series::new(n, p)).collect();
    let axes = Axes {
        title: title.into(),
        x_label: x_label.into(),
        y_label: y_label.into(),
    };
    shapereg::io::emit_plot(&series, &axes).map_err(to_py)
}

#[pymodule]
fn pyshapereg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLabelMap>()?;
    m.add_class::<PyShape>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(make_shape, m)?)?;
    m.add_function(wrap_pyfunction!(shape_kinds, m)?)?;
    m.add_function(wrap_pyfunction!(square_grid, m)?)?;
    m.add_function(wrap_pyfunction!(hex_grid, m)?)?;
    m.add_function(wrap_pyfunction!(quadtree, m)?)?;
    m.add_function(wrap_pyfunction!(study_noise, m)?)?;
    m.add_function(wrap_pyfunction!(emit_plot, m)?)?;
    Ok(())
}
