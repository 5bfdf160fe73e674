//! Python bindings: built-in models, bulk pairings, edge spectral flow,
//! relative windings and the correspondence check.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bec_core::edge::{self, EdgeOptions};
use bec_core::extension::BoundaryCondition;
use bec_core::models::tables::{self, Expectation, TableId};
use bec_core::models::{self, Geometry, ModelDescriptor, Params};
use bec_core::symbol;

create_exception!(bec, BecError, PyException, "Raised for invalid input and numerical failures.");

fn err(e: bec_core::BecError) -> PyErr {
    BecError::new_err(e.to_string())
}

fn model(name: &str, params: Option<BTreeMap<String, f64>>) -> PyResult<ModelDescriptor> {
    models::builtin(name, &params.unwrap_or_default()).map_err(err)
}

fn geometry(model: &ModelDescriptor, name: Option<&str>) -> PyResult<Option<Geometry>> {
    match name {
        None => Ok(None),
        Some("halfline") => Ok(Some(Geometry::Halfline)),
        Some("interface") => Ok(Some(Geometry::Interface)),
        Some(other) => Err(BecError::new_err(format!(
            "unknown geometry `{other}` for {}; expected halfline or interface",
            model.name
        ))),
    }
}

/// A condition from the model's families, or its reference condition when `family` is `None`.
fn condition(
    model: &ModelDescriptor,
    family: Option<&str>,
    params: Option<Params>,
    geometry: Option<Geometry>,
) -> PyResult<(BoundaryCondition, Geometry)> {
    match family {
        Some(f) => {
            let g = model.geometry_of(f).map_err(err)?;
            if geometry.is_some_and(|x| x != g) {
                return Err(BecError::new_err(format!("family `{f}` belongs to the other geometry")));
            }
            Ok((model.boundary_condition(f, &params.unwrap_or_default()).map_err(err)?, g))
        }
        None => {
            let g = geometry.unwrap_or(if model.halfline.is_some() { Geometry::Halfline } else { Geometry::Interface });
            Ok((model.reference_condition(g).map_err(err)?, g))
        }
    }
}

fn options(model: &ModelDescriptor, k_window: Option<f64>, k_resolution: Option<usize>) -> PyResult<EdgeOptions> {
    let mut o = model.edge_options();
    if let Some(w) = k_window {
        o.k_window = w;
    }
    if let Some(r) = k_resolution {
        o.k_resolution = r;
    }
    o.validate().map_err(err)?;
    Ok(o)
}

/// Names of the built-in models.
#[pyfunction]
fn builtin_models() -> Vec<&'static str> {
    models::BUILTIN_NAMES.to_vec()
}

/// Chern number of the Fermi projection below `level`; returns `(value, residual)`.
#[pyfunction]
#[pyo3(signature = (model_name, params=None, level=None, tol=1e-6))]
fn chern(
    py: Python<'_>,
    model_name: &str,
    params: Option<BTreeMap<String, f64>>,
    level: Option<f64>,
    tol: f64,
) -> PyResult<(f64, f64)> {
    let m = model(model_name, params)?;
    let level = level.unwrap_or(m.fiducial_e);
    let r = py.detach(|| symbol::chern(&m.symbol, level, tol)).map_err(err)?;
    Ok((r.value, r.residual))
}

/// Relative Chern number of two parameter choices of one model; returns `(value, residual)`.
#[pyfunction]
#[pyo3(signature = (model_name, params, other, level=None, tol=1e-6))]
fn relative_chern(
    py: Python<'_>,
    model_name: &str,
    params: BTreeMap<String, f64>,
    other: BTreeMap<String, f64>,
    level: Option<f64>,
    tol: f64,
) -> PyResult<(f64, f64)> {
    let (a, b) = (model(model_name, Some(params))?, model(model_name, Some(other))?);
    let level = level.unwrap_or(a.fiducial_e);
    let r = py.detach(|| symbol::relative_chern(&a.symbol, &b.symbol, level, tol)).map_err(err)?;
    Ok((r.value, r.residual))
}

/// Net signed number of edge bands crossing `energy`, counted directly.
#[pyfunction]
#[pyo3(signature = (model_name, params=None, bc=None, bc_params=None, energy=None, geometry=None, k_window=None, k_resolution=None))]
#[allow(clippy::too_many_arguments)]
fn spectral_flow(
    py: Python<'_>,
    model_name: &str,
    params: Option<BTreeMap<String, f64>>,
    bc: Option<&str>,
    bc_params: Option<BTreeMap<String, f64>>,
    energy: Option<f64>,
    geometry: Option<&str>,
    k_window: Option<f64>,
    k_resolution: Option<usize>,
) -> PyResult<i64> {
    let m = model(model_name, params)?;
    let g = self::geometry(&m, geometry)?;
    let (c, g) = condition(&m, bc, bc_params, g)?;
    let p = m.problem(g).map_err(err)?;
    let opts = options(&m, k_window, k_resolution)?;
    let e = energy.unwrap_or(m.fiducial_e);
    let f = py.detach(|| edge::spectral_flow_direct(&p, &c, e, &opts)).map_err(err)?;
    Ok(f.value)
}

/// Tracked edge bands as a list of `(ks, lambdas)` pairs.
#[pyfunction]
#[pyo3(signature = (model_name, params=None, bc=None, bc_params=None, energy=None, geometry=None, k_window=None, k_resolution=None))]
#[allow(clippy::too_many_arguments)]
fn edge_bands(
    py: Python<'_>,
    model_name: &str,
    params: Option<BTreeMap<String, f64>>,
    bc: Option<&str>,
    bc_params: Option<BTreeMap<String, f64>>,
    energy: Option<f64>,
    geometry: Option<&str>,
    k_window: Option<f64>,
    k_resolution: Option<usize>,
) -> PyResult<Vec<(Vec<f64>, Vec<f64>)>> {
    let m = model(model_name, params)?;
    let g = self::geometry(&m, geometry)?;
    let (c, g) = condition(&m, bc, bc_params, g)?;
    let p = m.problem(g).map_err(err)?;
    let opts = options(&m, k_window, k_resolution)?;
    let e = energy.unwrap_or(m.fiducial_e);
    let spec = py.detach(|| edge::track_bands(&p, &c, e, &opts)).map_err(err)?;
    Ok(spec.bands.iter().map(|b| b.samples.iter().copied().unzip()).collect())
}

/// Calibrated winding of `U_bc` relative to `U_ref`; the reference defaults to the model's.
#[pyfunction]
#[pyo3(signature = (model_name, params=None, bc=None, bc_params=None, reference=None, reference_params=None, geometry=None))]
#[allow(clippy::too_many_arguments)]
fn relative_winding(
    py: Python<'_>,
    model_name: &str,
    params: Option<BTreeMap<String, f64>>,
    bc: Option<&str>,
    bc_params: Option<BTreeMap<String, f64>>,
    reference: Option<&str>,
    reference_params: Option<BTreeMap<String, f64>>,
    geometry: Option<&str>,
) -> PyResult<i64> {
    let m = model(model_name, params)?;
    let g = self::geometry(&m, geometry)?;
    let (c, g) = condition(&m, bc, bc_params, g)?;
    let (r, _) = condition(&m, reference, reference_params, Some(g))?;
    let p = m.problem(g).map_err(err)?;
    let w = py.detach(|| edge::relative_winding(&p, &c, &r)).map_err(err)?;
    Ok(w.value)
}

/// Checks `SF(bc) - SF(ref) = wind(bc, ref)`, optionally with the bulk term; returns a dict.
#[pyfunction]
#[pyo3(signature = (model_name, params=None, bc=None, bc_params=None, reference=None, reference_params=None, energy=None, bulk=false, tol=1e-6))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    model_name: &str,
    params: Option<BTreeMap<String, f64>>,
    bc: Option<&str>,
    bc_params: Option<BTreeMap<String, f64>>,
    reference: Option<&str>,
    reference_params: Option<BTreeMap<String, f64>>,
    energy: Option<f64>,
    bulk: bool,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let m = model(model_name, params)?;
    let (c, g) = condition(&m, bc, bc_params, None)?;
    let (r, _) = condition(&m, reference, reference_params, Some(g))?;
    let opts = m.edge_options();
    let e = energy.unwrap_or(m.fiducial_e);
    let out = py.detach(|| models::verify_pair(&m, g, &c, &r, e, &opts, bulk, tol)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("status", out.status.to_string())?;
    d.set_item("condition", out.condition)?;
    d.set_item("reference", out.reference)?;
    d.set_item("verdicts", (out.verdicts.0.to_string(), out.verdicts.1.to_string()))?;
    d.set_item("sf", out.sf)?;
    d.set_item("sf_reference", out.sf_ref)?;
    d.set_item("winding", out.wind)?;
    if let Some(b) = out.bulk {
        d.set_item("bulk", b.value)?;
        d.set_item("bulk_holds", b.holds)?;
    }
    d.set_item("warnings", out.warnings)?;
    Ok(d)
}

/// Recomputes a reference table (`laplacian`, `dirac` or `regdirac`); one dict per row.
#[pyfunction]
fn run_table<'py>(py: Python<'py>, name: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let id = TableId::parse(name).map_err(err)?;
    let report = py.detach(|| tables::run_table(id)).map_err(err)?;
    report
        .rows
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("class", r.class)?;
            d.set_item("condition", r.condition)?;
            match r.expected {
                Expectation::Values { sf, wind } => d.set_item("expected", (sf, wind))?,
                Expectation::NotAffiliated => d.set_item("expected", "not affiliated")?,
            }
            d.set_item("verdict", r.verdict.to_string())?;
            d.set_item("sf", r.sf)?;
            d.set_item("winding", r.wind)?;
            d.set_item("matches", r.matches)?;
            Ok(d)
        })
        .collect()
}

/// Momentum and energy where the half-line Dirac band meets the bulk; `None` for `|a| = 1`.
#[pyfunction]
fn dirac_touch_point(m: f64, a: f64) -> PyResult<Option<(f64, f64)>> {
    edge::dirac_touch_point(m, a).map_err(err)
}

#[pymodule]
fn bec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BecError", m.py().get_type::<BecError>())?;
    m.add_function(wrap_pyfunction!(builtin_models, m)?)?;
    m.add_function(wrap_pyfunction!(chern, m)?)?;
    m.add_function(wrap_pyfunction!(relative_chern, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_flow, m)?)?;
    m.add_function(wrap_pyfunction!(edge_bands, m)?)?;
    m.add_function(wrap_pyfunction!(relative_winding, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_table, m)?)?;
    m.add_function(wrap_pyfunction!(dirac_touch_point, m)?)?;
    Ok(())
}
