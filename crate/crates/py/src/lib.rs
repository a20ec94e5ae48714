//! Python bindings. Reports come back as plain dicts decoded from the same
//! JSON the command-line tool writes.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyComplex;

use zcwell_core::analysis::{kinetic_expectation, momentum_density, momentum_moments, momentum_wavefunction};
use zcwell_core::asym::{self, AsymmetricWell};
use zcwell_core::design::{critical_strengths, triangle_design, twin_designs, DesignOptions, ZcDesign};
use zcwell_core::io::{self, DesignFile, PartnerFile};
use zcwell_core::oracle::{isospectral_check, verify_design};
use zcwell_core::susy::{isospectral_pair, partner_potential};
use zcwell_core::{Boundary, Knot, PiecewiseLinearWave, UnitSystem, WellDomain, ZcError};

fn err(e: ZcError) -> PyErr {
    let msg = format!("[{}] {e}", e.code());
    if e.is_numerical() {
        PyRuntimeError::new_err(msg)
    } else {
        PyValueError::new_err(msg)
    }
}

fn units(hbar: f64, mass: f64) -> PyResult<UnitSystem> {
    UnitSystem::new(hbar, mass).map_err(err)
}

fn boundary(name: &str) -> PyResult<Boundary> {
    match name {
        "dirichlet" => Ok(Boundary::Dirichlet),
        "periodic" => Ok(Boundary::Periodic),
        _ => Err(PyValueError::new_err(format!("unknown boundary {name:?}"))),
    }
}

fn json_loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A waveform together with the spike strengths that make it a zero-energy
/// eigenstate.
#[pyclass(name = "Design", module = "zcwell", frozen)]
struct PyDesign {
    inner: ZcDesign,
}

#[pymethods]
impl PyDesign {
    /// Design from knots `[(x, psi), ...]` spanning `[0, a]`.
    #[new]
    #[pyo3(signature = (knots, a, boundary_name = "dirichlet", hbar = 1.0, mass = 1.0, allow_seam_spike = false))]
    fn new(
        knots: Vec<(f64, f64)>,
        a: f64,
        boundary_name: &str,
        hbar: f64,
        mass: f64,
        allow_seam_spike: bool,
    ) -> PyResult<Self> {
        let domain = WellDomain::new(a, boundary(boundary_name)?).map_err(err)?;
        let wave = PiecewiseLinearWave::new(domain, knots.into_iter().map(|(x, p)| Knot::new(x, p)).collect())
            .map_err(err)?;
        let options = DesignOptions { allow_seam_spike };
        let inner = critical_strengths(&wave, &units(hbar, mass)?, options).map_err(err)?;
        Ok(PyDesign { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (c, a = 1.0, hbar = 1.0, mass = 1.0))]
    fn triangle(c: f64, a: f64, hbar: f64, mass: f64) -> PyResult<Self> {
        let inner = triangle_design(c, a, &units(hbar, mass)?).map_err(err)?;
        Ok(PyDesign { inner })
    }

    /// The symmetric and antisymmetric twin-spike designs.
    #[staticmethod]
    #[pyo3(signature = (a = 1.0, hbar = 1.0, mass = 1.0))]
    fn twins(a: f64, hbar: f64, mass: f64) -> PyResult<(Self, Self)> {
        let (s, t) = twin_designs(a, &units(hbar, mass)?).map_err(err)?;
        Ok((PyDesign { inner: s }, PyDesign { inner: t }))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = DesignFile::from_json(text)
            .and_then(|f| f.design(DesignOptions::default()))
            .map_err(err)?;
        Ok(PyDesign { inner })
    }

    fn to_json(&self) -> String {
        DesignFile::from_design(&self.inner).to_json()
    }

    #[getter]
    fn width(&self) -> f64 {
        self.inner.domain().width
    }

    #[getter]
    fn knots(&self) -> Vec<(f64, f64)> {
        self.inner.wave().knots().iter().map(|k| (k.x, k.psi)).collect()
    }

    /// `[(position, strength), ...]`
    #[getter]
    fn spikes(&self) -> Vec<(f64, f64)> {
        self.inner.potential().spikes().iter().map(|s| (s.position, s.strength)).collect()
    }

    fn psi(&self, x: f64) -> PyResult<f64> {
        self.inner.wave().eval(x).map_err(err)
    }

    /// `{"kinetic_gradient", "kinetic_distributional", "potential", "total"}`
    fn energies<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let e = kinetic_expectation(&self.inner);
        let text = format!(
            r#"{{"kinetic_gradient": {:?}, "kinetic_distributional": {:?}, "potential": {:?}, "total": {:?}}}"#,
            e.kinetic_gradient, e.kinetic_distributional, e.potential, e.total
        );
        json_loads(py, &text)
    }

    fn phi<'py>(&self, py: Python<'py>, p: f64) -> Bound<'py, PyComplex> {
        let s = momentum_wavefunction(&self.inner, p);
        PyComplex::from_doubles(py, s.phi_re, s.phi_im)
    }

    fn momentum_density(&self, p: f64) -> f64 {
        momentum_density(&self.inner, p)
    }

    fn momentum_densities(&self, ps: Vec<f64>) -> Vec<f64> {
        ps.into_iter().map(|p| momentum_density(&self.inner, p)).collect()
    }

    /// Parseval integral and second moment of the momentum density.
    #[pyo3(signature = (tail_tolerance = 1e-8))]
    fn moments<'py>(&self, py: Python<'py>, tail_tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
        let m = momentum_moments(&self.inner, tail_tolerance).map_err(err)?;
        let text = format!(
            r#"{{"norm": {:?}, "norm_tail_bound": {:?}, "p2": {:?}, "p2_analytic": {:?}, "delta_p": {:?}, "cutoff": {:?}}}"#,
            m.norm_quadrature, m.norm_tail_bound, m.p2_quadrature, m.p2_analytic, m.delta_p, m.cutoff
        );
        json_loads(py, &text)
    }

    /// Partner potential in the partner file layout.
    fn partner<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let p = partner_potential(&self.inner).map_err(err)?;
        json_loads(py, &PartnerFile::from_partner(&p).to_json())
    }

    #[pyo3(signature = (ladder = vec![599, 1199, 2399], k = 5))]
    fn verify<'py>(&self, py: Python<'py>, ladder: Vec<usize>, k: usize) -> PyResult<Bound<'py, PyAny>> {
        let r = py.detach(|| verify_design(&self.inner, &ladder, k)).map_err(err)?;
        json_loads(py, &io::spectral_report_json(&r))
    }

    #[pyo3(signature = (ladder = vec![599, 1199, 2399], k = 5, rel_tol = 0.01))]
    fn isospectral<'py>(&self, py: Python<'py>, ladder: Vec<usize>, k: usize, rel_tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let pair = isospectral_pair(&self.inner).map_err(err)?;
        let r = py.detach(|| isospectral_check(&pair, k, &ladder, rel_tol)).map_err(err)?;
        json_loads(py, &io::isospectral_report_json(&r))
    }

    fn __repr__(&self) -> String {
        format!("Design(width={}, spikes={:?})", self.width(), self.spikes())
    }
}

/// Lowest levels of the asymmetric well as `[(n, E, regime), ...]`.
#[pyfunction]
#[pyo3(signature = (a, b, v0, count, hbar = 1.0, mass = 1.0))]
fn asym_levels(a: f64, b: f64, v0: f64, count: usize, hbar: f64, mass: f64) -> PyResult<Vec<(usize, f64, String)>> {
    let well = AsymmetricWell::new(a, b, v0).map_err(err)?;
    let levels = asym::solve_levels(&well, &units(hbar, mass)?, count).map_err(err)?;
    Ok(levels.into_iter().map(|l| (l.index, l.energy, l.regime.to_string())).collect())
}

/// `(chi, v0)` for the step height with a zero-curvature state on `branch`.
#[pyfunction]
#[pyo3(signature = (a, b, branch = 0, hbar = 1.0, mass = 1.0))]
fn solve_zc_v0(a: f64, b: f64, branch: usize, hbar: f64, mass: f64) -> PyResult<(f64, f64)> {
    let t = asym::solve_zc_v0(a, b, branch, &units(hbar, mass)?).map_err(err)?;
    Ok((t.chi, t.v0))
}

/// Probabilities of the free and step regions for a tuned well.
#[pyfunction]
#[pyo3(signature = (a, b, v0, hbar = 1.0, mass = 1.0))]
fn zc_region_probabilities(a: f64, b: f64, v0: f64, hbar: f64, mass: f64) -> PyResult<(f64, f64)> {
    let well = AsymmetricWell::new(a, b, v0).map_err(err)?;
    let w = asym::zc_wave(&well, &units(hbar, mass)?).map_err(err)?;
    Ok(w.region_probabilities())
}

#[pymodule]
fn zcwell(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDesign>()?;
    m.add_function(wrap_pyfunction!(asym_levels, m)?)?;
    m.add_function(wrap_pyfunction!(solve_zc_v0, m)?)?;
    m.add_function(wrap_pyfunction!(zc_region_probabilities, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
