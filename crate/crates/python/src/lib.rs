//! Python bindings: fields, polygons, discriminants, construction,
//! verification, point counting and density reports.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use gonal::algebra::{AlgebraError, FieldSpec, FiniteField, FqElem, UniPoly, ENUMERATION_CAP};
use gonal::construct::{self as cons, ConstructError, SearchConfig, DEFAULT_BUDGET};
use gonal::curve::{self, CurvePoly};
use gonal::density::{self, DensityConfig, DensityError};
use gonal::lattice::{self, LatticePoint};
use gonal::verify::{self, Certificate, VerifiedCurve, VerifyError, ZetaVerdict};

create_exception!(gonal_py, GonalError, PyException);
create_exception!(gonal_py, InfeasibleGenus, GonalError);
create_exception!(gonal_py, BudgetExhausted, GonalError);
create_exception!(gonal_py, VerificationFailed, GonalError);
create_exception!(gonal_py, SchemaViolation, GonalError);
create_exception!(gonal_py, CapExceeded, GonalError);

fn algebra_err(e: AlgebraError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn verify_err(e: VerifyError) -> PyErr {
    match e {
        VerifyError::Schema(_) => SchemaViolation::new_err(e.to_string()),
        VerifyError::CapExceeded { .. } => CapExceeded::new_err(e.to_string()),
        _ => VerificationFailed::new_err(e.to_string()),
    }
}

fn construct_err(e: ConstructError) -> PyErr {
    match e {
        ConstructError::InfeasibleDegree { .. } | ConstructError::GenusTooSmall(_) => {
            InfeasibleGenus::new_err(e.to_string())
        }
        ConstructError::BudgetExhausted { .. } => BudgetExhausted::new_err(e.to_string()),
        ConstructError::GammaTooSmall(_) => PyValueError::new_err(e.to_string()),
        _ => VerificationFailed::new_err(e.to_string()),
    }
}

fn density_err(e: DensityError) -> PyErr {
    match e {
        DensityError::CapExceeded { .. } => CapExceeded::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn poly(v: Vec<u64>) -> UniPoly {
    UniPoly::from_u64s(&v)
}

/// A finite field `F_{p^e}`; elements are integer encodings below `order`.
#[pyclass(frozen, module = "gonal_py")]
struct Field {
    inner: Arc<FiniteField>,
}

impl Field {
    fn el(&self, v: u64) -> PyResult<FqElem> {
        self.inner.elem(v).map_err(algebra_err)
    }
}

#[pymethods]
impl Field {
    #[new]
    #[pyo3(signature = (p, e = 1, modulus = None))]
    fn new(p: u64, e: u32, modulus: Option<Vec<u64>>) -> PyResult<Self> {
        let inner = FiniteField::from_spec(&FieldSpec { p, e, modulus }).map_err(algebra_err)?;
        Ok(Field { inner })
    }

    #[getter]
    fn order(&self) -> u64 {
        self.inner.order()
    }

    #[getter]
    fn characteristic(&self) -> u64 {
        self.inner.characteristic()
    }

    fn add(&self, a: u64, b: u64) -> PyResult<u64> {
        Ok(self.inner.add(self.el(a)?, self.el(b)?).0)
    }

    fn sub(&self, a: u64, b: u64) -> PyResult<u64> {
        Ok(self.inner.sub(self.el(a)?, self.el(b)?).0)
    }

    fn mul(&self, a: u64, b: u64) -> PyResult<u64> {
        Ok(self.inner.mul(self.el(a)?, self.el(b)?).0)
    }

    fn div(&self, a: u64, b: u64) -> PyResult<u64> {
        Ok(self.inner.div(self.el(a)?, self.el(b)?).map_err(algebra_err)?.0)
    }

    fn pow(&self, a: u64, n: u64) -> PyResult<u64> {
        Ok(self.inner.pow(self.el(a)?, n as u128).0)
    }

    fn is_irreducible(&self, f: Vec<u64>) -> PyResult<bool> {
        self.inner.polys().is_irreducible(&poly(f)).map_err(algebra_err)
    }

    fn is_squarefree(&self, f: Vec<u64>) -> PyResult<bool> {
        self.inner.polys().is_squarefree(&poly(f)).map_err(algebra_err)
    }

    fn gcd(&self, a: Vec<u64>, b: Vec<u64>) -> PyResult<Vec<u64>> {
        Ok(self.inner.polys().gcd(&poly(a), &poly(b)).map_err(algebra_err)?.to_u64s())
    }

    /// `disc_y` of `Σ f_i(t) y^i`, given as the list of `f_i`.
    fn discriminant(&self, f: Vec<Vec<u64>>) -> PyResult<Vec<u64>> {
        let f = CurvePoly::new(f.into_iter().map(poly).collect()).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let d = curve::discriminant_y(&self.inner, &f).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(d.to_u64s())
    }

    fn __repr__(&self) -> String {
        format!("Field(order={})", self.inner.order())
    }
}

/// `(interior, boundary)` lattice point counts of the convex hull of `points`.
#[pyfunction]
fn lattice_counts(points: Vec<(i64, i64)>) -> PyResult<(u64, u64)> {
    let pts: Vec<LatticePoint> = points.into_iter().map(|(x, y)| LatticePoint::new(x, y)).collect();
    let hull = lattice::convex_hull(&pts).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let c = lattice::lattice_counts(&hull).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((c.interior, c.boundary))
}

/// Vertices of the convex hull, counterclockwise from the least vertex.
#[pyfunction]
fn convex_hull(points: Vec<(i64, i64)>) -> PyResult<Vec<(i64, i64)>> {
    let pts: Vec<LatticePoint> = points.into_iter().map(|(x, y)| LatticePoint::new(x, y)).collect();
    let hull = lattice::convex_hull(&pts).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(hull.vertices().iter().map(|v| (v.x, v.y)).collect())
}

/// A certificate whose checks have all been re-run.
#[pyclass(frozen, module = "gonal_py")]
struct Curve {
    inner: VerifiedCurve,
}

#[pymethods]
impl Curve {
    #[getter]
    fn genus(&self) -> u64 {
        self.inner.certificate().checks.genus
    }

    #[getter]
    fn gonality(&self) -> usize {
        self.inner.certificate().checks.gonality
    }

    #[getter]
    fn n1(&self) -> u64 {
        self.inner.certificate().checks.n1
    }

    #[getter]
    fn degrees(&self) -> Vec<i64> {
        self.inner.certificate().d.clone()
    }

    #[getter]
    fn r(&self) -> i64 {
        self.inner.certificate().right.r
    }

    #[getter]
    fn polygon_interior(&self) -> u64 {
        self.inner.certificate().checks.polygon_interior
    }

    /// The coefficients `f_0, …, f_γ` of the curve equation.
    #[getter]
    fn f(&self) -> Vec<Vec<u64>> {
        self.inner.certificate().f.f.iter().map(UniPoly::to_u64s).collect()
    }

    fn to_json(&self) -> String {
        self.inner.certificate().to_json()
    }

    /// `N_k`, the number of points over `F_{q^k}`.
    #[pyo3(signature = (k, cap = ENUMERATION_CAP, jobs = None))]
    fn count_points(&self, py: Python<'_>, k: usize, cap: u64, jobs: Option<usize>) -> PyResult<u64> {
        py.detach(|| verify::count_points_ext(&self.inner, k, cap, jobs)).map_err(verify_err)
    }

    /// `(consistent, counts, l_coeffs)` for a genus claim (default: the certified genus).
    #[pyo3(signature = (genus = None, cap = ENUMERATION_CAP, jobs = None))]
    fn zeta(&self, py: Python<'_>, genus: Option<u64>, cap: u64, jobs: Option<usize>) -> PyResult<(bool, Vec<u64>, Vec<i128>)> {
        let g = genus.unwrap_or_else(|| self.genus());
        let v = py.detach(|| verify::zeta_genus(&self.inner, g, cap, jobs)).map_err(verify_err)?;
        Ok(match v {
            ZetaVerdict::Consistent { data } => (true, data.counts, data.l_coeffs),
            ZetaVerdict::Inconsistent { data: Some(data), .. } => (false, data.counts, data.l_coeffs),
            ZetaVerdict::Inconsistent { data: None, .. } => (false, Vec::new(), Vec::new()),
        })
    }

    fn __repr__(&self) -> String {
        let c = self.inner.certificate();
        format!("Curve(q={}, gamma={}, genus={}, N1={})", self.inner.field().order(), c.gamma, c.genus, c.checks.n1)
    }
}

/// Searches for a curve of the given gonality and genus and verifies it.
#[pyfunction]
#[pyo3(signature = (p, gamma, genus, e = 1, seed = 0, budget = DEFAULT_BUDGET, jobs = None))]
#[allow(clippy::too_many_arguments)]
fn construct(py: Python<'_>, p: u64, gamma: usize, genus: u64, e: u32, seed: u64, budget: u64, jobs: Option<usize>) -> PyResult<Curve> {
    let field = FiniteField::from_spec(&FieldSpec::new(p, e)).map_err(algebra_err)?;
    let cfg = SearchConfig { seed, budget, jobs };
    let cert = py.detach(|| cons::construct_curve(field, gamma, genus, &cfg)).map_err(construct_err)?;
    let inner = verify::verify_certificate(&cert).map_err(verify_err)?;
    Ok(Curve { inner })
}

/// Parses and verifies a certificate from its JSON text.
#[pyfunction]
fn verify_json(py: Python<'_>, text: &str) -> PyResult<Curve> {
    let cert = Certificate::from_json(text).map_err(verify_err)?;
    let inner = py.detach(|| verify::verify_certificate(&cert)).map_err(verify_err)?;
    Ok(Curve { inner })
}

/// Degree plan `d_0, …, d_γ` for an instance; raises `InfeasibleGenus`.
#[pyfunction]
#[pyo3(signature = (p, gamma, genus, e = 1))]
fn degree_plan(p: u64, gamma: usize, genus: u64, e: u32) -> PyResult<Vec<i64>> {
    let field = FiniteField::from_spec(&FieldSpec::new(p, e)).map_err(algebra_err)?;
    Ok(cons::ConstructionInstance::new(field, gamma, genus).map_err(construct_err)?.d)
}

/// Density report as a JSON string.
#[pyfunction]
#[pyo3(signature = (p, gamma, d = None, e = 1, trials = 2000, seed = 0, max_prime_degree = 2, cap = ENUMERATION_CAP))]
#[allow(clippy::too_many_arguments)]
fn density_report(
    py: Python<'_>,
    p: u64,
    gamma: usize,
    d: Option<Vec<i64>>,
    e: u32,
    trials: u64,
    seed: u64,
    max_prime_degree: usize,
    cap: u64,
) -> PyResult<String> {
    let field = FiniteField::from_spec(&FieldSpec::new(p, e)).map_err(algebra_err)?;
    let profile = cons::default_profile(gamma).map_err(construct_err)?;
    let family = cons::Family::new(field, profile);
    let cfg = DensityConfig { max_degree: max_prime_degree, degrees: d, trials, seed, cap, jobs: None };
    let report = py.detach(|| density::density_report(&family, &cfg)).map_err(density_err)?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

#[pymodule]
fn gonal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Field>()?;
    m.add_class::<Curve>()?;
    m.add_function(wrap_pyfunction!(lattice_counts, m)?)?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(verify_json, m)?)?;
    m.add_function(wrap_pyfunction!(degree_plan, m)?)?;
    m.add_function(wrap_pyfunction!(density_report, m)?)?;
    m.add("GonalError", py.get_type::<GonalError>())?;
    m.add("InfeasibleGenus", py.get_type::<InfeasibleGenus>())?;
    m.add("BudgetExhausted", py.get_type::<BudgetExhausted>())?;
    m.add("VerificationFailed", py.get_type::<VerificationFailed>())?;
    m.add("SchemaViolation", py.get_type::<SchemaViolation>())?;
    m.add("CapExceeded", py.get_type::<CapExceeded>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
