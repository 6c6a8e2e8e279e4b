//! Independent verification of a constructed curve and the certificate
//! format that records it.

mod certificate;
mod zeta;

pub use certificate::{Certificate, Checks, DiscChecks, FibreCertificate, Meta, Place, SCHEMA_VERSION};
pub use zeta::{zeta_check, zeta_genus, ZetaData, ZetaVerdict};

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteField, FqElem, UniPoly, ENUMERATION_CAP};
use crate::construct::{ConstructError, ConstructionInstance};
use crate::curve::{self, CurveError, CurvePoly, FibreCount};
use crate::lattice::{self, LatticeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("check `{name}` failed: {detail}")]
    Check { name: &'static str, detail: String },
    #[error("certificate schema violation: {0}")]
    Schema(String),
    #[error("enumeration over {size} elements exceeds the cap of {cap}")]
    CapExceeded { size: u64, cap: u64 },
    #[error("fibre above t = {0} vanishes identically")]
    IdenticallyZeroFibre(u64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Construct(Box<ConstructError>),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

impl From<ConstructError> for VerifyError {
    fn from(e: ConstructError) -> Self {
        VerifyError::Construct(Box::new(e))
    }
}

fn fail(name: &'static str, detail: impl Into<String>) -> VerifyError {
    VerifyError::Check { name, detail: detail.into() }
}

/// Runs `op` on a pool of `jobs` threads, or on the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, op: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().expect("thread pool").install(op),
        None => op(),
    }
}

fn linear(k: &FiniteField, a: FqElem) -> UniPoly {
    UniPoly::new(vec![k.neg(a), FqElem::ONE])
}

/// Exact `α`-power at each rational place, `β`-excess and squarefreeness of `F`.
pub fn check_discriminant(inst: &ConstructionInstance, f: &CurvePoly) -> Result<DiscChecks, VerifyError> {
    let k = inst.field();
    let r = k.polys();
    let disc = curve::discriminant_y(k, f)?;
    if disc.is_zero() {
        return Err(fail("discriminant.nonzero", "disc_y(f) = 0"));
    }
    let two_l = 2 * inst.profile().big_l as u32;
    let mut alpha_valuations = Vec::with_capacity(k.order() as usize);
    for a in k.elements() {
        let v = r.valuation_at(&disc, &linear(k, a))?.expect("nonzero");
        if v != two_l {
            return Err(fail("discriminant.alpha", format!("v_(t-{a})(disc) = {v}, expected 2L = {two_l}")));
        }
        alpha_valuations.push(v);
    }
    let gamma = inst.gamma() as u32;
    let beta_valuation = r.valuation_at(&disc, &inst.family.beta)?.expect("nonzero");
    let wild = (inst.gamma() as u64).is_multiple_of(k.characteristic());
    let excess = beta_valuation as i64 - (gamma as i64 - 1);
    let ok = if wild { excess == 0 || excess == 1 } else { excess == 0 };
    if !ok {
        return Err(fail(
            "discriminant.beta",
            format!("v_beta(disc) = {beta_valuation} with gamma = {gamma}"),
        ));
    }
    let big_f = inst.capital_f(f)?;
    if !r.is_squarefree(&big_f)? {
        return Err(fail("discriminant.squarefree", "F is not squarefree"));
    }
    Ok(DiscChecks {
        squarefree: true,
        alpha_valuations,
        beta_valuation,
        f_degree: big_f.degree().unwrap_or(0),
    })
}

/// Fibre of the degree-γ projection above a rational place, certified by
/// valuations (finite places) or degrees (infinity) and distinct slopes.
pub fn fibre_certificate(inst: &ConstructionInstance, f: &CurvePoly, place: Place) -> Result<FibreCertificate, VerifyError> {
    let k = inst.field();
    let gamma = inst.gamma();
    let (expected, observed): (Vec<i64>, Vec<Option<i64>>) = match place {
        Place::Finite(a) => {
            let p = linear(k, a);
            let obs = f
                .f
                .iter()
                .map(|fi| k.polys().valuation_at(fi, &p).map(|v| v.map(i64::from)))
                .collect::<Result<_, _>>()?;
            (inst.profile().l.clone(), obs)
        }
        Place::Infinity => {
            let exp = (0..=gamma).map(|i| inst.right.r + inst.right.lp[gamma - i]).collect();
            let obs = f.f.iter().map(|fi| fi.degree().map(|d| d as i64)).collect();
            (exp, obs)
        }
    };
    let values: Option<Vec<i64>> = observed.iter().copied().collect();
    let (slopes, distinct) = match (&values, place) {
        (Some(v), Place::Finite(_)) => {
            let s: Vec<i64> = v.windows(2).map(|w| w[1] - w[0]).collect();
            let ok = v[0] == 0 && s[0] >= 0 && s.windows(2).all(|w| w[0] < w[1]);
            (s, ok)
        }
        (Some(v), Place::Infinity) => {
            let s: Vec<i64> = (1..=gamma).map(|j| v[gamma - j] - v[gamma - j + 1]).collect();
            let ok = s.windows(2).all(|w| w[0] > w[1]);
            (s, ok)
        }
        (None, _) => (Vec::new(), false),
    };
    let passed = distinct && values.as_ref() == Some(&expected);
    Ok(FibreCertificate { place, expected, observed, slopes, passed })
}

/// Fibre certificates above `0, 1, …, q−1` (canonical order) and `∞`.
pub fn all_fibres(inst: &ConstructionInstance, f: &CurvePoly) -> Result<Vec<FibreCertificate>, VerifyError> {
    inst.field()
        .elements()
        .map(Place::Finite)
        .chain(std::iter::once(Place::Infinity))
        .map(|p| fibre_certificate(inst, f, p))
        .collect()
}

/// `N_1 = γ(q+1)` from γ certified rational points above each rational place.
pub fn rational_point_count(inst: &ConstructionInstance, fibres: &[FibreCertificate]) -> Result<u64, VerifyError> {
    let q = inst.q();
    let mut seen = vec![false; q as usize + 1];
    for fc in fibres {
        if !fc.passed {
            return Err(fail("fibres", format!("fibre above {} failed", fc.place)));
        }
        let idx = match fc.place {
            Place::Finite(a) if a.0 < q => a.0 as usize,
            Place::Infinity => q as usize,
            Place::Finite(a) => return Err(fail("fibres", format!("place {a} outside F_q"))),
        };
        seen[idx] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        let name = if i as u64 == q { "inf".to_string() } else { i.to_string() };
        return Err(fail("fibres", format!("missing fibre certificate above {name}")));
    }
    Ok(inst.gamma() as u64 * (q + 1))
}

/// Genus `interior(Δ_r) − qL`, checked against the requested genus and
/// against Baker's bound for `f`. Returns `(genus, interior)`.
pub fn genus_check(inst: &ConstructionInstance, f: &CurvePoly) -> Result<(u64, u64), VerifyError> {
    let poly = inst.delta_r()?;
    let interior = lattice::lattice_counts(&poly)?.interior;
    let correction = inst.q() * inst.profile().big_l as u64;
    let genus = interior
        .checked_sub(correction)
        .ok_or_else(|| fail("genus", format!("interior {interior} < qL = {correction}")))?;
    if genus != inst.genus {
        return Err(fail("genus", format!("interior − qL = {genus}, requested {}", inst.genus)));
    }
    if !curve::is_delta_polynomial(f, &poly) {
        return Err(fail("genus.delta_polynomial", "f is not a Δ_r-polynomial"));
    }
    let baker = curve::baker_bound(f)?;
    if baker < genus {
        return Err(fail("genus.baker", format!("Baker bound {baker} < genus {genus}")));
    }
    Ok((genus, interior))
}

/// Gonality from the degree-γ projection and the point-count bound.
pub fn gonality_certificate(inst: &ConstructionInstance, f: &CurvePoly, n1: u64) -> Result<usize, VerifyError> {
    let gamma = inst.gamma();
    let q = inst.q();
    if n1 != gamma as u64 * (q + 1) {
        return Err(fail("gonality", format!("N1 = {n1} is not γ(q+1)")));
    }
    if f.gamma != gamma || f.f[gamma].is_zero() || f.f[0].is_zero() {
        return Err(fail("gonality", "t-projection does not have degree γ"));
    }
    // a map of degree γ−1 would force N1 <= (γ−1)(q+1)
    if n1 <= (gamma as u64 - 1) * (q + 1) {
        return Err(fail("gonality", "point count does not exclude degree γ−1"));
    }
    Ok(gamma)
}

/// `|N_k − q^k − 1| ≤ 2g q^{k/2}`, compared exactly as `(N_k − q^k − 1)² ≤ 4g² q^k`.
pub fn weil_window(n: u64, k: u32, g: u64, q: u64) -> bool {
    let Some(qk) = (q as u128).checked_pow(k) else {
        return false;
    };
    let dev = n as i128 - qk as i128 - 1;
    let lhs = dev.unsigned_abs().checked_mul(dev.unsigned_abs());
    let rhs = (4 * g as u128 * g as u128).checked_mul(qk);
    matches!((lhs, rhs), (Some(l), Some(r)) if l <= r)
}

/// Runs every check on `g_tuple` and assembles the certificate.
pub fn certify(inst: &ConstructionInstance, g_tuple: Vec<UniPoly>, seed: u64, trials: u64) -> Result<Certificate, VerifyError> {
    let f = inst.assemble_f(&g_tuple).map_err(|e| fail("assembly", e.to_string()))?;
    let discriminant = check_discriminant(inst, &f)?;
    let fibres = all_fibres(inst, &f)?;
    let n1 = rational_point_count(inst, &fibres)?;
    let (genus, interior) = genus_check(inst, &f)?;
    let gonality = gonality_certificate(inst, &f, n1)?;
    if !weil_window(n1, 1, genus, inst.q()) {
        return Err(fail("weil", format!("N1 = {n1} outside the Weil window for genus {genus}")));
    }
    Ok(Certificate {
        version: SCHEMA_VERSION.to_string(),
        field: inst.field().spec(),
        gamma: inst.gamma(),
        genus: inst.genus,
        profile: inst.profile().clone(),
        right: inst.right.clone(),
        n: inst.n,
        m: inst.m,
        d: inst.d.clone(),
        beta: inst.family.beta.clone(),
        g_tuple,
        f,
        polygon: inst.delta_r()?,
        checks: Checks { discriminant, fibres, polygon_interior: interior, genus, n1, gonality },
        meta: Meta { seed, trials, tool_version: env!("CARGO_PKG_VERSION").to_string() },
    })
}

/// A certificate whose every check has been re-run from its raw tuple.
/// Point counting is only offered on this type.
#[derive(Clone, Debug)]
pub struct VerifiedCurve {
    cert: Certificate,
    inst: ConstructionInstance,
}

impl VerifiedCurve {
    pub fn certificate(&self) -> &Certificate {
        &self.cert
    }

    pub fn instance(&self) -> &ConstructionInstance {
        &self.inst
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.inst.field()
    }
}

/// Rebuilds the instance from `(field, gamma, genus)`, recomputes `f` and
/// every check from `gTuple`, and demands agreement with the stored values.
pub fn verify_certificate(cert: &Certificate) -> Result<VerifiedCurve, VerifyError> {
    cert.validate_shape()?;
    let field = FiniteField::from_spec(&cert.field).map_err(|e| VerifyError::Schema(e.to_string()))?;
    for (what, polys) in [("gTuple", &cert.g_tuple), ("f", &cert.f.f)] {
        if polys.iter().any(|p| !p.coeffs_in_subfield(field.order())) {
            return Err(VerifyError::Schema(format!("{what} has coefficients outside F_q")));
        }
    }
    let inst = ConstructionInstance::new(field, cert.gamma, cert.genus)
        .map_err(|e| fail("instance", e.to_string()))?;
    let expect = [
        ("instance.profile", cert.profile == *inst.profile()),
        ("instance.right", cert.right == inst.right),
        ("instance.residues", cert.n == inst.n && cert.m == inst.m),
        ("instance.degrees", cert.d == inst.d),
        ("instance.beta", cert.beta == inst.family.beta),
    ];
    if let Some((name, _)) = expect.iter().find(|(_, ok)| !ok) {
        return Err(fail(name, "stored value differs from the recomputed instance"));
    }
    let fresh = certify(&inst, cert.g_tuple.clone(), cert.meta.seed, cert.meta.trials)?;
    let sections = [
        ("f", fresh.f == cert.f),
        ("polygon", fresh.polygon == cert.polygon),
        ("checks.discriminant", fresh.checks.discriminant == cert.checks.discriminant),
        ("checks.fibres", fresh.checks.fibres == cert.checks.fibres),
        ("checks.polygonInterior", fresh.checks.polygon_interior == cert.checks.polygon_interior),
        ("checks.genus", fresh.checks.genus == cert.checks.genus),
        ("checks.N1", fresh.checks.n1 == cert.checks.n1),
        ("checks.gonality", fresh.checks.gonality == cert.checks.gonality),
    ];
    if let Some((name, _)) = sections.iter().find(|(_, ok)| !ok) {
        return Err(fail(name, "stored value differs from the value recomputed from gTuple"));
    }
    Ok(VerifiedCurve { cert: cert.clone(), inst })
}

/// `N_k = γ(q+1) + Σ_{t ∈ F_{q^k} \ F_q} #fibre(t)`, counting over the
/// extension built by [`FiniteField::extension`].
pub fn count_points_ext(v: &VerifiedCurve, k: usize, cap: u64, jobs: Option<usize>) -> Result<u64, VerifyError> {
    let q = v.field().order();
    let size = (q as u128).checked_pow(k as u32).filter(|&s| s <= cap as u128);
    if size.is_none() {
        return Err(VerifyError::CapExceeded { size: q.saturating_pow(k as u32), cap });
    }
    let ext = v.field().extension(k);
    count_points_in(v, &ext, jobs)
}

/// As [`count_points_ext`] for a caller-supplied extension of the curve's field.
pub fn count_points_in(v: &VerifiedCurve, ext: &Arc<FiniteField>, jobs: Option<usize>) -> Result<u64, VerifyError> {
    let q = v.field().order();
    let mut b = Some(ext);
    while let Some(x) = b {
        if **x == **v.field() {
            break;
        }
        b = x.base();
    }
    if b.is_none() {
        return Err(VerifyError::Schema("extension is not built over the curve's field".into()));
    }
    let f = &v.cert.f;
    let gamma = f.gamma;
    let rational = gamma as u64 * (q + 1);
    let rest = with_jobs(jobs, || {
        (q..ext.order())
            .into_par_iter()
            .map(|t| match curve::projective_fibre_count(ext, f, FqElem(t))? {
                FibreCount::Points(n) => Ok(n as u64),
                FibreCount::IdenticallyZero => Err(VerifyError::IdenticallyZeroFibre(t)),
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })?;
    Ok(rational + rest)
}

/// Default enumeration cap for point counting.
pub const DEFAULT_COUNT_CAP: u64 = ENUMERATION_CAP;
