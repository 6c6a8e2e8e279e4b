//! Bivariate polynomials `f(t, y) = Σ f_i(t) y^i` over `F_q`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteField, FqElem, PolyRing, UniPoly};
use crate::lattice::{convex_hull, lattice_counts, LatticeError, LatticePoint, LatticePolygon};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("y-degree {0} too small for this operation")]
    GammaTooSmall(usize),
    #[error("leading y-coefficient f_gamma vanishes")]
    ZeroLeading,
    #[error("discriminant identity failed: resultant not divisible by f_gamma")]
    InexactDiscriminant,
    #[error("interpolated discriminant has coefficients outside the base field")]
    NotInBaseField,
}

/// `f(t, y) = Σ_{i=0}^{γ} f_i(t) y^i`, stored dehomogenized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoly {
    pub gamma: usize,
    pub f: Vec<UniPoly>,
}

impl CurvePoly {
    /// Requires `f_γ ≠ 0`.
    pub fn new(f: Vec<UniPoly>) -> Result<Self, CurveError> {
        match f.last() {
            None => Err(CurveError::ZeroPolynomial),
            Some(top) if top.is_zero() => Err(CurveError::ZeroLeading),
            Some(_) => Ok(CurvePoly { gamma: f.len() - 1, f }),
        }
    }

    pub fn coeff(&self, i: usize) -> &UniPoly {
        &self.f[i]
    }

    /// Exponent pairs `(i, j)` with a nonzero `t^i y^j` term.
    pub fn support(&self) -> Vec<LatticePoint> {
        self.f
            .iter()
            .enumerate()
            .flat_map(|(j, fj)| {
                fj.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(move |(i, _)| LatticePoint::new(i as i64, j as i64))
            })
            .collect()
    }

    /// Largest t-degree among the coefficients.
    pub fn max_t_degree(&self) -> usize {
        self.f.iter().filter_map(UniPoly::degree).max().unwrap_or(0)
    }

    /// Shape-consistent deserialization check.
    pub fn validate(&self) -> Result<(), CurveError> {
        if self.f.len() != self.gamma + 1 {
            return Err(CurveError::ZeroPolynomial);
        }
        if self.f[self.gamma].is_zero() {
            return Err(CurveError::ZeroLeading);
        }
        Ok(())
    }
}

pub fn newton_polygon(f: &CurvePoly) -> Result<LatticePolygon, CurveError> {
    let s = f.support();
    if s.is_empty() {
        return Err(CurveError::ZeroPolynomial);
    }
    Ok(convex_hull(&s)?)
}

/// Interior lattice count of the Newton polygon, an upper bound for the
/// geometric genus of an absolutely irreducible `f`.
pub fn baker_bound(f: &CurvePoly) -> Result<u64, CurveError> {
    Ok(lattice_counts(&newton_polygon(f)?)?.interior)
}

/// `Δ(f) ⊆ Δ` and every edge of `Δ` meets the support of `f`.
pub fn is_delta_polynomial(f: &CurvePoly, delta: &LatticePolygon) -> bool {
    let s = f.support();
    s.iter().all(|&p| delta.contains(p))
        && delta.edges().all(|(a, b)| {
            let edge = LatticePolygon::segment(a, b);
            s.iter().any(|&p| edge.on_boundary(p))
        })
}

impl LatticePolygon {
    fn segment(a: LatticePoint, b: LatticePoint) -> LatticePolygon {
        convex_hull(&[a, b]).expect("nonempty")
    }
}

fn sylvester_sign(gamma: usize) -> bool {
    (gamma * (gamma - 1) / 2) % 2 == 1
}

/// Sylvester matrix of a polynomial of formal degree `m` (coefficients
/// ascending, length m+1) and one of formal degree `n`.
fn sylvester<T: Clone>(p: &[T], q: &[T], zero: T) -> Vec<Vec<T>> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (j, c) in p.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (j, c) in q.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Determinant over `K[t]` by fraction-free (Bareiss) elimination.
pub fn det_poly(ring: PolyRing<'_>, mut m: Vec<Vec<UniPoly>>) -> Result<UniPoly, AlgebraError> {
    let n = m.len();
    if n == 0 {
        return Ok(UniPoly::one());
    }
    let mut negate = false;
    let mut prev = UniPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(UniPoly::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = ring.mul(&m[k][k], &m[i][j]);
                let b = ring.mul(&m[i][k], &m[k][j]);
                m[i][j] = ring.div_exact(&ring.sub(&a, &b), &prev)?;
            }
            m[i][k] = UniPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if negate { ring.neg(&d) } else { d })
}

/// Determinant over a field by Gaussian elimination.
#[allow(clippy::needless_range_loop)]
pub fn det_field(k: &FiniteField, mut m: Vec<Vec<FqElem>>) -> FqElem {
    let n = m.len();
    let mut det = FqElem::ONE;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return FqElem::ZERO;
        };
        if piv != c {
            m.swap(piv, c);
            det = k.neg(det);
        }
        let inv = k.inv(m[c][c]).expect("nonzero pivot");
        det = k.mul(det, m[c][c]);
        for r in c + 1..n {
            let f = k.mul(m[r][c], inv);
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let t = k.mul(f, m[c][j]);
                m[r][j] = k.sub(m[r][j], t);
            }
        }
    }
    det
}

/// Discriminant of `f` in `y` over `F_q[t]`:
/// `(−1)^{γ(γ−1)/2} Res_y(f, ∂_y f) / f_γ`, with the Sylvester matrix taken
/// at formal sizes γ and γ−1 in every characteristic. A zero result means `f`
/// has a repeated factor in `y`.
pub fn discriminant_y(k: &FiniteField, f: &CurvePoly) -> Result<UniPoly, CurveError> {
    if f.gamma < 2 {
        return Err(CurveError::GammaTooSmall(f.gamma));
    }
    let ring = k.polys();
    let lead = &f.f[f.gamma];
    if lead.is_zero() {
        return Err(CurveError::ZeroLeading);
    }
    let deriv: Vec<UniPoly> = (1..=f.gamma)
        .map(|i| ring.scale(&f.f[i], k.from_i64((i as u64 % k.characteristic()) as i64)))
        .collect();
    let res = det_poly(ring, sylvester(&f.f, &deriv, UniPoly::zero()))?;
    let disc = ring.div_exact(&res, lead).map_err(|_| CurveError::InexactDiscriminant)?;
    Ok(if sylvester_sign(f.gamma) { ring.neg(&disc) } else { disc })
}

/// Discriminant of a univariate polynomial of formal degree `γ = coeffs.len() − 1`
/// over a field; requires the top coefficient to be nonzero.
pub fn discriminant_formal(k: &FiniteField, coeffs: &[FqElem]) -> Result<FqElem, CurveError> {
    let gamma = coeffs.len().saturating_sub(1);
    if gamma < 2 {
        return Err(CurveError::GammaTooSmall(gamma));
    }
    let lead = coeffs[gamma];
    if lead.is_zero() {
        return Err(CurveError::ZeroLeading);
    }
    let deriv: Vec<FqElem> = (1..=gamma)
        .map(|i| k.mul(coeffs[i], k.from_i64((i as u64 % k.characteristic()) as i64)))
        .collect();
    let res = det_field(k, sylvester(coeffs, &deriv, FqElem::ZERO));
    let disc = k.div(res, lead)?;
    Ok(if sylvester_sign(gamma) { k.neg(disc) } else { disc })
}

/// Newton-form interpolation through distinct nodes.
pub fn interpolate(k: &FiniteField, xs: &[FqElem], ys: &[FqElem]) -> Result<UniPoly, AlgebraError> {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = k.sub(coef[i], coef[i - 1]);
            let den = k.sub(xs[i], xs[i - j]);
            coef[i] = k.div(num, den)?;
        }
    }
    let ring = k.polys();
    let mut acc = UniPoly::zero();
    for i in (0..n).rev() {
        let lin = UniPoly::new(vec![k.neg(xs[i]), FqElem::ONE]);
        acc = ring.add(&ring.mul(&acc, &lin), &UniPoly::constant(coef[i]));
    }
    Ok(acc)
}

/// Discriminant by evaluation at points of an extension where `f_γ` does
/// not vanish, followed by interpolation. Independent of [`discriminant_y`].
pub fn discriminant_by_interpolation(k: &std::sync::Arc<FiniteField>, f: &CurvePoly) -> Result<UniPoly, CurveError> {
    if f.gamma < 2 {
        return Err(CurveError::GammaTooSmall(f.gamma));
    }
    let maxdeg = f.max_t_degree() as u64;
    let bound = (2 * f.gamma as u64 - 1) * maxdeg;
    let need = bound + f.gamma as u64 * maxdeg;
    let mut ext_deg = 1;
    while k.order().pow(ext_deg as u32) <= need {
        ext_deg += 1;
    }
    let ext = k.extension(ext_deg);
    let er = ext.polys();
    let lead = &f.f[f.gamma];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for a in ext.elements() {
        if xs.len() as u64 == bound + 1 {
            break;
        }
        if er.eval(lead, a).is_zero() {
            continue;
        }
        let fibre: Vec<FqElem> = f.f.iter().map(|fi| er.eval(fi, a)).collect();
        xs.push(a);
        ys.push(discriminant_formal(&ext, &fibre)?);
    }
    let d = interpolate(&ext, &xs, &ys)?;
    if !d.coeffs_in_subfield(k.order()) {
        return Err(CurveError::NotInBaseField);
    }
    Ok(d)
}

/// `Σ f_i(a) y^i` over the field containing `a` (coefficients of `f` embed).
pub fn eval_t(ext: &FiniteField, f: &CurvePoly, a: FqElem) -> UniPoly {
    let r = ext.polys();
    UniPoly::new(f.f.iter().map(|fi| r.eval(fi, a)).collect())
}

/// Points `[y : z]` of `P¹` over a fibre of `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FibreCount {
    Points(usize),
    /// Every `f_i(a)` vanishes.
    IdenticallyZero,
}

impl FibreCount {
    /// Numeric form, with `γ + 1` standing in for an identically-zero fibre.
    pub fn as_count(self, gamma: usize) -> usize {
        match self {
            FibreCount::Points(n) => n,
            FibreCount::IdenticallyZero => gamma + 1,
        }
    }
}

/// Distinct roots of `Σ f_i(a) y^i z^{γ−i}` in `P¹(K)`: affine roots plus
/// `[1:0]` when the y-degree drops.
pub fn projective_fibre_count(ext: &FiniteField, f: &CurvePoly, a: FqElem) -> Result<FibreCount, CurveError> {
    let h = eval_t(ext, f, a);
    let Some(d) = h.degree() else {
        return Ok(FibreCount::IdenticallyZero);
    };
    let affine = ext.polys().distinct_root_count(&h)?;
    Ok(FibreCount::Points(affine + usize::from(d < f.gamma)))
}

/// `#{(t, y) ∈ K² : f(t, y) = 0}` summed over all `t ∈ K` (distinct `y` per fibre).
pub fn affine_point_count(ext: &FiniteField, f: &CurvePoly) -> Result<u64, CurveError> {
    let r = ext.polys();
    let mut n = 0u64;
    for a in ext.elements() {
        let h = eval_t(ext, f, a);
        if h.is_zero() {
            n += ext.order();
        } else {
            n += r.distinct_root_count(&h)? as u64;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn p(c: &[u64]) -> UniPoly {
        UniPoly::from_u64s(c)
    }

    fn field(q: u64) -> Arc<FiniteField> {
        FiniteField::prime(q).unwrap()
    }

    fn pts(v: &[(i64, i64)]) -> Vec<LatticePoint> {
        v.iter().map(|&(x, y)| LatticePoint::new(x, y)).collect()
    }

    /// y² − t³ − 1 over F_5
    fn elliptic5() -> CurvePoly {
        CurvePoly::new(vec![p(&[4, 0, 0, 4]), p(&[]), p(&[1])]).unwrap()
    }

    #[test]
    fn newton_polygon_examples() {
        let np = newton_polygon(&elliptic5()).unwrap();
        assert_eq!(np.vertices(), pts(&[(0, 0), (3, 0), (0, 2)]).as_slice());
        let y = CurvePoly::new(vec![p(&[]), p(&[1])]).unwrap();
        assert_eq!(newton_polygon(&y).unwrap().vertices(), pts(&[(0, 1)]).as_slice());
        // t y + t³ + y² over F_3
        let f = CurvePoly::new(vec![p(&[0, 0, 0, 1]), p(&[0, 1]), p(&[1])]).unwrap();
        assert_eq!(newton_polygon(&f).unwrap().vertices(), pts(&[(0, 2), (1, 1), (3, 0)]).as_slice());
    }

    #[test]
    fn baker_bound_examples() {
        assert_eq!(baker_bound(&elliptic5()).unwrap(), 1);
        let f = CurvePoly::new(vec![p(&[4, 0, 4]), p(&[]), p(&[1])]).unwrap();
        assert_eq!(baker_bound(&f).unwrap(), 0);
        let y = CurvePoly::new(vec![p(&[]), p(&[1])]).unwrap();
        assert!(baker_bound(&y).is_err());
    }

    #[test]
    fn hyperelliptic_baker_bound() {
        for g in 1..=5usize {
            let mut c = vec![0u64; 2 * g + 2];
            c[1] = 2;
            c[2 * g + 1] = 2;
            let f = CurvePoly::new(vec![p(&c), p(&[]), p(&[1])]).unwrap();
            assert_eq!(baker_bound(&f).unwrap(), g as u64);
        }
    }

    #[test]
    fn delta_polynomial_examples() {
        let f = elliptic5();
        let np = newton_polygon(&f).unwrap();
        assert!(is_delta_polynomial(&f, &np));
        // (0,2) is an endpoint of the slanted edge of conv{(0,0),(4,0),(0,2)},
        // so that polygon is still met on every edge
        let wide = convex_hull(&pts(&[(0, 0), (4, 0), (0, 2)])).unwrap();
        assert!(is_delta_polynomial(&f, &wide));
        let big = convex_hull(&pts(&[(0, 0), (4, 0), (0, 3)])).unwrap();
        assert!(!is_delta_polynomial(&f, &big));
        let small = convex_hull(&pts(&[(0, 0), (2, 0), (0, 2)])).unwrap();
        assert!(!is_delta_polynomial(&f, &small));
    }

    #[test]
    fn discriminant_examples() {
        let k = field(5);
        let r = k.polys();
        // y² + b y + c → b² − 4c
        let b = p(&[1, 2, 3]);
        let c = p(&[4, 0, 1, 1]);
        let f = CurvePoly::new(vec![c.clone(), b.clone(), p(&[1])]).unwrap();
        let expect = r.sub(&r.mul(&b, &b), &r.scale(&c, FqElem(4)));
        assert_eq!(discriminant_y(&k, &f).unwrap(), expect);
        // y³ + p y + s → −4p³ − 27s²
        let pp = p(&[2, 1]);
        let s = p(&[1, 0, 3]);
        let f = CurvePoly::new(vec![s.clone(), pp.clone(), p(&[]), p(&[1])]).unwrap();
        let p3 = r.pow(&pp, 3);
        let s2 = r.mul(&s, &s);
        let expect = r.add(&r.scale(&p3, k.from_i64(-4)), &r.scale(&s2, k.from_i64(-27)));
        assert_eq!(discriminant_y(&k, &f).unwrap(), expect);
        // char 2: y² + b y + c → b²
        let k2 = field(2);
        let b = p(&[1, 1, 0, 1]);
        let f = CurvePoly::new(vec![p(&[1, 0, 1]), b.clone(), p(&[1, 1])]).unwrap();
        assert_eq!(discriminant_y(&k2, &f).unwrap(), k2.polys().mul(&b, &b));
    }

    #[test]
    fn discriminant_of_square_is_zero() {
        let k = field(3);
        // (y − t)² = y² − 2t y + t²
        let f = CurvePoly::new(vec![p(&[0, 0, 1]), p(&[0, 1]), p(&[1])]).unwrap();
        assert!(discriminant_y(&k, &f).unwrap().is_zero());
    }

    #[test]
    fn eval_and_fibre_examples() {
        let k5 = field(5);
        let f = elliptic5();
        assert_eq!(eval_t(&k5, &f, FqElem(0)), p(&[4, 0, 1]));
        assert_eq!(eval_t(&k5, &f, FqElem(2)), p(&[1, 0, 1]));
        let k3 = field(3);
        let g = CurvePoly::new(vec![p(&[1]), p(&[1]), p(&[0, 1])]).unwrap();
        assert_eq!(eval_t(&k3, &g, FqElem(0)), p(&[1, 1]));

        assert_eq!(projective_fibre_count(&k5, &f, FqElem(0)).unwrap(), FibreCount::Points(2));
        assert_eq!(projective_fibre_count(&k5, &f, FqElem(4)).unwrap(), FibreCount::Points(1));
        // f_2(0) = 0, f_1(0) ≠ 0: one affine root plus the point at infinity
        assert_eq!(projective_fibre_count(&k3, &g, FqElem(0)).unwrap(), FibreCount::Points(2));
        let z = CurvePoly::new(vec![p(&[0, 1]), p(&[0, 1]), p(&[0, 1])]).unwrap();
        let zc = projective_fibre_count(&k3, &z, FqElem(0)).unwrap();
        assert_eq!(zc, FibreCount::IdenticallyZero);
        assert_eq!(zc.as_count(2), 3);
    }

    #[test]
    fn linear_factor_discriminant() {
        // disc((y − u)(y − v)) = (u − v)²
        let k = field(7);
        let r = k.polys();
        let u = p(&[1, 2, 3]);
        let v = p(&[5, 0, 1, 4]);
        let f = CurvePoly::new(vec![r.mul(&u, &v), r.neg(&r.add(&u, &v)), p(&[1])]).unwrap();
        let d = r.sub(&u, &v);
        assert_eq!(discriminant_y(&k, &f).unwrap(), r.mul(&d, &d));
    }

    fn bivariate_mul(k: &FiniteField, a: &CurvePoly, b: &CurvePoly) -> CurvePoly {
        let r = k.polys();
        let mut out = vec![UniPoly::zero(); a.gamma + b.gamma + 1];
        for (i, ai) in a.f.iter().enumerate() {
            for (j, bj) in b.f.iter().enumerate() {
                out[i + j] = r.add(&out[i + j], &r.mul(ai, bj));
            }
        }
        CurvePoly::new(out).unwrap()
    }

    fn curve_strategy(q: u64, max_gamma: usize, max_deg: usize) -> impl Strategy<Value = CurvePoly> {
        (1..=max_gamma)
            .prop_flat_map(move |g| prop::collection::vec(prop::collection::vec(0..q, 0..=max_deg + 1), g + 1))
            .prop_filter_map("zero leading", |cs| CurvePoly::new(cs.iter().map(|c| p(c)).collect()).ok())
    }

    proptest! {
        #[test]
        fn newton_polygon_of_product_is_minkowski_sum(
            a in curve_strategy(5, 2, 3),
            b in curve_strategy(5, 2, 3),
        ) {
            let k = field(5);
            let na = newton_polygon(&a).unwrap();
            let nb = newton_polygon(&b).unwrap();
            let sums: Vec<_> = na.vertices().iter()
                .flat_map(|u| nb.vertices().iter().map(move |v| LatticePoint::new(u.x + v.x, u.y + v.y)))
                .collect();
            prop_assert_eq!(newton_polygon(&bivariate_mul(&k, &a, &b)).unwrap(), convex_hull(&sums).unwrap());
        }

        #[test]
        fn sylvester_matches_interpolation(f in curve_strategy(3, 4, 4)) {
            prop_assume!(f.gamma >= 2);
            let k = field(3);
            prop_assert_eq!(discriminant_y(&k, &f).unwrap(), discriminant_by_interpolation(&k, &f).unwrap());
        }

        #[test]
        fn fibre_count_matches_enumeration(f in curve_strategy(3, 3, 3), a in 0u64..9) {
            let k9 = field(3).extension(2);
            let h = eval_t(&k9, &f, FqElem(a));
            let expected = if h.is_zero() {
                FibreCount::IdenticallyZero
            } else {
                let roots = k9.polys().roots_in_field(&h, 1 << 24).unwrap().len();
                FibreCount::Points(roots + usize::from(h.degree().unwrap() < f.gamma))
            };
            prop_assert_eq!(projective_fibre_count(&k9, &f, FqElem(a)).unwrap(), expected);
        }
    }
}
