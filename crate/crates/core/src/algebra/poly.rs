use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::{FiniteField, FqElem};
use super::AlgebraError;

/// Default cap on exhaustive enumeration over a field.
pub const ENUMERATION_CAP: u64 = 1 << 24;

/// Univariate polynomial, coefficients ascending by degree, trailing zeros
/// trimmed. The zero polynomial has no coefficients and degree `None`
/// (read as −∞).
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UniPoly {
    #[serde(deserialize_with = "trimmed")]
    coeffs: Vec<FqElem>,
}

fn trimmed<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<FqElem>, D::Error> {
    Ok(UniPoly::new(Vec::deserialize(d)?).coeffs)
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<FqElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| FqElem(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(FqElem::ONE)
    }

    pub fn constant(c: FqElem) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c·t^n`.
    pub fn monomial(c: FqElem, n: usize) -> Self {
        let mut v = vec![FqElem::ZERO; n + 1];
        v[n] = c;
        Self::new(v)
    }

    /// The variable `t`.
    pub fn x() -> Self {
        Self::monomial(FqElem::ONE, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lead(&self) -> FqElem {
        self.coeffs.last().copied().unwrap_or(FqElem::ZERO)
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FqElem> {
        self.coeffs
    }

    /// Ascending list of canonical integer encodings.
    pub fn to_u64s(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.0).collect()
    }

    /// Whether every coefficient is an element of the subfield of the given order.
    pub fn coeffs_in_subfield(&self, sub_order: u64) -> bool {
        self.coeffs.iter().all(|c| c.0 < sub_order)
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_u64s())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_u64s())
    }
}

/// Arithmetic in `K[t]` for a fixed field `K`.
#[derive(Clone, Copy)]
pub struct PolyRing<'a> {
    k: &'a FiniteField,
}

impl FiniteField {
    pub fn polys(&self) -> PolyRing<'_> {
        PolyRing { k: self }
    }
}

impl<'a> PolyRing<'a> {
    pub fn field(&self) -> &'a FiniteField {
        self.k
    }

    pub fn add(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        let n = a.coeffs.len().max(b.coeffs.len());
        UniPoly::new((0..n).map(|i| self.k.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn sub(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        let n = a.coeffs.len().max(b.coeffs.len());
        UniPoly::new((0..n).map(|i| self.k.sub(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(&self, a: &UniPoly) -> UniPoly {
        UniPoly::new(a.coeffs.iter().map(|&c| self.k.neg(c)).collect())
    }

    pub fn scale(&self, a: &UniPoly, c: FqElem) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly::new(a.coeffs.iter().map(|&x| self.k.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        if a.is_zero() || b.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![FqElem::ZERO; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                out[i + j] = self.k.add(out[i + j], self.k.mul(x, y));
            }
        }
        UniPoly::new(out)
    }

    pub fn pow(&self, a: &UniPoly, n: u32) -> UniPoly {
        let mut acc = UniPoly::one();
        let mut base = a.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Quotient and remainder with `deg rem < deg b`.
    pub fn divrem(&self, a: &UniPoly, b: &UniPoly) -> Result<(UniPoly, UniPoly), AlgebraError> {
        let db = b.degree().ok_or(AlgebraError::DivisionByZero)?;
        let inv_lead = self.k.inv(b.lead()).ok_or(AlgebraError::DivisionByZero)?;
        let mut rem = a.coeffs.clone();
        if rem.len() <= db {
            return Ok((UniPoly::zero(), a.clone()));
        }
        let mut quot = vec![FqElem::ZERO; rem.len() - db];
        for i in (db..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let f = self.k.mul(c, inv_lead);
            quot[i - db] = f;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                let idx = i - db + j;
                rem[idx] = self.k.sub(rem[idx], self.k.mul(f, bj));
            }
        }
        rem.truncate(db);
        Ok((UniPoly::new(quot), UniPoly::new(rem)))
    }

    pub fn rem(&self, a: &UniPoly, b: &UniPoly) -> Result<UniPoly, AlgebraError> {
        Ok(self.divrem(a, b)?.1)
    }

    /// `a / b`, failing unless the remainder vanishes.
    pub fn div_exact(&self, a: &UniPoly, b: &UniPoly) -> Result<UniPoly, AlgebraError> {
        let (q, r) = self.divrem(a, b)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgebraError::InexactDivision)
        }
    }

    pub fn monic(&self, a: &UniPoly) -> UniPoly {
        match self.k.inv(a.lead()) {
            Some(inv) => self.scale(a, inv),
            None => UniPoly::zero(),
        }
    }

    /// Monic gcd; `gcd(a, 0) = monic(a)`. Both zero is an error.
    pub fn gcd(&self, a: &UniPoly, b: &UniPoly) -> Result<UniPoly, AlgebraError> {
        if a.is_zero() && b.is_zero() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.rem(&x, &y)?;
            x = y;
            y = r;
        }
        Ok(self.monic(&x))
    }

    pub fn derivative(&self, a: &UniPoly) -> UniPoly {
        UniPoly::new(
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.k.mul(self.k.from_i64((i as u64 % self.k.characteristic()) as i64), c))
                .collect(),
        )
    }

    /// Horner evaluation. Coefficients from a subfield of `K` embed verbatim,
    /// so an `F_q[t]` polynomial can be evaluated at points of `F_{q^k}` by
    /// calling this on the extension's ring.
    pub fn eval(&self, a: &UniPoly, x: FqElem) -> FqElem {
        a.coeffs.iter().rev().fold(FqElem::ZERO, |acc, &c| self.k.add(self.k.mul(acc, x), c))
    }

    pub fn mulmod(&self, a: &UniPoly, b: &UniPoly, m: &UniPoly) -> Result<UniPoly, AlgebraError> {
        self.rem(&self.mul(a, b), m)
    }

    /// `a^e mod m` by square-and-multiply.
    pub fn powmod(&self, a: &UniPoly, mut e: u128, m: &UniPoly) -> Result<UniPoly, AlgebraError> {
        let mut base = self.rem(a, m)?;
        let mut acc = self.rem(&UniPoly::one(), m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulmod(&acc, &base, m)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mulmod(&base, &base, m)?;
            }
        }
        Ok(acc)
    }

    /// Multiplicity of the irreducible `p` in `a`; `None` when `a = 0`.
    pub fn valuation_at(&self, a: &UniPoly, p: &UniPoly) -> Result<Option<u32>, AlgebraError> {
        if p.degree().unwrap_or(0) == 0 {
            return Err(AlgebraError::ConstantPolynomial);
        }
        debug_assert!(self.is_irreducible(p)?, "valuation_at needs an irreducible prime");
        if a.is_zero() {
            return Ok(None);
        }
        let mut m = 0;
        let mut cur = a.clone();
        loop {
            let (q, r) = self.divrem(&cur, p)?;
            if !r.is_zero() {
                return Ok(Some(m));
            }
            cur = q;
            m += 1;
        }
    }

    /// True iff no irreducible factor repeats.
    pub fn is_squarefree(&self, a: &UniPoly) -> Result<bool, AlgebraError> {
        let d = a.degree().ok_or(AlgebraError::ZeroPolynomial)?;
        if d == 0 {
            return Ok(true);
        }
        let da = self.derivative(a);
        if da.is_zero() {
            // a p-th power over a perfect field
            return Ok(false);
        }
        Ok(self.gcd(a, &da)?.degree() == Some(0))
    }

    /// No factor of degree ≤ deg a / 2, checked via `gcd(t^{Q^i} − t, a)`.
    pub fn is_irreducible(&self, a: &UniPoly) -> Result<bool, AlgebraError> {
        let n = match a.degree() {
            None => return Err(AlgebraError::ZeroPolynomial),
            Some(0) => return Err(AlgebraError::ConstantPolynomial),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let m = self.monic(a);
        let x = UniPoly::x();
        let mut h = x.clone();
        for _ in 0..n / 2 {
            h = self.powmod(&h, self.k.order() as u128, &m)?;
            let g = self.gcd(&self.sub(&h, &x), &m)?;
            if g.degree() != Some(0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The first monic irreducible of degree `d`, coefficients compared
    /// lexicographically from the constant term up by canonical encoding.
    pub fn find_irreducible(&self, d: usize) -> UniPoly {
        assert!(d >= 1, "degree must be at least 1");
        let q = self.k.order();
        let mut digits = vec![0u64; d];
        loop {
            let mut coeffs: Vec<FqElem> = digits.iter().map(|&c| FqElem(c)).collect();
            coeffs.push(FqElem::ONE);
            let cand = UniPoly::new(coeffs);
            if self.is_irreducible(&cand).expect("degree >= 1") {
                return cand;
            }
            // odometer with the constant term most significant
            let mut i = d;
            loop {
                i -= 1;
                digits[i] += 1;
                if digits[i] < q {
                    break;
                }
                digits[i] = 0;
                assert!(i > 0, "irreducible polynomials exist in every degree");
            }
        }
    }

    /// Distinct roots in `K` by exhaustive evaluation.
    pub fn roots_in_field(&self, a: &UniPoly, cap: u64) -> Result<Vec<FqElem>, AlgebraError> {
        if a.is_zero() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        if self.k.order() > cap {
            return Err(AlgebraError::CapExceeded { size: self.k.order(), cap });
        }
        Ok(self.k.elements().filter(|&x| self.eval(a, x).is_zero()).collect())
    }

    /// Number of distinct roots in `K`: `deg gcd(a, y^Q − y)`.
    pub fn distinct_root_count(&self, a: &UniPoly) -> Result<usize, AlgebraError> {
        let d = a.degree().ok_or(AlgebraError::ZeroPolynomial)?;
        match d {
            0 => Ok(0),
            1 => Ok(1),
            _ => {
                let m = self.monic(a);
                let x = UniPoly::x();
                let h = self.powmod(&x, self.k.order() as u128, &m)?;
                let g = self.gcd(&m, &self.sub(&h, &x))?;
                Ok(g.degree().unwrap_or(0))
            }
        }
    }
}
