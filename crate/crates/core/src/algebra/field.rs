use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::poly::UniPoly;
use super::AlgebraError;

/// Fields up to this size get log/antilog/Zech tables.
pub const TABLE_CAP: u64 = 1 << 22;

/// Canonical encoding of a field element: the integer `Σ c_i p^i` of its
/// coefficient vector over the prime field. For a tower `F_q ⊂ F_{q^k}` the
/// elements of `F_q` are exactly the encodings below `q`.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FqElem(pub u64);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serializable description of `F_q = F_{p^e}`.
///
/// `modulus` is the ascending coefficient list of a monic irreducible of
/// degree `e` over `F_p`; when absent (and `e > 1`) the first irreducible in
/// the deterministic search order is used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

impl FieldSpec {
    pub fn prime(p: u64) -> Self {
        FieldSpec { p, e: 1, modulus: None }
    }

    pub fn new(p: u64, e: u32) -> Self {
        FieldSpec { p, e, modulus: None }
    }

    pub fn cardinality(&self) -> Option<u64> {
        self.p.checked_pow(self.e)
    }
}

struct Tables {
    /// exp[i] = g^i for i in 0..2(Q-1)
    exp: Vec<u32>,
    /// log[a] for a != 0
    log: Vec<u32>,
    /// zech[n] = log(1 + g^n), or `NO_LOG` when 1 + g^n = 0
    zech: Vec<u32>,
    /// log(-1)
    neg_one: u32,
}

const NO_LOG: u32 = u32::MAX;

/// A finite field, either `F_p` or `B[u]/(m(u))` over a base field `B`.
pub struct FiniteField {
    p: u64,
    order: u64,
    degree: u32,
    base: Option<Arc<FiniteField>>,
    /// Monic modulus over `base`, ascending; empty for prime fields.
    modulus: Vec<FqElem>,
    tables: Option<Tables>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("order", &self.order)
            .field("modulus", &self.modulus)
            .field("base", &self.base)
            .finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        self.p == other.p
            && self.order == other.order
            && self.modulus == other.modulus
            && self.base == other.base
    }
}

impl Eq for FiniteField {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FiniteField {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<Self>, AlgebraError> {
        if !is_prime(p) || p >= 1 << 31 {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(Arc::new(FiniteField {
            p,
            order: p,
            degree: 1,
            base: None,
            modulus: Vec::new(),
            tables: None,
        }))
    }

    /// Builds `F_{p^e}` from its description, checking the modulus.
    pub fn from_spec(spec: &FieldSpec) -> Result<Arc<Self>, AlgebraError> {
        let fp = Self::prime(spec.p)?;
        if spec.e == 0 {
            return Err(AlgebraError::InvalidModulus("extension degree must be at least 1".into()));
        }
        match &spec.modulus {
            None if spec.e == 1 => Ok(fp),
            None => Ok(fp.extension(spec.e as usize)),
            Some(m) => {
                if m.len() != spec.e as usize + 1 {
                    return Err(AlgebraError::InvalidModulus(format!(
                        "modulus must have degree e = {}",
                        spec.e
                    )));
                }
                if spec.e == 1 {
                    // Any monic linear modulus gives F_p itself.
                    if m[1] != 1 {
                        return Err(AlgebraError::InvalidModulus("modulus must be monic".into()));
                    }
                    return Ok(fp);
                }
                let coeffs = m.iter().map(|&c| fp.elem(c)).collect::<Result<Vec<_>, _>>()?;
                Self::with_modulus(&fp, UniPoly::new(coeffs))
            }
        }
    }

    /// `base[u]/(modulus)`; the modulus must be monic and irreducible over `base`.
    pub fn with_modulus(base: &Arc<Self>, modulus: UniPoly) -> Result<Arc<Self>, AlgebraError> {
        let k = match modulus.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(AlgebraError::InvalidModulus("modulus must have degree >= 1".into())),
        };
        if modulus.lead() != FqElem::ONE {
            return Err(AlgebraError::InvalidModulus("modulus must be monic".into()));
        }
        if !base.polys().is_irreducible(&modulus)? {
            return Err(AlgebraError::InvalidModulus("modulus is reducible".into()));
        }
        if k == 1 {
            return Ok(base.clone());
        }
        Self::build_extension(base, modulus.into_coeffs())
    }

    /// `F_{q^k}` as `F_q[u]/(m(u))` with `m` the first monic irreducible of
    /// degree `k` in the deterministic search order. `k = 1` returns `self`.
    pub fn extension(self: &Arc<Self>, k: usize) -> Arc<Self> {
        assert!(k >= 1, "extension degree must be at least 1");
        if k == 1 {
            return self.clone();
        }
        let m = self.polys().find_irreducible(k);
        Self::build_extension(self, m.into_coeffs()).expect("extension order fits in u64")
    }

    fn build_extension(base: &Arc<Self>, modulus: Vec<FqElem>) -> Result<Arc<Self>, AlgebraError> {
        let k = modulus.len() - 1;
        let order = (0..k)
            .try_fold(1u64, |acc, _| acc.checked_mul(base.order))
            .filter(|&o| o < 1 << 62)
            .ok_or_else(|| AlgebraError::InvalidModulus("field too large".into()))?;
        let mut field = FiniteField {
            p: base.p,
            order,
            degree: base.degree * k as u32,
            base: Some(base.clone()),
            modulus,
            tables: None,
        };
        if order <= TABLE_CAP {
            field.tables = Some(field.build_tables());
        }
        Ok(Arc::new(field))
    }

    fn build_tables(&self) -> Tables {
        let q1 = self.order - 1;
        let factors = prime_factors(q1);
        let g = (2..self.order)
            .map(FqElem)
            .find(|&c| factors.iter().all(|&l| self.slow_pow(c, q1 / l) != FqElem::ONE))
            .expect("multiplicative group is cyclic");
        let n = q1 as usize;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![NO_LOG; self.order as usize];
        let mut x = FqElem::ONE;
        for i in 0..n {
            exp[i] = x.0 as u32;
            exp[i + n] = x.0 as u32;
            log[x.0 as usize] = i as u32;
            x = self.slow_mul(x, g);
        }
        debug_assert_eq!(x, FqElem::ONE);
        let zech = (0..n)
            .map(|i| {
                let s = self.slow_add(FqElem::ONE, FqElem(exp[i] as u64));
                if s.is_zero() {
                    NO_LOG
                } else {
                    log[s.0 as usize]
                }
            })
            .collect();
        let neg_one = if self.p == 2 { 0 } else { (q1 / 2) as u32 };
        Tables { exp, log, zech, neg_one }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Number of elements.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn base(&self) -> Option<&Arc<FiniteField>> {
        self.base.as_ref()
    }

    /// Degree over the immediate base field (1 for prime fields).
    pub fn relative_degree(&self) -> usize {
        self.modulus.len().saturating_sub(1).max(1)
    }

    pub fn modulus(&self) -> &[FqElem] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.base.is_none()
    }

    /// The description of this field as `F_{p^e}` over `F_p`. Only meaningful
    /// for fields built directly over the prime field.
    pub fn spec(&self) -> FieldSpec {
        match &self.base {
            None => FieldSpec::prime(self.p),
            Some(b) if b.is_prime_field() => FieldSpec {
                p: self.p,
                e: self.degree,
                modulus: Some(self.modulus.iter().map(|c| c.0).collect()),
            },
            Some(_) => FieldSpec { p: self.p, e: self.degree, modulus: None },
        }
    }

    /// Checked construction of an element from its canonical encoding.
    pub fn elem(&self, v: u64) -> Result<FqElem, AlgebraError> {
        if v < self.order {
            Ok(FqElem(v))
        } else {
            Err(AlgebraError::ElementOutOfRange { value: v, order: self.order })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, v: i64) -> FqElem {
        FqElem(v.rem_euclid(self.p as i64) as u64)
    }

    /// Residues mod p of the element's coordinates over `F_p`, ascending.
    pub fn coeffs(&self, a: FqElem) -> Vec<u64> {
        let mut v = a.0;
        (0..self.degree)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.order).map(FqElem)
    }

    /// Whether `a` lies in the subfield of the given order (an ancestor in the tower).
    pub fn in_subfield(&self, a: FqElem, sub_order: u64) -> bool {
        a.0 < sub_order
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.base.is_none() {
            let s = a.0 + b.0;
            return FqElem(if s >= self.p { s - self.p } else { s });
        }
        if let Some(t) = &self.tables {
            if a.is_zero() {
                return b;
            }
            if b.is_zero() {
                return a;
            }
            let n = self.order - 1;
            let la = t.log[a.0 as usize] as u64;
            let lb = t.log[b.0 as usize] as u64;
            let d = if lb >= la { lb - la } else { lb + n - la };
            let z = t.zech[d as usize];
            if z == NO_LOG {
                return FqElem::ZERO;
            }
            return FqElem(t.exp[(la + z as u64) as usize] as u64);
        }
        self.slow_add(a, b)
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        if a.is_zero() {
            return a;
        }
        if self.base.is_none() {
            return FqElem(self.p - a.0);
        }
        if let Some(t) = &self.tables {
            let l = t.log[a.0 as usize] + t.neg_one;
            return FqElem(t.exp[l as usize] as u64);
        }
        self.slow_neg(a)
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.base.is_none() {
            return FqElem(a.0 * b.0 % self.p);
        }
        if let Some(t) = &self.tables {
            if a.is_zero() || b.is_zero() {
                return FqElem::ZERO;
            }
            let l = t.log[a.0 as usize] + t.log[b.0 as usize];
            return FqElem(t.exp[l as usize] as u64);
        }
        self.slow_mul(a, b)
    }

    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        if a.is_zero() {
            return None;
        }
        if let Some(t) = &self.tables {
            let n = (self.order - 1) as u32;
            let l = (n - t.log[a.0 as usize]) % n;
            return Some(FqElem(t.exp[l as usize] as u64));
        }
        Some(self.pow(a, (self.order - 2) as u128))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem, AlgebraError> {
        let bi = self.inv(b).ok_or(AlgebraError::DivisionByZero)?;
        Ok(self.mul(a, bi))
    }

    pub fn pow(&self, a: FqElem, mut e: u128) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn base_field(&self) -> &FiniteField {
        self.base.as_deref().expect("extension field has a base")
    }

    fn digits(&self, a: FqElem) -> Vec<FqElem> {
        let bq = self.base_field().order;
        let mut v = a.0;
        (0..self.relative_degree())
            .map(|_| {
                let d = v % bq;
                v /= bq;
                FqElem(d)
            })
            .collect()
    }

    fn undigits(&self, d: &[FqElem]) -> FqElem {
        let bq = self.base_field().order;
        FqElem(d.iter().rev().fold(0u64, |acc, c| acc * bq + c.0))
    }

    fn slow_add(&self, a: FqElem, b: FqElem) -> FqElem {
        let base = self.base_field();
        let da = self.digits(a);
        let db = self.digits(b);
        let s: Vec<_> = da.iter().zip(&db).map(|(&x, &y)| base.add(x, y)).collect();
        self.undigits(&s)
    }

    fn slow_neg(&self, a: FqElem) -> FqElem {
        let base = self.base_field();
        let d: Vec<_> = self.digits(a).into_iter().map(|x| base.neg(x)).collect();
        self.undigits(&d)
    }

    fn slow_mul(&self, a: FqElem, b: FqElem) -> FqElem {
        let base = self.base_field();
        let k = self.relative_degree();
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![FqElem::ZERO; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = base.add(prod[i + j], base.mul(x, y));
            }
        }
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c.is_zero() {
                continue;
            }
            for j in 0..k {
                let t = base.mul(c, self.modulus[j]);
                prod[i - k + j] = base.sub(prod[i - k + j], t);
            }
            prod[i] = FqElem::ZERO;
        }
        self.undigits(&prod[..k])
    }

    fn slow_pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Binary field operation selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element bundled with its field, for checked arithmetic across APIs
/// where operands may come from different fields.
#[derive(Clone, Debug)]
pub struct FieldElement {
    pub field: Arc<FiniteField>,
    pub value: FqElem,
}

impl FieldElement {
    pub fn new(field: &Arc<FiniteField>, value: u64) -> Result<Self, AlgebraError> {
        Ok(FieldElement { value: field.elem(value)?, field: field.clone() })
    }

    pub fn coeffs(&self) -> Vec<u64> {
        self.field.coeffs(self.value)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field == other.field
    }
}

/// Checked field arithmetic.
pub fn fq_arith(a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement, AlgebraError> {
    if a.field != b.field {
        return Err(AlgebraError::MixedFields);
    }
    let k = &a.field;
    let value = match op {
        FieldOp::Add => k.add(a.value, b.value),
        FieldOp::Sub => k.sub(a.value, b.value),
        FieldOp::Mul => k.mul(a.value, b.value),
        FieldOp::Div => k.div(a.value, b.value)?,
    };
    Ok(FieldElement { field: k.clone(), value })
}
