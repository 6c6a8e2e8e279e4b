//! Exact arithmetic in `F_q = F_{p^e}`, its extensions and `F_q[t]`.

mod field;
mod poly;

pub use field::{fq_arith, is_prime, FieldElement, FieldOp, FieldSpec, FiniteField, FqElem, TABLE_CAP};
pub use poly::{PolyRing, UniPoly, ENUMERATION_CAP};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("{0} is not a supported prime")]
    NotPrime(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("element encoding {value} out of range for a field of order {order}")]
    ElementOutOfRange { value: u64, order: u64 },
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("constant polynomial not allowed here")]
    ConstantPolynomial,
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("enumeration over {size} elements exceeds the cap of {cap}")]
    CapExceeded { size: u64, cap: u64 },
}
